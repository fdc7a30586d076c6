#ifndef DAAS_CSV_HPP
#define DAAS_CSV_HPP

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace daas::csv {

/// Splits one CSV record. Double-quoted fields may contain commas and "" escapes.
std::vector<std::string> split_record(std::string_view line);

/// Quotes a field only when it contains a comma, quote, or line break.
std::string escape(std::string_view field);

/**
 * Formats a real for emission: integer-representable values print as plain
 * integers, everything else with 17 significant digits, so parsing the text
 * back yields the identical double.
 */
std::string format_real(double value);

/// Writes `contents` to `path` through a temporary sibling and a rename.
void write_atomic(const std::filesystem::path& path, std::string_view contents);

} // namespace daas::csv

#endif
