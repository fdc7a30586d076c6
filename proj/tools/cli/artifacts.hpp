#ifndef DAAS_CLI_ARTIFACTS_HPP
#define DAAS_CLI_ARTIFACTS_HPP

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

namespace daas::cli {

/// Output files staged in memory and published together.
class ArtifactSet {
public:
  void add(std::string name, std::string contents) {
    files_.emplace_back(std::move(name), std::move(contents));
  }
  std::size_t size() const { return files_.size(); }

  /// Writes every file to a temporary sibling, then renames them all into
  /// `dir`. On failure nothing written by this call is left behind.
  void commit(const std::filesystem::path& dir) const;

private:
  std::vector<std::pair<std::string, std::string>> files_;
};

} // namespace daas::cli

#endif
