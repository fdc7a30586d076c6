#ifndef DAAS_ERROR_HPP
#define DAAS_ERROR_HPP

#include <stdexcept>
#include <string>

namespace daas {

/// Raised when an input violates an operation's precondition.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Raised by ingestion; carries the 1-based data row (0 when not row specific).
class ParseError : public Error {
public:
  ParseError(const std::string& what, std::size_t row, std::string column = {})
      : Error(what), row_(row), column_(std::move(column)) {}

  std::size_t row() const noexcept { return row_; }
  const std::string& column() const noexcept { return column_; }

private:
  std::size_t row_;
  std::string column_;
};

} // namespace daas

#endif
