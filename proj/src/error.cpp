#include "phishml/error.hpp"

namespace phishml {

namespace {

std::string located(const std::string& what, std::size_t row, std::size_t column) {
  if (row == 0 && column == 0) return what;
  std::string out = what + " (";
  if (row != 0) out += "row " + std::to_string(row);
  if (row != 0 && column != 0) out += ", ";
  if (column != 0) out += "column " + std::to_string(column);
  return out + ")";
}

}  // namespace

DataError::DataError(const std::string& what, std::size_t row, std::size_t column)
    : Error(located(what, row, column)), row_(row), column_(column) {}

}  // namespace phishml
