#include "speclines/csv.hpp"

#include <charconv>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace speclines::csv {

std::string format(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buffer[64];
  const auto result =
      std::to_chars(buffer, buffer + sizeof(buffer), value, std::chars_format::general, 17);
  return std::string(buffer, result.ptr);
}

std::string format(std::int64_t value) { return std::to_string(value); }

void Table::add_row(std::vector<std::string> row) {
  if (row.size() != header_.size()) {
    throw std::logic_error("csv::Table: row width does not match header");
  }
  rows_.push_back(std::move(row));
}

void Table::append(const Table& other) {
  if (other.header_ != header_) throw std::logic_error("csv::Table: header mismatch");
  rows_.insert(rows_.end(), other.rows_.begin(), other.rows_.end());
}

namespace {
void write_line(std::ostream& out, const std::vector<std::string>& cells) {
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) out << ',';
    out << cells[i];
  }
  out << '\n';
}
}  // namespace

void Table::write(std::ostream& out) const {
  write_line(out, header_);
  for (const auto& row : rows_) write_line(out, row);
}

std::string Table::str() const {
  std::ostringstream out;
  write(out);
  return out.str();
}

}  // namespace speclines::csv
