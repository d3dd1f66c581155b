#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace speclines::csv {

/// Shortest round-trip-safe text at 17 significant digits, '.' decimal,
/// independent of the global locale.
std::string format(double value);
std::string format(std::int64_t value);
inline std::string format(int value) { return format(static_cast<std::int64_t>(value)); }
inline std::string format(std::uint64_t value) { return std::to_string(value); }
inline std::string format(std::string_view value) { return std::string(value); }
inline std::string format(const char* value) { return std::string(value); }

/// Accumulates one table in memory; rows are written in insertion order.
class Table {
 public:
  explicit Table(std::vector<std::string> header) : header_(std::move(header)) {}

  template <typename... Cells>
  void add(const Cells&... cells) {
    std::vector<std::string> row;
    row.reserve(sizeof...(cells));
    (row.push_back(format(cells)), ...);
    add_row(std::move(row));
  }
  void add_row(std::vector<std::string> row);
  /// Appends all rows of `other`; headers must match.
  void append(const Table& other);

  [[nodiscard]] const std::vector<std::string>& header() const { return header_; }
  [[nodiscard]] std::size_t size() const { return rows_.size(); }
  [[nodiscard]] const std::vector<std::string>& row(std::size_t i) const { return rows_[i]; }

  void write(std::ostream& out) const;
  [[nodiscard]] std::string str() const;

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

}  // namespace speclines::csv
