#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <variant>
#include <vector>

namespace fraclab::tools {

using Cell = std::variant<double, std::int64_t, bool, std::string>;

/// A CSV table: one header row naming every column, then rows of equal width.
class Table {
public:
    explicit Table(std::vector<std::string> columns);

    void add_row(std::vector<Cell> row);
    const std::vector<std::string>& columns() const noexcept { return columns_; }
    const std::vector<std::vector<Cell>>& rows() const noexcept { return rows_; }

private:
    std::vector<std::string> columns_;
    std::vector<std::vector<Cell>> rows_;
};

/// 17 significant digits, '.' decimal separator, 'e' exponent.
std::string format_double(double v);

/// RFC 4180 field quoting: fields containing ',', '"', CR or LF are quoted.
std::string quote_field(const std::string& s);

std::string format_cell(const Cell& c);

/// Writes the table with CRLF line ends.
void write_csv(std::ostream& os, const Table& t);

}  // namespace fraclab::tools
