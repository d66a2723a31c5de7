#include "fraclab/tools/report.hpp"

#include <cstdio>
#include <ostream>
#include <stdexcept>

namespace fraclab::tools {

Table::Table(std::vector<std::string> columns) : columns_(std::move(columns)) {
    if (columns_.empty()) throw std::invalid_argument("Table: no columns");
}

void Table::add_row(std::vector<Cell> row) {
    if (row.size() != columns_.size()) throw std::invalid_argument("Table: row width does not match the header");
    rows_.push_back(std::move(row));
}

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string quote_field(const std::string& s) {
    if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

std::string format_cell(const Cell& c) {
    struct Visitor {
        std::string operator()(double v) const { return format_double(v); }
        std::string operator()(std::int64_t v) const { return std::to_string(v); }
        std::string operator()(bool v) const { return v ? "true" : "false"; }
        std::string operator()(const std::string& v) const { return quote_field(v); }
    };
    return std::visit(Visitor{}, c);
}

void write_csv(std::ostream& os, const Table& t) {
    for (std::size_t i = 0; i < t.columns().size(); ++i) {
        if (i) os << ',';
        os << quote_field(t.columns()[i]);
    }
    os << "\r\n";
    for (const auto& row : t.rows()) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) os << ',';
            os << format_cell(row[i]);
        }
        os << "\r\n";
    }
}

}  // namespace fraclab::tools
