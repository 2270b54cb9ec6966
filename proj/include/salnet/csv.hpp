#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace salnet {

enum class ColumnType { integer, real, text };

struct Column {
    std::string name;
    ColumnType type = ColumnType::real;

    bool operator==(const Column&) const = default;
};

using Cell = std::variant<std::int64_t, double, std::string>;
using Row = std::vector<Cell>;

// A typed table with a fixed column schema. Reals are written with the
// shortest representation that parses back to the same double.
struct Table {
    std::string name;  // file stem, e.g. "metrics"
    std::vector<Column> columns;
    std::vector<Row> rows;

    // Throws std::invalid_argument when the row does not match the schema.
    void add(Row row);
    std::size_t column_index(std::string_view name) const;
    double real(std::size_t row, std::string_view column) const;
    std::int64_t integer(std::size_t row, std::string_view column) const;
    const std::string& text(std::size_t row, std::string_view column) const;

    bool operator==(const Table&) const = default;
};

std::string write_csv(const Table& table);

// Parses CSV text against a known schema; the header must match the column
// names exactly. Throws std::runtime_error with the line number on failure.
Table parse_csv(std::string_view text, const std::vector<Column>& columns, std::string name = {});

}  // namespace salnet
