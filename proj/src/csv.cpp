#include "salnet/csv.hpp"

#include <charconv>
#include <stdexcept>

#include "salnet/format.hpp"

namespace salnet {

namespace {

bool matches(const Cell& cell, ColumnType type) {
    switch (type) {
        case ColumnType::integer: return std::holds_alternative<std::int64_t>(cell);
        case ColumnType::real: return std::holds_alternative<double>(cell);
        case ColumnType::text: return std::holds_alternative<std::string>(cell);
    }
    return false;
}

void append_text(std::string& out, const std::string& s) {
    if (s.find_first_of(",\"\n\r") == std::string::npos) {
        out += s;
        return;
    }
    out += '"';
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
}

// Splits one record starting at `pos`; advances `pos` past the line end.
std::vector<std::string> split_record(std::string_view text, std::size_t& pos, std::size_t line) {
    std::vector<std::string> fields(1);
    bool quoted = false;
    while (pos < text.size()) {
        const char c = text[pos];
        if (quoted) {
            if (c == '"') {
                if (pos + 1 < text.size() && text[pos + 1] == '"') {
                    fields.back() += '"';
                    ++pos;
                } else {
                    quoted = false;
                }
            } else {
                fields.back() += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            fields.emplace_back();
        } else if (c == '\n') {
            ++pos;
            return fields;
        } else if (c != '\r') {
            fields.back() += c;
        }
        ++pos;
    }
    if (quoted) throw std::runtime_error("csv line " + std::to_string(line) + ": unterminated quote");
    return fields;
}

Cell parse_cell(const std::string& field, ColumnType type, std::size_t line) {
    try {
        switch (type) {
            case ColumnType::integer: {
                std::int64_t v = 0;
                const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
                if (ec != std::errc() || ptr != field.data() + field.size()) throw std::invalid_argument(field);
                return v;
            }
            case ColumnType::real: return parse_double(field);
            case ColumnType::text: return field;
        }
    } catch (const std::invalid_argument&) {
    }
    throw std::runtime_error("csv line " + std::to_string(line) + ": bad value '" + field + "'");
}

}  // namespace

void Table::add(Row row) {
    if (row.size() != columns.size())
        throw std::invalid_argument(name + ": row has " + std::to_string(row.size()) + " cells, expected " +
                                    std::to_string(columns.size()));
    for (std::size_t i = 0; i < row.size(); ++i)
        if (!matches(row[i], columns[i].type))
            throw std::invalid_argument(name + ": wrong type for column " + columns[i].name);
    rows.push_back(std::move(row));
}

std::size_t Table::column_index(std::string_view column) const {
    for (std::size_t i = 0; i < columns.size(); ++i)
        if (columns[i].name == column) return i;
    throw std::out_of_range(name + ": no column " + std::string(column));
}

double Table::real(std::size_t row, std::string_view column) const {
    return std::get<double>(rows.at(row).at(column_index(column)));
}

std::int64_t Table::integer(std::size_t row, std::string_view column) const {
    return std::get<std::int64_t>(rows.at(row).at(column_index(column)));
}

const std::string& Table::text(std::size_t row, std::string_view column) const {
    return std::get<std::string>(rows.at(row).at(column_index(column)));
}

std::string write_csv(const Table& table) {
    std::string out;
    for (std::size_t i = 0; i < table.columns.size(); ++i) {
        if (i) out += ',';
        append_text(out, table.columns[i].name);
    }
    out += '\n';
    for (const auto& row : table.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) out += ',';
            if (const auto* v = std::get_if<std::int64_t>(&row[i]))
                out += std::to_string(*v);
            else if (const auto* d = std::get_if<double>(&row[i]))
                out += format_double(*d);
            else
                append_text(out, std::get<std::string>(row[i]));
        }
        out += '\n';
    }
    return out;
}

Table parse_csv(std::string_view text, const std::vector<Column>& columns, std::string name) {
    Table table{std::move(name), columns, {}};
    std::size_t pos = 0;
    std::size_t line = 1;
    if (text.empty()) throw std::runtime_error("csv line 1: missing header");
    const auto header = split_record(text, pos, line);
    if (header.size() != columns.size()) throw std::runtime_error("csv line 1: header has wrong column count");
    for (std::size_t i = 0; i < header.size(); ++i)
        if (header[i] != columns[i].name)
            throw std::runtime_error("csv line 1: expected column '" + columns[i].name + "', got '" + header[i] + "'");
    while (pos < text.size()) {
        ++line;
        const auto fields = split_record(text, pos, line);
        if (fields.size() != columns.size())
            throw std::runtime_error("csv line " + std::to_string(line) + ": expected " +
                                     std::to_string(columns.size()) + " fields, got " +
                                     std::to_string(fields.size()));
        Row row;
        row.reserve(fields.size());
        for (std::size_t i = 0; i < fields.size(); ++i) row.push_back(parse_cell(fields[i], columns[i].type, line));
        table.rows.push_back(std::move(row));
    }
    return table;
}

}  // namespace salnet
