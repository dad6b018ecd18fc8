#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

namespace mlconf {

using Cell = std::variant<std::string, double, std::int64_t>;

/// A rectangular result table with a fixed column order.
struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;

    void add_row(std::vector<Cell> row);  // checks arity
};

enum class TableFormat { Csv, Json };

TableFormat table_format_from_name(const std::string& name);

/// CSV renders floats at 6 decimals; JSON keeps full precision.
std::string render_table(const Table& table, TableFormat format);
void export_table(const Table& table, TableFormat format, const std::string& path);
Table table_from_json(const std::string& text);

}  // namespace mlconf
