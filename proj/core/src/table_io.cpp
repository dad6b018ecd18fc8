#include "mlconf/table_io.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace mlconf {

void Table::add_row(std::vector<Cell> row) {
    if (row.size() != columns.size()) {
        throw std::invalid_argument("table row has " + std::to_string(row.size()) +
                                    " cells, expected " + std::to_string(columns.size()));
    }
    rows.push_back(std::move(row));
}

TableFormat table_format_from_name(const std::string& name) {
    if (name == "csv") return TableFormat::Csv;
    if (name == "json") return TableFormat::Json;
    throw std::invalid_argument("unknown table format '" + name + "'");
}

namespace {

std::string csv_escape(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

std::string render_csv(const Table& table) {
    std::ostringstream os;
    for (std::size_t c = 0; c < table.columns.size(); ++c) {
        if (c > 0) os << ',';
        os << csv_escape(table.columns[c]);
    }
    os << '\n';
    char buf[64];
    for (const auto& row : table.rows) {
        for (std::size_t c = 0; c < row.size(); ++c) {
            if (c > 0) os << ',';
            std::visit(
                [&](const auto& v) {
                    using T = std::decay_t<decltype(v)>;
                    if constexpr (std::is_same_v<T, std::string>) {
                        os << csv_escape(v);
                    } else if constexpr (std::is_same_v<T, double>) {
                        std::snprintf(buf, sizeof buf, "%.6f", v);
                        os << buf;
                    } else {
                        os << v;
                    }
                },
                row[c]);
        }
        os << '\n';
    }
    return os.str();
}

std::string render_json(const Table& table) {
    nlohmann::json records = nlohmann::json::array();
    for (const auto& row : table.rows) {
        nlohmann::json rec;
        for (std::size_t c = 0; c < row.size(); ++c) {
            std::visit([&](const auto& v) { rec[table.columns[c]] = v; }, row[c]);
        }
        records.push_back(std::move(rec));
    }
    nlohmann::json j;
    j["columns"] = table.columns;
    j["rows"] = std::move(records);
    return j.dump(2);
}

}  // namespace

std::string render_table(const Table& table, TableFormat format) {
    return format == TableFormat::Csv ? render_csv(table) : render_json(table);
}

void export_table(const Table& table, TableFormat format, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open output file: " + path);
    out << render_table(table, format);
    if (!out) throw std::runtime_error("write failure: " + path);
}

Table table_from_json(const std::string& text) {
    const auto j = nlohmann::json::parse(text);
    Table t;
    t.columns = j.at("columns").get<std::vector<std::string>>();
    for (const auto& rec : j.at("rows")) {
        std::vector<Cell> row;
        for (const std::string& col : t.columns) {
            const auto& v = rec.at(col);
            if (v.is_string()) {
                row.emplace_back(v.get<std::string>());
            } else if (v.is_number_integer()) {
                row.emplace_back(v.get<std::int64_t>());
            } else {
                row.emplace_back(v.get<double>());
            }
        }
        t.rows.push_back(std::move(row));
    }
    return t;
}

}  // namespace mlconf
