#include "mlconf/arff.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace mlconf {

namespace {

struct ParseError : std::runtime_error {
    ParseError(std::size_t line, const std::string& what)
        : std::runtime_error("ARFF line " + std::to_string(line) + ": " + what) {}
};

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string::npos) return "";
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

std::string unquote(const std::string& s) {
    if (s.size() >= 2 && ((s.front() == '\'' && s.back() == '\'') ||
                          (s.front() == '"' && s.back() == '"'))) {
        return s.substr(1, s.size() - 2);
    }
    return s;
}

/// Split on a delimiter while respecting single/double quotes.
std::vector<std::string> split_quoted(const std::string& s, char delim) {
    std::vector<std::string> out;
    std::string current;
    char quote = '\0';
    for (char c : s) {
        if (quote != '\0') {
            current += c;
            if (c == quote) quote = '\0';
        } else if (c == '\'' || c == '"') {
            current += c;
            quote = c;
        } else if (c == delim) {
            out.push_back(trim(current));
            current.clear();
        } else {
            current += c;
        }
    }
    out.push_back(trim(current));
    return out;
}

struct Attribute {
    std::string name;
    bool numeric = false;
    std::vector<std::string> nominal_values;  // empty when numeric
};

/// Extract "-C k" from a MEKA-style relation name, if present.
int meka_c_from_relation(const std::string& relation) {
    std::istringstream in(unquote(relation));
    std::string token;
    while (in >> token) {
        if (token == "-C" || token == "-c") {
            int k = 0;
            if (in >> k) return k;
        }
    }
    return 0;
}

bool is_missing(const std::string& v) { return v == "?"; }

double parse_number(const std::string& v, std::size_t line) {
    try {
        std::size_t used = 0;
        const double x = std::stod(v, &used);
        if (used != v.size()) throw std::invalid_argument(v);
        return x;
    } catch (const std::exception&) {
        throw ParseError(line, "expected a number, got '" + v + "'");
    }
}

}  // namespace

MLDataset parse_arff(const std::string& text, const LabelSpec& spec,
                     const std::string& dataset_name) {
    std::istringstream input(text);
    std::string raw_line;
    std::size_t line_no = 0;

    std::string relation;
    std::vector<Attribute> attributes;
    bool in_data = false;
    std::vector<std::vector<std::string>> raw_rows;  // per attribute, post-sparse expansion
    std::vector<std::size_t> row_lines;

    while (std::getline(input, raw_line)) {
        ++line_no;
        const std::string line = trim(raw_line);
        if (line.empty() || line[0] == '%') continue;

        if (!in_data) {
            const std::string low = lower(line);
            if (low.rfind("@relation", 0) == 0) {
                relation = trim(line.substr(9));
            } else if (low.rfind("@attribute", 0) == 0) {
                const std::string rest = trim(line.substr(10));
                Attribute attr;
                std::string type_part;
                if (!rest.empty() && (rest[0] == '\'' || rest[0] == '"')) {
                    const auto close = rest.find(rest[0], 1);
                    if (close == std::string::npos) throw ParseError(line_no, "unterminated quote");
                    attr.name = rest.substr(1, close - 1);
                    type_part = trim(rest.substr(close + 1));
                } else {
                    const auto space = rest.find_first_of(" \t");
                    if (space == std::string::npos) {
                        throw ParseError(line_no, "attribute without a type");
                    }
                    attr.name = rest.substr(0, space);
                    type_part = trim(rest.substr(space + 1));
                }
                const std::string type_low = lower(type_part);
                if (type_low == "numeric" || type_low == "real" || type_low == "integer") {
                    attr.numeric = true;
                } else if (!type_part.empty() && type_part.front() == '{' &&
                           type_part.back() == '}') {
                    for (const std::string& v :
                         split_quoted(type_part.substr(1, type_part.size() - 2), ',')) {
                        attr.nominal_values.push_back(unquote(v));
                    }
                    if (attr.nominal_values.empty()) {
                        throw ParseError(line_no, "empty nominal value set");
                    }
                } else {
                    throw ParseError(line_no, "unsupported attribute type '" + type_part + "'");
                }
                attributes.push_back(std::move(attr));
            } else if (low.rfind("@data", 0) == 0) {
                if (attributes.empty()) throw ParseError(line_no, "@data before any @attribute");
                in_data = true;
            } else {
                throw ParseError(line_no, "unrecognized header line");
            }
            continue;
        }

        // Data row, dense or sparse.
        std::vector<std::string> values(attributes.size(), "");
        if (!line.empty() && line.front() == '{') {
            if (line.back() != '}') throw ParseError(line_no, "unterminated sparse row");
            // sparse: unspecified attributes default to 0 / first nominal value
            for (std::size_t a = 0; a < attributes.size(); ++a) {
                values[a] = attributes[a].numeric ? "0" : attributes[a].nominal_values.front();
            }
            const std::string body = trim(line.substr(1, line.size() - 2));
            if (!body.empty()) {
                for (const std::string& item : split_quoted(body, ',')) {
                    const auto space = item.find_first_of(" \t");
                    if (space == std::string::npos) {
                        throw ParseError(line_no, "sparse entry '" + item + "' missing a value");
                    }
                    const long idx = std::lround(parse_number(item.substr(0, space), line_no));
                    if (idx < 0 || idx >= static_cast<long>(attributes.size())) {
                        throw ParseError(line_no, "sparse index out of range");
                    }
                    values[static_cast<std::size_t>(idx)] = unquote(trim(item.substr(space + 1)));
                }
            }
        } else {
            const std::vector<std::string> fields = split_quoted(line, ',');
            if (fields.size() != attributes.size()) {
                throw ParseError(line_no, "row has " + std::to_string(fields.size()) +
                                              " values, expected " +
                                              std::to_string(attributes.size()));
            }
            for (std::size_t a = 0; a < attributes.size(); ++a) values[a] = unquote(fields[a]);
        }
        raw_rows.push_back(std::move(values));
        row_lines.push_back(line_no);
    }

    if (!in_data) throw std::runtime_error("ARFF: no @data section");
    if (raw_rows.empty()) throw std::runtime_error("ARFF: no data rows");

    // Resolve which attributes are labels.
    std::vector<bool> is_label(attributes.size(), false);
    if (!spec.label_names.empty()) {
        for (const std::string& name : spec.label_names) {
            const auto it = std::find_if(attributes.begin(), attributes.end(),
                                         [&](const Attribute& a) { return a.name == name; });
            if (it == attributes.end()) {
                throw std::runtime_error("ARFF: label attribute '" + name + "' not found");
            }
            is_label[static_cast<std::size_t>(it - attributes.begin())] = true;
        }
    } else {
        int k = spec.meka_c != 0 ? spec.meka_c : meka_c_from_relation(relation);
        if (k == 0) {
            throw std::runtime_error(
                "ARFF: no label specification (-C missing from @relation and no label names)");
        }
        const int count = std::abs(k);
        if (count > static_cast<int>(attributes.size())) {
            throw std::runtime_error("ARFF: -C label count exceeds attribute count");
        }
        for (int i = 0; i < count; ++i) {
            const std::size_t idx =
                k > 0 ? static_cast<std::size_t>(i) : attributes.size() - 1 - static_cast<std::size_t>(i);
            is_label[idx] = true;
        }
    }
    const int L = static_cast<int>(std::count(is_label.begin(), is_label.end(), true));
    if (L < 1) throw std::runtime_error("ARFF: no label attributes");
    if (L > kMaxLabels) {
        throw std::runtime_error("ARFF: " + std::to_string(L) + " labels exceeds the cap of " +
                                 std::to_string(kMaxLabels));
    }

    // Validate label attributes are binary.
    for (std::size_t a = 0; a < attributes.size(); ++a) {
        if (!is_label[a]) continue;
        const Attribute& attr = attributes[a];
        if (!attr.numeric) {
            std::vector<std::string> sorted = attr.nominal_values;
            std::sort(sorted.begin(), sorted.end());
            if (sorted != std::vector<std::string>{"0", "1"}) {
                throw std::runtime_error("ARFF: label attribute '" + attr.name +
                                         "' is not binary {0,1}");
            }
        }
    }

    // Feature columns: numeric pass through, nominal one-hot in declaration order.
    std::vector<std::string> feature_names;
    std::vector<std::size_t> column_attr;   // source attribute per output column
    std::vector<int> column_nominal_index;  // -1 for numeric columns
    for (std::size_t a = 0; a < attributes.size(); ++a) {
        if (is_label[a]) continue;
        if (attributes[a].numeric) {
            feature_names.push_back(attributes[a].name);
            column_attr.push_back(a);
            column_nominal_index.push_back(-1);
        } else {
            for (std::size_t v = 0; v < attributes[a].nominal_values.size(); ++v) {
                feature_names.push_back(attributes[a].name + "=" + attributes[a].nominal_values[v]);
                column_attr.push_back(a);
                column_nominal_index.push_back(static_cast<int>(v));
            }
        }
    }

    MLDataset ds;
    ds.name = dataset_name.empty() ? unquote(relation) : dataset_name;
    const Eigen::Index N = static_cast<Eigen::Index>(raw_rows.size());
    const Eigen::Index M = static_cast<Eigen::Index>(feature_names.size());
    ds.features.resize(N, M);
    ds.feature_names = feature_names;
    std::size_t missing_imputed = 0;

    for (Eigen::Index i = 0; i < N; ++i) {
        const auto& row = raw_rows[static_cast<std::size_t>(i)];
        const std::size_t src_line = row_lines[static_cast<std::size_t>(i)];
        for (Eigen::Index c = 0; c < M; ++c) {
            const std::size_t a = column_attr[static_cast<std::size_t>(c)];
            const std::string& v = row[a];
            if (is_missing(v)) {
                ds.features(i, c) = std::numeric_limits<double>::quiet_NaN();
                continue;
            }
            if (column_nominal_index[static_cast<std::size_t>(c)] < 0) {
                ds.features(i, c) = parse_number(v, src_line);
            } else {
                const std::string& expect =
                    attributes[a].nominal_values[static_cast<std::size_t>(
                        column_nominal_index[static_cast<std::size_t>(c)])];
                ds.features(i, c) = v == expect ? 1.0 : 0.0;
            }
        }
        std::vector<int> bits;
        bits.reserve(static_cast<std::size_t>(L));
        for (std::size_t a = 0; a < attributes.size(); ++a) {
            if (!is_label[a]) continue;
            const std::string& v = row[a];
            if (is_missing(v)) throw ParseError(src_line, "missing value in label attribute");
            if (v == "0") {
                bits.push_back(0);
            } else if (v == "1") {
                bits.push_back(1);
            } else {
                throw ParseError(src_line, "non-binary label value '" + v + "'");
            }
        }
        ds.labelsets.emplace_back(bits);
    }

    // Mean-impute missing numeric feature values.
    for (Eigen::Index c = 0; c < M; ++c) {
        double sum = 0.0;
        Eigen::Index count = 0;
        for (Eigen::Index i = 0; i < N; ++i) {
            if (!std::isnan(ds.features(i, c))) {
                sum += ds.features(i, c);
                ++count;
            }
        }
        const double mean = count > 0 ? sum / static_cast<double>(count) : 0.0;
        for (Eigen::Index i = 0; i < N; ++i) {
            if (std::isnan(ds.features(i, c))) {
                ds.features(i, c) = mean;
                ++missing_imputed;
            }
        }
    }
    if (missing_imputed > 0) {
        std::cerr << "arff: mean-imputed " << missing_imputed << " missing feature value(s) in "
                  << ds.name << "\n";
    }

    for (std::size_t a = 0; a < attributes.size(); ++a) {
        if (is_label[a]) ds.label_names.push_back(attributes[a].name);
    }
    ds.validate();
    return ds;
}

MLDataset load_arff(const std::string& path, const LabelSpec& spec) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open ARFF file: " + path);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    const auto slash = path.find_last_of('/');
    std::string base = slash == std::string::npos ? path : path.substr(slash + 1);
    if (base.size() > 5 && base.substr(base.size() - 5) == ".arff") {
        base = base.substr(0, base.size() - 5);
    }
    return parse_arff(buffer.str(), spec, base);
}

}  // namespace mlconf
