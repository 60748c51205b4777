#include "riskscore/csv.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace riskscore {

namespace {

bool is_missing(const std::string& cell) {
    return cell.empty() || cell == "NA" || cell == "na" || cell == "?";
}

double parse_number(const std::string& cell, const std::string& column, std::size_t row) {
    std::size_t consumed = 0;
    double value = 0.0;
    try {
        value = std::stod(cell, &consumed);
    } catch (const std::exception&) {
        consumed = 0;
    }
    if (consumed != cell.size()) {
        std::ostringstream msg;
        msg << "non-numeric cell '" << cell << "' in column '" << column << "' at data row "
            << row;
        throw DataError(msg.str());
    }
    return value;
}

std::vector<std::string> split_record(const std::string& line, const std::string& origin,
                                      std::size_t line_no) {
    std::vector<std::string> fields;
    std::string field;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    field.push_back('"');
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                field.push_back(c);
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            fields.push_back(std::move(field));
            field.clear();
        } else {
            field.push_back(c);
        }
    }
    if (quoted) {
        std::ostringstream msg;
        msg << origin << ":" << line_no << ": unterminated quoted field";
        throw DataError(msg.str());
    }
    fields.push_back(std::move(field));
    return fields;
}

}  // namespace

std::size_t CsvTable::column_index(const std::string& name) const {
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) {
        throw ConfigError("unknown column '" + name + "'");
    }
    return static_cast<std::size_t>(it - header.begin());
}

CsvTable read_csv(std::istream& in, const std::string& origin) {
    CsvTable table;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() && table.header.empty()) continue;
        auto fields = split_record(line, origin, line_no);
        if (table.header.empty()) {
            table.header = std::move(fields);
        } else {
            if (fields.size() != table.header.size()) {
                std::ostringstream msg;
                msg << origin << ":" << line_no << ": expected " << table.header.size()
                    << " fields, found " << fields.size();
                throw DataError(msg.str());
            }
            table.rows.push_back(std::move(fields));
        }
    }
    if (table.header.empty()) throw DataError(origin + ": missing header row");
    return table;
}

CsvTable read_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open: " + path);
    return read_csv(in, path);
}

std::string csv_escape(const std::string& field) {
    if (field.find_first_of(",\"\n") == std::string::npos) return field;
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out += "\"\"";
        else out.push_back(c);
    }
    out += "\"";
    return out;
}

const FeatureRule* BinarizationSpec::rule_for(const std::string& column) const {
    const auto it = rules.find(column);
    return it == rules.end() ? nullptr : &it->second;
}

BinarizationSpec parse_binarization_spec(const std::string& json_text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(json_text);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("binarization spec parse failure: ") + e.what());
    }
    if (!doc.is_object()) throw ConfigError("binarization spec must be a JSON object");
    BinarizationSpec spec;
    for (const auto& [column, entry] : doc.items()) {
        FeatureRule rule;
        const std::string kind = entry.at("rule").get<std::string>();
        if (kind == "pass_through") {
            rule.kind = RuleKind::PassThrough;
        } else if (kind == "one_hot") {
            rule.kind = RuleKind::OneHot;
            rule.categories = entry.at("categories").get<std::vector<std::string>>();
        } else if (kind == "ordinal") {
            rule.kind = RuleKind::Ordinal;
            rule.categories = entry.at("categories").get<std::vector<std::string>>();
        } else if (kind == "cuts") {
            rule.kind = RuleKind::Cuts;
            rule.cuts = entry.at("cuts").get<std::vector<double>>();
            for (std::size_t i = 1; i < rule.cuts.size(); ++i) {
                if (!(rule.cuts[i - 1] < rule.cuts[i])) {
                    throw ConfigError("cut points for '" + column +
                                      "' must be strictly increasing");
                }
            }
            if (rule.cuts.empty()) {
                throw ConfigError("cut rule for '" + column + "' needs at least one cut point");
            }
        } else {
            throw ConfigError("unknown rule kind '" + kind + "' for column '" + column + "'");
        }
        if ((rule.kind == RuleKind::OneHot || rule.kind == RuleKind::Ordinal) &&
            rule.categories.empty()) {
            throw ConfigError("rule for '" + column + "' lists no categories");
        }
        spec.rules[column] = std::move(rule);
    }
    return spec;
}

BinarizationSpec load_binarization_spec(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open binarization spec: " + path);
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return parse_binarization_spec(text);
}

IngestResult ingest_table(const CsvTable& table, const std::string& label_col,
                          const BinarizationSpec& spec) {
    const std::size_t label_idx = table.column_index(label_col);
    for (const auto& [column, rule] : spec.rules) {
        table.column_index(column);  // unknown rule columns are config errors
    }

    // Output schema: encoded column names in header order.
    std::vector<std::string> out_names;
    struct ColumnPlan {
        std::size_t index;
        const FeatureRule* rule;  // null = pass-through
    };
    std::vector<ColumnPlan> plan;
    for (std::size_t c = 0; c < table.header.size(); ++c) {
        if (c == label_idx) continue;
        const FeatureRule* rule = spec.rule_for(table.header[c]);
        plan.push_back({c, rule});
        if (rule != nullptr && rule->kind == RuleKind::OneHot) {
            for (const auto& cat : rule->categories) {
                out_names.push_back(table.header[c] + "=" + cat);
            }
        } else {
            out_names.push_back(table.header[c]);
        }
    }
    if (out_names.empty()) throw ConfigError("no feature columns besides the label");

    std::vector<double> features;
    std::vector<int> labels;
    long long dropped = 0;

    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        const auto& row = table.rows[r];
        if (is_missing(row[label_idx])) {
            ++dropped;
            continue;
        }
        bool missing = false;
        for (const auto& col : plan) {
            if (is_missing(row[col.index])) {
                missing = true;
                break;
            }
        }
        if (missing) {
            ++dropped;
            continue;
        }

        const double label_value = parse_number(row[label_idx], label_col, r);
        if (label_value != 0.0 && label_value != 1.0) {
            std::ostringstream msg;
            msg << "non-binary label at row " << r;
            throw DataError(msg.str());
        }

        for (const auto& col : plan) {
            const std::string& cell = row[col.index];
            const std::string& column = table.header[col.index];
            if (col.rule == nullptr || col.rule->kind == RuleKind::PassThrough) {
                features.push_back(parse_number(cell, column, r));
            } else if (col.rule->kind == RuleKind::Cuts) {
                const double v = parse_number(cell, column, r);
                double level = 0;
                for (double cut : col.rule->cuts) {
                    if (v > cut) ++level;
                }
                features.push_back(level);
            } else {
                const auto it = std::find(col.rule->categories.begin(),
                                          col.rule->categories.end(), cell);
                if (it == col.rule->categories.end()) {
                    std::ostringstream msg;
                    msg << "unlisted category '" << cell << "' in column '" << column
                        << "' at data row " << r;
                    throw DataError(msg.str());
                }
                const auto level =
                    static_cast<double>(it - col.rule->categories.begin());
                if (col.rule->kind == RuleKind::Ordinal) {
                    features.push_back(level);
                } else {  // one-hot
                    for (std::size_t c = 0; c < col.rule->categories.size(); ++c) {
                        features.push_back(c == static_cast<std::size_t>(level) ? 1.0 : 0.0);
                    }
                }
            }
        }
        labels.push_back(static_cast<int>(label_value));
    }

    IngestResult out{validate_dataset(std::move(features), out_names.size(), std::move(labels),
                                      std::move(out_names)),
                     dropped};
    return out;
}

IngestResult ingest_csv(const std::string& path, const std::string& label_col,
                        const BinarizationSpec& spec) {
    return ingest_table(read_csv(path), label_col, spec);
}

PredictionsFile read_predictions(const std::string& path, const std::string& pred_col,
                                 const std::string& label_col) {
    const CsvTable table = read_csv(path);
    const std::size_t pred_idx = table.column_index(pred_col);
    const std::size_t label_idx = table.column_index(label_col);
    PredictionsFile out;
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        const auto& row = table.rows[r];
        const double label_value = parse_number(row[label_idx], label_col, r);
        if (label_value != 0.0 && label_value != 1.0) {
            std::ostringstream msg;
            msg << "non-binary label at row " << r;
            throw DataError(msg.str());
        }
        out.labels.push_back(static_cast<int>(label_value));
        out.predictions.push_back(parse_number(row[pred_idx], pred_col, r));
    }
    return out;
}

}  // namespace riskscore
