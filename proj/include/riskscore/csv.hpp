#pragma once

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "riskscore/types.hpp"

namespace riskscore {

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    std::size_t column_index(const std::string& name) const;  // throws ConfigError
};

// RFC-4180-ish reader: quoted fields, doubled quotes, CRLF line ends.
CsvTable read_csv(const std::string& path);
CsvTable read_csv(std::istream& in, const std::string& origin);

std::string csv_escape(const std::string& field);

enum class RuleKind { PassThrough, OneHot, Ordinal, Cuts };

struct FeatureRule {
    RuleKind kind = RuleKind::PassThrough;
    std::vector<std::string> categories;  // one-hot / ordinal
    std::vector<double> cuts;             // strictly increasing cut points
};

/// Per-column encoding rules; columns without an explicit rule pass
/// through as numeric values.
struct BinarizationSpec {
    std::map<std::string, FeatureRule> rules;

    const FeatureRule* rule_for(const std::string& column) const;
};

// Parses the JSON rule file:
//   {"column": {"rule": "ordinal"|"one_hot", "categories": [...]},
//    "column2": {"rule": "cuts", "cuts": [5, 10]},
//    "column3": {"rule": "pass_through"}}
BinarizationSpec parse_binarization_spec(const std::string& json_text);
BinarizationSpec load_binarization_spec(const std::string& path);

struct IngestResult {
    BinaryDataset dataset;
    long long dropped_rows = 0;  // rows with missing values in used columns
};

// Applies the spec to every non-label column; rows with a missing value
// (empty cell, "NA", or "?") in any used column are dropped and counted.
IngestResult ingest_csv(const std::string& path, const std::string& label_col,
                        const BinarizationSpec& spec);
IngestResult ingest_table(const CsvTable& table, const std::string& label_col,
                          const BinarizationSpec& spec);

// Column of predictions in [0,1] plus the matching labels.
struct PredictionsFile {
    std::vector<double> predictions;
    std::vector<int> labels;
};
PredictionsFile read_predictions(const std::string& path, const std::string& pred_col,
                                 const std::string& label_col);

}  // namespace riskscore
