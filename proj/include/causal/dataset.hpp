#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace causal {

// One column of a dataset. Discrete columns store 0-based category indices
// and carry their cardinality; continuous columns store doubles and have
// cardinality 0.
struct Column {
    std::string name;
    int cardinality = 0;  // 0 means continuous
    std::vector<std::int32_t> ints;
    std::vector<double> reals;

    bool discrete() const { return cardinality > 0; }
    bool operator==(const Column&) const = default;
};

// Sample table, immutable by convention once built. Columns are homogeneous
// and there are no missing values.
struct Dataset {
    std::vector<Column> columns;
    std::int64_t n = 0;

    int n_columns() const { return static_cast<int>(columns.size()); }
    int index_of(const std::string& name) const;  // throws UnknownNode
    std::vector<std::string> names() const;
    bool all_discrete() const;
    bool all_continuous() const;
    void validate() const;  // throws Validation on broken invariants
    bool operator==(const Dataset&) const = default;
};

// Text form: line 1 = tab-separated column names, line 2 = tab-separated
// kinds (`d<cardinality>` or `c`), then one tab-separated row per sample.
// Doubles are written shortest-round-trip so write then read is the identity.
std::string write_dataset_text(const Dataset& ds);
Dataset read_dataset_text(const std::string& text);

void write_dataset_file(const Dataset& ds, const std::string& path);
Dataset read_dataset_file(const std::string& path);

// Whole-file helpers shared by the parsers and the CLI.
std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

} // namespace causal
