#pragma once

#include <optional>
#include <string>
#include <vector>

#include "deduce/matrix.hpp"

namespace deduce {

// All artifact writers go through this: content lands in a temp file that is
// renamed into place, so a failed run never leaves a truncated artifact.
void write_text_atomic(const std::string& path, const std::string& content);

std::string format_double(double v);  // shortest round-trip decimal

struct NamedMatrix {
    std::vector<std::string> ids;      // first column
    std::vector<std::string> columns;  // header minus the id column
    Matrix values;
};

// Strict numeric CSV (no missing cells), id column first.
NamedMatrix read_matrix_csv(const std::string& path);

// Two-column (sample_id, label) file.
std::vector<std::pair<std::string, int>> read_label_pairs(const std::string& path);

// Three-column (sample_id, k, label) file, as written by the cluster stage.
struct LabelsByK {
    std::vector<std::string> sample_ids;
    std::vector<std::pair<std::size_t, std::vector<int>>> per_k;
};
LabelsByK read_labels_by_k(const std::string& path);

}  // namespace deduce
