#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "deduce/matrix.hpp"

namespace deduce {

// Hubert-Levin C-index over within-cluster pairwise distances, in [0, 1],
// 0 best. Returns 0 when every pairwise distance is equal.
double c_index(const Matrix& x, const std::vector<int>& labels);

// Mean silhouette width in [-1, 1]; singleton clusters score 0 by convention.
double silhouette(const Matrix& x, const std::vector<int>& labels);

// Davies-Bouldin index, >= 0, smaller is better. Coincident centroids give
// +infinity, reported as such.
double davies_bouldin(const Matrix& x, const std::vector<int>& labels);

// Adjusted Rand index between two labelings of the same points.
double adjusted_rand(const std::vector<int>& labels_a, const std::vector<int>& labels_b);

struct MetricsRow {
    std::size_t k = 0;
    double c_index = 0.0;
    double silhouette = 0.0;
    double davies_bouldin = 0.0;
    std::optional<double> ari;  // absent without ground truth, never zero-filled
};

struct MetricsReport {
    std::vector<MetricsRow> rows;
};

}  // namespace deduce
