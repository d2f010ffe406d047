#include "deduce/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <string>

#include "deduce/errors.hpp"

namespace deduce {

namespace {

double euclidean(const double* a, const double* b, std::size_t d) {
    double s = 0.0;
    for (std::size_t j = 0; j < d; ++j) {
        const double diff = a[j] - b[j];
        s += diff * diff;
    }
    return std::sqrt(s);
}

// contiguous cluster ids plus membership lists; throws on bad labelings
std::vector<std::vector<std::size_t>> group_by_label(const Matrix& x,
                                                     const std::vector<int>& labels,
                                                     std::size_t min_clusters) {
    if (labels.size() != x.rows()) throw Error("metrics: labels length does not match points");
    std::map<int, std::vector<std::size_t>> groups;
    for (std::size_t i = 0; i < labels.size(); ++i) groups[labels[i]].push_back(i);
    if (groups.size() < min_clusters)
        throw Error("metrics: need at least " + std::to_string(min_clusters) + " clusters");
    std::vector<std::vector<std::size_t>> out;
    out.reserve(groups.size());
    for (auto& [label, members] : groups) out.push_back(std::move(members));
    return out;
}

}  // namespace

double c_index(const Matrix& x, const std::vector<int>& labels) {
    auto clusters = group_by_label(x, labels, 2);
    const std::size_t n = x.rows();
    if (n < 3) throw Error("c_index: need at least 3 points");
    const std::size_t d = x.cols();

    std::vector<double> all;
    all.reserve(n * (n - 1) / 2);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) all.push_back(euclidean(x.row(i), x.row(j), d));

    double within_sum = 0.0;
    std::size_t within_count = 0;
    for (const auto& members : clusters) {
        for (std::size_t a = 0; a < members.size(); ++a) {
            for (std::size_t b = a + 1; b < members.size(); ++b) {
                within_sum += euclidean(x.row(members[a]), x.row(members[b]), d);
                ++within_count;
            }
        }
    }
    if (within_count == 0) return 0.0;

    std::sort(all.begin(), all.end());
    double s_min = 0.0, s_max = 0.0;
    for (std::size_t i = 0; i < within_count; ++i) {
        s_min += all[i];
        s_max += all[all.size() - 1 - i];
    }
    const double denom = s_max - s_min;
    if (denom == 0.0) return 0.0;
    return (within_sum - s_min) / denom;
}

double silhouette(const Matrix& x, const std::vector<int>& labels) {
    auto clusters = group_by_label(x, labels, 2);
    const std::size_t n = x.rows();
    const std::size_t d = x.cols();

    std::vector<std::size_t> cluster_of(n, 0);
    for (std::size_t c = 0; c < clusters.size(); ++c)
        for (std::size_t i : clusters[c]) cluster_of[i] = c;

    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t own = cluster_of[i];
        if (clusters[own].size() == 1) continue;  // s(i) = 0 for singletons

        double a = 0.0;
        for (std::size_t j : clusters[own]) {
            if (j != i) a += euclidean(x.row(i), x.row(j), d);
        }
        a /= static_cast<double>(clusters[own].size() - 1);

        double b = std::numeric_limits<double>::infinity();
        for (std::size_t c = 0; c < clusters.size(); ++c) {
            if (c == own) continue;
            double mean = 0.0;
            for (std::size_t j : clusters[c]) mean += euclidean(x.row(i), x.row(j), d);
            mean /= static_cast<double>(clusters[c].size());
            b = std::min(b, mean);
        }
        const double denom = std::max(a, b);
        if (denom > 0.0) total += (b - a) / denom;
    }
    return total / static_cast<double>(n);
}

double davies_bouldin(const Matrix& x, const std::vector<int>& labels) {
    auto clusters = group_by_label(x, labels, 2);
    const std::size_t d = x.cols();
    const std::size_t k = clusters.size();

    Matrix centroids(k, d);
    std::vector<double> scatter(k, 0.0);
    for (std::size_t c = 0; c < k; ++c) {
        double* row = centroids.row(c);
        for (std::size_t i : clusters[c]) {
            const double* xi = x.row(i);
            for (std::size_t j = 0; j < d; ++j) row[j] += xi[j];
        }
        const double inv = 1.0 / static_cast<double>(clusters[c].size());
        for (std::size_t j = 0; j < d; ++j) row[j] *= inv;
        for (std::size_t i : clusters[c]) scatter[c] += euclidean(x.row(i), row, d);
        scatter[c] *= inv;
    }

    double total = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
        double worst = 0.0;
        for (std::size_t j = 0; j < k; ++j) {
            if (j == i) continue;
            const double m = euclidean(centroids.row(i), centroids.row(j), d);
            if (m == 0.0) return std::numeric_limits<double>::infinity();
            worst = std::max(worst, (scatter[i] + scatter[j]) / m);
        }
        total += worst;
    }
    return total / static_cast<double>(k);
}

double adjusted_rand(const std::vector<int>& labels_a, const std::vector<int>& labels_b) {
    if (labels_a.size() != labels_b.size()) throw Error("adjusted_rand: length mismatch");
    if (labels_a.size() < 2) throw Error("adjusted_rand: need at least 2 points");
    const double n = static_cast<double>(labels_a.size());

    std::map<std::pair<int, int>, double> cells;
    std::map<int, double> row_sums, col_sums;
    for (std::size_t i = 0; i < labels_a.size(); ++i) {
        cells[{labels_a[i], labels_b[i]}] += 1.0;
        row_sums[labels_a[i]] += 1.0;
        col_sums[labels_b[i]] += 1.0;
    }
    auto comb2 = [](double m) { return m * (m - 1.0) / 2.0; };

    double sum_cells = 0.0, sum_rows = 0.0, sum_cols = 0.0;
    for (const auto& [key, count] : cells) sum_cells += comb2(count);
    for (const auto& [key, count] : row_sums) sum_rows += comb2(count);
    for (const auto& [key, count] : col_sums) sum_cols += comb2(count);

    const double expected = sum_rows * sum_cols / comb2(n);
    const double max_index = (sum_rows + sum_cols) / 2.0;
    const double denom = max_index - expected;
    if (denom == 0.0) return 1.0;  // both partitions trivial in the same way
    return (sum_cells - expected) / denom;
}

}  // namespace deduce
