#pragma once

#include <cstdint>
#include <vector>

#include "deduce/matrix.hpp"

namespace deduce {

enum class KmeansInit { KmeansPlusPlus, RandomPoints };

struct KmeansConfig {
    std::size_t k = 2;
    std::size_t restarts = 100;
    std::size_t max_iters = 300;
    double tol = 1e-6;  // relative inertia change
    std::uint64_t seed = 0;
    KmeansInit init = KmeansInit::KmeansPlusPlus;
    void validate(std::size_t n_samples) const;
};

struct ClusterResult {
    std::vector<int> labels;
    Matrix centroids;
    double inertia = 0.0;
    std::size_t restart_index = 0;
    std::vector<double> inertia_trace;     // winning restart, one value per Lloyd iteration
    std::vector<double> restart_inertias;  // final inertia of every restart
};

// Lloyd iterations from k-means++ (default) or random-point seeding; emptied
// clusters are reseeded with the point farthest from their centroid; the best
// restart by (inertia, restart index) wins. Deterministic under cfg.seed.
ClusterResult kmeans(const Matrix& x, const KmeansConfig& cfg);

// kmeans for every k in [k_min, k_max], each with a seed derived from cfg.
std::vector<ClusterResult> sweep_k(const Matrix& x, std::size_t k_min, std::size_t k_max,
                                   const KmeansConfig& cfg);

}  // namespace deduce
