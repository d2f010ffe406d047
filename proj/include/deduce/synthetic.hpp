#pragma once

#include <cstdint>
#include <vector>

#include "deduce/data_io.hpp"

namespace deduce {

enum class SizeMode { Equal, Heterogeneous };

struct SyntheticSpec {
    std::size_t n_samples = 100;
    std::size_t n_clusters = 5;
    SizeMode size_mode = SizeMode::Equal;
    std::vector<std::size_t> block_dims = {131, 100, 160};
    double separation = 2.0;   // distance scale between cluster means
    double noise_std = 1.0;
    std::uint64_t seed = 0;
    void validate() const;
};

struct LabeledDataset {
    std::vector<OmicsBlock> blocks;
    std::vector<int> labels;  // in [0, n_clusters)
};

// Gaussian mixture with the cluster assignment shared across blocks: per
// block, K centers ~ N(0, separation^2 I); sample = center + N(0, noise_std^2 I).
// Heterogeneous sizes come from a flat Dirichlet over clusters, resampled
// until every cluster keeps at least one sample.
LabeledDataset generate(const SyntheticSpec& spec);

}  // namespace deduce
