#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "deduce/matrix.hpp"

namespace deduce {

// One omics modality: a samples x features matrix plus identifiers.
struct OmicsBlock {
    std::string name;
    std::vector<std::string> sample_ids;
    std::vector<std::string> feature_names;
    Matrix values;
};

enum class Orientation { SamplesRows, FeaturesRows };

// Sample-aligned concatenation of blocks.
struct FusedDataset {
    struct BlockSpan {
        std::string name;
        std::size_t start = 0;
        std::size_t width = 0;
    };
    std::vector<std::string> sample_ids;
    Matrix values;
    std::vector<BlockSpan> block_offsets;

    std::vector<std::size_t> block_dims() const {
        std::vector<std::size_t> dims;
        dims.reserve(block_offsets.size());
        for (const auto& b : block_offsets) dims.push_back(b.width);
        return dims;
    }
};

struct AugmentConfig {
    double noise_std = 0.1;
    double mask_rate = 0.1;
    std::uint64_t seed = 0;
    void validate() const;
};

// Delimited text, header row, first column = sample id. Empty cells are
// missing and imputed to the column mean. Comma or tab is auto-detected from
// the header line. FeaturesRows flips the table (features as rows, samples as
// header columns) before the same checks run.
OmicsBlock load_block(const std::string& path, const std::string& name,
                      Orientation orientation = Orientation::SamplesRows);

void save_block(const OmicsBlock& block, const std::string& path);

// Column-wise z-score with population sigma; constant columns map to zero.
OmicsBlock standardize(const OmicsBlock& block);

// Inner join on sample ids ordered by the first block; columns concatenated
// block by block.
FusedDataset fuse(const std::vector<OmicsBlock>& blocks);

// Two stochastic views of a batch: additive Gaussian noise then per-entry
// zero-masking, each view on its own stream derived from cfg.seed. Row i of
// view one and row i of view two form the positive pair.
std::pair<Matrix, Matrix> make_views(const Matrix& batch, const AugmentConfig& cfg);

}  // namespace deduce
