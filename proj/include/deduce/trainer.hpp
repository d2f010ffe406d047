#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "deduce/data_io.hpp"
#include "deduce/losses.hpp"
#include "deduce/smae.hpp"

namespace deduce {

struct TrainConfig {
    std::size_t batch_size = 256;
    std::size_t epochs = 200;
    double lr = 3e-3;
    double weight_decay = 0.0;
    AugmentConfig augment;
    LossConfig loss;
    std::size_t early_stop_window = 10;
    double early_stop_delta = 1e-4;
    std::uint64_t seed = 0;
    void validate() const;
};

struct EpochStats {
    double instance = 0.0;
    double cluster = 0.0;
    double entropy = 0.0;
    double total = 0.0;
};

struct TrainReport {
    std::vector<EpochStats> history;  // length == stopped_epoch
    std::size_t stopped_epoch = 0;
    bool early_stopped = false;
    double wall_seconds = 0.0;
    std::string checkpoint_path;  // filled by callers that persist the model
};

// Shuffled minibatches, two augmented views per batch through the shared
// encoder, joint loss, Adam. Stops early once both loss components plateau
// (relative change under early_stop_delta against the window mean) for
// early_stop_window consecutive epochs. Deterministic for a fixed seed.
TrainReport train(Smae& model, const FusedDataset& data, const TrainConfig& cfg,
                  std::ostream* progress = nullptr);

}  // namespace deduce
