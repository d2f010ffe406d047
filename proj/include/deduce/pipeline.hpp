#pragma once

#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "deduce/clustering.hpp"
#include "deduce/data_io.hpp"
#include "deduce/metrics.hpp"
#include "deduce/smae.hpp"
#include "deduce/synthetic.hpp"
#include "deduce/trainer.hpp"

namespace deduce {

// Fully resolved run description. Everything a run needs, including every
// derived seed, lives here; the manifest is its JSON image, so a manifest
// replays a run exactly.
struct PipelineConfig {
    struct BlockInput {
        std::string path;
        std::string name;
    };

    // exactly one data source
    std::vector<BlockInput> inputs;
    Orientation orientation = Orientation::SamplesRows;
    std::optional<std::string> truth_labels_path;
    std::optional<SyntheticSpec> synthetic;

    SmaeConfig smae;
    bool embed_dim_given = false;   // else 10 for loaded data, K for synthetic
    bool n_clusters_given = false;  // else K for synthetic, k_range top for loaded data
    std::uint64_t init_seed = 0;

    TrainConfig train;
    KmeansConfig kmeans;
    std::size_t k_min = 2, k_max = 6;

    std::string out_dir = "out";
    std::uint64_t master_seed = 0;

    void validate() const;
};

// Parses the JSON config, deriving any absent stage seed from the master
// seed. Unknown keys are rejected; a "meta" section is ignored so manifests
// load as configs.
PipelineConfig parse_pipeline_config(const nlohmann::json& j);
nlohmann::json pipeline_config_json(const PipelineConfig& cfg);

// `train.lr=0.003` style dotted-path override on the raw JSON.
void apply_override(nlohmann::json& j, const std::string& assignment);

struct PipelineResult {
    std::vector<std::string> sample_ids;
    Matrix embeddings;
    std::vector<ClusterResult> sweep;
    MetricsReport metrics;
    TrainReport train_report;
    std::optional<std::vector<int>> truth;
    std::map<std::string, std::string> artifacts;  // logical name -> path
};

// The full chain: data -> standardize -> fuse -> train -> embed -> k-sweep ->
// metrics, with every artifact written under cfg.out_dir.
PipelineResult run_pipeline(PipelineConfig cfg, std::ostream* progress = nullptr);

struct AblateResult {
    PipelineResult dcl;
    PipelineResult infonce;
    std::string table_csv;
    std::string table_json;
};

// Same run twice, decoupled vs. standard InfoNCE instance loss, plus a
// side-by-side metrics table.
AblateResult run_ablate(const PipelineConfig& cfg, std::ostream* progress = nullptr);

// Stage entry points shared by the CLI subcommands.
struct LoadedData {
    FusedDataset fused;              // standardized and fused
    std::optional<std::vector<int>> truth;
};
LoadedData load_pipeline_data(const PipelineConfig& cfg);

void write_simulated(const SyntheticSpec& spec, const std::string& out_dir,
                     std::map<std::string, std::string>* artifacts = nullptr);

MetricsReport evaluate_sweep(const Matrix& embeddings, const std::vector<ClusterResult>& sweep,
                             const std::optional<std::vector<int>>& truth);

std::string metrics_csv(const MetricsReport& report);
nlohmann::json metrics_json(const MetricsReport& report);
std::string embeddings_csv(const std::vector<std::string>& ids, const Matrix& embeddings);
std::string labels_csv(const std::vector<std::string>& ids, const std::vector<ClusterResult>& sweep,
                       const std::vector<std::size_t>& ks);
std::string loss_curve_csv(const TrainReport& report);

}  // namespace deduce
