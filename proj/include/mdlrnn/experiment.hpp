#pragma once

#include "mdlrnn/evaluation.hpp"
#include "mdlrnn/gdtrain.hpp"
#include "mdlrnn/search.hpp"
#include "mdlrnn/tasks.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace mdlrnn {

enum class Regime { ga_architecture, ga_weights_only, gradient_descent };

const char* regime_name(Regime regime);
Regime regime_from_name(const std::string& name);

// Everything that determines a run. Defaults are the desk-scale preset;
// paper_preset() switches the GA block to the published cluster scale.
struct ExperimentConfig {
    std::string task = "anbn";
    Regime regime = Regime::ga_architecture;
    RegularizerSpec reg{RegKind::mdl, 1.0, std::nullopt};
    double h_limit_factor = 3.0;  // h_limit = factor * golden |H|

    // GA block.
    int islands = 4;
    int population = 50;
    int generations = 2000;
    int tournament_size = 2;
    double elite_ratio = 0.001;
    double mutation_prob = 1.0;
    double crossover_prob = 0.0;
    double migration_ratio = 0.01;
    int migration_interval = 1000;
    std::size_t max_units = 1024;
    int golden_copies = 1;

    // GD block.
    double learning_rate = 1e-4;
    int epochs = 1000;

    int train_size = 500;
    std::uint64_t corpus_seed = 100;
    std::uint64_t experiment_seed = 100;
    int test_extra_n = 1000;  // parametric test range beyond n_max_train

    std::string output_dir = "out";
    std::string data_dir;  // golden networks; defaults to the repo data dir
    bool gibbs_audit = false;
    int checkpoint_interval = 0;
    int threads = 0;
    double golden_verify_tol = 1e-6;

    void validate() const;
    std::string to_text() const;

    static ExperimentConfig desk_preset(const std::string& task);
    static ExperimentConfig paper_preset(const std::string& task);
};

ExperimentConfig parse_config_text(const std::string& text);
ExperimentConfig load_config_file(const std::string& path);
// One "key = value" assignment, e.g. from a command-line override.
void apply_config_override(ExperimentConfig& config, const std::string& assignment);

std::string default_data_dir();
std::string golden_path(const std::string& data_dir, const TaskInfo& task, Regime regime);

struct RunResult {
    ScoreReport report;         // final network
    ScoreReport golden_report;  // the seeding golden, same corpora
    Network final_net;
    double gibbs_min_margin = std::numeric_limits<double>::infinity();
    std::string bundle_dir;
};

// Full pipeline: corpora from the corpus seed, golden verification, regime
// execution, and a bundle on disk (final network, report row, trace,
// manifest). Aborts if the golden file fails distribution verification.
RunResult run_experiment(const ExperimentConfig& config, bool resume = false);

struct BundleRow {
    std::string task;
    std::string regularizer;
    bool golden = false;
    ScoreReport report;
};

std::vector<BundleRow> load_bundles(const std::vector<std::string>& dirs);
std::string make_table_csv(const std::vector<BundleRow>& rows);
std::string make_table_text(const std::vector<BundleRow>& rows);
std::string make_scatter_svg(const std::vector<BundleRow>& rows);

// FNV-1a over file/content bytes, used for run manifests.
std::uint64_t content_hash(const std::string& bytes);

}  // namespace mdlrnn
