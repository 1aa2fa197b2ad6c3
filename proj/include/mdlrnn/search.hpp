#pragma once

#include "mdlrnn/evaluation.hpp"
#include "mdlrnn/grammar.hpp"
#include "mdlrnn/mdl.hpp"
#include "mdlrnn/network.hpp"

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

namespace mdlrnn {

enum class GaMode { architecture, weights_only };

struct GaConfig {
    int islands = 4;
    int population = 50;
    int generations = 2000;
    int tournament_size = 2;
    double elite_ratio = 0.001;
    double mutation_prob = 1.0;
    double crossover_prob = 0.0;  // kept for config compatibility; must be 0
    double migration_ratio = 0.01;
    int migration_interval_generations = 1000;
    std::size_t max_units = 1024;
    std::vector<Activation> allowed_activations;
    std::vector<UnitKind> allowed_unit_kinds;
    GaMode mode = GaMode::architecture;
    RegularizerSpec reg;
    std::uint64_t experiment_seed = 100;
    int golden_copies = 1;
    int checkpoint_interval = 0;  // generations between checkpoints; 0 disables
    int threads = 0;              // 0 = one per island up to hardware

    void validate() const;
};

struct ScoredNetwork {
    Network net;
    BitLength h_bits = 0;
    double dh_train = 0.0;
    double objective = std::numeric_limits<double>::infinity();
    std::uint64_t uid = 0;
};

// Objective-minimizing and objective-maximizing members of a uniformly drawn
// tournament; ties break toward lower |H|, then lower uid (mirrored for the
// loser). Members listed in `elite` never lose. Returns indices into `pop`;
// loser == pop.size() means every drawn member was elite.
std::pair<std::size_t, std::size_t> tournament_select(const std::vector<ScoredNetwork>& pop,
                                                      const std::vector<bool>& elite,
                                                      int tournament_size,
                                                      Rng& rng);

// One mutation drawn uniformly from the mode's operator set; structural
// operators reject-and-retry to respect max_units and forward acyclicity,
// falling back to an unmutated copy after 100 attempts.
Network mutate(const Network& net, const GaConfig& config, Rng& rng);

// Architecture-mode initialization: 0-3 loose hidden units and each input
// wired to a random output.
Network random_network(const std::vector<Symbol>& alphabet, const Symbol& eos, const GaConfig& config, Rng& rng);

struct GenerationStats {
    int island = 0;
    int generation = 0;
    double best_objective = 0.0;
    BitLength best_h = 0;
    double best_dh_train = 0.0;
};

// Optional per-evaluation audit: every scored network is also evaluated on
// this test corpus and the minimum dh - optimal margin is tracked.
struct GibbsAudit {
    EncodedCorpus test;
    double optimal_bits = 0.0;
};

struct SearchResult {
    ScoredNetwork best;
    std::vector<GenerationStats> history;  // per island per generation
    double gibbs_min_margin = std::numeric_limits<double>::infinity();
    std::uint64_t evaluations = 0;
    std::vector<std::vector<ScoredNetwork>> final_populations;  // per island
};

// Steady-state GA on a single population. `initial` must already satisfy the
// mode's seeding contract (throws "invalid initial population" otherwise).
SearchResult evolve_island(const std::vector<Network>& initial,
                           const GaConfig& config,
                           const EncodedCorpus& train,
                           const EncodingContext& encoding,
                           const GibbsAudit* audit = nullptr);

// Ring-migration island model. Initial populations are built from the golden
// network plus random networks (architecture mode) or golden copies only
// (weights-only mode). Deterministic for fixed seeds regardless of threading;
// optional checkpoints land in checkpoint_dir every checkpoint_interval
// generations and can be resumed from.
SearchResult evolve_archipelago(const GaConfig& config,
                                const Network& golden,
                                const EncodedCorpus& train,
                                const EncodingContext& encoding,
                                const GibbsAudit* audit = nullptr,
                                const std::string& checkpoint_dir = "",
                                bool resume = false);

}  // namespace mdlrnn
