#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "mdlrnn/experiment.hpp"
#include "mdlrnn/search.hpp"
#include "mdlrnn/tasks.hpp"

#include <filesystem>
#include <set>

using namespace mdlrnn;

namespace {

GaConfig small_config(const TaskInfo& task) {
    GaConfig config;
    config.islands = 2;
    config.population = 12;
    config.generations = 25;
    config.migration_interval_generations = 10;
    config.allowed_activations = task.allowed_activations;
    config.allowed_unit_kinds = task.allowed_unit_kinds;
    config.reg = {RegKind::mdl, 1.0, std::nullopt};
    config.experiment_seed = 7;
    return config;
}

ScoredNetwork scored(double objective, BitLength h, std::uint64_t uid) {
    ScoredNetwork s;
    s.objective = objective;
    s.h_bits = h;
    s.uid = uid;
    return s;
}

// Structure signature ignoring weights and biases.
std::string structure_of(const Network& net) {
    Network stripped = net;
    for (auto& conn : stripped.connections) {
        conn.weight = 0;
    }
    for (auto& unit : stripped.units) {
        unit.bias = 0;
    }
    return network_to_text(stripped);
}

}  // namespace

TEST_CASE("tournament picks objective extremes") {
    std::vector<ScoredNetwork> pop = {scored(5.0, 10, 0), scored(9.0, 10, 1)};
    std::vector<bool> elite(2, false);
    Rng rng(3);
    const auto [winner, loser] = tournament_select(pop, elite, 2, rng);
    CHECK(winner == 0);
    CHECK(loser == 1);
}

TEST_CASE("tournament tie breaks toward lower |H|") {
    std::vector<ScoredNetwork> pop = {scored(5.0, 200, 0), scored(5.0, 90, 1)};
    std::vector<bool> elite(2, false);
    Rng rng(3);
    const auto [winner, loser] = tournament_select(pop, elite, 2, rng);
    CHECK(winner == 1);
    CHECK(loser == 0);
}

TEST_CASE("tournament over the whole population finds the global best") {
    std::vector<ScoredNetwork> pop;
    for (int i = 0; i < 8; ++i) {
        pop.push_back(scored(10.0 - i, 50, static_cast<std::uint64_t>(i)));
    }
    std::vector<bool> elite(pop.size(), false);
    Rng rng(11);
    const auto [winner, loser] = tournament_select(pop, elite, 8, rng);
    CHECK(winner == 7);  // lowest objective
    CHECK(loser == 0);
}

TEST_CASE("elites cannot lose") {
    std::vector<ScoredNetwork> pop = {scored(1.0, 10, 0), scored(2.0, 10, 1), scored(3.0, 10, 2)};
    std::vector<bool> elite = {true, false, false};
    Rng rng(5);
    for (int trial = 0; trial < 50; ++trial) {
        const auto [winner, loser] = tournament_select(pop, elite, 3, rng);
        CHECK(winner == 0);
        CHECK(loser != 0);
    }
}

TEST_CASE("weights-only mutations never touch the structure") {
    const auto task = get_task("dyck2");
    const auto golden = build_golden(task);
    auto config = small_config(task);
    config.mode = GaMode::weights_only;
    Rng rng(17);
    Network current = golden;
    for (int i = 0; i < 300; ++i) {
        current = mutate(current, config, rng);
    }
    CHECK(structure_of(current) == structure_of(golden));
    CHECK_NOTHROW(current.validate(config.max_units));
}

TEST_CASE("architecture mutations keep networks valid") {
    const auto task = get_task("arithmetic");
    const auto golden = build_golden(task);
    auto config = small_config(task);
    config.max_units = 40;
    Rng rng(23);
    Network current = golden;
    for (int i = 0; i < 400; ++i) {
        current = mutate(current, config, rng);
        CHECK_NOTHROW(current.validate(config.max_units));
    }
}

TEST_CASE("mutation is reproducible for a fixed seed") {
    const auto task = get_task("anbn");
    const auto golden = build_golden(task);
    const auto config = small_config(task);
    Rng rng1(99), rng2(99);
    for (int i = 0; i < 50; ++i) {
        const auto a = mutate(golden, config, rng1);
        const auto b = mutate(golden, config, rng2);
        CHECK(network_to_text(a) == network_to_text(b));
    }
}

TEST_CASE("zero generations returns the best of the initial population") {
    const auto task = get_task("anbn");
    const auto golden = build_golden(task);
    auto config = small_config(task);
    config.generations = 0;
    config.islands = 1;
    const auto train = sample_corpus(task.spec, 120, 5);
    const auto encoded = EncodedCorpus::build(golden.alphabet, train);
    const auto encoding = task_encoding(task);

    std::vector<Network> initial;
    Rng rng(1);
    for (int i = 0; i < config.population - 1; ++i) {
        initial.push_back(random_network(golden.alphabet, golden.eos, config, rng));
    }
    initial.push_back(golden);
    const auto result = evolve_island(initial, config, encoded, encoding);
    // The golden should dominate random nets on this objective.
    CHECK(result.best.net == golden);
    CHECK(result.history.empty());
}

TEST_CASE("per-generation best objective never worsens within an island") {
    const auto task = get_task("anbn");
    const auto golden = build_golden(task);
    auto config = small_config(task);
    config.islands = 1;
    config.generations = 40;
    const auto train = sample_corpus(task.spec, 40, 9);
    const auto encoded = EncodedCorpus::build(golden.alphabet, train);

    std::vector<Network> initial;
    Rng rng(2);
    for (int i = 0; i < config.population - 1; ++i) {
        initial.push_back(random_network(golden.alphabet, golden.eos, config, rng));
    }
    initial.push_back(golden);
    const auto result = evolve_island(initial, config, encoded, task_encoding(task));
    REQUIRE(result.history.size() == 40);
    for (std::size_t i = 1; i < result.history.size(); ++i) {
        CHECK(result.history[i].best_objective <= result.history[i - 1].best_objective + 1e-12);
    }
    CHECK(result.final_populations.size() == 1);
    CHECK(result.final_populations[0].size() == static_cast<std::size_t>(config.population));
}

TEST_CASE("invalid initial population is rejected") {
    const auto task = get_task("anbn");
    const auto golden = build_golden(task);
    auto config = small_config(task);
    config.islands = 1;
    const auto train = sample_corpus(task.spec, 20, 5);
    const auto encoded = EncodedCorpus::build(golden.alphabet, train);

    std::vector<Network> initial(static_cast<std::size_t>(config.population), golden);
    auto& broken = initial[3];
    add_connection(broken, output_id(broken, "a"), input_id(broken, "a"), ConnKind::forward, 1);
    CHECK_THROWS_WITH(evolve_island(initial, config, encoded, task_encoding(task)),
                      doctest::Contains("invalid initial population"));
}

TEST_CASE("h limit holds over the whole final population") {
    const auto task = get_task("anbn");
    const auto golden = build_golden(task);
    auto config = small_config(task);
    config.generations = 30;
    const auto encoding = task_encoding(task);
    const BitLength limit = 3 * encode_network(golden, encoding);
    config.reg = {RegKind::none_with_h_limit, 1.0, limit};
    const auto train = sample_corpus(task.spec, 30, 4);
    const auto encoded = EncodedCorpus::build(golden.alphabet, train);

    const auto result = evolve_archipelago(config, golden, encoded, encoding);
    CHECK(result.best.h_bits <= limit);
    for (const auto& pop : result.final_populations) {
        CHECK(pop.size() == static_cast<std::size_t>(config.population));
        for (const auto& member : pop) {
            CHECK(member.h_bits <= limit);
        }
    }
}

TEST_CASE("weights-only archipelago keeps every member isomorphic to the golden") {
    const auto task = get_task("dyck1");
    const auto golden = build_golden(task);
    auto config = small_config(task);
    config.mode = GaMode::weights_only;
    config.generations = 20;
    const auto train = sample_corpus(task.spec, 30, 8);
    const auto encoded = EncodedCorpus::build(golden.alphabet, train);

    const auto result = evolve_archipelago(config, golden, encoded, task_encoding(task));
    const auto golden_structure = structure_of(golden);
    for (const auto& pop : result.final_populations) {
        for (const auto& member : pop) {
            CHECK(structure_of(member.net) == golden_structure);
        }
    }
}

TEST_CASE("archipelago is deterministic and thread-count independent") {
    const auto task = get_task("anbn");
    const auto golden = build_golden(task);
    auto config = small_config(task);
    config.generations = 30;
    const auto train = sample_corpus(task.spec, 40, 100);
    const auto encoded = EncodedCorpus::build(golden.alphabet, train);
    const auto encoding = task_encoding(task);

    auto run_with_threads = [&](int threads) {
        auto c = config;
        c.threads = threads;
        return evolve_archipelago(c, golden, encoded, encoding);
    };
    const auto a = run_with_threads(1);
    const auto b = run_with_threads(1);
    const auto c = run_with_threads(2);
    CHECK(network_to_text(a.best.net) == network_to_text(b.best.net));
    CHECK(network_to_text(a.best.net) == network_to_text(c.best.net));
    CHECK(a.best.objective == b.best.objective);
    CHECK(a.best.objective == c.best.objective);
    REQUIRE(a.history.size() == c.history.size());
    for (std::size_t i = 0; i < a.history.size(); ++i) {
        CHECK(a.history[i].best_objective == c.history[i].best_objective);
    }
}

TEST_CASE("gibbs audit margins stay nonnegative on anbn") {
    const auto task = get_task("anbn");
    const auto golden = build_golden(task);
    auto config = small_config(task);
    config.islands = 1;
    config.generations = 10;
    const auto train = sample_corpus(task.spec, 30, 3);
    const auto encoded = EncodedCorpus::build(golden.alphabet, train);

    TestSetLimit limit;
    limit.n_range = {1, 97};
    const auto audit_corpus = enumerate_test_set(task.spec, limit);
    GibbsAudit audit;
    audit.test = EncodedCorpus::build(golden.alphabet, audit_corpus);
    audit.optimal_bits = optimal_score_bits(audit_corpus);

    const auto result = evolve_archipelago(config, golden, encoded, task_encoding(task), &audit);
    CHECK(std::isfinite(result.gibbs_min_margin));
    CHECK(result.gibbs_min_margin >= -1e-9);
}

TEST_CASE("checkpointing and resuming is deterministic") {
    const auto task = get_task("anbn");
    const auto golden = build_golden(task);
    auto config = small_config(task);
    config.generations = 20;
    config.checkpoint_interval = 10;
    const auto train = sample_corpus(task.spec, 30, 12);
    const auto encoded = EncodedCorpus::build(golden.alphabet, train);
    const auto encoding = task_encoding(task);

    const std::string dir = (std::filesystem::temp_directory_path() / "mdlrnn_ckpt_test").string();
    std::filesystem::remove_all(dir);

    // Stop at generation 10 by running a half-length config.
    auto half = config;
    half.generations = 10;
    evolve_archipelago(half, golden, encoded, encoding, nullptr, dir, false);

    const auto resumed_a = evolve_archipelago(config, golden, encoded, encoding, nullptr, dir, true);
    // Re-prime the checkpoints and resume again; both resumes must agree.
    std::filesystem::remove_all(dir);
    evolve_archipelago(half, golden, encoded, encoding, nullptr, dir, false);
    const auto resumed_b = evolve_archipelago(config, golden, encoded, encoding, nullptr, dir, true);
    CHECK(network_to_text(resumed_a.best.net) == network_to_text(resumed_b.best.net));
    CHECK(resumed_a.best.objective == resumed_b.best.objective);
    std::filesystem::remove_all(dir);
}
