#include "mdlrnn/search.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <thread>
#include <tuple>

namespace mdlrnn {

namespace {

constexpr int kMutationRetries = 100;

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

std::uint64_t island_seed(std::uint64_t experiment_seed, int island) {
    return splitmix64(experiment_seed ^ splitmix64(static_cast<std::uint64_t>(island) + 1));
}

// Winner / global-best ordering: objective, then |H|, then creation id.
bool better(const ScoredNetwork& a, const ScoredNetwork& b) {
    if (a.objective != b.objective) {
        return a.objective < b.objective;
    }
    if (a.h_bits != b.h_bits) {
        return a.h_bits < b.h_bits;
    }
    return a.uid < b.uid;
}

bool worse(const ScoredNetwork& a, const ScoredNetwork& b) {
    if (a.objective != b.objective) {
        return a.objective > b.objective;
    }
    if (a.h_bits != b.h_bits) {
        return a.h_bits > b.h_bits;
    }
    return a.uid > b.uid;
}

Rational fresh_rational(Rng& rng) {
    const long long num = rng.uniform_int(1, 10);
    const long long den = rng.uniform_int(1, 10);
    const bool negative = rng.uniform(2) == 1;
    return make_rational(negative ? -num : num, den);
}

Rational perturb_rational(const Rational& value, Rng& rng) {
    for (int attempt = 0; attempt < kMutationRetries; ++attempt) {
        const std::uint64_t op = rng.uniform(3);
        if (op == 2) {
            return fresh_rational(rng);
        }
        const long long k = rng.uniform_int(1, 3);
        const long long delta = rng.uniform(2) == 1 ? -k : k;
        const BigInt num = boost::multiprecision::numerator(value);
        const BigInt den = boost::multiprecision::denominator(value);
        if (op == 0) {
            return Rational(num + delta, den);
        }
        const BigInt new_den = den + delta;
        if (new_den <= 0) {
            continue;  // den <= 0 rejected, redraw
        }
        return Rational(num, new_den);
    }
    return value;
}

bool creates_forward_cycle(const Network& net, int from, int to) {
    if (from == to) {
        return true;
    }
    // Adding from->to closes a cycle iff `from` is forward-reachable from `to`.
    std::set<int> visited;
    std::vector<int> stack = {to};
    while (!stack.empty()) {
        const int at = stack.back();
        stack.pop_back();
        if (at == from) {
            return true;
        }
        if (!visited.insert(at).second) {
            continue;
        }
        for (const auto& conn : net.connections) {
            if (conn.kind == ConnKind::forward && conn.from == at) {
                stack.push_back(conn.to);
            }
        }
    }
    return false;
}

std::vector<int> unit_ids(const Network& net, bool exclude_inputs) {
    std::vector<int> ids;
    for (const int id : net.canonical_ids()) {
        if (exclude_inputs && id < static_cast<int>(net.input_count())) {
            continue;
        }
        ids.push_back(id);
    }
    return ids;
}

std::vector<Connection> canonical_connections(const Network& net) {
    auto sorted = net.connections;
    std::sort(sorted.begin(), sorted.end(), [](const Connection& a, const Connection& b) {
        return std::tuple(a.from, a.to, static_cast<int>(a.kind)) < std::tuple(b.from, b.to, static_cast<int>(b.kind));
    });
    return sorted;
}

bool mutate_add_unit(Network& net, const GaConfig& config, Rng& rng) {
    if (net.units.size() >= config.max_units) {
        return false;
    }
    const UnitKind kind = config.allowed_unit_kinds[rng.uniform(config.allowed_unit_kinds.size())];
    const Activation act = config.allowed_activations[rng.uniform(config.allowed_activations.size())];
    const int id = add_hidden_unit(net, kind, act, fresh_rational(rng));
    const auto sources = unit_ids(net, false);
    const auto targets = unit_ids(net, true);
    for (int attempt = 0; attempt < kMutationRetries; ++attempt) {
        const int from = sources[rng.uniform(sources.size())];
        const int to = targets[rng.uniform(targets.size())];
        if (from == id || to == id || from == to) {
            continue;
        }
        add_connection(net, from, id, ConnKind::forward, fresh_rational(rng));
        if (creates_forward_cycle(net, id, to)) {
            net.connections.pop_back();
            continue;
        }
        add_connection(net, id, to, ConnKind::forward, fresh_rational(rng));
        return true;
    }
    // Wiring failed; the loose unit is still a valid network.
    return true;
}

bool mutate_remove_unit(Network& net, Rng& rng) {
    std::vector<int> hidden;
    for (const int id : net.canonical_ids()) {
        if (id >= static_cast<int>(net.input_count() + net.output_count())) {
            hidden.push_back(id);
        }
    }
    if (hidden.empty()) {
        return false;
    }
    const int victim = hidden[rng.uniform(hidden.size())];
    std::erase_if(net.units, [&](const Unit& u) { return u.id == victim; });
    std::erase_if(net.connections, [&](const Connection& c) { return c.from == victim || c.to == victim; });
    return true;
}

bool mutate_add_connection(Network& net, Rng& rng) {
    const auto sources = unit_ids(net, false);
    const auto targets = unit_ids(net, true);
    for (int attempt = 0; attempt < kMutationRetries; ++attempt) {
        const int from = sources[rng.uniform(sources.size())];
        const int to = targets[rng.uniform(targets.size())];
        const ConnKind kind = rng.uniform(2) == 0 ? ConnKind::forward : ConnKind::recurrent;
        if (net.has_connection(from, to, kind)) {
            continue;
        }
        if (kind == ConnKind::forward && creates_forward_cycle(net, from, to)) {
            continue;
        }
        add_connection(net, from, to, kind, fresh_rational(rng));
        return true;
    }
    return false;
}

bool mutate_remove_connection(Network& net, Rng& rng) {
    if (net.connections.empty()) {
        return false;
    }
    const auto order = canonical_connections(net);
    const Connection victim = order[rng.uniform(order.size())];
    std::erase_if(net.connections, [&](const Connection& c) {
        return c.from == victim.from && c.to == victim.to && c.kind == victim.kind;
    });
    return true;
}

bool mutate_perturb_weight(Network& net, Rng& rng) {
    if (net.connections.empty()) {
        return false;
    }
    const auto order = canonical_connections(net);
    const Connection chosen = order[rng.uniform(order.size())];
    for (auto& conn : net.connections) {
        if (conn.from == chosen.from && conn.to == chosen.to && conn.kind == chosen.kind) {
            conn.weight = perturb_rational(conn.weight, rng);
            return true;
        }
    }
    return false;
}

bool mutate_perturb_bias(Network& net, Rng& rng) {
    const auto candidates = unit_ids(net, true);
    const int id = candidates[rng.uniform(candidates.size())];
    for (auto& unit : net.units) {
        if (unit.id == id) {
            unit.bias = perturb_rational(unit.bias, rng);
            return true;
        }
    }
    return false;
}

bool mutate_change_activation(Network& net, const GaConfig& config, Rng& rng) {
    const auto candidates = unit_ids(net, true);
    const int id = candidates[rng.uniform(candidates.size())];
    const Activation act = config.allowed_activations[rng.uniform(config.allowed_activations.size())];
    for (auto& unit : net.units) {
        if (unit.id == id) {
            unit.activation = act;
            return true;
        }
    }
    return false;
}

}  // namespace

void GaConfig::validate() const {
    if (population < 2 || tournament_size < 2 || population < tournament_size) {
        throw std::runtime_error("ga config: need population >= tournament_size >= 2");
    }
    if (islands < 1 || generations < 0) {
        throw std::runtime_error("ga config: bad islands/generations");
    }
    for (const double ratio : {elite_ratio, migration_ratio, mutation_prob, crossover_prob}) {
        if (ratio < 0.0 || ratio > 1.0) {
            throw std::runtime_error("ga config: ratios must lie in [0,1]");
        }
    }
    if (crossover_prob != 0.0) {
        throw std::runtime_error("ga config: crossover is not supported (probability must be 0)");
    }
    if (allowed_activations.empty() || allowed_unit_kinds.empty()) {
        throw std::runtime_error("ga config: empty operator palettes");
    }
    if (migration_interval_generations < 1) {
        throw std::runtime_error("ga config: migration interval must be positive");
    }
    reg.validate();
    if (reg.kind == RegKind::none) {
        throw std::runtime_error("ga config: plain 'none' is not a GA regularizer; use none_h_limit");
    }
}

std::pair<std::size_t, std::size_t> tournament_select(const std::vector<ScoredNetwork>& pop,
                                                      const std::vector<bool>& elite,
                                                      int tournament_size,
                                                      Rng& rng) {
    if (pop.size() < static_cast<std::size_t>(tournament_size)) {
        throw std::runtime_error("tournament: population smaller than tournament size");
    }
    std::vector<std::size_t> drawn;
    drawn.reserve(static_cast<std::size_t>(tournament_size));
    while (drawn.size() < static_cast<std::size_t>(tournament_size)) {
        const std::size_t pick = rng.uniform(pop.size());
        if (std::find(drawn.begin(), drawn.end(), pick) == drawn.end()) {
            drawn.push_back(pick);
        }
    }
    std::size_t winner = drawn[0];
    for (const std::size_t i : drawn) {
        if (better(pop[i], pop[winner])) {
            winner = i;
        }
    }
    std::size_t loser = pop.size();
    for (const std::size_t i : drawn) {
        if (elite[i]) {
            continue;
        }
        if (loser == pop.size() || worse(pop[i], pop[loser])) {
            loser = i;
        }
    }
    return {winner, loser};
}

Network mutate(const Network& net, const GaConfig& config, Rng& rng) {
    if (config.mutation_prob < 1.0 && !rng.bernoulli(rational_from_double(config.mutation_prob, 1u << 30))) {
        return net;
    }
    Network child = net;
    const bool weights_only = config.mode == GaMode::weights_only;
    const std::uint64_t op = rng.uniform(weights_only ? 2 : 7);
    bool applied = false;
    if (weights_only) {
        applied = op == 0 ? mutate_perturb_weight(child, rng) : mutate_perturb_bias(child, rng);
    } else {
        switch (op) {
            case 0: applied = mutate_add_unit(child, config, rng); break;
            case 1: applied = mutate_remove_unit(child, rng); break;
            case 2: applied = mutate_add_connection(child, rng); break;
            case 3: applied = mutate_remove_connection(child, rng); break;
            case 4: applied = mutate_perturb_weight(child, rng); break;
            case 5: applied = mutate_perturb_bias(child, rng); break;
            default: applied = mutate_change_activation(child, config, rng); break;
        }
    }
    if (!applied) {
        return net;  // degenerate mutation falls back to a copy
    }
    return child;
}

Network random_network(const std::vector<Symbol>& alphabet, const Symbol& eos, const GaConfig& config, Rng& rng) {
    Network net = make_network_shell(alphabet, eos, OutputTransform::softmax);
    const int hidden = static_cast<int>(rng.uniform(4));
    for (int i = 0; i < hidden; ++i) {
        const UnitKind kind = config.allowed_unit_kinds[rng.uniform(config.allowed_unit_kinds.size())];
        const Activation act = config.allowed_activations[rng.uniform(config.allowed_activations.size())];
        add_hidden_unit(net, kind, act, fresh_rational(rng));
    }
    for (std::size_t slot = 0; slot < net.input_count(); ++slot) {
        const int in = static_cast<int>(slot);
        const int out = static_cast<int>(net.input_count() + rng.uniform(net.output_count()));
        if (!net.has_connection(in, out, ConnKind::forward)) {
            add_connection(net, in, out, ConnKind::forward, fresh_rational(rng));
        }
    }
    return net;
}

// ---------------------------------------------------------------------------
// Island machinery
// ---------------------------------------------------------------------------

namespace {

struct IslandState {
    int index = 0;
    std::vector<ScoredNetwork> pop;
    Rng rng{0};
    int generation = 0;
    ScoredNetwork best;
    double gibbs_min = std::numeric_limits<double>::infinity();
    std::uint64_t evaluations = 0;
    std::uint64_t next_uid = 0;
    std::vector<GenerationStats> history;
};

class Evolver {
public:
    Evolver(const GaConfig& config, const EncodedCorpus& train, const EncodingContext& encoding, const GibbsAudit* audit)
        : config_(config), train_(train), encoding_(encoding), audit_(audit) {}

    ScoredNetwork score(IslandState& island, Network net) const {
        ScoredNetwork scored;
        scored.h_bits = encode_network(net, encoding_);
        const CompiledNetwork compiled(net);
        scored.dh_train = dh_score_encoded(compiled, train_).bits;
        scored.objective =
            objective_value(config_.reg, scored.h_bits, l1_term(net, 1.0), l2_term(net, 1.0), scored.dh_train);
        scored.uid = island.next_uid++;
        scored.net = std::move(net);
        ++island.evaluations;
        if (audit_) {
            const double margin = dh_score_encoded(compiled, audit_->test).bits - audit_->optimal_bits;
            island.gibbs_min = std::min(island.gibbs_min, margin);
        }
        return scored;
    }

    void seed(IslandState& island, std::vector<Network> initial) const {
        island.pop.clear();
        island.pop.reserve(initial.size());
        for (auto& net : initial) {
            try {
                net.validate(config_.max_units);
            } catch (const std::exception& e) {
                throw std::runtime_error(std::string("invalid initial population: ") + e.what());
            }
            island.pop.push_back(score(island, std::move(net)));
        }
        island.best = *std::min_element(island.pop.begin(), island.pop.end(), better);
    }

    void run_generations(IslandState& island, int count) const {
        const std::size_t elite_count = std::min(
            island.pop.size(),
            static_cast<std::size_t>(std::ceil(config_.elite_ratio * static_cast<double>(config_.population))));
        std::vector<std::size_t> order(island.pop.size());
        for (int g = 0; g < count; ++g) {
            std::vector<bool> elite(island.pop.size(), false);
            if (elite_count > 0) {
                for (std::size_t i = 0; i < order.size(); ++i) {
                    order[i] = i;
                }
                std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(elite_count), order.end(),
                                  [&](std::size_t a, std::size_t b) { return better(island.pop[a], island.pop[b]); });
                for (std::size_t i = 0; i < elite_count; ++i) {
                    elite[order[i]] = true;
                }
            }
            for (int step = 0; step < config_.population; ++step) {
                const auto [winner, loser] = tournament_select(island.pop, elite, config_.tournament_size, island.rng);
                if (loser == island.pop.size()) {
                    continue;  // all drawn members were elite
                }
                ScoredNetwork offspring = score(island, mutate(island.pop[winner].net, config_, island.rng));
                if (!h_limit_feasible(config_.reg, offspring.h_bits)) {
                    continue;  // ceiling violation: the loser survives
                }
                if (better(offspring, island.best)) {
                    island.best = offspring;
                }
                island.pop[loser] = std::move(offspring);
            }
            ++island.generation;
            const auto& gen_best = *std::min_element(island.pop.begin(), island.pop.end(), better);
            island.history.push_back({island.index, island.generation, gen_best.objective, gen_best.h_bits, gen_best.dh_train});
        }
    }

private:
    const GaConfig& config_;
    const EncodedCorpus& train_;
    const EncodingContext& encoding_;
    const GibbsAudit* audit_;
};

void migrate_ring(std::vector<IslandState>& islands, const Evolver& evolver, const GaConfig& config) {
    if (islands.size() < 2 || config.migration_ratio <= 0.0) {
        return;
    }
    const std::size_t count =
        static_cast<std::size_t>(std::ceil(config.migration_ratio * static_cast<double>(config.population)));
    if (count == 0) {
        return;
    }
    // Snapshot emigrants from every island before any replacement lands.
    std::vector<std::vector<Network>> outbound(islands.size());
    for (std::size_t i = 0; i < islands.size(); ++i) {
        auto order = islands[i].pop;
        std::sort(order.begin(), order.end(), better);
        for (std::size_t k = 0; k < std::min(count, order.size()); ++k) {
            outbound[i].push_back(order[k].net);
        }
    }
    for (std::size_t i = 0; i < islands.size(); ++i) {
        auto& target = islands[(i + 1) % islands.size()];
        std::vector<std::size_t> order(target.pop.size());
        for (std::size_t k = 0; k < order.size(); ++k) {
            order[k] = k;
        }
        std::sort(order.begin(), order.end(),
                  [&](std::size_t a, std::size_t b) { return worse(target.pop[a], target.pop[b]); });
        for (std::size_t k = 0; k < outbound[i].size() && k < order.size(); ++k) {
            target.pop[order[k]] = evolver.score(target, std::move(outbound[i][k]));
        }
    }
}

std::string checkpoint_path(const std::string& dir, int island) {
    return dir + "/island_" + std::to_string(island) + ".ckpt";
}

void write_checkpoint(const IslandState& island, const std::string& dir) {
    std::filesystem::create_directories(dir);
    const std::string path = checkpoint_path(dir, island.index);
    std::ofstream out(path + ".tmp");
    if (!out) {
        throw std::runtime_error("cannot write checkpoint '" + path + "'");
    }
    out.precision(17);
    out << "generation " << island.generation << '\n';
    out << "next_uid " << island.next_uid << '\n';
    out << "evaluations " << island.evaluations << '\n';
    if (std::isfinite(island.gibbs_min)) {
        out << "gibbs_min " << island.gibbs_min << '\n';
    } else {
        out << "gibbs_min none" << '\n';
    }
    out << "rng " << island.rng.state_string() << '\n';
    out << "population " << island.pop.size() << '\n';
    auto emit = [&out](const Network& net) {
        const std::string text = network_to_text(net);
        out << "network " << std::count(text.begin(), text.end(), '\n') << '\n' << text;
    };
    emit(island.best.net);
    for (const auto& member : island.pop) {
        emit(member.net);
    }
    out.close();
    std::filesystem::rename(path + ".tmp", path);
}

bool read_checkpoint(IslandState& island, const std::string& dir) {
    const std::string path = checkpoint_path(dir, island.index);
    std::ifstream in(path);
    if (!in) {
        return false;
    }
    std::string key, value;
    in >> key >> island.generation;
    in >> key >> island.next_uid;
    in >> key >> island.evaluations;
    in >> key >> value;
    island.gibbs_min = value == "none" ? std::numeric_limits<double>::infinity() : std::stod(value);
    in >> key;
    std::string state_line;
    std::getline(in, state_line);
    island.rng.set_state(state_line);
    std::size_t pop_size = 0;
    in >> key >> pop_size;
    auto read_network = [&in]() {
        std::string tag;
        std::size_t lines = 0;
        in >> tag >> lines;
        std::string skip;
        std::getline(in, skip);
        std::string text;
        for (std::size_t i = 0; i < lines; ++i) {
            std::string line;
            std::getline(in, line);
            text += line;
            text += '\n';
        }
        return parse_network_text(text);
    };
    island.best.net = read_network();
    island.pop.clear();
    for (std::size_t i = 0; i < pop_size; ++i) {
        ScoredNetwork member;
        member.net = read_network();
        island.pop.push_back(std::move(member));
    }
    if (in.fail()) {
        throw std::runtime_error("malformed checkpoint '" + path + "'");
    }
    return true;
}

}  // namespace

SearchResult evolve_island(const std::vector<Network>& initial,
                           const GaConfig& config,
                           const EncodedCorpus& train,
                           const EncodingContext& encoding,
                           const GibbsAudit* audit) {
    config.validate();
    if (initial.size() != static_cast<std::size_t>(config.population)) {
        throw std::runtime_error("invalid initial population: size mismatch");
    }
    Evolver evolver(config, train, encoding, audit);
    IslandState island;
    island.rng = Rng(island_seed(config.experiment_seed, 0));
    evolver.seed(island, initial);
    evolver.run_generations(island, config.generations);
    SearchResult result;
    result.best = island.best;
    result.history = std::move(island.history);
    result.gibbs_min_margin = island.gibbs_min;
    result.evaluations = island.evaluations;
    result.final_populations.push_back(std::move(island.pop));
    return result;
}

SearchResult evolve_archipelago(const GaConfig& config,
                                const Network& golden,
                                const EncodedCorpus& train,
                                const EncodingContext& encoding,
                                const GibbsAudit* audit,
                                const std::string& checkpoint_dir,
                                bool resume) {
    config.validate();
    golden.validate(config.max_units);
    Evolver evolver(config, train, encoding, audit);

    std::vector<IslandState> islands(static_cast<std::size_t>(config.islands));
    for (int i = 0; i < config.islands; ++i) {
        islands[static_cast<std::size_t>(i)].index = i;
        islands[static_cast<std::size_t>(i)].rng = Rng(island_seed(config.experiment_seed, i));
    }

    if (resume) {
        if (checkpoint_dir.empty()) {
            throw std::runtime_error("resume requested without a checkpoint directory");
        }
        for (auto& island : islands) {
            if (!read_checkpoint(island, checkpoint_dir)) {
                throw std::runtime_error("missing checkpoint for island " + std::to_string(island.index));
            }
            const auto saved_evals = island.evaluations;
            const auto saved_gibbs = island.gibbs_min;
            auto nets = std::move(island.pop);
            island.pop.clear();
            for (auto& member : nets) {
                island.pop.push_back(evolver.score(island, std::move(member.net)));
            }
            island.best = evolver.score(island, std::move(island.best.net));
            island.evaluations = saved_evals;
            island.gibbs_min = saved_gibbs;
        }
        const int gen0 = islands.front().generation;
        for (const auto& island : islands) {
            if (island.generation != gen0) {
                throw std::runtime_error("checkpoints disagree on generation");
            }
        }
    } else {
        for (auto& island : islands) {
            std::vector<Network> initial;
            initial.reserve(static_cast<std::size_t>(config.population));
            const int golden_count = config.mode == GaMode::weights_only
                                         ? config.population
                                         : std::min(config.golden_copies, config.population);
            for (int i = golden_count; i < config.population; ++i) {
                Network net = random_network(golden.alphabet, golden.eos, config, island.rng);
                if (config.reg.kind == RegKind::none_with_h_limit) {
                    for (int tries = 0; tries < 50 && encode_network(net, encoding) > *config.reg.h_limit; ++tries) {
                        net = random_network(golden.alphabet, golden.eos, config, island.rng);
                    }
                }
                initial.push_back(std::move(net));
            }
            for (int i = 0; i < golden_count; ++i) {
                initial.push_back(golden);
            }
            evolver.seed(island, std::move(initial));
        }
    }

    const int hw = static_cast<int>(std::thread::hardware_concurrency());
    const int worker_count =
        std::max(1, std::min(config.islands, config.threads > 0 ? config.threads : std::max(1, hw)));

    int generation = islands.front().generation;
    while (generation < config.generations) {
        int chunk = config.generations - generation;
        chunk = std::min(chunk, config.migration_interval_generations -
                                    (generation % config.migration_interval_generations));
        if (config.checkpoint_interval > 0) {
            chunk = std::min(chunk, config.checkpoint_interval - (generation % config.checkpoint_interval));
        }

        if (worker_count <= 1 || islands.size() == 1) {
            for (auto& island : islands) {
                evolver.run_generations(island, chunk);
            }
        } else {
            std::vector<std::thread> workers;
            workers.reserve(static_cast<std::size_t>(worker_count));
            for (int w = 0; w < worker_count; ++w) {
                workers.emplace_back([&, w]() {
                    for (std::size_t i = static_cast<std::size_t>(w); i < islands.size();
                         i += static_cast<std::size_t>(worker_count)) {
                        evolver.run_generations(islands[i], chunk);
                    }
                });
            }
            for (auto& worker : workers) {
                worker.join();
            }
        }
        generation += chunk;

        if (generation < config.generations && generation % config.migration_interval_generations == 0) {
            migrate_ring(islands, evolver, config);
        }
        if (config.checkpoint_interval > 0 && !checkpoint_dir.empty() &&
            generation % config.checkpoint_interval == 0) {
            for (const auto& island : islands) {
                write_checkpoint(island, checkpoint_dir);
            }
        }
    }

    SearchResult result;
    result.best = islands.front().best;
    for (const auto& island : islands) {
        if (better(island.best, result.best)) {
            result.best = island.best;
        }
        result.gibbs_min_margin = std::min(result.gibbs_min_margin, island.gibbs_min);
        result.evaluations += island.evaluations;
        result.history.insert(result.history.end(), island.history.begin(), island.history.end());
    }
    for (auto& island : islands) {
        result.final_populations.push_back(std::move(island.pop));
    }
    std::sort(result.history.begin(), result.history.end(), [](const GenerationStats& a, const GenerationStats& b) {
        return std::tuple(a.generation, a.island) < std::tuple(b.generation, b.island);
    });
    return result;
}

}  // namespace mdlrnn
