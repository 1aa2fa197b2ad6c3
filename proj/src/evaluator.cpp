#include "mdlrnn/evaluator.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

namespace mdlrnn {

namespace {

double apply_activation(Activation act, double x) {
    switch (act) {
        case Activation::linear: return x;
        case Activation::relu: return x > 0.0 ? x : 0.0;
        case Activation::tanh: return std::tanh(x);
        case Activation::sigmoid: return 1.0 / (1.0 + std::exp(-x));
        case Activation::unsigned_step: return x > 0.0 ? 1.0 : 0.0;
        case Activation::floor: return std::floor(x);
        case Activation::mod3: return x - 3.0 * std::floor(x / 3.0);
        case Activation::mod4: return x - 4.0 * std::floor(x / 4.0);
        case Activation::abs: return std::fabs(x);
    }
    return x;
}

}  // namespace

CompiledNetwork::CompiledNetwork(const Network& net, bool reverse_ties) {
    net.validate();
    alphabet_size_ = net.alphabet.size();
    transform_ = net.transform;

    // Position assignment: canonical order (inputs, hidden, outputs).
    const std::vector<int> order = net.canonical_ids();
    std::map<int, std::uint32_t> position;
    for (std::size_t i = 0; i < order.size(); ++i) {
        position[order[i]] = static_cast<std::uint32_t>(i);
    }
    std::map<int, const Unit*> by_id;
    for (const auto& unit : net.units) {
        by_id[unit.id] = &unit;
    }

    const std::size_t n = order.size();
    kinds_.resize(n);
    activations_.resize(n);
    biases_.resize(n);
    incoming_.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const Unit& unit = *by_id.at(order[i]);
        kinds_[i] = unit.kind;
        activations_[i] = unit.activation;
        biases_[i] = to_double(unit.bias);
    }
    for (const auto& conn : net.connections) {
        incoming_[position.at(conn.to)].push_back({position.at(conn.from), to_double(conn.weight), conn.kind == ConnKind::recurrent});
    }
    for (auto& list : incoming_) {
        std::sort(list.begin(), list.end(), [](const Incoming& a, const Incoming& b) {
            return std::tuple(a.source, a.recurrent) < std::tuple(b.source, b.recurrent);
        });
    }

    // Kahn's algorithm over forward edges, restricted to non-input units.
    const std::size_t in_count = net.input_count();
    std::vector<int> in_degree(n, 0);
    std::vector<std::vector<std::uint32_t>> forward_out(n);
    for (const auto& conn : net.connections) {
        if (conn.kind == ConnKind::forward) {
            const auto to = position.at(conn.to);
            const auto from = position.at(conn.from);
            ++in_degree[to];
            forward_out[from].push_back(to);
        }
    }
    std::vector<std::uint32_t> ready;
    for (std::size_t i = 0; i < n; ++i) {
        if (in_degree[i] == 0) {
            ready.push_back(static_cast<std::uint32_t>(i));
        }
    }
    std::sort(ready.begin(), ready.end());
    if (reverse_ties) {
        std::reverse(ready.begin(), ready.end());
    }
    while (!ready.empty()) {
        std::uint32_t pos;
        if (reverse_ties) {
            pos = ready.front();
            ready.erase(ready.begin());
        } else {
            pos = ready.back();
            ready.pop_back();
        }
        if (pos >= in_count) {
            eval_order_.push_back(pos);
        }
        for (const std::uint32_t to : forward_out[pos]) {
            if (--in_degree[to] == 0) {
                ready.push_back(to);
            }
        }
    }
    if (eval_order_.size() != n - in_count) {
        throw std::runtime_error("cycle in forward graph");
    }

    // Output unit ids are in_count .. in_count+arity-1; map them to canonical
    // positions (outputs sit after the hidden units in canonical order).
    for (std::size_t slot = 0; slot < output_arity(); ++slot) {
        output_positions_.push_back(position.at(static_cast<int>(in_count + slot)));
    }
}

NetworkEvaluator::NetworkEvaluator(const CompiledNetwork& compiled) : compiled_(&compiled) {
    values_.assign(compiled.unit_count(), 0.0);
    next_values_.assign(compiled.unit_count(), 0.0);
    distribution_.assign(compiled.output_arity(), 0.0);
}

void NetworkEvaluator::reset() {
    std::fill(values_.begin(), values_.end(), 0.0);
}

void NetworkEvaluator::set_state(const std::vector<double>& state) {
    if (state.size() != values_.size()) {
        throw std::runtime_error("evaluator: state dimension mismatch");
    }
    values_ = state;
}

const std::vector<double>& NetworkEvaluator::step(std::size_t input_slot) {
    const CompiledNetwork& c = *compiled_;
    const std::size_t in_count = c.alphabet_size() + 1;
    if (input_slot >= in_count) {
        throw std::runtime_error("evaluator: input slot out of range");
    }
    std::fill(next_values_.begin(), next_values_.end(), 0.0);
    next_values_[input_slot] = 1.0;

    for (const std::uint32_t pos : c.eval_order_) {
        double pre;
        if (c.kinds_[pos] == UnitKind::summation) {
            pre = c.biases_[pos];
            for (const auto& in : c.incoming_[pos]) {
                pre += in.weight * (in.recurrent ? values_[in.source] : next_values_[in.source]);
            }
        } else {
            pre = c.biases_[pos];
            for (const auto& in : c.incoming_[pos]) {
                pre *= in.weight * (in.recurrent ? values_[in.source] : next_values_[in.source]);
            }
        }
        next_values_[pos] = apply_activation(c.activations_[pos], pre);
    }
    values_.swap(next_values_);

    // Output transform.
    const auto& outs = c.output_positions_;
    if (c.transform() == OutputTransform::softmax) {
        double max_z = -std::numeric_limits<double>::infinity();
        for (const auto pos : outs) {
            max_z = std::max(max_z, values_[pos]);
        }
        double sum = 0.0;
        for (std::size_t i = 0; i < outs.size(); ++i) {
            distribution_[i] = std::exp(values_[outs[i]] - max_z);
            sum += distribution_[i];
        }
        for (auto& v : distribution_) {
            v /= sum;
        }
    } else {
        double sum = 0.0;
        for (std::size_t i = 0; i < outs.size(); ++i) {
            distribution_[i] = std::max(0.0, values_[outs[i]]);
            sum += distribution_[i];
        }
        if (sum > 0.0) {
            for (auto& v : distribution_) {
                v /= sum;
            }
        } else {
            std::fill(distribution_.begin(), distribution_.end(), 1.0 / static_cast<double>(outs.size()));
        }
    }
    return distribution_;
}

double NetworkEvaluator::sequence_bits(const std::vector<std::int32_t>& token_ids, bool* smoothed) {
    const std::size_t eos_slot = compiled_->alphabet_size();
    double bits = 0.0;
    std::size_t input_slot = compiled_->start_slot();
    for (std::size_t t = 0; t <= token_ids.size(); ++t) {
        const auto& dist = step(input_slot);
        const std::size_t target = t < token_ids.size() ? static_cast<std::size_t>(token_ids[t]) : eos_slot;
        double q = dist[target];
        if (q == 0.0) {
            q = kSmoothEps;
            if (smoothed) {
                *smoothed = true;
            }
        }
        bits -= std::log2(q);
        if (t < token_ids.size()) {
            input_slot = static_cast<std::size_t>(token_ids[t]);
        }
    }
    return bits;
}

std::pair<std::vector<double>, std::vector<double>> forward_step(const Network& net,
                                                                 std::size_t input_slot,
                                                                 const std::vector<double>& state) {
    CompiledNetwork compiled(net);
    NetworkEvaluator eval(compiled);
    eval.set_state(state);
    const auto dist = eval.step(input_slot);
    return {dist, eval.state()};
}

std::vector<std::int32_t> encode_tokens(const std::vector<Symbol>& alphabet, const TokenSeq& tokens) {
    std::map<Symbol, std::int32_t> ids;
    for (std::size_t i = 0; i < alphabet.size(); ++i) {
        ids[alphabet[i]] = static_cast<std::int32_t>(i);
    }
    std::vector<std::int32_t> out;
    out.reserve(tokens.size());
    for (const auto& token : tokens) {
        const auto it = ids.find(token);
        if (it == ids.end()) {
            throw std::runtime_error("unknown symbol '" + token + "'");
        }
        out.push_back(it->second);
    }
    return out;
}

double sequence_surprisal(const Network& net, const TokenSeq& tokens, bool* smoothed) {
    CompiledNetwork compiled(net);
    NetworkEvaluator eval(compiled);
    return eval.sequence_bits(encode_tokens(net.alphabet, tokens), smoothed);
}

VerifyReport verify_distribution(const Network& net, const LanguageSpec& spec, int max_len, double tol) {
    if (net.alphabet != spec.alphabet()) {
        throw std::runtime_error("verify_distribution: network and grammar alphabets differ");
    }
    TestSetLimit limit;
    if (spec.parametric) {
        const int k = spec.parametric->kind == ParametricKind::anbn ? 2 : 3;
        limit.n_range = {1, std::max(1, max_len / k)};
    } else {
        limit.max_len = max_len;
    }
    const Corpus members = enumerate_test_set(spec, limit);

    CompiledNetwork compiled(net);
    NetworkEvaluator eval(compiled);
    GrammarPredictor predictor(spec);
    VerifyReport report;
    const std::size_t arity = compiled.output_arity();
    for (const auto& entry : members.sequences) {
        eval.reset();
        predictor.reset();
        const auto ids = encode_tokens(net.alphabet, entry.tokens);
        std::size_t input_slot = compiled.start_slot();
        for (std::size_t t = 0; t <= ids.size(); ++t) {
            const auto& model = eval.step(input_slot);
            const auto truth = predictor.next_distribution();
            ++report.prefixes_checked;
            for (std::size_t i = 0; i < arity; ++i) {
                const double deviation = std::fabs(model[i] - to_double(truth[i]));
                if (deviation > report.max_deviation) {
                    report.max_deviation = deviation;
                    report.worst_prefix = TokenSeq(entry.tokens.begin(), entry.tokens.begin() + static_cast<std::ptrdiff_t>(t));
                    report.worst_symbol = i < net.alphabet.size() ? net.alphabet[i] : net.eos;
                }
            }
            if (t < ids.size()) {
                input_slot = static_cast<std::size_t>(ids[t]);
                predictor.consume(entry.tokens[t]);
            }
        }
    }
    report.pass = report.max_deviation <= tol;
    return report;
}

}  // namespace mdlrnn
