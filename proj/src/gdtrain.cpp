#include "mdlrnn/gdtrain.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>
#include <tuple>

namespace mdlrnn {

namespace {

constexpr double kLn2 = 0.6931471805599453;

struct Edge {
    std::uint32_t source;      // canonical position
    bool recurrent;
    std::size_t param;         // index into ParameterVector
};

// Evaluation plan with parameter indices, for tape-based reverse mode.
struct Trainable {
    std::size_t unit_count = 0;
    std::size_t input_count = 0;
    std::size_t arity = 0;  // outputs
    OutputTransform transform = OutputTransform::softmax;
    std::vector<UnitKind> kinds;
    std::vector<Activation> acts;
    std::vector<std::size_t> bias_param;       // per position; SIZE_MAX for inputs
    std::vector<std::vector<Edge>> incoming;   // per position
    std::vector<std::uint32_t> eval_order;     // non-input positions, topo order
    std::vector<std::uint32_t> output_positions;
    std::size_t weight_count = 0;
    std::size_t param_count = 0;

    explicit Trainable(const Network& net) {
        net.validate();
        for (const auto& unit : net.units) {
            if (!activation_differentiable(unit.activation)) {
                throw std::runtime_error("non-differentiable activation '" +
                                         std::string(activation_name(unit.activation)) + "'");
            }
        }
        unit_count = net.units.size();
        input_count = net.input_count();
        arity = net.output_count();
        transform = net.transform;

        const auto order = net.canonical_ids();
        std::map<int, std::uint32_t> position;
        for (std::size_t i = 0; i < order.size(); ++i) {
            position[order[i]] = static_cast<std::uint32_t>(i);
        }
        std::map<int, const Unit*> by_id;
        for (const auto& unit : net.units) {
            by_id[unit.id] = &unit;
        }
        kinds.resize(unit_count);
        acts.resize(unit_count);
        bias_param.assign(unit_count, SIZE_MAX);
        incoming.resize(unit_count);

        // Canonical connection order defines weight parameter indices.
        auto sorted = net.connections;
        std::sort(sorted.begin(), sorted.end(), [&](const Connection& a, const Connection& b) {
            return std::tuple(position.at(a.from), position.at(a.to), static_cast<int>(a.kind)) <
                   std::tuple(position.at(b.from), position.at(b.to), static_cast<int>(b.kind));
        });
        weight_count = sorted.size();
        for (std::size_t c = 0; c < sorted.size(); ++c) {
            const auto& conn = sorted[c];
            incoming[position.at(conn.to)].push_back({position.at(conn.from), conn.kind == ConnKind::recurrent, c});
        }
        std::size_t next_param = weight_count;
        for (std::size_t i = 0; i < order.size(); ++i) {
            const Unit& unit = *by_id.at(order[i]);
            kinds[i] = unit.kind;
            acts[i] = unit.activation;
            if (unit.role != UnitRole::input) {
                bias_param[i] = next_param++;
            }
        }
        param_count = next_param;

        // Topological order over forward edges.
        std::vector<int> in_degree(unit_count, 0);
        std::vector<std::vector<std::uint32_t>> forward_out(unit_count);
        for (const auto& conn : net.connections) {
            if (conn.kind == ConnKind::forward) {
                ++in_degree[position.at(conn.to)];
                forward_out[position.at(conn.from)].push_back(position.at(conn.to));
            }
        }
        std::vector<std::uint32_t> ready;
        for (std::size_t i = 0; i < unit_count; ++i) {
            if (in_degree[i] == 0) {
                ready.push_back(static_cast<std::uint32_t>(i));
            }
        }
        std::sort(ready.begin(), ready.end());
        while (!ready.empty()) {
            const std::uint32_t pos = ready.back();
            ready.pop_back();
            if (pos >= input_count) {
                eval_order.push_back(pos);
            }
            for (const std::uint32_t to : forward_out[pos]) {
                if (--in_degree[to] == 0) {
                    ready.push_back(to);
                }
            }
        }
        if (eval_order.size() != unit_count - input_count) {
            throw std::runtime_error("cycle in forward graph");
        }
        for (std::size_t slot = 0; slot < arity; ++slot) {
            output_positions.push_back(position.at(static_cast<int>(input_count + slot)));
        }
    }

    ParameterVector initial_parameters(const Network& net) const {
        ParameterVector params;
        params.weight_count = weight_count;
        params.values.assign(param_count, 0.0);
        const auto order = net.canonical_ids();
        std::map<int, std::uint32_t> position;
        for (std::size_t i = 0; i < order.size(); ++i) {
            position[order[i]] = static_cast<std::uint32_t>(i);
        }
        auto sorted = net.connections;
        std::sort(sorted.begin(), sorted.end(), [&](const Connection& a, const Connection& b) {
            return std::tuple(position.at(a.from), position.at(a.to), static_cast<int>(a.kind)) <
                   std::tuple(position.at(b.from), position.at(b.to), static_cast<int>(b.kind));
        });
        for (std::size_t c = 0; c < sorted.size(); ++c) {
            params.values[c] = to_double(sorted[c].weight);
        }
        for (const auto& unit : net.units) {
            const auto pos = position.at(unit.id);
            if (bias_param[pos] != SIZE_MAX) {
                params.values[bias_param[pos]] = to_double(unit.bias);
            }
        }
        return params;
    }

    // Writes float parameters back into a copy of the prototype network as
    // capped-denominator rationals.
    Network realize(const Network& prototype, const ParameterVector& params, std::uint64_t max_den) const {
        Network net = prototype;
        const auto order = net.canonical_ids();
        std::map<int, std::uint32_t> position;
        for (std::size_t i = 0; i < order.size(); ++i) {
            position[order[i]] = static_cast<std::uint32_t>(i);
        }
        std::vector<Connection*> sorted;
        for (auto& conn : net.connections) {
            sorted.push_back(&conn);
        }
        std::sort(sorted.begin(), sorted.end(), [&](const Connection* a, const Connection* b) {
            return std::tuple(position.at(a->from), position.at(a->to), static_cast<int>(a->kind)) <
                   std::tuple(position.at(b->from), position.at(b->to), static_cast<int>(b->kind));
        });
        for (std::size_t c = 0; c < sorted.size(); ++c) {
            sorted[c]->weight = rational_from_double(params.values[c], max_den);
        }
        for (auto& unit : net.units) {
            const auto pos = position.at(unit.id);
            if (bias_param[pos] != SIZE_MAX) {
                unit.bias = rational_from_double(params.values[bias_param[pos]], max_den);
            }
        }
        return net;
    }

    // Teacher-forced CE of one sequence in nats; accumulates dCE/dparam.
    double sequence_nats(const ParameterVector& params, const std::vector<std::int32_t>& token_ids,
                         double scale, std::vector<double>* grad) const {
        const std::size_t steps = token_ids.size() + 1;
        const std::size_t eos_slot = arity - 1;

        // Tape.
        std::vector<std::vector<double>> post(steps + 1, std::vector<double>(unit_count, 0.0));  // post[0] = initial state
        std::vector<std::vector<double>> pre(steps, std::vector<double>(unit_count, 0.0));
        std::vector<std::vector<double>> dist(steps, std::vector<double>(arity, 0.0));
        std::vector<std::size_t> inputs(steps);

        double nats = 0.0;
        for (std::size_t t = 0; t < steps; ++t) {
            inputs[t] = t == 0 ? input_count - 1 : static_cast<std::size_t>(token_ids[t - 1]);
            auto& now = post[t + 1];
            const auto& prev = post[t];
            now[inputs[t]] = 1.0;
            for (const std::uint32_t posn : eval_order) {
                double value;
                if (kinds[posn] == UnitKind::summation) {
                    value = params.values[bias_param[posn]];
                    for (const auto& edge : incoming[posn]) {
                        value += params.values[edge.param] * (edge.recurrent ? prev[edge.source] : now[edge.source]);
                    }
                } else {
                    value = params.values[bias_param[posn]];
                    for (const auto& edge : incoming[posn]) {
                        value *= params.values[edge.param] * (edge.recurrent ? prev[edge.source] : now[edge.source]);
                    }
                }
                pre[t][posn] = value;
                switch (acts[posn]) {
                    case Activation::linear: break;
                    case Activation::relu: value = value > 0.0 ? value : 0.0; break;
                    case Activation::tanh: value = std::tanh(value); break;
                    case Activation::sigmoid: value = 1.0 / (1.0 + std::exp(-value)); break;
                    default: break;
                }
                now[posn] = value;
            }
            // Output transform.
            auto& q = dist[t];
            if (transform == OutputTransform::softmax) {
                double max_z = -std::numeric_limits<double>::infinity();
                for (const auto posn : output_positions) {
                    max_z = std::max(max_z, now[posn]);
                }
                double sum = 0.0;
                for (std::size_t i = 0; i < arity; ++i) {
                    q[i] = std::exp(now[output_positions[i]] - max_z);
                    sum += q[i];
                }
                for (auto& v : q) {
                    v /= sum;
                }
            } else {
                double sum = 0.0;
                for (std::size_t i = 0; i < arity; ++i) {
                    q[i] = std::max(0.0, now[output_positions[i]]);
                    sum += q[i];
                }
                if (sum > 0.0) {
                    for (auto& v : q) {
                        v /= sum;
                    }
                } else {
                    for (auto& v : q) {
                        v = 1.0 / static_cast<double>(arity);
                    }
                }
            }
            const std::size_t target = t + 1 < steps ? static_cast<std::size_t>(token_ids[t]) : eos_slot;
            const double q_target = q[target] == 0.0 ? 1e-10 : q[target];
            nats -= std::log(q_target);
        }

        if (!grad) {
            return nats;
        }

        // Reverse pass.
        std::vector<double> d_post_next(unit_count, 0.0);  // dL/dpost flowing from step t+1 via recurrent edges
        std::vector<double> d_post(unit_count, 0.0);
        for (std::size_t t = steps; t-- > 0;) {
            std::fill(d_post.begin(), d_post.end(), 0.0);
            std::swap(d_post, d_post_next);
            std::fill(d_post_next.begin(), d_post_next.end(), 0.0);

            const auto& now = post[t + 1];
            const auto& prev = post[t];
            const auto& q = dist[t];
            const std::size_t target = t + 1 < steps ? static_cast<std::size_t>(token_ids[t]) : eos_slot;

            // dL/dz for the output units (z = post-activation feeding the transform).
            if (transform == OutputTransform::softmax) {
                for (std::size_t i = 0; i < arity; ++i) {
                    d_post[output_positions[i]] += scale * (q[i] - (i == target ? 1.0 : 0.0));
                }
            } else {
                double sum = 0.0;
                bool clipped_all = true;
                for (std::size_t i = 0; i < arity; ++i) {
                    const double o = std::max(0.0, now[output_positions[i]]);
                    sum += o;
                    clipped_all = clipped_all && o == 0.0;
                }
                const double o_target = std::max(0.0, now[output_positions[target]]);
                if (!clipped_all && o_target > 0.0) {
                    for (std::size_t i = 0; i < arity; ++i) {
                        const double z = now[output_positions[i]];
                        if (z > 0.0) {
                            const double dL_do = -((i == target ? 1.0 : 0.0) / o_target) + 1.0 / sum;
                            d_post[output_positions[i]] += scale * dL_do;
                        }
                    }
                }
                // Uniform fallback and zero-clipped targets contribute no gradient.
            }

            for (auto it = eval_order.rbegin(); it != eval_order.rend(); ++it) {
                const std::uint32_t posn = *it;
                const double g_post = d_post[posn];
                if (g_post == 0.0) {
                    continue;
                }
                double act_grad;
                switch (acts[posn]) {
                    case Activation::linear: act_grad = 1.0; break;
                    case Activation::relu: act_grad = pre[t][posn] > 0.0 ? 1.0 : 0.0; break;
                    case Activation::tanh: act_grad = 1.0 - now[posn] * now[posn]; break;
                    case Activation::sigmoid: act_grad = now[posn] * (1.0 - now[posn]); break;
                    default: act_grad = 0.0; break;
                }
                const double g_pre = g_post * act_grad;
                if (g_pre == 0.0) {
                    continue;
                }
                if (kinds[posn] == UnitKind::summation) {
                    (*grad)[bias_param[posn]] += g_pre;
                    for (const auto& edge : incoming[posn]) {
                        const double src = edge.recurrent ? prev[edge.source] : now[edge.source];
                        (*grad)[edge.param] += g_pre * src;
                        const double flow = g_pre * params.values[edge.param];
                        if (edge.recurrent) {
                            if (t > 0) {
                                d_post_next[edge.source] += flow;
                            }
                        } else {
                            d_post[edge.source] += flow;
                        }
                    }
                } else {
                    // pre = bias * prod_i(w_i * v_i); leave-one-out products.
                    const double bias = params.values[bias_param[posn]];
                    const std::size_t k = incoming[posn].size();
                    std::vector<double> factors(k);
                    for (std::size_t i = 0; i < k; ++i) {
                        const auto& edge = incoming[posn][i];
                        const double src = edge.recurrent ? prev[edge.source] : now[edge.source];
                        factors[i] = params.values[edge.param] * src;
                    }
                    auto loo = [&](std::size_t skip) {
                        double p = 1.0;
                        for (std::size_t i = 0; i < k; ++i) {
                            if (i != skip) {
                                p *= factors[i];
                            }
                        }
                        return p;
                    };
                    double full = 1.0;
                    for (std::size_t i = 0; i < k; ++i) {
                        full *= factors[i];
                    }
                    (*grad)[bias_param[posn]] += g_pre * full;
                    for (std::size_t i = 0; i < k; ++i) {
                        const auto& edge = incoming[posn][i];
                        const double src = edge.recurrent ? prev[edge.source] : now[edge.source];
                        const double partial = bias * loo(i);
                        (*grad)[edge.param] += g_pre * partial * src;
                        const double flow = g_pre * partial * params.values[edge.param];
                        if (edge.recurrent) {
                            if (t > 0) {
                                d_post_next[edge.source] += flow;
                            }
                        } else {
                            d_post[edge.source] += flow;
                        }
                    }
                }
            }
        }
        return nats;
    }
};

}  // namespace

void GdConfig::validate() const {
    if (learning_rate < 0.0 || epochs < 0) {
        throw std::runtime_error("gd config: bad learning rate or epochs");
    }
    if (reg.kind != RegKind::none && reg.kind != RegKind::l1 && reg.kind != RegKind::l2) {
        throw std::runtime_error("gd config: regularizer must be none, l1 or l2");
    }
    reg.validate();
    if (max_denominator == 0) {
        throw std::runtime_error("gd config: max_denominator must be positive");
    }
}

ParameterVector network_parameters(const Network& net) {
    const Trainable plan(net);
    return plan.initial_parameters(net);
}

ParameterVector backward(const Network& net, const TokenSeq& tokens) {
    const Trainable plan(net);
    ParameterVector params = plan.initial_parameters(net);
    ParameterVector grads;
    grads.weight_count = params.weight_count;
    grads.values.assign(params.values.size(), 0.0);
    // Bits = nats / ln 2: scale the nats gradient accordingly.
    plan.sequence_nats(params, encode_tokens(net.alphabet, tokens), 1.0 / kLn2, &grads.values);
    return grads;
}

ParameterVector backward_corpus(const Network& net, const Corpus& corpus) {
    const Trainable plan(net);
    ParameterVector params = plan.initial_parameters(net);
    ParameterVector grads;
    grads.weight_count = params.weight_count;
    grads.values.assign(params.values.size(), 0.0);
    for (const auto& entry : corpus.sequences) {
        plan.sequence_nats(params, encode_tokens(net.alphabet, entry.tokens), to_double(entry.weight) / kLn2,
                           &grads.values);
    }
    return grads;
}

GdResult train(const Network& net, const Corpus& train_corpus, const GdConfig& config) {
    config.validate();
    const Trainable plan(net);
    ParameterVector params = plan.initial_parameters(net);
    const std::size_t n = params.values.size();

    std::vector<std::vector<std::int32_t>> sequences;
    std::vector<double> weights;
    sequences.reserve(train_corpus.sequences.size());
    for (const auto& entry : train_corpus.sequences) {
        sequences.push_back(encode_tokens(net.alphabet, entry.tokens));
        weights.push_back(to_double(entry.weight));
    }

    std::vector<double> m(n, 0.0), v(n, 0.0), grad(n, 0.0);
    GdResult result;
    result.trace.reserve(static_cast<std::size_t>(config.epochs) + 1);

    auto reg_term = [&](const std::vector<double>& p) {
        double sum = 0.0;
        if (config.reg.kind == RegKind::l1) {
            for (const double x : p) {
                sum += std::fabs(x);
            }
        } else if (config.reg.kind == RegKind::l2) {
            for (const double x : p) {
                sum += x * x;
            }
        }
        return config.reg.lambda * sum;
    };

    for (int epoch = 1; epoch <= config.epochs; ++epoch) {
        std::fill(grad.begin(), grad.end(), 0.0);
        double ce_nats = 0.0;
        for (std::size_t i = 0; i < sequences.size(); ++i) {
            ce_nats += weights[i] * plan.sequence_nats(params, sequences[i], weights[i], &grad);
        }
        const double reg_value = reg_term(params.values);
        const double total_nats = ce_nats + reg_value;
        if (!std::isfinite(total_nats)) {
            throw std::runtime_error("divergence");
        }
        if (config.reg.kind == RegKind::l1) {
            for (std::size_t i = 0; i < n; ++i) {
                const double x = params.values[i];
                grad[i] += config.reg.lambda * (x > 0.0 ? 1.0 : x < 0.0 ? -1.0 : 0.0);
            }
        } else if (config.reg.kind == RegKind::l2) {
            for (std::size_t i = 0; i < n; ++i) {
                grad[i] += config.reg.lambda * 2.0 * params.values[i];
            }
        }
        const double bc1 = 1.0 - std::pow(config.beta1, epoch);
        const double bc2 = 1.0 - std::pow(config.beta2, epoch);
        for (std::size_t i = 0; i < n; ++i) {
            m[i] = config.beta1 * m[i] + (1.0 - config.beta1) * grad[i];
            v[i] = config.beta2 * v[i] + (1.0 - config.beta2) * grad[i] * grad[i];
            const double m_hat = m[i] / bc1;
            const double v_hat = v[i] / bc2;
            params.values[i] -= config.learning_rate * m_hat / (std::sqrt(v_hat) + config.epsilon);
        }
        result.trace.push_back({epoch, ce_nats / kLn2, reg_value, ce_nats / kLn2 + reg_value});
    }

    result.net = plan.realize(net, params, config.max_denominator);
    return result;
}

BitLength gd_approx_h(const Network& net) {
    BitLength bits = 0;
    for (const auto& conn : net.connections) {
        bits += encode_fraction_length(conn.weight);
    }
    for (const auto& unit : net.units) {
        if (unit.role != UnitRole::input) {
            bits += encode_fraction_length(unit.bias);
        }
    }
    return bits;
}

Network rationalize_network(const Network& net, std::uint64_t max_denominator) {
    Network out = net;
    for (auto& conn : out.connections) {
        conn.weight = rational_from_double(to_double(conn.weight), max_denominator);
    }
    for (auto& unit : out.units) {
        if (unit.role != UnitRole::input) {
            unit.bias = rational_from_double(to_double(unit.bias), max_denominator);
        }
    }
    return out;
}

}  // namespace mdlrnn
