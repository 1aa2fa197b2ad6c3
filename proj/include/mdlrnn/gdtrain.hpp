#pragma once

#include "mdlrnn/evaluation.hpp"
#include "mdlrnn/grammar.hpp"
#include "mdlrnn/mdl.hpp"
#include "mdlrnn/network.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace mdlrnn {

struct GdConfig {
    double learning_rate = 1e-4;
    int epochs = 1000;
    RegularizerSpec reg;  // none / l1 / l2 only
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
    std::uint64_t max_denominator = 1'000'000;  // re-rationalization cap

    void validate() const;
};

// Flat parameter vector: all connection weights in canonical connection
// order, then all non-input unit biases in canonical unit order.
struct ParameterVector {
    std::vector<double> values;
    std::size_t weight_count = 0;  // biases follow
};

ParameterVector network_parameters(const Network& net);

// Gradient of the teacher-forced sequence description length (bits) with
// respect to every weight and bias, by full-unroll reverse mode. Throws
// "non-differentiable activation" when the network uses step/floor/mod/abs.
ParameterVector backward(const Network& net, const TokenSeq& tokens);

// Gradient of summed sequence bits over a corpus (weights applied).
ParameterVector backward_corpus(const Network& net, const Corpus& corpus);

struct GdEpochStats {
    int epoch = 0;
    double ce_bits = 0.0;
    double reg_term = 0.0;
    double total = 0.0;
};

struct GdResult {
    Network net;  // weights re-rationalized under the denominator cap
    std::vector<GdEpochStats> trace;
};

// Full-batch adaptive-moment training of CE (natural log internally) plus
// lambda * L1 or L2. Throws "divergence" if the loss leaves the finite range.
GdResult train(const Network& net, const Corpus& train_corpus, const GdConfig& config);

// Approximate |H| of a trained network: fraction-code length of every weight
// and non-input bias (architecture is fixed under gradient training).
BitLength gd_approx_h(const Network& net);

// Continued-fraction re-rationalization of all weights and biases.
Network rationalize_network(const Network& net, std::uint64_t max_denominator);

}  // namespace mdlrnn
