#pragma once

#include "mdlrnn/grammar.hpp"
#include "mdlrnn/network.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace mdlrnn {

// Zero probabilities are lifted to this value before taking logs, so scores
// that would be infinite become large but finite.
inline constexpr double kSmoothEps = 1e-10;

// Immutable evaluation plan for one network: units in topological order of
// forward edges, with weights lowered to doubles. Many evaluators may share
// one compiled network concurrently.
class CompiledNetwork {
public:
    // reverse_ties flips the tie-breaking order of the topological sort;
    // results must not depend on it (exercised by tests).
    explicit CompiledNetwork(const Network& net, bool reverse_ties = false);

    std::size_t unit_count() const { return kinds_.size(); }
    std::size_t input_base() const { return 0; }
    std::size_t start_slot() const { return alphabet_size_; }
    std::size_t output_arity() const { return alphabet_size_ + 1; }
    OutputTransform transform() const { return transform_; }
    std::size_t alphabet_size() const { return alphabet_size_; }

private:
    friend class NetworkEvaluator;
    struct Incoming {
        std::uint32_t source;
        double weight;
        bool recurrent;
    };
    std::size_t alphabet_size_;
    OutputTransform transform_;
    std::vector<std::uint32_t> eval_order_;               // positions of non-input units
    std::vector<UnitKind> kinds_;                         // per position
    std::vector<Activation> activations_;                 // per position
    std::vector<double> biases_;                          // per position
    std::vector<std::vector<Incoming>> incoming_;         // per position
    std::vector<std::uint32_t> output_positions_;         // alphabet order + eos
};

// Stateful teacher-forced stepping over a compiled network.
class NetworkEvaluator {
public:
    explicit NetworkEvaluator(const CompiledNetwork& compiled);

    void reset();

    // Feeds one input (slot over alphabet + start marker) and returns the
    // output distribution over alphabet + eos.
    const std::vector<double>& step(std::size_t input_slot);

    const std::vector<double>& state() const { return values_; }
    void set_state(const std::vector<double>& state);

    // Surprisal in bits of a token-id sequence with eos appended, starting
    // from the current state with the given first input slot.
    double sequence_bits(const std::vector<std::int32_t>& token_ids, bool* smoothed);

private:
    const CompiledNetwork* compiled_;
    std::vector<double> values_;       // post-activation, previous step
    std::vector<double> next_values_;  // scratch
    std::vector<double> distribution_;
};

// --- Spec-level operations -------------------------------------------------

// One step from an explicit previous state; returns (distribution, new state).
std::pair<std::vector<double>, std::vector<double>> forward_step(const Network& net,
                                                                 std::size_t input_slot,
                                                                 const std::vector<double>& state);

// Teacher-forced surprisal of a token sequence in bits (eos step included).
// Throws "unknown symbol" for tokens outside the network alphabet.
double sequence_surprisal(const Network& net, const TokenSeq& tokens, bool* smoothed = nullptr);

struct VerifyReport {
    bool pass = false;
    double max_deviation = 0.0;
    TokenSeq worst_prefix;
    Symbol worst_symbol;
    std::size_t prefixes_checked = 0;
};

// Compares the network's next-symbol distribution against the grammar's true
// conditional on every prefix of every language member up to max_len.
VerifyReport verify_distribution(const Network& net, const LanguageSpec& spec, int max_len, double tol);

// Token ids for fast repeated evaluation (ids index the network alphabet).
std::vector<std::int32_t> encode_tokens(const std::vector<Symbol>& alphabet, const TokenSeq& tokens);

}  // namespace mdlrnn
