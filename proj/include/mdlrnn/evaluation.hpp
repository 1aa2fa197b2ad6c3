#pragma once

#include "mdlrnn/evaluator.hpp"
#include "mdlrnn/grammar.hpp"
#include "mdlrnn/mdl.hpp"
#include "mdlrnn/network.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace mdlrnn {

// Corpus lowered to token ids and double weights for repeated evaluation.
struct EncodedCorpus {
    std::vector<std::vector<std::int32_t>> sequences;
    std::vector<double> weights;

    static EncodedCorpus build(const std::vector<Symbol>& alphabet, const Corpus& corpus);
};

struct DhResult {
    double bits = 0.0;
    bool smoothed = false;
};

// Weighted teacher-forced surprisal over a corpus, with 1e-10 smoothing of
// exact zero target probabilities.
DhResult dh_score(const Network& net, const Corpus& corpus);
DhResult dh_score_encoded(const CompiledNetwork& compiled, const EncodedCorpus& corpus);

// (score - optimal) / optimal * 100; positive = underfit.
double delta_pct(double score_bits, double optimal_bits);

struct ScoreReport {
    BitLength h_bits = 0;
    double l1 = 0.0;
    double l2 = 0.0;
    double dh_train = 0.0;
    double dh_test = 0.0;
    double optimal_train = 0.0;
    double optimal_test = 0.0;
    double delta_train_pct = 0.0;
    double delta_test_pct = 0.0;
    bool smoothed_train = false;
    bool smoothed_test = false;

    static std::string csv_header();
    std::string csv_row(const std::string& task, const std::string& regularizer) const;
    std::string json_record(const std::string& task, const std::string& regularizer) const;
};

// |H|, L1(lambda=1), L2(lambda=1), train/test |D:H| and both deltas.
ScoreReport full_report(const Network& net, const Corpus& train, const Corpus& test, const EncodingContext& ctx);

}  // namespace mdlrnn
