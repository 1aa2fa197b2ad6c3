#include "mdlrnn/evaluation.hpp"

#include <json.hpp>

#include <sstream>
#include <stdexcept>

namespace mdlrnn {

EncodedCorpus EncodedCorpus::build(const std::vector<Symbol>& alphabet, const Corpus& corpus) {
    EncodedCorpus out;
    out.sequences.reserve(corpus.sequences.size());
    out.weights.reserve(corpus.sequences.size());
    for (const auto& entry : corpus.sequences) {
        out.sequences.push_back(encode_tokens(alphabet, entry.tokens));
        out.weights.push_back(to_double(entry.weight));
    }
    return out;
}

DhResult dh_score_encoded(const CompiledNetwork& compiled, const EncodedCorpus& corpus) {
    if (corpus.sequences.empty()) {
        throw std::runtime_error("dh_score: empty corpus");
    }
    NetworkEvaluator eval(compiled);
    DhResult result;
    for (std::size_t i = 0; i < corpus.sequences.size(); ++i) {
        eval.reset();
        result.bits += corpus.weights[i] * eval.sequence_bits(corpus.sequences[i], &result.smoothed);
    }
    return result;
}

DhResult dh_score(const Network& net, const Corpus& corpus) {
    CompiledNetwork compiled(net);
    return dh_score_encoded(compiled, EncodedCorpus::build(net.alphabet, corpus));
}

double delta_pct(double score_bits, double optimal_bits) {
    if (optimal_bits <= 0.0) {
        throw std::runtime_error("delta_pct: optimal score must be positive");
    }
    return (score_bits - optimal_bits) / optimal_bits * 100.0;
}

std::string ScoreReport::csv_header() {
    return "task,regularizer,h_bits,l1,l2,dh_train,dh_test,delta_train_pct,delta_test_pct,smoothed_train,smoothed_test";
}

namespace {

std::string fmt(double v) {
    std::ostringstream out;
    out.precision(17);
    out << v;
    return out.str();
}

}  // namespace

std::string ScoreReport::csv_row(const std::string& task, const std::string& regularizer) const {
    std::ostringstream out;
    out << task << ',' << regularizer << ',' << h_bits << ',' << fmt(l1) << ',' << fmt(l2) << ',' << fmt(dh_train) << ','
        << fmt(dh_test) << ',' << fmt(delta_train_pct) << ',' << fmt(delta_test_pct) << ',' << (smoothed_train ? 1 : 0)
        << ',' << (smoothed_test ? 1 : 0);
    return out.str();
}

std::string ScoreReport::json_record(const std::string& task, const std::string& regularizer) const {
    nlohmann::ordered_json j;
    j["task"] = task;
    j["regularizer"] = regularizer;
    j["h_bits"] = h_bits;
    j["l1"] = l1;
    j["l2"] = l2;
    j["dh_train"] = dh_train;
    j["dh_test"] = dh_test;
    j["optimal_train"] = optimal_train;
    j["optimal_test"] = optimal_test;
    j["delta_train_pct"] = delta_train_pct;
    j["delta_test_pct"] = delta_test_pct;
    j["smoothed_train"] = smoothed_train;
    j["smoothed_test"] = smoothed_test;
    return j.dump(2);
}

ScoreReport full_report(const Network& net, const Corpus& train, const Corpus& test, const EncodingContext& ctx) {
    ScoreReport report;
    report.h_bits = encode_network(net, ctx);
    report.l1 = l1_term(net, 1.0);
    report.l2 = l2_term(net, 1.0);
    const CompiledNetwork compiled(net);
    const DhResult train_dh = dh_score_encoded(compiled, EncodedCorpus::build(net.alphabet, train));
    const DhResult test_dh = dh_score_encoded(compiled, EncodedCorpus::build(net.alphabet, test));
    report.dh_train = train_dh.bits;
    report.dh_test = test_dh.bits;
    report.smoothed_train = train_dh.smoothed;
    report.smoothed_test = test_dh.smoothed;
    report.optimal_train = optimal_score_bits(train);
    report.optimal_test = optimal_score_bits(test);
    report.delta_train_pct = delta_pct(report.dh_train, report.optimal_train);
    report.delta_test_pct = delta_pct(report.dh_test, report.optimal_test);
    return report;
}

}  // namespace mdlrnn
