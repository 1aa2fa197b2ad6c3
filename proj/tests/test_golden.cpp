#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "mdlrnn/evaluation.hpp"
#include "mdlrnn/evaluator.hpp"
#include "mdlrnn/tasks.hpp"

using namespace mdlrnn;

TEST_CASE("exact goldens match the grammar distribution everywhere") {
    for (const auto& name : task_names()) {
        CAPTURE(name);
        const auto task = get_task(name);
        const auto net = build_golden(task);
        const auto report = verify_distribution(net, task.spec, task.verify_max_len, 1e-9);
        CAPTURE(report.max_deviation);
        CAPTURE(report.worst_prefix);
        CAPTURE(report.worst_symbol);
        CHECK(report.pass);
    }
}

TEST_CASE("differentiable goldens are near-exact") {
    for (const auto& name : {"anbn", "anbncn", "dyck1"}) {
        CAPTURE(name);
        const auto task = get_task(name);
        const auto net = build_golden_diff(task);
        for (const auto& unit : net.units) {
            CHECK(activation_differentiable(unit.activation));
        }
        const auto report = verify_distribution(net, task.spec, task.verify_max_len, 1e-4);
        CAPTURE(report.max_deviation);
        CAPTURE(report.worst_prefix);
        CHECK(report.pass);
    }
}

TEST_CASE("uniform predictor fails verification on anbn") {
    const auto task = get_task("anbn");
    Network uniform = make_network_shell(task.spec.alphabet(), task.spec.eos, OutputTransform::softmax);
    const auto report = verify_distribution(uniform, task.spec, 12, 1e-9);
    CHECK(!report.pass);
    CHECK(report.max_deviation >= 0.2);
    // P(a | "a") is 0.7 against the uniform 1/3.
    CHECK(report.worst_prefix.size() <= 1);
}

TEST_CASE("golden test scores sit on the analytic optimum") {
    for (const auto& name : task_names()) {
        CAPTURE(name);
        const auto task = get_task(name);
        const auto net = build_golden(task);
        Corpus train;
        TestSetLimit limit;
        if (task.spec.parametric) {
            limit.n_range = {1, 1020};
        } else {
            limit = task_test_limit(task, nullptr);
        }
        const auto test = enumerate_test_set(task.spec, limit);
        const double optimal = optimal_score_bits(test);
        const auto dh = dh_score(net, test);
        CHECK(!dh.smoothed);
        CHECK(dh.bits == doctest::Approx(optimal).epsilon(1e-6));
    }
}

TEST_CASE("golden activations and unit kinds stay inside the task palette") {
    for (const auto& name : task_names()) {
        const auto task = get_task(name);
        const auto net = build_golden(task);
        for (const auto& unit : net.units) {
            if (unit.role == UnitRole::input) {
                continue;
            }
            const bool act_ok = std::find(task.allowed_activations.begin(), task.allowed_activations.end(),
                                          unit.activation) != task.allowed_activations.end();
            CAPTURE(name);
            CAPTURE(unit.id);
            CHECK(act_ok);
            const bool kind_ok = std::find(task.allowed_unit_kinds.begin(), task.allowed_unit_kinds.end(), unit.kind) !=
                                 task.allowed_unit_kinds.end();
            CHECK(kind_ok);
        }
    }
}

TEST_CASE("training corpora stay within the exact-arithmetic range of the stack goldens") {
    // Base-3 / base-4 stack registers lose integer exactness past 2^53; the
    // shipped corpus seeds must stay far below that.
    auto max_depth = [](const TokenSeq& s, const Symbol& open1, const Symbol& open2, const Symbol& close1, const Symbol& close2) {
        int depth = 0, peak = 0;
        for (const auto& t : s) {
            if (t == open1 || t == open2) {
                peak = std::max(peak, ++depth);
            } else if (t == close1 || t == close2) {
                --depth;
            }
        }
        return peak;
    };
    {
        const auto task = get_task("dyck2");
        const auto corpus = sample_corpus(task.spec, 500, 100);
        int peak = 0;
        for (const auto& entry : corpus.sequences) {
            peak = std::max(peak, max_depth(entry.tokens, "[", "(", "]", ")"));
        }
        CHECK(peak <= 33);  // 3^33 < 2^53
    }
    {
        const auto task = get_task("arithmetic");
        const auto corpus = sample_corpus(task.spec, 500, 100);
        int peak = 0;
        for (const auto& entry : corpus.sequences) {
            peak = std::max(peak, max_depth(entry.tokens, "(", "(", ")", ")"));
        }
        CHECK(peak <= 26);  // 4^26 < 2^53
    }
}
