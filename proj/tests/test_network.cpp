#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "mdlrnn/evaluator.hpp"
#include "mdlrnn/network.hpp"
#include "mdlrnn/tasks.hpp"

using namespace mdlrnn;

namespace {

// One symbol "x" plus eos; a single input wired straight to the x-output.
Network identity_net() {
    Network net = make_network_shell({"x"}, "<eos>", OutputTransform::normalize);
    add_connection(net, input_id(net, "x"), output_id(net, "x"), ConnKind::forward, 1);
    return net;
}

}  // namespace

TEST_CASE("identity path concentrates the distribution") {
    const auto net = identity_net();
    std::vector<double> state(net.units.size(), 0.0);
    const auto [dist, new_state] = forward_step(net, 0, state);
    CHECK(dist[0] == doctest::Approx(1.0));
    CHECK(dist[1] == doctest::Approx(0.0));
    CHECK(new_state.size() == state.size());
}

TEST_CASE("softmax over equal pre-activations is uniform") {
    Network net = make_network_shell({"x"}, "<eos>", OutputTransform::softmax);
    std::vector<double> state(net.units.size(), 0.0);
    const auto [dist, unused] = forward_step(net, 0, state);
    CHECK(dist[0] == doctest::Approx(0.5));
    CHECK(dist[1] == doctest::Approx(0.5));
}

TEST_CASE("distributions are normalized and nonnegative") {
    for (const auto& name : task_names()) {
        const auto task = get_task(name);
        const auto net = build_golden(task);
        CompiledNetwork compiled(net);
        NetworkEvaluator eval(compiled);
        Rng rng(5);
        for (int trial = 0; trial < 5; ++trial) {
            eval.reset();
            const auto s = sample_string(task.spec, rng);
            std::size_t slot = compiled.start_slot();
            const auto ids = encode_tokens(net.alphabet, s);
            for (std::size_t t = 0; t <= ids.size() && t < 40; ++t) {
                const auto& dist = eval.step(slot);
                double sum = 0.0;
                for (const double v : dist) {
                    CHECK(v >= 0.0);
                    sum += v;
                }
                CHECK(sum == doctest::Approx(1.0).epsilon(1e-9));
                if (t < ids.size()) {
                    slot = static_cast<std::size_t>(ids[t]);
                }
            }
        }
    }
}

TEST_CASE("hand-built counter after aab") {
    const auto task = get_task("anbn");
    const auto net = build_golden(task);
    CompiledNetwork compiled(net);
    NetworkEvaluator eval(compiled);
    eval.step(compiled.start_slot());
    eval.step(0);  // a
    eval.step(0);  // a
    eval.step(1);  // b
    // Counter unit holds #a - #b = 1; hidden units follow the inputs in
    // canonical order, and the counter has the lowest hidden id.
    CHECK(eval.state()[net.input_count()] == doctest::Approx(1.0));
}

TEST_CASE("sequence surprisal") {
    SUBCASE("uniform half predictor") {
        // One symbol + eos under softmax with no connections: every step is 1 bit.
        Network net = make_network_shell({"x"}, "<eos>", OutputTransform::softmax);
        const TokenSeq s = {"x", "x", "x"};  // 4 prediction steps with eos
        CHECK(sequence_surprisal(net, s) == doctest::Approx(4.0));
    }
    SUBCASE("golden anbn on ab") {
        const auto net = build_golden(get_task("anbn"));
        CHECK(sequence_surprisal(net, {"a", "b"}) == doctest::Approx(-std::log2(0.3)).epsilon(1e-9));
    }
    SUBCASE("empty string is a single eos step") {
        const auto net = build_golden(get_task("dyck1"));
        CHECK(sequence_surprisal(net, {}) == doctest::Approx(-std::log2(2.0 / 3.0)).epsilon(1e-9));
    }
    SUBCASE("unknown symbol") {
        const auto net = build_golden(get_task("anbn"));
        CHECK_THROWS_WITH(sequence_surprisal(net, {"z"}), doctest::Contains("unknown symbol"));
    }
}

TEST_CASE("state passing: prefix plus continuation equals whole string") {
    const auto task = get_task("dyck2");
    const auto net = build_golden(task);
    CompiledNetwork compiled(net);
    const TokenSeq s = {"[", "(", ")", "]", "[", "]"};
    const auto ids = encode_tokens(net.alphabet, s);

    NetworkEvaluator whole(compiled);
    bool smoothed = false;
    const double all_bits = whole.sequence_bits(ids, &smoothed);

    NetworkEvaluator part(compiled);
    double bits = 0.0;
    std::size_t slot = compiled.start_slot();
    for (std::size_t t = 0; t < 3; ++t) {
        const auto& dist = part.step(slot);
        bits -= std::log2(dist[static_cast<std::size_t>(ids[t])]);
        slot = static_cast<std::size_t>(ids[t]);
    }
    const auto saved = part.state();
    NetworkEvaluator rest(compiled);
    rest.set_state(saved);
    for (std::size_t t = 3; t <= ids.size(); ++t) {
        const auto& dist = rest.step(slot);
        const std::size_t target = t < ids.size() ? static_cast<std::size_t>(ids[t]) : compiled.alphabet_size();
        bits -= std::log2(dist[target]);
        if (t < ids.size()) {
            slot = static_cast<std::size_t>(ids[t]);
        }
    }
    CHECK(bits == doctest::Approx(all_bits).epsilon(1e-12));
}

TEST_CASE("topological evaluation is order independent") {
    for (const auto& name : task_names()) {
        const auto task = get_task(name);
        const auto net = build_golden(task);
        CompiledNetwork forward_order(net, false);
        CompiledNetwork reversed_order(net, true);
        NetworkEvaluator a(forward_order), b(reversed_order);
        Rng rng(11);
        const auto s = sample_string(task.spec, rng);
        const auto ids = encode_tokens(net.alphabet, s);
        std::size_t slot = forward_order.start_slot();
        for (std::size_t t = 0; t <= ids.size() && t < 30; ++t) {
            const auto da = a.step(slot);
            const auto db = b.step(slot);
            REQUIRE(da.size() == db.size());
            for (std::size_t i = 0; i < da.size(); ++i) {
                CHECK(da[i] == db[i]);
            }
            if (t < ids.size()) {
                slot = static_cast<std::size_t>(ids[t]);
            }
        }
    }
}

TEST_CASE("cycle detection") {
    Network net = make_network_shell({"x"}, "<eos>", OutputTransform::softmax);
    const int h1 = add_hidden_unit(net, UnitKind::summation, Activation::linear, 0);
    const int h2 = add_hidden_unit(net, UnitKind::summation, Activation::linear, 0);
    add_connection(net, h1, h2, ConnKind::forward, 1);
    add_connection(net, h2, h1, ConnKind::forward, 1);
    CHECK_THROWS_WITH(net.validate(), doctest::Contains("cycle in forward graph"));
    // The same pair of edges is fine when one is recurrent.
    net.connections.back().kind = ConnKind::recurrent;
    CHECK_NOTHROW(net.validate());
}

TEST_CASE("validation rejects malformed networks") {
    Network net = make_network_shell({"x"}, "<eos>", OutputTransform::softmax);
    SUBCASE("incoming edge into an input unit") {
        add_connection(net, output_id(net, "x"), input_id(net, "x"), ConnKind::recurrent, 1);
        CHECK_THROWS(net.validate());
    }
    SUBCASE("duplicate connection triple") {
        add_connection(net, input_id(net, "x"), output_id(net, "x"), ConnKind::forward, 1);
        add_connection(net, input_id(net, "x"), output_id(net, "x"), ConnKind::forward, make_rational(1, 2));
        CHECK_THROWS(net.validate());
    }
    SUBCASE("unit cap") {
        add_hidden_unit(net, UnitKind::summation, Activation::linear, 0);
        CHECK_THROWS(net.validate(4));
        CHECK_NOTHROW(net.validate(5));
    }
}

TEST_CASE("network file round trip") {
    for (const auto& name : task_names()) {
        const auto net = build_golden(get_task(name));
        const auto text = network_to_text(net);
        const auto parsed = parse_network_text(text);
        CHECK(network_to_text(parsed) == text);
        CHECK(parsed == net);
    }
}
