#include "mdlrnn/tasks.hpp"

#include <algorithm>
#include <stdexcept>

namespace mdlrnn {

namespace {

Rational r(long long num, long long den = 1) {
    return make_rational(num, den);
}

Pcfg dyck1_grammar() {
    Pcfg g;
    g.nonterminals = {"S"};
    g.terminals = {"[", "]"};
    g.start = "S";
    g.rules = {
        {"S", {"[", "S", "]", "S"}, r(1, 3)},
        {"S", {}, r(2, 3)},
    };
    return g;
}

Pcfg dyck2_grammar() {
    Pcfg g;
    g.nonterminals = {"S"};
    g.terminals = {"[", "]", "(", ")"};
    g.start = "S";
    g.rules = {
        {"S", {"[", "S", "]", "S"}, r(1, 6)},
        {"S", {"(", "S", ")", "S"}, r(1, 6)},
        {"S", {}, r(2, 3)},
    };
    return g;
}

Pcfg arithmetic_grammar() {
    Pcfg g;
    g.nonterminals = {"S", "E"};
    g.terminals = {"(", "+", ")", "1"};
    g.start = "S";
    g.rules = {
        {"S", {"(", "E", "+", "E", ")"}, r(1)},
        {"E", {"1"}, r(67, 100)},
        {"E", {"(", "E", "+", "E", ")"}, r(33, 100)},
    };
    return g;
}

Pcfg toy_english_grammar() {
    Pcfg g;
    g.nonterminals = {"S", "NP", "RC", "VP", "N", "Vtr", "Vi", "Vcp"};
    g.terminals = {"dogs", "chase", "sleep", "think", "that"};
    g.start = "S";
    g.rules = {
        {"S", {"NP", "VP"}, r(1)},
        {"NP", {"N"}, r(3, 4)},
        {"NP", {"N", "RC"}, r(1, 4)},
        {"RC", {"NP", "Vtr"}, r(1)},
        {"VP", {"Vtr", "NP"}, r(17, 50)},
        {"VP", {"Vi"}, r(33, 100)},
        {"VP", {"Vcp", "S"}, r(33, 100)},
        {"N", {"dogs"}, r(1)},
        {"Vtr", {"chase"}, r(1)},
        {"Vi", {"sleep"}, r(1)},
        {"Vcp", {"think", "that"}, r(1)},
    };
    return g;
}

}  // namespace

const std::vector<std::string>& task_names() {
    static const std::vector<std::string> names = {"anbn", "anbncn", "dyck1", "dyck2", "arithmetic", "toy_english"};
    return names;
}

TaskInfo get_task(const std::string& name) {
    TaskInfo task;
    task.name = name;
    task.spec.name = name;
    const std::vector<Activation> base = {Activation::linear, Activation::relu, Activation::tanh};
    task.allowed_unit_kinds = {UnitKind::summation};
    if (name == "anbn" || name == "anbncn") {
        task.spec.parametric = ParametricLanguage{name == "anbn" ? ParametricKind::anbn : ParametricKind::anbncn, r(3, 10)};
        task.allowed_activations = base;
        task.allowed_activations.push_back(Activation::sigmoid);
        task.allowed_activations.push_back(Activation::unsigned_step);
        task.verify_max_len = 12;
        task.has_differentiable_golden = true;
    } else if (name == "dyck1") {
        task.spec.pcfg = dyck1_grammar();
        task.spec.max_sample_len = 200;
        task.allowed_activations = base;
        task.allowed_activations.push_back(Activation::sigmoid);
        task.test_max_len = 10;
        task.verify_max_len = 10;
        task.has_differentiable_golden = true;
    } else if (name == "dyck2") {
        task.spec.pcfg = dyck2_grammar();
        task.spec.max_sample_len = 200;
        task.allowed_activations = base;
        task.allowed_activations.push_back(Activation::floor);
        task.allowed_activations.push_back(Activation::mod3);
        task.allowed_activations.push_back(Activation::unsigned_step);
        task.allowed_unit_kinds.push_back(UnitKind::multiplication);
        task.test_max_len = 10;
        task.verify_max_len = 10;
    } else if (name == "arithmetic") {
        task.spec.pcfg = arithmetic_grammar();
        task.allowed_activations = base;
        task.allowed_activations.push_back(Activation::floor);
        task.allowed_activations.push_back(Activation::mod4);
        task.allowed_activations.push_back(Activation::abs);
        task.allowed_activations.push_back(Activation::unsigned_step);
        task.allowed_unit_kinds.push_back(UnitKind::multiplication);
        task.test_max_len = 40;
        task.verify_max_len = 21;
    } else if (name == "toy_english") {
        task.spec.pcfg = toy_english_grammar();
        task.spec.max_sample_len = 200;
        task.allowed_activations = base;
        task.allowed_activations.push_back(Activation::unsigned_step);
        task.allowed_unit_kinds.push_back(UnitKind::multiplication);
        task.test_max_len = 20;
        task.verify_max_len = 12;
    } else {
        throw std::runtime_error("unknown task '" + name + "'");
    }
    task.spec.validate();
    return task;
}

EncodingContext task_encoding(const TaskInfo& task) {
    return EncodingContext::for_palette(task.allowed_activations.size());
}

TestSetLimit task_test_limit(const TaskInfo& task, const Corpus* train) {
    TestSetLimit limit;
    if (task.spec.parametric) {
        if (!train) {
            throw std::runtime_error("task_test_limit: parametric task needs the training corpus");
        }
        limit.n_range = {1, max_parametric_n(task.spec, *train) + task.test_extra_n};
    } else {
        limit.max_len = task.test_max_len;
    }
    return limit;
}

// ---------------------------------------------------------------------------
// Golden networks
// ---------------------------------------------------------------------------

namespace {

// Counter network: tracks #a - #b, emits the geometric continue/stop split
// while reading a's, then forces b's until the counter drains.
Network golden_anbn() {
    Network net = make_network_shell({"a", "b"}, "<eos>", OutputTransform::normalize);
    const int in_a = input_id(net, "a");
    const int in_b = input_id(net, "b");
    const int in_start = input_id(net, kStartMarker);
    const int out_a = output_id(net, "a");
    const int out_b = output_id(net, "b");
    const int out_eos = output_id(net, net.eos);

    const int counter = add_hidden_unit(net, UnitKind::summation, Activation::linear, 0);
    const int positive = add_hidden_unit(net, UnitKind::summation, Activation::unsigned_step, 0);
    const int b_run = add_hidden_unit(net, UnitKind::summation, Activation::unsigned_step, r(-3, 2));

    add_connection(net, in_a, counter, ConnKind::forward, 1);
    add_connection(net, in_b, counter, ConnKind::forward, -1);
    add_connection(net, counter, counter, ConnKind::recurrent, 1);
    add_connection(net, counter, positive, ConnKind::forward, 1);
    add_connection(net, in_b, b_run, ConnKind::forward, 1);
    add_connection(net, positive, b_run, ConnKind::forward, 1);

    add_connection(net, in_a, out_a, ConnKind::forward, r(7, 10));
    add_connection(net, in_start, out_a, ConnKind::forward, 1);
    add_connection(net, in_a, out_b, ConnKind::forward, r(3, 10));
    add_connection(net, b_run, out_b, ConnKind::forward, 1);
    add_connection(net, in_b, out_eos, ConnKind::forward, 1);
    add_connection(net, positive, out_eos, ConnKind::forward, -1);

    Unit* eos_unit = nullptr;
    for (auto& unit : net.units) {
        if (unit.id == out_eos) {
            eos_unit = &unit;
        }
    }
    eos_unit->activation = Activation::unsigned_step;
    eos_unit->bias = r(-1, 2);
    return net;
}

// Same language with sigmoid gates and softmax outputs; every activation is
// differentiable so the network can seed gradient training.
Network golden_anbn_diff() {
    Network net = make_network_shell({"a", "b"}, "<eos>", OutputTransform::softmax);
    const int in_a = input_id(net, "a");
    const int in_b = input_id(net, "b");
    const int in_start = input_id(net, kStartMarker);
    const int out_a = output_id(net, "a");
    const int out_b = output_id(net, "b");
    const int out_eos = output_id(net, net.eos);

    const int counter = add_hidden_unit(net, UnitKind::summation, Activation::linear, 0);
    const int gate = add_hidden_unit(net, UnitKind::summation, Activation::sigmoid, r(-20));

    add_connection(net, in_a, counter, ConnKind::forward, 1);
    add_connection(net, in_b, counter, ConnKind::forward, -1);
    add_connection(net, counter, counter, ConnKind::recurrent, 1);
    add_connection(net, counter, gate, ConnKind::forward, r(40));

    // log-odds 61/72 ~ ln(7/3): continue/stop split for the a-run.
    for (auto& unit : net.units) {
        if (unit.id == out_a) {
            unit.bias = r(61, 72);
        } else if (unit.id == out_b) {
            unit.bias = r(-20);
        }
    }
    add_connection(net, in_start, out_a, ConnKind::forward, r(20));
    add_connection(net, in_b, out_a, ConnKind::forward, r(-20));
    add_connection(net, in_b, out_b, ConnKind::forward, r(20));
    add_connection(net, gate, out_b, ConnKind::forward, r(20));
    add_connection(net, in_b, out_eos, ConnKind::forward, r(20));
    add_connection(net, gate, out_eos, ConnKind::forward, r(-20));
    return net;
}

Network golden_anbncn() {
    Network net = make_network_shell({"a", "b", "c"}, "<eos>", OutputTransform::normalize);
    const int in_a = input_id(net, "a");
    const int in_b = input_id(net, "b");
    const int in_c = input_id(net, "c");
    const int in_start = input_id(net, kStartMarker);
    const int out_a = output_id(net, "a");
    const int out_b = output_id(net, "b");
    const int out_c = output_id(net, "c");
    const int out_eos = output_id(net, net.eos);

    const int count_ab = add_hidden_unit(net, UnitKind::summation, Activation::linear, 0);
    const int count_ac = add_hidden_unit(net, UnitKind::summation, Activation::linear, 0);
    const int ab_pos = add_hidden_unit(net, UnitKind::summation, Activation::unsigned_step, 0);
    const int ac_pos = add_hidden_unit(net, UnitKind::summation, Activation::unsigned_step, 0);
    const int b_more = add_hidden_unit(net, UnitKind::summation, Activation::unsigned_step, r(-3, 2));
    const int b_done = add_hidden_unit(net, UnitKind::summation, Activation::unsigned_step, r(-1, 2));
    const int c_more = add_hidden_unit(net, UnitKind::summation, Activation::unsigned_step, r(-3, 2));
    const int c_done = add_hidden_unit(net, UnitKind::summation, Activation::unsigned_step, r(-1, 2));

    add_connection(net, in_a, count_ab, ConnKind::forward, 1);
    add_connection(net, in_b, count_ab, ConnKind::forward, -1);
    add_connection(net, count_ab, count_ab, ConnKind::recurrent, 1);
    add_connection(net, in_a, count_ac, ConnKind::forward, 1);
    add_connection(net, in_c, count_ac, ConnKind::forward, -1);
    add_connection(net, count_ac, count_ac, ConnKind::recurrent, 1);
    add_connection(net, count_ab, ab_pos, ConnKind::forward, 1);
    add_connection(net, count_ac, ac_pos, ConnKind::forward, 1);

    add_connection(net, in_b, b_more, ConnKind::forward, 1);
    add_connection(net, ab_pos, b_more, ConnKind::forward, 1);
    add_connection(net, in_b, b_done, ConnKind::forward, 1);
    add_connection(net, ab_pos, b_done, ConnKind::forward, -1);
    add_connection(net, in_c, c_more, ConnKind::forward, 1);
    add_connection(net, ac_pos, c_more, ConnKind::forward, 1);
    add_connection(net, in_c, c_done, ConnKind::forward, 1);
    add_connection(net, ac_pos, c_done, ConnKind::forward, -1);

    add_connection(net, in_a, out_a, ConnKind::forward, r(7, 10));
    add_connection(net, in_start, out_a, ConnKind::forward, 1);
    add_connection(net, in_a, out_b, ConnKind::forward, r(3, 10));
    add_connection(net, b_more, out_b, ConnKind::forward, 1);
    add_connection(net, b_done, out_c, ConnKind::forward, 1);
    add_connection(net, c_more, out_c, ConnKind::forward, 1);
    add_connection(net, c_done, out_eos, ConnKind::forward, 1);
    return net;
}

Network golden_anbncn_diff() {
    Network net = make_network_shell({"a", "b", "c"}, "<eos>", OutputTransform::softmax);
    const int in_a = input_id(net, "a");
    const int in_b = input_id(net, "b");
    const int in_c = input_id(net, "c");
    const int in_start = input_id(net, kStartMarker);
    const int out_a = output_id(net, "a");
    const int out_b = output_id(net, "b");
    const int out_c = output_id(net, "c");
    const int out_eos = output_id(net, net.eos);

    const int count_ab = add_hidden_unit(net, UnitKind::summation, Activation::linear, 0);
    const int count_ac = add_hidden_unit(net, UnitKind::summation, Activation::linear, 0);
    const int gate_ab = add_hidden_unit(net, UnitKind::summation, Activation::sigmoid, r(-20));
    const int gate_ac = add_hidden_unit(net, UnitKind::summation, Activation::sigmoid, r(-20));

    add_connection(net, in_a, count_ab, ConnKind::forward, 1);
    add_connection(net, in_b, count_ab, ConnKind::forward, -1);
    add_connection(net, count_ab, count_ab, ConnKind::recurrent, 1);
    add_connection(net, in_a, count_ac, ConnKind::forward, 1);
    add_connection(net, in_c, count_ac, ConnKind::forward, -1);
    add_connection(net, count_ac, count_ac, ConnKind::recurrent, 1);
    add_connection(net, count_ab, gate_ab, ConnKind::forward, r(40));
    add_connection(net, count_ac, gate_ac, ConnKind::forward, r(40));

    for (auto& unit : net.units) {
        if (unit.id == out_a) {
            unit.bias = r(61, 72);
        } else if (unit.id == out_b || unit.id == out_c) {
            unit.bias = r(-20);
        }
    }
    add_connection(net, in_start, out_a, ConnKind::forward, r(20));
    add_connection(net, in_b, out_a, ConnKind::forward, r(-20));
    add_connection(net, in_c, out_a, ConnKind::forward, r(-20));
    add_connection(net, in_b, out_b, ConnKind::forward, r(20));
    add_connection(net, gate_ab, out_b, ConnKind::forward, r(20));
    add_connection(net, in_b, out_c, ConnKind::forward, r(20));
    add_connection(net, gate_ab, out_c, ConnKind::forward, r(-20));
    add_connection(net, in_c, out_c, ConnKind::forward, r(20));
    add_connection(net, gate_ac, out_c, ConnKind::forward, r(20));
    add_connection(net, in_c, out_eos, ConnKind::forward, r(20));
    add_connection(net, gate_ac, out_eos, ConnKind::forward, r(-20));
    return net;
}

// Bracket-depth counter; min(depth, 1) built from relu keeps every activation
// differentiable, so this single golden serves both search and gradient runs.
Network golden_dyck1() {
    Network net = make_network_shell({"[", "]"}, "<eos>", OutputTransform::normalize);
    const int in_open = input_id(net, "[");
    const int in_close = input_id(net, "]");
    const int out_open = output_id(net, "[");
    const int out_close = output_id(net, "]");
    const int out_eos = output_id(net, net.eos);

    const int depth = add_hidden_unit(net, UnitKind::summation, Activation::linear, 0);
    // relu threshold at 1/2 keeps integer depths away from the kink.
    const int excess = add_hidden_unit(net, UnitKind::summation, Activation::relu, r(-1, 2));
    const int clamped = add_hidden_unit(net, UnitKind::summation, Activation::linear, 0);  // 1/2 * min(depth, 1)

    add_connection(net, in_open, depth, ConnKind::forward, 1);
    add_connection(net, in_close, depth, ConnKind::forward, -1);
    add_connection(net, depth, depth, ConnKind::recurrent, 1);
    add_connection(net, depth, excess, ConnKind::forward, 1);
    add_connection(net, depth, clamped, ConnKind::forward, 1);
    add_connection(net, excess, clamped, ConnKind::forward, -1);

    for (auto& unit : net.units) {
        if (unit.id == out_open) {
            unit.bias = r(1, 3);
        } else if (unit.id == out_eos) {
            unit.bias = r(2, 3);
        }
    }
    add_connection(net, clamped, out_close, ConnKind::forward, r(4, 3));
    add_connection(net, clamped, out_eos, ConnKind::forward, r(-4, 3));
    return net;
}

// Softmax variant of the depth counter with a saturated sigmoid gate; the
// smooth surface keeps finite differences clean for gradient training.
// log-odds 61/88 ~ ln 2 sets the 1/3 : 2/3 split.
Network golden_dyck1_diff() {
    Network net = make_network_shell({"[", "]"}, "<eos>", OutputTransform::softmax);
    const int in_open = input_id(net, "[");
    const int in_close = input_id(net, "]");
    const int out_close = output_id(net, "]");
    const int out_eos = output_id(net, net.eos);

    const int depth = add_hidden_unit(net, UnitKind::summation, Activation::linear, 0);
    const int gate = add_hidden_unit(net, UnitKind::summation, Activation::sigmoid, r(-20));

    add_connection(net, in_open, depth, ConnKind::forward, 1);
    add_connection(net, in_close, depth, ConnKind::forward, -1);
    add_connection(net, depth, depth, ConnKind::recurrent, 1);
    add_connection(net, depth, gate, ConnKind::forward, r(40));

    for (auto& unit : net.units) {
        if (unit.id == out_close) {
            unit.bias = r(-20);
        } else if (unit.id == out_eos) {
            unit.bias = r(61, 88);
        }
    }
    add_connection(net, gate, out_close, ConnKind::forward, r(1821, 88));   // 20 + 61/88
    add_connection(net, gate, out_eos, ConnKind::forward, r(-1821, 88));
    return net;
}

// Base-3 stack register: digit 1 for '[', 2 for '('; push is 3s+digit, pop is
// floor(s/3), top-of-stack is mod3. The floor unit carries bias 1/6 so the
// 1/3-weighted read never rounds below an exact multiple.
Network golden_dyck2() {
    Network net = make_network_shell({"[", "]", "(", ")"}, "<eos>", OutputTransform::normalize);
    const int in_sq_open = input_id(net, "[");
    const int in_sq_close = input_id(net, "]");
    const int in_rd_open = input_id(net, "(");
    const int in_rd_close = input_id(net, ")");
    const int out_sq_open = output_id(net, "[");
    const int out_sq_close = output_id(net, "]");
    const int out_rd_open = output_id(net, "(");
    const int out_rd_close = output_id(net, ")");
    const int out_eos = output_id(net, net.eos);

    const int open = add_hidden_unit(net, UnitKind::summation, Activation::linear, 0);
    const int close = add_hidden_unit(net, UnitKind::summation, Activation::linear, 0);
    const int popped = add_hidden_unit(net, UnitKind::summation, Activation::floor, r(1, 6));
    const int push_part = add_hidden_unit(net, UnitKind::multiplication, Activation::linear, 1);
    const int pop_part = add_hidden_unit(net, UnitKind::multiplication, Activation::linear, 1);
    const int stack = add_hidden_unit(net, UnitKind::summation, Activation::linear, 0);
    const int top = add_hidden_unit(net, UnitKind::summation, Activation::mod3, 0);
    const int top_ge1 = add_hidden_unit(net, UnitKind::summation, Activation::unsigned_step, r(-1, 2));
    const int top_ge2 = add_hidden_unit(net, UnitKind::summation, Activation::unsigned_step, r(-3, 2));
    const int nonempty = add_hidden_unit(net, UnitKind::summation, Activation::unsigned_step, 0);

    add_connection(net, in_sq_open, open, ConnKind::forward, 1);
    add_connection(net, in_rd_open, open, ConnKind::forward, 1);
    add_connection(net, in_sq_close, close, ConnKind::forward, 1);
    add_connection(net, in_rd_close, close, ConnKind::forward, 1);
    add_connection(net, stack, popped, ConnKind::recurrent, r(1, 3));
    add_connection(net, stack, push_part, ConnKind::recurrent, 3);
    add_connection(net, open, push_part, ConnKind::forward, 1);
    add_connection(net, popped, pop_part, ConnKind::forward, 1);
    add_connection(net, close, pop_part, ConnKind::forward, 1);
    add_connection(net, push_part, stack, ConnKind::forward, 1);
    add_connection(net, in_sq_open, stack, ConnKind::forward, 1);
    add_connection(net, in_rd_open, stack, ConnKind::forward, 2);
    add_connection(net, pop_part, stack, ConnKind::forward, 1);
    add_connection(net, stack, top, ConnKind::forward, 1);
    add_connection(net, top, top_ge1, ConnKind::forward, 1);
    add_connection(net, top, top_ge2, ConnKind::forward, 1);
    add_connection(net, stack, nonempty, ConnKind::forward, 1);

    for (auto& unit : net.units) {
        if (unit.id == out_sq_open || unit.id == out_rd_open) {
            unit.bias = r(1, 6);
        } else if (unit.id == out_eos) {
            unit.bias = r(2, 3);
        }
    }
    add_connection(net, top_ge1, out_sq_close, ConnKind::forward, r(2, 3));
    add_connection(net, top_ge2, out_sq_close, ConnKind::forward, r(-2, 3));
    add_connection(net, top_ge2, out_rd_close, ConnKind::forward, r(2, 3));
    add_connection(net, nonempty, out_eos, ConnKind::forward, r(-2, 3));
    return net;
}

// Base-4 stack over argument positions: '(' pushes 1, '+' bumps the top digit
// to 2, ')' pops. After '1' or ')' the continuation is read off the top digit.
Network golden_arithmetic() {
    Network net = make_network_shell({"(", "+", ")", "1"}, "<eos>", OutputTransform::normalize);
    const int in_open = input_id(net, "(");
    const int in_plus = input_id(net, "+");
    const int in_close = input_id(net, ")");
    const int in_one = input_id(net, "1");
    const int in_start = input_id(net, kStartMarker);
    const int out_open = output_id(net, "(");
    const int out_plus = output_id(net, "+");
    const int out_close = output_id(net, ")");
    const int out_one = output_id(net, "1");
    const int out_eos = output_id(net, net.eos);

    const int popped = add_hidden_unit(net, UnitKind::summation, Activation::floor, 0);
    const int push_part = add_hidden_unit(net, UnitKind::multiplication, Activation::linear, 1);
    const int bump_part = add_hidden_unit(net, UnitKind::multiplication, Activation::linear, 1);
    const int hold_part = add_hidden_unit(net, UnitKind::multiplication, Activation::linear, 1);
    const int pop_part = add_hidden_unit(net, UnitKind::multiplication, Activation::linear, 1);
    const int stack = add_hidden_unit(net, UnitKind::summation, Activation::linear, 0);
    const int top = add_hidden_unit(net, UnitKind::summation, Activation::mod4, 0);
    const int top_ge1 = add_hidden_unit(net, UnitKind::summation, Activation::unsigned_step, r(-1, 2));
    const int top_ge2 = add_hidden_unit(net, UnitKind::summation, Activation::unsigned_step, r(-3, 2));
    const int top_is1 = add_hidden_unit(net, UnitKind::summation, Activation::linear, 0);
    const int nonempty = add_hidden_unit(net, UnitKind::summation, Activation::unsigned_step, 0);
    const int empty = add_hidden_unit(net, UnitKind::summation, Activation::linear, 1);
    const int gen_mode = add_hidden_unit(net, UnitKind::summation, Activation::linear, 0);
    const int det_mode = add_hidden_unit(net, UnitKind::summation, Activation::linear, 0);

    add_connection(net, stack, popped, ConnKind::recurrent, r(1, 4));
    add_connection(net, stack, push_part, ConnKind::recurrent, 4);
    add_connection(net, in_open, push_part, ConnKind::forward, 1);
    add_connection(net, stack, bump_part, ConnKind::recurrent, 1);
    add_connection(net, in_plus, bump_part, ConnKind::forward, 1);
    add_connection(net, stack, hold_part, ConnKind::recurrent, 1);
    add_connection(net, in_one, hold_part, ConnKind::forward, 1);
    add_connection(net, popped, pop_part, ConnKind::forward, 1);
    add_connection(net, in_close, pop_part, ConnKind::forward, 1);
    add_connection(net, push_part, stack, ConnKind::forward, 1);
    add_connection(net, in_open, stack, ConnKind::forward, 1);
    add_connection(net, bump_part, stack, ConnKind::forward, 1);
    add_connection(net, in_plus, stack, ConnKind::forward, 1);
    add_connection(net, hold_part, stack, ConnKind::forward, 1);
    add_connection(net, pop_part, stack, ConnKind::forward, 1);
    add_connection(net, stack, top, ConnKind::forward, 1);
    add_connection(net, top, top_ge1, ConnKind::forward, 1);
    add_connection(net, top, top_ge2, ConnKind::forward, 1);
    add_connection(net, top_ge1, top_is1, ConnKind::forward, 1);
    add_connection(net, top_ge2, top_is1, ConnKind::forward, -1);
    add_connection(net, stack, nonempty, ConnKind::forward, 1);
    add_connection(net, nonempty, empty, ConnKind::forward, -1);
    add_connection(net, in_open, gen_mode, ConnKind::forward, 1);
    add_connection(net, in_plus, gen_mode, ConnKind::forward, 1);
    add_connection(net, in_one, det_mode, ConnKind::forward, 1);
    add_connection(net, in_close, det_mode, ConnKind::forward, 1);

    add_connection(net, gen_mode, out_open, ConnKind::forward, r(33, 100));
    add_connection(net, in_start, out_open, ConnKind::forward, 1);
    add_connection(net, gen_mode, out_one, ConnKind::forward, r(67, 100));

    // Deterministic continuations as products with the mode gate.
    Unit* plus_unit = nullptr;
    Unit* close_unit = nullptr;
    Unit* eos_unit = nullptr;
    for (auto& unit : net.units) {
        if (unit.id == out_plus) plus_unit = &unit;
        if (unit.id == out_close) close_unit = &unit;
        if (unit.id == out_eos) eos_unit = &unit;
    }
    plus_unit->kind = UnitKind::multiplication;
    plus_unit->bias = 1;
    close_unit->kind = UnitKind::multiplication;
    close_unit->bias = 1;
    eos_unit->kind = UnitKind::multiplication;
    eos_unit->bias = 1;
    add_connection(net, det_mode, out_plus, ConnKind::forward, 1);
    add_connection(net, top_is1, out_plus, ConnKind::forward, 1);
    add_connection(net, det_mode, out_close, ConnKind::forward, 1);
    add_connection(net, top_ge2, out_close, ConnKind::forward, 1);
    add_connection(net, det_mode, out_eos, ConnKind::forward, 1);
    add_connection(net, empty, out_eos, ConnKind::forward, 1);
    return net;
}

// Pushdown over pending relative clauses (counter) plus a flag for the
// still-unrealized main verb phrase.
Network golden_toy_english() {
    Network net = make_network_shell({"dogs", "chase", "sleep", "think", "that"}, "<eos>", OutputTransform::normalize);
    const int in_d = input_id(net, "dogs");
    const int in_c = input_id(net, "chase");
    const int in_s = input_id(net, "sleep");
    const int in_t1 = input_id(net, "think");
    const int in_t2 = input_id(net, "that");
    const int in_start = input_id(net, kStartMarker);
    const int out_d = output_id(net, "dogs");
    const int out_c = output_id(net, "chase");
    const int out_s = output_id(net, "sleep");
    const int out_t1 = output_id(net, "think");
    const int out_t2 = output_id(net, "that");
    const int out_eos = output_id(net, net.eos);

    const int had_rc_prev = add_hidden_unit(net, UnitKind::summation, Activation::unsigned_step, 0);   // [k_prev > 0]
    const int no_rc_prev = add_hidden_unit(net, UnitKind::summation, Activation::linear, 1);           // 1 - had_rc_prev
    const int rc_open = add_hidden_unit(net, UnitKind::multiplication, Activation::linear, 1);         // dogs after dogs
    const int rc_close = add_hidden_unit(net, UnitKind::multiplication, Activation::linear, 1);        // chase closing an RC
    const int vp_chase = add_hidden_unit(net, UnitKind::multiplication, Activation::linear, 1);        // chase as main verb
    const int rc_count = add_hidden_unit(net, UnitKind::summation, Activation::linear, 0);
    const int keep_gate = add_hidden_unit(net, UnitKind::summation, Activation::linear, 1);
    const int kept_vp = add_hidden_unit(net, UnitKind::multiplication, Activation::linear, 1);
    const int vp_pending = add_hidden_unit(net, UnitKind::summation, Activation::linear, 0);
    const int rc_now = add_hidden_unit(net, UnitKind::summation, Activation::unsigned_step, 0);        // [k > 0]
    const int no_rc_now = add_hidden_unit(net, UnitKind::summation, Activation::linear, 1);
    const int choice_open = add_hidden_unit(net, UnitKind::multiplication, Activation::linear, 1);     // no RC pending and VP pending
    const int no_vp = add_hidden_unit(net, UnitKind::summation, Activation::linear, 1);
    const int sentence_done = add_hidden_unit(net, UnitKind::multiplication, Activation::linear, 1);
    const int resolve_mass = add_hidden_unit(net, UnitKind::summation, Activation::linear, 0);
    const int chase_prob = add_hidden_unit(net, UnitKind::summation, Activation::linear, 0);
    const int vp_choice_mass = add_hidden_unit(net, UnitKind::multiplication, Activation::linear, 1);

    add_connection(net, rc_count, had_rc_prev, ConnKind::recurrent, 1);
    add_connection(net, had_rc_prev, no_rc_prev, ConnKind::forward, -1);
    add_connection(net, in_d, rc_open, ConnKind::forward, 1);
    add_connection(net, in_d, rc_open, ConnKind::recurrent, 1);
    add_connection(net, in_c, rc_close, ConnKind::forward, 1);
    add_connection(net, had_rc_prev, rc_close, ConnKind::forward, 1);
    add_connection(net, in_c, vp_chase, ConnKind::forward, 1);
    add_connection(net, no_rc_prev, vp_chase, ConnKind::forward, 1);
    add_connection(net, rc_count, rc_count, ConnKind::recurrent, 1);
    add_connection(net, rc_open, rc_count, ConnKind::forward, 1);
    add_connection(net, rc_close, rc_count, ConnKind::forward, -1);
    add_connection(net, in_s, keep_gate, ConnKind::forward, -1);
    add_connection(net, in_t1, keep_gate, ConnKind::forward, -1);
    add_connection(net, vp_chase, keep_gate, ConnKind::forward, -1);
    add_connection(net, vp_pending, kept_vp, ConnKind::recurrent, 1);
    add_connection(net, keep_gate, kept_vp, ConnKind::forward, 1);
    add_connection(net, in_t2, vp_pending, ConnKind::forward, 1);
    add_connection(net, in_start, vp_pending, ConnKind::forward, 1);
    add_connection(net, kept_vp, vp_pending, ConnKind::forward, 1);
    add_connection(net, rc_count, rc_now, ConnKind::forward, 1);
    add_connection(net, rc_now, no_rc_now, ConnKind::forward, -1);
    add_connection(net, no_rc_now, choice_open, ConnKind::forward, 1);
    add_connection(net, vp_pending, choice_open, ConnKind::forward, 1);
    add_connection(net, vp_pending, no_vp, ConnKind::forward, -1);
    add_connection(net, no_rc_now, sentence_done, ConnKind::forward, 1);
    add_connection(net, no_vp, sentence_done, ConnKind::forward, 1);
    add_connection(net, in_s, resolve_mass, ConnKind::forward, 1);
    add_connection(net, rc_close, resolve_mass, ConnKind::forward, 1);
    add_connection(net, in_d, resolve_mass, ConnKind::forward, r(3, 4));
    add_connection(net, rc_now, chase_prob, ConnKind::forward, 1);
    add_connection(net, choice_open, chase_prob, ConnKind::forward, r(17, 50));
    add_connection(net, resolve_mass, vp_choice_mass, ConnKind::forward, 1);
    add_connection(net, choice_open, vp_choice_mass, ConnKind::forward, 1);

    add_connection(net, in_t2, out_d, ConnKind::forward, 1);
    add_connection(net, in_start, out_d, ConnKind::forward, 1);
    add_connection(net, vp_chase, out_d, ConnKind::forward, 1);
    add_connection(net, in_d, out_d, ConnKind::forward, r(1, 4));
    add_connection(net, vp_choice_mass, out_s, ConnKind::forward, r(33, 100));
    add_connection(net, vp_choice_mass, out_t1, ConnKind::forward, r(33, 100));
    add_connection(net, in_t1, out_t2, ConnKind::forward, 1);

    Unit* chase_out = nullptr;
    Unit* eos_out = nullptr;
    for (auto& unit : net.units) {
        if (unit.id == out_c) chase_out = &unit;
        if (unit.id == out_eos) eos_out = &unit;
    }
    chase_out->kind = UnitKind::multiplication;
    chase_out->bias = 1;
    eos_out->kind = UnitKind::multiplication;
    eos_out->bias = 1;
    add_connection(net, resolve_mass, out_c, ConnKind::forward, 1);
    add_connection(net, chase_prob, out_c, ConnKind::forward, 1);
    add_connection(net, resolve_mass, out_eos, ConnKind::forward, 1);
    add_connection(net, sentence_done, out_eos, ConnKind::forward, 1);
    return net;
}

}  // namespace

Network build_golden(const TaskInfo& task) {
    Network net;
    if (task.name == "anbn") {
        net = golden_anbn();
    } else if (task.name == "anbncn") {
        net = golden_anbncn();
    } else if (task.name == "dyck1") {
        net = golden_dyck1();
    } else if (task.name == "dyck2") {
        net = golden_dyck2();
    } else if (task.name == "arithmetic") {
        net = golden_arithmetic();
    } else if (task.name == "toy_english") {
        net = golden_toy_english();
    } else {
        throw std::runtime_error("no golden network for task '" + task.name + "'");
    }
    net.validate();
    return net;
}

Network build_golden_diff(const TaskInfo& task) {
    Network net;
    if (task.name == "anbn") {
        net = golden_anbn_diff();
    } else if (task.name == "anbncn") {
        net = golden_anbncn_diff();
    } else if (task.name == "dyck1") {
        net = golden_dyck1_diff();
    } else {
        throw std::runtime_error("no differentiable golden network for task '" + task.name + "'");
    }
    net.validate();
    return net;
}

}  // namespace mdlrnn
