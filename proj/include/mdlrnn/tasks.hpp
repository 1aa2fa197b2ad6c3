#pragma once

#include "mdlrnn/grammar.hpp"
#include "mdlrnn/mdl.hpp"
#include "mdlrnn/network.hpp"

#include <optional>
#include <string>
#include <vector>

namespace mdlrnn {

// One of the six benchmark languages, with its search palette and test-set
// bounds.
struct TaskInfo {
    std::string name;
    LanguageSpec spec;
    std::vector<Activation> allowed_activations;
    std::vector<UnitKind> allowed_unit_kinds;
    std::optional<int> test_max_len;  // PCFG tasks: exhaustive test bound
    int test_extra_n = 1000;          // parametric tasks: n in 1 .. n_max_train + extra
    int verify_max_len = 10;          // default golden-verification depth
    bool has_differentiable_golden = false;
};

const std::vector<std::string>& task_names();
TaskInfo get_task(const std::string& name);

EncodingContext task_encoding(const TaskInfo& task);

// Test-set limit per the task rule; parametric tasks read n_max from the
// training corpus.
TestSetLimit task_test_limit(const TaskInfo& task, const Corpus* train);

// Hand-built networks whose output distribution matches the grammar exactly.
Network build_golden(const TaskInfo& task);

// Smooth variants (differentiable activations only) for gradient training;
// available for anbn, anbncn and dyck1.
Network build_golden_diff(const TaskInfo& task);

}  // namespace mdlrnn
