// Command-line front end: corpus generation, golden verification, experiment
// runs, result tables and scatter plots.

#include <CLI11.hpp>

#include "mdlrnn/experiment.hpp"
#include "mdlrnn/tasks.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>

using namespace mdlrnn;

namespace {

void write_text(const std::string& path, const std::string& content) {
    std::ofstream out(path);
    if (!out) {
        throw std::runtime_error("cannot write '" + path + "'");
    }
    out << content;
}

ExperimentConfig make_config(const std::string& config_path, const std::string& preset, const std::string& task,
                             const std::vector<std::string>& overrides) {
    ExperimentConfig config;
    if (!config_path.empty()) {
        config = load_config_file(config_path);
    } else if (preset == "paper") {
        config = ExperimentConfig::paper_preset(task.empty() ? "anbn" : task);
    } else {
        config = ExperimentConfig::desk_preset(task.empty() ? "anbn" : task);
    }
    if (!task.empty()) {
        config.task = task;
    }
    for (const auto& assignment : overrides) {
        apply_config_override(config, assignment);
    }
    if (config.data_dir.empty()) {
        config.data_dir = default_data_dir();
    }
    return config;
}

int cmd_gen_corpus(const std::string& task_name, const std::string& grammar_file, int count, std::uint64_t seed,
                   const std::string& out_path) {
    LanguageSpec spec;
    if (!grammar_file.empty()) {
        spec.name = std::filesystem::path(grammar_file).stem().string();
        spec.pcfg = load_grammar_file(grammar_file);
        spec.validate();
    } else {
        spec = get_task(task_name).spec;
    }
    const Corpus corpus = sample_corpus(spec, count, seed);
    save_corpus_file(corpus, out_path);
    std::cout << "wrote " << corpus.sequences.size() << " sequences to " << out_path << "\n";
    return 0;
}

int cmd_verify_golden(const std::string& task_name, const std::string& golden_file, int max_len, double tol,
                      const std::string& data_dir, bool diff) {
    const auto task = get_task(task_name);
    const std::string path = !golden_file.empty()
                                 ? golden_file
                                 : golden_path(data_dir.empty() ? default_data_dir() : data_dir, task,
                                               diff ? Regime::gradient_descent : Regime::ga_architecture);
    const Network net = load_network_file(path);
    const int depth = max_len > 0 ? max_len : task.verify_max_len;
    const auto report = verify_distribution(net, task.spec, depth, tol);
    std::cout << "golden: " << path << "\n"
              << "prefixes checked: " << report.prefixes_checked << "\n"
              << "max deviation: " << report.max_deviation << "\n";
    if (!report.pass) {
        std::cout << "worst prefix:";
        for (const auto& tok : report.worst_prefix) {
            std::cout << ' ' << tok;
        }
        std::cout << "\nworst symbol: " << report.worst_symbol << "\n";
    }
    std::cout << (report.pass ? "PASS" : "FAIL") << " (tolerance " << tol << ")\n";
    return report.pass ? 0 : 1;
}

int cmd_run(const ExperimentConfig& config, bool resume) {
    const auto result = run_experiment(config, resume);
    std::cout << "bundle: " << result.bundle_dir << "\n";
    std::cout << ScoreReport::csv_header() << "\n";
    std::cout << result.report.csv_row(config.task, reg_kind_name(config.reg.kind)) << "\n";
    std::cout << "delta_test_pct: " << result.report.delta_test_pct << "\n";
    return 0;
}

int cmd_table(const std::vector<std::string>& bundles, const std::string& out_base) {
    const auto rows = load_bundles(bundles);
    const std::string csv = make_table_csv(rows);
    const std::string text = make_table_text(rows);
    if (out_base.empty()) {
        std::cout << text;
    } else {
        write_text(out_base + ".csv", csv);
        write_text(out_base + ".txt", text);
        std::cout << "wrote " << out_base << ".csv and " << out_base << ".txt\n";
    }
    return 0;
}

int cmd_plot(const std::vector<std::string>& bundles, const std::string& out_path) {
    const auto rows = load_bundles(bundles);
    write_text(out_path, make_scatter_svg(rows));
    std::cout << "wrote " << out_path << "\n";
    return 0;
}

int cmd_write_golden(const std::string& out_dir) {
    std::filesystem::create_directories(out_dir + "/golden");
    std::filesystem::create_directories(out_dir + "/grammars");
    for (const auto& name : task_names()) {
        const auto task = get_task(name);
        save_network_file(build_golden(task), out_dir + "/golden/" + name + ".net");
        if (task.has_differentiable_golden) {
            save_network_file(build_golden_diff(task), out_dir + "/golden/" + name + "_diff.net");
        }
        if (task.spec.pcfg) {
            write_text(out_dir + "/grammars/" + name + ".grammar", grammar_to_text(*task.spec.pcfg));
        }
        std::cout << "wrote golden for " << name << "\n";
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"MDL regularization experiments on formal languages"};
    app.require_subcommand(1);

    auto* gen = app.add_subcommand("gen-corpus", "Sample a training corpus from a task grammar");
    std::string gen_task = "anbn", gen_grammar, gen_out = "corpus.txt";
    int gen_count = 500;
    std::uint64_t gen_seed = 100;
    gen->add_option("--task", gen_task, "Task name");
    gen->add_option("--grammar-file", gen_grammar, "Load a grammar file instead of a built-in task");
    gen->add_option("--count", gen_count, "Number of strings");
    gen->add_option("--seed", gen_seed, "Corpus seed");
    gen->add_option("--out", gen_out, "Output corpus file");

    auto* verify = app.add_subcommand("verify-golden", "Check a golden network against its grammar");
    std::string ver_task = "anbn", ver_file, ver_data;
    int ver_len = 0;
    double ver_tol = 1e-6;
    bool ver_diff = false;
    verify->add_option("--task", ver_task, "Task name");
    verify->add_option("--golden", ver_file, "Golden network file (defaults to the shipped one)");
    verify->add_option("--max-len", ver_len, "Verification depth (default: task setting)");
    verify->add_option("--tol", ver_tol, "Maximum allowed deviation");
    verify->add_option("--data-dir", ver_data, "Data directory");
    verify->add_flag("--diff", ver_diff, "Verify the differentiable golden");

    std::string run_config, run_preset = "desk", run_task;
    std::vector<std::string> run_sets;
    auto* runcmd = app.add_subcommand("run", "Execute one experiment and write a bundle");
    runcmd->add_option("--config", run_config, "Config file (key = value lines)");
    runcmd->add_option("--preset", run_preset, "desk or paper preset")->check(CLI::IsMember({"desk", "paper"}));
    runcmd->add_option("--task", run_task, "Task name");
    runcmd->add_option("--set", run_sets, "Override, e.g. --set regularizer=l2");

    std::string res_config;
    std::vector<std::string> res_sets;
    auto* rescmd = app.add_subcommand("resume", "Resume a checkpointed run");
    rescmd->add_option("--config", res_config, "Config file of the interrupted run")->required();
    rescmd->add_option("--set", res_sets, "Override, e.g. --set generations=4000");

    auto* table = app.add_subcommand("table", "Aggregate bundles into a results table");
    std::vector<std::string> table_bundles;
    std::string table_out;
    table->add_option("--bundle", table_bundles, "Bundle directory (repeatable)")->required();
    table->add_option("--out", table_out, "Output base name (writes .csv and .txt)");

    auto* plot = app.add_subcommand("plot", "Render train/test deviation scatter panels");
    std::vector<std::string> plot_bundles;
    std::string plot_out = "scatter.svg";
    plot->add_option("--bundle", plot_bundles, "Bundle directory (repeatable)")->required();
    plot->add_option("--out", plot_out, "Output SVG file");

    auto* wg = app.add_subcommand("write-golden", "Regenerate the shipped golden network and grammar files");
    std::string wg_out = default_data_dir();
    wg->add_option("--out-dir", wg_out, "Data directory to write into");

    CLI11_PARSE(app, argc, argv);

    try {
        if (gen->parsed()) {
            return cmd_gen_corpus(gen_task, gen_grammar, gen_count, gen_seed, gen_out);
        }
        if (verify->parsed()) {
            return cmd_verify_golden(ver_task, ver_file, ver_len, ver_tol, ver_data, ver_diff);
        }
        if (runcmd->parsed()) {
            return cmd_run(make_config(run_config, run_preset, run_task, run_sets), false);
        }
        if (rescmd->parsed()) {
            return cmd_run(make_config(res_config, "desk", "", res_sets), true);
        }
        if (table->parsed()) {
            return cmd_table(table_bundles, table_out);
        }
        if (plot->parsed()) {
            return cmd_plot(plot_bundles, plot_out);
        }
        if (wg->parsed()) {
            return cmd_write_golden(wg_out);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
