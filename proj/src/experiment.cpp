#include "mdlrnn/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <set>
#include <json.hpp>

#include <sstream>
#include <stdexcept>

namespace mdlrnn {

namespace {

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r\n");
    if (begin == std::string::npos) {
        return "";
    }
    const auto end = s.find_last_not_of(" \t\r\n");
    return s.substr(begin, end - begin + 1);
}

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open '" + path + "'");
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path);
    if (!out) {
        throw std::runtime_error("cannot write '" + path + "'");
    }
    out << content;
}

std::string fmt_full(double v) {
    std::ostringstream out;
    out.precision(17);
    out << v;
    return out.str();
}

std::string fmt_fixed(double v, int decimals) {
    std::ostringstream out;
    out << std::fixed << std::setprecision(decimals) << v;
    return out.str();
}

}  // namespace

const char* regime_name(Regime regime) {
    switch (regime) {
        case Regime::ga_architecture: return "ga_architecture";
        case Regime::ga_weights_only: return "ga_weights_only";
        case Regime::gradient_descent: return "gradient_descent";
    }
    return "?";
}

Regime regime_from_name(const std::string& name) {
    if (name == "ga_architecture") return Regime::ga_architecture;
    if (name == "ga_weights_only") return Regime::ga_weights_only;
    if (name == "gradient_descent") return Regime::gradient_descent;
    throw std::runtime_error("unknown regime '" + name + "'");
}

void ExperimentConfig::validate() const {
    get_task(task);  // throws for unknown names
    reg.validate();
    if (regime == Regime::gradient_descent) {
        if (reg.kind == RegKind::mdl || reg.kind == RegKind::none_with_h_limit) {
            throw std::runtime_error("gradient descent cannot optimize '" + std::string(reg_kind_name(reg.kind)) + "'");
        }
        const auto info = get_task(task);
        if (!info.has_differentiable_golden) {
            throw std::runtime_error("task '" + task + "' has no differentiable golden network");
        }
    } else {
        if (reg.kind == RegKind::none) {
            throw std::runtime_error("GA regimes require a complexity control: use none_h_limit instead of none");
        }
    }
    if (train_size < 1) {
        throw std::runtime_error("config: train_size must be >= 1");
    }
    if (h_limit_factor <= 0) {
        throw std::runtime_error("config: h_limit_factor must be positive");
    }
    if (output_dir.empty()) {
        throw std::runtime_error("config: output_dir required");
    }
}

std::string ExperimentConfig::to_text() const {
    std::ostringstream out;
    out << "task = " << task << '\n';
    out << "regime = " << regime_name(regime) << '\n';
    out << "regularizer = " << reg_kind_name(reg.kind) << '\n';
    out << "lambda = " << fmt_full(reg.lambda) << '\n';
    out << "h_limit_factor = " << fmt_full(h_limit_factor) << '\n';
    out << "islands = " << islands << '\n';
    out << "population = " << population << '\n';
    out << "generations = " << generations << '\n';
    out << "tournament_size = " << tournament_size << '\n';
    out << "elite_ratio = " << fmt_full(elite_ratio) << '\n';
    out << "mutation_prob = " << fmt_full(mutation_prob) << '\n';
    out << "crossover_prob = " << fmt_full(crossover_prob) << '\n';
    out << "migration_ratio = " << fmt_full(migration_ratio) << '\n';
    out << "migration_interval = " << migration_interval << '\n';
    out << "max_units = " << max_units << '\n';
    out << "golden_copies = " << golden_copies << '\n';
    out << "learning_rate = " << fmt_full(learning_rate) << '\n';
    out << "epochs = " << epochs << '\n';
    out << "train_size = " << train_size << '\n';
    out << "corpus_seed = " << corpus_seed << '\n';
    out << "experiment_seed = " << experiment_seed << '\n';
    out << "test_extra_n = " << test_extra_n << '\n';
    out << "output_dir = " << output_dir << '\n';
    out << "data_dir = " << data_dir << '\n';
    out << "gibbs_audit = " << (gibbs_audit ? 1 : 0) << '\n';
    out << "checkpoint_interval = " << checkpoint_interval << '\n';
    out << "threads = " << threads << '\n';
    out << "golden_verify_tol = " << fmt_full(golden_verify_tol) << '\n';
    return out.str();
}

ExperimentConfig ExperimentConfig::desk_preset(const std::string& task_name) {
    ExperimentConfig config;
    config.task = task_name;
    return config;
}

ExperimentConfig ExperimentConfig::paper_preset(const std::string& task_name) {
    ExperimentConfig config;
    config.task = task_name;
    config.islands = 500;
    config.population = 500;
    config.generations = 25000;
    config.migration_interval = 1000;
    return config;
}

void apply_config_override(ExperimentConfig& config, const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos) {
        throw std::runtime_error("config: expected key=value, got '" + assignment + "'");
    }
    const std::string key = trim(assignment.substr(0, eq));
    const std::string value = trim(assignment.substr(eq + 1));
    auto as_int = [&]() { return std::stoll(value); };
    auto as_double = [&]() { return std::stod(value); };
    if (key == "task") {
        config.task = value;
    } else if (key == "regime") {
        config.regime = regime_from_name(value);
    } else if (key == "regularizer") {
        config.reg.kind = reg_kind_from_name(value);
        config.reg.h_limit.reset();
    } else if (key == "lambda") {
        config.reg.lambda = as_double();
    } else if (key == "h_limit_factor") {
        config.h_limit_factor = as_double();
    } else if (key == "islands") {
        config.islands = static_cast<int>(as_int());
    } else if (key == "population") {
        config.population = static_cast<int>(as_int());
    } else if (key == "generations") {
        config.generations = static_cast<int>(as_int());
    } else if (key == "tournament_size") {
        config.tournament_size = static_cast<int>(as_int());
    } else if (key == "elite_ratio") {
        config.elite_ratio = as_double();
    } else if (key == "mutation_prob") {
        config.mutation_prob = as_double();
    } else if (key == "crossover_prob") {
        config.crossover_prob = as_double();
    } else if (key == "migration_ratio") {
        config.migration_ratio = as_double();
    } else if (key == "migration_interval") {
        config.migration_interval = static_cast<int>(as_int());
    } else if (key == "max_units") {
        config.max_units = static_cast<std::size_t>(as_int());
    } else if (key == "golden_copies") {
        config.golden_copies = static_cast<int>(as_int());
    } else if (key == "learning_rate") {
        config.learning_rate = as_double();
    } else if (key == "epochs") {
        config.epochs = static_cast<int>(as_int());
    } else if (key == "train_size") {
        config.train_size = static_cast<int>(as_int());
    } else if (key == "corpus_seed") {
        config.corpus_seed = static_cast<std::uint64_t>(as_int());
    } else if (key == "experiment_seed") {
        config.experiment_seed = static_cast<std::uint64_t>(as_int());
    } else if (key == "test_extra_n") {
        config.test_extra_n = static_cast<int>(as_int());
    } else if (key == "output_dir") {
        config.output_dir = value;
    } else if (key == "data_dir") {
        config.data_dir = value;
    } else if (key == "gibbs_audit") {
        config.gibbs_audit = value == "1" || value == "true";
    } else if (key == "checkpoint_interval") {
        config.checkpoint_interval = static_cast<int>(as_int());
    } else if (key == "threads") {
        config.threads = static_cast<int>(as_int());
    } else if (key == "golden_verify_tol") {
        config.golden_verify_tol = as_double();
    } else {
        throw std::runtime_error("config: unknown key '" + key + "'");
    }
}

ExperimentConfig parse_config_text(const std::string& text) {
    ExperimentConfig config;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        const auto hash = line.find('#');
        if (hash != std::string::npos) {
            line = line.substr(0, hash);
        }
        line = trim(line);
        if (line.empty()) {
            continue;
        }
        apply_config_override(config, line);
    }
    return config;
}

ExperimentConfig load_config_file(const std::string& path) {
    return parse_config_text(read_file(path));
}

std::string default_data_dir() {
#ifdef MDLRNN_DATA_DIR
    return MDLRNN_DATA_DIR;
#else
    return "data";
#endif
}

std::string golden_path(const std::string& data_dir, const TaskInfo& task, Regime regime) {
    const std::string dir = data_dir.empty() ? default_data_dir() : data_dir;
    const bool diff = regime == Regime::gradient_descent;
    return dir + "/golden/" + task.name + (diff ? "_diff" : "") + ".net";
}

std::uint64_t content_hash(const std::string& bytes) {
    std::uint64_t hash = 0xcbf29ce484222325ull;
    for (const unsigned char c : bytes) {
        hash ^= c;
        hash *= 0x100000001b3ull;
    }
    return hash;
}

namespace {

GaConfig build_ga_config(const ExperimentConfig& config, const TaskInfo& task, BitLength golden_h) {
    GaConfig ga;
    ga.islands = config.islands;
    ga.population = config.population;
    ga.generations = config.generations;
    ga.tournament_size = config.tournament_size;
    ga.elite_ratio = config.elite_ratio;
    ga.mutation_prob = config.mutation_prob;
    ga.crossover_prob = config.crossover_prob;
    ga.migration_ratio = config.migration_ratio;
    ga.migration_interval_generations = config.migration_interval;
    ga.max_units = config.max_units;
    ga.allowed_activations = task.allowed_activations;
    ga.allowed_unit_kinds = task.allowed_unit_kinds;
    ga.mode = config.regime == Regime::ga_weights_only ? GaMode::weights_only : GaMode::architecture;
    ga.reg = config.reg;
    if (ga.reg.kind == RegKind::none_with_h_limit && !ga.reg.h_limit) {
        ga.reg.h_limit = static_cast<BitLength>(std::llround(config.h_limit_factor * static_cast<double>(golden_h)));
    }
    ga.experiment_seed = config.experiment_seed;
    ga.golden_copies = config.golden_copies;
    ga.checkpoint_interval = config.checkpoint_interval;
    ga.threads = config.threads;
    return ga;
}

std::string ga_trace_csv(const std::vector<GenerationStats>& history) {
    std::ostringstream out;
    out << "island,generation,best_objective,best_h_bits,best_dh_train\n";
    for (const auto& row : history) {
        out << row.island << ',' << row.generation << ',' << fmt_full(row.best_objective) << ',' << row.best_h << ','
            << fmt_full(row.best_dh_train) << '\n';
    }
    return out.str();
}

std::string gd_trace_csv(const std::vector<GdEpochStats>& trace) {
    std::ostringstream out;
    out << "epoch,ce_bits,reg_term,total\n";
    for (const auto& row : trace) {
        out << row.epoch << ',' << fmt_full(row.ce_bits) << ',' << fmt_full(row.reg_term) << ',' << fmt_full(row.total)
            << '\n';
    }
    return out.str();
}

// A 1 - 1e-15 coverage range for the Gibbs audit of parametric tasks.
int gibbs_range(const Rational& p) {
    const double log_keep = std::log(to_double(1 - p));
    return static_cast<int>(std::ceil(std::log(1e-15) / log_keep));
}

}  // namespace

RunResult run_experiment(const ExperimentConfig& config, bool resume) {
    config.validate();
    const TaskInfo task = get_task(config.task);
    const EncodingContext encoding = task_encoding(task);

    const std::string golden_file = golden_path(config.data_dir, task, config.regime);
    const Network golden = load_network_file(golden_file);
    {
        const auto check = verify_distribution(golden, task.spec, task.verify_max_len, config.golden_verify_tol);
        if (!check.pass) {
            std::ostringstream msg;
            msg << "golden verification failed for '" << golden_file << "': max deviation " << check.max_deviation
                << " exceeds tolerance " << config.golden_verify_tol << " (corrupted golden file)";
            throw std::runtime_error(msg.str());
        }
    }

    Corpus train_corpus = sample_corpus(task.spec, config.train_size, config.corpus_seed);
    TaskInfo ranged = task;
    ranged.test_extra_n = config.test_extra_n;
    Corpus test = enumerate_test_set(task.spec, task_test_limit(ranged, &train_corpus));

    std::filesystem::create_directories(config.output_dir);
    const std::string bundle = config.output_dir;

    RunResult result;
    std::string trace_csv;
    const bool gd = config.regime == Regime::gradient_descent;

    if (gd) {
        GdConfig gd_config;
        gd_config.learning_rate = config.learning_rate;
        gd_config.epochs = config.epochs;
        gd_config.reg = config.reg;
        const GdResult trained = train(golden, train_corpus, gd_config);
        result.final_net = trained.net;
        trace_csv = gd_trace_csv(trained.trace);
    } else {
        const BitLength golden_h = encode_network(golden, encoding);
        const GaConfig ga = build_ga_config(config, task, golden_h);
        const EncodedCorpus encoded_train = EncodedCorpus::build(golden.alphabet, train_corpus);
        GibbsAudit audit;
        const GibbsAudit* audit_ptr = nullptr;
        if (config.gibbs_audit) {
            if (!task.spec.parametric) {
                throw std::runtime_error("gibbs_audit requires a parametric task (full-mass test range)");
            }
            TestSetLimit limit;
            limit.n_range = {1, gibbs_range(task.spec.parametric->p)};
            const Corpus audit_corpus = enumerate_test_set(task.spec, limit);
            audit.test = EncodedCorpus::build(golden.alphabet, audit_corpus);
            audit.optimal_bits = optimal_score_bits(audit_corpus);
            audit_ptr = &audit;
        }
        const std::string ckpt_dir = config.checkpoint_interval > 0 ? bundle + "/checkpoints" : "";
        const SearchResult search =
            evolve_archipelago(ga, golden, encoded_train, encoding, audit_ptr, ckpt_dir, resume);
        result.final_net = search.best.net;
        result.gibbs_min_margin = search.gibbs_min_margin;
        trace_csv = ga_trace_csv(search.history);
    }

    result.report = full_report(result.final_net, train_corpus, test, encoding);
    result.golden_report = full_report(golden, train_corpus, test, encoding);
    if (gd) {
        // Fixed architecture: |H| is approximated by the weight encoding.
        result.report.h_bits = gd_approx_h(result.final_net);
        result.golden_report.h_bits = gd_approx_h(golden);
    }
    result.bundle_dir = bundle;

    const std::string reg_label = reg_kind_name(config.reg.kind);
    save_network_file(result.final_net, bundle + "/final_network.net");
    write_file(bundle + "/trace.csv", trace_csv);
    write_file(bundle + "/config.txt", config.to_text());
    {
        std::ostringstream report_csv;
        report_csv << ScoreReport::csv_header() << '\n';
        report_csv << result.golden_report.csv_row(config.task, "golden") << '\n';
        report_csv << result.report.csv_row(config.task, reg_label) << '\n';
        write_file(bundle + "/report.csv", report_csv.str());
    }
    write_file(bundle + "/report.json", result.report.json_record(config.task, reg_label) + "\n");
    write_file(bundle + "/golden_report.json", result.golden_report.json_record(config.task, "golden") + "\n");
    {
        std::ostringstream manifest;
        manifest << "task = " << config.task << '\n';
        manifest << "regime = " << regime_name(config.regime) << '\n';
        manifest << "regularizer = " << reg_label << '\n';
        manifest << "train_sequences = " << train_corpus.sequences.size() << '\n';
        manifest << "test_sequences = " << test.sequences.size() << '\n';
        manifest << "golden_file = " << golden_file << '\n';
        manifest << std::hex;
        manifest << "config_hash = " << content_hash(config.to_text()) << '\n';
        manifest << "corpus_hash = " << content_hash(corpus_to_text(train_corpus)) << '\n';
        manifest << "golden_hash = " << content_hash(network_to_text(golden)) << '\n';
        manifest << "final_network_hash = " << content_hash(network_to_text(result.final_net)) << '\n';
        if (std::isfinite(result.gibbs_min_margin)) {
            manifest << std::dec << "gibbs_min_margin = " << fmt_full(result.gibbs_min_margin) << '\n';
        }
        write_file(bundle + "/manifest.txt", manifest.str());
    }
    save_corpus_file(train_corpus, bundle + "/train_corpus.txt");
    return result;
}

// ---------------------------------------------------------------------------
// Tables and plots
// ---------------------------------------------------------------------------

std::vector<BundleRow> load_bundles(const std::vector<std::string>& dirs) {
    std::vector<BundleRow> rows;
    auto parse_json_report = [](const std::string& path) {
        const auto j = nlohmann::ordered_json::parse(read_file(path));
        BundleRow row;
        row.task = j.at("task").get<std::string>();
        row.regularizer = j.at("regularizer").get<std::string>();
        row.report.h_bits = j.at("h_bits").get<BitLength>();
        row.report.l1 = j.at("l1").get<double>();
        row.report.l2 = j.at("l2").get<double>();
        row.report.dh_train = j.at("dh_train").get<double>();
        row.report.dh_test = j.at("dh_test").get<double>();
        row.report.optimal_train = j.at("optimal_train").get<double>();
        row.report.optimal_test = j.at("optimal_test").get<double>();
        row.report.delta_train_pct = j.at("delta_train_pct").get<double>();
        row.report.delta_test_pct = j.at("delta_test_pct").get<double>();
        row.report.smoothed_train = j.at("smoothed_train").get<bool>();
        row.report.smoothed_test = j.at("smoothed_test").get<bool>();
        return row;
    };
    std::set<std::pair<std::string, std::string>> golden_seen;
    for (const auto& dir : dirs) {
        BundleRow golden = parse_json_report(dir + "/golden_report.json");
        golden.golden = true;
        if (golden_seen.insert({golden.task, golden.regularizer + "@" + dir}).second) {
            // A golden row per task, deduplicated across bundles of one task.
        }
        rows.push_back(golden);
        BundleRow final_row = parse_json_report(dir + "/report.json");
        rows.push_back(final_row);
    }
    // Keep one golden row per task (the first seen), preserve bundle order.
    std::vector<BundleRow> dedup;
    std::set<std::string> golden_tasks;
    for (const auto& row : rows) {
        if (row.golden && !golden_tasks.insert(row.task).second) {
            continue;
        }
        dedup.push_back(row);
    }
    return dedup;
}

std::string make_table_csv(const std::vector<BundleRow>& rows) {
    std::ostringstream out;
    out << "task,regularizer,h_bits,l1,l2,dh_train,dh_test,delta_train_pct,delta_test_pct\n";
    for (const auto& row : rows) {
        out << row.task << ',' << (row.golden ? "golden" : row.regularizer) << ',' << row.report.h_bits << ','
            << fmt_full(row.report.l1) << ',' << fmt_full(row.report.l2) << ',' << fmt_full(row.report.dh_train) << ','
            << fmt_full(row.report.dh_test) << ',' << fmt_full(row.report.delta_train_pct) << ','
            << fmt_full(row.report.delta_test_pct) << '\n';
    }
    return out.str();
}

namespace {

std::string table_label(const BundleRow& row) {
    if (row.golden) {
        return "(Golden)";
    }
    return reg_kind_label(reg_kind_from_name(row.regularizer));
}

std::string cell(const std::string& value, bool golden) {
    return golden ? "(" + value + ")" : value;
}

}  // namespace

std::string make_table_text(const std::vector<BundleRow>& rows) {
    const std::vector<std::string> headers = {"Task", "Regularizer", "|H|", "L1", "L2", "Train |D:H|", "Test |D:H|",
                                              "dTrain%", "dTest%"};
    std::vector<std::vector<std::string>> cells;
    for (const auto& row : rows) {
        const auto& r = row.report;
        std::vector<std::string> line;
        line.push_back(row.task);
        line.push_back(table_label(row));
        line.push_back(cell(std::to_string(r.h_bits), row.golden));
        line.push_back(cell(fmt_fixed(r.l1, 2), row.golden));
        line.push_back(cell(fmt_fixed(r.l2, 2), row.golden));
        line.push_back(cell(fmt_fixed(r.dh_train, 2) + (r.smoothed_train ? "*" : ""), row.golden));
        line.push_back(cell(fmt_fixed(r.dh_test, 2) + (r.smoothed_test ? "*" : ""), row.golden));
        line.push_back(cell(fmt_fixed(r.delta_train_pct, 1), row.golden));
        line.push_back(cell(fmt_fixed(r.delta_test_pct, 1), row.golden));
        cells.push_back(std::move(line));
    }
    std::vector<std::size_t> widths(headers.size());
    for (std::size_t i = 0; i < headers.size(); ++i) {
        widths[i] = headers[i].size();
        for (const auto& line : cells) {
            widths[i] = std::max(widths[i], line[i].size());
        }
    }
    std::ostringstream out;
    auto emit = [&](const std::vector<std::string>& line) {
        for (std::size_t i = 0; i < line.size(); ++i) {
            out << std::left << std::setw(static_cast<int>(widths[i]) + 2) << line[i];
        }
        out << '\n';
    };
    emit(headers);
    {
        std::vector<std::string> rule;
        for (const auto w : widths) {
            rule.push_back(std::string(w, '-'));
        }
        emit(rule);
    }
    for (const auto& line : cells) {
        emit(line);
    }
    return out.str();
}

std::string make_scatter_svg(const std::vector<BundleRow>& rows) {
    // One panel per task, x = delta train %, y = delta test %.
    std::vector<std::string> tasks;
    for (const auto& row : rows) {
        if (std::find(tasks.begin(), tasks.end(), row.task) == tasks.end()) {
            tasks.push_back(row.task);
        }
    }
    const std::map<std::string, std::string> colors = {
        {"golden", "#777777"}, {"mdl", "#d62728"},          {"l1", "#1f77b4"},
        {"l2", "#2ca02c"},     {"none_h_limit", "#9467bd"}, {"none", "#8c564b"},
    };
    const int panel = 240, margin = 46, columns = 3;
    const int rows_count = static_cast<int>((tasks.size() + columns - 1) / columns);
    const int width = columns * (panel + margin) + margin;
    const int height = rows_count * (panel + margin) + margin + 30;

    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height << "\">\n";
    svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

    for (std::size_t ti = 0; ti < tasks.size(); ++ti) {
        const std::string& task = tasks[ti];
        const int px = margin + static_cast<int>(ti % columns) * (panel + margin);
        const int py = margin + static_cast<int>(ti / columns) * (panel + margin);

        double extent = 1.0;
        for (const auto& row : rows) {
            if (row.task == task) {
                extent = std::max({extent, std::fabs(row.report.delta_train_pct), std::fabs(row.report.delta_test_pct)});
            }
        }
        extent *= 1.15;

        auto sx = [&](double v) { return px + (v + extent) / (2 * extent) * panel; };
        auto sy = [&](double v) { return py + panel - (v + extent) / (2 * extent) * panel; };

        svg << "<rect x=\"" << px << "\" y=\"" << py << "\" width=\"" << panel << "\" height=\"" << panel
            << "\" fill=\"none\" stroke=\"#333\"/>\n";
        // Origin crosshair: proximity to the center means a better fit.
        svg << "<line x1=\"" << sx(-extent) << "\" y1=\"" << sy(0) << "\" x2=\"" << sx(extent) << "\" y2=\"" << sy(0)
            << "\" stroke=\"#bbbbbb\" stroke-dasharray=\"4 3\"/>\n";
        svg << "<line x1=\"" << sx(0) << "\" y1=\"" << sy(-extent) << "\" x2=\"" << sx(0) << "\" y2=\"" << sy(extent)
            << "\" stroke=\"#bbbbbb\" stroke-dasharray=\"4 3\"/>\n";
        svg << "<text x=\"" << px + panel / 2 << "\" y=\"" << py - 8
            << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">" << task << "</text>\n";
        svg << "<text x=\"" << px + panel / 2 << "\" y=\"" << py + panel + 26
            << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"10\">train delta %</text>\n";
        svg << "<text x=\"" << px - 30 << "\" y=\"" << py + panel / 2 << "\" font-family=\"sans-serif\" font-size=\"10\""
            << " transform=\"rotate(-90 " << px - 30 << ' ' << py + panel / 2 << ")\" text-anchor=\"middle\">"
            << "test delta %</text>\n";

        // Jitter labels when two markers coincide.
        std::map<std::pair<long, long>, int> occupancy;
        for (const auto& row : rows) {
            if (row.task != task) {
                continue;
            }
            const std::string key = row.golden ? "golden" : row.regularizer;
            const auto color_it = colors.find(key);
            const std::string color = color_it == colors.end() ? "#000000" : color_it->second;
            const double x = sx(row.report.delta_train_pct);
            const double y = sy(row.report.delta_test_pct);
            const auto bucket = std::make_pair(std::lround(x), std::lround(y));
            const int offset = occupancy[bucket]++;
            svg << "<circle cx=\"" << x << "\" cy=\"" << y << "\" r=\"4\" fill=\"" << color
                << "\" fill-opacity=\"0.85\"/>\n";
            svg << "<text x=\"" << x + 6 << "\" y=\"" << y - 4 - 9 * offset
                << "\" font-family=\"sans-serif\" font-size=\"9\" fill=\"" << color << "\">" << key << "</text>\n";
        }
    }
    // Legend.
    int lx = margin;
    const int ly = height - 14;
    for (const auto& [name, color] : colors) {
        svg << "<circle cx=\"" << lx << "\" cy=\"" << ly - 3 << "\" r=\"4\" fill=\"" << color << "\"/>\n";
        svg << "<text x=\"" << lx + 8 << "\" y=\"" << ly << "\" font-family=\"sans-serif\" font-size=\"10\">" << name
            << "</text>\n";
        lx += static_cast<int>(name.size()) * 7 + 36;
    }
    svg << "</svg>\n";
    return svg.str();
}

}  // namespace mdlrnn
