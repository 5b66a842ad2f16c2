#include "cli.hpp"

#include <algorithm>
#include <fstream>
#include <iterator>
#include <ostream>
#include <set>
#include <sstream>

#include <CLI11.hpp>

#include "vrpgp/bench.hpp"
#include "vrpgp/errors.hpp"
#include "vrpgp/instance_io.hpp"
#include "vrpgp/text.hpp"

namespace vrpgp::cli {

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

namespace {

const std::set<std::string> kConfigKeys = {
    "population_size", "crossover_rate", "mutation_rate", "elite_rate", "tournament_size", "init_depth_min",
    "init_depth_max", "max_depth", "scales", "gens_per_scale", "strategy", "instances_per_scale", "budget",
    "budget_reference_scale", "lambda_alpha", "neighbors", "master_seed", "workers", "train_manifest",
    "test_manifest", "strategies", "runs", "bench_seed", "out"};

fs::path resolve(const fs::path &base, const std::string &p) {
    const fs::path path(p);
    return path.is_absolute() || base.empty() ? path : base / path;
}

std::string path_text(const fs::path &p) {
    if (p.empty()) {
        return "";
    }
    std::error_code ec;
    const auto abs = fs::absolute(p, ec);
    return (ec ? p : abs.lexically_normal()).string();
}

void write_text(const fs::path &path, const std::string &text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw IoError("cannot write " + path.string());
    }
    out << text;
    if (!out.flush()) {
        throw IoError("write failed: " + path.string());
    }
}

std::string read_text(const fs::path &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open " + path.string());
    }
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void make_dir(const fs::path &dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) {
        throw IoError("cannot create " + dir.string() + ": " + ec.message());
    }
}

gp::ExprTree read_tree(const fs::path &path) {
    auto text = read_text(path);
    while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back()))) {
        text.pop_back();
    }
    return gp::ExprTree::parse(text);
}

std::vector<int> parse_int_list(const std::string &text) {
    std::vector<int> out;
    for (const auto &part : split(text, ',')) {
        try {
            std::size_t used = 0;
            const int v = std::stoi(part, &used);
            if (used != part.size()) {
                throw std::invalid_argument(part);
            }
            out.push_back(v);
        } catch (const std::exception &) {
            throw ConfigError("bad integer '" + part + "' in list '" + text + "'");
        }
    }
    return out;
}

std::vector<train::Strategy> parse_strategy_list(const std::string &text) {
    std::vector<train::Strategy> out;
    for (const auto &part : split(text, ',')) {
        out.push_back(train::parse_strategy(part));
    }
    return out;
}

void echo_config(const fs::path &dir, const std::string &name, const ordered_json &j) {
    write_text(dir / name, j.dump(2) + "\n");
}

// CLI11 wants the arguments reversed.
int parse_args(CLI::App &app, const std::vector<std::string> &args, std::ostream &out, std::ostream &err) {
    std::vector<std::string> rev(args.rbegin(), args.rend());
    try {
        app.parse(rev);
    } catch (const CLI::CallForHelp &e) {
        app.exit(e, out, err);
        return kOk;
    } catch (const CLI::CallForAllHelp &e) {
        app.exit(e, out, err);
        return kOk;
    } catch (const CLI::ParseError &e) {
        app.exit(e, out, err);
        return kUsage;
    }
    return -1;
}

}  // namespace

ordered_json ExperimentConfig::to_json() const {
    const auto &t = trainer;
    ordered_json j;
    j["population_size"] = t.population_size;
    j["crossover_rate"] = t.rates.crossover;
    j["mutation_rate"] = t.rates.mutation;
    j["elite_rate"] = t.rates.elite;
    j["tournament_size"] = t.tournament_size;
    j["init_depth_min"] = t.init_depth_min;
    j["init_depth_max"] = t.init_depth_max;
    j["max_depth"] = t.max_depth;
    j["scales"] = t.schedule.scales;
    j["gens_per_scale"] = t.schedule.gens_per_scale;
    j["strategy"] = std::string(train::strategy_name(t.schedule.strategy));
    j["instances_per_scale"] = t.instances_per_scale;
    j["budget"] = gls::Budget{t.eval.budget.mode, t.eval.budget.base}.to_string();
    j["budget_reference_scale"] = t.eval.budget.reference_scale;
    j["lambda_alpha"] = t.eval.lambda_alpha;
    j["neighbors"] = t.neighbors;
    j["master_seed"] = t.master_seed;
    j["workers"] = t.workers;
    j["train_manifest"] = path_text(train_manifest);
    j["test_manifest"] = path_text(test_manifest);
    auto names = ordered_json::array();
    for (const auto s : strategies) {
        names.push_back(std::string(train::strategy_name(s)));
    }
    j["strategies"] = names;
    j["runs"] = runs;
    j["bench_seed"] = bench_seed;
    j["out"] = path_text(out);
    return j;
}

ExperimentConfig ExperimentConfig::from_json(const json &j, const fs::path &base_dir) {
    if (!j.is_object()) {
        throw ConfigError("config must be a JSON object");
    }
    for (const auto &[key, value] : j.items()) {
        if (kConfigKeys.count(key) == 0) {
            throw ConfigError("unknown config key '" + key + "'");
        }
    }
    ExperimentConfig c;
    auto &t = c.trainer;
    std::string key;
    try {
        auto get = [&](const char *name, auto &dst) {
            key = name;
            if (j.contains(name)) {
                dst = j.at(name).get<std::remove_reference_t<decltype(dst)>>();
            }
        };
        get("population_size", t.population_size);
        get("crossover_rate", t.rates.crossover);
        get("mutation_rate", t.rates.mutation);
        get("elite_rate", t.rates.elite);
        get("tournament_size", t.tournament_size);
        get("init_depth_min", t.init_depth_min);
        get("init_depth_max", t.init_depth_max);
        get("max_depth", t.max_depth);
        get("scales", t.schedule.scales);
        get("gens_per_scale", t.schedule.gens_per_scale);
        get("instances_per_scale", t.instances_per_scale);
        get("lambda_alpha", t.eval.lambda_alpha);
        get("neighbors", t.neighbors);
        get("master_seed", t.master_seed);
        get("workers", t.workers);
        get("runs", c.runs);
        get("bench_seed", c.bench_seed);
        int reference = t.eval.budget.reference_scale;
        get("budget_reference_scale", reference);
        std::string budget = gls::Budget{t.eval.budget.mode, t.eval.budget.base}.to_string();
        get("budget", budget);
        t.eval.budget = train::BudgetRule::parse(budget, reference);
        std::string strategy(train::strategy_name(t.schedule.strategy));
        get("strategy", strategy);
        t.schedule.strategy = train::parse_strategy(strategy);
        if (j.contains("strategies")) {
            key = "strategies";
            c.strategies.clear();
            for (const auto &s : j.at("strategies").get<std::vector<std::string>>()) {
                c.strategies.push_back(train::parse_strategy(s));
            }
        }
        key = "train_manifest";
        if (j.contains(key)) {
            c.train_manifest = resolve(base_dir, j.at(key).get<std::string>());
        }
        key = "test_manifest";
        if (j.contains(key)) {
            c.test_manifest = resolve(base_dir, j.at(key).get<std::string>());
        }
        key = "out";
        if (j.contains(key)) {
            c.out = resolve(base_dir, j.at(key).get<std::string>());
        }
    } catch (const json::exception &e) {
        throw ConfigError("config key '" + key + "': " + e.what());
    } catch (const ParameterError &e) {
        throw ConfigError("config key '" + key + "': " + e.what());
    }
    t.schedule.seed = t.master_seed;
    return c;
}

ExperimentConfig ExperimentConfig::load(const fs::path &path) {
    json j;
    try {
        j = json::parse(read_text(path));
    } catch (const json::parse_error &e) {
        throw ConfigError(path.string() + ": " + e.what());
    }
    return from_json(j, path.parent_path());
}

namespace {

struct GenerateArgs {
    std::string scales = "100,300,600,1000";
    int per_scale = 3;
    std::uint64_t seed = 0;
    std::string tag = "train";
    std::string out;
};

int cmd_generate(const GenerateArgs &a, std::ostream &out, std::ostream &err) {
    std::vector<int> scales;
    try {
        scales = parse_int_list(a.scales);
        if (a.per_scale < 1) {
            throw ConfigError("--per-scale must be >= 1");
        }
        for (const int s : scales) {
            if (s < 1) {
                throw ConfigError("scales must be positive");
            }
        }
    } catch (const ConfigError &e) {
        err << "error: " << e.what() << '\n';
        return kUsage;
    }
    const fs::path dir(a.out);
    const auto manifest = io::materialize_suite(a.seed, scales, a.per_scale, dir, a.tag);
    ordered_json j;
    j["command"] = "generate";
    j["scales"] = scales;
    j["per_scale"] = a.per_scale;
    j["seed"] = a.seed;
    j["tag"] = a.tag;
    j["out"] = path_text(dir);
    echo_config(dir, "generate_config.json", j);
    std::size_t files = 0;
    for (const auto &[s, paths] : manifest.scales) {
        files += paths.size();
    }
    out << "wrote " << files << " instances\n" << (dir / "manifest.json").string() << '\n';
    return kOk;
}

struct TrainArgs {
    std::string config;
    std::string strategy;
    std::optional<std::uint64_t> seed;
    std::optional<int> workers;
    std::string out;
};

int cmd_train(const TrainArgs &a, std::ostream &out, std::ostream &err) {
    ExperimentConfig cfg;
    train::TrainingSets sets;
    try {
        cfg = ExperimentConfig::load(a.config);
        auto &t = cfg.trainer;
        if (!a.strategy.empty()) {
            t.schedule.strategy = train::parse_strategy(a.strategy);
        }
        if (a.seed) {
            t.master_seed = *a.seed;
        }
        if (a.workers) {
            t.workers = *a.workers;
        }
        if (!a.out.empty()) {
            cfg.out = a.out;
        }
        t.schedule.seed = t.master_seed;
        if (t.workers < 1) {
            throw ConfigError("workers must be >= 1");
        }
        t.check();
        if (cfg.train_manifest.empty()) {
            throw ConfigError("config has no train_manifest");
        }
        const auto manifest = io::read_manifest(cfg.train_manifest);
        auto scales = train::scale_sequence(t.schedule);
        std::sort(scales.begin(), scales.end());
        scales.erase(std::unique(scales.begin(), scales.end()), scales.end());
        sets = train::load_training_sets(manifest, scales, t.instances_per_scale, t.neighbors);
    } catch (const ConfigError &e) {
        err << "config error: " << e.what() << '\n';
        return kUsage;
    } catch (const IoError &e) {
        err << "config error: " << e.what() << '\n';
        return kUsage;
    } catch (const ParseError &e) {
        err << "config error: " << e.what() << '\n';
        return kUsage;
    }

    make_dir(cfg.out);
    echo_config(cfg.out, "train_config.json", cfg.to_json());
    const auto result = train::train(cfg.trainer, sets, [&](const train::GenerationLog &g) {
        err << "gen " << g.generation << " scale " << g.scale << " mean " << format_double(g.mean_fitness) << " best "
            << format_double(g.best_fitness) << " evals " << g.evaluations << '\n';
    });

    const bool timed = !cfg.trainer.eval.budget.deterministic();
    write_text(cfg.out / "best.tree", result.best.tree.to_string() + "\n");
    write_text(cfg.out / "final_best.tree", result.final_best.tree.to_string() + "\n");
    std::ostringstream log, pop, timing;
    train::write_train_log_csv(log, result.log, timed);
    train::write_population_jsonl(pop, result.log);
    timing << "generation,scale,evaluations,wall_time\n";
    for (const auto &g : result.log.generations) {
        timing << g.generation << ',' << g.scale << ',' << g.evaluations << ',' << format_double(g.wall_time) << '\n';
    }
    write_text(cfg.out / "train_log.csv", log.str());
    write_text(cfg.out / "population.jsonl", pop.str());
    write_text(cfg.out / "timing.csv", timing.str());
    out << "best " << result.best.tree.to_string() << " fitness " << format_double(*result.best.fitness) << " scale "
        << result.best_scale << " generation " << result.best_generation << '\n';
    return kOk;
}

struct SolveArgs {
    std::string instance;
    std::string tree;
    std::string baseline;
    std::string budget = "moves:1000";
    int reference_scale = 100;
    double lambda_alpha = gls::kDefaultLambdaAlpha;
    int neighbors = gls::kDefaultNeighbors;
    std::uint64_t seed = 0;
    std::string trace;
};

int cmd_solve(const SolveArgs &a, std::ostream &out, std::ostream &err) {
    if (a.tree.empty() == a.baseline.empty()) {
        err << "error: give exactly one of --tree or --baseline\n";
        return kUsage;
    }
    if (!a.baseline.empty() && a.baseline != "kgls") {
        err << "error: unknown baseline '" << a.baseline << "' (expected kgls)\n";
        return kUsage;
    }
    train::BudgetRule rule;
    try {
        rule = train::BudgetRule::parse(a.budget, a.reference_scale);
    } catch (const ParameterError &e) {
        err << "error: " << e.what() << '\n';
        return kUsage;
    }
    const auto inst = io::read_tsplib(fs::path(a.instance));
    const auto util = a.tree.empty() ? gls::kgls_baseline_utility() : gp::as_utility(read_tree(a.tree));
    gls::GlsParams params;
    params.lambda_alpha = a.lambda_alpha;
    params.neighbors = a.neighbors;
    params.budget = rule.for_scale(inst.customer_count());
    params.seed = a.seed;
    const auto prepared = gls::PreparedInstance::make(inst, a.neighbors);
    const auto res = gls::guided_local_search(prepared, util, params);
    out << "instance " << inst.id << '\n'
        << "budget " << params.budget.to_string() << '\n'
        << "init_cost " << res.init_cost << '\n'
        << "post_ls_cost " << res.post_ls_cost << '\n'
        << "final_cost " << res.final_cost << '\n'
        << "routes " << res.best.routes.size() << '\n'
        << "fitness " << format_double(train::relative_fitness(static_cast<double>(res.init_cost), static_cast<double>(res.final_cost)))
        << '\n';
    if (!a.trace.empty()) {
        std::ostringstream os;
        gls::write_trace_csv(os, res.trace);
        write_text(a.trace, os.str());
    }
    return kOk;
}

struct BenchArgs {
    std::string trees;
    std::string test_manifest;
    int runs = 30;
    std::uint64_t seed = 0;
    std::string budget = "moves:10000";
    int reference_scale = 100;
    std::string strategies = "ST,RG,LO,CL";
    double lambda_alpha = gls::kDefaultLambdaAlpha;
    int neighbors = gls::kDefaultNeighbors;
    int workers = 1;
    std::string out = "bench";
};

int cmd_bench(const BenchArgs &a, std::ostream &out, std::ostream &err) {
    bench::BenchConfig bc;
    bench::StrategyTrees trees;
    std::vector<gls::PreparedInstance> instances;
    std::vector<train::Strategy> strategies;
    try {
        bc.runs = a.runs;
        bc.base_seed = a.seed;
        bc.workers = a.workers;
        bc.lambda_alpha = a.lambda_alpha;
        try {
            bc.budget = train::BudgetRule::parse(a.budget, a.reference_scale);
        } catch (const ParameterError &e) {
            throw ConfigError(e.what());
        }
        if (a.runs < 1 || a.workers < 1) {
            throw ConfigError("--runs and --workers must be >= 1");
        }
        strategies = parse_strategy_list(a.strategies);
        for (const auto s : strategies) {
            const auto name = std::string(train::strategy_name(s));
            const fs::path single = fs::path(a.trees) / (name + ".tree");
            auto &list = trees[s];
            if (fs::exists(single)) {
                list.push_back(read_tree(single));
                continue;
            }
            for (int k = 0;; ++k) {
                const fs::path p = fs::path(a.trees) / (name + "_" + std::to_string(k) + ".tree");
                if (!fs::exists(p)) {
                    break;
                }
                list.push_back(read_tree(p));
            }
            if (list.empty()) {
                throw ConfigError("no tree for strategy " + name + " in " + a.trees);
            }
            if (list.size() != 1 && static_cast<int>(list.size()) != a.runs) {
                throw ConfigError("strategy " + name + " has " + std::to_string(list.size()) + " trees; expected 1 or --runs (" +
                                  std::to_string(a.runs) + ")");
            }
        }
        const auto manifest = io::read_manifest(a.test_manifest);
        for (const auto &[scale, paths] : manifest.scales) {
            for (const auto &p : manifest.resolved(scale)) {
                instances.push_back(gls::PreparedInstance::make(io::read_tsplib(p), a.neighbors));
            }
        }
        if (instances.empty()) {
            throw ConfigError("test manifest lists no instances");
        }
    } catch (const ConfigError &e) {
        err << "config error: " << e.what() << '\n';
        return kUsage;
    } catch (const IoError &e) {
        err << "config error: " << e.what() << '\n';
        return kUsage;
    }

    const fs::path dir(a.out);
    make_dir(dir);
    ordered_json j;
    j["command"] = "bench";
    j["trees"] = path_text(a.trees);
    j["test_manifest"] = path_text(a.test_manifest);
    j["runs"] = a.runs;
    j["seed"] = a.seed;
    j["budget"] = a.budget;
    j["reference_scale"] = a.reference_scale;
    auto names = ordered_json::array();
    for (const auto s : strategies) {
        names.push_back(std::string(train::strategy_name(s)));
    }
    j["strategies"] = names;
    j["lambda_alpha"] = a.lambda_alpha;
    j["neighbors"] = a.neighbors;
    j["workers"] = a.workers;
    j["out"] = path_text(dir);
    echo_config(dir, "bench_config.json", j);

    const auto records = bench::run_benchmark(trees, instances, bc);
    const bench::ReportHeader header{a.seed, bc.budget.to_string()};
    const bool timed = !bc.budget.deterministic();
    std::ostringstream runs, timing;
    bench::write_runs_csv(runs, header, records, timed);
    timing << "strategy,instance,run,wall_time\n";
    int failed = 0;
    for (const auto &r : records) {
        timing << train::strategy_name(r.strategy) << ',' << r.instance << ',' << r.run << ',' << format_double(r.wall_time) << '\n';
        failed += r.failed;
    }
    write_text(dir / "runs.csv", runs.str());
    write_text(dir / "bench_timing.csv", timing.str());
    out << "wrote " << records.size() << " records (" << failed << " failed) to " << (dir / "runs.csv").string() << '\n';
    return failed == 0 ? kOk : kRuntime;
}

struct StatsArgs {
    std::string runs_csv;
    std::string out;
    double alpha = 0.05;
    std::vector<std::string> train_logs;
};

int cmd_stats(const StatsArgs &a, std::ostream &out, std::ostream &err) {
    const auto file = bench::read_runs_csv(fs::path(a.runs_csv));
    std::vector<bench::TrainSeries> series;
    for (const auto &arg : a.train_logs) {
        const auto eq = arg.find('=');
        if (eq == std::string::npos) {
            err << "error: --train-log expects label=path, got '" << arg << "'\n";
            return kUsage;
        }
        series.push_back({arg.substr(0, eq), bench::read_train_log_csv(arg.substr(eq + 1))});
    }
    bench::Comparisons comparisons;
    try {
        comparisons = bench::compare_strategies(file.records, a.alpha);
    } catch (const ContractError &e) {
        err << "error: " << e.what() << '\n';
        return kUsage;
    }
    const fs::path dir = a.out.empty() ? fs::path(a.runs_csv).parent_path() : fs::path(a.out);
    if (!dir.empty()) {
        make_dir(dir);
    }
    ordered_json j;
    j["command"] = "stats";
    j["runs_csv"] = path_text(a.runs_csv);
    j["out"] = path_text(dir);
    j["alpha"] = a.alpha;
    j["train_logs"] = a.train_logs;
    echo_config(dir, "stats_config.json", j);

    std::ostringstream cmp, box;
    bench::write_comparisons_csv(cmp, file.header, comparisons);
    const auto boxes = bench::boxplot(file.records);
    bench::write_boxplot_csv(box, file.header, boxes);
    write_text(dir / "comparisons.csv", cmp.str());
    write_text(dir / "boxplot_data.csv", box.str());
    if (!series.empty()) {
        std::ostringstream gen;
        bench::write_gen_fitness_csv(gen, file.header, series);
        write_text(dir / "gen_fitness.csv", gen.str());
    }
    out << bench::summary_line(comparisons) << '\n';
    return kOk;
}

}  // namespace

int run_cli(const std::vector<std::string> &args, std::ostream &out, std::ostream &err) {
    CLI::App app{"CVRP guided-local-search hyper-heuristic workbench", "vrpgp"};
    app.require_subcommand(1);

    GenerateArgs ga;
    auto *gen = app.add_subcommand("generate", "Generate a seeded instance suite and manifest");
    gen->add_option("--scales", ga.scales, "Comma-separated customer counts")->capture_default_str();
    gen->add_option("--per-scale", ga.per_scale, "Instances per scale")->capture_default_str();
    gen->add_option("--seed", ga.seed, "Base seed")->capture_default_str();
    gen->add_option("--tag", ga.tag, "Suite tag; different tags give disjoint suites")->capture_default_str();
    gen->add_option("--out", ga.out, "Output directory")->required();

    TrainArgs ta;
    std::uint64_t train_seed = 0;
    int train_workers = 1;
    auto *tr = app.add_subcommand("train", "Evolve a utility function");
    tr->add_option("--config", ta.config, "Experiment config (JSON)")->required();
    tr->add_option("--strategy", ta.strategy, "ST, RG, LO or CL (overrides config)");
    auto *seed_opt = tr->add_option("--seed", train_seed, "Master seed (overrides config)");
    auto *workers_opt = tr->add_option("--workers", train_workers, "Evaluation threads (overrides config)");
    tr->add_option("--out", ta.out, "Output directory (overrides config)");

    SolveArgs sa;
    auto *so = app.add_subcommand("solve", "Run guided local search on one instance");
    so->add_option("--instance", sa.instance, "TSPLIB instance file")->required();
    so->add_option("--tree", sa.tree, "File holding an s-expression utility");
    so->add_option("--baseline", sa.baseline, "Built-in utility: kgls");
    so->add_option("--budget", sa.budget, "time:<seconds> or moves:<rounds>, scaled by n/reference")->capture_default_str();
    so->add_option("--reference-scale", sa.reference_scale, "Scale at which the budget applies unscaled")->capture_default_str();
    so->add_option("--lambda-alpha", sa.lambda_alpha, "Penalty weight")->capture_default_str();
    so->add_option("--neighbors", sa.neighbors, "Neighbor list size")->capture_default_str();
    so->add_option("--seed", sa.seed, "Solver seed")->capture_default_str();
    so->add_option("--trace", sa.trace, "Write the best-cost trace CSV here");

    BenchArgs ba;
    auto *be = app.add_subcommand("bench", "Benchmark trained trees on a test suite");
    be->add_option("--trees", ba.trees, "Directory with {S}.tree or {S}_{k}.tree files")->required();
    be->add_option("--test-manifest", ba.test_manifest, "Test suite manifest")->required();
    be->add_option("--runs", ba.runs, "Runs per (strategy, instance)")->capture_default_str();
    be->add_option("--seed", ba.seed, "Base seed")->capture_default_str();
    be->add_option("--budget", ba.budget, "time:<seconds> or moves:<rounds>, scaled by n/reference")->capture_default_str();
    be->add_option("--reference-scale", ba.reference_scale, "Scale at which the budget applies unscaled")->capture_default_str();
    be->add_option("--strategies", ba.strategies, "Comma-separated strategies")->capture_default_str();
    be->add_option("--lambda-alpha", ba.lambda_alpha, "Penalty weight")->capture_default_str();
    be->add_option("--neighbors", ba.neighbors, "Neighbor list size")->capture_default_str();
    be->add_option("--workers", ba.workers, "Solver threads")->capture_default_str();
    be->add_option("--out", ba.out, "Output directory")->capture_default_str();

    StatsArgs sta;
    auto *st = app.add_subcommand("stats", "Rank-sum comparisons and boxplot data from runs.csv");
    st->add_option("--runs-csv", sta.runs_csv, "runs.csv written by bench")->required();
    st->add_option("--out", sta.out, "Output directory (default: next to runs.csv)");
    st->add_option("--alpha", sta.alpha, "Significance level")->capture_default_str();
    st->add_option("--train-log", sta.train_logs, "label=path of a train_log.csv (repeatable)");

    if (const int rc = parse_args(app, args, out, err); rc >= 0) {
        return rc;
    }
    if (*seed_opt) {
        ta.seed = train_seed;
    }
    if (*workers_opt) {
        ta.workers = train_workers;
    }

    try {
        if (*gen) {
            return cmd_generate(ga, out, err);
        }
        if (*tr) {
            return cmd_train(ta, out, err);
        }
        if (*so) {
            return cmd_solve(sa, out, err);
        }
        if (*be) {
            return cmd_bench(ba, out, err);
        }
        if (*st) {
            return cmd_stats(sta, out, err);
        }
    } catch (const ConfigError &e) {
        err << "config error: " << e.what() << '\n';
        return kUsage;
    } catch (const std::exception &e) {
        err << "error: " << e.what() << '\n';
        return kRuntime;
    }
    return kUsage;
}

}  // namespace vrpgp::cli
