// Acceptance gate: runs the nine criteria and prints one PASS/FAIL line each.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <set>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "../tools/cli.hpp"
#include "move_sampler.hpp"
#include "oracles.hpp"
#include "vrpgp/audit.hpp"
#include "vrpgp/bench.hpp"
#include "vrpgp/evolution.hpp"
#include "vrpgp/expr_tree.hpp"
#include "vrpgp/gls.hpp"
#include "vrpgp/instance_io.hpp"
#include "vrpgp/trainer.hpp"

namespace fs = std::filesystem;
using namespace vrpgp;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(double v, int precision = 4) {
    std::ostringstream os;
    os.precision(precision);
    os << v;
    return os.str();
}

std::string slurp(const fs::path &p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

void note(const std::string &text) { std::cerr << "  .. " << text << std::endl; }

int cli(const std::vector<std::string> &args, std::string *err_text = nullptr) {
    std::ostringstream out, err;
    const int code = cli::run_cli(args, out, err);
    if (code != 0) {
        std::cerr << "  !! vrpgp";
        for (const auto &a : args) {
            std::cerr << ' ' << a;
        }
        std::cerr << " -> " << code << '\n' << err.str();
    }
    if (err_text != nullptr) {
        *err_text = err.str();
    }
    return code;
}

// 1 ---------------------------------------------------------------------------

Outcome relative_fitness_exact() {
    std::mt19937_64 gen(101);
    std::uniform_int_distribution<std::int64_t> init_dist(1, 5'000'000);
    double worst = 0;
    bool in_range = true;
    for (int k = 0; k < 100; ++k) {
        const auto init = init_dist(gen);
        const auto fin = std::uniform_int_distribution<std::int64_t>(0, init)(gen);
        const long double hand = (static_cast<long double>(fin) - static_cast<long double>(init)) / static_cast<long double>(init);
        const double got = train::relative_fitness(static_cast<double>(init), static_cast<double>(fin));
        worst = std::max(worst, static_cast<double>(std::fabs(static_cast<long double>(got) - hand)));
        in_range = in_range && got <= 0.0 && got >= -1.0;
    }
    return {worst <= 1e-12 && in_range, "max abs error " + fmt(worst) + ", range ok " + (in_range ? "yes" : "no")};
}

// 2 ---------------------------------------------------------------------------

Outcome schedules_exact() {
    train::CurriculumSchedule s;
    s.strategy = train::Strategy::CL;
    const bool cl = train::scale_sequence(s) == std::vector<int>{100, 100, 100, 300, 300, 300, 600, 600, 600, 1000, 1000, 1000};
    bool lo = true, rg = true, repro = true;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        s.seed = seed;
        s.strategy = train::Strategy::LO;
        const auto l = train::scale_sequence(s);
        lo = lo && std::all_of(l.begin(), l.end(), [](int v) { return v == 1000; });
        s.strategy = train::Strategy::RG;
        const auto r = train::scale_sequence(s);
        for (std::size_t g = 0; g < r.size(); ++g) {
            rg = rg && r[g] == r[g - g % 3];
        }
        repro = repro && r == train::scale_sequence(s);
        s.strategy = train::Strategy::ST;
        repro = repro && train::scale_sequence(s) == train::scale_sequence(s);
    }
    return {cl && lo && rg && repro, std::string("CL ") + (cl ? "ok" : "bad") + ", LO " + (lo ? "ok" : "bad") + ", RG blocks " +
                                         (rg ? "ok" : "bad") + ", seeded ST/RG " + (repro ? "ok" : "bad")};
}

// 3 ---------------------------------------------------------------------------

Outcome protected_division() {
    std::mt19937_64 gen(303);
    Rng rng(303);
    std::uniform_real_distribution<double> real(-1000, 1000);
    std::bernoulli_distribution zero(0.35);
    auto state = [&] {
        EdgeFeatures f{};
        for (auto &v : f) {
            v = zero(gen) ? 0.0 : std::round(real(gen));
        }
        return f;
    };
    long zero_divisors = 0, evaluations = 0;
    bool ok = true;
    for (int trial = 0; trial < 1000; ++trial) {
        // Random trees checked at every pdiv node, plus a forced zero divisor.
        const auto a = gp::grow_tree(rng, 0, 3);
        const auto divisor = trial % 3 == 0 ? gp::ExprTree::make(gp::Op::sub, a, a)
                             : trial % 3 == 1 ? gp::ExprTree::make(gp::Op::mul, a, gp::ExprTree::leaf(trial % kTerminalCount))
                                              : gp::ExprTree::leaf(trial % kTerminalCount);
        const auto t = gp::ExprTree::make(gp::Op::add, gp::grow_tree(rng, 1, 6),
                                          gp::ExprTree::make(gp::Op::pdiv, gp::grow_tree(rng, 0, 4), divisor));
        for (int s = 0; s < 5; ++s) {
            auto f = state();
            if (s == 0) {
                f[static_cast<std::size_t>(trial % kTerminalCount)] = 0.0;
            }
            const double whole = gp::eval_tree(t, f);
            ok = ok && std::isfinite(whole);
            ++evaluations;
            const auto nodes = t.nodes();
            for (std::size_t i = 0; i < nodes.size(); ++i) {
                if (!nodes[i].is_function || nodes[i].op() != gp::Op::pdiv) {
                    continue;
                }
                const auto rhs = t.subtree(t.subtree_end(i + 1));
                if (gp::eval_tree(rhs, f) == 0.0) {
                    ++zero_divisors;
                    ok = ok && gp::eval_tree(t.subtree(i), f) == 1.0;
                }
            }
        }
    }
    return {ok && zero_divisors >= 1000,
            std::to_string(evaluations) + " evaluations, " + std::to_string(zero_divisors) + " zero divisors, all finite and 1 on zero: " +
                (ok ? "yes" : "no")};
}

// 4 ---------------------------------------------------------------------------

Outcome move_deltas() {
    using sampler::Op;
    double worst = 0;
    int checked_total = 0;
    bool valid = true;
    std::string short_counts;
    for (const int n : {20, 50}) {
        for (const auto op : {Op::relocate, Op::swap, Op::two_opt, Op::two_opt_star}) {
            const auto seed = 7000 + static_cast<std::uint64_t>(n) * 10 + static_cast<std::uint64_t>(op);
            auto f = sampler::make_fixture(n, seed);
            const gls::AugmentedWeights w(f.d, f.pen, f.lambda);
            std::mt19937_64 gen(seed);
            int checked = 0, attempts = 0;
            while (checked < 1000 && attempts < 200000) {
                ++attempts;
                const gls::SearchState s(f.inst, f.d, sampler::random_solution(f, gen));
                gls::SearchState after = s;
                const auto m = sampler::sample_move(op, s, after, w, gen);
                if (!m.applied) {
                    continue;
                }
                const double full = oracle::augmented(f.inst, after.solution(), f.pen, f.lambda) -
                                    oracle::augmented(f.inst, s.solution(), f.pen, f.lambda);
                worst = std::max(worst, std::abs(*m.delta - full));
                valid = valid && validate_solution(after.solution(), f.inst).empty();
                ++checked;
            }
            if (checked < 1000) {
                short_counts += " op" + std::to_string(static_cast<int>(op)) + "@n" + std::to_string(n) + "=" + std::to_string(checked);
            }
            checked_total += checked;
        }
    }
    return {worst <= 1e-6 && valid && short_counts.empty(),
            std::to_string(checked_total) + " moves, max |delta - recompute| " + fmt(worst) + (valid ? "" : ", invalid result") + short_counts};
}

// 5 ---------------------------------------------------------------------------

Outcome small_optimality() {
    const auto tree = gp::ExprTree::parse("(pdiv T0 (add T1 T1))");
    int kgls_hits = 0, tree_hits = 0;
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        io::GeneratorConfig cfg;
        cfg.n = 8;
        cfg.seed = seed;
        auto inst = io::generate_instance(cfg);
        inst.capacity = 3;
        const DistanceMatrix d(inst);
        const auto opt = oracle::brute_force_optimum(inst);
        gls::GlsParams p;
        p.budget = gls::Budget::moves(2000);
        const auto base = gls::guided_local_search(inst, d, gls::kgls_baseline_utility(), p);
        kgls_hits += base.final_cost == opt;
        const auto gp_run = gls::guided_local_search(inst, d, gp::as_utility(tree), p);
        tree_hits += static_cast<double>(gp_run.final_cost) <= 1.02 * static_cast<double>(opt);
    }
    return {kgls_hits >= 18 && tree_hits >= 18, "KGLS optimal " + std::to_string(kgls_hits) + "/20, " + tree.to_string() + " within 2% " +
                                                    std::to_string(tree_hits) + "/20"};
}

// 6 ---------------------------------------------------------------------------

Outcome wilcoxon() {
    const std::vector<double> a{1, 2, 3}, b{4, 5, 6};
    const auto r = bench::wilcoxon_rank_sum(a, b);
    const bool hand = r.exact && r.p == 0.1;

    std::mt19937_64 gen(606);
    std::normal_distribution<double> normal(0, 1);
    auto draw = [&](int n, double shift) {
        std::vector<double> v(static_cast<std::size_t>(n));
        for (auto &x : v) {
            x = normal(gen) + shift;
        }
        return v;
    };
    double worst_gap = 0;
    for (int t = 0; t < 100; ++t) {
        const auto x = draw(8, 0), y = draw(8, 0.15 * (t % 15));
        worst_gap = std::max(worst_gap, std::abs(bench::rank_sum_p_exact(x, y) - bench::rank_sum_p_normal(x, y)));
    }
    bool symmetric = true, invariant = true;
    std::uniform_int_distribution<int> size(2, 25);
    for (int t = 0; t < 100; ++t) {
        const auto x = draw(size(gen), 0), y = draw(size(gen), 0.3);
        const double p = bench::wilcoxon_rank_sum(x, y).p;
        symmetric = symmetric && p == bench::wilcoxon_rank_sum(y, x).p;
        std::vector<double> ex, ey;
        std::transform(x.begin(), x.end(), std::back_inserter(ex), [](double v) { return std::exp(v); });
        std::transform(y.begin(), y.end(), std::back_inserter(ey), [](double v) { return std::exp(v); });
        invariant = invariant && p == bench::wilcoxon_rank_sum(ex, ey).p;
    }
    return {hand && worst_gap <= 0.02 && symmetric && invariant,
            "p({1,2,3},{4,5,6}) = " + fmt(r.p, 17) + ", max exact/normal gap " + fmt(worst_gap) + ", symmetric " + (symmetric ? "yes" : "no") +
                ", exp-invariant " + (invariant ? "yes" : "no")};
}

// Desk experiment shared by 7 and 8 -----------------------------------------

struct Desk {
    fs::path root;
    fs::path config;
    nlohmann::json json;
    bool ready = false;
};

Desk prepare_desk(const fs::path &work, const fs::path &desk_config) {
    Desk d;
    d.root = work / "desk";
    fs::create_directories(d.root);
    d.json = nlohmann::json::parse(slurp(desk_config));
    const int train_code = cli({"generate", "--scales", "25,50,75,100", "--per-scale", "3", "--seed", "1", "--tag", "train", "--out",
                                (d.root / "data" / "train").string()});
    const int test_code =
        cli({"generate", "--scales", "100", "--per-scale", "5", "--seed", "1", "--tag", "test", "--out", (d.root / "data" / "test").string()});
    d.json["train_manifest"] = (d.root / "data" / "train" / "manifest.json").string();
    d.json["test_manifest"] = (d.root / "data" / "test" / "manifest.json").string();
    d.json["out"] = (d.root / "runs").string();
    d.config = d.root / "desk.json";
    std::ofstream(d.config) << d.json.dump(2) << '\n';
    d.ready = train_code == 0 && test_code == 0;
    return d;
}

fs::path train_dir(const Desk &d, train::Strategy s, int seed) {
    return d.root / "runs" / (std::string(train::strategy_name(s)) + "_seed" + std::to_string(seed));
}

// 7 ---------------------------------------------------------------------------

Outcome determinism(const Desk &d) {
    if (!d.ready) {
        return {false, "desk data generation failed"};
    }
    const auto seed = std::to_string(d.json.at("master_seed").get<std::uint64_t>());
    const auto a = train_dir(d, train::Strategy::CL, std::stoi(seed));
    const auto b = d.root / "runs" / "determinism_workers3";
    note("training CL seed " + seed + " with 1 worker");
    const int ca = cli({"train", "--config", d.config.string(), "--strategy", "CL", "--seed", seed, "--workers", "1", "--out", a.string()});
    note("training CL seed " + seed + " with 3 workers");
    const int cb = cli({"train", "--config", d.config.string(), "--strategy", "CL", "--seed", seed, "--workers", "3", "--out", b.string()});
    if (ca != 0 || cb != 0) {
        return {false, "train exit codes " + std::to_string(ca) + ", " + std::to_string(cb)};
    }
    std::string mismatched;
    for (const char *f : {"train_log.csv", "best.tree", "final_best.tree", "population.jsonl"}) {
        const auto x = slurp(a / f);
        if (x.empty() || x != slurp(b / f)) {
            mismatched += std::string(" ") + f;
        }
    }
    return {mismatched.empty(), mismatched.empty() ? "train_log.csv, best.tree, final_best.tree, population.jsonl byte-identical for workers 1 and 3"
                                                   : "differs:" + mismatched};
}

// 8 ---------------------------------------------------------------------------

struct TrendReport {
    Outcome outcome;
    std::string g3_vs_g2;
    bool g3_ok = false;
    std::string cl_vs_st;
};

TrendReport curriculum_trend(const Desk &d) {
    TrendReport rep;
    if (!d.ready) {
        rep.outcome = {false, "desk data generation failed"};
        return rep;
    }
    constexpr int kSeeds = 5;
    const auto trees = d.root / "runs" / "trees";
    fs::create_directories(trees);
    std::vector<std::string> train_logs;
    for (const auto s : train::kAllStrategies) {
        for (int seed = 1; seed <= kSeeds; ++seed) {
            const auto dir = train_dir(d, s, seed);
            if (!fs::exists(dir / "best.tree")) {
                note("training " + std::string(train::strategy_name(s)) + " seed " + std::to_string(seed));
                if (cli({"train", "--config", d.config.string(), "--strategy", std::string(train::strategy_name(s)), "--seed",
                         std::to_string(seed), "--workers", "1", "--out", dir.string()}) != 0) {
                    rep.outcome = {false, "training failed"};
                    return rep;
                }
            }
            fs::copy_file(dir / "best.tree", trees / (std::string(train::strategy_name(s)) + "_" + std::to_string(seed - 1) + ".tree"),
                          fs::copy_options::overwrite_existing);
            train_logs.push_back(std::string(train::strategy_name(s)) + "-s" + std::to_string(seed) + "=" + (dir / "train_log.csv").string());
        }
    }

    // (a) step shape of CL's mean population fitness.
    const int gps = d.json.at("gens_per_scale").get<int>();
    const int transitions = static_cast<int>(d.json.at("scales").size()) - 1;
    int step_seeds = 0, g3_seeds = 0;
    std::string per_seed;
    for (int seed = 1; seed <= kSeeds; ++seed) {
        const auto log = bench::read_train_log_csv(train_dir(d, train::Strategy::CL, seed) / "train_log.csv");
        int ups = 0;
        for (int t = 1; t <= transitions; ++t) {
            const auto g = static_cast<std::size_t>(t * gps);
            ups += log.generations.at(g).mean_fitness > log.generations.at(g - 1).mean_fitness;
        }
        step_seeds += ups >= 2;
        g3_seeds += log.generations.at(3).mean_fitness > log.generations.at(2).mean_fitness;
        per_seed += (seed > 1 ? "," : "") + std::to_string(ups);
    }
    rep.g3_vs_g2 = "trainer example: CL mean fitness g3 > g2 in " + std::to_string(g3_seeds) + "/5 seeds (need 4)";
    rep.g3_ok = g3_seeds >= 4;
    const bool a_ok = step_seeds >= 4;

    // (b) held-out benchmark.
    const auto bench_dir = d.root / "runs" / "bench";
    note("benchmarking 4 strategies x 5 instances x 5 runs");
    const auto budget = d.json.at("budget").get<std::string>();
    const auto reference = std::to_string(d.json.at("budget_reference_scale").get<int>());
    if (cli({"bench", "--trees", trees.string(), "--test-manifest", d.json.at("test_manifest").get<std::string>(), "--runs",
             std::to_string(kSeeds), "--seed", "1", "--budget", budget, "--reference-scale", reference, "--out", bench_dir.string()}) != 0) {
        rep.outcome = {false, "bench failed"};
        return rep;
    }
    std::vector<std::string> stats{"stats", "--runs-csv", (bench_dir / "runs.csv").string()};
    for (const auto &l : train_logs) {
        stats.push_back("--train-log");
        stats.push_back(l);
    }
    if (cli(stats) != 0) {
        rep.outcome = {false, "stats failed"};
        return rep;
    }
    const auto file = bench::read_runs_csv(bench_dir / "runs.csv");
    const auto cmp = bench::compare_strategies(file.records);
    std::map<train::Strategy, std::vector<double>> costs;
    for (const auto &r : file.records) {
        if (!r.failed) {
            costs[r.strategy].push_back(static_cast<double>(r.final_cost));
        }
    }
    std::map<train::Strategy, double> median;
    for (const auto &[s, v] : costs) {
        median[s] = bench::quantile(v, 0.5);
    }
    double worst_baseline = -1;
    for (const auto s : {train::Strategy::ST, train::Strategy::RG, train::Strategy::LO}) {
        worst_baseline = std::max(worst_baseline, median.at(s));
    }
    int baseline_wins = 0, cl_over_st = 0;
    for (const auto &row : cmp.rows) {
        if (row.b == train::Strategy::CL && row.verdict == bench::Verdict::a_better) {
            ++baseline_wins;
        }
        if (row.a == train::Strategy::ST && row.b == train::Strategy::CL && row.verdict == bench::Verdict::b_better) {
            ++cl_over_st;
        }
    }
    const bool b_ok = median.at(train::Strategy::CL) <= worst_baseline && baseline_wins == 0;
    rep.cl_vs_st = "CL significantly better than ST on " + std::to_string(cl_over_st) + "/5 instances";

    std::string medians;
    for (const auto s : train::kAllStrategies) {
        medians += std::string(medians.empty() ? "" : " ") + std::string(train::strategy_name(s)) + "=" + fmt(median.at(s), 8);
    }
    rep.outcome = {a_ok && b_ok, "(a) seeds with >=2/" + std::to_string(transitions) + " rising transitions: " + std::to_string(step_seeds) +
                                     "/5 [per seed " + per_seed + "] " + (a_ok ? "ok" : "FAIL") + "; (b) median cost " + medians +
                                     ", baseline significant wins over CL " + std::to_string(baseline_wins) + " " + (b_ok ? "ok" : "FAIL")};
    return rep;
}

// 9 ---------------------------------------------------------------------------

Outcome audit_suite() {
    const auto &c = audit::counters();
    const auto moves = c.moves.load(), traces = c.traces.load(), solutions = c.solutions.load(), failures = c.failures.load();
    return {audit::enabled && moves > 0 && traces > 0 && solutions > 0 && failures == 0,
            std::string("audit build ") + (audit::enabled ? "yes" : "no") + ", checked moves " + std::to_string(moves) + ", traces " +
                std::to_string(traces) + ", solutions " + std::to_string(solutions) + ", failures " + std::to_string(failures)};
}

}  // namespace

int main(int argc, char **argv) {
    CLI::App app{"acceptance criteria"};
    std::string work = "acceptance_work";
    std::string desk_config;
    std::vector<int> only;
    app.add_option("--work-dir", work, "Scratch directory (wiped)");
    app.add_option("--desk-config", desk_config, "Desk experiment config")->required();
    app.add_option("--only", only, "Run only these criteria")->delimiter(',');
    CLI11_PARSE(app, argc, argv);

    const fs::path work_dir(work);
    fs::remove_all(work_dir);
    fs::create_directories(work_dir);

    auto wanted = [&](int k) { return only.empty() || std::find(only.begin(), only.end(), k) != only.end(); };
    int failed = 0, ran = 0, extra_failed = 0;
    std::vector<std::string> info;
    std::vector<std::pair<bool, std::string>> extra;
    auto run = [&](int k, const std::string &name, const std::function<Outcome()> &fn) {
        if (!wanted(k)) {
            return;
        }
        ++ran;
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = fn();
        } catch (const std::exception &e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        failed += o.pass ? 0 : 1;
        std::cout << (o.pass ? "PASS" : "FAIL") << "  criterion " << k << " " << name << " (" << fmt(secs, 3) << " s): " << o.detail
                  << std::endl;
    };

    run(1, "relative fitness exactness", relative_fitness_exact);
    run(2, "schedule exactness", schedules_exact);
    run(3, "protected division", protected_division);
    run(4, "move-delta oracle", move_deltas);
    run(5, "small-instance optimality", small_optimality);
    run(6, "rank-sum correctness", wilcoxon);

    Desk desk;
    if (wanted(7) || wanted(8)) {
        desk = prepare_desk(work_dir, desk_config);
    }
    run(7, "end-to-end determinism", [&] { return determinism(desk); });
    run(8, "curriculum trend", [&] {
        auto rep = curriculum_trend(desk);
        if (!rep.g3_vs_g2.empty()) {
            extra.emplace_back(rep.g3_ok, rep.g3_vs_g2);
        }
        if (!rep.cl_vs_st.empty()) {
            info.push_back(rep.cl_vs_st);
        }
        return rep.outcome;
    });
    run(9, "monotonicity audit", audit_suite);

    for (const auto &[ok, line] : extra) {
        extra_failed += ok ? 0 : 1;
        std::cout << (ok ? "PASS" : "FAIL") << "  " << line << '\n';
    }
    for (const auto &line : info) {
        std::cout << "INFO  " << line << '\n';
    }
    std::cout << (ran - failed) << "/" << ran << " criteria passed" << std::endl;
    return failed == 0 && extra_failed == 0 ? 0 : 1;
}
