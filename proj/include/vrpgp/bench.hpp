#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "vrpgp/expr_tree.hpp"
#include "vrpgp/gls.hpp"
#include "vrpgp/trainer.hpp"

namespace vrpgp::bench {

using train::Strategy;

struct RunRecord {
    Strategy strategy = Strategy::CL;
    std::string instance;
    int run = 0;
    std::uint64_t seed = 0;
    std::int64_t init_cost = 0;
    std::int64_t final_cost = 0;
    double fitness = 0;
    double wall_time = 0;
    bool failed = false;
    std::string error;

    // Equality ignores wall_time.
    friend bool operator==(const RunRecord &a, const RunRecord &b) {
        return a.strategy == b.strategy && a.instance == b.instance && a.run == b.run && a.seed == b.seed &&
               a.init_cost == b.init_cost && a.final_cost == b.final_cost && a.fitness == b.fitness && a.failed == b.failed &&
               a.error == b.error;
    }
};

// Either one tree per strategy (used for every run) or exactly `runs` trees,
// tree k driving run k.
using StrategyTrees = std::map<Strategy, std::vector<gp::ExprTree>>;

struct BenchConfig {
    int runs = 30;
    train::BudgetRule budget;
    double lambda_alpha = gls::kDefaultLambdaAlpha;
    std::uint64_t base_seed = 0;
    int workers = 1;
};

std::uint64_t run_seed(std::uint64_t base_seed, Strategy s, const std::string &instance, int run) noexcept;

// Complete factorial design, records ordered by (strategy, instance, run).
// Solver failures become failed records. Throws ContractError on an empty
// instance list, a strategy without trees, or a tree count other than 1 or runs.
std::vector<RunRecord> run_benchmark(const StrategyTrees &trees, std::span<const gls::PreparedInstance> instances,
                                     const BenchConfig &config);

struct RankSumResult {
    double statistic = 0;  // rank sum of the first sample (midranks)
    double p = 1;          // two-sided
    bool exact = false;
};

inline constexpr int kExactLimit = 16;

// Throws ContractError if either sample has fewer than 2 values.
RankSumResult wilcoxon_rank_sum(std::span<const double> a, std::span<const double> b);
// Branch-forcing variants, exposed for cross-checks.
double rank_sum_p_exact(std::span<const double> a, std::span<const double> b);   // tie-free samples only
double rank_sum_p_normal(std::span<const double> a, std::span<const double> b);

enum class Verdict { a_better, b_better, none };
std::string_view verdict_name(Verdict v);

struct ComparisonResult {
    std::string instance;
    Strategy a = Strategy::ST;
    Strategy b = Strategy::RG;
    double statistic = 0;
    double p = 1;
    Verdict verdict = Verdict::none;
};

struct PairSummary {
    int a_better = 0;
    int b_better = 0;
    int instances = 0;
};

struct Comparisons {
    std::vector<ComparisonResult> rows;
    std::map<std::pair<Strategy, Strategy>, PairSummary> summary;
};

// Tests final costs (lower is better) per instance for every strategy pair in
// ST, RG, LO, CL order. Failed records are dropped first; afterwards every
// (strategy, instance) cell must hold the same number of runs (ContractError).
Comparisons compare_strategies(std::span<const RunRecord> records, double alpha = 0.05);
std::string summary_line(const Comparisons &c);

// Linear interpolation between order statistics: h = (n - 1) p.
double quantile(std::vector<double> values, double p);

struct BoxStats {
    Strategy strategy = Strategy::CL;
    std::size_t n = 0;
    double min = 0, q1 = 0, median = 0, q3 = 0, max = 0;
    double whisker_low = 0, whisker_high = 0;  // most extreme points within 1.5 IQR
    std::vector<double> outliers;
};

BoxStats box_stats(Strategy s, std::vector<double> values);
// Over non-failed fitness values, one entry per strategy present.
std::vector<BoxStats> boxplot(std::span<const RunRecord> records);

struct ReportHeader {
    std::uint64_t base_seed = 0;
    std::string budget;
    std::string comment() const;  // "# base_seed=...,budget=..."
};

struct TrainSeries {
    std::string label;
    train::TrainLog log;
};

// wall_time is written only for wall-clock budgets; move-budget files stay byte-reproducible.
void write_runs_csv(std::ostream &out, const ReportHeader &h, std::span<const RunRecord> records, bool with_wall_time);
void write_comparisons_csv(std::ostream &out, const ReportHeader &h, const Comparisons &c);
void write_boxplot_csv(std::ostream &out, const ReportHeader &h, std::span<const BoxStats> boxes);
void write_gen_fitness_csv(std::ostream &out, const ReportHeader &h, std::span<const TrainSeries> series);

struct RunsFile {
    ReportHeader header;
    std::vector<RunRecord> records;
};
// Throws ParseError.
RunsFile read_runs_csv(std::istream &in);
RunsFile read_runs_csv(const std::filesystem::path &path);

// Reads back the generation,scale,mean_fitness,best_fitness,wall_time file.
train::TrainLog read_train_log_csv(const std::filesystem::path &path);

// Writes runs.csv, comparisons.csv, boxplot_data.csv and, with series, gen_fitness.csv.
// Throws IoError naming the file.
void emit_report(std::span<const RunRecord> records, const Comparisons &comparisons, const ReportHeader &header,
                 const std::filesystem::path &out_dir, bool with_wall_time, std::span<const TrainSeries> series = {});

}  // namespace vrpgp::bench
