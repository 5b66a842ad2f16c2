#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "vrpgp/evolution.hpp"
#include "vrpgp/gls.hpp"
#include "vrpgp/instance_io.hpp"

namespace vrpgp::train {

// Training-set schedules: stochastic per generation, random per block, largest
// only, and curriculum (ascending).
enum class Strategy { ST, RG, LO, CL };

inline constexpr std::array<Strategy, 4> kAllStrategies = {Strategy::ST, Strategy::RG, Strategy::LO, Strategy::CL};

std::string_view strategy_name(Strategy s);
Strategy parse_strategy(std::string_view text);  // throws ConfigError

struct CurriculumSchedule {
    std::vector<int> scales{100, 300, 600, 1000};
    int gens_per_scale = 3;
    Strategy strategy = Strategy::CL;
    std::uint64_t seed = 0;

    int total_generations() const noexcept { return static_cast<int>(scales.size()) * gens_per_scale; }
    void check() const;  // ConfigError
};

// Throws ContractError for g outside [0, total_generations()).
int scale_for_generation(const CurriculumSchedule &schedule, int g);
std::vector<int> scale_sequence(const CurriculumSchedule &schedule);

// (final - init) / init. Throws ContractError for init <= 0.
double relative_fitness(double init_cost, double final_cost);

// Per-instance solver budget proportional to the instance scale:
// budget(scale) = base * scale / reference_scale.
struct BudgetRule {
    gls::Budget::Mode mode = gls::Budget::Mode::move_count;
    double base = 10000;
    int reference_scale = 100;

    gls::Budget for_scale(int scale) const;
    // "time:5" or "moves:10000".
    static BudgetRule parse(const std::string &text, int reference_scale = 100);
    std::string to_string() const;
    bool deterministic() const noexcept { return mode == gls::Budget::Mode::move_count; }
};

class EvaluationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct EvalSettings {
    BudgetRule budget;
    double lambda_alpha = gls::kDefaultLambdaAlpha;
};

// Mean relative fitness over the instances, one GLS run each. Per-instance
// solver seeds come from (seed, instance id).
double evaluate_individual(const gls::UtilityFn &util, std::span<const gls::PreparedInstance> instances,
                           const EvalSettings &settings, std::uint64_t seed, std::vector<double> *per_instance = nullptr);

struct TrainerConfig {
    int population_size = 100;
    gp::VariationRates rates;
    int tournament_size = gp::kTournamentSize;
    int init_depth_min = 2;
    int init_depth_max = 6;
    int max_depth = gp::kMaxDepth;
    EvalSettings eval;
    int neighbors = gls::kDefaultNeighbors;
    int instances_per_scale = 3;
    CurriculumSchedule schedule;
    std::uint64_t master_seed = 0;
    int workers = 1;

    void check() const;  // ConfigError
};

// Scale -> the fixed training instances used whenever that scale is scheduled.
using TrainingSets = std::map<int, std::vector<gls::PreparedInstance>>;

// Loads the first `per_scale` instances of every scheduled scale. Throws
// ConfigError naming the first scale the manifest cannot cover.
TrainingSets load_training_sets(const io::Manifest &manifest, const std::vector<int> &scales, int per_scale, int neighbors);

struct GenerationLog {
    int generation = 0;
    int scale = 0;
    std::vector<double> fitness;
    std::vector<std::string> trees;
    double mean_fitness = 0;
    double best_fitness = 0;
    std::size_t best_index = 0;
    int evaluations = 0;  // solver evaluations actually run (cache and elite hits excluded)
    double wall_time = 0; // seconds since training started
};

struct ScaleBest {
    double fitness = 0;
    int generation = 0;
    std::string tree;
};

struct TrainLog {
    std::vector<GenerationLog> generations;
    std::map<int, ScaleBest> per_scale_best;
};

struct TrainResult {
    gp::Individual best;
    int best_scale = 0;
    int best_generation = 0;
    gp::Individual final_best;  // best of the last generation
    TrainLog log;
};

using ProgressFn = std::function<void(const GenerationLog &)>;

TrainResult train(const TrainerConfig &config, const TrainingSets &sets, const ProgressFn &progress = {});

// generation,scale,mean_fitness,best_fitness,wall_time. The wall_time column is
// left empty when with_wall_time is false so that move-budget logs are reproducible.
void write_train_log_csv(std::ostream &out, const TrainLog &log, bool with_wall_time);
// One JSON object per individual: {"generation", "index", "tree", "fitness"}.
void write_population_jsonl(std::ostream &out, const TrainLog &log);

}  // namespace vrpgp::train
