#include "vrpgp/trainer.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <ostream>
#include <sstream>
#include <unordered_map>

#include <json.hpp>

#include "vrpgp/errors.hpp"
#include "vrpgp/parallel.hpp"
#include "vrpgp/rng.hpp"
#include "vrpgp/text.hpp"

namespace vrpgp::train {

std::string_view strategy_name(Strategy s) {
    switch (s) {
    case Strategy::ST: return "ST";
    case Strategy::RG: return "RG";
    case Strategy::LO: return "LO";
    case Strategy::CL: return "CL";
    }
    return "?";
}

Strategy parse_strategy(std::string_view text) {
    for (const auto s : kAllStrategies) {
        if (strategy_name(s) == text) {
            return s;
        }
    }
    throw ConfigError("unknown strategy '" + std::string(text) + "' (expected ST, RG, LO or CL)");
}

void CurriculumSchedule::check() const {
    if (scales.empty()) {
        throw ConfigError("schedule: scales must be non-empty");
    }
    if (gens_per_scale < 1) {
        throw ConfigError("schedule: gens_per_scale must be >= 1");
    }
    for (const int s : scales) {
        if (s < 1) {
            throw ConfigError("schedule: scales must be positive");
        }
    }
}

int scale_for_generation(const CurriculumSchedule &schedule, int g) {
    if (g < 0 || g >= schedule.total_generations()) {
        throw ContractError("scale_for_generation: generation " + std::to_string(g) + " outside [0, " +
                            std::to_string(schedule.total_generations()) + ")");
    }
    const auto &scales = schedule.scales;
    switch (schedule.strategy) {
    case Strategy::CL: return scales[static_cast<std::size_t>(g / schedule.gens_per_scale)];
    case Strategy::LO: return *std::max_element(scales.begin(), scales.end());
    case Strategy::ST: {
        Rng rng(derive_seed(schedule.seed, {hash_tag("ST"), static_cast<std::uint64_t>(g)}));
        return scales[rng.index(scales.size())];
    }
    case Strategy::RG: {
        const auto block = static_cast<std::uint64_t>(g / schedule.gens_per_scale);
        Rng rng(derive_seed(schedule.seed, {hash_tag("RG"), block}));
        return scales[rng.index(scales.size())];
    }
    }
    throw ContractError("scale_for_generation: bad strategy");
}

std::vector<int> scale_sequence(const CurriculumSchedule &schedule) {
    std::vector<int> out;
    for (int g = 0; g < schedule.total_generations(); ++g) {
        out.push_back(scale_for_generation(schedule, g));
    }
    return out;
}

double relative_fitness(double init_cost, double final_cost) {
    if (!(init_cost > 0)) {
        throw ContractError("relative_fitness: init_cost must be positive");
    }
    return (final_cost - init_cost) / init_cost;
}

gls::Budget BudgetRule::for_scale(int scale) const {
    if (reference_scale < 1) {
        throw ParameterError("budget reference scale must be >= 1");
    }
    const double amount = base * static_cast<double>(scale) / reference_scale;
    gls::Budget b = mode == gls::Budget::Mode::move_count ? gls::Budget::moves(std::llround(amount)) : gls::Budget::seconds(amount);
    b.check();
    return b;
}

BudgetRule BudgetRule::parse(const std::string &text, int reference_scale) {
    const auto b = gls::Budget::parse(text);
    if (reference_scale < 1) {
        throw ParameterError("budget reference scale must be >= 1");
    }
    return {b.mode, b.limit, reference_scale};
}

std::string BudgetRule::to_string() const {
    return gls::Budget{mode, base}.to_string() + "@" + std::to_string(reference_scale);
}

double evaluate_individual(const gls::UtilityFn &util, std::span<const gls::PreparedInstance> instances,
                           const EvalSettings &settings, std::uint64_t seed, std::vector<double> *per_instance) {
    if (instances.empty()) {
        throw ContractError("evaluate_individual: no training instances");
    }
    double total = 0;
    if (per_instance != nullptr) {
        per_instance->clear();
    }
    for (const auto &p : instances) {
        gls::GlsParams params;
        params.lambda_alpha = settings.lambda_alpha;
        params.budget = settings.budget.for_scale(p.instance.customer_count());
        params.seed = derive_seed(seed, {hash_tag(p.instance.id)});
        double f = 0;
        try {
            const auto res = gls::guided_local_search(p, util, params);
            f = relative_fitness(static_cast<double>(res.init_cost), static_cast<double>(res.final_cost));
        } catch (const std::exception &e) {
            throw EvaluationError("instance " + p.instance.id + ": " + e.what());
        }
        if (per_instance != nullptr) {
            per_instance->push_back(f);
        }
        total += f;
    }
    return total / static_cast<double>(instances.size());
}

void TrainerConfig::check() const {
    if (population_size < 1) {
        throw ConfigError("population_size must be >= 1");
    }
    rates.check();
    if (tournament_size < 1) {
        throw ConfigError("tournament_size must be >= 1");
    }
    if (init_depth_min < 1 || init_depth_max < init_depth_min) {
        throw ConfigError("initial depths must satisfy 1 <= min <= max");
    }
    if (max_depth < init_depth_max) {
        throw ConfigError("max_depth must be >= init_depth_max");
    }
    if (instances_per_scale < 1) {
        throw ConfigError("instances_per_scale must be >= 1");
    }
    if (neighbors < 1) {
        throw ConfigError("neighbors must be >= 1");
    }
    if (!(eval.lambda_alpha >= 0)) {
        throw ConfigError("lambda_alpha must be non-negative");
    }
    if (eval.budget.reference_scale < 1 || !(eval.budget.base >= 0) || !std::isfinite(eval.budget.base)) {
        throw ConfigError("budget must be non-negative with reference scale >= 1");
    }
    schedule.check();
}

TrainingSets load_training_sets(const io::Manifest &manifest, const std::vector<int> &scales, int per_scale, int neighbors) {
    TrainingSets sets;
    for (const int scale : scales) {
        if (sets.count(scale) != 0) {
            continue;
        }
        const auto paths = manifest.resolved(scale);
        if (static_cast<int>(paths.size()) < per_scale) {
            throw ConfigError("manifest has " + std::to_string(paths.size()) + " instances for scale " + std::to_string(scale) +
                              ", need " + std::to_string(per_scale));
        }
        auto &set = sets[scale];
        for (int k = 0; k < per_scale; ++k) {
            set.push_back(gls::PreparedInstance::make(io::read_tsplib(paths[static_cast<std::size_t>(k)]), neighbors));
        }
    }
    return sets;
}

TrainResult train(const TrainerConfig &config, const TrainingSets &sets, const ProgressFn &progress) {
    config.check();
    const auto sequence = scale_sequence(config.schedule);
    for (const int scale : sequence) {
        const auto it = sets.find(scale);
        if (it == sets.end() || static_cast<int>(it->second.size()) < config.instances_per_scale) {
            throw ConfigError("training sets do not cover scale " + std::to_string(scale));
        }
    }

    using clock = std::chrono::steady_clock;
    const auto start = clock::now();
    const bool cacheable = config.eval.budget.deterministic();

    Rng init_rng(derive_seed(config.master_seed, {hash_tag("init")}));
    gp::Population pop = gp::ramped_half_and_half(config.population_size, config.init_depth_min, config.init_depth_max, init_rng);

    TrainResult result;
    bool have_best = false;
    int prev_scale = -1;
    std::unordered_map<std::string, double> cache;  // tree text -> fitness at the current scale

    for (int g = 0; g < static_cast<int>(sequence.size()); ++g) {
        const int scale = sequence[static_cast<std::size_t>(g)];
        if (scale != prev_scale) {
            for (auto &ind : pop) {
                ind.fitness.reset();
            }
            cache.clear();
            prev_scale = scale;
        }
        const auto &all = sets.at(scale);
        const std::span<const gls::PreparedInstance> instances(all.data(), static_cast<std::size_t>(config.instances_per_scale));
        const auto eval_seed = derive_seed(config.master_seed, {hash_tag("eval"), static_cast<std::uint64_t>(scale)});

        GenerationLog entry;
        entry.generation = g;
        entry.scale = scale;
        entry.trees.reserve(pop.size());
        for (const auto &ind : pop) {
            entry.trees.push_back(ind.tree.to_string());
        }

        // Distinct unevaluated trees, in population order.
        std::vector<std::size_t> todo;
        std::unordered_map<std::string, std::size_t> first_seen;
        for (std::size_t i = 0; i < pop.size(); ++i) {
            if (pop[i].fitness) {
                continue;
            }
            const auto &key = entry.trees[i];
            if (cacheable) {
                if (const auto hit = cache.find(key); hit != cache.end()) {
                    pop[i].fitness = hit->second;
                    continue;
                }
                if (first_seen.emplace(key, i).second) {
                    todo.push_back(i);
                }
            } else {
                todo.push_back(i);
            }
        }
        std::vector<double> results(todo.size());
        parallel_for(todo.size(), config.workers, [&](std::size_t k) {
            results[k] = evaluate_individual(gp::as_utility(pop[todo[k]].tree), instances, config.eval, eval_seed);
        });
        for (std::size_t k = 0; k < todo.size(); ++k) {
            pop[todo[k]].fitness = results[k];
            if (cacheable) {
                cache[entry.trees[todo[k]]] = results[k];
            }
        }
        for (auto &ind : pop) {
            if (!ind.fitness) {
                ind.fitness = cache.at(ind.tree.to_string());
            }
        }
        entry.evaluations = static_cast<int>(todo.size());

        entry.fitness.reserve(pop.size());
        std::size_t best_i = 0;
        for (std::size_t i = 0; i < pop.size(); ++i) {
            entry.fitness.push_back(*pop[i].fitness);
            if (*pop[i].fitness < *pop[best_i].fitness) {
                best_i = i;
            }
        }
        entry.mean_fitness = std::accumulate(entry.fitness.begin(), entry.fitness.end(), 0.0) / static_cast<double>(pop.size());
        entry.best_fitness = *pop[best_i].fitness;
        entry.best_index = best_i;
        entry.wall_time = std::chrono::duration<double>(clock::now() - start).count();

        // Best-ever: judged on the largest scale evaluated so far, ties to the latest generation.
        const double bf = *pop[best_i].fitness;
        if (!have_best || scale > result.best_scale || (scale == result.best_scale && bf <= *result.best.fitness)) {
            result.best = pop[best_i];
            result.best_scale = scale;
            result.best_generation = g;
            have_best = true;
        }
        auto [it, inserted] = result.log.per_scale_best.try_emplace(scale, ScaleBest{bf, g, entry.trees[best_i]});
        if (!inserted && bf <= it->second.fitness) {
            it->second = ScaleBest{bf, g, entry.trees[best_i]};
        }
        result.final_best = pop[best_i];

        if (progress) {
            progress(entry);
        }
        result.log.generations.push_back(std::move(entry));

        if (g + 1 < static_cast<int>(sequence.size())) {
            Rng vary_rng(derive_seed(config.master_seed, {hash_tag("vary"), static_cast<std::uint64_t>(g)}));
            pop = gp::next_generation(pop, config.rates, vary_rng, config.tournament_size, config.max_depth);
        }
    }
    return result;
}

void write_train_log_csv(std::ostream &out, const TrainLog &log, bool with_wall_time) {
    out << "generation,scale,mean_fitness,best_fitness,wall_time\n";
    for (const auto &g : log.generations) {
        out << g.generation << ',' << g.scale << ',' << format_double(g.mean_fitness) << ',' << format_double(g.best_fitness)
            << ',';
        if (with_wall_time) {
            out << format_double(g.wall_time);
        }
        out << '\n';
    }
}

void write_population_jsonl(std::ostream &out, const TrainLog &log) {
    for (const auto &g : log.generations) {
        for (std::size_t i = 0; i < g.trees.size(); ++i) {
            nlohmann::ordered_json j;
            j["generation"] = g.generation;
            j["index"] = i;
            j["tree"] = g.trees[i];
            j["fitness"] = g.fitness[i];
            out << j.dump() << '\n';
        }
    }
}

}  // namespace vrpgp::train
