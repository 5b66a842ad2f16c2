#include "vrpgp/bench.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>
#include <set>
#include <sstream>

#include "vrpgp/errors.hpp"
#include "vrpgp/parallel.hpp"
#include "vrpgp/rng.hpp"
#include "vrpgp/text.hpp"

namespace vrpgp::bench {

std::uint64_t run_seed(std::uint64_t base_seed, Strategy s, const std::string &instance, int run) noexcept {
    return derive_seed(base_seed, {hash_tag(train::strategy_name(s)), hash_tag(instance), static_cast<std::uint64_t>(run)});
}

namespace {

std::string sanitize(std::string s) {
    for (auto &c : s) {
        if (c == ',' || c == '\n' || c == '\r' || c == '"') {
            c = ' ';
        }
    }
    return s;
}

}  // namespace

std::vector<RunRecord> run_benchmark(const StrategyTrees &trees, std::span<const gls::PreparedInstance> instances,
                                     const BenchConfig &config) {
    if (instances.empty()) {
        throw ContractError("run_benchmark: empty instance list");
    }
    if (trees.empty()) {
        throw ContractError("run_benchmark: no strategies");
    }
    if (config.runs < 1) {
        throw ContractError("run_benchmark: runs must be >= 1");
    }
    for (const auto &[s, list] : trees) {
        if (list.size() != 1 && static_cast<int>(list.size()) != config.runs) {
            throw ContractError("run_benchmark: strategy " + std::string(train::strategy_name(s)) + " has " +
                                std::to_string(list.size()) + " trees, expected 1 or " + std::to_string(config.runs));
        }
    }

    std::vector<RunRecord> records;
    std::vector<const gp::ExprTree *> record_tree;
    std::vector<const gls::PreparedInstance *> record_instance;
    for (const auto &[s, list] : trees) {
        for (const auto &p : instances) {
            for (int r = 0; r < config.runs; ++r) {
                RunRecord rec;
                rec.strategy = s;
                rec.instance = p.instance.id;
                rec.run = r;
                rec.seed = run_seed(config.base_seed, s, p.instance.id, r);
                records.push_back(std::move(rec));
                record_tree.push_back(&list[list.size() == 1 ? 0 : static_cast<std::size_t>(r)]);
                record_instance.push_back(&p);
            }
        }
    }

    parallel_for(records.size(), config.workers, [&](std::size_t k) {
        auto &rec = records[k];
        const auto &p = *record_instance[k];
        const auto start = std::chrono::steady_clock::now();
        try {
            gls::GlsParams params;
            params.lambda_alpha = config.lambda_alpha;
            params.budget = config.budget.for_scale(p.instance.customer_count());
            params.seed = rec.seed;
            const auto res = gls::guided_local_search(p, gp::as_utility(*record_tree[k]), params);
            rec.init_cost = res.init_cost;
            rec.final_cost = res.final_cost;
            rec.fitness = train::relative_fitness(static_cast<double>(res.init_cost), static_cast<double>(res.final_cost));
        } catch (const std::exception &e) {
            rec.failed = true;
            rec.error = sanitize(e.what());
        }
        rec.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    });
    return records;
}

namespace {

void check_samples(std::span<const double> a, std::span<const double> b) {
    if (a.size() < 2 || b.size() < 2) {
        throw ContractError("wilcoxon_rank_sum: each sample needs at least 2 values");
    }
    for (const double v : a) {
        if (!std::isfinite(v)) {
            throw ContractError("wilcoxon_rank_sum: non-finite value");
        }
    }
    for (const double v : b) {
        if (!std::isfinite(v)) {
            throw ContractError("wilcoxon_rank_sum: non-finite value");
        }
    }
}

struct Ranked {
    double rank_sum_a = 0;
    double tie_term = 0;  // sum of t^3 - t over tie groups
    bool ties = false;
};

Ranked rank(std::span<const double> a, std::span<const double> b) {
    std::vector<std::pair<double, bool>> all;
    all.reserve(a.size() + b.size());
    for (const double v : a) {
        all.emplace_back(v, true);
    }
    for (const double v : b) {
        all.emplace_back(v, false);
    }
    std::sort(all.begin(), all.end(), [](const auto &x, const auto &y) { return x.first < y.first; });
    Ranked out;
    for (std::size_t i = 0; i < all.size();) {
        std::size_t j = i;
        while (j < all.size() && all[j].first == all[i].first) {
            ++j;
        }
        const double t = static_cast<double>(j - i);
        const double mid = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
        for (std::size_t k = i; k < j; ++k) {
            if (all[k].second) {
                out.rank_sum_a += mid;
            }
        }
        if (t > 1) {
            out.ties = true;
            out.tie_term += t * t * t - t;
        }
        i = j;
    }
    return out;
}

}  // namespace

double rank_sum_p_exact(std::span<const double> a, std::span<const double> b) {
    check_samples(a, b);
    const auto r = rank(a, b);
    if (r.ties) {
        throw ContractError("rank_sum_p_exact: samples contain ties");
    }
    const std::size_t n1 = a.size();
    const std::size_t total = a.size() + b.size();
    const std::size_t max_sum = total * (total + 1) / 2;
    // ways[k][s]: subsets of size k of {1..m} with rank sum s.
    std::vector<std::vector<double>> ways(n1 + 1, std::vector<double>(max_sum + 1, 0.0));
    ways[0][0] = 1;
    for (std::size_t m = 1; m <= total; ++m) {
        for (std::size_t k = std::min(m, n1); k >= 1; --k) {
            for (std::size_t s = max_sum; s >= m; --s) {
                ways[k][s] += ways[k - 1][s - m];
            }
        }
    }
    const auto w = static_cast<std::size_t>(std::llround(r.rank_sum_a));
    double all = 0, low = 0, high = 0;
    for (std::size_t s = 0; s <= max_sum; ++s) {
        all += ways[n1][s];
        if (s <= w) {
            low += ways[n1][s];
        }
        if (s >= w) {
            high += ways[n1][s];
        }
    }
    return std::min(1.0, 2.0 * std::min(low, high) / all);
}

double rank_sum_p_normal(std::span<const double> a, std::span<const double> b) {
    check_samples(a, b);
    const auto r = rank(a, b);
    const double n1 = static_cast<double>(a.size());
    const double n2 = static_cast<double>(b.size());
    const double n = n1 + n2;
    const double u = r.rank_sum_a - n1 * (n1 + 1) / 2;
    const double mu = n1 * n2 / 2;
    const double var = n1 * n2 / 12.0 * ((n + 1) - r.tie_term / (n * (n - 1)));
    if (!(var > 0)) {
        return 1.0;
    }
    const double z = std::max(0.0, std::abs(u - mu) - 0.5) / std::sqrt(var);
    return std::min(1.0, std::erfc(z / std::sqrt(2.0)));
}

RankSumResult wilcoxon_rank_sum(std::span<const double> a, std::span<const double> b) {
    check_samples(a, b);
    const auto r = rank(a, b);
    RankSumResult out;
    out.statistic = r.rank_sum_a;
    if (!r.ties && a.size() + b.size() <= kExactLimit) {
        out.exact = true;
        out.p = rank_sum_p_exact(a, b);
    } else {
        out.p = rank_sum_p_normal(a, b);
    }
    return out;
}

std::string_view verdict_name(Verdict v) {
    switch (v) {
    case Verdict::a_better: return "a_better";
    case Verdict::b_better: return "b_better";
    case Verdict::none: return "none";
    }
    return "none";
}

double quantile(std::vector<double> values, double p) {
    if (values.empty()) {
        throw ContractError("quantile: empty sample");
    }
    std::sort(values.begin(), values.end());
    const double h = (static_cast<double>(values.size()) - 1) * p;
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const auto hi = std::min(lo + 1, values.size() - 1);
    return values[lo] + (h - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

Comparisons compare_strategies(std::span<const RunRecord> records, double alpha) {
    // instance (first-appearance order) -> strategy -> final costs
    std::vector<std::string> instances;
    std::map<std::string, std::map<Strategy, std::vector<double>>> cells;
    for (const auto &r : records) {
        if (r.failed) {
            continue;
        }
        if (cells.find(r.instance) == cells.end()) {
            instances.push_back(r.instance);
        }
        cells[r.instance][r.strategy].push_back(static_cast<double>(r.final_cost));
    }
    std::set<Strategy> strategies;
    for (const auto &[inst, per] : cells) {
        for (const auto &[s, v] : per) {
            strategies.insert(s);
        }
    }
    std::optional<std::size_t> runs;
    for (const auto &inst : instances) {
        for (const auto s : strategies) {
            const auto it = cells[inst].find(s);
            const std::size_t n = it == cells[inst].end() ? 0 : it->second.size();
            if (!runs) {
                runs = n;
            }
            if (n != *runs) {
                throw ContractError("compare_strategies: unbalanced design, " + std::string(train::strategy_name(s)) + " on " +
                                    inst + " has " + std::to_string(n) + " runs, expected " + std::to_string(*runs));
            }
        }
    }

    Comparisons out;
    const std::vector<Strategy> order(strategies.begin(), strategies.end());
    for (std::size_t i = 0; i < order.size(); ++i) {
        for (std::size_t j = i + 1; j < order.size(); ++j) {
            out.summary[{order[i], order[j]}];
        }
    }
    for (const auto &inst : instances) {
        for (std::size_t i = 0; i < order.size(); ++i) {
            for (std::size_t j = i + 1; j < order.size(); ++j) {
                const auto &va = cells[inst][order[i]];
                const auto &vb = cells[inst][order[j]];
                const auto t = wilcoxon_rank_sum(va, vb);
                ComparisonResult c{inst, order[i], order[j], t.statistic, t.p, Verdict::none};
                if (t.p < alpha) {
                    const double ma = quantile(va, 0.5);
                    const double mb = quantile(vb, 0.5);
                    if (ma != mb) {
                        c.verdict = ma < mb ? Verdict::a_better : Verdict::b_better;
                    } else {
                        const double na = static_cast<double>(va.size());
                        const double nb = static_cast<double>(vb.size());
                        const double mean_a = t.statistic / na;
                        const double mean_b = ((na + nb) * (na + nb + 1) / 2 - t.statistic) / nb;
                        if (mean_a != mean_b) {
                            c.verdict = mean_a < mean_b ? Verdict::a_better : Verdict::b_better;
                        }
                    }
                }
                auto &sum = out.summary[{c.a, c.b}];
                ++sum.instances;
                sum.a_better += c.verdict == Verdict::a_better;
                sum.b_better += c.verdict == Verdict::b_better;
                out.rows.push_back(std::move(c));
            }
        }
    }
    return out;
}

std::string summary_line(const Comparisons &c) {
    std::ostringstream os;
    bool first = true;
    for (const auto &[pair, s] : c.summary) {
        if (!first) {
            os << "; ";
        }
        first = false;
        const auto a = train::strategy_name(pair.first);
        const auto b = train::strategy_name(pair.second);
        os << a << " vs " << b << ": " << a << " better on " << s.a_better << "/" << s.instances << ", " << b << " better on "
           << s.b_better << "/" << s.instances;
    }
    return os.str();
}

BoxStats box_stats(Strategy s, std::vector<double> values) {
    if (values.empty()) {
        throw ContractError("box_stats: empty sample");
    }
    std::sort(values.begin(), values.end());
    BoxStats b;
    b.strategy = s;
    b.n = values.size();
    b.min = values.front();
    b.max = values.back();
    b.q1 = quantile(values, 0.25);
    b.median = quantile(values, 0.5);
    b.q3 = quantile(values, 0.75);
    const double iqr = b.q3 - b.q1;
    const double lo_fence = b.q1 - 1.5 * iqr;
    const double hi_fence = b.q3 + 1.5 * iqr;
    b.whisker_low = b.max;
    b.whisker_high = b.min;
    for (const double v : values) {
        if (v < lo_fence || v > hi_fence) {
            b.outliers.push_back(v);
        } else {
            b.whisker_low = std::min(b.whisker_low, v);
            b.whisker_high = std::max(b.whisker_high, v);
        }
    }
    return b;
}

std::vector<BoxStats> boxplot(std::span<const RunRecord> records) {
    std::map<Strategy, std::vector<double>> by;
    for (const auto &r : records) {
        if (!r.failed) {
            by[r.strategy].push_back(r.fitness);
        }
    }
    std::vector<BoxStats> out;
    for (auto &[s, v] : by) {
        out.push_back(box_stats(s, std::move(v)));
    }
    return out;
}

std::string ReportHeader::comment() const {
    return "# base_seed=" + std::to_string(base_seed) + ",budget=" + budget;
}

void write_runs_csv(std::ostream &out, const ReportHeader &h, std::span<const RunRecord> records, bool with_wall_time) {
    out << h.comment() << '\n';
    out << "strategy,instance,run,seed,init_cost,final_cost,fitness,wall_time,status,error\n";
    for (const auto &r : records) {
        out << train::strategy_name(r.strategy) << ',' << r.instance << ',' << r.run << ',' << r.seed << ',' << r.init_cost << ','
            << r.final_cost << ',' << format_double(r.fitness) << ',';
        if (with_wall_time) {
            out << format_double(r.wall_time);
        }
        out << ',' << (r.failed ? "failed" : "ok") << ',' << sanitize(r.error) << '\n';
    }
}

void write_comparisons_csv(std::ostream &out, const ReportHeader &h, const Comparisons &c) {
    out << h.comment() << '\n';
    out << "instance,strategy_a,strategy_b,rank_sum,p_value,verdict\n";
    for (const auto &r : c.rows) {
        out << r.instance << ',' << train::strategy_name(r.a) << ',' << train::strategy_name(r.b) << ',' << format_double(r.statistic)
            << ',' << format_double(r.p) << ',' << verdict_name(r.verdict) << '\n';
    }
}

void write_boxplot_csv(std::ostream &out, const ReportHeader &h, std::span<const BoxStats> boxes) {
    out << h.comment() << '\n';
    out << "# quartiles: linear interpolation, h = (n-1)p; whiskers: extreme points within 1.5*IQR; outliers ';'-separated\n";
    out << "strategy,n,min,q1,median,q3,max,whisker_low,whisker_high,outliers\n";
    for (const auto &b : boxes) {
        out << train::strategy_name(b.strategy) << ',' << b.n << ',' << format_double(b.min) << ',' << format_double(b.q1) << ','
            << format_double(b.median) << ',' << format_double(b.q3) << ',' << format_double(b.max) << ','
            << format_double(b.whisker_low) << ',' << format_double(b.whisker_high) << ',';
        for (std::size_t i = 0; i < b.outliers.size(); ++i) {
            out << (i ? ";" : "") << format_double(b.outliers[i]);
        }
        out << '\n';
    }
}

void write_gen_fitness_csv(std::ostream &out, const ReportHeader &h, std::span<const TrainSeries> series) {
    out << h.comment() << '\n';
    out << "series,generation,scale,mean_fitness,best_fitness\n";
    for (const auto &s : series) {
        for (const auto &g : s.log.generations) {
            out << sanitize(s.label) << ',' << g.generation << ',' << g.scale << ',' << format_double(g.mean_fitness) << ','
                << format_double(g.best_fitness) << '\n';
        }
    }
}

namespace {

template <typename T>
T parse_number(const std::string &text, const char *section, int line, const char *field) {
    T v{};
    const auto *end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, v);
    if (ec != std::errc() || ptr != end) {
        throw ParseError(section, line, std::string("bad ") + field + " '" + text + "'");
    }
    return v;
}

double parse_real(const std::string &text, const char *section, int line, const char *field) {
    if (text == "nan") {
        return std::nan("");
    }
    return parse_number<double>(text, section, line, field);
}

}  // namespace

RunsFile read_runs_csv(std::istream &in) {
    RunsFile file;
    std::string line;
    int lineno = 0;
    bool seen_header = false;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (line.empty()) {
            continue;
        }
        if (line[0] == '#') {
            if (lineno == 1) {
                const auto body = line.substr(line.find_first_not_of("# "));
                for (const auto &kv : split(body, ',')) {
                    const auto eq = kv.find('=');
                    if (eq == std::string::npos) {
                        continue;
                    }
                    const auto key = kv.substr(0, eq);
                    const auto val = kv.substr(eq + 1);
                    if (key == "base_seed") {
                        file.header.base_seed = parse_number<std::uint64_t>(val, "runs", lineno, "base_seed");
                    } else if (key == "budget") {
                        file.header.budget = val;
                    }
                }
            }
            continue;
        }
        if (!seen_header) {
            if (line.rfind("strategy,instance,run,seed,init_cost,final_cost,fitness", 0) != 0) {
                throw ParseError("runs", lineno, "missing header row");
            }
            seen_header = true;
            continue;
        }
        const auto f = split(line, ',');
        if (f.size() != 10) {
            throw ParseError("runs", lineno, "expected 10 fields, got " + std::to_string(f.size()));
        }
        RunRecord r;
        try {
            r.strategy = train::parse_strategy(f[0]);
        } catch (const ConfigError &e) {
            throw ParseError("runs", lineno, e.what());
        }
        r.instance = f[1];
        r.run = parse_number<int>(f[2], "runs", lineno, "run");
        r.seed = parse_number<std::uint64_t>(f[3], "runs", lineno, "seed");
        r.init_cost = parse_number<std::int64_t>(f[4], "runs", lineno, "init_cost");
        r.final_cost = parse_number<std::int64_t>(f[5], "runs", lineno, "final_cost");
        r.fitness = parse_real(f[6], "runs", lineno, "fitness");
        r.wall_time = f[7].empty() ? 0.0 : parse_real(f[7], "runs", lineno, "wall_time");
        if (f[8] != "ok" && f[8] != "failed") {
            throw ParseError("runs", lineno, "bad status '" + f[8] + "'");
        }
        r.failed = f[8] == "failed";
        r.error = f[9];
        file.records.push_back(std::move(r));
    }
    if (!seen_header) {
        throw ParseError("runs", lineno, "missing header row");
    }
    return file;
}

RunsFile read_runs_csv(const std::filesystem::path &path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open " + path.string());
    }
    return read_runs_csv(in);
}

train::TrainLog read_train_log_csv(const std::filesystem::path &path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open " + path.string());
    }
    train::TrainLog log;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#' || line.rfind("generation,", 0) == 0) {
            continue;
        }
        const auto f = split(line, ',');
        if (f.size() != 5) {
            throw ParseError("train_log", lineno, "expected 5 fields");
        }
        train::GenerationLog g;
        g.generation = parse_number<int>(f[0], "train_log", lineno, "generation");
        g.scale = parse_number<int>(f[1], "train_log", lineno, "scale");
        g.mean_fitness = parse_real(f[2], "train_log", lineno, "mean_fitness");
        g.best_fitness = parse_real(f[3], "train_log", lineno, "best_fitness");
        g.wall_time = f[4].empty() ? 0.0 : parse_real(f[4], "train_log", lineno, "wall_time");
        log.generations.push_back(std::move(g));
    }
    return log;
}

namespace {

template <typename Fn>
void write_file(const std::filesystem::path &path, Fn &&fn) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw IoError("cannot write " + path.string());
    }
    fn(out);
    out.flush();
    if (!out) {
        throw IoError("write failed: " + path.string());
    }
}

}  // namespace

void emit_report(std::span<const RunRecord> records, const Comparisons &comparisons, const ReportHeader &header,
                 const std::filesystem::path &out_dir, bool with_wall_time, std::span<const TrainSeries> series) {
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec) {
        throw IoError("cannot create " + out_dir.string() + ": " + ec.message());
    }
    write_file(out_dir / "runs.csv", [&](std::ostream &o) { write_runs_csv(o, header, records, with_wall_time); });
    write_file(out_dir / "comparisons.csv", [&](std::ostream &o) { write_comparisons_csv(o, header, comparisons); });
    const auto boxes = boxplot(records);
    write_file(out_dir / "boxplot_data.csv", [&](std::ostream &o) { write_boxplot_csv(o, header, boxes); });
    if (!series.empty()) {
        write_file(out_dir / "gen_fitness.csv", [&](std::ostream &o) { write_gen_fitness_csv(o, header, series); });
    }
}

}  // namespace vrpgp::bench
