#include "vrpgp/instance_io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <unordered_set>

#include <json.hpp>

#include "vrpgp/errors.hpp"
#include "vrpgp/rng.hpp"

namespace vrpgp::io {

namespace fs = std::filesystem;

Instance generate_instance(const GeneratorConfig &cfg) {
    if (cfg.n < 1) {
        throw ConfigError("generator: n must be >= 1");
    }
    if (cfg.n >= kGridSize * kGridSize) {
        throw ConfigError("generator: n exceeds the number of distinct grid points");
    }
    if (cfg.depot != DepotPositioning::random) {
        throw ConfigError("generator: only random depot positioning is supported");
    }
    if (cfg.customers != CustomerPositioning::random) {
        throw ConfigError("generator: only random customer positioning is supported");
    }
    if (cfg.demand != DemandDistribution::unitary) {
        throw ConfigError("generator: only unitary demand distribution is supported");
    }
    if (cfg.route_size != RouteSizeClass::medium) {
        throw ConfigError("generator: only the medium route size class is supported");
    }

    Rng rng(cfg.seed);
    Instance inst;
    inst.id = cfg.id.empty() ? "X-n" + std::to_string(cfg.n) + "-s" + std::to_string(cfg.seed) : cfg.id;
    inst.points.reserve(static_cast<std::size_t>(cfg.n) + 1);
    inst.demands.assign(static_cast<std::size_t>(cfg.n) + 1, 1);
    inst.demands[kDepot] = 0;

    std::unordered_set<std::int64_t> used;
    used.reserve(static_cast<std::size_t>(cfg.n) * 2 + 2);
    while (static_cast<int>(inst.points.size()) <= cfg.n) {
        const auto x = rng.uniform_int(0, kGridSize - 1);
        const auto y = rng.uniform_int(0, kGridSize - 1);
        if (used.insert(x * kGridSize + y).second) {
            inst.points.push_back({static_cast<double>(x), static_cast<double>(y)});
        }
    }

    const double r = rng.uniform_real(kMediumRouteSizeMin, kMediumRouteSizeMax);
    const double total_demand = cfg.n;  // unitary demands
    inst.capacity = static_cast<int>(std::ceil(r * total_demand / cfg.n));
    return inst;
}

namespace {

std::string format_number(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

std::string trim(const std::string &s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) {
        return {};
    }
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

}  // namespace

void write_tsplib(const Instance &inst, std::ostream &out) {
    check_instance(inst);
    out << "NAME : " << inst.id << '\n';
    out << "TYPE : CVRP\n";
    out << "DIMENSION : " << inst.node_count() << '\n';
    out << "EDGE_WEIGHT_TYPE : EUC_2D\n";
    out << "CAPACITY : " << inst.capacity << '\n';
    out << "NODE_COORD_SECTION\n";
    for (int i = 0; i < inst.node_count(); ++i) {
        out << i + 1 << ' ' << format_number(inst.points[i].x) << ' ' << format_number(inst.points[i].y) << '\n';
    }
    out << "DEMAND_SECTION\n";
    for (int i = 0; i < inst.node_count(); ++i) {
        out << i + 1 << ' ' << inst.demands[i] << '\n';
    }
    out << "DEPOT_SECTION\n1\n-1\nEOF\n";
    if (!out) {
        throw IoError("write_tsplib: stream write failed for " + inst.id);
    }
}

void write_tsplib(const Instance &inst, const fs::path &path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw IoError("cannot open " + path.string() + " for writing");
    }
    write_tsplib(inst, out);
    out.flush();
    if (!out) {
        throw IoError("write failed: " + path.string());
    }
}

Instance read_tsplib(std::istream &in) {
    std::string name;
    std::optional<int> dimension;
    std::optional<int> capacity;
    std::optional<std::string> weight_type;
    std::vector<std::optional<Point>> coords;
    std::vector<std::optional<int>> demands;
    std::vector<int> depots;
    bool saw_coords = false;
    bool saw_demands = false;
    bool saw_depots = false;

    enum class Section { header, coords, demands, depots, done };
    Section section = Section::header;
    std::string section_name = "HEADER";
    int coord_count = 0;
    int demand_count = 0;

    auto need_dimension = [&](int line) {
        if (!dimension) {
            throw ParseError(section_name, line, "DIMENSION must precede data sections");
        }
        if (coords.empty()) {
            coords.resize(static_cast<std::size_t>(*dimension));
            demands.resize(static_cast<std::size_t>(*dimension));
        }
    };

    auto parse_int = [&](const std::string &tok, int line) {
        int v = 0;
        const auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
        if (res.ec != std::errc() || res.ptr != tok.data() + tok.size()) {
            throw ParseError(section_name, line, "expected integer, got '" + tok + "'");
        }
        return v;
    };
    auto parse_real = [&](const std::string &tok, int line) {
        double v = 0;
        const auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
        if (res.ec != std::errc() || res.ptr != tok.data() + tok.size() || !std::isfinite(v)) {
            throw ParseError(section_name, line, "expected number, got '" + tok + "'");
        }
        return v;
    };
    auto node_index = [&](int id, int line) {
        if (id < 1 || id > *dimension) {
            throw ParseError(section_name, line, "node id " + std::to_string(id) + " outside 1.." + std::to_string(*dimension));
        }
        return static_cast<std::size_t>(id - 1);
    };

    std::string raw;
    int line_no = 0;
    while (section != Section::done && std::getline(in, raw)) {
        ++line_no;
        const std::string line = trim(raw);
        if (line.empty()) {
            continue;
        }
        if (line == "EOF") {
            section = Section::done;
            break;
        }
        if (line.rfind("NODE_COORD_SECTION", 0) == 0) {
            section = Section::coords;
            section_name = "NODE_COORD_SECTION";
            saw_coords = true;
            need_dimension(line_no);
            continue;
        }
        if (line.rfind("DEMAND_SECTION", 0) == 0) {
            section = Section::demands;
            section_name = "DEMAND_SECTION";
            saw_demands = true;
            need_dimension(line_no);
            continue;
        }
        if (line.rfind("DEPOT_SECTION", 0) == 0) {
            section = Section::depots;
            section_name = "DEPOT_SECTION";
            saw_depots = true;
            continue;
        }

        std::istringstream ls(line);
        if (section == Section::header) {
            const auto colon = line.find(':');
            if (colon == std::string::npos) {
                throw ParseError(section_name, line_no, "expected 'KEY : VALUE', got '" + line + "'");
            }
            const std::string key = trim(line.substr(0, colon));
            const std::string value = trim(line.substr(colon + 1));
            if (key == "NAME") {
                name = value;
            } else if (key == "TYPE") {
                if (value != "CVRP") {
                    throw ParseError("TYPE", line_no, "unsupported problem type '" + value + "'");
                }
            } else if (key == "DIMENSION") {
                section_name = "DIMENSION";
                dimension = parse_int(value, line_no);
                if (*dimension < 2) {
                    throw ParseError("DIMENSION", line_no, "dimension must be >= 2");
                }
                section_name = "HEADER";
            } else if (key == "CAPACITY") {
                section_name = "CAPACITY";
                capacity = parse_int(value, line_no);
                section_name = "HEADER";
            } else if (key == "EDGE_WEIGHT_TYPE") {
                if (value != "EUC_2D") {
                    throw ParseError("EDGE_WEIGHT_TYPE", line_no, "unsupported edge weight type '" + value + "' (only EUC_2D)");
                }
                weight_type = value;
            }
            // COMMENT and other informational keys are ignored.
            continue;
        }

        std::vector<std::string> toks;
        for (std::string t; ls >> t;) {
            toks.push_back(t);
        }
        switch (section) {
        case Section::coords: {
            if (toks.size() != 3) {
                throw ParseError(section_name, line_no, "expected 'id x y'");
            }
            const auto idx = node_index(parse_int(toks[0], line_no), line_no);
            if (coords[idx]) {
                throw ParseError(section_name, line_no, "duplicate node id " + toks[0]);
            }
            coords[idx] = Point{parse_real(toks[1], line_no), parse_real(toks[2], line_no)};
            ++coord_count;
            break;
        }
        case Section::demands: {
            if (toks.size() != 2) {
                throw ParseError(section_name, line_no, "expected 'id demand'");
            }
            const auto idx = node_index(parse_int(toks[0], line_no), line_no);
            if (demands[idx]) {
                throw ParseError(section_name, line_no, "duplicate node id " + toks[0]);
            }
            demands[idx] = parse_int(toks[1], line_no);
            ++demand_count;
            break;
        }
        case Section::depots: {
            for (const auto &t : toks) {
                const int id = parse_int(t, line_no);
                if (id == -1) {
                    section = Section::header;
                    section_name = "HEADER";
                    break;
                }
                depots.push_back(id);
            }
            break;
        }
        default: break;
        }
    }

    const int last = line_no;
    if (!dimension) {
        throw ParseError("DIMENSION", last, "missing DIMENSION");
    }
    if (!capacity) {
        throw ParseError("CAPACITY", last, "missing CAPACITY");
    }
    if (!weight_type) {
        throw ParseError("EDGE_WEIGHT_TYPE", last, "missing EDGE_WEIGHT_TYPE");
    }
    if (!saw_coords) {
        throw ParseError("NODE_COORD_SECTION", last, "missing NODE_COORD_SECTION");
    }
    if (!saw_demands) {
        throw ParseError("DEMAND_SECTION", last, "missing DEMAND_SECTION");
    }
    if (!saw_depots) {
        throw ParseError("DEPOT_SECTION", last, "missing DEPOT_SECTION");
    }
    if (coord_count != *dimension) {
        throw ParseError("NODE_COORD_SECTION", last,
                         std::to_string(coord_count) + " coordinates for DIMENSION " + std::to_string(*dimension));
    }
    if (demand_count != *dimension) {
        throw ParseError("DEMAND_SECTION", last,
                         std::to_string(demand_count) + " demands for DIMENSION " + std::to_string(*dimension));
    }
    if (depots.size() != 1) {
        throw ParseError("DEPOT_SECTION", last, "exactly one depot required, got " + std::to_string(depots.size()));
    }
    if (depots[0] < 1 || depots[0] > *dimension) {
        throw ParseError("DEPOT_SECTION", last, "depot id out of range");
    }

    Instance inst;
    inst.id = name;
    inst.capacity = *capacity;
    const auto depot = static_cast<std::size_t>(depots[0] - 1);
    inst.points.push_back(*coords[depot]);
    inst.demands.push_back(*demands[depot]);
    for (std::size_t i = 0; i < coords.size(); ++i) {
        if (i != depot) {
            inst.points.push_back(*coords[i]);
            inst.demands.push_back(*demands[i]);
        }
    }
    try {
        check_instance(inst);
    } catch (const ContractError &e) {
        throw ParseError("DEMAND_SECTION", last, e.what());
    }
    return inst;
}

Instance read_tsplib(const fs::path &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open " + path.string());
    }
    try {
        return read_tsplib(in);
    } catch (const ParseError &e) {
        throw ParseError(e.section(), e.line(), path.string() + ": " + e.what());
    }
}

std::vector<fs::path> Manifest::resolved(int scale) const {
    std::vector<fs::path> out;
    const auto it = scales.find(scale);
    if (it == scales.end()) {
        return out;
    }
    for (const auto &p : it->second) {
        out.push_back(p.is_absolute() ? p : root / p);
    }
    return out;
}

void write_manifest(const Manifest &m, const fs::path &path) {
    nlohmann::ordered_json j;
    j["header"] = {{"base_seed", m.base_seed}, {"rng", m.rng}, {"tag", m.tag}};
    nlohmann::ordered_json scales = nlohmann::ordered_json::object();
    for (const auto &[scale, paths] : m.scales) {
        auto arr = nlohmann::ordered_json::array();
        for (const auto &p : paths) {
            arr.push_back(p.generic_string());
        }
        scales[std::to_string(scale)] = arr;
    }
    j["scales"] = scales;
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw IoError("cannot open " + path.string() + " for writing");
    }
    out << j.dump(2) << '\n';
    if (!out) {
        throw IoError("write failed: " + path.string());
    }
}

Manifest read_manifest(const fs::path &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open manifest " + path.string());
    }
    Manifest m;
    try {
        const auto j = nlohmann::json::parse(in);
        const auto &h = j.at("header");
        m.base_seed = h.at("base_seed").get<std::uint64_t>();
        m.rng = h.at("rng").get<std::string>();
        m.tag = h.value("tag", std::string{});
        for (const auto &[key, arr] : j.at("scales").items()) {
            const int scale = std::stoi(key);
            auto &paths = m.scales[scale];
            for (const auto &p : arr) {
                paths.emplace_back(p.get<std::string>());
            }
        }
    } catch (const nlohmann::json::exception &e) {
        throw ConfigError("manifest " + path.string() + ": " + e.what());
    } catch (const std::logic_error &e) {
        throw ConfigError("manifest " + path.string() + ": bad scale key (" + e.what() + ")");
    }
    m.root = path.parent_path();
    return m;
}

std::uint64_t suite_seed(std::uint64_t base_seed, const std::string &tag, int scale, int index) noexcept {
    return derive_seed(base_seed, {hash_tag(tag), static_cast<std::uint64_t>(scale), static_cast<std::uint64_t>(index)});
}

Manifest materialize_suite(std::uint64_t base_seed, const std::vector<int> &scales, int per_scale, const fs::path &out_dir,
                           const std::string &tag) {
    if (scales.empty()) {
        throw ConfigError("materialize_suite: scales must be non-empty");
    }
    if (per_scale < 1) {
        throw ConfigError("materialize_suite: per_scale must be >= 1");
    }
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec) {
        throw IoError("cannot create " + out_dir.string() + ": " + ec.message());
    }

    Manifest m;
    m.base_seed = base_seed;
    m.rng = std::string(kRngAlgorithm);
    m.tag = tag;
    m.root = out_dir;
    for (const int scale : scales) {
        auto &paths = m.scales[scale];
        if (!paths.empty()) {
            continue;  // repeated scale in the list
        }
        for (int k = 0; k < per_scale; ++k) {
            GeneratorConfig cfg;
            cfg.n = scale;
            cfg.seed = suite_seed(base_seed, tag, scale, k);
            cfg.id = tag + "-n" + std::to_string(scale) + "-" + std::to_string(k);
            const auto inst = generate_instance(cfg);
            const fs::path file = cfg.id + ".vrp";
            write_tsplib(inst, out_dir / file);
            paths.push_back(file);
        }
    }
    write_manifest(m, out_dir / "manifest.json");
    return m;
}

}  // namespace vrpgp::io
