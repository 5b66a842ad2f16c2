#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "vrpgp/cvrp.hpp"

namespace vrpgp::io {

enum class DepotPositioning { random, central, eccentric };
enum class CustomerPositioning { random, clustered };
enum class DemandDistribution { unitary, small_large_var, large_small_var };
enum class RouteSizeClass { small, medium, large };

// Average route size range for the medium class (customers per route).
inline constexpr double kMediumRouteSizeMin = 8.0;
inline constexpr double kMediumRouteSizeMax = 12.0;
inline constexpr int kGridSize = 1001;

struct GeneratorConfig {
    int n = 100;
    DepotPositioning depot = DepotPositioning::random;
    CustomerPositioning customers = CustomerPositioning::random;
    DemandDistribution demand = DemandDistribution::unitary;
    RouteSizeClass route_size = RouteSizeClass::medium;
    std::uint64_t seed = 0;
    // Overrides the instance name; defaults to "X-n<n>-s<seed>".
    std::string id;
};

// X-style generator. Only random/random/unitary/medium is implemented; other
// enum values raise ConfigError.
Instance generate_instance(const GeneratorConfig &cfg);

void write_tsplib(const Instance &inst, std::ostream &out);
void write_tsplib(const Instance &inst, const std::filesystem::path &path);

// Throws ParseError (section + line) on malformed input.
Instance read_tsplib(std::istream &in);
Instance read_tsplib(const std::filesystem::path &path);

// Scale -> ordered instance files. Paths are stored relative to the manifest's
// directory and resolved against it on load.
struct Manifest {
    std::uint64_t base_seed = 0;
    std::string rng;
    std::string tag;
    std::map<int, std::vector<std::filesystem::path>> scales;

    std::vector<std::filesystem::path> resolved(int scale) const;
    std::filesystem::path root;  // directory the relative paths are anchored at

    friend bool operator==(const Manifest &a, const Manifest &b) {
        return a.base_seed == b.base_seed && a.rng == b.rng && a.tag == b.tag && a.scales == b.scales;
    }
};

void write_manifest(const Manifest &m, const std::filesystem::path &path);
Manifest read_manifest(const std::filesystem::path &path);

std::uint64_t suite_seed(std::uint64_t base_seed, const std::string &tag, int scale, int index) noexcept;

// Generates per_scale instances per scale under out_dir and writes out_dir/manifest.json.
Manifest materialize_suite(std::uint64_t base_seed, const std::vector<int> &scales, int per_scale,
                           const std::filesystem::path &out_dir, const std::string &tag = "train");

}  // namespace vrpgp::io
