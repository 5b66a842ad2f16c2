#pragma once

#include <string>
#include <vector>

namespace vrpgp {

// Shortest decimal text that parses back to the same double.
std::string format_double(double v);

std::vector<std::string> split(const std::string &s, char sep);

}  // namespace vrpgp
