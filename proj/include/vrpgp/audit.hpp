#pragma once

#include <atomic>
#include <cstdint>
#include <stdexcept>
#include <string>

// Solver self-checks. Builds that define VRPGP_AUDIT verify every accepted
// local-search move, every best-so-far trace and every returned solution, and
// throw AuditFailure on a breach. Counters record how many checks ran.
namespace vrpgp::audit {

struct Counters {
    std::atomic<std::uint64_t> moves{0};
    std::atomic<std::uint64_t> traces{0};
    std::atomic<std::uint64_t> solutions{0};
    std::atomic<std::uint64_t> failures{0};
};

Counters &counters() noexcept;

inline constexpr bool enabled =
#ifdef VRPGP_AUDIT
    true;
#else
    false;
#endif

// Counted on construction so breaches stay visible when a caller swallows them.
class AuditFailure : public std::logic_error {
public:
    explicit AuditFailure(const std::string &what) : std::logic_error(what) {
        counters().failures.fetch_add(1, std::memory_order_relaxed);
    }
};

}  // namespace vrpgp::audit
