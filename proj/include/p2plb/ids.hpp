#pragma once

#include <compare>
#include <cstdint>
#include <ostream>

namespace p2plb {

// Host ids are never reused: an exited host's id stays retired even if a new
// host enters later the same step.
struct HostId {
    std::uint32_t v = 0;
    auto operator<=>(const HostId&) const = default;
};

// Jobs are fixed for the lifetime of a run; JobId doubles as the index into
// the per-job state vector.
struct JobId {
    std::uint32_t v = 0;
    auto operator<=>(const JobId&) const = default;
};

inline std::ostream& operator<<(std::ostream& os, HostId h) { return os << 'h' << h.v; }
inline std::ostream& operator<<(std::ostream& os, JobId j) { return os << 'j' << j.v; }

} // namespace p2plb
