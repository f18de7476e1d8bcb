#pragma once

#include <stdexcept>
#include <string>

namespace p2plb {

// Base class for everything the simulator can throw on purpose.
class SimError : public std::runtime_error {
public:
    explicit SimError(const std::string& what) : std::runtime_error(what) {}
};

// Bad user-supplied configuration (CLI / config file / out-of-range parameter).
// The CLI maps this to exit code 2.
class InvalidConfiguration : public SimError {
public:
    explicit InvalidConfiguration(const std::string& what) : SimError(what) {}
};

// Referenced a host id that is not present in the graph.
class UnknownHost : public SimError {
public:
    explicit UnknownHost(const std::string& what) : SimError(what) {}
};

// Host exit would strand jobs (last host, or isolated host holding jobs).
class ForbiddenExit : public SimError {
public:
    explicit ForbiddenExit(const std::string& what) : SimError(what) {}
};

// The simulated system left the modeled regime (e.g. a hop-distance query
// between disconnected hosts).  The CLI maps this to exit code 1.
class ModelViolation : public SimError {
public:
    explicit ModelViolation(const std::string& what) : SimError(what) {}
};

} // namespace p2plb
