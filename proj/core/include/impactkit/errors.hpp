#pragma once

#include <stdexcept>
#include <string>

namespace impactkit {

/// Out-of-domain input to a mathematical function (s <= 1, z <= 0, ...).
class domain_error : public std::invalid_argument {
public:
    explicit domain_error(const std::string& what) : std::invalid_argument(what) {}
};

/// Bad user-facing configuration (unparsable spec string, unknown key, ...).
class config_error : public std::runtime_error {
public:
    explicit config_error(const std::string& what) : std::runtime_error(what) {}
};

/// Numerical failure on valid-looking input (divergent tail, singular system).
class numerical_error : public std::runtime_error {
public:
    explicit numerical_error(const std::string& what) : std::runtime_error(what) {}
};

/// P_t == 1 at some t inside the support: the reversion R_t = P_t/(1-P_t) R~_t
/// is infinite there. Carries the offending step.
class degenerate_continuation : public numerical_error {
public:
    degenerate_continuation(long long t, const std::string& what)
        : numerical_error(what), t_(t) {}
    long long step() const noexcept { return t_; }

private:
    long long t_;
};

/// Scale calibration could not produce a positive impact scale.
class calibration_error : public numerical_error {
public:
    explicit calibration_error(const std::string& what) : numerical_error(what) {}
};

} // namespace impactkit
