#pragma once

#include "impactkit/distributions.hpp"

#include <cstdint>
#include <filesystem>
#include <functional>
#include <span>
#include <vector>

namespace impactkit {

/// Density of the information signal magnitude |alpha| on [lower, upper).
/// Negative signals are handled by sign symmetry at the call sites.
class InformationDensity {
public:
    enum class Kind { uniform, pareto_tail, table };

    Kind kind() const { return kind_; }
    double lower() const { return lower_; }
    double upper() const { return upper_; } // +inf for pareto_tail

    double pdf(double a) const;
    double cdf(double a) const;
    /// Inverse cdf; quantile(u) for u in [0, 1). quantile(1) is upper().
    double quantile(double u) const;
    /// int_a^upper x pdf(x) dx; throws numerical_error when divergent.
    double tail_first_moment(double a) const;

    static InformationDensity uniform(double a, double b);
    static InformationDensity pareto_tail(double exponent, double x_min);
    /// Piecewise-constant density: weight i covers [i-1, i).
    static InformationDensity from_table(std::span<const double> weights);
    static InformationDensity load_table(const std::filesystem::path& file);

    std::string spec_string() const;

private:
    InformationDensity() = default;

    Kind kind_ = Kind::uniform;
    double lower_ = 0.0;
    double upper_ = 1.0;
    double exponent_ = 0.0; // pareto_tail
    std::vector<double> bin_pdf_;  // table: density per unit length
    std::vector<double> bin_cdf_;  // table: cdf at bin right edges
};

/// Equilibrium assignment of signal ranges to metaorder sizes.
struct InformationMap {
    double alpha0 = 0.0;            // left edge of the first bin
    std::vector<double> thresholds; // alpha_n; last entry may be +inf
    std::vector<double> cond_mean;  // abar_n = E[alpha | bin n]
    bool truncated = false;         // mass ran out before `horizon` bins

    std::int64_t bins() const { return static_cast<std::int64_t>(thresholds.size()); }

    /// Size assigned to a signal; uses |alpha| (sign symmetry), right-continuous.
    std::int64_t size_of_alpha(double alpha) const;
};

/// Thresholds by cumulative-probability matching, cdf(alpha_n) = sum_{k<=n} p_k,
/// conditional means by adaptive quadrature (abs tol 1e-10 per bin).
InformationMap build_map(const InformationDensity& density, const SizeDistribution& dist,
                         std::int64_t horizon);

/// Conservation-of-probability transport p(alpha) = p_N dN/dalpha for a
/// strictly increasing differentiable alpha(N). The returned callable
/// evaluates the implied density at a signal value.
std::function<double(double)> continuum_density_from_sizes(
    const SizeDistribution& dist, const std::function<double(double)>& alpha_of_n);

struct ScaleCalibration {
    double r0 = 0.0;
    double rtilde1 = 0.0;
};

/// Pin (R0, R~_1) from the first two conditional means via the
/// schedule-consistent system I_1 = R0 - ((1-p_1)/p_1) R~_1, I_2 = R0 + R~_1/2.
ScaleCalibration calibrate_scale(const InformationMap& map, const SizeDistribution& dist);

} // namespace impactkit
