#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace impactkit {

class Rng;

/// Metaorder size law p_N on N = 1, 2, ... with an analytic survival accessor.
///
/// Values are immutable after construction and safe to share across threads.
/// For unbounded families the survival function is evaluated analytically
/// (Hurwitz zeta for Pareto, q^(t-1) for geometric, incomplete-gamma
/// continuous tail for the stretched exponential), never by truncating the
/// tail numerically. The stretchedexponential family keeps the continuous
/// normalization, so for it survival(t) - survival(t+1) and pmf(t) agree only
/// up to the continuum approximation; every other family telescopes exactly.
class SizeDistribution {
public:
    enum class Family {
        tabulated,
        pareto,
        truncated_pareto,
        stretched_exponential,
        geometric,
    };

    Family family() const { return family_; }

    bool finite_support() const { return max_size_ > 0; }
    /// Largest attainable size M; -1 for unbounded support.
    std::int64_t max_size() const { return max_size_; }

    /// p_n; zero outside the support.
    double pmf(std::int64_t n) const;

    /// P(N >= t) = sum_{i>=t} p_i, t >= 1. Zero beyond finite support.
    double survival(std::int64_t t) const;

    /// Continuous extension of the pmf to real arguments (parametric families
    /// only; throws domain_error for tabulated laws).
    double pmf_real(double x) const;
    bool has_smooth_tail() const { return family_ != Family::tabulated; }

    // Parameters; meaningful only for the matching family.
    double beta() const { return beta_; }
    double lambda() const { return lambda_; }
    double ratio_q() const { return q_; }

    /// Canonical spec string, e.g. "pareto:beta=1.5".
    std::string spec_string() const;

    /// Point mass at N = 1 (placeholder state for aggregates).
    SizeDistribution() : max_size_(1), pmf_{1.0}, suffix_{1.0, 0.0} {}

    friend SizeDistribution make_pareto(double beta);
    friend SizeDistribution make_truncated_pareto(double beta, std::int64_t m);
    friend SizeDistribution make_stretched_exponential(double lambda, bool renormalize);
    friend SizeDistribution make_geometric(double q);
    friend SizeDistribution make_tabulated(std::span<const double> weights);

private:
    struct raw_tag {};
    explicit SizeDistribution(raw_tag) {}

    Family family_ = Family::tabulated;
    std::int64_t max_size_ = -1;
    double beta_ = 0.0;
    double lambda_ = 0.0;
    double q_ = 0.0;
    double norm_ = 1.0;           // pmf normalization divisor
    double renorm_scale_ = 1.0;   // stretched: extra factor when renormalized
    bool renormalized_ = false;
    std::vector<double> pmf_;     // finite families: pmf_[n-1] = p_n
    std::vector<double> suffix_;  // finite families: suffix_[t-1] = survival(t), size M+1
    std::vector<double> head_;    // unbounded families: cached survival(1..64)
};

SizeDistribution make_pareto(double beta);
SizeDistribution make_truncated_pareto(double beta, std::int64_t m);
SizeDistribution make_stretched_exponential(double lambda, bool renormalize = false);
SizeDistribution make_geometric(double q);
SizeDistribution make_tabulated(std::span<const double> weights);

/// One weight per line, nonnegative, at least one positive.
SizeDistribution load_tabulated(const std::filesystem::path& file);

/// Survival-conditional continuation probabilities P_t, t = 1..horizon.
struct ContinuationSchedule {
    std::vector<double> probs; // probs[t-1] = P_t
};

ContinuationSchedule continuation_prob(const SizeDistribution& dist, std::int64_t horizon);

/// E_t[f(N)] = sum_{N>=t} p_N f(N) / sum_{N>=t} p_N.
///
/// For unbounded support `tail_degree` declares the polynomial growth of f
/// (|f(N)| ~ C N^degree for large N); a Pareto tail with degree >= beta is
/// reported as divergent via numerical_error.
double expectation_over_sizes(const SizeDistribution& dist, std::int64_t t,
                              const std::function<double(std::int64_t)>& f,
                              double tail_degree = 0.0);

/// Inverse-CDF draw using the analytic survival accessor.
std::int64_t sample_size(const SizeDistribution& dist, Rng& rng);

} // namespace impactkit
