#pragma once

#include "impactkit/distributions.hpp"
#include "impactkit/impact.hpp"
#include "impactkit/rng.hpp"

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <string>
#include <vector>

namespace impactkit {

/// Zero-mean day-trader information law.
struct EtaLaw {
    enum class Kind { gaussian, uniform };
    Kind kind = Kind::gaussian;
    double scale = 0.5; // gaussian: sigma; uniform: half-width

    double draw(Rng& rng) const {
        if (kind == Kind::gaussian) return scale * rng.next_gaussian();
        return scale * (2.0 * rng.next_unit() - 1.0);
    }
    double stddev() const {
        return kind == Kind::gaussian ? scale : scale / std::sqrt(3.0);
    }
    const char* name() const { return kind == Kind::gaussian ? "gaussian" : "uniform"; }
};

/// Full specification of one trading game.
struct GameConfig {
    double mu = 0.5;                 // probability a metaorder is present
    std::int64_t k_traders = 100;    // K
    SizeDistribution dist;           // p_N (finite support)
    SizeDistribution null_dist;      // \hat p_N, game length when no metaorder
    EtaLaw eta{};
    std::function<double(double)> day_order_size; // F; identity when empty
    ImpactSchedule schedule;         // solved on dist
    double s0 = 100.0;
    std::int64_t n_paths = 1;
    std::uint64_t seed = 0;
    bool record_paths = false;
};

/// Config with the spec defaults: mu = 0.5, K = 100, Gaussian eta with
/// sigma = 0.5 R~_1, null law Geometric(1/2), F = identity.
GameConfig default_game_config(SizeDistribution dist, ImpactSchedule schedule);

struct RunningStat {
    double sum = 0.0;
    double sumsq = 0.0;
    std::int64_t count = 0;

    void add(double x) {
        sum += x;
        sumsq += x * x;
        ++count;
    }
    void merge(const RunningStat& o) {
        sum += o.sum;
        sumsq += o.sumsq;
        count += o.count;
    }
    double mean() const { return count > 0 ? sum / static_cast<double>(count) : 0.0; }
    double variance() const {
        if (count < 2) return 0.0;
        const double n = static_cast<double>(count);
        return std::max(0.0, (sumsq - sum * sum / n) / (n - 1.0));
    }
    double std_error() const {
        if (count < 2) return std::numeric_limits<double>::infinity();
        return std::sqrt(variance() / static_cast<double>(count));
    }
};

struct PathRecord {
    bool present = false;
    std::int64_t n = 0;
    double alpha = 0.0;
    std::vector<double> prices;     // transaction prices S~'_1..S~'_N
    double final_price = 0.0;       // S'_{N+1}
    std::vector<double> day_orders; // F(eta_t)
};

struct SimulationOutcome {
    std::vector<RunningStat> residual_by_t; // pooled next-valuation residuals
    std::vector<RunningStat> profit_by_n;   // pi-hat per size (present paths)
    std::int64_t paths_present = 0;
    std::int64_t paths_absent = 0;
    std::vector<PathRecord> paths; // filled only when record_paths

    // config echo for reporting
    double mu = 0.0;
    double s0 = 0.0;
    std::int64_t k_traders = 0;
    std::int64_t n_paths = 0;
    std::uint64_t seed = 0;
    std::string dist_spec;
    std::string null_spec;
    std::string eta_kind;
    double eta_scale = 0.0;
    std::int64_t horizon = 0;
};

/// Monte Carlo run over independent paths. Deterministic for a fixed
/// (config, seed) regardless of worker count: every path derives its stream
/// from (seed, path index) and aggregation runs in fixed block order.
/// Worker count is capped by the IMPACT_KIT_THREADS environment variable.
SimulationOutcome run_paths(const GameConfig& config);

struct MartingaleDiagnostic {
    std::vector<double> mean;      // index t-1
    std::vector<double> std_error;
    std::vector<std::int64_t> count;
};

/// Per-t mean and standard error of (next valuation - current price),
/// pooled over present and absent paths.
MartingaleDiagnostic martingale_diagnostic(const SimulationOutcome& outcome);

/// Change of profit for a one-lot deviation (delta in {-1, 0, +1}) by a
/// single long-term trader at the symmetric equilibrium n_k = N:
///   dPi = -pi_N - |delta| (N+delta)/(NK+delta) (S~_{N+1} - avg_{t<=N} S~_t).
double nash_deviation(const ImpactSchedule& schedule, std::int64_t k_traders,
                      std::int64_t n, int delta);
double nash_deviation(const GameConfig& config, std::int64_t n, int delta);

/// Order-flow imbalance detection footnote: q standard deviations at
/// participation rate z are reached after (q/z)^2 steps.
struct DetectionResult {
    double q = 0.0;
    double z = 0.0;
    double steps = 0.0;
    /// Largest participation rate that keeps a size-n metaorder hidden.
    double max_participation(double n) const { return q / std::sqrt(n); }
    /// Largest size hidden at participation rate zz.
    double max_hidden_size(double zz) const { return (q / zz) * (q / zz); }
};

DetectionResult detection_time(double q, double z);

/// JSON summary: config echo, per-t diagnostics, per-N profit estimates.
std::string outcome_summary_json(const SimulationOutcome& outcome, int indent = 2);

} // namespace impactkit
