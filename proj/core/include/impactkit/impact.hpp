#pragma once

#include "impactkit/distributions.hpp"

#include <cstdint>
#include <iosfwd>
#include <vector>

namespace impactkit {

/// Solved equilibrium impact schedule for one size law.
///
/// Index convention: vectors are 0-based with entry [t-1] holding the value
/// at step t. `rtilde` stops at M-1 for a finite law solved to its maximum
/// (the increment past the last possible step does not exist); `rrev[M-1]`
/// is zero there because a maximal metaorder ends with no reversion.
struct ImpactSchedule {
    double r0 = 1.0;
    double rtilde1 = 1.0;
    std::int64_t horizon = 0;
    bool finite_support = false; // law has maximum M and horizon == M

    std::vector<double> rtilde;    // R~_t = S~_{t+1} - S~_t
    std::vector<double> rrev;      // R_t  = S~_t - S_{t+1}
    std::vector<double> immediate; // script-I_t = S~_t - S0
    std::vector<double> permanent; // I_N = S_{N+1} - S0

    std::int64_t rtilde_steps() const { return static_cast<std::int64_t>(rtilde.size()); }
    double rtilde_at(std::int64_t t) const { return rtilde.at(static_cast<std::size_t>(t - 1)); }
    double rrev_at(std::int64_t t) const { return rrev.at(static_cast<std::size_t>(t - 1)); }
    double immediate_at(std::int64_t t) const {
        return immediate.at(static_cast<std::size_t>(t - 1));
    }
    double permanent_at(std::int64_t n) const {
        return permanent.at(static_cast<std::size_t>(n - 1));
    }

    /// Profit per lot on a size-N metaorder implied by the schedule,
    /// pi_N = (1/N) sum_{t<=N} script-I_t - I_N.
    double profit_per_lot(std::int64_t n) const;
};

/// Closed-form solution of the martingale + fair-pricing system.
/// r0 and rtilde1 may be zero (degenerate scale) but not negative.
ImpactSchedule solve_schedule(const SizeDistribution& dist, double r0, double rtilde1,
                              std::int64_t horizon);

/// Same schedule via the fair-pricing recursion seeded by rtilde1;
/// an independent route used to cross-check solve_schedule.
ImpactSchedule solve_schedule_recursive(const SizeDistribution& dist, double r0,
                                        double rtilde1, std::int64_t horizon);

/// Market-maker profit per lot, by size. Finite-support laws only.
struct ProfitReport {
    std::vector<double> pi;         // definition route, pi[n-1] = pi_n
    std::vector<double> pi_rewrite; // R_N - (1/N) sum_{i<N} i R~_i
    double overall = 0.0;           // sum_N p_N N pi_N
};

ProfitReport profit_report(const ImpactSchedule& schedule, const SizeDistribution& dist);

/// Sum of expected profits over sizes up to nbar; checks the partial-sum
/// identity sum_{N<=nbar} p_N N pi_N = survival(nbar+1) * sum_{i<=nbar} i R~_i
/// and throws numerical_error if it fails beyond 1e-12.
double partial_profit(const ProfitReport& report, const ImpactSchedule& schedule,
                      const SizeDistribution& dist, std::int64_t nbar);

/// Closed-form Pareto quantities (per unit rtilde1).
struct ParetoAsymptotics {
    double rtilde_exact;            // exact zeta expression for R~_t / R~_1
    double immediate_scaling;       // t^{beta-1}, or log(t+1) at beta == 1
    double permanent_over_immediate; // 1/beta
};

ParetoAsymptotics pareto_asymptotics(double beta, std::int64_t t);

/// Stretched-exponential asymptotics, computed in log space to dodge
/// overflow of e^{t^lambda}.
struct StretchedAsymptotics {
    double log_immediate;
    double log_permanent;
    double immediate; // exp(log_immediate); +inf when out of double range
    double permanent;
    double ratio;     // 1 / (lambda t^lambda)
};

StretchedAsymptotics stretched_asymptotics(double lambda, std::int64_t t);

/// Truncated-Pareto closed form for R~_t / R~_1, 2 < t < M.
double truncated_pareto_rtilde(double beta, std::int64_t m, std::int64_t t);

/// Copy of a schedule with R~_t scaled by `factor` and the immediate and
/// permanent curves rebuilt from the scaled increments (R_t left untouched).
/// Breaks the martingale identity at t by construction; used as a negative
/// control in verification.
ImpactSchedule with_scaled_rtilde(const ImpactSchedule& schedule, std::int64_t t,
                                  double factor);

/// CSV export, header: t,p,P_cont,Rtilde,R,I_immediate,I_permanent,pi.
/// Undefined cells (R~ at t = M) are left empty.
void write_schedule_csv(std::ostream& out, const ImpactSchedule& schedule,
                        const SizeDistribution& dist);

} // namespace impactkit
