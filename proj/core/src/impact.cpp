#include "impactkit/impact.hpp"

#include "impactkit/errors.hpp"
#include "impactkit/specfun.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <string>

namespace impactkit {

namespace {

class KahanSum {
public:
    void add(double x) {
        const double y = x - comp_;
        const double t = sum_ + y;
        comp_ = (t - sum_) - y;
        sum_ = t;
    }
    double value() const { return sum_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

struct SolveContext {
    std::vector<double> surv; // surv[t-1] = survival(t), t = 1..horizon+1
    std::vector<double> p;    // p[t-1] = surv(t) - surv(t+1)
    std::int64_t horizon = 0;
    std::int64_t rtilde_len = 0;
    bool reaches_max = false;
};

SolveContext make_context(const SizeDistribution& dist, double r0, double rtilde1,
                          std::int64_t horizon) {
    if (horizon < 1) {
        throw domain_error("solve_schedule: horizon must be >= 1");
    }
    if (r0 < 0.0 || rtilde1 < 0.0) {
        throw domain_error("solve_schedule: scale constants must be nonnegative");
    }
    if (dist.finite_support() && horizon > dist.max_size()) {
        throw domain_error("solve_schedule: horizon " + std::to_string(horizon) +
                           " exceeds support maximum " + std::to_string(dist.max_size()));
    }
    SolveContext ctx;
    ctx.horizon = horizon;
    ctx.reaches_max = dist.finite_support() && horizon == dist.max_size();
    ctx.rtilde_len = ctx.reaches_max ? horizon - 1 : horizon;
    ctx.surv.resize(static_cast<std::size_t>(horizon + 1));
    for (std::int64_t t = 1; t <= horizon + 1; ++t) {
        ctx.surv[static_cast<std::size_t>(t - 1)] = dist.survival(t);
        if (t <= horizon && !(ctx.surv[static_cast<std::size_t>(t - 1)] > 0.0)) {
            throw numerical_error("solve_schedule: survival underflows to zero at t=" +
                                  std::to_string(t));
        }
    }
    ctx.p.resize(static_cast<std::size_t>(horizon));
    for (std::int64_t t = 1; t <= horizon; ++t) {
        ctx.p[static_cast<std::size_t>(t - 1)] = ctx.surv[static_cast<std::size_t>(t - 1)] -
                                                 ctx.surv[static_cast<std::size_t>(t)];
    }
    return ctx;
}

// R_t, immediate and permanent impact from a filled rtilde array.
ImpactSchedule assemble(const SolveContext& ctx, std::vector<double> rtilde, double r0,
                        double rtilde1) {
    const std::int64_t h = ctx.horizon;
    ImpactSchedule out;
    out.r0 = r0;
    out.rtilde1 = rtilde1;
    out.horizon = h;
    out.finite_support = ctx.reaches_max;
    out.rtilde = std::move(rtilde);

    out.rrev.resize(static_cast<std::size_t>(h));
    for (std::int64_t t = 1; t <= h; ++t) {
        if (ctx.reaches_max && t == h) {
            out.rrev[static_cast<std::size_t>(t - 1)] = 0.0; // P_M = 0: no reversion
            continue;
        }
        const double pt = ctx.p[static_cast<std::size_t>(t - 1)];
        if (!(pt > 0.0)) {
            throw degenerate_continuation(
                t, "solve_schedule: P_t = 1 at t=" + std::to_string(t) +
                       " (zero pmf inside the support), R_t is unbounded");
        }
        out.rrev[static_cast<std::size_t>(t - 1)] =
            ctx.surv[static_cast<std::size_t>(t)] / pt *
            out.rtilde[static_cast<std::size_t>(t - 1)];
    }

    out.immediate.resize(static_cast<std::size_t>(h));
    KahanSum imm;
    imm.add(r0);
    out.immediate[0] = imm.value();
    for (std::int64_t t = 2; t <= h; ++t) {
        imm.add(out.rtilde[static_cast<std::size_t>(t - 2)]);
        out.immediate[static_cast<std::size_t>(t - 1)] = imm.value();
    }

    out.permanent.resize(static_cast<std::size_t>(h));
    for (std::int64_t n = 1; n <= h; ++n) {
        out.permanent[static_cast<std::size_t>(n - 1)] =
            out.immediate[static_cast<std::size_t>(n - 1)] -
            out.rrev[static_cast<std::size_t>(n - 1)];
    }
    return out;
}

} // namespace

double ImpactSchedule::profit_per_lot(std::int64_t n) const {
    if (n < 1 || n > horizon) {
        throw domain_error("profit_per_lot: n out of range");
    }
    KahanSum mean;
    for (std::int64_t t = 1; t <= n; ++t) {
        mean.add(immediate[static_cast<std::size_t>(t - 1)]);
    }
    return mean.value() / static_cast<double>(n) - permanent[static_cast<std::size_t>(n - 1)];
}

ImpactSchedule solve_schedule(const SizeDistribution& dist, double r0, double rtilde1,
                              std::int64_t horizon) {
    SolveContext ctx = make_context(dist, r0, rtilde1, horizon);
    std::vector<double> rtilde(static_cast<std::size_t>(ctx.rtilde_len));
    if (ctx.rtilde_len >= 1) rtilde[0] = rtilde1;
    const double s2 = ctx.surv[1]; // survival(2)
    for (std::int64_t t = 2; t <= ctx.rtilde_len; ++t) {
        const double pt = ctx.p[static_cast<std::size_t>(t - 1)];
        const double st = ctx.surv[static_cast<std::size_t>(t - 1)];
        const double st1 = ctx.surv[static_cast<std::size_t>(t)];
        if (!(st1 > 0.0)) {
            throw numerical_error("solve_schedule: survival underflows to zero at t=" +
                                  std::to_string(t + 1));
        }
        rtilde[static_cast<std::size_t>(t - 1)] =
            (pt / st1) * (s2 / st) * rtilde1 / static_cast<double>(t);
    }
    return assemble(ctx, std::move(rtilde), r0, rtilde1);
}

ImpactSchedule solve_schedule_recursive(const SizeDistribution& dist, double r0,
                                        double rtilde1, std::int64_t horizon) {
    SolveContext ctx = make_context(dist, r0, rtilde1, horizon);
    std::vector<double> rtilde(static_cast<std::size_t>(ctx.rtilde_len));
    if (ctx.rtilde_len >= 1) rtilde[0] = rtilde1;
    KahanSum weighted; // sum_{i<N} i R~_i
    weighted.add(rtilde1);
    for (std::int64_t n = 2; n <= ctx.rtilde_len; ++n) {
        const double pn = ctx.p[static_cast<std::size_t>(n - 1)];
        const double sn1 = ctx.surv[static_cast<std::size_t>(n)];
        if (!(sn1 > 0.0)) {
            throw numerical_error("solve_schedule_recursive: survival underflows at t=" +
                                  std::to_string(n + 1));
        }
        // (1 - P_N)/P_N = p_N / survival(N+1)
        const double value = (pn / sn1) * weighted.value() / static_cast<double>(n);
        rtilde[static_cast<std::size_t>(n - 1)] = value;
        weighted.add(static_cast<double>(n) * value);
    }
    return assemble(ctx, std::move(rtilde), r0, rtilde1);
}

ProfitReport profit_report(const ImpactSchedule& schedule, const SizeDistribution& dist) {
    if (!dist.finite_support()) {
        throw domain_error("profit_report: requires a finite-support distribution");
    }
    if (!schedule.finite_support || schedule.horizon != dist.max_size()) {
        throw domain_error("profit_report: schedule must be solved to the support maximum");
    }
    const std::int64_t m = schedule.horizon;
    ProfitReport report;
    report.pi.resize(static_cast<std::size_t>(m));
    report.pi_rewrite.resize(static_cast<std::size_t>(m));

    KahanSum mean_prices;  // sum_{t<=N} script-I_t
    KahanSum weighted;     // sum_{i<N} i R~_i
    KahanSum overall;
    for (std::int64_t n = 1; n <= m; ++n) {
        mean_prices.add(schedule.immediate[static_cast<std::size_t>(n - 1)]);
        const double pi_def = mean_prices.value() / static_cast<double>(n) -
                              schedule.permanent[static_cast<std::size_t>(n - 1)];
        const double pi_rw = schedule.rrev[static_cast<std::size_t>(n - 1)] -
                             weighted.value() / static_cast<double>(n);
        report.pi[static_cast<std::size_t>(n - 1)] = pi_def;
        report.pi_rewrite[static_cast<std::size_t>(n - 1)] = pi_rw;
        overall.add(dist.pmf(n) * static_cast<double>(n) * pi_def);
        if (n < m) {
            weighted.add(static_cast<double>(n) *
                         schedule.rtilde[static_cast<std::size_t>(n - 1)]);
        }
    }
    report.overall = overall.value();
    return report;
}

double partial_profit(const ProfitReport& report, const ImpactSchedule& schedule,
                      const SizeDistribution& dist, std::int64_t nbar) {
    const std::int64_t m = schedule.horizon;
    if (nbar < 1 || nbar >= m) {
        throw domain_error("partial_profit: requires 1 <= nbar < M");
    }
    KahanSum lhs;
    KahanSum weighted;
    for (std::int64_t n = 1; n <= nbar; ++n) {
        lhs.add(dist.pmf(n) * static_cast<double>(n) *
                report.pi[static_cast<std::size_t>(n - 1)]);
        weighted.add(static_cast<double>(n) * schedule.rtilde[static_cast<std::size_t>(n - 1)]);
    }
    const double rhs = dist.survival(nbar + 1) * weighted.value();
    const double scale = std::max({1.0, std::abs(lhs.value()), std::abs(rhs)});
    if (std::abs(lhs.value() - rhs) > 1e-12 * scale) {
        throw numerical_error("partial_profit: partial-sum identity violated at nbar=" +
                              std::to_string(nbar) + " (lhs=" + std::to_string(lhs.value()) +
                              ", rhs=" + std::to_string(rhs) + ")");
    }
    return lhs.value();
}

ParetoAsymptotics pareto_asymptotics(double beta, std::int64_t t) {
    if (!(beta > 0.0) || t < 1) {
        throw domain_error("pareto_asymptotics: requires beta > 0 and t >= 1");
    }
    const double s = 1.0 + beta;
    ParetoAsymptotics out{};
    if (t == 1) {
        out.rtilde_exact = 1.0; // the seed R~_1 itself
    } else {
        const double zs = riemann_zeta(s).value;
        const double zt = hurwitz_zeta(s, static_cast<double>(t)).value;
        const double zt1 = hurwitz_zeta(s, static_cast<double>(t + 1)).value;
        out.rtilde_exact =
            (zs - 1.0) / (std::pow(static_cast<double>(t), 2.0 + beta) * zt * zt1);
    }
    out.immediate_scaling = (beta == 1.0)
                                ? std::log(static_cast<double>(t + 1))
                                : std::pow(static_cast<double>(t), beta - 1.0);
    out.permanent_over_immediate = 1.0 / beta;
    return out;
}

StretchedAsymptotics stretched_asymptotics(double lambda, std::int64_t t) {
    if (!(lambda > 0.0) || t < 2) {
        throw domain_error("stretched_asymptotics: requires lambda > 0 and t >= 2");
    }
    const double td = static_cast<double>(t);
    const double x = std::pow(td, lambda);
    StretchedAsymptotics out{};
    out.log_immediate = x - (2.0 - lambda) * std::log(td);

    // Real part of the continuation of E_nu(-x), nu = 1 + 1/lambda, through
    // its divergent asymptotic series -(e^x/x) sum_k (nu)_k / x^k, truncated
    // at the smallest term. Only the bracket lam + (1/x) * sum enters.
    const double nu = 1.0 + 1.0 / lambda;
    double series = 0.0;
    double term = 1.0;
    for (int k = 0; k < 30; ++k) {
        series += term;
        const double next = term * (nu + k) / x;
        if (std::abs(next) >= std::abs(term)) break; // past the optimal truncation
        term = next;
    }
    out.log_permanent = x + std::log(lambda + series / x) - 2.0 * std::log(td) -
                        2.0 * std::log(lambda);
    out.immediate = std::exp(out.log_immediate);
    out.permanent = std::exp(out.log_permanent);
    out.ratio = 1.0 / (lambda * x);
    return out;
}

double truncated_pareto_rtilde(double beta, std::int64_t m, std::int64_t t) {
    if (!(beta > 0.0)) {
        throw domain_error("truncated_pareto_rtilde: requires beta > 0");
    }
    if (!(t > 2 && t < m)) {
        throw domain_error("truncated_pareto_rtilde: requires 2 < t < M");
    }
    const double s = 1.0 + beta;
    const double zm1 = hurwitz_zeta(s, static_cast<double>(m + 1)).value;
    const double h = generalized_harmonic(m, s);
    const double zt = hurwitz_zeta(s, static_cast<double>(t)).value;
    const double zt1 = hurwitz_zeta(s, static_cast<double>(t + 1)).value;
    return (h - 1.0) /
           ((zt - zm1) * (zt1 - zm1) * std::pow(static_cast<double>(t), 2.0 + beta));
}

ImpactSchedule with_scaled_rtilde(const ImpactSchedule& schedule, std::int64_t t,
                                  double factor) {
    if (t < 1 || t > schedule.rtilde_steps()) {
        throw domain_error("with_scaled_rtilde: t outside the R~ range");
    }
    ImpactSchedule out = schedule;
    out.rtilde[static_cast<std::size_t>(t - 1)] *= factor;
    KahanSum imm;
    imm.add(out.r0);
    out.immediate[0] = imm.value();
    for (std::int64_t k = 2; k <= out.horizon; ++k) {
        imm.add(out.rtilde[static_cast<std::size_t>(k - 2)]);
        out.immediate[static_cast<std::size_t>(k - 1)] = imm.value();
    }
    for (std::int64_t n = 1; n <= out.horizon; ++n) {
        out.permanent[static_cast<std::size_t>(n - 1)] =
            out.immediate[static_cast<std::size_t>(n - 1)] -
            out.rrev[static_cast<std::size_t>(n - 1)];
    }
    return out;
}

void write_schedule_csv(std::ostream& out, const ImpactSchedule& schedule,
                        const SizeDistribution& dist) {
    char buf[64];
    const auto fmt = [&buf](double v) {
        std::snprintf(buf, sizeof(buf), "%.17g", v);
        return std::string(buf);
    };
    out << "t,p,P_cont,Rtilde,R,I_immediate,I_permanent,pi\n";
    KahanSum mean_prices;
    for (std::int64_t t = 1; t <= schedule.horizon; ++t) {
        const double st = dist.survival(t);
        const double pcont = st > 0.0 ? dist.survival(t + 1) / st : 0.0;
        mean_prices.add(schedule.immediate[static_cast<std::size_t>(t - 1)]);
        const double pi = mean_prices.value() / static_cast<double>(t) -
                          schedule.permanent[static_cast<std::size_t>(t - 1)];
        out << t << ',' << fmt(dist.pmf(t)) << ',' << fmt(pcont) << ',';
        if (t <= schedule.rtilde_steps()) {
            out << fmt(schedule.rtilde[static_cast<std::size_t>(t - 1)]);
        }
        out << ',' << fmt(schedule.rrev[static_cast<std::size_t>(t - 1)]) << ','
            << fmt(schedule.immediate[static_cast<std::size_t>(t - 1)]) << ','
            << fmt(schedule.permanent[static_cast<std::size_t>(t - 1)]) << ',' << fmt(pi)
            << '\n';
    }
}

} // namespace impactkit
