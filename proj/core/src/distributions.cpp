#include "impactkit/distributions.hpp"

#include "impactkit/errors.hpp"
#include "impactkit/rng.hpp"
#include "impactkit/specfun.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

namespace impactkit {

namespace {

constexpr std::int64_t kMaxTabulatedSupport = 10'000'000;
constexpr std::int64_t kHeadCacheSize = 64;

double kahan_total(std::span<const double> xs) {
    double sum = 0.0, comp = 0.0;
    for (double x : xs) {
        const double y = x - comp;
        const double t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }
    return sum;
}

std::string format_param(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

// Discrete mass of e^{-n^lambda}, n >= 1: explicit prefix plus an
// Euler-Maclaurin tail once the terms are flat enough.
double stretched_discrete_mass(double lambda) {
    double sum = 0.0, comp = 0.0;
    std::int64_t n = 1;
    const std::int64_t cap = 1'000'000;
    for (; n <= cap; ++n) {
        const double term = std::exp(-std::pow(static_cast<double>(n), lambda));
        const double y = term - comp;
        const double t = sum + y;
        comp = (t - sum) - y;
        sum = t;
        if (term < sum * 1e-18) return sum;
    }
    // E-M tail from x = cap+1: integral + f/2 - f'/12 + f'''/720.
    const double x = static_cast<double>(cap + 1);
    const double g = std::pow(x, lambda);
    const double f = std::exp(-g);
    const double gp = lambda * std::pow(x, lambda - 1.0);
    const double gpp = lambda * (lambda - 1.0) * std::pow(x, lambda - 2.0);
    const double gppp = lambda * (lambda - 1.0) * (lambda - 2.0) * std::pow(x, lambda - 3.0);
    const double fp = -gp * f;
    const double fppp = (-gp * gp * gp + 3.0 * gp * gpp - gppp) * f;
    const double integral = upper_incomplete_gamma(1.0 / lambda, g).value / lambda;
    return sum + integral + 0.5 * f - fp / 12.0 + fppp / 720.0;
}

} // namespace

double SizeDistribution::pmf(std::int64_t n) const {
    if (n < 1) return 0.0;
    switch (family_) {
    case Family::tabulated:
    case Family::truncated_pareto:
        if (n > max_size_) return 0.0;
        return pmf_[static_cast<std::size_t>(n - 1)];
    case Family::pareto:
        return std::pow(static_cast<double>(n), -(1.0 + beta_)) / norm_;
    case Family::stretched_exponential:
        return std::exp(-std::pow(static_cast<double>(n), lambda_)) / norm_ * renorm_scale_;
    case Family::geometric:
        return (1.0 - q_) * std::pow(q_, static_cast<double>(n - 1));
    }
    return 0.0;
}

double SizeDistribution::survival(std::int64_t t) const {
    if (t < 1) t = 1;
    switch (family_) {
    case Family::tabulated:
    case Family::truncated_pareto:
        if (t > max_size_) return 0.0;
        return suffix_[static_cast<std::size_t>(t - 1)];
    case Family::pareto:
        if (t <= kHeadCacheSize) return head_[static_cast<std::size_t>(t - 1)];
        return hurwitz_zeta(1.0 + beta_, static_cast<double>(t)).value / norm_;
    case Family::stretched_exponential: {
        if (t <= kHeadCacheSize) return head_[static_cast<std::size_t>(t - 1)];
        const double z = std::pow(static_cast<double>(t), lambda_);
        return upper_incomplete_gamma(1.0 / lambda_, z).value / (lambda_ * norm_);
    }
    case Family::geometric:
        return std::pow(q_, static_cast<double>(t - 1));
    }
    return 0.0;
}

double SizeDistribution::pmf_real(double x) const {
    if (x < 1.0) return 0.0;
    switch (family_) {
    case Family::tabulated:
        throw domain_error("pmf_real: tabulated distribution has no smooth extension");
    case Family::truncated_pareto:
        if (x > static_cast<double>(max_size_)) return 0.0;
        return std::pow(x, -(1.0 + beta_)) / norm_;
    case Family::pareto:
        return std::pow(x, -(1.0 + beta_)) / norm_;
    case Family::stretched_exponential:
        return std::exp(-std::pow(x, lambda_)) / norm_ * renorm_scale_;
    case Family::geometric:
        return (1.0 - q_) * std::exp((x - 1.0) * std::log(q_));
    }
    return 0.0;
}

std::string SizeDistribution::spec_string() const {
    switch (family_) {
    case Family::tabulated:
        return "tabulated:m=" + std::to_string(max_size_);
    case Family::pareto:
        return "pareto:beta=" + format_param(beta_);
    case Family::truncated_pareto:
        return "truncated_pareto:beta=" + format_param(beta_) +
               ",m=" + std::to_string(max_size_);
    case Family::stretched_exponential:
        return "stretched:lambda=" + format_param(lambda_) +
               (renormalized_ ? ",renormalize=1" : "");
    case Family::geometric:
        return "geometric:q=" + format_param(q_);
    }
    return "";
}

SizeDistribution make_pareto(double beta) {
    if (!(beta > 0.0)) {
        throw domain_error("make_pareto: requires beta > 0, got beta=" +
                           format_param(beta));
    }
    SizeDistribution d{SizeDistribution::raw_tag{}};
    d.family_ = SizeDistribution::Family::pareto;
    d.beta_ = beta;
    d.norm_ = hurwitz_zeta(1.0 + beta, 1.0).value;
    d.head_.resize(kHeadCacheSize);
    for (std::int64_t t = 1; t <= kHeadCacheSize; ++t) {
        d.head_[static_cast<std::size_t>(t - 1)] =
            hurwitz_zeta(1.0 + beta, static_cast<double>(t)).value / d.norm_;
    }
    return d;
}

SizeDistribution make_truncated_pareto(double beta, std::int64_t m) {
    if (!(beta > 0.0)) {
        throw domain_error("make_truncated_pareto: requires beta > 0");
    }
    if (m < 2) {
        throw domain_error("make_truncated_pareto: requires M >= 2, got M=" +
                           std::to_string(m));
    }
    if (m > kMaxTabulatedSupport) {
        throw domain_error("make_truncated_pareto: M exceeds supported maximum " +
                           std::to_string(kMaxTabulatedSupport));
    }
    SizeDistribution d{SizeDistribution::raw_tag{}};
    d.family_ = SizeDistribution::Family::truncated_pareto;
    d.beta_ = beta;
    d.max_size_ = m;
    d.pmf_.resize(static_cast<std::size_t>(m));
    for (std::int64_t n = 1; n <= m; ++n) {
        d.pmf_[static_cast<std::size_t>(n - 1)] =
            std::pow(static_cast<double>(n), -(1.0 + beta));
    }
    d.norm_ = kahan_total(d.pmf_); // = H_M^{(1+beta)}
    for (double& p : d.pmf_) p /= d.norm_;
    d.suffix_.resize(static_cast<std::size_t>(m + 1));
    d.suffix_[static_cast<std::size_t>(m)] = 0.0;
    for (std::int64_t t = m; t >= 1; --t) {
        d.suffix_[static_cast<std::size_t>(t - 1)] =
            d.pmf_[static_cast<std::size_t>(t - 1)] + d.suffix_[static_cast<std::size_t>(t)];
    }
    return d;
}

SizeDistribution make_stretched_exponential(double lambda, bool renormalize) {
    if (!(lambda > 0.0)) {
        throw domain_error("make_stretched_exponential: requires lambda > 0, got lambda=" +
                           format_param(lambda));
    }
    SizeDistribution d{SizeDistribution::raw_tag{}};
    d.family_ = SizeDistribution::Family::stretched_exponential;
    d.lambda_ = lambda;
    // pmf = lambda e^{-n^lambda} / Gamma(1/lambda, 1): continuous normalization.
    d.norm_ = upper_incomplete_gamma(1.0 / lambda, 1.0).value / lambda;
    if (renormalize) {
        d.renormalized_ = true;
        d.renorm_scale_ = d.norm_ / stretched_discrete_mass(lambda);
    }
    d.head_.resize(kHeadCacheSize);
    for (std::int64_t t = 1; t <= kHeadCacheSize; ++t) {
        const double z = std::pow(static_cast<double>(t), lambda);
        d.head_[static_cast<std::size_t>(t - 1)] =
            upper_incomplete_gamma(1.0 / lambda, z).value / (lambda * d.norm_);
    }
    return d;
}

SizeDistribution make_geometric(double q) {
    if (!(q > 0.0 && q < 1.0)) {
        throw domain_error("make_geometric: requires 0 < q < 1, got q=" + format_param(q));
    }
    SizeDistribution d{SizeDistribution::raw_tag{}};
    d.family_ = SizeDistribution::Family::geometric;
    d.q_ = q;
    return d;
}

SizeDistribution make_tabulated(std::span<const double> weights) {
    if (weights.empty()) {
        throw domain_error("make_tabulated: empty weight list");
    }
    std::size_t m = weights.size();
    for (double w : weights) {
        if (!std::isfinite(w) || w < 0.0) {
            throw domain_error("make_tabulated: weights must be finite and nonnegative");
        }
    }
    while (m > 0 && weights[m - 1] == 0.0) --m; // trailing zeros trimmed
    if (m == 0) {
        throw domain_error("make_tabulated: needs at least one positive weight");
    }
    if (m > static_cast<std::size_t>(kMaxTabulatedSupport)) {
        throw domain_error("make_tabulated: support exceeds maximum");
    }
    SizeDistribution d{SizeDistribution::raw_tag{}};
    d.family_ = SizeDistribution::Family::tabulated;
    d.max_size_ = static_cast<std::int64_t>(m);
    d.pmf_.assign(weights.begin(), weights.begin() + static_cast<std::ptrdiff_t>(m));
    d.norm_ = kahan_total(d.pmf_);
    if (!(d.norm_ > 0.0)) {
        throw domain_error("make_tabulated: total weight must be positive");
    }
    for (double& p : d.pmf_) p /= d.norm_;
    d.suffix_.resize(m + 1);
    d.suffix_[m] = 0.0;
    for (std::size_t t = m; t >= 1; --t) {
        d.suffix_[t - 1] = d.pmf_[t - 1] + d.suffix_[t];
    }
    return d;
}

SizeDistribution load_tabulated(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) {
        throw config_error("load_tabulated: cannot open " + file.string());
    }
    std::vector<double> weights;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::size_t b = line.find_first_not_of(" \t\r");
        if (b == std::string::npos) continue;
        std::size_t e = line.find_last_not_of(" \t\r");
        const std::string tok = line.substr(b, e - b + 1);
        try {
            std::size_t used = 0;
            const double w = std::stod(tok, &used);
            if (used != tok.size()) throw std::invalid_argument(tok);
            weights.push_back(w);
        } catch (const std::exception&) {
            throw config_error("load_tabulated: bad weight at " + file.string() + ":" +
                               std::to_string(lineno) + " ('" + tok + "')");
        }
    }
    if (weights.empty()) {
        throw config_error("load_tabulated: no weights in " + file.string());
    }
    try {
        return make_tabulated(weights);
    } catch (const domain_error& err) {
        throw config_error("load_tabulated: " + file.string() + ": " + err.what());
    }
}

ContinuationSchedule continuation_prob(const SizeDistribution& dist, std::int64_t horizon) {
    if (horizon < 1) {
        throw domain_error("continuation_prob: horizon must be >= 1");
    }
    if (dist.finite_support() && horizon > dist.max_size()) {
        throw domain_error("continuation_prob: horizon " + std::to_string(horizon) +
                           " exceeds support maximum " + std::to_string(dist.max_size()));
    }
    ContinuationSchedule sched;
    sched.probs.resize(static_cast<std::size_t>(horizon));
    for (std::int64_t t = 1; t <= horizon; ++t) {
        const double st = dist.survival(t);
        if (!(st > 0.0)) {
            throw domain_error("continuation_prob: survival underflows to zero at t=" +
                               std::to_string(t));
        }
        sched.probs[static_cast<std::size_t>(t - 1)] = dist.survival(t + 1) / st;
    }
    return sched;
}

double expectation_over_sizes(const SizeDistribution& dist, std::int64_t t,
                              const std::function<double(std::int64_t)>& f,
                              double tail_degree) {
    if (t < 1) {
        throw domain_error("expectation_over_sizes: t must be >= 1");
    }
    if (dist.finite_support()) {
        const std::int64_t m = dist.max_size();
        if (t > m) {
            throw domain_error("expectation_over_sizes: survival(t) is zero at t=" +
                               std::to_string(t));
        }
        double num = 0.0, comp = 0.0;
        for (std::int64_t n = t; n <= m; ++n) {
            const double y = dist.pmf(n) * f(n) - comp;
            const double acc = num + y;
            comp = (acc - num) - y;
            num = acc;
        }
        return num / dist.survival(t);
    }

    constexpr double kRelTol = 1e-13;
    const double den = dist.survival(t);

    if (dist.family() == SizeDistribution::Family::pareto) {
        const double beta = dist.beta();
        if (tail_degree >= beta) {
            throw numerical_error(
                "expectation_over_sizes: tail degree " + format_param(tail_degree) +
                " >= beta " + format_param(beta) + ", expectation diverges");
        }
        // Partial sums plus the analytic moment tail
        //   sum_{N>T} N^d p_N = zeta(1+beta-d, T+1) / zeta(1+beta).
        const double s_shift = 1.0 + beta - tail_degree;
        const double znorm = hurwitz_zeta(1.0 + beta, 1.0).value;
        double acc = 0.0, comp = 0.0;
        std::int64_t visited = t - 1;
        double prev_est = std::numeric_limits<double>::quiet_NaN();
        std::int64_t chunk_end = std::max<std::int64_t>(t + 63, 2 * t);
        for (int round = 0; round < 48; ++round) {
            for (std::int64_t n = visited + 1; n <= chunk_end; ++n) {
                const double y = dist.pmf(n) * f(n) - comp;
                const double a2 = acc + y;
                comp = (a2 - acc) - y;
                acc = a2;
            }
            visited = chunk_end;
            const double scale =
                f(visited) / std::pow(static_cast<double>(visited), tail_degree);
            const double tail =
                scale * hurwitz_zeta(s_shift, static_cast<double>(visited + 1)).value / znorm;
            const double est = acc + tail;
            if (std::isfinite(prev_est) &&
                std::abs(est - prev_est) <= kRelTol * std::abs(est)) {
                return est / den;
            }
            prev_est = est;
            chunk_end *= 2;
        }
        throw numerical_error("expectation_over_sizes: tail estimate did not stabilize");
    }

    // Geometric / stretched exponential: terms eventually decay by a known
    // analytic ratio; sum until the geometric tail bound is negligible.
    double acc = 0.0, comp = 0.0;
    const std::int64_t cap = 10'000'000;
    for (std::int64_t n = t; n <= cap; ++n) {
        const double pn = dist.pmf(n);
        const double y = pn * f(n) - comp;
        const double a2 = acc + y;
        comp = (a2 - acc) - y;
        acc = a2;
        if (n < t + 8) continue;
        const double step_ratio =
            dist.pmf(n + 1) / pn *
            std::pow(1.0 + 1.0 / static_cast<double>(n), tail_degree);
        if (step_ratio >= 0.999) continue;
        const double fscale =
            std::abs(f(n)) / std::pow(static_cast<double>(n), tail_degree);
        const double bound = 2.0 * fscale * dist.pmf(n + 1) *
                             std::pow(static_cast<double>(n + 1), tail_degree) /
                             (1.0 - step_ratio);
        if (bound <= kRelTol * (std::abs(acc) + 1e-300)) {
            return acc / den;
        }
    }
    throw numerical_error("expectation_over_sizes: no convergence within term cap");
}

namespace {

// Largest n with survival(n) > target, given surv(lo) > target >= surv(hi).
template <typename Surv>
std::int64_t bisect_survival(const Surv& surv, double target, std::int64_t lo,
                             std::int64_t hi) {
    while (hi - lo > 1) {
        const std::int64_t mid = lo + (hi - lo) / 2;
        if (surv(mid) > target) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return lo;
}

} // namespace

std::int64_t sample_size(const SizeDistribution& dist, Rng& rng) {
    const double u = rng.next_unit();
    const double s1 = dist.survival(1);
    double target = u * s1;
    if (target <= 0.0) target = s1 * 0x1.0p-60;

    using Family = SizeDistribution::Family;
    const auto surv = [&dist](std::int64_t n) { return dist.survival(n); };

    if (dist.finite_support()) {
        return bisect_survival(surv, target, 1, dist.max_size() + 1);
    }

    if (dist.family() == Family::geometric) {
        const double q = dist.ratio_q();
        std::int64_t n =
            1 + static_cast<std::int64_t>(std::floor(std::log(target / s1) / std::log(q)));
        if (n < 1) n = 1;
        while (surv(n + 1) > target) ++n;
        while (n > 1 && surv(n) <= target) --n;
        return n;
    }

    // Pareto / stretched: cached head, analytic tail guess, bracket + bisect.
    if (target >= surv(kHeadCacheSize)) {
        return bisect_survival(surv, target, 1, kHeadCacheSize);
    }
    double guess;
    if (dist.family() == Family::pareto) {
        const double beta = dist.beta();
        // survival(n) ~ n^-beta / (beta zeta(1+beta))
        guess = std::pow(target * beta * hurwitz_zeta(1.0 + beta, 1.0).value, -1.0 / beta);
    } else {
        const double lambda = dist.lambda();
        const double g1 = upper_incomplete_gamma(1.0 / lambda, 1.0).value;
        // survival(n) ~ z^{1/lambda-1} e^-z / Gamma(1/lambda,1), z = n^lambda
        double z = std::max(1.0, -std::log(target * g1));
        for (int it = 0; it < 3; ++it) {
            z = std::max(1.0, -std::log(target * g1) + (1.0 / lambda - 1.0) * std::log(z));
        }
        guess = std::pow(z, 1.0 / lambda);
    }
    std::int64_t lo = std::max<std::int64_t>(
        kHeadCacheSize, static_cast<std::int64_t>(guess * 0.5));
    while (lo > kHeadCacheSize && surv(lo) <= target) lo /= 2;
    if (lo < kHeadCacheSize) lo = kHeadCacheSize;
    std::int64_t hi = std::max<std::int64_t>(lo + 1, static_cast<std::int64_t>(guess * 2.0));
    while (surv(hi) > target) {
        if (hi > (std::int64_t{1} << 52)) {
            throw numerical_error("sample_size: survival inversion ran away");
        }
        hi *= 2;
    }
    return bisect_survival(surv, target, lo, hi);
}

} // namespace impactkit
