#include "impactkit/specfun.hpp"

#include "impactkit/errors.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace impactkit {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

// B_{2j} / (2j)! for j = 1..9 (B2=1/6, B4=-1/30, ..., B18=43867/798).
constexpr double kB2jOverFact[] = {
    8.33333333333333333e-02,   // j=1: 1/12
    -1.38888888888888889e-03,  // j=2: -1/720
    3.30687830687830688e-05,   // j=3: 1/30240
    -8.26719576719576720e-07,  // j=4: -1/1209600
    2.08767569878680990e-08,   // j=5: 1/47900160
    -5.28419013868749318e-10,  // j=6
    1.33825365306846788e-11,   // j=7
    -3.38968029632258287e-13,  // j=8
    8.58606205627784456e-15,   // j=9 (used only for the error bound)
};

// Euler-Maclaurin evaluation of zeta(s, a), s > 1, a > 0. Terms up to
// x = a + k >= kSwitchPoint are summed explicitly; the tail is the E-M
// integral plus Bernoulli corrections, with the first omitted term kept
// as the error bound.
constexpr double kSwitchPoint = 36.0;

SpecFunResult hurwitz_zeta_impl(double s, double a) {
    double sum = 0.0, comp = 0.0; // Kahan
    double x = a;
    long long terms = 0;
    while (x < kSwitchPoint) {
        double y = std::pow(x, -s) - comp;
        double t = sum + y;
        comp = (t - sum) - y;
        sum = t;
        x += 1.0;
        ++terms;
    }

    // Integral term, half-weight boundary term.
    const double xms = std::pow(x, -s);
    sum += x * xms / (s - 1.0);
    sum += 0.5 * xms;

    // Bernoulli corrections: T_j = B_{2j}/(2j)! * s(s+1)...(s+2j-2) * x^{-s-2j+1}.
    const double inv_x2 = 1.0 / (x * x);
    double rising = s;             // s(s+1)...(s+2j-2), starts with one factor
    double power = xms / x;        // x^{-s-1}
    double bound = 0.0;
    for (int j = 1; j <= 9; ++j) {
        const double term = kB2jOverFact[j - 1] * rising * power;
        if (j == 9) {
            bound = std::abs(term);
            break;
        }
        sum += term;
        rising *= (s + 2.0 * j - 1.0) * (s + 2.0 * j);
        power *= inv_x2;
    }

    const double rounding = (static_cast<double>(terms) + 24.0) * kEps * std::abs(sum);
    return {sum, bound + rounding};
}

// Continued fraction for Gamma(a, z) (modified Lentz), valid for z > 0.
SpecFunResult gamma_cf(double a, double z) {
    const double tiny = 1e-300;
    double b = z + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    double delta = 0.0;
    int i = 1;
    for (; i <= 100000; ++i) {
        const double an = -i * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        delta = d * c;
        h *= delta;
        if (std::abs(delta - 1.0) < 1e-16) break;
    }
    if (i > 100000) {
        throw numerical_error("upper_incomplete_gamma: continued fraction failed to "
                              "converge at a=" + std::to_string(a) +
                              ", z=" + std::to_string(z));
    }
    const double prefactor = std::exp(-z + a * std::log(z));
    const double value = prefactor * h;
    const double est = std::abs(value) * (std::abs(delta - 1.0) * 8.0 + 16.0 * kEps);
    return {value, est};
}

// Lower-gamma series route: Gamma(a,z) = Gamma(a) - gamma(a,z), for 0 < z <= a+1.
SpecFunResult gamma_series(double a, double z) {
    double ap = a;
    double term = 1.0 / a;
    double sum = term;
    int i = 0;
    for (; i <= 100000; ++i) {
        ap += 1.0;
        term *= z / ap;
        sum += term;
        if (std::abs(term) < std::abs(sum) * 1e-17) break;
    }
    if (i > 100000) {
        throw numerical_error("upper_incomplete_gamma: series failed to converge");
    }
    const double prefactor = std::exp(-z + a * std::log(z));
    const double lower = prefactor * sum;
    const double whole = std::tgamma(a);
    const double value = whole - lower;
    const double est =
        std::abs(prefactor * term) + 8.0 * kEps * (std::abs(whole) + std::abs(lower));
    return {value, est};
}

} // namespace

SpecFunResult riemann_zeta(double s) {
    if (!(s > 1.0)) {
        throw domain_error("riemann_zeta: requires s > 1, got s=" + std::to_string(s));
    }
    return hurwitz_zeta_impl(s, 1.0);
}

SpecFunResult hurwitz_zeta(double s, double a) {
    if (!(s > 1.0) || !(a > 0.0)) {
        throw domain_error("hurwitz_zeta: requires s > 1 and a > 0, got s=" +
                           std::to_string(s) + ", a=" + std::to_string(a));
    }
    return hurwitz_zeta_impl(s, a);
}

double generalized_harmonic(std::int64_t m, double s) {
    if (m < 1) {
        throw domain_error("generalized_harmonic: requires m >= 1, got m=" +
                           std::to_string(m));
    }
    double sum = 0.0, comp = 0.0;
    for (std::int64_t n = 1; n <= m; ++n) {
        const double y = std::pow(static_cast<double>(n), -s) - comp;
        const double t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }
    return sum;
}

SpecFunResult upper_incomplete_gamma(double a, double z) {
    if (!(z > 0.0)) {
        throw domain_error("upper_incomplete_gamma: requires z > 0, got z=" +
                           std::to_string(z));
    }
    if (a > 0.0 && z <= a + 1.0) return gamma_series(a, z);
    return gamma_cf(a, z);
}

SpecFunResult exponential_integral(double nu, double z) {
    if (!(z > 0.0)) {
        throw domain_error("exponential_integral: requires z > 0, got z=" +
                           std::to_string(z));
    }
    const SpecFunResult g = upper_incomplete_gamma(1.0 - nu, z);
    const double scale = std::pow(z, nu - 1.0);
    return {scale * g.value, scale * g.est_abs_error + 4.0 * kEps * std::abs(scale * g.value)};
}

} // namespace impactkit
