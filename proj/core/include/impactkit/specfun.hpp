#pragma once

#include <cstdint>

namespace impactkit {

/// Value of a special function together with a bound on the evaluation error.
struct SpecFunResult {
    double value = 0.0;
    double est_abs_error = 0.0;
};

/// Riemann zeta(s) for s > 1.
SpecFunResult riemann_zeta(double s);

/// Hurwitz zeta(s, a) = sum_{n>=0} (a+n)^-s for s > 1, a > 0.
SpecFunResult hurwitz_zeta(double s, double a);

/// Generalized harmonic number H_m^{(s)} = sum_{n=1}^{m} n^-s. Total for m >= 1.
double generalized_harmonic(std::int64_t m, double s);

/// Upper incomplete gamma Gamma(a, z) = int_z^inf t^{a-1} e^-t dt, z > 0,
/// any real a (negative a handled by the recurrence lift through a+k > 0).
SpecFunResult upper_incomplete_gamma(double a, double z);

/// Exponential integral E_nu(z) = int_1^inf e^{-z t} t^-nu dt, z > 0,
/// evaluated through the reduction E_nu(z) = z^{nu-1} Gamma(1-nu, z).
SpecFunResult exponential_integral(double nu, double z);

} // namespace impactkit
