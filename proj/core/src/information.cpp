#include "impactkit/information.hpp"

#include "impactkit/errors.hpp"
#include "quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

namespace impactkit {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kBinQuadTol = 1e-10;

std::string format_param(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

} // namespace

double InformationDensity::pdf(double a) const {
    switch (kind_) {
    case Kind::uniform:
        return (a >= lower_ && a < upper_) ? 1.0 / (upper_ - lower_) : 0.0;
    case Kind::pareto_tail:
        if (a < lower_) return 0.0;
        return (exponent_ - 1.0) / lower_ * std::pow(a / lower_, -exponent_);
    case Kind::table: {
        if (a < 0.0 || a >= upper_) return 0.0;
        const auto i = static_cast<std::size_t>(a);
        return bin_pdf_[std::min(i, bin_pdf_.size() - 1)];
    }
    }
    return 0.0;
}

double InformationDensity::cdf(double a) const {
    if (a <= lower_) return 0.0;
    switch (kind_) {
    case Kind::uniform:
        return a >= upper_ ? 1.0 : (a - lower_) / (upper_ - lower_);
    case Kind::pareto_tail:
        return 1.0 - std::pow(a / lower_, 1.0 - exponent_);
    case Kind::table: {
        if (a >= upper_) return 1.0;
        const auto i = static_cast<std::size_t>(a);
        const double left = i == 0 ? 0.0 : bin_cdf_[i - 1];
        return left + bin_pdf_[i] * (a - static_cast<double>(i));
    }
    }
    return 0.0;
}

double InformationDensity::quantile(double u) const {
    if (u < 0.0 || u > 1.0) {
        throw domain_error("InformationDensity::quantile: u must lie in [0,1]");
    }
    if (u >= 1.0) return upper_;
    switch (kind_) {
    case Kind::uniform:
        return lower_ + u * (upper_ - lower_);
    case Kind::pareto_tail:
        return lower_ * std::pow(1.0 - u, -1.0 / (exponent_ - 1.0));
    case Kind::table: {
        const auto it = std::lower_bound(bin_cdf_.begin(), bin_cdf_.end(), u);
        const auto i = static_cast<std::size_t>(it - bin_cdf_.begin());
        const double left = i == 0 ? 0.0 : bin_cdf_[i - 1];
        if (bin_pdf_[i] <= 0.0) return static_cast<double>(i); // edge of an empty bin
        return static_cast<double>(i) + (u - left) / bin_pdf_[i];
    }
    }
    return 0.0;
}

double InformationDensity::tail_first_moment(double a) const {
    a = std::max(a, lower_);
    switch (kind_) {
    case Kind::uniform: {
        if (a >= upper_) return 0.0;
        return 0.5 * (upper_ * upper_ - a * a) / (upper_ - lower_);
    }
    case Kind::pareto_tail: {
        if (exponent_ <= 2.0) {
            throw numerical_error("tail_first_moment: diverges for exponent <= 2");
        }
        return (exponent_ - 1.0) / (exponent_ - 2.0) *
               std::pow(lower_, exponent_ - 1.0) * std::pow(a, 2.0 - exponent_);
    }
    case Kind::table: {
        if (a >= upper_) return 0.0;
        double total = 0.0;
        const auto first = static_cast<std::size_t>(a);
        for (std::size_t i = first; i < bin_pdf_.size(); ++i) {
            const double x1 = std::max(a, static_cast<double>(i));
            const double x2 = static_cast<double>(i + 1);
            total += bin_pdf_[i] * 0.5 * (x2 * x2 - x1 * x1);
        }
        return total;
    }
    }
    return 0.0;
}

InformationDensity InformationDensity::uniform(double a, double b) {
    if (!(a >= 0.0) || !(b > a)) {
        throw domain_error("InformationDensity::uniform: requires 0 <= a < b");
    }
    InformationDensity d;
    d.kind_ = Kind::uniform;
    d.lower_ = a;
    d.upper_ = b;
    return d;
}

InformationDensity InformationDensity::pareto_tail(double exponent, double x_min) {
    if (!(exponent > 1.0) || !(x_min > 0.0)) {
        throw domain_error(
            "InformationDensity::pareto_tail: requires exponent > 1 and x_min > 0");
    }
    InformationDensity d;
    d.kind_ = Kind::pareto_tail;
    d.lower_ = x_min;
    d.upper_ = kInf;
    d.exponent_ = exponent;
    return d;
}

InformationDensity InformationDensity::from_table(std::span<const double> weights) {
    std::size_t m = weights.size();
    for (double w : weights) {
        if (!std::isfinite(w) || w < 0.0) {
            throw domain_error("InformationDensity::from_table: bad weight");
        }
    }
    while (m > 0 && weights[m - 1] == 0.0) --m;
    if (m == 0) {
        throw domain_error("InformationDensity::from_table: needs a positive weight");
    }
    double total = 0.0;
    for (std::size_t i = 0; i < m; ++i) total += weights[i];
    InformationDensity d;
    d.kind_ = Kind::table;
    d.lower_ = 0.0;
    d.upper_ = static_cast<double>(m);
    d.bin_pdf_.resize(m);
    d.bin_cdf_.resize(m);
    double cum = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        d.bin_pdf_[i] = weights[i] / total;
        cum += weights[i] / total;
        d.bin_cdf_[i] = cum;
    }
    d.bin_cdf_[m - 1] = 1.0;
    return d;
}

InformationDensity InformationDensity::load_table(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) {
        throw config_error("InformationDensity::load_table: cannot open " + file.string());
    }
    std::vector<double> weights;
    std::string line;
    while (std::getline(in, line)) {
        const auto b = line.find_first_not_of(" \t\r");
        if (b == std::string::npos) continue;
        const auto e = line.find_last_not_of(" \t\r");
        const std::string tok = line.substr(b, e - b + 1);
        try {
            std::size_t used = 0;
            const double w = std::stod(tok, &used);
            if (used != tok.size()) throw std::invalid_argument(tok);
            weights.push_back(w);
        } catch (const std::exception&) {
            throw config_error("InformationDensity::load_table: bad weight '" + tok + "'");
        }
    }
    try {
        return from_table(weights);
    } catch (const domain_error& err) {
        throw config_error(std::string("InformationDensity::load_table: ") + err.what());
    }
}

std::string InformationDensity::spec_string() const {
    switch (kind_) {
    case Kind::uniform:
        return "uniform:a=" + format_param(lower_) + ",b=" + format_param(upper_);
    case Kind::pareto_tail:
        return "pareto_tail:exponent=" + format_param(exponent_) +
               ",xmin=" + format_param(lower_);
    case Kind::table:
        return "table:bins=" + std::to_string(bin_pdf_.size());
    }
    return "";
}

std::int64_t InformationMap::size_of_alpha(double alpha) const {
    const double a = std::abs(alpha);
    const auto it = std::upper_bound(thresholds.begin(), thresholds.end(), a);
    const auto idx = static_cast<std::int64_t>(it - thresholds.begin());
    return std::min<std::int64_t>(idx + 1, bins());
}

InformationMap build_map(const InformationDensity& density, const SizeDistribution& dist,
                         std::int64_t horizon) {
    if (horizon < 1) {
        throw domain_error("build_map: horizon must be >= 1");
    }
    if (dist.finite_support() && horizon > dist.max_size()) {
        throw domain_error("build_map: horizon exceeds the size-law support");
    }
    InformationMap map;
    map.alpha0 = density.lower();
    const double s1 = dist.survival(1);
    double prev_alpha = density.lower();
    double prev_cum = 0.0;
    for (std::int64_t n = 1; n <= horizon; ++n) {
        const double cum = 1.0 - dist.survival(n + 1) / s1;
        const bool last_bin = cum >= 1.0 - 1e-12;
        const double alpha_n = last_bin ? density.upper() : density.quantile(cum);
        const double mass = (last_bin ? 1.0 : cum) - prev_cum;
        if (!(mass > 0.0)) {
            throw numerical_error("build_map: zero bin mass at n=" + std::to_string(n));
        }
        double numer;
        if (std::isinf(alpha_n)) {
            numer = density.tail_first_moment(prev_alpha);
        } else {
            numer = detail::adaptive_simpson(
                [&density](double x) { return x * density.pdf(x); }, prev_alpha, alpha_n,
                kBinQuadTol);
        }
        map.thresholds.push_back(alpha_n);
        map.cond_mean.push_back(numer / mass);
        if (last_bin) {
            map.truncated = n < horizon;
            break;
        }
        prev_alpha = alpha_n;
        prev_cum = cum;
    }
    return map;
}

std::function<double(double)> continuum_density_from_sizes(
    const SizeDistribution& dist, const std::function<double(double)>& alpha_of_n) {
    if (!dist.has_smooth_tail()) {
        throw domain_error(
            "continuum_density_from_sizes: size law has no smooth tail extension");
    }
    // Reject visibly non-monotone maps up front.
    double prev = alpha_of_n(1.0);
    for (double n = 2.0; n <= 1024.0; n *= 2.0) {
        const double cur = alpha_of_n(n);
        if (!(cur > prev)) {
            throw domain_error("continuum_density_from_sizes: alpha_of_n is not "
                               "strictly increasing");
        }
        prev = cur;
    }

    return [dist, alpha_of_n](double alpha) -> double {
        if (!(alpha >= alpha_of_n(1.0))) {
            throw domain_error("continuum density: alpha below the image of N = 1");
        }
        double lo = 1.0, hi = 2.0;
        while (alpha_of_n(hi) < alpha) {
            lo = hi;
            hi *= 2.0;
            if (hi > 1e18) {
                throw numerical_error("continuum density: inversion ran away");
            }
        }
        for (int it = 0; it < 200 && hi - lo > 1e-12 * hi; ++it) {
            const double mid = 0.5 * (lo + hi);
            (alpha_of_n(mid) < alpha ? lo : hi) = mid;
        }
        const double n = 0.5 * (lo + hi);
        const double h = std::max(1e-6 * n, 1e-9);
        const double deriv = (alpha_of_n(n + h) - alpha_of_n(n - h)) / (2.0 * h);
        if (!(deriv > 0.0)) {
            throw domain_error("continuum density: alpha_of_n not increasing at N=" +
                               std::to_string(n));
        }
        return dist.pmf_real(n) / deriv;
    };
}

ScaleCalibration calibrate_scale(const InformationMap& map, const SizeDistribution& dist) {
    if (map.bins() < 2) {
        throw calibration_error("calibrate_scale: needs at least two bins");
    }
    const double p1 = dist.pmf(1) / dist.survival(1);
    if (!(p1 < 1.0)) {
        throw calibration_error("calibrate_scale: p_1 = 1 leaves no second size");
    }
    if (!(p1 > 0.0)) {
        throw calibration_error("calibrate_scale: p_1 = 0 makes I_1 degenerate");
    }
    const double abar1 = map.cond_mean[0];
    const double abar2 = map.cond_mean[1];
    // I_1 = R0 - ((1-p1)/p1) R~1, I_2 = R0 + R~1/2.
    const double denom = 0.5 + (1.0 - p1) / p1;
    const double rtilde1 = (abar2 - abar1) / denom;
    if (!(rtilde1 > 0.0) || !std::isfinite(rtilde1)) {
        throw calibration_error(
            "calibrate_scale: solved R~_1 = " + format_param(rtilde1) +
            " (abar1=" + format_param(abar1) + ", abar2=" + format_param(abar2) +
            ", p1=" + format_param(p1) + "); impact scale must be positive");
    }
    return {abar2 - rtilde1 * 0.5, rtilde1};
}

} // namespace impactkit
