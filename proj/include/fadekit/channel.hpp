#pragma once

#include <cmath>
#include <limits>
#include <span>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "fadekit/error.hpp"
#include "fadekit/numerics.hpp"
#include "fadekit/specfun.hpp"

namespace fadekit {

/// A density of the shape shared by both fading families:
///   f(g) = K g^{(alpha/2) omega - 1} exp(-sigma g^{alpha/2}) I_{mu-1}(sqrt(theta g^{alpha/2}))
struct BesselKernel {
    double alpha;
    double K;
    double omega;
    double sigma;
    double theta;
    double mu;
};

/// Evaluates a BesselKernel density at g > 0 directly from its six symbols.
inline double kernel_pdf(const BesselKernel& k, double g) {
    if (!(g > 0.0)) return 0.0;
    const double lg = std::log(g);
    const double y = std::exp(0.5 * k.alpha * lg);
    const double z = std::sqrt(k.theta * y);
    const double l = std::log(k.K) + (0.5 * k.alpha * k.omega - 1.0) * lg - k.sigma * y +
                     specfun::log_bessel_i(k.mu - 1.0, z);
    return std::exp(l);
}

/// Noncentral chi-square description of a law: X = 2 rate g^{alpha/2}
/// has `dof` degrees of freedom and noncentrality `noncentrality`.
struct ChiSquareForm {
    double dof;
    double noncentrality;
    double rate;
    double alpha;

    double to_snr(double x) const { return std::pow(x / (2.0 * rate), 2.0 / alpha); }
};

/// Truncated small-SNR power series of a density,
///   f(g) ~ sum_k coefficients[k] g^{exponents[k]},
/// plus the probability mass sitting at g = 0.
struct PoincareSeries {
    std::vector<double> coefficients;
    std::vector<double> exponents;
    int order = 0;
    double leading_mass = 0.0;
};

namespace detail {

inline void require_positive(double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v)) {
        std::ostringstream msg;
        msg << name << " must be a finite positive number (got " << v << ")";
        throw DomainError(msg.str());
    }
}

// Coefficients of y^k in exp(-sigma y) * sum_i (q y)^i / (i! Gamma(i + nu + 1)).
inline PoincareSeries poincare_terms(double log_prefactor, double sigma, double q, double nu,
                                     double alpha, double base_exponent, int N, double mass) {
    if (N < 1) throw DomainError("Poincare series order must be at least 1");
    PoincareSeries s;
    s.order = N;
    s.leading_mass = mass;
    const long double pref = std::exp(static_cast<long double>(log_prefactor));
    for (int k = 0; k < N; ++k) {
        long double sum = 0.0L;
        for (int j = 0; j <= k; ++j) {
            const int i = k - j;
            const long double lt = j * std::log(static_cast<long double>(sigma)) +
                                   i * std::log(static_cast<long double>(q)) - std::lgamma(j + 1.0L) -
                                   std::lgamma(i + 1.0L) - std::lgamma(i + nu + 1.0L);
            const long double t = std::exp(lt);
            sum += (j % 2 == 0) ? t : -t;
        }
        s.coefficients.push_back(static_cast<double>(pref * sum));
        s.exponents.push_back(0.5 * alpha * k + base_exponent);
    }
    return s;
}

}  // namespace detail

/// The alpha-kappa-mu fading law of the instantaneous SNR.
///
/// The law has a scale parameter (written gamma-hat here) through
/// sigma = mu (kappa + 1) / gamma-hat^{alpha/2}. The scale equals the mean
/// SNR only when alpha = 2; `mean_snr()` is always the true mean E[g].
class AlphaKappaMu {
public:
    /// Law with the given mean SNR E[g] (linear).
    AlphaKappaMu(double alpha, double kappa, double mu, double mean_snr)
        : AlphaKappaMu(alpha, kappa, mu, mean_snr, true) {}

    /// Law with the given scale gamma-hat (linear).
    static AlphaKappaMu from_scale(double alpha, double kappa, double mu, double scale) {
        return AlphaKappaMu(alpha, kappa, mu, scale, false);
    }

    double alpha() const { return alpha_; }
    double kappa() const { return kappa_; }
    double mu() const { return mu_; }
    double mean_snr() const { return mean_; }
    double scale() const { return scale_; }
    double omega() const { return 0.5 * (mu_ + 1.0); }
    double sigma() const { return sigma_; }
    double theta() const { return 4.0 * mu_ * kappa_ * sigma_; }
    double K() const { return std::exp(log_K()); }
    double zero_mass() const { return 0.0; }

    BesselKernel kernel() const { return {alpha_, K(), omega(), sigma_, theta(), mu_}; }
    ChiSquareForm chi_square() const { return {2.0 * mu_, 2.0 * mu_ * kappa_, sigma_, alpha_}; }

    double pdf(double g) const {
        if (!(g > 0.0)) return 0.0;
        const double lg = std::log(g);
        const double y = std::exp(0.5 * alpha_ * lg);
        if (y == std::numeric_limits<double>::infinity()) return 0.0;
        const double z = 2.0 * std::sqrt(mu_ * kappa_ * sigma_ * y);
        return std::exp(log_front_ + (0.5 * alpha_ * mu_ - 1.0) * lg - sigma_ * y +
                        specfun::log_bessel_i_ratio(mu_ - 1.0, z));
    }

    double cdf(double g) const { return marcum(g).p; }
    double survival(double g) const { return marcum(g).q; }

    /// E[g^r], finite for r > -alpha mu / 2.
    double moment(double r) const {
        if (!(r > -0.5 * alpha_ * mu_))
            throw DomainError("alpha-kappa-mu moment of order r needs r > -alpha mu / 2");
        return std::exp(r * std::log(scale_) + log_moment_ratio(r));
    }

    PoincareSeries poincare_series(int N) const {
        return detail::poincare_terms(log_front_, sigma_, mu_ * kappa_ * sigma_, mu_ - 1.0, alpha_,
                                      0.5 * alpha_ * mu_ - 1.0, N, 0.0);
    }

private:
    AlphaKappaMu(double alpha, double kappa, double mu, double snr, bool snr_is_mean)
        : alpha_(alpha), kappa_(kappa), mu_(mu) {
        detail::require_positive(alpha, "alpha");
        detail::require_positive(kappa, "kappa");
        detail::require_positive(mu, "mu");
        detail::require_positive(snr, snr_is_mean ? "mean SNR" : "scale");
        if (mu * kappa > 700.0) throw OverflowError("alpha-kappa-mu requires mu * kappa <= 700");
        const double lr = log_moment_ratio(1.0);
        if (snr_is_mean) {
            mean_ = snr;
            scale_ = std::exp(std::log(snr) - lr);
        } else {
            scale_ = snr;
            mean_ = std::exp(std::log(snr) + lr);
        }
        sigma_ = mu * (kappa + 1.0) / std::pow(scale_, 0.5 * alpha);
        detail::require_positive(sigma_, "sigma");
        log_front_ = std::log(0.5 * alpha) + mu * std::log(sigma_) - mu * kappa;
    }

    // E[g^r] / scale^r
    double log_moment_ratio(double r) const {
        const double s = 2.0 * r / alpha_ + mu_;
        const double mk = mu_ * kappa_;
        return specfun::log_gamma(s) - specfun::log_gamma(mu_) + specfun::log_kummer_m(s, mu_, mk) - mk -
               (2.0 * r / alpha_) * std::log(mu_ * (kappa_ + 1.0));
    }

    double log_K() const {
        const double w = omega();
        return std::log(0.5 * alpha_) + w * std::log(sigma_) - mu_ * kappa_ -
               (w - 1.0) * std::log(mu_ * kappa_);
    }

    specfun::MarcumPQ marcum(double g) const {
        if (!(g >= 0.0)) throw DomainError("SNR must be non-negative");
        const double y = std::pow(g, 0.5 * alpha_);
        if (y == std::numeric_limits<double>::infinity()) return {1.0, 0.0};
        return specfun::marcum_pq(mu_, std::sqrt(2.0 * mu_ * kappa_), std::sqrt(2.0 * sigma_ * y));
    }

    double alpha_;
    double kappa_;
    double mu_;
    double mean_ = 0.0;
    double scale_ = 0.0;
    double sigma_ = 0.0;
    double log_front_ = 0.0;
};

/// The alpha-kappa-mu-Extreme law: an atom of mass e^{-2m} at zero SNR plus
/// a continuous part. The scale/mean convention matches AlphaKappaMu.
class AlphaKappaMuExtreme {
public:
    AlphaKappaMuExtreme(double alpha, double m, double mean_snr)
        : AlphaKappaMuExtreme(alpha, m, mean_snr, true) {}

    static AlphaKappaMuExtreme from_scale(double alpha, double m, double scale) {
        return AlphaKappaMuExtreme(alpha, m, scale, false);
    }

    /// Severity parameter from the (kappa, mu) pair it limits.
    static double m_from_kappa_mu(double kappa, double mu) {
        detail::require_positive(kappa, "kappa");
        detail::require_positive(mu, "mu");
        return mu * (kappa + 1.0) * (kappa + 1.0) / (2.0 * kappa + 1.0);
    }

    double alpha() const { return alpha_; }
    double m() const { return m_; }
    double mean_snr() const { return mean_; }
    double scale() const { return scale_; }
    double a() const { return std::exp(log_a_); }
    double b() const { return b_; }
    double c() const { return 8.0 * m_ * b_; }
    double zero_mass() const { return std::exp(-2.0 * m_); }

    BesselKernel kernel() const { return {alpha_, a(), 0.5, b_, c(), 2.0}; }
    ChiSquareForm chi_square() const { return {0.0, 4.0 * m_, b_, alpha_}; }

    /// Density of the continuous part.
    double pdf(double g) const {
        if (!(g > 0.0)) return 0.0;
        const double lg = std::log(g);
        const double y = std::exp(0.5 * alpha_ * lg);
        if (y == std::numeric_limits<double>::infinity()) return 0.0;
        const double z = std::sqrt(c() * y);
        return std::exp(log_a_ + (0.25 * alpha_ - 1.0) * lg - b_ * y + specfun::log_bessel_i(1.0, z));
    }

    /// P(g' <= g), including the atom: cdf(0) = e^{-2m}.
    double cdf(double g) const { return marcum(g).p; }
    double survival(double g) const { return marcum(g).q; }

    /// E[g^r] for r > 0 (the atom contributes nothing).
    double moment(double r) const {
        if (!(r > 0.0)) throw DomainError("alpha-kappa-mu-Extreme moments need r > 0");
        return std::exp(r * std::log(scale_) + log_moment_ratio(r));
    }

    PoincareSeries poincare_series(int N) const {
        const double log_pref = log_a_ + 0.5 * std::log(c()) - std::log(2.0);
        return detail::poincare_terms(log_pref, b_, 0.25 * c(), 1.0, alpha_, 0.5 * alpha_ - 1.0, N,
                                      zero_mass());
    }

private:
    AlphaKappaMuExtreme(double alpha, double m, double snr, bool snr_is_mean)
        : alpha_(alpha), m_(m) {
        detail::require_positive(alpha, "alpha");
        detail::require_positive(m, "m");
        detail::require_positive(snr, snr_is_mean ? "mean SNR" : "scale");
        if (2.0 * m > 700.0) throw OverflowError("alpha-kappa-mu-Extreme requires 2m <= 700");
        const double lr = log_moment_ratio(1.0);
        if (snr_is_mean) {
            mean_ = snr;
            scale_ = std::exp(std::log(snr) - lr);
        } else {
            scale_ = snr;
            mean_ = std::exp(std::log(snr) + lr);
        }
        b_ = 2.0 * m / std::pow(scale_, 0.5 * alpha);
        detail::require_positive(b_, "b");
        log_a_ = std::log(alpha * m) - 2.0 * m - 0.25 * alpha * std::log(scale_);
    }

    double log_moment_ratio(double r) const {
        const double s = 2.0 * r / alpha_;
        return specfun::log_gamma(1.0 + s) + specfun::log_kummer_m(1.0 + s, 2.0, 2.0 * m_) - 2.0 * m_ -
               (s - 1.0) * std::log(2.0 * m_);
    }

    specfun::MarcumPQ marcum(double g) const {
        if (!(g >= 0.0)) throw DomainError("SNR must be non-negative");
        const double y = std::pow(g, 0.5 * alpha_);
        if (y == std::numeric_limits<double>::infinity()) return {1.0, 0.0};
        return specfun::marcum_pq(0.0, 2.0 * std::sqrt(m_), std::sqrt(2.0 * b_ * y));
    }

    double alpha_;
    double m_;
    double mean_ = 0.0;
    double scale_ = 0.0;
    double b_ = 0.0;
    double log_a_ = 0.0;
};

using FadingLaw = std::variant<AlphaKappaMu, AlphaKappaMuExtreme>;

/// alpha-kappa-mu law whose mean SNR equals the given Eb/N0 (linear).
inline AlphaKappaMu akm_from_ebn0(double alpha, double kappa, double mu, double ebn0) {
    return AlphaKappaMu(alpha, kappa, mu, ebn0);
}

inline AlphaKappaMuExtreme extreme_from_ebn0(double alpha, double m, double ebn0) {
    return AlphaKappaMuExtreme(alpha, m, ebn0);
}

inline double pdf(const FadingLaw& law, double g) {
    return std::visit([g](const auto& l) { return l.pdf(g); }, law);
}
inline double cdf(const FadingLaw& law, double g) {
    return std::visit([g](const auto& l) { return l.cdf(g); }, law);
}
inline double survival(const FadingLaw& law, double g) {
    return std::visit([g](const auto& l) { return l.survival(g); }, law);
}
inline double moment(const FadingLaw& law, double r) {
    return std::visit([r](const auto& l) { return l.moment(r); }, law);
}
inline double zero_mass(const FadingLaw& law) {
    return std::visit([](const auto& l) { return l.zero_mass(); }, law);
}
inline double mean_snr(const FadingLaw& law) {
    return std::visit([](const auto& l) { return l.mean_snr(); }, law);
}
inline double alpha(const FadingLaw& law) {
    return std::visit([](const auto& l) { return l.alpha(); }, law);
}
inline BesselKernel kernel(const FadingLaw& law) {
    return std::visit([](const auto& l) { return l.kernel(); }, law);
}
inline ChiSquareForm chi_square(const FadingLaw& law) {
    return std::visit([](const auto& l) { return l.chi_square(); }, law);
}
inline PoincareSeries poincare_series(const FadingLaw& law, int N) {
    return std::visit([N](const auto& l) { return l.poincare_series(N); }, law);
}
inline bool is_extreme(const FadingLaw& law) {
    return std::holds_alternative<AlphaKappaMuExtreme>(law);
}

/// Default accuracy of integrals against a density.
inline constexpr numerics::QuadSpec law_quad_spec{1e-11, 1e-300, 4000};

/// SNR values around which the continuous part of a law lives; used as
/// quadrature breakpoints.
inline std::vector<double> landmarks(const FadingLaw& law) {
    const ChiSquareForm f = chi_square(law);
    const double mean = f.dof + f.noncentrality;
    const double sd = std::sqrt(2.0 * (f.dof + 2.0 * f.noncentrality));
    std::vector<double> pts{f.to_snr(mean), f.to_snr(std::max(mean - 3.0 * sd, 0.05 * mean)),
                            f.to_snr(mean + 5.0 * sd), 1.0};
    return pts;
}

/// Integral over (lo, hi) of h(g) times the continuous density of the law.
/// Extra breakpoints can be supplied where h itself changes scale.
template <class H>
double integrate_density(const FadingLaw& law, H&& h, double lo, double hi,
                         std::span<const double> extra_points = {},
                         const numerics::QuadSpec& spec = law_quad_spec) {
    std::vector<double> pts = landmarks(law);
    pts.insert(pts.end(), extra_points.begin(), extra_points.end());
    auto integrand = [&](double g) {
        const double f = pdf(law, g);
        return f == 0.0 ? 0.0 : h(g) * f;
    };
    return numerics::integrate_log_scale(integrand, lo, hi, pts, spec).value;
}

}  // namespace fadekit
