#pragma once

#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <string>

#include "fadekit/channel.hpp"
#include "fadekit/error.hpp"
#include "fadekit/numerics.hpp"
#include "fadekit/specfun.hpp"
#include "fadekit/system.hpp"

namespace fadekit {

enum class ModulationKind { bfsk_coherent, bpsk, qpsk, qam4, mpam, bfsk_noncoherent, dbpsk, mfsk };

/// A modulation scheme reduced to the two constants of its conditional error
/// probability: (phi / 2) erfc(rho sqrt(g / 2)) for coherent detection and
/// phi exp(-rho g) for non-coherent detection.
struct Modulation {
    ModulationKind kind;
    int order;
    bool coherent;
    double phi;
    double rho;

    static Modulation make(ModulationKind kind, int order = 2) {
        const double M = order;
        switch (kind) {
            case ModulationKind::bfsk_coherent: return {kind, 2, true, 1.0, 1.0};
            case ModulationKind::bpsk: return {kind, 2, true, 1.0, std::numbers::sqrt2};
            case ModulationKind::qpsk: return {kind, 4, true, 2.0, 1.0};
            case ModulationKind::qam4: return {kind, 4, true, 2.0, 1.0};
            case ModulationKind::bfsk_noncoherent: return {kind, 2, false, 0.5, 0.5};
            case ModulationKind::dbpsk: return {kind, 2, false, 0.5, 1.0};
            case ModulationKind::mpam:
                if (order < 2) throw DomainError("M-PAM needs an order M >= 2");
                return {kind, order, true, 2.0 * (1.0 - 1.0 / M), std::sqrt(6.0 / (M * M - 1.0))};
            case ModulationKind::mfsk:
                if (order < 2) throw DomainError("M-FSK needs an order M >= 2");
                return {kind, order, false, 0.5 * (M - 1.0), 0.5};
        }
        throw DomainError("unknown modulation");
    }

    std::string name() const {
        switch (kind) {
            case ModulationKind::bfsk_coherent: return "bfsk_coh";
            case ModulationKind::bpsk: return "bpsk";
            case ModulationKind::qpsk: return "qpsk";
            case ModulationKind::qam4: return "qam4";
            case ModulationKind::mpam: return "mpam";
            case ModulationKind::bfsk_noncoherent: return "bfsk_nc";
            case ModulationKind::dbpsk: return "dbpsk";
            case ModulationKind::mfsk: return "mfsk";
        }
        return "?";
    }
};

enum class CapacityScheme { ora, opra, cifr, tifr };

struct CapacityResult {
    double value = 0.0;
    std::optional<double> cutoff;
    CapacityScheme scheme = CapacityScheme::ora;
    /// Set when the inverse SNR moment is infinite, so the channel cannot be inverted.
    bool divergent_inverse_moment = false;
};

/// Which of the two equivalent integrals a capacity is computed from.
enum class CapacityRoute { survival, density };

namespace detail {

inline double bits_per_hop(const HopChain& chain, double bandwidth) {
    if (!(bandwidth > 0.0) || !std::isfinite(bandwidth)) throw DomainError("bandwidth must be positive");
    return bandwidth / (static_cast<double>(chain.size()) * std::numbers::ln2);
}

// Ratio E[g^2] / E[g]^2 of a single law, free of the scale.
inline double moment_ratio_2(const FadingLaw& law) {
    if (const auto* a = std::get_if<AlphaKappaMu>(&law)) {
        const double mu = a->mu();
        const double mk = mu * a->kappa();
        const double s1 = 2.0 / a->alpha() + mu;
        const double s2 = 4.0 / a->alpha() + mu;
        return std::exp(specfun::log_gamma(mu) + mk + specfun::log_gamma(s2) + specfun::log_kummer_m(s2, mu, mk) -
                        2.0 * specfun::log_gamma(s1) - 2.0 * specfun::log_kummer_m(s1, mu, mk));
    }
    const auto& e = std::get<AlphaKappaMuExtreme>(law);
    const double m2 = 2.0 * e.m();
    const double s1 = 1.0 + 2.0 / e.alpha();
    const double s2 = 1.0 + 4.0 / e.alpha();
    return std::exp(m2 + specfun::log_gamma(s2) + specfun::log_kummer_m(s2, 2.0, m2) - std::log(m2) -
                    2.0 * specfun::log_gamma(s1) - 2.0 * specfun::log_kummer_m(s1, 2.0, m2));
}

inline void require_reachable(const HopChain& chain) {
    if (chain.prefix_survival() == 0.0)
        throw DomainError("amount of fading is undefined: the end-to-end SNR is zero with probability one");
}

}  // namespace detail

/// Generalized amount of fading E[g^k] / E[g]^k - 1 of the end-to-end SNR.
inline double amount_of_fading(const HopChain& chain, int order = 2) {
    if (order < 2) throw DomainError("amount of fading needs order >= 2");
    detail::require_reachable(chain);
    const double m1 = end_moment(chain, 1.0);
    return end_moment(chain, static_cast<double>(order)) / std::pow(m1, order) - 1.0;
}

/// Second-order amount of fading from the closed-form moment ratio, which
/// does not involve the mean SNR at all.
inline double amount_of_fading_closed_form(const HopChain& chain) {
    detail::require_reachable(chain);
    return detail::moment_ratio_2(chain.last()) / chain.prefix_survival() - 1.0;
}

inline double outage_probability(const HopChain& chain, double gamma_th_op) {
    if (!(gamma_th_op >= 0.0)) throw DomainError("outage threshold must be >= 0");
    return end_cdf(chain, gamma_th_op);
}

/// Average BER for a coherent scheme.
inline double ber_coherent(const HopChain& chain, const Modulation& mod) {
    if (!mod.coherent) throw DomainError(mod.name() + " is not a coherent modulation");
    const double rho = mod.rho;
    const double pivots[] = {2.0 / (rho * rho), 50.0 / (rho * rho)};
    const double body = integrate_density(
        chain.last(), [rho](double g) { return std::erfc(rho * std::sqrt(0.5 * g)); }, 0.0,
        std::numeric_limits<double>::infinity(), pivots);
    return 0.5 * mod.phi * (end_point_mass(chain) + chain.prefix_survival() * body);
}

/// Average BER for a non-coherent scheme, phi times the MGF at rho.
inline double ber_noncoherent(const HopChain& chain, const Modulation& mod) {
    if (mod.coherent) throw DomainError(mod.name() + " is a coherent modulation");
    return mod.phi * end_mgf(chain, mod.rho);
}

inline double ber(const HopChain& chain, const Modulation& mod) {
    return mod.coherent ? ber_coherent(chain, mod) : ber_noncoherent(chain, mod);
}

/// Low-SNR BER from the first N terms of the small-g expansion of the
/// last-hop density. The series is asymptotic: more terms do not help
/// beyond a point, and it is only accurate where the density is
/// concentrated well inside the region the error kernel sees.
inline double ber_asymptotic(const HopChain& chain, const Modulation& mod, int N = 10) {
    const PoincareSeries s = poincare_series(chain.last(), N);
    const double mass = chain.prefix_outage() + chain.prefix_survival() * s.leading_mass;
    numerics::CompensatedSum sum;
    for (int k = 0; k < N; ++k) {
        const double t = s.exponents[k];
        double w;
        if (mod.coherent) {
            w = std::exp(t * std::numbers::ln2 + specfun::log_gamma(t + 1.5) - 0.5 * std::log(std::numbers::pi) -
                         std::log(t + 1.0) - 2.0 * (t + 1.0) * std::log(mod.rho));
        } else {
            w = std::exp(specfun::log_gamma(t + 1.0) - (t + 1.0) * std::log(mod.rho));
        }
        sum += s.coefficients[k] * w;
    }
    const double head = mod.coherent ? 0.5 * mass : mass;
    return mod.phi * (head + chain.prefix_survival() * sum.value());
}

/// Ergodic capacity with optimal rate adaptation.
inline CapacityResult capacity_ora(const HopChain& chain, double bandwidth,
                                   CapacityRoute route = CapacityRoute::survival) {
    const double k = detail::bits_per_hop(chain, bandwidth);
    CapacityResult r;
    r.scheme = CapacityScheme::ora;
    const double a = chain.prefix_survival();
    if (a == 0.0) return r;
    constexpr double inf = std::numeric_limits<double>::infinity();
    double body;
    if (route == CapacityRoute::survival) {
        const FadingLaw& law = chain.last();
        std::vector<double> pts = landmarks(law);
        auto h = [&law](double g) { return survival(law, g) / (1.0 + g); };
        body = numerics::integrate_log_scale(h, 0.0, inf, pts, law_quad_spec).value;
    } else {
        body = integrate_density(chain.last(), [](double g) { return std::log1p(g); }, 0.0, inf);
    }
    r.value = k * a * body;
    return r;
}

struct OpraCutoff {
    double value = 0.0;
    /// |xi(g_o) - g_o| at the returned point.
    double residual = 0.0;
    /// | integral over (g_o, inf) of (1/g_o - 1/g) f_end(g) dg - 1 |.
    double constraint_residual = 0.0;
    int iterations = 0;
};

/// Integral over (lo, inf) of f_end(g) / g.
inline double truncated_inverse_moment(const HopChain& chain, double lo) {
    if (!(lo > 0.0)) throw DomainError("truncation point must be > 0");
    const double a = chain.prefix_survival();
    if (a == 0.0) return 0.0;
    const double pivot[] = {lo * 1.5, lo * 10.0};
    return a * integrate_density(
                   chain.last(), [](double g) { return 1.0 / g; }, lo, std::numeric_limits<double>::infinity(),
                   pivot);
}

/// Cutoff SNR of optimal power and rate adaptation, the fixed point of
/// xi(g) = P(g_end > g) / (1 + integral over (g, inf) of f_end / g').
inline OpraCutoff opra_cutoff(const HopChain& chain, double tol = 1e-10) {
    const double a = chain.prefix_survival();
    if (!(a * (1.0 - zero_mass(chain.last())) > 0.0))
        throw DomainError("OPRA cutoff does not exist: the end-to-end SNR is zero with probability one");
    auto xi = [&chain](double g) {
        g = std::max(g, std::numeric_limits<double>::min());
        return end_survival(chain, g) / (1.0 + truncated_inverse_moment(chain, g));
    };
    // The cutoff lies below 1 and tracks the mean SNR when that is small.
    const double x0 = std::min(1.0, end_moment(chain, 1.0));
    const numerics::FixedPointResult fp = numerics::fixed_point(xi, x0, tol);
    OpraCutoff out;
    out.value = fp.value;
    out.residual = fp.residual;
    out.iterations = fp.iterations;
    out.constraint_residual =
        std::abs(end_survival(chain, fp.value) / fp.value - truncated_inverse_moment(chain, fp.value) - 1.0);
    return out;
}

/// Capacity with optimal power and rate adaptation.
inline CapacityResult capacity_opra(const HopChain& chain, double bandwidth,
                                    CapacityRoute route = CapacityRoute::survival) {
    const double k = detail::bits_per_hop(chain, bandwidth);
    CapacityResult r;
    r.scheme = CapacityScheme::opra;
    const double a = chain.prefix_survival();
    if (!(a * (1.0 - zero_mass(chain.last())) > 0.0)) return r;
    const double go = opra_cutoff(chain).value;
    r.cutoff = go;
    constexpr double inf = std::numeric_limits<double>::infinity();
    const FadingLaw& law = chain.last();
    double body;
    if (route == CapacityRoute::survival) {
        std::vector<double> pts = landmarks(law);
        pts.push_back(2.0 * go);
        auto h = [&law](double g) { return survival(law, g) / g; };
        body = numerics::integrate_log_scale(h, go, inf, pts, law_quad_spec).value;
    } else {
        const double pivot[] = {2.0 * go};
        body = integrate_density(law, [go](double g) { return std::log(g / go); }, go, inf, pivot);
    }
    r.value = k * a * body;
    return r;
}

namespace detail {

// The channel cannot be inverted when zero SNR has positive probability or
// when E[1/g] is infinite for the continuous part.
inline bool inverse_moment_diverges(const HopChain& chain) {
    if (end_point_mass(chain) > 0.0) return true;
    const auto& law = std::get<AlphaKappaMu>(chain.last());
    return law.alpha() * law.mu() <= 2.0;
}

}  // namespace detail

/// E[1/g_end] by quadrature. Infinite when the channel cannot be inverted.
inline double cifr_inverse_moment(const HopChain& chain) {
    if (detail::inverse_moment_diverges(chain)) return std::numeric_limits<double>::infinity();
    return chain.prefix_survival() * integrate_density(
                                         chain.last(), [](double g) { return 1.0 / g; }, 0.0,
                                         std::numeric_limits<double>::infinity());
}

/// E[1/g_end] from its Meijer G representation, for an alpha-kappa-mu last hop.
inline double cifr_inverse_moment_meijer(const HopChain& chain) {
    if (detail::inverse_moment_diverges(chain)) return std::numeric_limits<double>::infinity();
    const auto& law = std::get<AlphaKappaMu>(chain.last());
    const double alpha = law.alpha();
    const double mu = law.mu();
    const double w = law.omega();
    const double sigma = law.sigma();
    specfun::MeijerGSpec spec{1, 1, 2, 3, {1.0 + 2.0 / alpha - w, 0.5 * mu}, {w - 1.0, 1.0 - w, 0.5 * mu}};
    const double g = specfun::meijer_g(spec, mu * law.kappa());
    const double front = std::log(2.0 * std::numbers::pi) + std::log(law.K()) - std::log(alpha) -
                         (w - 2.0 / alpha) * std::log(sigma);
    return chain.prefix_survival() * std::exp(front) * g;
}

/// Capacity with channel inversion at a fixed rate. Reported as 0 with the
/// divergence flag set when the channel cannot be inverted.
inline CapacityResult capacity_cifr(const HopChain& chain, double bandwidth) {
    const double k = detail::bits_per_hop(chain, bandwidth);
    CapacityResult r;
    r.scheme = CapacityScheme::cifr;
    if (detail::inverse_moment_diverges(chain)) {
        r.divergent_inverse_moment = true;
        return r;
    }
    r.value = k * std::log1p(1.0 / cifr_inverse_moment(chain));
    return r;
}

/// The TIFR integral by the Nuttall Q-function, for an alpha-kappa-mu last
/// hop with alpha mu > 4.
inline double tifr_integral_nuttall(const HopChain& chain, double gamma_o) {
    if (!(gamma_o > 0.0)) throw DomainError("truncation point must be > 0");
    const auto* law = std::get_if<AlphaKappaMu>(&chain.last());
    if (law == nullptr) throw DomainError("the Nuttall form needs an alpha-kappa-mu last hop");
    const double alpha = law->alpha();
    const double mu = law->mu();
    if (!(alpha * mu > 4.0)) throw DomainError("the Nuttall form needs alpha mu > 4");
    const double sigma = law->sigma();
    const double nc = 2.0 * mu * law->kappa();
    const double q = specfun::nuttall_q(mu - 4.0 / alpha, mu - 1.0, std::sqrt(nc),
                                        std::sqrt(2.0 * sigma * std::pow(gamma_o, 0.5 * alpha)));
    return chain.prefix_survival() * std::exp((2.0 / alpha) * std::log(2.0 * sigma) - (law->omega() - 1.0) * std::log(nc)) * q;
}

/// Capacity with truncated channel inversion above gamma_o.
inline CapacityResult capacity_tifr(const HopChain& chain, double bandwidth, double gamma_o) {
    const double k = detail::bits_per_hop(chain, bandwidth);
    if (!(gamma_o > 0.0)) throw DomainError("TIFR cutoff must be > 0");
    CapacityResult r;
    r.scheme = CapacityScheme::tifr;
    r.cutoff = gamma_o;
    const double p = end_survival(chain, gamma_o);
    if (p == 0.0) return r;
    const double j = truncated_inverse_moment(chain, gamma_o);
    if (j == 0.0) return r;
    r.value = k * std::log1p(1.0 / j) * p;
    return r;
}

/// TIFR with the OPRA cutoff as truncation point.
inline CapacityResult capacity_tifr(const HopChain& chain, double bandwidth) {
    const double a = chain.prefix_survival();
    if (!(a * (1.0 - zero_mass(chain.last())) > 0.0)) {
        CapacityResult r;
        r.scheme = CapacityScheme::tifr;
        detail::bits_per_hop(chain, bandwidth);
        return r;
    }
    return capacity_tifr(chain, bandwidth, opra_cutoff(chain).value);
}

}  // namespace fadekit
