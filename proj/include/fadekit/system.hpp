#pragma once

#include <cmath>
#include <limits>
#include <utility>
#include <vector>

#include "fadekit/channel.hpp"
#include "fadekit/error.hpp"

namespace fadekit {

/// A decode-and-forward chain of n >= 1 hops. The link is in outage as soon
/// as any of the first n - 1 hops has SNR <= gamma_th; otherwise the end SNR
/// is that of the last hop.
class HopChain {
public:
    HopChain(std::vector<FadingLaw> hops, double gamma_th) : hops_(std::move(hops)), gamma_th_(gamma_th) {
        if (hops_.empty()) throw DomainError("a hop chain needs at least one hop");
        if (!(gamma_th >= 0.0)) throw DomainError("gamma_th must be >= 0 (linear)");
        // Both complements are accumulated from their own side so that a
        // tiny outage probability (or a tiny survival) keeps full precision.
        double survive = 1.0;
        double log_survive = 0.0;
        for (std::size_t k = 0; k + 1 < hops_.size(); ++k) {
            survive *= survival(hops_[k], gamma_th_);
            log_survive += std::log1p(-cdf(hops_[k], gamma_th_));
        }
        prefix_survival_ = survive;
        prefix_outage_ = -std::expm1(log_survive);
    }

    const std::vector<FadingLaw>& hops() const { return hops_; }
    std::size_t size() const { return hops_.size(); }
    const FadingLaw& last() const { return hops_.back(); }
    double gamma_th() const { return gamma_th_; }

    /// Probability that no hop before the last is in outage.
    double prefix_survival() const { return prefix_survival_; }
    /// Probability that some hop before the last is in outage.
    double prefix_outage() const { return prefix_outage_; }

private:
    std::vector<FadingLaw> hops_;
    double gamma_th_;
    double prefix_survival_ = 1.0;
    double prefix_outage_ = 0.0;
};

inline double prefix_outage(const HopChain& chain) { return chain.prefix_outage(); }

/// Continuous part of the end-to-end SNR density.
inline double end_pdf(const HopChain& chain, double g) { return chain.prefix_survival() * pdf(chain.last(), g); }

/// Probability that the end-to-end SNR is exactly zero.
inline double end_point_mass(const HopChain& chain) {
    return chain.prefix_outage() + chain.prefix_survival() * zero_mass(chain.last());
}

inline double end_survival(const HopChain& chain, double g) {
    return chain.prefix_survival() * survival(chain.last(), g);
}

inline double end_cdf(const HopChain& chain, double g) {
    return chain.prefix_outage() + chain.prefix_survival() * cdf(chain.last(), g);
}

inline double end_moment(const HopChain& chain, double r) {
    return chain.prefix_survival() * moment(chain.last(), r);
}

/// E[exp(-s g)] for the end-to-end SNR, s >= 0.
inline double end_mgf(const HopChain& chain, double s) {
    if (!(s >= 0.0)) throw DomainError("MGF argument must be >= 0");
    if (s == 0.0) return 1.0;
    if (s == std::numeric_limits<double>::infinity()) return end_point_mass(chain);
    const double pivot[] = {1.0 / s};
    const double body = integrate_density(
        chain.last(), [s](double g) { return std::exp(-s * g); }, 0.0,
        std::numeric_limits<double>::infinity(), pivot);
    return end_point_mass(chain) + chain.prefix_survival() * body;
}

}  // namespace fadekit
