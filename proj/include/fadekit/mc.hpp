#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <span>
#include <vector>

#include "fadekit/channel.hpp"
#include "fadekit/error.hpp"
#include "fadekit/metrics.hpp"
#include "fadekit/numerics.hpp"
#include "fadekit/specfun.hpp"
#include "fadekit/system.hpp"

namespace fadekit::mc {

/// One step of the SplitMix64 sequence.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Seed of an independent substream, derived from a base seed and a tag.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t tag) {
    std::uint64_t t = tag;
    const std::uint64_t h = splitmix64(t);
    std::uint64_t s = seed ^ h;
    return splitmix64(s);
}

/// xoshiro256** (period 2^256 - 1), state filled from SplitMix64.
class Rng {
public:
    using result_type = std::uint64_t;

    explicit Rng(std::uint64_t seed) {
        std::uint64_t sm = seed;
        for (auto& w : s_) w = splitmix64(sm);
    }

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

    result_type operator()() {
        const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
        const std::uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    /// Uniform draw in the open interval (0, 1).
    double uniform() { return (static_cast<double>((*this)() >> 11) + 0.5) * 0x1.0p-53; }

private:
    static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
    std::uint64_t s_[4];
};

/// Standard normal variate (Marsaglia polar method).
inline double sample_normal(Rng& rng) {
    for (;;) {
        const double u = 2.0 * rng.uniform() - 1.0;
        const double v = 2.0 * rng.uniform() - 1.0;
        const double s = u * u + v * v;
        if (s < 1.0 && s > 0.0) return u * std::sqrt(-2.0 * std::log(s) / s);
    }
}

/// Natural log of a Gamma(shape, 1) variate (Marsaglia-Tsang, with the
/// u^{1/shape} boost below shape 1 applied in log space).
inline double sample_log_gamma(Rng& rng, double shape) {
    if (!(shape > 0.0)) throw DomainError("gamma shape must be > 0");
    if (shape < 1.0) return sample_log_gamma(rng, shape + 1.0) + std::log(rng.uniform()) / shape;
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
        double x;
        double v;
        do {
            x = sample_normal(rng);
            v = 1.0 + c * x;
        } while (v <= 0.0);
        v = v * v * v;
        const double u = rng.uniform();
        const double x2 = x * x;
        if (u < 1.0 - 0.0331 * x2 * x2) return std::log(d * v);
        if (std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v))) return std::log(d * v);
    }
}

inline double sample_gamma(Rng& rng, double shape) { return std::exp(sample_log_gamma(rng, shape)); }

/// Poisson variate: multiplication method for small means, Hormann's PTRS
/// transformed rejection otherwise.
inline std::uint64_t sample_poisson(Rng& rng, double mean) {
    if (!(mean >= 0.0) || !std::isfinite(mean)) throw DomainError("Poisson mean must be finite and >= 0");
    if (mean == 0.0) return 0;
    if (mean < 10.0) {
        const double limit = std::exp(-mean);
        std::uint64_t k = 0;
        double p = rng.uniform();
        while (p > limit) {
            ++k;
            p *= rng.uniform();
        }
        return k;
    }
    const double smu = std::sqrt(mean);
    const double b = 0.931 + 2.53 * smu;
    const double a = -0.059 + 0.02483 * b;
    const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
    const double vr = 0.9277 - 3.6224 / (b - 2.0);
    const double log_mean = std::log(mean);
    for (;;) {
        const double u = rng.uniform() - 0.5;
        const double v = rng.uniform();
        const double us = 0.5 - std::abs(u);
        const double k = std::floor((2.0 * a / us + b) * u + mean + 0.43);
        if (us >= 0.07 && v <= vr) return static_cast<std::uint64_t>(k);
        if (k < 0.0 || (us < 0.013 && v > us)) continue;
        if (std::log(v) + std::log(inv_alpha) - std::log(a / (us * us) + b) <=
            -mean + k * log_mean - specfun::log_gamma(k + 1.0))
            return static_cast<std::uint64_t>(k);
    }
}

/// Draw of an alpha-kappa-mu SNR: X = 2 sigma g^{alpha/2} is noncentral
/// chi-square with 2 mu degrees of freedom, sampled as a Poisson mixture of
/// central ones.
inline double sample_akm(const AlphaKappaMu& law, Rng& rng) {
    const std::uint64_t j = sample_poisson(rng, law.mu() * law.kappa());
    const double log_x = std::log(2.0) + sample_log_gamma(rng, law.mu() + static_cast<double>(j));
    return std::exp((2.0 / law.alpha()) * (log_x - std::log(2.0 * law.sigma())));
}

/// Draw of an alpha-kappa-mu-Extreme SNR (zero-degree-of-freedom mixture;
/// J = 0 is the atom at zero).
inline double sample_extreme(const AlphaKappaMuExtreme& law, Rng& rng) {
    const std::uint64_t j = sample_poisson(rng, 2.0 * law.m());
    if (j == 0) return 0.0;
    const double log_x = std::log(2.0) + sample_log_gamma(rng, static_cast<double>(j));
    return law.scale() * std::exp((2.0 / law.alpha()) * (log_x - std::log(4.0 * law.m())));
}

inline double sample(const FadingLaw& law, Rng& rng) {
    if (const auto* a = std::get_if<AlphaKappaMu>(&law)) return sample_akm(*a, rng);
    return sample_extreme(std::get<AlphaKappaMuExtreme>(law), rng);
}

/// One end-to-end trial: 0 if an earlier hop is at or below gamma_th,
/// otherwise a draw of the last hop.
inline double sample_chain(const HopChain& chain, Rng& rng) {
    const auto& hops = chain.hops();
    for (std::size_t k = 0; k + 1 < hops.size(); ++k)
        if (sample(hops[k], rng) <= chain.gamma_th()) return 0.0;
    return sample(hops.back(), rng);
}

struct McConfig {
    std::uint64_t trials = 1000000;
    std::uint64_t seed = 1;
    std::uint64_t streams = 1;
};

struct Estimate {
    double mean = 0.0;
    double std_error = 0.0;
    std::uint64_t trials = 0;
};

inline void check(const McConfig& cfg) {
    if (cfg.trials < 2) throw DomainError("Monte Carlo needs at least 2 trials");
    if (cfg.streams < 1) throw DomainError("Monte Carlo needs at least one stream");
}

/// End-to-end SNR draws. Stream s gets trials / streams draws (the first
/// trials % streams streams one more) from its own generator; the result is
/// the concatenation in stream order.
inline std::vector<double> simulate_chain(const HopChain& chain, const McConfig& cfg) {
    check(cfg);
    std::vector<double> out;
    out.reserve(cfg.trials);
    const std::uint64_t base = cfg.trials / cfg.streams;
    const std::uint64_t extra = cfg.trials % cfg.streams;
    for (std::uint64_t s = 0; s < cfg.streams; ++s) {
        Rng rng(derive_seed(cfg.seed, s));
        const std::uint64_t n = base + (s < extra ? 1 : 0);
        for (std::uint64_t i = 0; i < n; ++i) out.push_back(sample_chain(chain, rng));
    }
    return out;
}

enum class MetricKind { outage, ber, capacity_ora, amount_of_fading };

/// What to estimate from the draws.
struct MetricSpec {
    MetricKind kind = MetricKind::outage;
    double threshold = 0.0;
    Modulation modulation = Modulation::make(ModulationKind::bpsk);
    double bandwidth = 1.0;
    int af_order = 2;
    std::size_t hops = 1;
};

namespace detail {

template <class K>
Estimate mean_estimate(std::span<const double> draws, K kernel) {
    const double n = static_cast<double>(draws.size());
    numerics::CompensatedSum sum;
    for (double g : draws) sum += kernel(g);
    const double mean = sum.value() / n;
    numerics::CompensatedSum sq;
    for (double g : draws) {
        const double d = kernel(g) - mean;
        sq += d * d;
    }
    const double var = sq.value() / (n - 1.0);
    return {mean, std::sqrt(var / n), draws.size()};
}

// Delta-method estimate of E[g^k] / E[g]^k - 1.
inline Estimate af_estimate(std::span<const double> draws, int k) {
    const double n = static_cast<double>(draws.size());
    numerics::CompensatedSum s1;
    numerics::CompensatedSum sk;
    for (double g : draws) {
        s1 += g;
        sk += std::pow(g, k);
    }
    const double m1 = s1.value() / n;
    const double mk = sk.value() / n;
    if (!(m1 > 0.0)) return {std::numeric_limits<double>::quiet_NaN(), std::numeric_limits<double>::infinity(), draws.size()};
    numerics::CompensatedSum c11;
    numerics::CompensatedSum c1k;
    numerics::CompensatedSum ckk;
    for (double g : draws) {
        const double d1 = g - m1;
        const double dk = std::pow(g, k) - mk;
        c11 += d1 * d1;
        c1k += d1 * dk;
        ckk += dk * dk;
    }
    const double v11 = c11.value() / (n - 1.0);
    const double v1k = c1k.value() / (n - 1.0);
    const double vkk = ckk.value() / (n - 1.0);
    const double ratio = mk / std::pow(m1, k);
    const double d_m1 = -k * ratio / m1;
    const double d_mk = 1.0 / std::pow(m1, k);
    const double var = d_m1 * d_m1 * v11 + 2.0 * d_m1 * d_mk * v1k + d_mk * d_mk * vkk;
    return {ratio - 1.0, std::sqrt(std::max(var, 0.0) / n), draws.size()};
}

}  // namespace detail

/// Sample mean of the metric's per-trial kernel over the given draws.
inline Estimate estimate_from_draws(std::span<const double> draws, const MetricSpec& spec) {
    if (draws.size() < 2) throw DomainError("Monte Carlo needs at least 2 draws");
    switch (spec.kind) {
        case MetricKind::outage: {
            const double th = spec.threshold;
            return detail::mean_estimate(draws, [th](double g) { return g <= th ? 1.0 : 0.0; });
        }
        case MetricKind::ber: {
            const Modulation m = spec.modulation;
            if (m.coherent)
                return detail::mean_estimate(draws, [m](double g) { return 0.5 * m.phi * std::erfc(m.rho * std::sqrt(0.5 * g)); });
            return detail::mean_estimate(draws, [m](double g) { return m.phi * std::exp(-m.rho * g); });
        }
        case MetricKind::capacity_ora: {
            const double k = spec.bandwidth / static_cast<double>(spec.hops);
            return detail::mean_estimate(draws, [k](double g) { return k * std::log2(1.0 + g); });
        }
        case MetricKind::amount_of_fading:
            if (spec.af_order < 2) throw DomainError("amount of fading needs order >= 2");
            return detail::af_estimate(draws, spec.af_order);
    }
    throw DomainError("unknown metric kind");
}

inline Estimate estimate_metric(const HopChain& chain, const McConfig& cfg, MetricSpec spec) {
    spec.hops = chain.size();
    const std::vector<double> draws = simulate_chain(chain, cfg);
    return estimate_from_draws(draws, spec);
}

/// Several metrics from one set of draws.
inline std::vector<Estimate> estimate_metrics(const HopChain& chain, const McConfig& cfg,
                                              std::span<const MetricSpec> specs) {
    const std::vector<double> draws = simulate_chain(chain, cfg);
    std::vector<Estimate> out;
    for (MetricSpec s : specs) {
        s.hops = chain.size();
        out.push_back(estimate_from_draws(draws, s));
    }
    return out;
}

}  // namespace fadekit::mc
