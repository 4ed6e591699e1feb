#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "fadekit/mc.hpp"
#include "fadekit/metrics.hpp"

using namespace fadekit;

namespace {

constexpr std::uint64_t kMillion = 1000000;

struct Moments {
    double mean;
    double var;
};

Moments moments(const std::vector<double>& x) {
    double s = 0.0;
    for (double v : x) s += v;
    const double m = s / x.size();
    double q = 0.0;
    for (double v : x) q += (v - m) * (v - m);
    return {m, q / (x.size() - 1)};
}

// |estimate - want| in units of the standard error.
double z_score(double est, double se, double want) { return std::abs(est - want) / se; }

std::vector<double> draws(const FadingLaw& law, std::uint64_t n, std::uint64_t seed) {
    mc::Rng rng(seed);
    std::vector<double> out(n);
    for (auto& v : out) v = mc::sample(law, rng);
    return out;
}

// Empirical CDF at 20 model quantiles, each within 4 binomial standard errors.
void expect_cdf_matches(const FadingLaw& law, std::vector<double> x) {
    std::sort(x.begin(), x.end());
    const double n = static_cast<double>(x.size());
    for (int i = 1; i <= 20; ++i) {
        const double g = mean_snr(law) * 0.1 * i;
        const double p = cdf(law, g);
        const double emp = static_cast<double>(std::upper_bound(x.begin(), x.end(), g) - x.begin()) / n;
        const double se = std::sqrt(p * (1.0 - p) / n);
        EXPECT_LE(std::abs(emp - p), 4.0 * se + 1e-12) << g;
    }
}

}  // namespace

TEST(Rng, DeterministicAndOpenUnitInterval) {
    mc::Rng a(42);
    mc::Rng b(42);
    for (int i = 0; i < 1000; ++i) EXPECT_EQ(a(), b());
    mc::Rng c(7);
    for (int i = 0; i < 100000; ++i) {
        const double u = c.uniform();
        ASSERT_GT(u, 0.0);
        ASSERT_LT(u, 1.0);
    }
    EXPECT_NE(mc::derive_seed(1, 0), mc::derive_seed(1, 1));
    EXPECT_NE(mc::derive_seed(1, 0), mc::derive_seed(2, 0));
}

TEST(Rng, UniformMoments) {
    mc::Rng r(3);
    std::vector<double> u(kMillion);
    for (auto& v : u) v = r.uniform();
    const Moments m = moments(u);
    EXPECT_LE(z_score(m.mean, std::sqrt(1.0 / 12.0 / u.size()), 0.5), 4.0);
    EXPECT_NEAR(m.var, 1.0 / 12.0, 1e-3);
}

TEST(Samplers, Gamma) {
    for (double shape : {0.3, 1.0, 5.5, 40.0}) {
        mc::Rng r(11);
        std::vector<double> x(400000);
        for (auto& v : x) v = mc::sample_gamma(r, shape);
        const Moments m = moments(x);
        EXPECT_LE(z_score(m.mean, std::sqrt(shape / x.size()), shape), 4.0) << shape;
        EXPECT_NEAR(m.var / shape, 1.0, 0.03) << shape;
    }
    mc::Rng r(1);
    EXPECT_THROW(mc::sample_gamma(r, 0.0), DomainError);
}

TEST(Samplers, Poisson) {
    for (double mean : {0.4, 3.0, 9.9, 10.0, 25.0, 400.0}) {
        mc::Rng r(5);
        std::vector<double> x(400000);
        for (auto& v : x) v = static_cast<double>(mc::sample_poisson(r, mean));
        const Moments m = moments(x);
        EXPECT_LE(z_score(m.mean, std::sqrt(mean / x.size()), mean), 4.0) << mean;
        EXPECT_NEAR(m.var / mean, 1.0, 0.03) << mean;
        const double p0 = std::count(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
        const double e0 = std::exp(-mean);
        EXPECT_LE(std::abs(p0 - e0), 4.0 * std::sqrt(e0 * (1.0 - e0) / x.size()) + 1e-12) << mean;
    }
    mc::Rng r(1);
    EXPECT_EQ(mc::sample_poisson(r, 0.0), 0u);
    EXPECT_THROW(mc::sample_poisson(r, -1.0), DomainError);
}

TEST(Samplers, AlphaKappaMuMean) {
    const FadingLaw law = AlphaKappaMu(2.5, 1.5, 0.8, 3.0);
    const auto x = draws(law, kMillion, 21);
    const Moments m = moments(x);
    EXPECT_LE(z_score(m.mean, std::sqrt(m.var / x.size()), 3.0), 4.0);
    // Variance from the closed-form second moment.
    EXPECT_NEAR(m.var / (moment(law, 2.0) - 9.0), 1.0, 0.02);
}

TEST(Samplers, RayleighKolmogorovSmirnov) {
    const FadingLaw law = AlphaKappaMu(2.0, 1e-9, 1.0, 2.0);
    auto x = draws(law, kMillion, 99);
    std::sort(x.begin(), x.end());
    double d = 0.0;
    const double n = static_cast<double>(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double f = 1.0 - std::exp(-x[i] / 2.0);
        d = std::max({d, std::abs(f - i / n), std::abs((i + 1) / n - f)});
    }
    EXPECT_LT(d, 1.63 / std::sqrt(n));
}

TEST(Samplers, AlphaKappaMuCdf) {
    const FadingLaw law = AlphaKappaMu(1.4, 3.0, 2.2, 1.0);
    expect_cdf_matches(law, draws(law, 400000, 8));
}

TEST(Samplers, ExtremeAtomCdfAndMean) {
    const double m = 0.7;
    const FadingLaw law = AlphaKappaMuExtreme(2.6, m, 2.0);
    const auto x = draws(law, kMillion, 13);
    const double p0 = std::count(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
    const double e0 = std::exp(-2.0 * m);
    EXPECT_LE(std::abs(p0 - e0), 4.0 * std::sqrt(e0 * (1.0 - e0) / x.size()));
    const Moments mo = moments(x);
    EXPECT_LE(z_score(mo.mean, std::sqrt(mo.var / x.size()), 2.0), 4.0);
    expect_cdf_matches(law, x);
}

TEST(SimulateChain, SingleHopIsTheHopSampler) {
    const FadingLaw law = AlphaKappaMu(2.0, 1.0, 1.0, 1.0);
    const HopChain chain({law}, 0.5);
    const mc::McConfig cfg{1000, 77, 1};
    const auto a = mc::simulate_chain(chain, cfg);
    const auto b = draws(law, 1000, mc::derive_seed(77, 0));
    EXPECT_EQ(a, b);
}

TEST(SimulateChain, AtomAndMean) {
    const HopChain chain({AlphaKappaMu(2.0, 1.0, 1.0, 2.0), AlphaKappaMuExtreme(1.5, 1.0, 3.0),
                          AlphaKappaMuExtreme(2.0, 0.8, 4.0)},
                         0.6);
    const auto x = mc::simulate_chain(chain, {kMillion, 5, 4});
    ASSERT_EQ(x.size(), kMillion);
    const double p0 = std::count(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
    const double e0 = end_point_mass(chain);
    EXPECT_LE(std::abs(p0 - e0), 4.0 * std::sqrt(e0 * (1.0 - e0) / x.size()));
    const Moments m = moments(x);
    EXPECT_LE(z_score(m.mean, std::sqrt(m.var / x.size()), chain.prefix_survival() * 4.0), 4.0);
}

TEST(SimulateChain, ReproducibleAndStreamSplit) {
    const HopChain chain({AlphaKappaMu(2.0, 1.0, 1.0, 2.0), AlphaKappaMu(3.0, 0.5, 2.0, 2.0)}, 0.2);
    const auto a = mc::simulate_chain(chain, {10001, 9, 3});
    const auto b = mc::simulate_chain(chain, {10001, 9, 3});
    EXPECT_EQ(a, b);
    // Stream 0 takes the extra trial; stream 1 starts right after it.
    mc::Rng r1(mc::derive_seed(9, 1));
    EXPECT_EQ(a[3334], mc::sample_chain(chain, r1));
    EXPECT_THROW(mc::simulate_chain(chain, {1, 1, 1}), DomainError);
    EXPECT_THROW(mc::simulate_chain(chain, {10, 1, 0}), DomainError);
}

TEST(Estimators, AgreeWithAnalyticValues) {
    const HopChain chain({AlphaKappaMu(2.0, 1.0, 2.0, 10.0), AlphaKappaMuExtreme(2.5, 1.3, 10.0)}, 1.0);
    const Modulation bpsk = Modulation::make(ModulationKind::bpsk);
    const Modulation dbpsk = Modulation::make(ModulationKind::dbpsk);
    std::vector<mc::MetricSpec> specs(5);
    specs[0].kind = mc::MetricKind::outage;
    specs[0].threshold = 2.0;
    specs[1].kind = mc::MetricKind::ber;
    specs[1].modulation = bpsk;
    specs[2].kind = mc::MetricKind::ber;
    specs[2].modulation = dbpsk;
    specs[3].kind = mc::MetricKind::capacity_ora;
    specs[4].kind = mc::MetricKind::amount_of_fading;
    const auto est = mc::estimate_metrics(chain, {kMillion, 31, 4}, specs);
    const double want[] = {outage_probability(chain, 2.0), ber(chain, bpsk), ber(chain, dbpsk),
                           capacity_ora(chain, 1.0).value, amount_of_fading(chain)};
    for (std::size_t i = 0; i < specs.size(); ++i) {
        EXPECT_GT(est[i].std_error, 0.0);
        EXPECT_EQ(est[i].trials, kMillion);
        EXPECT_LE(z_score(est[i].mean, est[i].std_error, want[i]), 4.0) << i;
    }
}

TEST(Estimators, CoherentBerTwoHops) {
    const double g = 10.0;
    const HopChain chain({AlphaKappaMu(2.0, 1.0, 2.0, g), AlphaKappaMu(2.0, 1.0, 2.0, g)}, 0.5);
    mc::MetricSpec spec;
    spec.kind = mc::MetricKind::ber;
    spec.modulation = Modulation::make(ModulationKind::bpsk);
    const mc::Estimate e = mc::estimate_metric(chain, {kMillion, 4, 2}, spec);
    EXPECT_LE(z_score(e.mean, e.std_error, ber(chain, spec.modulation)), 4.0);
}
