#include <gtest/gtest.h>

#include <boost/math/special_functions/expint.hpp>
#include <boost/math/tools/roots.hpp>
#include <cmath>
#include <limits>
#include <numbers>

#include "fadekit/metrics.hpp"
#include "oracles.hpp"

using namespace fadekit;
using oracle::rel_err;

namespace {

constexpr double inf = std::numeric_limits<double>::infinity();

FadingLaw rayleigh(double mean) { return AlphaKappaMu(2.0, 1e-9, 1.0, mean); }

Modulation mod(ModulationKind k, int order = 2) { return Modulation::make(k, order); }

double oracle_pdf(const FadingLaw& law, double g) {
    if (const auto* a = std::get_if<AlphaKappaMu>(&law))
        return oracle::akm_pdf(a->alpha(), a->kappa(), a->mu(), a->scale(), g);
    const auto& e = std::get<AlphaKappaMuExtreme>(law);
    return oracle::extreme_pdf(e.alpha(), e.m(), e.scale(), g);
}

}  // namespace

TEST(Modulation, Constants) {
    const Modulation bpsk = mod(ModulationKind::bpsk);
    EXPECT_TRUE(bpsk.coherent);
    EXPECT_EQ(bpsk.phi, 1.0);
    EXPECT_EQ(bpsk.rho, std::sqrt(2.0));
    EXPECT_EQ(mod(ModulationKind::bfsk_coherent).rho, 1.0);
    EXPECT_EQ(mod(ModulationKind::qpsk).phi, 2.0);
    EXPECT_EQ(mod(ModulationKind::qam4).rho, 1.0);
    const Modulation pam = mod(ModulationKind::mpam, 4);
    EXPECT_DOUBLE_EQ(pam.phi, 1.5);
    EXPECT_DOUBLE_EQ(pam.rho, std::sqrt(6.0 / 15.0));
    const Modulation fsk = mod(ModulationKind::mfsk, 8);
    EXPECT_FALSE(fsk.coherent);
    EXPECT_DOUBLE_EQ(fsk.phi, 3.5);
    EXPECT_EQ(fsk.rho, 0.5);
    EXPECT_EQ(mod(ModulationKind::bfsk_noncoherent).phi, 0.5);
    EXPECT_EQ(mod(ModulationKind::dbpsk).rho, 1.0);
    EXPECT_THROW(mod(ModulationKind::mpam, 1), DomainError);
}

TEST(AmountOfFading, Rayleigh) {
    EXPECT_NEAR(amount_of_fading(HopChain({rayleigh(3.0)}, 0.0)), 1.0, 1e-8);
    EXPECT_NEAR(amount_of_fading_closed_form(HopChain({rayleigh(3.0)}, 0.0)), 1.0, 1e-8);
}

TEST(AmountOfFading, ClosedFormMatchesMoments) {
    const HopChain chain({AlphaKappaMu(2.5, 1.0, 1.5, 2.0), AlphaKappaMu(2.5, 1.0, 1.5, 2.0)}, 0.7);
    EXPECT_LE(rel_err(amount_of_fading_closed_form(chain), amount_of_fading(chain, 2)), 1e-8);
    const HopChain ext({AlphaKappaMu(2.5, 1.0, 1.5, 2.0), AlphaKappaMuExtreme(1.7, 0.8, 2.0)}, 0.7);
    EXPECT_LE(rel_err(amount_of_fading_closed_form(ext), amount_of_fading(ext)), 1e-8);
    // Third order by definition.
    const double m1 = end_moment(chain, 1.0);
    EXPECT_LE(rel_err(amount_of_fading(chain, 3), end_moment(chain, 3.0) / (m1 * m1 * m1) - 1.0), 1e-14);
}

TEST(AmountOfFading, CertainOutageIsRejected) {
    const HopChain dead({AlphaKappaMu(2.0, 1.0, 1.0, 1.0), rayleigh(1.0)}, 1e5);
    EXPECT_THROW(amount_of_fading(dead), DomainError);
    EXPECT_THROW(amount_of_fading(HopChain({rayleigh(1.0)}, 0.0), 1), DomainError);
}

TEST(Outage, Limits) {
    const HopChain chain({AlphaKappaMu(2.2, 1.0, 0.8, 1.0)}, 0.0);
    EXPECT_EQ(outage_probability(chain, 0.0), 0.0);
    EXPECT_NEAR(outage_probability(chain, 1e8), 1.0, 1e-15);
    const HopChain ray({rayleigh(4.0)}, 0.0);
    for (double th : {0.01, 1.0, 10.0}) EXPECT_NEAR(outage_probability(ray, th), 1.0 - std::exp(-th / 4.0), 1e-8);
}

TEST(Outage, MonotoneInMeanSnr) {
    double prev = 1.0;
    for (double db = -10.0; db <= 30.0; db += 5.0) {
        const double g = std::pow(10.0, db / 10.0);
        const HopChain chain({AlphaKappaMu(1.8, 2.0, 1.2, g), AlphaKappaMuExtreme(2.3, 1.5, g)}, 1.0);
        const double op = outage_probability(chain, 1.0);
        EXPECT_LE(op, prev);
        EXPECT_GE(op, 0.0);
        prev = op;
    }
}

TEST(BerCoherent, RayleighBpsk) {
    const HopChain chain({rayleigh(1.0)}, 0.0);
    const double want = 0.5 * (1.0 - std::sqrt(0.5));
    EXPECT_NEAR(ber_coherent(chain, mod(ModulationKind::bpsk)), want, 1e-8);
    EXPECT_NEAR(want, 0.146447, 1e-6);
    for (double g : {0.1, 10.0, 100.0}) {
        const HopChain c({rayleigh(g)}, 0.0);
        EXPECT_LE(rel_err(ber(c, mod(ModulationKind::bpsk)), 0.5 * (1.0 - std::sqrt(g / (1.0 + g)))), 1e-7) << g;
    }
}

TEST(BerCoherent, VanishingSnrGivesHalfPhi) {
    const HopChain chain({AlphaKappaMu(2.0, 1.0, 2.0, 1e-12)}, 0.0);
    EXPECT_NEAR(ber(chain, mod(ModulationKind::qpsk)), 1.0, 1e-5);
    EXPECT_THROW(ber_coherent(chain, mod(ModulationKind::dbpsk)), DomainError);
}

TEST(BerCoherent, SubstitutedIntegralAgrees) {
    // Same average computed in the variable y = g^{alpha/2} with an independent quadrature.
    const double alpha = 2.5;
    const HopChain chain({AlphaKappaMu(1.5, 0.5, 1.0, 2.0), AlphaKappaMu(alpha, 1.0, 1.5, 5.0)}, 0.5);
    const auto& law = std::get<AlphaKappaMu>(chain.last());
    const Modulation m = mod(ModulationKind::mpam, 4);
    auto in_y = [&](double y) {
        const double g = std::pow(y, 2.0 / alpha);
        const double jac = (2.0 / alpha) * g / y;
        const double f = oracle::akm_pdf(alpha, 1.0, 1.5, law.scale(), g);
        return f == 0.0 ? 0.0 : std::erfc(m.rho * std::sqrt(0.5 * g)) * f * jac;
    };
    const double want =
        0.5 * m.phi * (end_point_mass(chain) + chain.prefix_survival() * oracle::integrate_positive(in_y, 3.0));
    EXPECT_LE(rel_err(ber(chain, m), want), 1e-9);
}

TEST(BerNoncoherent, RayleighDbpsk) {
    for (double g : {0.5, 1.0, 20.0}) {
        const HopChain chain({rayleigh(g)}, 0.0);
        EXPECT_LE(rel_err(ber(chain, mod(ModulationKind::dbpsk)), 0.5 / (1.0 + g)), 1e-8);
    }
    EXPECT_THROW(ber_noncoherent(HopChain({rayleigh(1.0)}, 0.0), mod(ModulationKind::bpsk)), DomainError);
}

TEST(BerNoncoherent, ExtremeFloor) {
    const HopChain chain({AlphaKappaMuExtreme(2.0, 1.5, 1e6)}, 0.0);
    const double want = 0.5 * std::exp(-3.0);
    EXPECT_NEAR(ber(chain, mod(ModulationKind::dbpsk)) / want, 1.0, 0.02);
}

TEST(BerNoncoherent, MatchesDirectAverage) {
    const HopChain chain({AlphaKappaMu(2.5, 1.0, 1.5, 3.0), AlphaKappaMuExtreme(1.8, 1.2, 4.0)}, 0.3);
    for (const Modulation& m : {mod(ModulationKind::dbpsk), mod(ModulationKind::mfsk, 4), mod(ModulationKind::bfsk_noncoherent)}) {
        auto k = [&](double g) {
            const double f = oracle_pdf(chain.last(), g);
            return f == 0.0 ? 0.0 : m.phi * std::exp(-m.rho * g) * f;
        };
        const double want = m.phi * end_point_mass(chain) + chain.prefix_survival() * oracle::integrate_positive(k, 1.0);
        EXPECT_LE(rel_err(ber(chain, m), want), 1e-9) << m.name();
    }
}

TEST(Ber, BoundedAndMonotone) {
    for (const Modulation& m : {mod(ModulationKind::bpsk), mod(ModulationKind::dbpsk), mod(ModulationKind::mpam, 8)}) {
        double prev = inf;
        for (double db = -10.0; db <= 40.0; db += 5.0) {
            const double g = std::pow(10.0, db / 10.0);
            const HopChain chain({AlphaKappaMu(2.0, 1.0, 2.0, g), AlphaKappaMu(3.0, 0.5, 0.7, g)}, 0.2);
            const double b = ber(chain, m);
            EXPECT_GE(b, 0.0);
            EXPECT_LE(b, 1.0);
            EXPECT_LE(b, prev) << m.name() << ' ' << db;
            prev = b;
        }
    }
}

TEST(BerAsymptotic, LeadingTermRayleigh) {
    const double g = 50.0;
    const HopChain chain({rayleigh(g)}, 0.0);
    const Modulation m = mod(ModulationKind::dbpsk);
    EXPECT_LE(rel_err(ber_asymptotic(chain, m, 1), m.phi / (m.rho * g)), 1e-8);
    EXPECT_NEAR(ber_asymptotic(chain, m, 1) / ber(chain, m), 1.0, 0.03);
}

TEST(BerAsymptotic, AccurateAtHighSnr) {
    // At high mean SNR the kernel only sees the small-g part of the density.
    for (double db : {20.0, 30.0}) {
        const double g = std::pow(10.0, db / 10.0);
        const HopChain akm({AlphaKappaMu(2.0, 1.0, 1.5, g), AlphaKappaMu(2.0, 1.0, 1.5, g)}, 0.0);
        const HopChain ext({AlphaKappaMuExtreme(2.0, 1.0, g)}, 0.0);
        for (const Modulation& m : {mod(ModulationKind::bpsk), mod(ModulationKind::dbpsk)}) {
            EXPECT_LE(rel_err(ber_asymptotic(akm, m, 10), ber(akm, m)), 1e-6) << db << m.name();
            EXPECT_LE(rel_err(ber_asymptotic(ext, m, 10), ber(ext, m)), 1e-6) << db << m.name();
        }
    }
}

TEST(BerAsymptotic, IncludesPointMass) {
    const HopChain chain({AlphaKappaMu(2.0, 1.0, 1.0, 1.0), AlphaKappaMuExtreme(2.0, 1.0, 1e5)}, 0.5);
    const Modulation m = mod(ModulationKind::dbpsk);
    EXPECT_LE(rel_err(ber_asymptotic(chain, m, 10), ber(chain, m)), 1e-5);
    EXPECT_GT(ber_asymptotic(chain, m, 10), m.phi * end_point_mass(chain));
}

TEST(CapacityOra, RayleighClosedForm) {
    const HopChain chain({rayleigh(1.0)}, 0.0);
    const double want = std::exp(1.0) * boost::math::expint(1, 1.0) / std::numbers::ln2;
    EXPECT_NEAR(capacity_ora(chain, 1.0).value, want, 1e-8);
    EXPECT_NEAR(want, 0.860347, 1e-6);
    EXPECT_NEAR(capacity_ora(chain, 3.0).value, 3.0 * want, 3e-8);
}

TEST(CapacityOra, RoutesAgreeAndDeadLinkIsZero) {
    const HopChain chain({AlphaKappaMu(2.5, 1.0, 1.5, 3.0), AlphaKappaMuExtreme(1.8, 1.2, 4.0)}, 0.3);
    EXPECT_LE(rel_err(capacity_ora(chain, 1.0).value, capacity_ora(chain, 1.0, CapacityRoute::density).value), 1e-7);
    const HopChain dead({AlphaKappaMu(2.0, 1.0, 1.0, 1.0), rayleigh(1.0)}, 1e5);
    EXPECT_EQ(capacity_ora(dead, 1.0).value, 0.0);
    EXPECT_THROW(capacity_ora(chain, 0.0), DomainError);
}

TEST(OpraCutoff, RayleighAgainstBisection) {
    const double g = 10.0;
    const HopChain chain({rayleigh(g)}, 0.0);
    const OpraCutoff c = opra_cutoff(chain);
    EXPECT_LE(c.residual, 1e-8);
    // exp(-x / g) / x - E1(x / g) / g = 1 has a single root in (0, 1).
    auto h = [g](double x) { return std::exp(-x / g) / x - boost::math::expint(1, x / g) / g - 1.0; };
    boost::math::tools::eps_tolerance<double> tol(50);
    const auto root = boost::math::tools::bisect(h, 1e-6, 1.0, tol);
    EXPECT_NEAR(c.value, 0.5 * (root.first + root.second), 1e-8);
}

TEST(OpraCutoff, InUnitIntervalAndMonotone) {
    double prev = 0.0;
    for (double db = -10.0; db <= 40.0; db += 5.0) {
        const double g = std::pow(10.0, db / 10.0);
        for (const HopChain& chain : {HopChain({AlphaKappaMu(2.0, 1.0, 2.0, g), AlphaKappaMu(1.5, 3.0, 0.8, g)}, 0.0),
                                      HopChain({AlphaKappaMuExtreme(2.5, 2.0, g)}, 0.0)}) {
            const OpraCutoff c = opra_cutoff(chain);
            EXPECT_GT(c.value, 0.0);
            EXPECT_LE(c.value, 1.0);
            EXPECT_LE(c.residual, 1e-8);
            EXPECT_LE(c.constraint_residual, 1e-6);
        }
        const OpraCutoff c = opra_cutoff(HopChain({AlphaKappaMu(2.0, 1.0, 2.0, g)}, 0.0));
        EXPECT_GE(c.value, prev - 1e-9) << db;
        prev = c.value;
    }
}

TEST(OpraCutoff, DeadLinkHasNoCutoff) {
    const HopChain dead({AlphaKappaMu(2.0, 1.0, 1.0, 1.0), rayleigh(1.0)}, 1e5);
    EXPECT_THROW(opra_cutoff(dead), DomainError);
    const CapacityResult r = capacity_opra(dead, 1.0);
    EXPECT_EQ(r.value, 0.0);
    EXPECT_FALSE(r.cutoff.has_value());
}

TEST(CapacityOpra, RoutesAgreeAndDominateOra) {
    const HopChain chain({AlphaKappaMu(2.5, 1.0, 1.5, 3.0), AlphaKappaMuExtreme(1.8, 1.2, 4.0)}, 0.3);
    const CapacityResult p = capacity_opra(chain, 1.0);
    ASSERT_TRUE(p.cutoff.has_value());
    EXPECT_LE(rel_err(p.value, capacity_opra(chain, 1.0, CapacityRoute::density).value), 1e-7);
    for (double db = -5.0; db <= 30.0; db += 5.0) {
        const double g = std::pow(10.0, db / 10.0);
        const HopChain c({AlphaKappaMu(2.0, 1.0, 2.0, g), AlphaKappaMuExtreme(2.2, 1.4, g)}, 0.1);
        EXPECT_GE(capacity_opra(c, 1.0).value, capacity_ora(c, 1.0).value) << db;
    }
}

TEST(CapacityCifr, RoutesAgree) {
    const HopChain chain({AlphaKappaMu(2.0, 1.0, 2.0, 1.0)}, 0.0);
    EXPECT_LE(rel_err(cifr_inverse_moment(chain), cifr_inverse_moment_meijer(chain)), 1e-6);
    for (double alpha : {1.5, 3.0})
        for (double kappa : {0.3, 3.0}) {
            const HopChain c({AlphaKappaMu(alpha, kappa, 2.5, 2.0)}, 0.0);
            const double want = oracle::integrate_positive(
                [&](double g) { return oracle_pdf(c.last(), g) / g; }, 2.0);
            EXPECT_LE(rel_err(cifr_inverse_moment(c), want), 1e-9);
            EXPECT_LE(rel_err(cifr_inverse_moment_meijer(c), want), 1e-9);
        }
    const CapacityResult r = capacity_cifr(chain, 1.0);
    EXPECT_FALSE(r.divergent_inverse_moment);
    EXPECT_NEAR(r.value, std::log2(1.0 + 1.0 / cifr_inverse_moment(chain)), 1e-14);
}

TEST(CapacityCifr, NonInvertibleChannelsAreFlagged) {
    for (const HopChain& chain : {HopChain({rayleigh(10.0)}, 0.0), HopChain({AlphaKappaMuExtreme(3.0, 2.0, 10.0)}, 0.0),
                                  HopChain({AlphaKappaMu(2.0, 1.0, 2.0, 1.0), AlphaKappaMu(2.0, 1.0, 2.0, 1.0)}, 0.1)}) {
        const CapacityResult r = capacity_cifr(chain, 1.0);
        EXPECT_EQ(r.value, 0.0);
        EXPECT_TRUE(r.divergent_inverse_moment);
        EXPECT_EQ(cifr_inverse_moment(chain), inf);
    }
}

TEST(CapacityTifr, ApproachesCifr) {
    const HopChain chain({AlphaKappaMu(2.0, 1.0, 2.0, 3.0)}, 0.0);
    const double c = capacity_cifr(chain, 1.0).value;
    EXPECT_LE(rel_err(capacity_tifr(chain, 1.0, 1e-6).value, c), 1e-3);
    EXPECT_GE(capacity_tifr(chain, 1.0).value, c);
}

TEST(CapacityTifr, NuttallRouteAgrees) {
    for (double go : {0.05, 0.5, 2.0}) {
        const HopChain chain({AlphaKappaMu(4.0, 1.0, 1.5, 2.0)}, 0.0);
        EXPECT_LE(rel_err(tifr_integral_nuttall(chain, go), truncated_inverse_moment(chain, go)), 1e-6) << go;
    }
    const HopChain low({AlphaKappaMu(2.0, 1.0, 1.5, 2.0)}, 0.0);
    EXPECT_THROW(tifr_integral_nuttall(low, 0.5), DomainError);
}

TEST(CapacityTifr, VanishesForLargeCutoff) {
    const HopChain chain({AlphaKappaMu(2.0, 1.0, 2.0, 1.0)}, 0.0);
    EXPECT_EQ(capacity_tifr(chain, 1.0, 1e6).value, 0.0);
    EXPECT_LT(capacity_tifr(chain, 1.0, 30.0).value, 1e-9);
    EXPECT_THROW(capacity_tifr(chain, 1.0, 0.0), DomainError);
}

TEST(Capacity, OrderingOverSweep) {
    for (int family = 0; family < 2; ++family) {
        for (int i = 0; i < 20; ++i) {
            const double g = std::pow(10.0, 1.5 * i / 10.0);
            std::vector<FadingLaw> hops;
            if (family == 0)
                hops = {AlphaKappaMu(2.5, 1.5, 1.2, g), AlphaKappaMu(1.8, 2.0, 2.0, g), AlphaKappaMu(2.2, 1.0, 1.5, g)};
            else
                hops = {AlphaKappaMuExtreme(2.5, 2.5, g), AlphaKappaMuExtreme(1.8, 3.0, g), AlphaKappaMuExtreme(2.2, 2.8, g)};
            const HopChain chain(hops, 0.0);
            const double p = capacity_opra(chain, 1.0).value;
            const double o = capacity_ora(chain, 1.0).value;
            const double t = capacity_tifr(chain, 1.0).value;
            const double c = capacity_cifr(chain, 1.0).value;
            EXPECT_GE(p, o) << family << ' ' << i;
            EXPECT_GE(o, t) << family << ' ' << i;
            EXPECT_GE(t, c) << family << ' ' << i;
        }
    }
}
