#pragma once

#include <array>
#include <charconv>
#include <cmath>
#include <functional>
#include <numbers>
#include <string>
#include <string_view>
#include <vector>

#include "fadekit/channel.hpp"
#include "fadekit/mc.hpp"
#include "fadekit/metrics.hpp"
#include "fadekit/scenario.hpp"
#include "fadekit/specfun.hpp"
#include "fadekit/system.hpp"

/// Acceptance suites run by `fadekit validate` and the acceptance test
/// binary. Each suite returns one line per check so failures can be traced
/// to a parameter point.
namespace fadekit::validation {

struct Check {
    std::string name;
    bool passed = false;
    std::string detail;
};

struct Suite {
    int criterion;
    std::string_view name;
    std::string_view title;
    std::function<std::vector<Check>()> run;
};

namespace detail {

inline std::string sci(double v) {
    std::array<char, 32> buf{};
    const auto r = std::to_chars(buf.data(), buf.data() + buf.size(), v, std::chars_format::general, 4);
    return std::string(buf.data(), r.ptr);
}

inline double rel_err(double got, double want) {
    if (got == want) return 0.0;
    return std::abs(got - want) / std::abs(want);
}

inline Check within(std::string name, double err, double tol, std::string extra = {}) {
    Check c{std::move(name), err <= tol, "err " + sci(err) + " (tol " + sci(tol) + ")"};
    if (!extra.empty()) c.detail += ", " + extra;
    return c;
}

/// Runs `f`, turning a library exception into a failed check.
template <class F>
void guarded(std::vector<Check>& out, const std::string& name, F&& f) {
    try {
        f();
    } catch (const std::exception& e) {
        out.push_back({name, false, std::string("threw: ") + e.what()});
    }
}

inline double db(double x) { return std::pow(10.0, x / 10.0); }

inline std::string law_name(const FadingLaw& law) {
    if (const auto* a = std::get_if<AlphaKappaMu>(&law))
        return "akm(" + sci(a->alpha()) + "," + sci(a->kappa()) + "," + sci(a->mu()) + ")";
    const auto& e = std::get<AlphaKappaMuExtreme>(law);
    return "extreme(" + sci(e.alpha()) + ",m=" + sci(e.m()) + ")";
}

inline std::vector<FadingLaw> reference_grid(double mean) {
    std::vector<FadingLaw> laws;
    for (double alpha : {1.0, 2.0, 3.5})
        for (double kappa : {0.5, 2.0, 5.0})
            for (double mu : {0.5, 1.0, 2.7}) laws.push_back(AlphaKappaMu(alpha, kappa, mu, mean));
    for (double alpha : {1.0, 2.0, 3.5})
        for (double m : {0.5, 1.5, 3.0}) laws.push_back(AlphaKappaMuExtreme(alpha, m, mean));
    return laws;
}

/// Three-hop chains with moderate fading on every hop, one per model family.
inline HopChain ordering_chain(int family, double mean) {
    if (family == 0)
        return HopChain({AlphaKappaMu(2.5, 1.5, 1.2, mean), AlphaKappaMu(1.8, 2.0, 2.0, mean),
                         AlphaKappaMu(2.2, 1.0, 1.5, mean)},
                        0.0);
    return HopChain({AlphaKappaMuExtreme(2.5, 2.5, mean), AlphaKappaMuExtreme(1.8, 3.0, mean),
                     AlphaKappaMuExtreme(2.2, 2.8, mean)},
                    0.0);
}

inline double sweep_db(int i) { return 30.0 * i / 19.0; }

}  // namespace detail

inline std::vector<Check> normalization() {
    using namespace detail;
    constexpr double inf = std::numeric_limits<double>::infinity();
    std::vector<Check> out;
    for (const FadingLaw& law : reference_grid(1.7)) {
        const std::string name = law_name(law);
        guarded(out, name, [&] {
            const double mass = integrate_density(law, [](double) { return 1.0; }, 0.0, inf) + zero_mass(law);
            double cdf_err = 0.0;
            for (double t : {0.05, 0.3, 1.0, 2.5, 6.0}) {
                const double g = t * mean_snr(law);
                const double part = integrate_density(law, [](double) { return 1.0; }, 0.0, g);
                cdf_err = std::max(cdf_err, std::abs(cdf(law, g) - (zero_mass(law) + part)));
            }
            const double mass_err = std::abs(mass - 1.0);
            out.push_back({name, mass_err <= 1e-8 && cdf_err <= 1e-7,
                           "|mass-1| " + sci(mass_err) + " (tol 1e-08), cdf err " + sci(cdf_err) + " (tol 1e-07)"});
        });
    }
    return out;
}

inline std::vector<Check> moments() {
    using namespace detail;
    constexpr double inf = std::numeric_limits<double>::infinity();
    std::vector<Check> out;
    for (const FadingLaw& law : reference_grid(1.7)) {
        const std::string name = law_name(law);
        guarded(out, name, [&] {
            double worst = 0.0;
            for (double r : {0.5, 1.0, 2.0, 3.0}) {
                const double q = integrate_density(law, [r](double g) { return std::pow(g, r); }, 0.0, inf);
                worst = std::max(worst, rel_err(moment(law, r), q));
            }
            out.push_back(within(name + " r=0.5,1,2,3", worst, 1e-6));
        });
    }
    const std::vector<HopChain> chains{
        HopChain({AlphaKappaMu(2.5, 1.0, 1.5, 3.0)}, 0.0),
        HopChain({AlphaKappaMu(2.5, 1.0, 1.5, 3.0), AlphaKappaMuExtreme(1.8, 1.2, 2.0)}, 0.4),
        HopChain({AlphaKappaMu(1.5, 0.5, 2.0, 2.0), AlphaKappaMuExtreme(1.8, 1.2, 2.0),
                  AlphaKappaMu(3.0, 4.0, 0.7, 5.0)},
                 1.1)};
    for (const HopChain& chain : chains) {
        const std::string name = "end_moment(1) n=" + std::to_string(chain.size());
        guarded(out, name, [&] {
            const double want = chain.prefix_survival() * mean_snr(chain.last());
            out.push_back(within(name, rel_err(end_moment(chain, 1.0), want), 1e-12));
        });
    }
    return out;
}

inline std::vector<Check> monte_carlo() {
    using namespace detail;
    std::vector<Check> out;
    const Modulation bpsk = Modulation::make(ModulationKind::bpsk);
    const Modulation dbpsk = Modulation::make(ModulationKind::dbpsk);
    const double threshold = 1.0;
    for (std::size_t n = 1; n <= 3; ++n) {
        for (double mean_db : {0.0, 10.0, 20.0}) {
            const double g = db(mean_db);
            std::vector<FadingLaw> all{AlphaKappaMu(2.5, 1.5, 1.2, g), AlphaKappaMuExtreme(1.8, 1.3, g),
                                       AlphaKappaMu(1.6, 0.5, 2.0, g)};
            all.erase(all.begin() + static_cast<std::ptrdiff_t>(n), all.end());
            const HopChain chain(std::move(all), 0.5);
            const std::string base = "n=" + std::to_string(n) + " mean=" + sci(mean_db) + "dB ";
            guarded(out, base, [&] {
                std::vector<mc::MetricSpec> specs(4);
                specs[0].kind = mc::MetricKind::outage;
                specs[0].threshold = threshold;
                specs[1].kind = mc::MetricKind::ber;
                specs[1].modulation = bpsk;
                specs[2].kind = mc::MetricKind::ber;
                specs[2].modulation = dbpsk;
                specs[3].kind = mc::MetricKind::capacity_ora;
                for (auto& s : specs) s.hops = n;
                const mc::McConfig cfg{1000000, mc::derive_seed(2024, n * 100 + static_cast<std::size_t>(mean_db)), 4};
                const auto est = mc::estimate_metrics(chain, cfg, specs);
                const double want[] = {outage_probability(chain, threshold), ber(chain, bpsk), ber(chain, dbpsk),
                                       capacity_ora(chain, 1.0).value};
                const char* names[] = {"OP", "BER bpsk", "BER dbpsk", "ORA"};
                for (int i = 0; i < 4; ++i) {
                    const double z = std::abs(est[i].mean - want[i]) / est[i].std_error;
                    out.push_back({base + names[i], z <= 4.0,
                                   "analytic " + sci(want[i]) + ", mc " + sci(est[i].mean) + " +- " +
                                       sci(est[i].std_error) + ", |z| " + sci(z) + " (tol 4)"});
                }
            });
        }
    }
    return out;
}

inline std::vector<Check> special() {
    using namespace detail;
    namespace sf = specfun;
    std::vector<Check> out;
    {
        double worst = 0.0;
        int cases = 0;
        guarded(out, "nuttall identity", [&] {
            for (double a : {0.5, 1.0, 2.0, 3.0, 5.0})
                for (double b : {0.25, 1.0, 2.0, 4.0, 6.0})
                    for (int N : {0, 1, 3}) {
                        const double lhs = sf::nuttall_q(N + 1.0, N, a, b);
                        const double rhs = std::pow(a, N) * sf::marcum_q(N + 1.0, a, b);
                        worst = std::max(worst, rel_err(lhs, rhs));
                        ++cases;
                    }
            out.push_back(within("Q_{N+1,N}(a,b) = a^N Q_{N+1}(a,b), " + std::to_string(cases) + " points", worst,
                                 1e-10));
        });
    }
    guarded(out, "marcum bounds", [&] {
        int bad = 0;
        int cases = 0;
        double sum_err = 0.0;
        for (double nu : {0.0, 0.5, 1.0, 2.7, 8.0}) {
            for (double a : {0.0, 0.5, 2.0, 6.0}) {
                double prev = 1.0;
                for (double b = 0.0; b <= 14.0; b += 0.25) {
                    const auto pq = sf::marcum_pq(nu, a, b);
                    sum_err = std::max(sum_err, std::abs(pq.p + pq.q - 1.0));
                    if (!(pq.q >= 0.0 && pq.q <= 1.0 && pq.q <= prev + 1e-14)) ++bad;
                    prev = pq.q;
                    ++cases;
                }
            }
            for (double b : {0.5, 2.0, 5.0}) {
                double prev = 0.0;
                for (double a = 0.0; a <= 10.0; a += 0.25) {
                    const double q = sf::marcum_q(nu, a, b);
                    if (q < prev - 1e-14) ++bad;
                    prev = q;
                    ++cases;
                }
            }
        }
        for (double a : {0.5, 2.0})
            for (double b : {0.5, 2.0, 5.0}) {
                double prev = 0.0;
                for (double nu : {0.0, 0.5, 1.0, 2.0, 4.0, 9.0}) {
                    const double q = sf::marcum_q(nu, a, b);
                    if (q < prev - 1e-14) ++bad;
                    prev = q;
                    ++cases;
                }
            }
        out.push_back({"marcum Q in [0,1], monotone in b, a and nu (" + std::to_string(cases) + " points)", bad == 0,
                       std::to_string(bad) + " violations"});
        out.push_back(within("marcum P + Q = 1", sum_err, 1e-12));
    });
    guarded(out, "meijer identities", [&] {
        const sf::MeijerGSpec e{1, 0, 0, 1, {}, {0.0}};
        const sf::MeijerGSpec k{1, 1, 1, 1, {0.0}, {0.0}};
        double we = 0.0;
        double wk = 0.0;
        double ws = 0.0;
        for (double z : {0.01, 0.3, 1.0, 4.0, 10.0}) {
            we = std::max(we, rel_err(sf::meijer_g(e, z), std::exp(-z)));
            wk = std::max(wk, rel_err(sf::meijer_g(k, z), 1.0 / (1.0 + z)));
            // G^{1,1}_{1,1}(z | a; b) = Gamma(1 - a + b) z^b (1 + z)^{a - b - 1}
            const double a = -0.3;
            const double b = 0.6;
            const sf::MeijerGSpec s{1, 1, 1, 1, {a}, {b}};
            const double want = std::tgamma(1.0 - a + b) * std::pow(z, b) * std::pow(1.0 + z, a - b - 1.0);
            ws = std::max(ws, rel_err(sf::meijer_g(s, z), want));
        }
        out.push_back(within("G^{1,0}_{0,1}(z|-;0) = exp(-z)", we, 1e-10));
        out.push_back(within("G^{1,1}_{1,1}(z|0;0) = 1/(1+z)", wk, 1e-10));
        out.push_back(within("G^{1,1}_{1,1}(z|a;b) shifted kernel", ws, 1e-10));
    });
    return out;
}

inline std::vector<Check> reductions() {
    using namespace detail;
    std::vector<Check> out;
    const double mean = 1.0;
    const FadingLaw ray = AlphaKappaMu(2.0, 1e-9, 1.0, mean);
    const HopChain one({ray}, 0.0);
    guarded(out, "rayleigh cdf", [&] {
        double worst = 0.0;
        for (double g : {0.01, 0.1, 0.5, 1.0, 2.0, 5.0, 10.0})
            worst = std::max(worst, std::abs(cdf(ray, g) - (-std::expm1(-g / mean))));
        out.push_back(within("rayleigh CDF 1 - exp(-g/mean)", worst, 1e-5));
    });
    guarded(out, "rayleigh bpsk", [&] {
        const double v = ber(one, Modulation::make(ModulationKind::bpsk));
        const double want = 0.5 * (1.0 - std::sqrt(mean / (1.0 + mean)));
        out.push_back(within("rayleigh BPSK BER (1 - sqrt(g/(1+g)))/2 at mean 1", std::abs(v - want), 1e-5,
                             "value " + sci(v)));
        out.push_back(within("rayleigh BPSK BER vs 0.146447", std::abs(v - 0.146447), 1e-5));
    });
    guarded(out, "rayleigh dbpsk", [&] {
        const double v = ber(one, Modulation::make(ModulationKind::dbpsk));
        out.push_back(within("rayleigh DBPSK BER 1/(2(1+g))", std::abs(v - 0.5 / (1.0 + mean)), 1e-5));
    });
    guarded(out, "rayleigh ora", [&] {
        // E[log2(1 + g)] = exp(1/mean) E1(1/mean) / ln 2, with E1(x) = -Ei(-x).
        const double want = std::exp(1.0 / mean) * -std::expint(-1.0 / mean) / std::numbers::ln2;
        const double v = capacity_ora(one, 1.0).value;
        out.push_back(within("rayleigh ORA exp(1/g) E1(1/g) / ln2 at mean 1", std::abs(v - want), 1e-5,
                             "value " + sci(v) + ", closed form " + sci(want)));
    });
    guarded(out, "rayleigh af", [&] {
        out.push_back(within("rayleigh amount of fading = 1", std::abs(amount_of_fading(one) - 1.0), 1e-5));
    });
    guarded(out, "rayleigh multihop op", [&] {
        const double th = 0.5;
        const HopChain three({AlphaKappaMu(2.0, 1e-9, 1.0, 1.0), AlphaKappaMu(2.0, 1e-9, 1.0, 2.0),
                              AlphaKappaMu(2.0, 1e-9, 1.0, 4.0)},
                             th);
        const double want = -std::expm1(-th * (1.0 + 0.5 + 0.25));
        out.push_back(within("3-hop rayleigh OP 1 - exp(-th sum 1/mean_k)",
                             std::abs(outage_probability(three, th) - want), 1e-5));
    });
    guarded(out, "nakagami limit", [&] {
        // alpha = 2 with kappa -> 0 is Nakagami-m with m = mu; its CDF is P(mu, mu g / mean).
        const double mu = 2.5;
        const FadingLaw nak = AlphaKappaMu(2.0, 1e-9, mu, mean);
        double worst = 0.0;
        for (double g : {0.1, 0.5, 1.0, 3.0}) {
            const double want = specfun::incomplete_gamma(mu, mu * g / mean).p;
            worst = std::max(worst, std::abs(cdf(nak, g) - want));
        }
        out.push_back(within("nakagami-m CDF (alpha=2, kappa->0, mu=m)", worst, 1e-5));
    });
    return out;
}

inline std::vector<Check> floor() {
    using namespace detail;
    std::vector<Check> out;
    const double m = 1.5;
    const double want = 0.5 * std::exp(-2.0 * m);
    const Modulation dbpsk = Modulation::make(ModulationKind::dbpsk);
    for (double alpha : {1.5, 2.0, 3.0}) {
        const std::string name = "extreme alpha=" + sci(alpha) + " m=1.5 DBPSK at 60 dB";
        guarded(out, name, [&] {
            const HopChain chain({AlphaKappaMuExtreme(alpha, m, db(60.0))}, 0.0);
            const double v = ber(chain, dbpsk);
            out.push_back(within(name, rel_err(v, want), 0.02, "value " + sci(v) + ", floor " + sci(want)));
        });
    }
    return out;
}

inline std::vector<Check> ordering() {
    using namespace detail;
    std::vector<Check> out;
    for (int family = 0; family < 2; ++family) {
        for (int i = 0; i < 20; ++i) {
            const double x = sweep_db(i);
            const std::string name = std::string(family == 0 ? "akm" : "extreme") + " n=3 at " + sci(x) + " dB";
            guarded(out, name, [&] {
                const HopChain chain = ordering_chain(family, db(x));
                const double p = capacity_opra(chain, 1.0).value;
                const double o = capacity_ora(chain, 1.0).value;
                const double t = capacity_tifr(chain, 1.0).value;
                const double c = capacity_cifr(chain, 1.0).value;
                out.push_back({name, p >= o && o >= t && t >= c,
                               "opra " + sci(p) + " ora " + sci(o) + " tifr " + sci(t) + " cifr " + sci(c)});
            });
        }
    }
    return out;
}

inline std::vector<Check> cutoff() {
    using namespace detail;
    std::vector<Check> out;
    for (int family = 0; family < 2; ++family) {
        for (int i = 0; i < 20; ++i) {
            const double x = sweep_db(i);
            const std::string name = std::string(family == 0 ? "akm" : "extreme") + " n=3 at " + sci(x) + " dB";
            guarded(out, name, [&] {
                const OpraCutoff c = opra_cutoff(ordering_chain(family, db(x)));
                const double r = std::max(c.residual, c.constraint_residual);
                out.push_back({name, r <= 1e-8 && c.value > 0.0 && c.value <= 1.0,
                               "cutoff " + sci(c.value) + ", residual " + sci(r) + " (tol 1e-08)"});
            });
        }
    }
    return out;
}

inline std::vector<Check> tifr() {
    using namespace detail;
    std::vector<Check> out;
    const std::vector<HopChain> inverting{
        HopChain({AlphaKappaMu(2.0, 1.0, 2.0, 3.0)}, 0.0),
        HopChain({AlphaKappaMu(2.5, 1.5, 1.2, 10.0)}, 0.0),
        HopChain({AlphaKappaMu(1.5, 3.0, 2.0, 1.0)}, 0.0),
        ordering_chain(0, db(5.0)),
        ordering_chain(0, db(20.0))};
    for (const HopChain& chain : inverting) {
        const std::string name = "gamma_o=1e-6 vs CIFR, n=" + std::to_string(chain.size()) + " last " +
                                 law_name(chain.last()) + " mean " + sci(mean_snr(chain.last()));
        guarded(out, name, [&] {
            const double t = capacity_tifr(chain, 1.0, 1e-6).value;
            const double c = capacity_cifr(chain, 1.0).value;
            out.push_back(within(name, rel_err(t, c), 1e-3, "tifr " + sci(t) + ", cifr " + sci(c)));
        });
    }
    const std::vector<HopChain> nuttall{
        HopChain({AlphaKappaMu(4.0, 1.0, 1.5, 2.0)}, 0.0),
        HopChain({AlphaKappaMu(3.0, 0.5, 2.0, 5.0)}, 0.0),
        HopChain({AlphaKappaMu(2.5, 1.0, 1.5, 3.0), AlphaKappaMu(2.5, 2.0, 2.0, 1.0)}, 0.3)};
    for (const HopChain& chain : nuttall) {
        for (double go : {1e-3, 0.1, 1.0, 3.0}) {
            const std::string name = "nuttall vs quadrature, last " + law_name(chain.last()) + " gamma_o=" + sci(go);
            guarded(out, name, [&] {
                const double a = tifr_integral_nuttall(chain, go);
                const double b = truncated_inverse_moment(chain, go);
                out.push_back(within(name, rel_err(a, b), 1e-6));
            });
        }
    }
    return out;
}

inline std::vector<Check> asymptotics() {
    using namespace detail;
    std::vector<Check> out;
    const std::array<Modulation, 2> mods{Modulation::make(ModulationKind::bpsk),
                                         Modulation::make(ModulationKind::dbpsk)};
    for (int family = 0; family < 2; ++family) {
        for (double x : {-5.0, -10.0, -15.0, -20.0}) {
            const double g = db(x);
            const HopChain chain =
                family == 0 ? HopChain({AlphaKappaMu(2.0, 1.0, 1.5, g), AlphaKappaMu(2.0, 1.0, 1.5, g)}, 0.0)
                            : HopChain({AlphaKappaMuExtreme(2.0, 1.0, g)}, 0.0);
            for (const Modulation& mod : mods) {
                const std::string name = std::string(family == 0 ? "akm(2,1,1.5) n=2" : "extreme(2,m=1) n=1") +
                                         " " + mod.name() + " at " + sci(x) + " dB";
                guarded(out, name, [&] {
                    const double exact = ber(chain, mod);
                    const double series = ber_asymptotic(chain, mod, 10);
                    out.push_back(within(name, rel_err(series, exact), 0.05,
                                         "series " + sci(series) + ", exact " + sci(exact)));
                });
            }
        }
    }
    return out;
}

inline std::vector<Check> determinism() {
    using namespace detail;
    std::vector<Check> out;
    scenario::ScenarioConfig cfg;
    cfg.metric = scenario::Metric::ber;
    cfg.modulation = Modulation::make(ModulationKind::bpsk);
    cfg.gamma_th_db = -3.0;
    cfg.sweep = {0.0, 21.0, 8};
    cfg.mc = {true, 100000, 77, 3};
    cfg.hops = {{"akm", 2.5, 1.5, 1.2, 0.0, 0.0}, {"extreme", 1.8, 0.0, 0.0, 1.3, 2.0}, {"akm", 1.6, 0.5, 2.0, 0.0, -1.0}};
    guarded(out, "determinism", [&] {
        const std::string a = scenario::run(cfg, 1).csv;
        const std::string b = scenario::run(cfg, 8).csv;
        const std::string c = scenario::run(cfg, 1).csv;
        out.push_back({"CSV identical across 1 and 8 workers", a == b, std::to_string(a.size()) + " bytes"});
        out.push_back({"CSV identical across repeated runs", a == c, std::to_string(a.size()) + " bytes"});
    });
    return out;
}

inline const std::vector<Suite>& suites() {
    static const std::vector<Suite> all{
        {1, "normalization", "density integrates to one and matches the CDF", normalization},
        {2, "moments", "closed-form moments agree with quadrature", moments},
        {3, "mc", "analytic metrics agree with Monte Carlo", monte_carlo},
        {4, "special", "special-function identities", special},
        {5, "reductions", "Rayleigh and Nakagami reductions", reductions},
        {6, "floor", "Extreme DBPSK error floor", floor},
        {7, "ordering", "capacity ordering opra >= ora >= tifr >= cifr", ordering},
        {8, "cutoff", "OPRA cutoff residual and range", cutoff},
        {9, "tifr", "TIFR limit and Nuttall route", tifr},
        {10, "asymptotics", "low-SNR series BER against exact BER", asymptotics},
        {11, "determinism", "CSV output is reproducible", determinism},
    };
    return all;
}

inline const Suite* find_suite(std::string_view name) {
    for (const Suite& s : suites())
        if (s.name == name) return &s;
    return nullptr;
}

inline bool all_passed(const std::vector<Check>& checks) {
    for (const Check& c : checks)
        if (!c.passed) return false;
    return !checks.empty();
}

}  // namespace fadekit::validation
