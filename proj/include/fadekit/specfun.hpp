#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "fadekit/error.hpp"
#include "fadekit/numerics.hpp"

namespace fadekit::specfun {

namespace detail {

inline constexpr double eps = std::numeric_limits<double>::epsilon();
inline constexpr double inf = std::numeric_limits<double>::infinity();
inline constexpr double max_log = 709.782712893384;

// B_{2k} / (2k (2k - 1)) for k = 1..8
inline constexpr double stirling_c[8] = {1.0 / 12.0,     -1.0 / 360.0,        1.0 / 1260.0,
                                         -1.0 / 1680.0,  1.0 / 1188.0,        -691.0 / 360360.0,
                                         1.0 / 156.0,    -3617.0 / 122400.0};

template <class T>
T stirling_tail(T x) {
    const T z = T(1.0) / x;
    const T z2 = z * z;
    T sum = T(stirling_c[7]);
    for (int k = 6; k >= 0; --k) sum = sum * z2 + T(stirling_c[k]);
    return sum * z;
}

inline double half_log_two_pi() { return 0.5 * std::log(2.0 * std::numbers::pi); }

// log|sin(pi z)| with the matching argument, stable for large |Im z|.
inline std::complex<double> log_sin_pi(std::complex<double> z) {
    const double pi = std::numbers::pi;
    double x = z.real();
    double y = z.imag();
    const bool lower = y < 0.0;
    if (lower) y = -y;
    x -= 2.0 * std::floor(0.5 * x);
    const std::complex<double> w = std::exp(std::complex<double>(-2.0 * pi * y, 2.0 * pi * x));
    std::complex<double> r = std::complex<double>(std::log(0.5) + pi * y, 0.5 * pi - pi * x) +
                             std::log(1.0 - w);
    return lower ? std::conj(r) : r;
}

}  // namespace detail

/// ln Gamma(x) for x > 0.
inline double log_gamma(double x) {
    if (!(x > 0.0)) throw DomainError("log_gamma requires x > 0");
    if (x == detail::inf) return detail::inf;
    if (x < 1e-300) return -std::log(x);
    // tgamma is correctly rounded to a few ulp and, unlike lgamma, does not
    // write the global signgam.
    if (x < 15.0) return std::log(std::tgamma(x));
    return (x - 0.5) * std::log(x) - x + detail::half_log_two_pi() + detail::stirling_tail(x);
}

/// Principal-ish branch of ln Gamma(z) for complex z away from the poles.
/// Only exp() of the result is meaningful when the imaginary part is large.
inline std::complex<double> log_gamma(std::complex<double> z) {
    using C = std::complex<double>;
    if (z.real() < 0.5)
        return C(std::log(std::numbers::pi), 0.0) - detail::log_sin_pi(z) - log_gamma(1.0 - z);
    C shift(0.0, 0.0);
    while (z.real() < 15.0) {
        shift += std::log(z);
        z += 1.0;
    }
    return (z - 0.5) * std::log(z) - z + detail::half_log_two_pi() + detail::stirling_tail(z) -
           shift;
}

/// Regularized incomplete gamma functions P(s, x) and Q(s, x) = 1 - P(s, x).
struct GammaPQ {
    double p;
    double q;
};

inline GammaPQ incomplete_gamma(double s, double x) {
    if (!(s >= 0.0) || !(x >= 0.0)) throw DomainError("incomplete_gamma requires s >= 0, x >= 0");
    if (s == 0.0) return {1.0, 0.0};
    if (x == 0.0) return {0.0, 1.0};
    if (x == detail::inf) return {1.0, 0.0};
    const double log_front = s * std::log(x) - x - log_gamma(s);
    if (x < s + 1.0) {
        double sum = 1.0;
        double term = 1.0;
        for (int n = 1; n < 100000; ++n) {
            term *= x / (s + n);
            sum += term;
            if (term < sum * detail::eps) {
                const double p = std::exp(log_front - std::log(s)) * sum;
                return {std::min(p, 1.0), std::max(0.0, 1.0 - p)};
            }
        }
        throw ConvergenceError("incomplete gamma series did not converge");
    }
    constexpr double tiny = 1e-300;
    double b = x + 1.0 - s;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i < 100000; ++i) {
        const double an = -i * (i - s);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < detail::eps) {
            const double q = std::exp(log_front) * h;
            return {std::max(0.0, 1.0 - q), std::min(q, 1.0)};
        }
    }
    throw ConvergenceError("incomplete gamma continued fraction did not converge");
}

namespace detail {

inline bool bessel_use_asymptotic(double nu, double x) { return x > 30.0 && x > nu * nu; }

// ln(e^{-x} I_nu(x) sqrt(2 pi x)) from the large-argument expansion.
inline double bessel_asymptotic_log_core(double nu, double x) {
    const double mu = 4.0 * nu * nu;
    double term = 1.0;
    double sum = 1.0;
    double prev = 1.0;
    for (int k = 1; k < 200; ++k) {
        const double odd = 2.0 * k - 1.0;
        term *= -(mu - odd * odd) / (k * 8.0 * x);
        if (term == 0.0) break;
        if (std::abs(term) > std::abs(prev)) break;
        sum += term;
        prev = term;
        if (std::abs(term) < eps * std::abs(sum)) break;
    }
    return std::log(sum);
}

// ln of sum_k (x^2/4)^k / (k! (nu+1)_k), i.e. Gamma(nu+1) I_nu(x) / (x/2)^nu.
inline double bessel_series_log(double nu, double x) {
    const double q = 0.25 * x * x;
    double term = 1.0;
    double sum = 1.0;
    double scale = 0.0;
    constexpr double big = 1e280;
    const double log_big = std::log(big);
    for (int k = 0; k < 1000000; ++k) {
        const double ratio = q / ((k + 1.0) * (k + nu + 1.0));
        term *= ratio;
        sum += term;
        if (sum > big) {
            sum /= big;
            term /= big;
            scale += log_big;
        }
        if (ratio < 1.0 && term < eps * sum) return std::log(sum) + scale;
    }
    throw ConvergenceError("Bessel I power series did not converge");
}

}  // namespace detail

/// ln[I_nu(x) / (x/2)^nu] for nu > -1, x >= 0. Finite at x = 0.
inline double log_bessel_i_ratio(double nu, double x) {
    if (!(nu > -1.0)) throw DomainError("log_bessel_i_ratio requires nu > -1");
    if (!(x >= 0.0)) throw DomainError("log_bessel_i_ratio requires x >= 0");
    if (detail::bessel_use_asymptotic(nu, x))
        return x - 0.5 * std::log(2.0 * std::numbers::pi * x) +
               detail::bessel_asymptotic_log_core(nu, x) - nu * std::log(0.5 * x);
    return detail::bessel_series_log(nu, x) - log_gamma(nu + 1.0);
}

/// ln I_nu(x) for nu >= -1, x >= 0.
inline double log_bessel_i(double nu, double x) {
    if (!(nu >= -1.0)) throw DomainError("bessel_i requires nu >= -1");
    if (!(x >= 0.0)) throw DomainError("bessel_i requires x >= 0");
    if (nu == -1.0) nu = 1.0;
    if (x == 0.0) {
        if (nu == 0.0) return 0.0;
        return nu > 0.0 ? -detail::inf : detail::inf;
    }
    if (x == detail::inf) return detail::inf;
    if (detail::bessel_use_asymptotic(nu, x))
        return x - 0.5 * std::log(2.0 * std::numbers::pi * x) +
               detail::bessel_asymptotic_log_core(nu, x);
    return nu * std::log(0.5 * x) + detail::bessel_series_log(nu, x) - log_gamma(nu + 1.0);
}

/// Modified Bessel function of the first kind. With scaled = true the
/// result is e^{-x} I_nu(x).
inline double bessel_i(double nu, double x, bool scaled = false) {
    const double l = log_bessel_i(nu, x);
    if (std::isinf(l) && l > 0.0 && x == 0.0) return detail::inf;
    const double v = scaled ? l - x : l;
    if (v > detail::max_log) throw OverflowError("bessel_i overflows; request the scaled form");
    return std::exp(v);
}

namespace detail {

struct LogValue {
    double log_abs;
    int sign;
};

inline bool non_positive_integer(double b) { return b <= 0.0 && b == std::floor(b); }

// sum_k (a)_k z^k / ((b)_k k!) for z >= 0 with running rescaling.
inline LogValue kummer_series(double a, double b, double z) {
    double term = 1.0;
    double sum = 1.0;
    double scale = 0.0;
    constexpr double big = 1e280;
    const double log_big = std::log(big);
    const double k_min = std::max({0.0, -a, -b});
    for (int k = 0; k < 1000000; ++k) {
        const double ratio = (a + k) * z / ((b + k) * (k + 1.0));
        term *= ratio;
        sum += term;
        if (std::abs(sum) > big) {
            sum /= big;
            term /= big;
            scale += log_big;
        }
        if (term == 0.0) break;
        if (k + 1.0 > k_min && std::abs(ratio) < 1.0 && std::abs(term) <= eps * std::abs(sum))
            break;
        if (k == 999999) throw ConvergenceError("Kummer series did not converge");
    }
    if (sum == 0.0) return {-inf, 0};
    return {std::log(std::abs(sum)) + scale, sum > 0.0 ? 1 : -1};
}

inline LogValue kummer_log(double a, double b, double z) {
    if (z == 0.0) return {0.0, 1};
    if (z > 0.0) return kummer_series(a, b, z);
    LogValue t = kummer_series(b - a, b, -z);
    t.log_abs += z;
    return t;
}

inline double from_log(LogValue v, const char* what) {
    if (v.sign == 0) return 0.0;
    if (v.log_abs > max_log) throw OverflowError(std::string(what) + " overflows a double");
    return v.sign * std::exp(v.log_abs);
}

}  // namespace detail

/// Kummer's confluent hypergeometric function M(a; b; z).
inline double kummer_m(double a, double b, double z) {
    if (detail::non_positive_integer(b))
        throw DomainError("kummer_m is undefined for non-positive integer b");
    if (std::isnan(a) || std::isnan(b) || std::isnan(z)) throw DomainError("kummer_m argument is NaN");
    return detail::from_log(detail::kummer_log(a, b, z), "kummer_m");
}

/// ln M(a; b; z) for a > 0, b > 0, z >= 0 where every series term is positive.
inline double log_kummer_m(double a, double b, double z) {
    if (!(a > 0.0) || !(b > 0.0) || !(z >= 0.0))
        throw DomainError("log_kummer_m requires a > 0, b > 0, z >= 0");
    return detail::kummer_log(a, b, z).log_abs;
}

/// M(a; b; z) / Gamma(b), continued to non-positive integer b by its limit.
inline double kummer_m_regularized(double a, double b, double z) {
    if (std::isnan(a) || std::isnan(b) || std::isnan(z))
        throw DomainError("kummer_m_regularized argument is NaN");
    using detail::LogValue;
    if (detail::non_positive_integer(b)) {
        const int n = static_cast<int>(-b);
        if (z == 0.0) return 0.0;
        double log_front = (n + 1.0) * std::log(std::abs(z)) - log_gamma(n + 2.0);
        int sign = (z < 0.0 && (n + 1) % 2 == 1) ? -1 : 1;
        for (int k = 0; k <= n; ++k) {
            const double f = a + k;
            if (f == 0.0) return 0.0;
            log_front += std::log(std::abs(f));
            if (f < 0.0) sign = -sign;
        }
        LogValue m = detail::kummer_log(a + n + 1.0, n + 2.0, z);
        return detail::from_log({m.log_abs + log_front, m.sign * sign}, "kummer_m_regularized");
    }
    LogValue m = detail::kummer_log(a, b, z);
    if (b > 0.0)
        return detail::from_log({m.log_abs - log_gamma(b), m.sign}, "kummer_m_regularized");
    const double s = std::sin(std::numbers::pi * b);
    const double log_rgamma =
        std::log(std::abs(s)) + log_gamma(1.0 - b) - std::log(std::numbers::pi);
    return detail::from_log({m.log_abs + log_rgamma, m.sign * (s > 0.0 ? 1 : -1)},
                            "kummer_m_regularized");
}

namespace detail {

// A positive quantity kept as mantissa * e^{log_scale} so that long
// multiplicative recurrences survive temporary underflow.
class ScaledTerm {
public:
    explicit ScaledTerm(double log_value) {
        if (log_value > -600.0) {
            mant_ = std::exp(log_value);
        } else {
            mant_ = 1.0;
            log_scale_ = log_value;
        }
    }
    void multiply(double f) {
        mant_ *= f;
        if (log_scale_ != 0.0 && mant_ > 1e200) {
            const double total = std::log(mant_) + log_scale_;
            if (total > -600.0) {
                mant_ = std::exp(total);
                log_scale_ = 0.0;
            } else {
                mant_ = 1.0;
                log_scale_ = total;
            }
        }
    }
    double value() const { return log_scale_ == 0.0 ? mant_ : mant_ * std::exp(log_scale_); }

private:
    double mant_ = 0.0;
    double log_scale_ = 0.0;
};

}  // namespace detail

/// Lower and upper tails of the generalized Marcum function:
/// q = Q_nu(a, b), p = 1 - Q_nu(a, b), each summed directly so that small
/// values keep their relative accuracy.
struct MarcumPQ {
    double p;
    double q;
};

/// Generalized Marcum Q for real nu >= 0 as the survival function of a
/// noncentral chi-square variable with 2 nu degrees of freedom and
/// noncentrality a^2, evaluated at b^2 through its Poisson mixture of
/// central terms. nu = 0 is the zero-degree-of-freedom law whose atom at
/// the origin has mass e^{-a^2/2}.
inline MarcumPQ marcum_pq(double nu, double a, double b) {
    if (!(nu >= 0.0) || !(a >= 0.0) || !(b >= 0.0))
        throw DomainError("marcum_q requires nu >= 0, a >= 0, b >= 0");
    const double lam = 0.5 * a * a;
    const double x = 0.5 * b * b;
    if (x == 0.0) {
        if (nu > 0.0) return {0.0, 1.0};
        return {std::exp(-lam), -std::expm1(-lam)};
    }
    if (x == detail::inf) return {1.0, 0.0};
    if (lam == 0.0) {
        if (nu == 0.0) return {1.0, 0.0};
        const GammaPQ g = incomplete_gamma(nu, x);
        return {g.p, g.q};
    }
    if (lam == detail::inf) return {0.0, 1.0};

    // Poisson weights relative to the mode, built by exact ratios and
    // normalized over the kept range (the dropped mass is below 1e-18).
    const double jm = std::floor(lam);
    std::vector<double> below;
    for (double j = jm, r = 1.0; j > 0.0;) {
        r *= j / lam;
        if (r < 1e-18) break;
        below.push_back(r);
        j -= 1.0;
    }
    std::vector<double> weights(below.rbegin(), below.rend());
    weights.push_back(1.0);
    for (double j = jm, r = 1.0;;) {
        r *= lam / (j + 1.0);
        if (r < 1e-18) break;
        weights.push_back(r);
        j += 1.0;
    }
    const double jlo = jm - static_cast<double>(below.size());
    const double jhi = jlo + static_cast<double>(weights.size()) - 1.0;
    {
        // Far beyond the largest kept Erlang shape the upper tail is below
        // the double range; the recursions below would also overflow there.
        const double s_top = nu + jhi;
        if (x > s_top + 1.0 && s_top * std::log(x) - x - log_gamma(s_top + 1.0) < -800.0) return {1.0, 0.0};
    }
    numerics::CompensatedSum wsum;
    for (double w : weights) wsum += w;
    const double wnorm = 1.0 / wsum.value();
    const double log_x = std::log(x);

    // Q(s+1, x) = Q(s, x) + g(s) with g(s) = x^s e^{-x} / Gamma(s+1): every
    // step adds, so the upward pass is accurate for Q.
    numerics::CompensatedSum qsum;
    {
        double s = nu + jlo;
        double q = s == 0.0 ? 0.0 : incomplete_gamma(s, x).q;
        detail::ScaledTerm g(s * log_x - x - log_gamma(s + 1.0));
        for (std::size_t i = 0; i < weights.size(); ++i) {
            qsum += weights[i] * q;
            q += g.value();
            s += 1.0;
            g.multiply(x / s);
        }
    }
    // P(s, x) = P(s+1, x) + g(s): the downward pass is accurate for P.
    numerics::CompensatedSum psum;
    {
        double s = nu + jhi;
        double p = s == 0.0 ? 1.0 : incomplete_gamma(s, x).p;
        detail::ScaledTerm g(s > 0.0 ? (s - 1.0) * log_x - x - log_gamma(s) : -detail::inf);
        for (std::size_t i = weights.size(); i-- > 0;) {
            psum += weights[i] * p;
            if (i == 0) break;
            s -= 1.0;
            p += g.value();
            if (s > 0.0) g.multiply(s / x);
        }
    }
    return {std::clamp(psum.value() * wnorm, 0.0, 1.0), std::clamp(qsum.value() * wnorm, 0.0, 1.0)};
}

/// Generalized Marcum Q function Q_nu(a, b), nu >= 0 real.
inline double marcum_q(double nu, double a, double b) { return marcum_pq(nu, a, b).q; }

/// Complementary error function.
inline double erfc(double x) { return std::erfc(x); }

/// Nuttall Q function: integral over [b, inf) of x^M e^{-(x^2+a^2)/2} I_N(a x).
inline double nuttall_q(double M, double N, double a, double b) {
    if (!(a > 0.0)) throw DomainError("nuttall_q requires a > 0");
    if (!(M >= 0.0) || !(N >= 0.0)) throw DomainError("nuttall_q requires M >= 0 and N >= 0");
    if (!(b >= 0.0)) throw DomainError("nuttall_q requires b >= 0");
    auto f = [M, N, a](double x) {
        if (x <= 0.0) return 0.0;
        const double ax = a * x;
        const double d = x - a;
        return std::exp(M * std::log(x) - 0.5 * d * d + log_bessel_i(N, ax) - ax);
    };
    std::vector<double> pts{b};
    if (a > b) pts.push_back(a);
    pts.push_back(std::max(a, b) + 12.0);
    pts.push_back(detail::inf);
    const numerics::QuadSpec spec{1e-13, 1e-300, 4000};
    return numerics::integrate_over(f, pts, spec).value;
}

/// Parameters of G^{m,n}_{p,q}(z | a_params; b_params).
struct MeijerGSpec {
    int m = 0;
    int n = 0;
    int p = 0;
    int q = 0;
    std::vector<double> a_params;
    std::vector<double> b_params;
};

enum class MeijerContour { automatic, vertical, loop };

struct MeijerGOptions {
    MeijerContour contour = MeijerContour::automatic;
    double rel_tol = 1e-11;
    double loop_height = 1.0;
};

namespace detail {

inline void validate(const MeijerGSpec& g) {
    if (g.m < 0 || g.n < 0 || g.m > g.q || g.n > g.p ||
        static_cast<int>(g.a_params.size()) != g.p || static_cast<int>(g.b_params.size()) != g.q)
        throw DomainError("inconsistent MeijerGSpec sizes");
    if (g.m + g.n == 0) throw DomainError("MeijerGSpec needs m + n >= 1");
}

struct MellinBarnes {
    const MeijerGSpec& g;
    double log_z;

    std::complex<double> log_value(std::complex<double> s) const {
        std::complex<double> sum = s * log_z;
        for (int j = 0; j < g.q; ++j) {
            const double bj = g.b_params[j];
            if (j < g.m)
                sum += log_gamma(bj - s);
            else
                sum -= log_gamma(1.0 - bj + s);
        }
        for (int i = 0; i < g.p; ++i) {
            const double ai = g.a_params[i];
            if (i < g.n)
                sum += log_gamma(1.0 - ai + s);
            else
                sum -= log_gamma(ai - s);
        }
        return sum;
    }
    std::complex<double> operator()(std::complex<double> s) const {
        const std::complex<double> l = log_value(s);
        if (std::isnan(l.real()) || l.real() == -inf) return {0.0, 0.0};
        return std::exp(l);
    }
};

struct Abscissa {
    double c;
    double clearance;
};

inline Abscissa choose_abscissa(const MeijerGSpec& g) {
    double right = inf;
    for (int j = 0; j < g.m; ++j) right = std::min(right, g.b_params[j]);
    double left = -inf;
    for (int i = 0; i < g.n; ++i) left = std::max(left, g.a_params[i] - 1.0);
    if (g.m > 0 && g.n > 0) {
        if (!(right > left)) {
            std::ostringstream msg;
            msg << "no vertical contour separates the poles: rightmost left-family pole " << left
                << " is not below leftmost right-family pole " << right;
            throw PoleSeparationError(msg.str());
        }
        return {0.5 * (left + right), 0.5 * (right - left)};
    }
    if (g.m > 0) return {right - 0.5, 0.5};
    return {left + 0.5, 0.5};
}

inline double vertical_line(const MellinBarnes& mb, double c, double rel_tol) {
    constexpr double y_cap = 4000.0;
    double h = 0.5;
    double previous = std::numeric_limits<double>::quiet_NaN();
    for (int level = 0; level < 14; ++level, h *= 0.5) {
        numerics::CompensatedSum sum;
        double magnitude = 0.0;
        const std::complex<double> v0 = mb({c, 0.0});
        sum += 0.5 * v0.real();
        magnitude += 0.5 * std::abs(v0);
        int quiet = 0;
        bool truncated = false;
        for (long k = 1; k * h <= y_cap; ++k) {
            const std::complex<double> v = mb({c, k * h});
            sum += v.real();
            const double av = std::abs(v);
            magnitude += av;
            if (av < 1e-16 * magnitude)
                ++quiet;
            else
                quiet = 0;
            if (quiet >= 8) {
                truncated = true;
                break;
            }
        }
        if (!truncated)
            throw ConvergenceError("Mellin-Barnes integrand tail did not decay below the height cap");
        const double value = h * sum.value() / std::numbers::pi;
        const double scale = h * magnitude / std::numbers::pi;
        if (level > 0 &&
            std::abs(value - previous) <= rel_tol * std::abs(value) + 1e-14 * scale)
            return value;
        previous = value;
    }
    throw ConvergenceError("Mellin-Barnes trapezoid refinement did not converge");
}

inline double loop_contour(const MellinBarnes& mb, double c, double height, bool to_the_right, double rel_tol) {
    const numerics::QuadSpec spec{rel_tol, 1e-300, 4000};
    auto vertical = [&](double y) { return mb({c, y}).real(); };
    auto arm = [&](double x) { return mb({x, height}).imag(); };
    const double seg = numerics::integrate(vertical, 0.0, height, spec).value;
    double arms;
    if (to_the_right) {
        const double pts[] = {c, c + 2.0, c + 10.0, inf};
        arms = numerics::integrate_over(arm, pts, spec).value;
    } else {
        const double pts[] = {-inf, c - 10.0, c - 2.0, c};
        arms = -numerics::integrate_over(arm, pts, spec).value;
    }
    return (seg + arms) / std::numbers::pi;
}

}  // namespace detail

/// Meijer G function G^{m,n}_{p,q}(z) for z > 0 by numerical integration of
/// its Mellin-Barnes representation
///   (1 / 2 pi i) int prod_{j<=m} Gamma(b_j - s) prod_{i<=n} Gamma(1 - a_i + s)
///   / [prod_{j>m} Gamma(1 - b_j + s) prod_{i>n} Gamma(a_i - s)] z^s ds.
/// When the integrand decays along vertical lines (m + n > (p + q) / 2) a
/// straight contour with trapezoidal summation is used; otherwise the
/// contour is bent into a loop around the poles that the integrand decays
/// towards. On the straight contour the absolute error is about 1e-16
/// times the integral of |integrand|, so values far below that scale (such
/// as G^{1,0}_{0,1}(z) = e^{-z} for z > 15) lose relative accuracy.
inline double meijer_g(const MeijerGSpec& spec, double z, const MeijerGOptions& opt = {}) {
    detail::validate(spec);
    if (!(z > 0.0) || !std::isfinite(z)) throw DomainError("meijer_g requires finite z > 0");
    const detail::Abscissa ab = detail::choose_abscissa(spec);
    const detail::MellinBarnes mb{spec, std::log(z)};
    const double delta = spec.m + spec.n - 0.5 * (spec.p + spec.q);

    MeijerContour contour = opt.contour;
    if (contour == MeijerContour::automatic)
        contour = delta > 0.0 ? MeijerContour::vertical : MeijerContour::loop;
    if (contour == MeijerContour::vertical) {
        if (!(delta > 0.0))
            throw DomainError("vertical Mellin-Barnes contour requires m + n > (p + q) / 2");
        return detail::vertical_line(mb, ab.c, opt.rel_tol);
    }
    bool right = spec.q > spec.p || (spec.q == spec.p && z < 1.0);
    if (spec.q == spec.p && z == 1.0)
        throw DomainError("loop contour is undefined for p = q at z = 1");
    return detail::loop_contour(mb, ab.c, opt.loop_height, right, opt.rel_tol);
}

}  // namespace fadekit::specfun
