#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "fadekit/error.hpp"

namespace fadekit::numerics {

/// Tolerances for adaptive quadrature. The target is
/// |result - exact| <= max(abs_tol, rel_tol * |exact|).
struct QuadSpec {
    double rel_tol = 1e-9;
    double abs_tol = 1e-12;
    int max_subdivisions = 2000;
};

struct QuadResult {
    double value = 0.0;
    double error = 0.0;
    int subdivisions = 0;
};

/// Neumaier's variant of Kahan summation.
class CompensatedSum {
public:
    void add(double x) noexcept {
        const double t = sum_ + x;
        if (std::abs(sum_) >= std::abs(x))
            comp_ += (sum_ - t) + x;
        else
            comp_ += (x - t) + sum_;
        sum_ = t;
    }
    CompensatedSum& operator+=(double x) noexcept {
        add(x);
        return *this;
    }
    double value() const noexcept { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

namespace detail {

// 15-point Kronrod rule and its embedded 7-point Gauss rule on [-1, 1].
// Entries 1, 3, 5 and 7 of the node table are the Gauss nodes.
inline constexpr double kronrod_x[8] = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr double kronrod_w[8] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr double gauss_w[4] = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Segment {
    double lo;
    double hi;
    double value;
    double error;
    double magnitude;
};

inline bool operator<(const Segment& x, const Segment& y) { return x.error < y.error; }

template <class F>
double checked_call(F& f, double x) {
    const double v = f(x);
    if (!std::isfinite(v)) {
        std::ostringstream msg;
        msg.precision(17);
        msg << "integrand returned " << v << " at x = " << x;
        throw NonFiniteError(msg.str());
    }
    return v;
}

template <class F>
Segment gauss_kronrod15(F& f, double lo, double hi) {
    const double center = 0.5 * (lo + hi);
    const double half = 0.5 * (hi - lo);
    const double fc = checked_call(f, center);
    double resk = kronrod_w[7] * fc;
    double resg = gauss_w[3] * fc;
    double resabs = std::abs(resk);
    double fv1[7];
    double fv2[7];
    for (int j = 0; j < 7; ++j) {
        const double dx = half * kronrod_x[j];
        const double f1 = checked_call(f, center - dx);
        const double f2 = checked_call(f, center + dx);
        fv1[j] = f1;
        fv2[j] = f2;
        resk += kronrod_w[j] * (f1 + f2);
        resabs += kronrod_w[j] * (std::abs(f1) + std::abs(f2));
        if (j % 2 == 1) resg += gauss_w[j / 2] * (f1 + f2);
    }
    const double mean = 0.5 * resk;
    double resasc = kronrod_w[7] * std::abs(fc - mean);
    for (int j = 0; j < 7; ++j)
        resasc += kronrod_w[j] * (std::abs(fv1[j] - mean) + std::abs(fv2[j] - mean));

    const double ahalf = std::abs(half);
    resabs *= ahalf;
    resasc *= ahalf;
    double err = std::abs((resk - resg) * half);
    if (resasc != 0.0 && err != 0.0)
        err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
    constexpr double eps = std::numeric_limits<double>::epsilon();
    constexpr double tiny = std::numeric_limits<double>::min();
    if (resabs > tiny / (50.0 * eps)) err = std::max(50.0 * eps * resabs, err);
    return {lo, hi, resk * half, err, resabs};
}

inline void check_spec(const QuadSpec& spec) {
    if (!(spec.rel_tol > 0.0) || !(spec.abs_tol > 0.0) || spec.max_subdivisions < 1)
        throw DomainError("QuadSpec requires positive tolerances and max_subdivisions >= 1");
}

// Globally adaptive bisection on a finite interval.
template <class F>
QuadResult adaptive(F& f, double lo, double hi, const QuadSpec& spec) {
    std::vector<Segment> heap;
    std::vector<Segment> frozen;
    heap.push_back(gauss_kronrod15(f, lo, hi));
    double value = heap.front().value;
    double error = heap.front().error;
    int subdivisions = 0;

    while (!heap.empty()) {
        const double tol = std::max(spec.abs_tol, spec.rel_tol * std::abs(value));
        if (error <= tol) break;
        if (subdivisions >= spec.max_subdivisions) {
            std::ostringstream msg;
            msg.precision(6);
            msg << "adaptive quadrature on [" << lo << ", " << hi << "] stopped after "
                << subdivisions << " subdivisions with error estimate " << error
                << " above tolerance " << tol;
            throw ConvergenceError(msg.str());
        }
        std::pop_heap(heap.begin(), heap.end());
        const Segment worst = heap.back();
        heap.pop_back();
        const double mid = 0.5 * (worst.lo + worst.hi);
        if (!(mid > worst.lo && mid < worst.hi)) {
            frozen.push_back(worst);
            continue;
        }
        const Segment left = gauss_kronrod15(f, worst.lo, mid);
        const Segment right = gauss_kronrod15(f, mid, worst.hi);
        value += left.value + right.value - worst.value;
        error += left.error + right.error - worst.error;
        heap.push_back(left);
        std::push_heap(heap.begin(), heap.end());
        heap.push_back(right);
        std::push_heap(heap.begin(), heap.end());
        ++subdivisions;
    }

    CompensatedSum v;
    double e = 0.0;
    for (const auto& s : heap) {
        v += s.value;
        e += s.error;
    }
    for (const auto& s : frozen) {
        v += s.value;
        e += s.error;
    }
    return {v.value(), e, subdivisions};
}

}  // namespace detail

/// Integrates f over [lo, hi]. Either bound may be infinite; an infinite
/// range is folded onto [0, 1) with x = lo + t / (1 - t).
template <class F>
QuadResult integrate(F&& f, double lo, double hi, const QuadSpec& spec = {}) {
    detail::check_spec(spec);
    if (std::isnan(lo) || std::isnan(hi)) throw DomainError("integration bound is NaN");
    if (lo == hi) return {};
    if (lo > hi) {
        QuadResult r = integrate(f, hi, lo, spec);
        r.value = -r.value;
        return r;
    }
    constexpr double inf = std::numeric_limits<double>::infinity();
    if (lo == -inf && hi == inf) {
        const QuadResult left = integrate(f, -inf, 0.0, spec);
        const QuadResult right = integrate(f, 0.0, inf, spec);
        return {left.value + right.value, left.error + right.error,
                left.subdivisions + right.subdivisions};
    }
    if (hi == inf) {
        auto g = [&f, lo](double t) {
            const double s = 1.0 - t;
            return f(lo + t / s) / (s * s);
        };
        return detail::adaptive(g, 0.0, 1.0, spec);
    }
    if (lo == -inf) {
        auto g = [&f, hi](double t) {
            const double s = 1.0 - t;
            return f(hi - t / s) / (s * s);
        };
        return detail::adaptive(g, 0.0, 1.0, spec);
    }
    return detail::adaptive(f, lo, hi, spec);
}

/// Sum of integrals over consecutive pieces [points[i], points[i+1]].
template <class F>
QuadResult integrate_over(F&& f, std::span<const double> points, const QuadSpec& spec = {}) {
    QuadResult total;
    CompensatedSum sum;
    for (std::size_t i = 0; i + 1 < points.size(); ++i) {
        const QuadResult piece = integrate(f, points[i], points[i + 1], spec);
        sum += piece.value;
        total.error += piece.error;
        total.subdivisions += piece.subdivisions;
    }
    total.value = sum.value();
    return total;
}

/// Integrates g over [lo, hi] with 0 <= lo < hi <= inf in the variable
/// t = ln x. The pivots are extra breakpoints in x (ignored when outside
/// the range). g must decay fast enough at both ends for the integral to
/// exist; values at x = 0 or x = inf after exponentiation are taken as 0.
template <class G>
QuadResult integrate_log_scale(G&& g, double lo, double hi, std::span<const double> pivots,
                               const QuadSpec& spec = {}) {
    if (!(lo >= 0.0) || !(hi > lo))
        throw DomainError("integrate_log_scale requires 0 <= lo < hi");
    constexpr double inf = std::numeric_limits<double>::infinity();
    std::vector<double> t;
    t.reserve(pivots.size() + 2);
    t.push_back(lo == 0.0 ? -inf : std::log(lo));
    const double t_hi = hi == inf ? inf : std::log(hi);
    std::vector<double> inner;
    for (double p : pivots)
        if (p > lo && p < hi && std::isfinite(p)) inner.push_back(std::log(p));
    std::sort(inner.begin(), inner.end());
    for (double v : inner)
        if (v - t.back() > 1e-9) t.push_back(v);
    if (t_hi - t.back() <= 1e-9 && t.size() > 1) t.pop_back();
    t.push_back(t_hi);

    auto h = [&g](double u) {
        const double x = std::exp(u);
        if (x == 0.0 || x == inf) return 0.0;
        return g(x) * x;
    };
    return integrate_over(h, t, spec);
}

struct FixedPointResult {
    double value = 0.0;
    double residual = 0.0;
    int iterations = 0;
};

/// Damped fixed-point iteration x <- x + lambda (xi(x) - x). The damping
/// factor starts at 1, is halved whenever a step would increase the
/// residual |xi(x) - x| and doubled (up to 1) after each accepted step.
/// Stops once the residual is at most tol.
template <class Xi>
FixedPointResult fixed_point(Xi&& xi, double x0, double tol = 1e-10, int max_iterations = 500) {
    if (!(tol > 0.0)) throw DomainError("fixed_point tolerance must be positive");
    double x = x0;
    double fx = xi(x);
    double r = std::abs(fx - x);
    double lambda = 1.0;
    for (int it = 0; it < max_iterations; ++it) {
        if (r <= tol) return {x, r, it};
        const double xn = x + lambda * (fx - x);
        const double fxn = xi(xn);
        const double rn = std::abs(fxn - xn);
        if (!(rn < r) && lambda > 1.0 / 1024.0) {
            lambda *= 0.5;
            continue;
        }
        x = xn;
        fx = fxn;
        r = rn;
        lambda = std::min(1.0, 2.0 * lambda);
    }
    if (r <= tol) return {x, r, max_iterations};
    std::ostringstream msg;
    msg.precision(6);
    msg << "fixed-point iteration did not converge in " << max_iterations
        << " iterations (last residual " << r << ")";
    throw ConvergenceError(msg.str());
}

}  // namespace fadekit::numerics
