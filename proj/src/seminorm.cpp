#include "apnum/seminorm.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "apnum/util.hpp"

namespace apnum {

void SeminormConfig::validate() const {
    if (!(flat >= 1.0)) throw std::invalid_argument("SeminormConfig: flat must be >= 1");
    if (!(T0 > 0.0)) throw std::invalid_argument("SeminormConfig: T0 must be positive");
    if (!(growth > 1.0)) throw std::invalid_argument("SeminormConfig: growth must be > 1");
    if (tail_window < 1 || n_sweeps < tail_window)
        throw std::invalid_argument("SeminormConfig: need n_sweeps >= tail_window >= 1");
    if (quad_step < 0.0) throw std::invalid_argument("SeminormConfig: quad_step must be >= 0");
    if (!(rel_tol > 0.0)) throw std::invalid_argument("SeminormConfig: rel_tol must be positive");
}

double SeminormConfig::final_horizon() const {
    return T0 * std::pow(growth, static_cast<double>(n_sweeps - 1));
}

double SeminormConfig::resolve_quad_step(const TimeFunction& f) const {
    if (quad_step > 0.0) return quad_step;
    double wmax = f.max_trig_frequency();
    if (wmax > 0.0) return 2.0 * std::numbers::pi / wmax / 64.0;
    return 0.01;
}

namespace {

// Composite Simpson over [a, b] with an even interval count divisible by 4 so
// the midpoint (a kink site for |t|-type integrands on symmetric windows)
// always falls on a panel boundary.
template <typename G>
double simpson(G&& g, double a, double b, double max_step) {
    double len = b - a;
    std::size_t quarters = static_cast<std::size_t>(std::ceil(len / (4.0 * max_step)));
    quarters = std::max<std::size_t>(quarters, 1);
    std::size_t n = 4 * quarters;
    double h = len / static_cast<double>(n);
    KahanSum sum;
    sum.add(g(a));
    sum.add(g(b));
    for (std::size_t i = 1; i < n; ++i) {
        double t = a + static_cast<double>(i) * h;
        sum.add((i % 2 == 1 ? 4.0 : 2.0) * g(t));
    }
    return sum.value() * h / 3.0;
}

double norm_of(std::span<const double> v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

double window_mean_power(const TimeFunction& f, double a, double b, double flat,
                         double quad_step) {
    std::size_t d = f.dim();
    std::vector<double> buf(d);
    auto integrand = [&](double t) {
        f.eval(t, buf);
        double n = norm_of(buf);
        return flat == 2.0 ? n * n : std::pow(n, flat);
    };
    return simpson(integrand, a, b, quad_step) / (b - a);
}

void check_coverage(const TimeFunction& f, double a, double b) {
    auto dom = f.domain();
    if (!dom) return;
    double slack = 1e-9 * std::max({1.0, std::fabs(a), std::fabs(b)});
    if (dom->first > a + slack || dom->second < b - slack)
        throw std::out_of_range("seminorm: function domain does not cover the requested window");
}

SeminormEstimate finish_estimate(std::vector<std::pair<double, double>> per_T,
                                 const SeminormConfig& cfg) {
    SeminormEstimate est;
    est.per_T = std::move(per_T);
    std::size_t n = est.per_T.size();
    std::size_t tail = std::min(cfg.tail_window, n);
    double lo = est.per_T[n - tail].second;
    double hi = lo;
    for (std::size_t j = n - tail; j < n; ++j) {
        lo = std::min(lo, est.per_T[j].second);
        hi = std::max(hi, est.per_T[j].second);
    }
    est.limsup_estimate = hi;
    est.spread = hi - lo;
    est.converged = est.spread <= cfg.rel_tol * est.limsup_estimate;
    return est;
}

}  // namespace

double finite_window_seminorm(const TimeFunction& f, double T, const SeminormConfig& cfg) {
    cfg.validate();
    if (!(T > 0.0)) throw std::invalid_argument("finite_window_seminorm: T must be positive");
    check_coverage(f, -T, T);
    double h = cfg.resolve_quad_step(f);
    return std::pow(window_mean_power(f, -T, T, cfg.flat, h), 1.0 / cfg.flat);
}

double window_seminorm(const TimeFunction& f, double a, double b, const SeminormConfig& cfg) {
    cfg.validate();
    if (!(b > a)) throw std::invalid_argument("window_seminorm: empty window");
    check_coverage(f, a, b);
    double h = cfg.resolve_quad_step(f);
    return std::pow(window_mean_power(f, a, b, cfg.flat, h), 1.0 / cfg.flat);
}

SeminormEstimate besicovitch_seminorm(const TimeFunction& f, const SeminormConfig& cfg) {
    cfg.validate();
    std::vector<std::pair<double, double>> per_T;
    per_T.reserve(cfg.n_sweeps);
    for (std::size_t j = 0; j < cfg.n_sweeps; ++j) {
        double T = cfg.T0 * std::pow(cfg.growth, static_cast<double>(j));
        per_T.emplace_back(T, finite_window_seminorm(f, T, cfg));
    }
    return finish_estimate(std::move(per_T), cfg);
}

SeminormEstimate besicovitch_seminorm_on(const TimeFunction& f, double a, double b,
                                         const SeminormConfig& cfg) {
    cfg.validate();
    if (!(b > a)) throw std::invalid_argument("besicovitch_seminorm_on: empty window");
    check_coverage(f, a, b);
    double c = 0.5 * (a + b);
    double R_final = 0.5 * (b - a);
    std::vector<std::pair<double, double>> per_T;
    per_T.reserve(cfg.n_sweeps);
    for (std::size_t j = 0; j < cfg.n_sweeps; ++j) {
        double R = R_final * std::pow(cfg.growth, -static_cast<double>(cfg.n_sweeps - 1 - j));
        per_T.emplace_back(R, window_seminorm(f, c - R, c + R, cfg));
    }
    return finish_estimate(std::move(per_T), cfg);
}

double sup_norm(const SampledPath& p) {
    double m = 0.0;
    for (std::size_t i = 0; i < p.grid().n_points(); ++i)
        m = std::max(m, norm_of(p.at_index(i)));
    return m;
}

std::string SeminormEstimate::to_csv() const {
    std::string out = "T,value\n";
    for (const auto& [T, v] : per_T)
        out += format_double(T) + "," + format_double(v) + "\n";
    out += "# limsup_estimate=" + format_double(limsup_estimate) +
           " spread=" + format_double(spread) + " converged=" + (converged ? "true" : "false") +
           "\n";
    return out;
}

FourierCoefficient fourier_bohr_coefficient(const TimeFunction& f, double lambda,
                                            const SeminormConfig& cfg) {
    cfg.validate();
    if (f.dim() != 1)
        throw std::invalid_argument("fourier_bohr_coefficient: scalar functions only");
    double h = cfg.resolve_quad_step(f);
    // The demodulated integrand oscillates at |omega - lambda| up to
    // |omega| + |lambda|; make sure lambda itself is resolved too.
    if (lambda != 0.0)
        h = std::min(h, 2.0 * std::numbers::pi / std::fabs(lambda) / 64.0);

    FourierCoefficient out;
    double buf[1];
    for (std::size_t j = 0; j < cfg.n_sweeps; ++j) {
        double T = cfg.T0 * std::pow(cfg.growth, static_cast<double>(j));
        check_coverage(f, -T, T);
        auto re = [&](double t) {
            f.eval(t, buf);
            return buf[0] * std::cos(lambda * t);
        };
        auto im = [&](double t) {
            f.eval(t, buf);
            return -buf[0] * std::sin(lambda * t);
        };
        std::complex<double> avg(simpson(re, -T, T, h) / (2.0 * T),
                                 simpson(im, -T, T, h) / (2.0 * T));
        out.per_T.emplace_back(T, avg);
    }
    out.value = out.per_T.back().second;

    std::size_t n = out.per_T.size();
    std::size_t tail = std::min(cfg.tail_window, n);
    for (std::size_t i = n - tail; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            out.spread = std::max(out.spread, std::abs(out.per_T[i].second - out.per_T[j].second));

    double T_final = out.per_T.back().first;
    out.resolution = 2.0 * std::numbers::pi / T_final;
    for (double w : f.trig_frequencies()) {
        double gap = std::fabs(w - lambda);
        if (gap > 0.0 && gap < out.resolution) out.resolvable = false;
    }
    return out;
}

}  // namespace apnum
