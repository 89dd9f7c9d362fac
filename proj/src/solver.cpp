#include "apnum/solver.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "apnum/errors.hpp"
#include "apnum/parallel.hpp"
#include "apnum/random.hpp"
#include "apnum/seminorm.hpp"
#include "apnum/util.hpp"

namespace apnum {

namespace {

double vec_norm(std::span<const double> v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

double sup_diff(const SampledPath& a, const SampledPath& b) {
    if (a.dim() != b.dim() || !(a.grid() == b.grid()))
        throw std::invalid_argument("sup_diff: paths must share grid and dimension");
    double m = 0.0;
    std::size_t d = a.dim();
    const auto& da = a.data();
    const auto& db = b.data();
    for (std::size_t i = 0; i < a.grid().n_points(); ++i) {
        double s = 0.0;
        for (std::size_t k = 0; k < d; ++k) s += sqr(da[i * d + k] - db[i * d + k]);
        m = std::max(m, std::sqrt(s));
    }
    return m;
}

// Discretization shared by the strict operator and the solver's extended
// iteration. Everything is index-based on a fine grid that refines the path
// grid by n_sub, so quadrature nodes coincide with precomputed F samples.
struct PsiPlan {
    std::size_t n_sub = 1;      // fine subdivisions per grid step
    double h = 0.0;             // fine step
    std::size_t H_steps = 0;    // window length in grid steps
    std::size_t W = 0;          // window length in fine intervals (even)
    std::size_t tau_steps = 0;  // delay bound in grid steps
    double H_eff = 0.0;
};

PsiPlan make_plan(const DelaySystem& sys, double grid_step, double H, double quad_step) {
    PsiPlan plan;
    double qs = quad_step;
    if (qs <= 0.0) {
        // Resolve both the stiffest semigroup mode and the fastest explicit
        // oscillation of F / tau.
        qs = grid_step;
        double mu_max = 0.0;
        for (double mu : sys.semigroup.eigenvalues) mu_max = std::max(mu_max, std::fabs(mu));
        if (mu_max > 0.0) qs = std::min(qs, 0.5 / mu_max);
        double wmax = std::max(sys.F->max_trig_frequency(), sys.tau.max_trig_frequency());
        if (wmax > 0.0) qs = std::min(qs, 2.0 * std::numbers::pi / wmax / 64.0);
    }
    plan.n_sub =
        std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(grid_step / qs - 1e-9)));
    plan.h = grid_step / static_cast<double>(plan.n_sub);
    plan.H_steps =
        std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(H / grid_step - 1e-9)));
    if ((plan.H_steps * plan.n_sub) % 2 != 0) plan.H_steps += 1;  // Simpson: even interval count
    plan.W = plan.H_steps * plan.n_sub;
    plan.tau_steps = static_cast<std::size_t>(std::ceil(sys.tau_bar / grid_step - 1e-9));
    plan.H_eff = static_cast<double>(plan.H_steps) * grid_step;
    return plan;
}

// F along the fine grid refining x.grid, from fine index i0 on. Earlier nodes
// lack delayed-argument coverage and are never integrated.
std::vector<double> precompute_F(const DelaySystem& sys, const SampledPath& x,
                                 const PsiPlan& plan, std::size_t i0) {
    const std::size_t d = sys.dim();
    const TimeGrid& g = x.grid();
    const std::size_t n_fine = (g.n_points() - 1) * plan.n_sub + 1;
    std::vector<double> F(n_fine * d, 0.0);
    if (i0 >= n_fine) return F;

    parallel_for(n_fine - i0, [&](std::size_t rel) {
        thread_local std::vector<double> u, v, tau_val;
        u.resize(d);
        v.resize(d);
        tau_val.resize(1);
        std::size_t i = i0 + rel;
        double s;
        if (i % plan.n_sub == 0) {
            s = g.point(i / plan.n_sub);  // exact node
            auto row = x.at_index(i / plan.n_sub);
            std::copy(row.begin(), row.end(), u.begin());
        } else {
            s = g.t_min() + static_cast<double>(i) * plan.h;
            x.eval_at(s, u);
        }
        sys.tau.eval(s, tau_val);
        x.eval_at(s - tau_val[0], v);
        sys.F->eval(s, u, v, {F.data() + i * d, d});
    });
    return F;
}

// Kernel table K[m*d + k] = exp(mu_k * m * h), m = 0..W.
std::vector<double> kernel_table(const DelaySystem& sys, const PsiPlan& plan) {
    const std::size_t d = sys.dim();
    std::vector<double> K((plan.W + 1) * d);
    for (std::size_t m = 0; m <= plan.W; ++m) {
        double mh = static_cast<double>(m) * plan.h;
        for (std::size_t k = 0; k < d; ++k)
            K[m * d + k] = std::exp(sys.semigroup.eigenvalues[k] * mh);
    }
    return K;
}

// Core quadrature. Output row j integrates over the fine window ending at
// fine index (offset_steps + j) * n_sub. With clip set, windows shrink at the
// bottom of the data instead of failing; callers without clip must have
// verified coverage already.
void psi_rows(const DelaySystem& sys, const SampledPath& x, const PsiPlan& plan,
              std::size_t offset_steps, std::size_t n_out, std::size_t i_min, bool clip,
              std::vector<double>& out) {
    const std::size_t d = sys.dim();
    const std::vector<double> F = precompute_F(sys, x, plan, i_min);
    const std::vector<double> K = kernel_table(sys, plan);
    out.assign(n_out * d, 0.0);

    parallel_for(n_out, [&](std::size_t j) {
        const std::size_t J = (offset_steps + j) * plan.n_sub;
        std::size_t lo;
        if (J >= plan.W + i_min) {
            lo = J - plan.W;
        } else {
            if (!clip || i_min >= J) return;  // row stays zero
            lo = i_min;
            if ((J - lo) % 2 != 0) ++lo;
            if (lo >= J) return;
        }
        double* row = out.data() + j * d;
        for (std::size_t i = lo; i <= J; ++i) {
            double w = (i == lo || i == J) ? 1.0 : ((i - lo) % 2 == 1 ? 4.0 : 2.0);
            const double* kern = K.data() + (J - i) * d;
            const double* f = F.data() + i * d;
            for (std::size_t k = 0; k < d; ++k) row[k] += w * kern[k] * f[k];
        }
        double scale = plan.h / 3.0;
        for (std::size_t k = 0; k < d; ++k) row[k] *= scale;
    });
}

std::size_t aligned_offset(const TimeGrid& inner, const TimeGrid& outer) {
    if (std::fabs(inner.step() - outer.step()) > 1e-12 * std::max(1.0, std::fabs(outer.step())))
        throw std::invalid_argument("apply_Psi: input and output grids must share the step");
    double raw = (outer.t_min() - inner.t_min()) / inner.step();
    double rounded = std::round(raw);
    if (std::fabs(raw - rounded) > 1e-6 || rounded < 0.0)
        throw std::invalid_argument("apply_Psi: input grid must align with the output grid");
    return static_cast<std::size_t>(rounded);
}

double probe_forcing_sup(const DelaySystem& sys, const TimeGrid& grid) {
    std::size_t d = sys.dim();
    std::vector<double> zero(d, 0.0), out(d);
    double sup = 0.0;
    const int n = 512;
    double lo = grid.t_min() - 2.0 * sys.tau_bar;
    double hi = grid.t_max();
    for (int i = 0; i <= n; ++i) {
        sys.F->eval(lo + (hi - lo) * i / n, zero, zero, out);
        sup = std::max(sup, vec_norm(out));
    }
    return sup;
}

double auto_horizon(const DelaySystem& sys, const StabilityCertificate& cert, double kappa,
                    double sup_F0, double tol) {
    // Truncation tail: N e^{-lambda H} M / lambda <= tol/10 with M an a-priori
    // bound on |F| along iterates; the fixed point obeys
    // sup|x*| <= N sup_F0 / (lambda (1 - kappa)).
    double L = sys.L1 + sys.L2;
    double bound = cert.N * sup_F0 / (cert.lambda * (1.0 - kappa));
    double M = sup_F0 + L * bound;
    double H = 2.0 / cert.lambda;
    if (M > 0.0)
        H = std::max(H, std::log(10.0 * cert.N * M / (cert.lambda * tol)) / cert.lambda);
    return H;
}

// Depth below t_min - H - tau_bar needed so that the clipped-window boundary
// cannot pollute the solution window. Boundary error travels upward through
// two channels: the semigroup kernel (rate lambda per unit) and the delayed
// argument (one tau_bar of depth per iteration at factor kappa, i.e. rate
// ln(1/kappa)/tau_bar). The slower rate governs.
double boundary_depth(const DelaySystem& sys, const StabilityCertificate& cert, double kappa,
                      double sup_F0, double sup_working, double tol) {
    double L = sys.L1 + sys.L2;
    if (L <= 0.0) return 0.0;  // no state feedback, the boundary cannot propagate
    double C = 2.0 * (sup_working + cert.N * sup_F0 / cert.lambda) / (1.0 - kappa);
    if (C <= 0.0) return 0.0;
    double rate = cert.lambda;
    if (kappa > 0.0 && sys.tau_bar > 0.0)
        rate = std::min(rate, std::log(1.0 / kappa) / sys.tau_bar);
    return sys.tau_bar + std::log(10.0 * C / tol) / rate;
}

}  // namespace

void DelaySystem::validate(bool require_zero_at_origin) const {
    if (!F) throw std::invalid_argument("DelaySystem: missing nonlinearity");
    if (semigroup.dimension() == 0) throw std::invalid_argument("DelaySystem: empty semigroup");
    if (F->dim() != semigroup.dimension())
        throw std::invalid_argument("DelaySystem: nonlinearity dimension != state dimension");
    for (double mu : semigroup.eigenvalues)
        if (mu >= 0.0) throw hypothesis_violation("DelaySystem: semigroup eigenvalue >= 0", mu);
    if (tau.dim() != 1 || tau.uses_state())
        throw std::invalid_argument("DelaySystem: tau must be a scalar function of time");
    if (!(tau_bar > 0.0)) throw std::invalid_argument("DelaySystem: tau_bar must be positive");
    if (L1 < 0.0 || L2 < 0.0)
        throw std::invalid_argument("DelaySystem: Lipschitz constants must be >= 0");

    // Dense delay probe: a wide sweep plus extra resolution near the origin
    // where decaying primitives peak.
    double tau_buf[1];
    auto probe = [&](double t) {
        tau.eval(t, {tau_buf, 1});
        if (!(tau_buf[0] > 0.0))
            throw std::invalid_argument("DelaySystem: tau(t) <= 0 at a probe point");
        if (tau_buf[0] > tau_bar * (1.0 + 1e-12))
            throw std::invalid_argument("DelaySystem: tau(t) exceeds the declared tau_bar");
    };
    for (int i = 0; i <= 4096; ++i) probe(-1000.0 + i * (2000.0 / 4096.0));
    for (int i = 0; i <= 512; ++i) probe(-2.0 + i * (4.0 / 512.0));

    if (require_zero_at_origin) {
        std::size_t d = semigroup.dimension();
        std::vector<double> zero(d, 0.0), out(d);
        for (int i = 0; i <= 1024; ++i) {
            F->eval(-200.0 + i * (400.0 / 1024.0), zero, zero, out);
            if (vec_norm(out) > 1e-12)
                throw std::invalid_argument("DelaySystem: F(t,0,0) != 0 on the probe grid");
        }
    }
}

double kappa_check(double N, double lambda, double L1, double L2) {
    if (!(N >= 1.0)) throw std::invalid_argument("kappa_check: N must be >= 1");
    if (!(lambda > 0.0)) throw std::invalid_argument("kappa_check: lambda must be positive");
    if (L1 < 0.0 || L2 < 0.0)
        throw std::invalid_argument("kappa_check: Lipschitz constants must be >= 0");
    double kappa = N * (L1 + L2) / lambda;
    if (kappa >= 1.0) {
        std::ostringstream msg;
        msg << "kappa_check: kappa = " << kappa << " >= 1, contraction hypothesis fails";
        throw hypothesis_violation(msg.str(), kappa);
    }
    return kappa;
}

SampledPath apply_Psi(const DelaySystem& sys, const SampledPath& x, const SolveConfig& cfg) {
    sys.validate();
    if (x.dim() != sys.dim()) throw std::invalid_argument("apply_Psi: path dimension mismatch");
    if (!(cfg.history_horizon > 0.0))
        throw std::invalid_argument("apply_Psi: history_horizon must be set explicitly");

    PsiPlan plan = make_plan(sys, cfg.grid.step(), cfg.history_horizon, cfg.quad_step);
    std::size_t offset = aligned_offset(x.grid(), cfg.grid);

    if (offset < plan.H_steps + plan.tau_steps)
        throw std::out_of_range("apply_Psi: input path does not reach t_min - H - tau_bar");
    if (offset + cfg.grid.n_points() > x.grid().n_points())
        throw std::out_of_range("apply_Psi: input path ends before the output window");

    std::vector<double> rows;
    psi_rows(sys, x, plan, offset, cfg.grid.n_points(), plan.tau_steps * plan.n_sub,
             /*clip=*/false, rows);
    return SampledPath(cfg.grid, sys.dim(), std::move(rows), x.scheme());
}

namespace {

SolveReport picard_solve_impl(const DelaySystem& sys, const SampledPath* x0,
                              const SolveConfig& cfg) {
    sys.validate();
    StabilityCertificate cert = stability_certificate(sys.semigroup);
    double kappa = kappa_check(cert.N, cert.lambda, sys.L1, sys.L2);
    if (!(cfg.tol > 0.0)) throw std::invalid_argument("picard_solve: tol must be positive");
    if (cfg.max_iter == 0) throw std::invalid_argument("picard_solve: max_iter must be >= 1");

    const std::size_t d = sys.dim();
    if (x0 && x0->dim() != d) throw std::invalid_argument("picard_solve: x0 dimension mismatch");
    InterpScheme scheme = x0 ? x0->scheme() : InterpScheme::Cubic;
    const double step = cfg.grid.step();
    double sup_F0 = probe_forcing_sup(sys, cfg.grid);
    double sup_apriori = cert.N * sup_F0 / (cert.lambda * (1.0 - kappa));

    double H = cfg.history_horizon;
    double extra_depth = boundary_depth(sys, cert, kappa, sup_F0, sup_apriori, cfg.tol);
    std::size_t restarts = 0;
    while (true) {
        if (H <= 0.0) H = auto_horizon(sys, cert, kappa, sup_F0, cfg.tol);

        PsiPlan plan = make_plan(sys, cfg.grid.step(), H, cfg.quad_step);
        // History band: the integration window itself, plus whatever further
        // depth keeps the clipped bottom edge from reaching the window
        // through the delay channel.
        std::size_t depth = plan.H_steps + plan.tau_steps;
        double covered = static_cast<double>(depth) * step;
        if (extra_depth > covered)
            depth += static_cast<std::size_t>(std::ceil((extra_depth - covered) / step));

        const std::size_t ext_n = depth + cfg.grid.n_points();
        double ext_t_min = cfg.grid.t_min() - static_cast<double>(depth) * step;
        TimeGrid ext_grid(ext_t_min, ext_t_min + (static_cast<double>(ext_n - 1) + 0.5) * step,
                          step);

        // Initial iterate on the extended grid: zero by default, otherwise x0
        // resampled (eval_at throws if x0 does not cover the band).
        std::vector<double> data(ext_n * d, 0.0);
        if (x0)
            for (std::size_t i = 0; i < ext_n; ++i)
                x0->eval_at(ext_grid.point(i), {data.data() + i * d, d});
        SampledPath current(ext_grid, d, std::move(data), scheme);

        SolveReport report{SampledPath::zeros(cfg.grid, d, scheme),
                           SampledPath::zeros(ext_grid, d, scheme), 0, {}, {}, 0.0, false,
                           0.0,  0.0, 0};
        report.kappa = kappa;
        report.H_effective = plan.H_eff;
        report.quad_step_effective = plan.h;

        const std::size_t i_min = plan.tau_steps * plan.n_sub;
        bool plan_ok = true;
        std::vector<double> rows;
        for (std::size_t iter = 1; iter <= cfg.max_iter; ++iter) {
            psi_rows(sys, current, plan, 0, ext_n, i_min, /*clip=*/true, rows);
            SampledPath next(ext_grid, d, rows, scheme);
            double residual = sup_diff(next, current);
            report.residuals.push_back(residual);
            if (report.residuals.size() >= 2) {
                double prev = report.residuals[report.residuals.size() - 2];
                report.empirical_ratios.push_back(prev > 0.0 ? residual / prev : 0.0);
            }
            current = std::move(next);
            report.iterations = iter;

            // Config invariants against the refreshed working sup bound: the
            // truncation tail and the boundary depth must both stay within
            // the tol/10 budget. Re-derive and restart if not.
            double working_sup = sup_norm(current);
            double tail = cert.N * std::exp(-cert.lambda * plan.H_eff) * (sys.L1 + sys.L2) *
                          working_sup / cert.lambda;
            double depth_needed =
                boundary_depth(sys, cert, kappa, sup_F0, working_sup, cfg.tol);
            if ((tail > cfg.tol / 10.0 || depth_needed > static_cast<double>(depth) * step) &&
                restarts < 3) {
                if (tail > cfg.tol / 10.0)
                    H = std::log(10.0 * cert.N * (sys.L1 + sys.L2) * working_sup /
                                 (cert.lambda * cfg.tol)) /
                            cert.lambda +
                        1.0;
                extra_depth = std::max(extra_depth, 1.2 * depth_needed);
                ++restarts;
                plan_ok = false;
                break;
            }

            if (residual <= cfg.tol) {
                report.converged = true;
                break;
            }
        }
        if (!plan_ok) continue;

        if (!report.converged)
            throw non_convergence(
                "picard_solve: residual " + format_double(report.residuals.back()) +
                    " above tol after " + std::to_string(cfg.max_iter) + " iterations",
                report.residuals);

        double r1 = report.residuals.front();
        if (r1 <= cfg.tol || kappa <= 0.0) {
            report.apriori_iteration_bound = r1 <= cfg.tol ? 0 : 1;
        } else {
            double m = std::log(cfg.tol * (1.0 - kappa) / r1) / std::log(kappa);
            report.apriori_iteration_bound = static_cast<std::size_t>(std::max(0.0, std::ceil(m)));
        }

        // Restrict to the requested window by index; extended index depth + j
        // is the j-th window point.
        std::vector<double> window(cfg.grid.n_points() * d);
        for (std::size_t j = 0; j < cfg.grid.n_points(); ++j) {
            auto row = current.at_index(depth + j);
            std::copy(row.begin(), row.end(), window.begin() + j * d);
        }
        report.solution = SampledPath(cfg.grid, d, std::move(window), scheme);
        report.extended_solution = std::move(current);
        return report;
    }
}

}  // namespace

SolveReport picard_solve(const DelaySystem& sys, const SampledPath& x0, const SolveConfig& cfg) {
    return picard_solve_impl(sys, &x0, cfg);
}

SolveReport picard_solve(const DelaySystem& sys, const SolveConfig& cfg) {
    return picard_solve_impl(sys, nullptr, cfg);
}

ContractionStats empirical_contraction(
    const DelaySystem& sys, const std::vector<std::pair<SampledPath, SampledPath>>& pairs,
    const SolveConfig& cfg) {
    sys.validate();
    StabilityCertificate cert = stability_certificate(sys.semigroup);
    kappa_check(cert.N, cert.lambda, sys.L1, sys.L2);

    ContractionStats stats;
    for (const auto& [x, y] : pairs) {
        double denom = sup_diff(x, y);
        if (denom == 0.0) {
            ++stats.skipped;
            continue;
        }
        SampledPath px = apply_Psi(sys, x, cfg);
        SampledPath py = apply_Psi(sys, y, cfg);
        stats.ratios.push_back(sup_diff(px, py) / denom);
    }
    for (double r : stats.ratios) {
        stats.max = std::max(stats.max, r);
        stats.mean += r;
    }
    if (!stats.ratios.empty()) stats.mean /= static_cast<double>(stats.ratios.size());
    return stats;
}

std::pair<double, double> estimate_lipschitz(const Nonlinearity& F, const SampleBox& box,
                                             std::size_t n_samples, std::uint64_t seed) {
    if (n_samples < 2) throw std::invalid_argument("estimate_lipschitz: need n_samples >= 2");
    if (!(box.t_hi >= box.t_lo) || !(box.coord_hi > box.coord_lo))
        throw std::invalid_argument("estimate_lipschitz: malformed sample box");
    const std::size_t d = F.dim();
    Rng rng(seed);
    std::vector<double> u(d), u2(d), v(d), v2(d), out1(d), out2(d);

    auto draw = [&](std::vector<double>& w) {
        for (auto& x : w) x = rng.uniform(box.coord_lo, box.coord_hi);
    };
    auto quotient = [&](double t, const std::vector<double>& a1, const std::vector<double>& a2,
                        const std::vector<double>& b1, const std::vector<double>& b2,
                        const std::vector<double>& varied1, const std::vector<double>& varied2) {
        double denom = 0.0;
        for (std::size_t k = 0; k < d; ++k) denom += sqr(varied1[k] - varied2[k]);
        denom = std::sqrt(denom);
        if (denom == 0.0) return 0.0;
        F.eval(t, a1, b1, out1);
        F.eval(t, a2, b2, out2);
        double num = 0.0;
        for (std::size_t k = 0; k < d; ++k) num += sqr(out1[k] - out2[k]);
        return std::sqrt(num) / denom;
    };

    // Wide enough that the difference quotient is not dominated by rounding
    // cancellation, narrow enough to see local slopes.
    const double nudge = 1e-3 * (box.coord_hi - box.coord_lo);
    double L1 = 0.0, L2 = 0.0;
    for (std::size_t i = 0; i < n_samples; ++i) {
        double t = rng.uniform(box.t_lo, box.t_hi);
        bool tight = i % 2 == 1;  // alternate far pairs and directional nudges

        draw(u);
        draw(v);
        if (tight) {
            u2 = u;
            u2[rng.index(d)] += nudge * (rng.unit() < 0.5 ? -1.0 : 1.0);
        } else {
            draw(u2);
        }
        L1 = std::max(L1, quotient(t, u, u2, v, v, u, u2));

        draw(u);
        draw(v);
        if (tight) {
            v2 = v;
            v2[rng.index(d)] += nudge * (rng.unit() < 0.5 ? -1.0 : 1.0);
        } else {
            draw(v2);
        }
        L2 = std::max(L2, quotient(t, u, u, v, v2, v, v2));
    }
    return {L1, L2};
}

}  // namespace apnum
