#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <utility>
#include <vector>

#include "apnum/grid.hpp"
#include "apnum/semigroup.hpp"

namespace apnum {

// ---------------------------------------------------------------------------
// Delay evolution systems  x'(t) = A x(t) + F(t, x(t), x(t - tau(t)))  with a
// diagonal stable generator, and the whole-line integral operator
//     (Psi x)(t) = int_{-inf}^{t} T(t-s) F(s, x(s), x(s - tau(s))) ds
// whose unique fixed point is the bounded almost periodic mild solution when
// kappa = N (L1 + L2) / lambda < 1.

/// Nonlinearity F(t, u, v) on coefficient vectors. Implementations must be
/// pure; the solver evaluates them concurrently.
class Nonlinearity {
public:
    virtual ~Nonlinearity() = default;
    virtual std::size_t dim() const = 0;
    virtual void eval(double t, std::span<const double> u, std::span<const double> v,
                      std::span<double> out) const = 0;
    /// Largest angular frequency of the explicit time dependence, when known;
    /// feeds the automatic quadrature-step choice.
    virtual double max_trig_frequency() const { return 0.0; }
};

/// F given as FnSpec components over t, (u i), (v i).
class ExprNonlinearity final : public Nonlinearity {
public:
    explicit ExprNonlinearity(FnSpec spec) : spec_(std::move(spec)) {}
    std::size_t dim() const override { return spec_.dim(); }
    void eval(double t, std::span<const double> u, std::span<const double> v,
              std::span<double> out) const override {
        spec_.eval_state(t, u, v, out);
    }
    double max_trig_frequency() const override { return spec_.max_trig_frequency(); }
    const FnSpec& spec() const { return spec_; }

private:
    FnSpec spec_;
};

struct DelaySystem {
    SemigroupSpec semigroup;
    std::shared_ptr<const Nonlinearity> F;
    FnSpec tau;           // scalar delay t -> tau(t), values in (0, tau_bar]
    double tau_bar = 0.0; // declared sup of tau
    double L1 = 0.0;      // Lipschitz constant in the undelayed argument
    double L2 = 0.0;      // Lipschitz constant in the delayed argument

    std::size_t dim() const { return semigroup.dimension(); }

    /// Probes tau on a dense grid (positivity and the tau_bar bound are hard
    /// requirements). When require_zero_at_origin is set, additionally checks
    /// F(t,0,0) = 0; state-independent forcings legitimately violate it.
    void validate(bool require_zero_at_origin = false) const;
};

struct SolveConfig {
    TimeGrid grid;                 // solution window
    double history_horizon = 0.0;  // H; 0 = choose from the tail bound
    double quad_step = 0.0;        // 0 = auto (stiffness- and period-resolving)
    double tol = 1e-8;
    std::size_t max_iter = 64;
};

/// kappa = N (L1 + L2) / lambda. Throws hypothesis_violation carrying kappa
/// when kappa >= 1 (the fixed-point argument does not apply).
double kappa_check(double N, double lambda, double L1, double L2);

/// One application of the truncated operator on cfg.grid: for each output t,
/// composite Simpson of T(t-s) F(s, x(s), x(s-tau(s))) over s in [t-H, t].
/// x must cover [grid.t_min - H - tau_bar, grid.t_max] on an aligned grid.
SampledPath apply_Psi(const DelaySystem& sys, const SampledPath& x, const SolveConfig& cfg);

struct SolveReport {
    SampledPath solution;           // restricted to cfg.grid
    SampledPath extended_solution;  // includes the history band
    std::size_t iterations = 0;
    std::vector<double> residuals;        // sup |x_{k+1} - x_k| per iteration
    std::vector<double> empirical_ratios; // residual_{k+1} / residual_k
    double kappa = 0.0;
    bool converged = false;
    double H_effective = 0.0;
    double quad_step_effective = 0.0;
    /// Geometric a-priori bound on iterations after the first, from the first
    /// residual; converged runs satisfy iterations - 1 <= this.
    std::size_t apriori_iteration_bound = 0;
};

/// Picard iteration x_{k+1} = Psi x_k starting from x0 (resampled onto the
/// internally extended grid). Iterates are computed on the full extended
/// window [t_min - H - tau_bar, t_max]; at its bottom edge the integration
/// window is clipped to the available data, which perturbs the iterate only
/// by O(e^{-lambda (H + tau_bar)}) on the solution window -- inside the
/// declared truncation budget. Throws hypothesis_violation (kappa >= 1) and
/// non_convergence (max_iter hit, residual trace attached).
SolveReport picard_solve(const DelaySystem& sys, const SampledPath& x0, const SolveConfig& cfg);

/// Zero initial guess, the canonical starting element.
SolveReport picard_solve(const DelaySystem& sys, const SolveConfig& cfg);

struct ContractionStats {
    std::vector<double> ratios;  // per pair, skipped pairs omitted
    double max = 0.0;
    double mean = 0.0;
    std::size_t skipped = 0;  // identical pairs (zero denominator)
};

/// ratio = sup|Psi x - Psi y| on cfg.grid over sup|x - y| on the extended
/// grid, per pair.
ContractionStats empirical_contraction(const DelaySystem& sys,
                                       const std::vector<std::pair<SampledPath, SampledPath>>& pairs,
                                       const SolveConfig& cfg);

struct SampleBox {
    double t_lo = -50.0, t_hi = 50.0;
    double coord_lo = -1.0, coord_hi = 1.0;
};

/// Sampled lower bound on the Lipschitz constants of F in its two state
/// slots: max difference quotient over random (t, u, u', v) draws, half of
/// them tight directional perturbations.
std::pair<double, double> estimate_lipschitz(const Nonlinearity& F, const SampleBox& box,
                                             std::size_t n_samples, std::uint64_t seed);

}  // namespace apnum
