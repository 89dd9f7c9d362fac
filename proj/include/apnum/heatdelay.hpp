#pragma once

#include <utility>

#include "apnum/almostperiod.hpp"
#include "apnum/grid.hpp"
#include "apnum/solver.hpp"

namespace apnum {

// ---------------------------------------------------------------------------
// Delayed heat equation on (0, pi) with Dirichlet ends, truncated to K sine
// modes:
//     u_t = u_xx + g(t)/60 * (sin u(t,x) + 3 sin u(t - tau(t), x)),
//     g(t) = cos t + 2 cos(sqrt5 t) + 4 e^{-|t|} - 3/(1+t^2),
//     tau(t) = 3 - sin(sqrt3 t).
// State vectors are coefficients in the orthonormal basis
// phi_k(x) = sqrt(2/pi) sin(kx); the generator is diagonal with mu_k = -k^2.
// The nonlinearity is handled pseudospectrally: synthesize on collocation
// nodes, apply sin pointwise, project back by the discrete sine transform.

struct HeatDelayConfig {
    std::size_t K = 8;              // sine modes
    std::size_t x_quad_points = 0;  // collocation nodes; 0 = 4K
    TimeGrid grid{0.0, 100.0, 0.01};
    SolveConfig solve{TimeGrid{0.0, 100.0, 0.01}, 40.0, 0.0, 1e-8, 64};

    std::size_t nodes() const { return x_quad_points == 0 ? 4 * K : x_quad_points; }
    void validate() const;
};

/// The scalar time factor g and the delay tau as FnSpecs.
FnSpec example_forcing_factor();
FnSpec example_delay();

/// Assembles the truncated system: eigenvalues {-1, -4, ..., -K^2},
/// tau_bar = 4, L1 = 1/6, L2 = 1/2.
DelaySystem build_example(const HeatDelayConfig& cfg);

/// One Nemytskii evaluation in coefficient space: synthesize u and v at the
/// collocation nodes, apply the pointwise nonlinearity at time t, project
/// back onto the first K modes.
Vec project_nonlinearity(std::span<const double> u_coeffs, std::span<const double> v_coeffs,
                         double t, const HeatDelayConfig& cfg);

/// A-posteriori check that a computed solution path admits
/// epsilon-translation numbers in scan_range. Scans the path directly and
/// additionally probes candidate simultaneous near-periods of the driving
/// frequencies {1, sqrt5, sqrt3}. Requires a converged report and epsilon > 0.
TranslationReport verify_solution_almost_periodicity(const SolveReport& report, double epsilon,
                                                     std::pair<double, double> scan_range);

}  // namespace apnum
