#pragma once

#include <complex>
#include <string>
#include <utility>
#include <vector>

#include "apnum/grid.hpp"

namespace apnum {

// ---------------------------------------------------------------------------
// Finite-horizon Marcinkiewicz seminorm machinery.
//
// The underlying quantity is
//     ( limsup_{T->inf} 1/(2T) int_{-T}^{T} ||f(t)||^flat dt )^(1/flat).
// No finite computation reaches the limsup; the estimator sweeps a geometric
// ladder of horizons T_j = T0 * growth^j and takes the max over the last
// tail_window sweeps. The tail spread (max - min over that window) is the
// declared convergence proxy and is reported alongside every estimate.

struct SeminormConfig {
    double flat = 2.0;          // exponent, >= 1
    double T0 = 100.0;          // first horizon
    std::size_t n_sweeps = 8;   // number of horizons
    double growth = 2.0;        // horizon ratio, > 1
    double quad_step = 0.0;     // Simpson step; 0 = auto (shortest trig period / 64, else 0.01)
    std::size_t tail_window = 3;
    double rel_tol = 1e-2;      // converged <=> spread <= rel_tol * limsup_estimate

    void validate() const;
    double final_horizon() const;
    double resolve_quad_step(const TimeFunction& f) const;
};

struct SeminormEstimate {
    std::vector<std::pair<double, double>> per_T;  // (horizon, finite-horizon value)
    double limsup_estimate = 0.0;                  // max over the tail window
    double spread = 0.0;                           // max - min over the tail window
    bool converged = false;                        // spread <= rel_tol * limsup_estimate

    /// "T,value" rows followed by a one-line summary; consumed by the CLI
    /// report writer.
    std::string to_csv() const;
};

/// ( 1/(2T) int_{-T}^{T} ||f||^flat )^(1/flat) by composite Simpson at
/// cfg.quad_step. Throws std::out_of_range if a path-backed f does not cover
/// [-T, T].
double finite_window_seminorm(const TimeFunction& f, double T, const SeminormConfig& cfg);

/// Same average over an arbitrary window [a, b]; used where symmetric windows
/// are unavailable (finite sampled paths).
double window_seminorm(const TimeFunction& f, double a, double b, const SeminormConfig& cfg);

/// Full T-sweep over symmetric windows [-T_j, T_j].
SeminormEstimate besicovitch_seminorm(const TimeFunction& f, const SeminormConfig& cfg);

/// Sweep of nested co-centered windows inside [a, b], largest window = [a, b].
/// The ladder shrinks by cfg.growth per sweep. For domain-limited functions
/// this is the honest substitute for the T -> inf sweep.
SeminormEstimate besicovitch_seminorm_on(const TimeFunction& f, double a, double b,
                                         const SeminormConfig& cfg);

/// Max Euclidean norm over the stored grid values.
double sup_norm(const SampledPath& p);

// ---------------------------------------------------------------------------
// Fourier coefficient at a single frequency by long-time averaging of
// f(t) e^{-i lambda t}. Scalar functions only.

struct FourierCoefficient {
    std::complex<double> value{};  // final (largest-horizon) sweep value
    double spread = 0.0;           // max pairwise |difference| over the tail window
    double resolution = 0.0;       // 2*pi / T_final: closer frequencies are unresolvable
    bool resolvable = true;        // false if f carries a known distinct frequency
                                   // within `resolution` of lambda
    std::vector<std::pair<double, std::complex<double>>> per_T;
};

FourierCoefficient fourier_bohr_coefficient(const TimeFunction& f, double lambda,
                                            const SeminormConfig& cfg);

}  // namespace apnum
