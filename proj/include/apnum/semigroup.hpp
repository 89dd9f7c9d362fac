#pragma once

#include <span>
#include <vector>

#include "apnum/grid.hpp"

namespace apnum {

// ---------------------------------------------------------------------------
// Exponentially stable semigroups in diagonal (spectral) form. Only diagonal
// generators are supported: the heat example is diagonal in the sine basis
// and diagonal exactness keeps semigroup roundoff out of the fixed-point
// verification. Dense-matrix generators would be an extension, not done.

struct SemigroupSpec {
    std::vector<double> eigenvalues;  // all strictly negative
    std::size_t dimension() const { return eigenvalues.size(); }
};

struct StabilityCertificate {
    double N = 1.0;      // >= 1
    double lambda = 0.0; // > 0, decay rate: ||T(t)|| <= N exp(-lambda t)
};

/// Throws hypothesis_violation if any eigenvalue is >= 0 (no exponential
/// stability, the contraction argument does not apply).
SemigroupSpec diagonal_semigroup(std::vector<double> eigenvalues);

/// Componentwise exp(mu_k t) v_k. Requires t >= 0 and matching dimension.
void apply_semigroup(const SemigroupSpec& s, double t, std::span<const double> v,
                     std::span<double> out);
Vec apply_semigroup(const SemigroupSpec& s, double t, const Vec& v);

/// For diagonal specs the certificate is exact: N = 1, lambda = min |mu_k|.
StabilityCertificate stability_certificate(const SemigroupSpec& s);

}  // namespace apnum
