#include "apnum/semigroup.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "apnum/errors.hpp"

namespace apnum {

SemigroupSpec diagonal_semigroup(std::vector<double> eigenvalues) {
    if (eigenvalues.empty())
        throw std::invalid_argument("diagonal_semigroup: need at least one eigenvalue");
    for (double mu : eigenvalues) {
        if (!std::isfinite(mu))
            throw std::invalid_argument("diagonal_semigroup: non-finite eigenvalue");
        if (mu >= 0.0)
            throw hypothesis_violation(
                "diagonal_semigroup: eigenvalue >= 0, semigroup is not exponentially stable", mu);
    }
    return SemigroupSpec{std::move(eigenvalues)};
}

void apply_semigroup(const SemigroupSpec& s, double t, std::span<const double> v,
                     std::span<double> out) {
    if (t < 0.0) throw std::invalid_argument("apply_semigroup: t must be >= 0");
    if (v.size() != s.dimension() || out.size() != s.dimension())
        throw std::invalid_argument("apply_semigroup: dimension mismatch");
    for (std::size_t k = 0; k < v.size(); ++k) out[k] = std::exp(s.eigenvalues[k] * t) * v[k];
}

Vec apply_semigroup(const SemigroupSpec& s, double t, const Vec& v) {
    Vec out(v.size());
    apply_semigroup(s, t, v, out);
    return out;
}

StabilityCertificate stability_certificate(const SemigroupSpec& s) {
    double lambda = std::fabs(s.eigenvalues[0]);
    for (double mu : s.eigenvalues) lambda = std::min(lambda, std::fabs(mu));
    return StabilityCertificate{1.0, lambda};
}

}  // namespace apnum
