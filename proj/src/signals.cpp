#include "apnum/signals.hpp"

#include <numbers>
#include <stdexcept>

namespace apnum {

FnSpec TrigPoly::spec() const {
    std::vector<ExprPtr> terms;
    terms.reserve(freqs.size());
    for (std::size_t k = 0; k < freqs.size(); ++k)
        terms.push_back(fn::scale(amps[k], fn::cos_wave(freqs[k], phases[k])));
    return FnSpec(fn::sum(std::move(terms)));
}

TrigPoly random_trig_poly(Rng& rng, const TrigPolyParams& p) {
    if (p.terms == 0) throw std::invalid_argument("random_trig_poly: need at least one term");
    if (!(p.freq_jitter < p.freq_base))
        throw std::invalid_argument("random_trig_poly: jitter must stay below the lattice base");
    TrigPoly poly;
    for (std::size_t k = 1; k <= p.terms; ++k) {
        poly.freqs.push_back(static_cast<double>(k) * p.freq_base +
                             rng.uniform(0.0, p.freq_jitter));
        poly.amps.push_back(rng.uniform(p.amp_lo, p.amp_hi));
        poly.phases.push_back(rng.uniform(0.0, 2.0 * std::numbers::pi));
    }
    return poly;
}

FnSpec random_path_spec(Rng& rng, std::size_t dim, const TrigPolyParams& p) {
    std::vector<ExprPtr> components;
    components.reserve(dim);
    for (std::size_t i = 0; i < dim; ++i) {
        TrigPoly poly = random_trig_poly(rng, p);
        std::vector<ExprPtr> terms;
        for (std::size_t k = 0; k < poly.freqs.size(); ++k)
            terms.push_back(fn::scale(poly.amps[k], fn::cos_wave(poly.freqs[k], poly.phases[k])));
        components.push_back(fn::sum(std::move(terms)));
    }
    return FnSpec(std::move(components));
}

}  // namespace apnum
