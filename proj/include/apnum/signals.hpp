#pragma once

#include <vector>

#include "apnum/grid.hpp"
#include "apnum/random.hpp"

namespace apnum {

// Seeded quasi-periodic test signals. Frequencies are laid out on a jittered
// lattice so distinct terms stay well separated: cross terms in long-time
// averages then decay like 1/(gap * T) and Parseval-style identities are
// testable at finite horizons.

struct TrigPolyParams {
    std::size_t terms = 3;
    double freq_base = 1.5;    // slot k gets frequency in [k*base, k*base + jitter]
    double freq_jitter = 0.4;  // must stay below base for a guaranteed gap
    double amp_lo = 0.3;
    double amp_hi = 2.0;
};

struct TrigPoly {
    std::vector<double> freqs;
    std::vector<double> amps;
    std::vector<double> phases;

    FnSpec spec() const;  // sum of amp * cos(freq t + phase)
};

TrigPoly random_trig_poly(Rng& rng, const TrigPolyParams& p);

/// Vector-valued spec with an independent trig polynomial per component.
FnSpec random_path_spec(Rng& rng, std::size_t dim, const TrigPolyParams& p);

}  // namespace apnum
