#pragma once

#include <utility>
#include <vector>

#include "apnum/grid.hpp"
#include "apnum/seminorm.hpp"

namespace apnum {

// ---------------------------------------------------------------------------
// Executable translation-number machinery: scan for epsilon-translation
// numbers, estimate the inclusion length over the scanned range, and test
// total boundedness of the translate family with a greedy epsilon-net.

struct TranslationReport {
    double epsilon = 0.0;
    std::vector<std::pair<double, double>> accepted;  // (tau, distance), sorted by tau
    std::pair<double, double> scan_range{0.0, 0.0};
    double scan_step = 0.0;
    /// Max gap between consecutive accepted tau, range endpoints included.
    /// Only meaningful within the scanned range.
    double inclusion_length = 0.0;
    std::vector<std::pair<double, double>> scan;  // full (tau, distance) curve
};

/// Seminorm estimate of t -> f(t+tau) - f(t). For functions on all of R this
/// is the symmetric T-sweep; for finite paths the sweep runs over the largest
/// co-centered windows the domain supports.
double translation_distance(const TimeFunction& f, double tau, const SeminormConfig& cfg);

/// Coarse scan at scan_step plus golden-section refinement around every local
/// minimum below 2*epsilon.
TranslationReport find_translation_numbers(const TimeFunction& f, double epsilon,
                                           std::pair<double, double> scan_range,
                                           double scan_step, const SeminormConfig& cfg);

struct NetReport {
    double epsilon = 0.0;
    std::vector<double> shifts;
    std::vector<std::size_t> centers;     // indices into shifts
    std::vector<std::size_t> assignment;  // shift index -> assigned center index
    double max_within_cluster_distance = 0.0;
};

/// Greedy epsilon-net over the translate family {f(.+h)} in input order:
/// a shift joins the nearest existing center closer than epsilon, otherwise
/// it becomes a new center. Existence of a finite net, not minimality, is
/// what total boundedness requires.
NetReport bochner_compactness_test(const TimeFunction& f, const std::vector<double>& shifts,
                                   double epsilon, const SeminormConfig& cfg);

struct ModulusReport {
    std::vector<std::pair<double, double>> points;  // (h, distance), sorted by |h|
    bool monotone = false;                          // nondecreasing in |h| (small slack)
};

ModulusReport uniform_continuity_modulus(const TimeFunction& f, std::vector<double> h_values,
                                         const SeminormConfig& cfg);

}  // namespace apnum
