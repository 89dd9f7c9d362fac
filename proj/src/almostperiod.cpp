#include "apnum/almostperiod.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>

namespace apnum {

namespace {

constexpr double kGoldenRatio = 0.6180339887498949;

// Golden-section minimization on [lo, hi]; assumes a single interior minimum,
// which holds for translation-distance curves of finite trig sums between
// adjacent scan samples.
std::pair<double, double> golden_minimize(const std::function<double(double)>& g, double lo,
                                          double hi, std::size_t iters) {
    double a = lo, b = hi;
    double x1 = b - kGoldenRatio * (b - a);
    double x2 = a + kGoldenRatio * (b - a);
    double f1 = g(x1), f2 = g(x2);
    for (std::size_t i = 0; i < iters; ++i) {
        if (f1 <= f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - kGoldenRatio * (b - a);
            f1 = g(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + kGoldenRatio * (b - a);
            f2 = g(x2);
        }
    }
    return f1 <= f2 ? std::make_pair(x1, f1) : std::make_pair(x2, f2);
}

}  // namespace

double translation_distance(const TimeFunction& f, double tau, const SeminormConfig& cfg) {
    if (tau == 0.0) return 0.0;  // identity shift, exactly
    TranslateDifference diff(f, tau);
    auto dom = diff.domain();
    if (!dom) return besicovitch_seminorm(diff, cfg).limsup_estimate;
    if (!(dom->second > dom->first))
        throw std::out_of_range(
            "translation_distance: shift leaves no assessable window inside the sampled domain");
    return besicovitch_seminorm_on(diff, dom->first, dom->second, cfg).limsup_estimate;
}

TranslationReport find_translation_numbers(const TimeFunction& f, double epsilon,
                                           std::pair<double, double> scan_range,
                                           double scan_step, const SeminormConfig& cfg) {
    if (!(epsilon > 0.0))
        throw std::invalid_argument("find_translation_numbers: epsilon must be positive");
    if (!(scan_step > 0.0))
        throw std::invalid_argument("find_translation_numbers: scan_step must be positive");
    if (!(scan_range.second > scan_range.first))
        throw std::invalid_argument("find_translation_numbers: empty scan range");

    const double lo = scan_range.first;
    const double hi = scan_range.second;
    std::size_t n = static_cast<std::size_t>(std::floor((hi - lo) / scan_step + 1e-9)) + 1;

    TranslationReport report;
    report.epsilon = epsilon;
    report.scan_range = scan_range;
    report.scan_step = scan_step;
    report.scan.reserve(n);

    for (std::size_t i = 0; i < n; ++i) {
        double tau = lo + static_cast<double>(i) * scan_step;
        report.scan.emplace_back(tau, translation_distance(f, tau, cfg));
    }

    for (const auto& [tau, d] : report.scan)
        if (d < epsilon) report.accepted.emplace_back(tau, d);

    // Refine interior local minima the coarse scan did not accept but that
    // sit below 2*epsilon: a narrow acceptance valley can fall between scan
    // points. Minima already below epsilon are accepted as-is.
    auto dist = [&](double tau) { return translation_distance(f, tau, cfg); };
    for (std::size_t i = 1; i + 1 < report.scan.size(); ++i) {
        double d = report.scan[i].second;
        if (d < epsilon || d >= 2.0 * epsilon) continue;
        if (d > report.scan[i - 1].second || d > report.scan[i + 1].second) continue;
        auto [tau_star, d_star] =
            golden_minimize(dist, report.scan[i - 1].first, report.scan[i + 1].first, 40);
        if (d_star < epsilon) report.accepted.emplace_back(tau_star, d_star);
    }

    std::sort(report.accepted.begin(), report.accepted.end());
    // Drop refinement duplicates that collapsed onto scanned points.
    auto last = std::unique(report.accepted.begin(), report.accepted.end(),
                            [scan_step](const auto& a, const auto& b) {
                                return std::fabs(a.first - b.first) < 1e-9 * scan_step;
                            });
    report.accepted.erase(last, report.accepted.end());

    if (report.accepted.empty()) {
        report.inclusion_length = hi - lo;
    } else {
        double gap = report.accepted.front().first - lo;
        for (std::size_t i = 1; i < report.accepted.size(); ++i)
            gap = std::max(gap, report.accepted[i].first - report.accepted[i - 1].first);
        gap = std::max(gap, hi - report.accepted.back().first);
        report.inclusion_length = std::max(gap, scan_step);
    }
    return report;
}

NetReport bochner_compactness_test(const TimeFunction& f, const std::vector<double>& shifts,
                                   double epsilon, const SeminormConfig& cfg) {
    if (shifts.empty())
        throw std::invalid_argument("bochner_compactness_test: shifts must be nonempty");
    if (!(epsilon > 0.0))
        throw std::invalid_argument("bochner_compactness_test: epsilon must be positive");

    NetReport report;
    report.epsilon = epsilon;
    report.shifts = shifts;
    report.assignment.resize(shifts.size());

    auto pair_distance = [&](double h1, double h2) {
        TranslateDifference diff(f, h1, h2);
        auto dom = diff.domain();
        if (!dom) return besicovitch_seminorm(diff, cfg).limsup_estimate;
        return besicovitch_seminorm_on(diff, dom->first, dom->second, cfg).limsup_estimate;
    };

    for (std::size_t i = 0; i < shifts.size(); ++i) {
        std::size_t best_center = shifts.size();
        double best_d = epsilon;
        for (std::size_t c : report.centers) {
            double d = pair_distance(shifts[i], shifts[c]);
            if (d < best_d) {
                best_d = d;
                best_center = c;
            }
        }
        if (best_center == shifts.size()) {
            report.centers.push_back(i);
            report.assignment[i] = i;
        } else {
            report.assignment[i] = best_center;
            report.max_within_cluster_distance =
                std::max(report.max_within_cluster_distance, best_d);
        }
    }
    return report;
}

ModulusReport uniform_continuity_modulus(const TimeFunction& f, std::vector<double> h_values,
                                         const SeminormConfig& cfg) {
    ModulusReport report;
    // The modulus is a function of |h|; order accordingly so the
    // monotonicity check is meaningful for mixed-sign inputs.
    std::sort(h_values.begin(), h_values.end(),
              [](double a, double b) { return std::fabs(a) < std::fabs(b); });
    report.points.reserve(h_values.size());
    double max_d = 0.0;
    for (double h : h_values) {
        double d = translation_distance(f, h, cfg);
        report.points.emplace_back(h, d);
        max_d = std::max(max_d, d);
    }
    report.monotone = true;
    double slack = 1e-9 * (1.0 + max_d);
    for (std::size_t i = 1; i < report.points.size(); ++i)
        if (report.points[i].second + slack < report.points[i - 1].second) report.monotone = false;
    return report;
}

}  // namespace apnum
