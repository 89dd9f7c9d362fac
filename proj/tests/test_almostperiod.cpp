#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "apnum/almostperiod.hpp"
#include "apnum/grid.hpp"
#include "apnum/random.hpp"
#include "oracles.hpp"

using namespace apnum;

namespace {

const double kPi = std::numbers::pi;
const double kSqrt2 = std::numbers::sqrt2;

SeminormConfig fast_cfg() {
    SeminormConfig cfg;
    cfg.T0 = 200.0;
    cfg.n_sweeps = 4;
    cfg.growth = 2.0;
    cfg.tail_window = 2;
    return cfg;
}

// Closed-form translation distance of sin: sin(t+tau) - sin t has amplitude
// 2|sin(tau/2)|, and M2 of an amplitude-A sinusoid is A/sqrt2.
double sin_translation_distance(double tau) { return kSqrt2 * std::fabs(std::sin(tau / 2.0)); }

double two_freq_distance(double tau) {
    double a = std::sin(tau / 2.0), b = std::sin(kSqrt2 * tau / 2.0);
    return std::sqrt(2.0 * a * a + 2.0 * b * b);
}

}  // namespace

TEST_CASE("translation_distance closed forms for sin") {
    FnSpecFunction s{FnSpec(fn::sin_wave(1.0))};
    SeminormConfig cfg = fast_cfg();

    CHECK(translation_distance(s, 2.0 * kPi, cfg) <= 1e-9);
    CHECK(translation_distance(s, 0.0, cfg) == 0.0);
    CHECK(std::fabs(translation_distance(s, kPi, cfg) - kSqrt2) <= 1e-3);

    // Generic shifts match the closed form.
    for (double tau : {0.3, 1.7, 4.4})
        CHECK(std::fabs(translation_distance(s, tau, cfg) - sin_translation_distance(tau)) <=
              1e-3);
}

TEST_CASE("find_translation_numbers on sin finds the periods") {
    FnSpecFunction s{FnSpec(fn::sin_wave(1.0))};
    SeminormConfig cfg = fast_cfg();
    TranslationReport tr = find_translation_numbers(s, 0.1, {1.0, 20.0}, 0.01, cfg);

    bool near_2pi = false, near_4pi = false;
    for (const auto& [tau, d] : tr.accepted) {
        CHECK(d < 0.1);
        // Oracle: every accepted shift must pass the closed form too.
        CHECK(sin_translation_distance(tau) < 0.1 + 2e-3);
        if (std::fabs(tau - 2.0 * kPi) <= 0.05) near_2pi = true;
        if (std::fabs(tau - 4.0 * kPi) <= 0.05) near_4pi = true;
    }
    CHECK(near_2pi);
    CHECK(near_4pi);

    // Completeness against a brute-force closed-form scan: every tau the
    // oracle accepts at 0.8*eps has an accepted neighbor within one step.
    for (double tau = 1.0; tau <= 20.0; tau += 0.01) {
        if (sin_translation_distance(tau) < 0.08) {
            bool found = false;
            for (const auto& [atau, d] : tr.accepted)
                if (std::fabs(atau - tau) <= 0.011) found = true;
            CHECK(found);
        }
    }

    CHECK(tr.inclusion_length <= 2.0 * kPi + 1.0);
    CHECK(tr.inclusion_length >= tr.scan_step);
}

TEST_CASE("find_translation_numbers: constant accepts everything") {
    FnSpecFunction c{FnSpec(fn::constant(4.0))};
    SeminormConfig cfg = fast_cfg();
    cfg.quad_step = 0.05;
    TranslationReport tr = find_translation_numbers(c, 0.01, {0.0, 2.0}, 0.25, cfg);
    CHECK(tr.accepted.size() == 9);  // every scanned point
    CHECK(tr.inclusion_length == doctest::Approx(0.25));
}

TEST_CASE("find_translation_numbers on sin t + sin sqrt2 t") {
    // Simultaneous near-periods exist: continued-fraction convergents p/q of
    // sqrt2 give tau = 2 pi q with q sqrt2 nearly integral.
    FnSpec f(fn::sum({fn::sin_wave(1.0), fn::sin_wave(kSqrt2)}));
    FnSpecFunction fun(f);
    SeminormConfig cfg;
    cfg.T0 = 100.0;
    cfg.n_sweeps = 3;
    cfg.tail_window = 2;

    TranslationReport tr = find_translation_numbers(fun, 0.3, {1.0, 200.0}, 0.1, cfg);
    REQUIRE(!tr.accepted.empty());
    for (const auto& [tau, d] : tr.accepted) CHECK(two_freq_distance(tau) < 0.3 + 5e-2);

    // The convergent q = 12 (12 sqrt2 = 16.97) predicts acceptance near 24 pi.
    double tau12 = 24.0 * kPi;
    REQUIRE(two_freq_distance(tau12) < 0.3);
    bool found = false;
    for (const auto& [tau, d] : tr.accepted)
        if (std::fabs(tau - tau12) <= 0.2) found = true;
    CHECK(found);

    CHECK_THROWS_AS(find_translation_numbers(fun, 0.3, {5.0, 5.0}, 0.1, cfg),
                    std::invalid_argument);
    CHECK_THROWS_AS(find_translation_numbers(fun, -0.1, {0.0, 1.0}, 0.1, cfg),
                    std::invalid_argument);
}

TEST_CASE("bochner_compactness_test: constants collapse to one center") {
    FnSpecFunction c{FnSpec(fn::constant(1.5))};
    SeminormConfig cfg = fast_cfg();
    cfg.quad_step = 0.05;
    Rng rng(5);
    std::vector<double> shifts;
    for (int i = 0; i < 50; ++i) shifts.push_back(rng.uniform(-30.0, 30.0));
    NetReport net = bochner_compactness_test(c, shifts, 0.05, cfg);
    CHECK(net.centers.size() == 1);
    CHECK(net.max_within_cluster_distance <= 1e-9);
}

TEST_CASE("bochner_compactness_test: sin translate family is a circle") {
    FnSpecFunction s{FnSpec(fn::sin_wave(1.0))};
    SeminormConfig cfg = fast_cfg();
    Rng rng(11);
    std::vector<double> shifts;
    for (int i = 0; i < 50; ++i) shifts.push_back(rng.uniform(0.0, 100.0));

    const double eps = 0.2;
    NetReport net = bochner_compactness_test(s, shifts, eps, cfg);

    // Every shift covered, centers are shifts, within-cluster < eps.
    REQUIRE(net.assignment.size() == shifts.size());
    CHECK(net.max_within_cluster_distance < eps);
    for (std::size_t i = 0; i < shifts.size(); ++i) {
        std::size_t c = net.assignment[i];
        bool is_center = false;
        for (std::size_t cc : net.centers) is_center |= (cc == c);
        CHECK(is_center);
        // Oracle metric: d(h1,h2) = sqrt2 |sin((h1-h2)/2)|.
        CHECK(sin_translation_distance(shifts[i] - shifts[c]) < eps + 2e-3);
    }

    // Independent greedy-cover oracle on the closed-form metric bounds the
    // net size the same way.
    std::vector<std::size_t> oracle_centers;
    for (std::size_t i = 0; i < shifts.size(); ++i) {
        bool covered = false;
        for (std::size_t c : oracle_centers)
            if (sin_translation_distance(shifts[i] - shifts[c]) < eps) covered = true;
        if (!covered) oracle_centers.push_back(i);
    }
    CHECK(net.centers.size() <= 32);
    CHECK(oracle_centers.size() <= 32);

    CHECK_THROWS_AS(bochner_compactness_test(s, {}, eps, cfg), std::invalid_argument);
    CHECK_THROWS_AS(bochner_compactness_test(s, shifts, 0.0, cfg), std::invalid_argument);
}

TEST_CASE("bochner_compactness_test: two-frequency family still totally bounded") {
    FnSpec f(fn::sum({fn::sin_wave(1.0), fn::sin_wave(kSqrt2)}));
    FnSpecFunction fun(f);
    SeminormConfig cfg;
    cfg.T0 = 100.0;
    cfg.n_sweeps = 3;
    cfg.tail_window = 2;
    Rng rng(23);
    std::vector<double> shifts;
    for (int i = 0; i < 50; ++i) shifts.push_back(rng.uniform(0.0, 100.0));
    NetReport net = bochner_compactness_test(fun, shifts, 0.3, cfg);
    CHECK(net.centers.size() >= 1);
    CHECK(net.centers.size() < shifts.size());
    CHECK(net.max_within_cluster_distance < 0.3);
    for (std::size_t i = 0; i < shifts.size(); ++i)
        CHECK(two_freq_distance(shifts[i] - shifts[net.assignment[i]]) < 0.3 + 5e-2);
}

TEST_CASE("uniform_continuity_modulus of sin matches the closed form") {
    FnSpecFunction s{FnSpec(fn::sin_wave(1.0))};
    SeminormConfig cfg = fast_cfg();
    std::vector<double> hs{0.0, 0.02, 0.05, 0.1, 0.2, 0.5, 1.0};
    ModulusReport rep = uniform_continuity_modulus(s, hs, cfg);
    REQUIRE(rep.points.size() == hs.size());
    CHECK(rep.monotone);
    for (const auto& [h, d] : rep.points) {
        if (h == 0.0)
            CHECK(d == 0.0);
        else
            CHECK(std::fabs(d - sin_translation_distance(h)) <= 1e-3);
    }
    // Spot value from the closed form: h = 0.1 -> ~0.070682.
    CHECK(std::fabs(rep.points[3].second - 0.0707) <= 1e-3);

    FnSpecFunction c{FnSpec(fn::constant(2.0))};
    ModulusReport crep = uniform_continuity_modulus(c, hs, cfg);
    for (const auto& [h, d] : crep.points) CHECK(d <= 1e-12);

    // Mixed-sign inputs: the modulus depends on |h|, ordering follows it.
    ModulusReport mixed = uniform_continuity_modulus(s, {-0.5, 0.1, -0.02, 0.3}, cfg);
    CHECK(mixed.monotone);
    CHECK(mixed.points.front().first == -0.02);
    CHECK(std::fabs(mixed.points.back().first) == 0.5);
}

TEST_CASE("shifts beyond a sampled domain are rejected, not extrapolated") {
    TimeGrid g = make_grid(0.0, 50.0, 0.05);
    SampledPath p = sample_fnspec(FnSpec(fn::sin_wave(1.0)), g);
    PathFunction f(p);
    SeminormConfig cfg = fast_cfg();
    cfg.quad_step = 0.05;
    CHECK(translation_distance(f, 10.0, cfg) >= 0.0);  // assessable
    CHECK_THROWS_AS(translation_distance(f, 60.0, cfg), std::out_of_range);
}
