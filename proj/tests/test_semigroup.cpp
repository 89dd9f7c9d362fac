#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "apnum/errors.hpp"
#include "apnum/random.hpp"
#include "apnum/semigroup.hpp"

using namespace apnum;

TEST_CASE("diagonal_semigroup accepts stable spectra only") {
    SemigroupSpec heat = diagonal_semigroup({-1.0, -4.0, -9.0});
    CHECK(heat.dimension() == 3);

    CHECK(diagonal_semigroup({-3.0}).dimension() == 1);

    CHECK_THROWS_AS(diagonal_semigroup({-1.0, 0.5}), hypothesis_violation);
    CHECK_THROWS_AS(diagonal_semigroup({0.0}), hypothesis_violation);
    CHECK_THROWS_AS(diagonal_semigroup({}), std::invalid_argument);

    try {
        diagonal_semigroup({-1.0, 0.5});
    } catch (const hypothesis_violation& e) {
        CHECK(e.value() == 0.5);
    }
}

TEST_CASE("apply_semigroup: identity at zero, eigenvalue decay, errors") {
    SemigroupSpec heat = diagonal_semigroup({-1.0, -4.0, -9.0});

    Vec v{0.3, -1.2, 2.0};
    Vec at0 = apply_semigroup(heat, 0.0, v);
    CHECK(at0 == v);  // T(0) = I exactly

    Vec e1 = apply_semigroup(heat, 1.0, Vec{1.0, 0.0, 0.0});
    CHECK(e1[0] == std::exp(-1.0));
    CHECK(e1[1] == 0.0);
    CHECK(e1[2] == 0.0);

    CHECK_THROWS_AS(apply_semigroup(heat, -0.5, v), std::invalid_argument);
    CHECK_THROWS_AS(apply_semigroup(heat, 1.0, Vec{1.0, 2.0}), std::invalid_argument);
}

TEST_CASE("semigroup law T(t1+t2) = T(t1) T(t2) on random vectors") {
    SemigroupSpec s = diagonal_semigroup({-0.5, -2.0, -7.5, -16.0});
    Rng rng(7);
    for (int trial = 0; trial < 50; ++trial) {
        Vec v(4);
        for (auto& x : v) x = rng.uniform(-2.0, 2.0);
        double t1 = rng.uniform(0.0, 5.0);
        double t2 = rng.uniform(0.0, 5.0);
        Vec once = apply_semigroup(s, t1 + t2, v);
        Vec twice = apply_semigroup(s, t2, apply_semigroup(s, t1, v));
        for (std::size_t k = 0; k < 4; ++k) CHECK(std::fabs(once[k] - twice[k]) <= 1e-14);
    }
}

TEST_CASE("stability certificate: N = 1, lambda = min |mu|") {
    SemigroupSpec heat = diagonal_semigroup({-1.0, -4.0, -9.0, -16.0});
    StabilityCertificate cert = stability_certificate(heat);
    CHECK(cert.N == 1.0);
    CHECK(cert.lambda == 1.0);

    StabilityCertificate single = stability_certificate(diagonal_semigroup({-3.0}));
    CHECK(single.N == 1.0);
    CHECK(single.lambda == 3.0);
}

TEST_CASE("certificate soundness: ||T(t)v|| <= N e^{-lambda t} ||v||") {
    SemigroupSpec s = diagonal_semigroup({-1.0, -4.0, -9.0});
    StabilityCertificate cert = stability_certificate(s);
    Rng rng(99);
    for (int trial = 0; trial < 100; ++trial) {
        Vec v(3);
        for (auto& x : v) x = rng.uniform(-3.0, 3.0);
        double t = rng.uniform(0.0, 20.0);
        Vec w = apply_semigroup(s, t, v);
        double nv = 0.0, nw = 0.0;
        for (std::size_t k = 0; k < 3; ++k) {
            nv += v[k] * v[k];
            nw += w[k] * w[k];
        }
        CHECK(std::sqrt(nw) <= cert.N * std::exp(-cert.lambda * t) * std::sqrt(nv) + 1e-14);
    }

    // The max eigenvalue dominates: sampled operator norm matches e^{-lambda t}.
    for (double t = 0.0; t <= 20.0; t += 0.5) {
        Vec e1 = apply_semigroup(s, t, Vec{1.0, 0.0, 0.0});
        CHECK(e1[0] <= cert.N * std::exp(-cert.lambda * t) + 1e-14);
    }
}
