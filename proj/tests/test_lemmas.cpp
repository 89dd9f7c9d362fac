#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "lemma_suites.hpp"

// Small-n versions of the closure-lemma suites; the acceptance runner repeats
// them at 100 instances each.

TEST_CASE("scalar closure suite") {
    auto r = lemmas::scalar_closure(1001, 20);
    CHECK(r.instances == 20);
    CHECK(r.violations == 0);
}

TEST_CASE("common translation numbers suite") {
    auto r = lemmas::common_translation(1002, 20);
    CHECK(r.instances == 20);
    CHECK(r.violations == 0);
}

TEST_CASE("sum closure suite") {
    auto r = lemmas::sum_closure(1003, 10);
    CHECK(r.instances == 10);
    CHECK(r.violations == 0);
}

TEST_CASE("product bound suite") {
    auto r = lemmas::product_bound(1004, 20);
    CHECK(r.instances == 20);
    CHECK(r.violations == 0);
}

TEST_CASE("composition suite") {
    auto r = lemmas::composition(1005, 20);
    CHECK(r.instances == 20);
    CHECK(r.violations == 0);
}

TEST_CASE("Bohr implies Bochner suite") {
    auto r = lemmas::bohr_bochner(1006, 20);
    CHECK(r.instances == 20);
    CHECK(r.violations == 0);
}
