#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "radshock/chord.hpp"

using namespace radshock;

TEST_CASE("shock speed from the chord") {
    auto burgers = FluxModel::builtin("burgers");
    CHECK(shock_speed(burgers, 1.0, -1.0).s == doctest::Approx(0.0));
    CHECK(shock_speed(burgers, 2.0, 0.0).s == doctest::Approx(1.0));
    auto cubic = FluxModel::builtin("cubic");
    CHECK(shock_speed(cubic, 1.0, 0.0).s == doctest::Approx(1.0));
    CHECK_THROWS(shock_speed(burgers, 1.0, 1.0));
}

TEST_CASE("burgers chord decomposition") {
    auto f = FluxModel::builtin("burgers");
    ChordFunction chord(f, shock_speed(f, 1.0, -1.0));
    REQUIRE(chord.z_stars().size() == 1);
    CHECK(chord.z_stars()[0] == doctest::Approx(0.0).epsilon(1e-10));
    CHECK(chord.m() == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(chord.branch_count() == 2);
    CHECK_FALSE(chord.branch(1).increasing);
    CHECK(chord.branch(2).increasing);
}

TEST_CASE("quartic chord decomposition") {
    auto f = FluxModel::builtin("quartic");
    ChordFunction chord(f, shock_speed(f, 2.0, -2.0));
    REQUIRE(chord.z_stars().size() == 3);
    CHECK(chord.z_stars()[0] == doctest::Approx(-1.0).epsilon(1e-9));
    CHECK(chord.z_stars()[1] == doctest::Approx(0.0).epsilon(1e-9));
    CHECK(chord.z_stars()[2] == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(chord.F(1.0) == doctest::Approx(-9.0 / 4.0).epsilon(1e-12));
    CHECK(chord.F(0.0) == doctest::Approx(-2.0).epsilon(1e-12));
    CHECK(chord.branch_count() == 4);
    CHECK(chord.pair_count() == 2);
}

TEST_CASE("cubic flux with s=1 violates the chord inequality") {
    auto f = FluxModel::builtin("cubic");
    ShockTriple t{1.0, -1.0, 1.0};  // RH holds: (1 - (-1))/(1 - (-1)) = 1
    CHECK_THROWS_AS(ChordFunction(f, t), AdmissibilityError);
}

TEST_CASE("branch inverses at the frozen values") {
    auto f = FluxModel::builtin("burgers");
    ChordFunction chord(f, shock_speed(f, 1.0, -1.0));
    CHECK(chord.invert_branch(1, 0.0) == doctest::Approx(-1.0).epsilon(1e-10));
    CHECK(chord.invert_branch(2, 0.0) == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(chord.invert_branch(1, -0.5) == doctest::Approx(0.0).epsilon(1e-7));
    CHECK(chord.invert_branch(2, -0.5) == doctest::Approx(0.0).epsilon(1e-7));
    CHECK_THROWS(chord.invert_branch(1, 0.5));
}

TEST_CASE("inverse property h_i(F(u)) = u on random points") {
    std::mt19937 rng(3);
    auto run = [&](const FluxModel& f, double um, double up) {
        ChordFunction chord(f, shock_speed(f, um, up));
        for (int b = 1; b <= chord.branch_count(); ++b) {
            const auto& iv = chord.branch(b);
            std::uniform_real_distribution<double> pick(iv.lo, iv.hi);
            for (int i = 0; i < 200; ++i) {
                double u = pick(rng);
                double back = chord.invert_branch(b, chord.F(u));
                CHECK(std::abs(back - u) < 1e-10 * chord.scale());
            }
        }
    };
    run(FluxModel::builtin("burgers"), 1.0, -1.0);
    run(FluxModel::builtin("quartic"), 2.0, -2.0);
}

TEST_CASE("critical values alternate min then max") {
    auto f = FluxModel::builtin("quartic");
    ChordFunction chord(f, shock_speed(f, 2.0, -2.0));
    const auto& zs = chord.z_stars();
    for (std::size_t k = 0; k < zs.size(); ++k) {
        double f2 = chord.F2(zs[k]);
        if (k % 2 == 0)
            CHECK(f2 > 0.0);  // local minimum
        else
            CHECK(f2 < 0.0);  // local maximum
    }
}

TEST_CASE("admissibility reports") {
    auto f = FluxModel::builtin("burgers");
    {
        ChordFunction chord(f, shock_speed(f, 1.0, -1.0));
        auto rep = chord.check_admissibility();
        CHECK(rep.oleinik_strict);
        CHECK(rep.lax_strict);
        CHECK(rep.nondegenerate);
    }
    {
        auto q = FluxModel::builtin("quartic");
        ChordFunction chord(q, shock_speed(q, 2.0, -2.0));
        auto rep = chord.check_admissibility();
        CHECK(rep.oleinik_strict);
        CHECK(rep.lax_strict);
    }
    {
        // reversed states: F < 0 inside but the shock runs the wrong way
        ChordFunction chord(f, shock_speed(f, -1.0, 1.0));
        auto rep = chord.check_admissibility();
        CHECK_FALSE(rep.oleinik_strict);
    }
}

TEST_CASE("degenerate critical point triggers mollification") {
    auto f = FluxModel::parse("u^4/4");
    ChordFunction chord(f, shock_speed(f, 1.0, -1.0));
    CHECK(chord.mollified());
    CHECK(chord.mollification_eta() > 0.0);
    CHECK(chord.z_stars().size() % 2 == 1);
    auto rep = chord.check_admissibility();
    CHECK(rep.nondegenerate);
}

TEST_CASE("convex flux has one critical point and m = |F(z*)|") {
    std::mt19937 rng(5);
    std::uniform_real_distribution<double> pick(0.2, 2.0);
    auto f = FluxModel::parse("u^2/2 + exp(u)/10");
    for (int i = 0; i < 5; ++i) {
        double up = -pick(rng), um = pick(rng);
        ChordFunction chord(f, shock_speed(f, um, up));
        REQUIRE(chord.z_stars().size() == 1);
        CHECK(chord.m() ==
              doctest::Approx(std::abs(chord.F(chord.z_stars()[0]))).epsilon(1e-12));
    }
}

TEST_CASE("rh precondition enforced") {
    auto f = FluxModel::builtin("burgers");
    ShockTriple bad{1.0, -1.0, 0.3};
    CHECK_THROWS(ChordFunction(f, bad));
}
