#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "radshock/profile.hpp"

using namespace radshock;

namespace {

ChordFunction burgers_chord(double um, double up) {
    auto f = FluxModel::builtin("burgers");
    return ChordFunction(f, shock_speed(f, um, up));
}

}  // namespace

TEST_CASE("right tail stops at z' = -m") {
    auto chord = burgers_chord(1.0, -1.0);
    auto tail = tail_trajectory(chord, /*right_side=*/true, 1.0);
    CHECK(tail.terminal_zp == doctest::Approx(-0.5).epsilon(1e-12));
    CHECK(std::abs(tail.zp.front() - (-0.5)) < 1e-9);
    // z decreasing along increasing xi
    for (std::size_t i = 1; i < tail.z.size(); ++i) CHECK(tail.z[i] < tail.z[i - 1]);
}

TEST_CASE("size-1 shock tail terminal value") {
    auto chord = burgers_chord(0.5, -0.5);
    auto tail = tail_trajectory(chord, true, 1.0);
    CHECK(tail.terminal_zp == doctest::Approx(-0.125).epsilon(1e-12));
}

TEST_CASE("branch relation holds along tail arcs") {
    auto chord = burgers_chord(1.0, -1.0);
    for (bool right : {true, false}) {
        auto tail = tail_trajectory(chord, right, 1.0);
        for (std::size_t i = 0; i < tail.z.size(); ++i) {
            double h = chord.invert_branch(tail.branch, tail.zp[i], true);
            double res = tail.epsilon * tail.zpp[i] - tail.z[i] + h;
            CHECK(std::abs(res) < 1e-9 * chord.scale());
        }
    }
}

TEST_CASE("continuous case matches at (z*, -m)") {
    auto chord = burgers_chord(0.5, -0.5);
    auto left = tail_trajectory(chord, false, 1.0);
    auto right = tail_trajectory(chord, true, 1.0);
    auto mp = match_pair(chord, left, right);
    CHECK(std::abs(mp.z_bar - 0.0) < 1e-6);
    CHECK(std::abs(mp.z_tilde - (-0.125)) < 1e-7);
}

TEST_CASE("large shock matches strictly above -m") {
    auto chord = burgers_chord(1.0, -1.0);
    auto left = tail_trajectory(chord, false, 1.0);
    auto right = tail_trajectory(chord, true, 1.0);
    auto mp = match_pair(chord, left, right);
    CHECK(mp.z_tilde > -0.5 + 1e-3);
    CHECK(std::abs(mp.z_bar) < 1e-8);  // odd symmetry
}

TEST_CASE("assembled size-2 profile has one symmetric jump") {
    auto chord = burgers_chord(1.0, -1.0);
    auto prof = assemble_profile(chord, 1.0);
    REQUIRE(prof.jumps.size() == 1);
    const auto& j = prof.jumps[0];
    CHECK_FALSE(j.continuous);
    CHECK(j.xi0 == doctest::Approx(0.0));
    CHECK(j.u_left == doctest::Approx(-j.u_right).epsilon(1e-6));
    CHECK(j.u_left > j.u_right);
    CHECK(j.rh_residual < 1e-8);
    CHECK(j.oleinik_margin > 0.0);
    // u monotone nonincreasing throughout
    for (std::size_t i = 1; i < prof.u.size(); ++i)
        CHECK(prof.u[i] <= prof.u[i - 1] + 1e-9);
    // decay rates near the saddle eigenvalues; by symmetry both (sqrt5 - 1)/2
    CHECK(prof.decay_rate_left == doctest::Approx((std::sqrt(5.0) - 1) / 2).epsilon(1e-2));
    CHECK(prof.decay_rate_right == doctest::Approx((std::sqrt(5.0) - 1) / 2).epsilon(1e-2));
}

TEST_CASE("assembled size-1 profile is continuous") {
    auto chord = burgers_chord(0.5, -0.5);
    auto prof = assemble_profile(chord, 1.0);
    REQUIRE(prof.jumps.size() == 1);
    CHECK(prof.jumps[0].continuous);
    CHECK(std::abs(prof.jumps[0].u_left - prof.jumps[0].u_right) < 1e-6);
}

TEST_CASE("quartic intermediate arcs and thresholds") {
    auto f = FluxModel::builtin("quartic");
    ChordFunction chord(f, shock_speed(f, 2.0, -2.0));
    // sufficient threshold for the single local maximum: 2/(2*1) = 1
    CHECK_THROWS_AS(intermediate_trajectories(chord, 1, 1.5), ProfileError);
    auto [left, right] = intermediate_trajectories(chord, 1, 0.1);
    // both arcs start at (z*_2, F(z*_2)) = (0, -2)
    CHECK(left.z.front() == doctest::Approx(0.0).epsilon(1e-10));
    CHECK(left.zp.front() == doctest::Approx(-2.0).epsilon(1e-10));
    CHECK(right.z.back() == doctest::Approx(0.0).epsilon(1e-10));
    CHECK(right.zp.back() == doctest::Approx(-2.0).epsilon(1e-10));
    // terminal events at the neighboring critical values F(-1) = F(1) = -9/4
    CHECK(left.terminal_zp == doctest::Approx(-2.25).epsilon(1e-12));
    CHECK(right.terminal_zp == doctest::Approx(-2.25).epsilon(1e-12));
    // branch relation along both arcs
    for (const auto* arc : {&left, &right}) {
        for (std::size_t i = 0; i < arc->z.size(); ++i) {
            double h = chord.invert_branch(arc->branch, arc->zp[i], true);
            CHECK(std::abs(0.1 * arc->zpp[i] - arc->z[i] + h) < 1e-9 * chord.scale());
        }
    }
}

TEST_CASE("quartic profile carries two admissible jumps") {
    auto f = FluxModel::builtin("quartic");
    ChordFunction chord(f, shock_speed(f, 2.0, -2.0));
    auto prof = assemble_profile(chord, 0.1);
    int discontinuities = 0;
    for (const auto& j : prof.jumps)
        if (!j.continuous) ++discontinuities;
    CHECK(discontinuities == 2);
    for (const auto& j : prof.jumps) {
        if (j.continuous) continue;
        CHECK(j.rh_residual < 1e-8);
        CHECK(j.oleinik_margin > 0.0);
        CHECK(j.u_left > j.u_right);
        // jumps interior to the predicted branch pairs: one crosses z*_1 = -1,
        // the other z*_3 = 1
        bool around_minus = (j.u_left > -1.0 && j.u_right < -1.0);
        bool around_plus = (j.u_left > 1.0 && j.u_right < 1.0);
        CHECK((around_minus || around_plus));
    }
    for (std::size_t i = 1; i < prof.u.size(); ++i)
        CHECK(prof.u[i] <= prof.u[i - 1] + 1e-9);
}

TEST_CASE("profile is C1 in z across glue points") {
    auto chord = burgers_chord(1.0, -1.0);
    auto prof = assemble_profile(chord, 1.0);
    for (const auto& j : prof.jumps) {
        // find the two rows bracketing xi0
        for (std::size_t i = 1; i < prof.xi.size(); ++i) {
            if (prof.xi[i - 1] < j.xi0 && prof.xi[i] >= j.xi0) {
                CHECK(std::abs(prof.z[i] - prof.z[i - 1]) < 1e-6);
                CHECK(std::abs(prof.zp[i] - prof.zp[i - 1]) < 1e-6);
            }
        }
    }
}

TEST_CASE("shift uniqueness under integrator retolerancing") {
    auto chord = burgers_chord(1.0, -1.0);
    AssemblyOptions loose;
    loose.ode_rel_tol = 1e-8;
    auto a = assemble_profile(chord, 1.0);
    auto b = assemble_profile(chord, 1.0, loose);
    // align by the jump location and compare u on a common grid
    double shift = b.jumps[0].xi0 - a.jumps[0].xi0;
    double sup = 0.0;
    for (double x = -8.0; x <= 8.0; x += 0.05) {
        if (std::abs(x - a.jumps[0].xi0) < 0.1) continue;  // skip the jump itself
        sup = std::max(sup, std::abs(a.u_at(x) - b.u_at(x + shift)));
    }
    CHECK(sup < 1e-6);
}

TEST_CASE("csv export schema") {
    auto chord = burgers_chord(0.5, -0.5);
    auto prof = assemble_profile(chord, 1.0);
    auto csv = profile_csv(prof);
    CHECK(csv.rfind("xi,z,dz,ddz,u,q\n", 0) == 0);
    auto jcsv = jumps_csv(prof);
    CHECK(jcsv.rfind("xi0,u_left,u_right,rh_residual,oleinik_margin\n", 0) == 0);
    // continuous profile exports zero jump rows
    CHECK(std::count(jcsv.begin(), jcsv.end(), '\n') == 1);
}
