#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <random>

#include "radshock/profile.hpp"
#include "radshock/system.hpp"

using namespace radshock;
using Eigen::Vector2d;
using Eigen::VectorXd;

namespace {

SystemModel decoupled_model() {
    return SystemModel(FluxModel::parse_components({"u1^2/2", "3*u2"}),
                       Vector2d(1, 0), Vector2d(1, 0));
}

SystemModel symmetric_model() {
    return SystemModel(FluxModel::parse_components({"u1^2/2 + u2^2/2", "u1*u2"}),
                       Vector2d(1, 0), Vector2d(1, 0));
}

// exact 2-family shock of the symmetric model: the line u_minus - t (1,1)/sqrt2
// is the Hugoniot curve, with speed u1+u2 at u_minus minus t/sqrt2
VectorShock symmetric_shock(const SystemModel& sys, const Vector2d& um, double t) {
    Vector2d up = um - (t / std::sqrt(2.0)) * Vector2d(1, 1);
    return vector_shock(sys, um, up);
}

}  // namespace

TEST_CASE("spectral: decoupled example") {
    SystemModel sys = decoupled_model();
    SpectralData sd = spectral(sys, Vector2d(1, 0));
    CHECK(sd.lambda(0) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(sd.lambda(1) == doctest::Approx(3.0).epsilon(1e-12));
    CHECK((sd.r(1) - Vector2d(1, 0)).norm() < 1e-12);
    CHECK((sd.l(1).transpose() - Vector2d(1, 0)).norm() < 1e-12);
}

TEST_CASE("spectral: symmetric coupled example") {
    SystemModel sys = symmetric_model();
    SpectralData sd = spectral(sys, Vector2d(1, 0.2));
    CHECK(sd.lambda(0) == doctest::Approx(0.8).epsilon(1e-12));
    CHECK(sd.lambda(1) == doctest::Approx(1.2).epsilon(1e-12));
    double is2 = 1.0 / std::sqrt(2.0);
    CHECK((sd.r(2) - Vector2d(is2, is2)).norm() < 1e-10);
    CHECK((sd.l(2).transpose() - Vector2d(is2, is2)).norm() < 1e-10);
    // biorthonormality
    Eigen::MatrixXd I = sd.left * sd.right;
    CHECK((I - Eigen::MatrixXd::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("spectral: Jordan block rejected") {
    SystemModel sys(FluxModel::parse_components({"u2", "0*u1"}), Vector2d(1, 0),
                    Vector2d(1, 0));
    CHECK_THROWS_AS(spectral(sys, Vector2d(0, 0)), SystemError);
}

TEST_CASE("main_assumption examples") {
    SystemModel dec = decoupled_model();
    CHECK(main_assumption(dec, Vector2d(1, 0), 1) == doctest::Approx(1.0).epsilon(1e-12));

    SystemModel sym = symmetric_model();
    CHECK(main_assumption(sym, Vector2d(1, 0.2), 2) ==
          doctest::Approx(0.5).epsilon(1e-10));

    // L orthogonal to l_1 of the decoupled model
    SystemModel ortho(FluxModel::parse_components({"u1^2/2", "3*u2"}), Vector2d(0, 1),
                      Vector2d(1, 0));
    CHECK(std::abs(main_assumption(ortho, Vector2d(1, 0), 1)) < 1e-12);
}

TEST_CASE("decoupled reduction: Phi = (w, c), Fhat = Burgers chord") {
    SystemModel sys = decoupled_model();
    const double c = 0.7;
    VectorShock vs = vector_shock(sys, Vector2d(1, c), Vector2d(-1, c));
    CHECK(vs.s == doctest::Approx(0.0).epsilon(1e-14));
    ReductionMap map = build_reduction(sys, vs, 1);

    CHECK((map.Phi(map.w_minus()) - vs.u_minus).norm() < 1e-12);
    CHECK((map.Phi(map.w_plus()) - vs.u_plus).norm() < 1e-12);
    for (int i = 0; i <= 20; ++i) {
        double w = -1.0 + 2.0 * i / 20.0;
        VectorXd u = map.Phi(w);
        CHECK(std::abs(u(0) - w) < 1e-12);
        CHECK(std::abs(u(1) - c) < 1e-12);
        CHECK(std::abs(map.Fhat(w) - (w * w / 2.0 - 0.5)) < 1e-12);
    }
}

TEST_CASE("Phi independent of the projector basis") {
    SystemModel sys = symmetric_model();
    VectorShock vs = symmetric_shock(sys, Vector2d(1, 0.2), 0.1);
    ReductionMap ref = build_reduction(sys, vs, 2);

    std::mt19937 rng(991);
    std::uniform_real_distribution<double> U(0.3, 3.0);
    for (int trial = 0; trial < 5; ++trial) {
        // random nonzero multiple of the canonical complement of L = e1
        Eigen::MatrixXd basis(1, 2);
        basis << 0.0, (trial % 2 ? -1.0 : 1.0) * U(rng);
        ReductionMap alt(sys, vs, 2, basis);
        for (int i = 0; i <= 20; ++i) {
            double w = ref.w_plus() + (ref.w_minus() - ref.w_plus()) * i / 20.0;
            CHECK((ref.Phi(w) - alt.Phi(w)).norm() < 1e-10);
        }
    }
}

TEST_CASE("symmetric reduction matches the grid oracle") {
    SystemModel sys = symmetric_model();
    Vector2d um(1, 0.2);
    VectorShock vs = symmetric_shock(sys, um, 0.1);
    ReductionMap map = build_reduction(sys, vs, 2);

    // oracle: with G.u = w fixed, scan u2 on a fine grid minimizing the
    // transversal constraint |F_2(u)|, then polish by bisection
    auto oracle_u2 = [&](double w) {
        auto res = [&](double y) {
            Vector2d u(w, y);
            Vector2d F = sys.f(u) - sys.f(vs.u_minus) - vs.s * (u - vs.u_minus);
            return F(1);
        };
        double best_y = 0.0, best = 1e300;
        const int N = 100000;
        for (int i = 0; i <= N; ++i) {
            double y = -0.3 + 0.8 * i / N;
            double r = std::abs(res(y));
            if (r < best) {
                best = r;
                best_y = y;
            }
        }
        double lo = best_y - 1e-5, hi = best_y + 1e-5;
        double flo = res(lo);
        for (int it = 0; it < 100; ++it) {
            double mid = 0.5 * (lo + hi), fm = res(mid);
            if ((fm < 0) == (flo < 0)) {
                lo = mid;
                flo = fm;
            } else {
                hi = mid;
            }
        }
        return 0.5 * (lo + hi);
    };

    for (int i = 0; i <= 10; ++i) {
        double w = map.w_plus() + (map.w_minus() - map.w_plus()) * i / 10.0;
        VectorXd u = map.Phi(w);
        CHECK(std::abs(u(0) - w) < 1e-12);
        CHECK(std::abs(u(1) - oracle_u2(w)) < 1e-6);
        CHECK(map.constraint_residual(w) < 1e-10);
    }
}

TEST_CASE("reduced chord invariants: Fhat roots and slope signs") {
    SystemModel sys = symmetric_model();
    VectorShock vs = symmetric_shock(sys, Vector2d(1, 0.2), 0.1);
    ReductionMap map = build_reduction(sys, vs, 2);

    CHECK(std::abs(map.Fhat(map.w_minus())) < 1e-10);
    CHECK(std::abs(map.Fhat(map.w_plus())) < 1e-10);
    CHECK(map.Fhat_prime(map.w_minus()) > 0.0);
    CHECK(map.Fhat_prime(map.w_plus()) < 0.0);
    // interior of a decreasing admissible shock: Fhat < 0
    for (int i = 1; i < 10; ++i) {
        double w = map.w_plus() + (map.w_minus() - map.w_plus()) * i / 10.0;
        CHECK(map.Fhat(w) < 0.0);
    }
}

TEST_CASE("d2Fhat/dw2 converges to the spectral leading-order value") {
    SystemModel sys = symmetric_model();
    Vector2d um(1, 0.2);
    double ref = convexity_reference(sys, um, 2);
    CHECK(ref == doctest::Approx(4.0).epsilon(1e-4));  // sqrt2 / ((1/sqrt2)(1/2))

    double err_prev = 1e300;
    for (double size : {1e-2, 1e-3}) {
        VectorShock vs = symmetric_shock(sys, um, size);
        ReductionMap map = build_reduction(sys, vs, 2);
        double probe = map.Fhat_second(0.5 * (map.w_minus() + map.w_plus()));
        double err = std::abs(probe - ref);
        CHECK(err < err_prev);
        CHECK(err < 0.5);
        err_prev = err;
    }
    CHECK(err_prev < 0.05);
}

TEST_CASE("lift: decoupled profile is (Burgers profile, constant)") {
    SystemModel sys = decoupled_model();
    const double c = 0.7;
    VectorShock vs = vector_shock(sys, Vector2d(1, c), Vector2d(-1, c));
    ReductionMap map = build_reduction(sys, vs, 1);

    ChordFunction chord = map.reduced_chord();
    RadiativeProfile scalar = assemble_profile(chord, 1.0);
    SystemProfile lifted = lift_profile(map, scalar);

    CHECK(lifted.residual_flux < 1e-6);
    CHECK(lifted.residual_constraint < 1e-10);
    for (std::size_t i = 0; i < lifted.u.size(); i += 50) {
        CHECK(std::abs(lifted.u[i](0) - scalar.u[i]) < 1e-10);
        CHECK(std::abs(lifted.u[i](1) - c) < 1e-10);
    }
    // endpoint limits
    CHECK((lifted.u.front() - vs.u_minus).norm() < 1e-5);
    CHECK((lifted.u.back() - vs.u_plus).norm() < 1e-5);
    // size-2 Burgers at eps=1 has one genuine jump; lifted accordingly
    REQUIRE(lifted.jumps.size() == 1);
    CHECK(lifted.jumps[0].rh_residual < 1e-8);
}

TEST_CASE("lift: coupled example satisfies the profile equations") {
    SystemModel sys = symmetric_model();
    VectorShock vs = symmetric_shock(sys, Vector2d(1, 0.2), 0.1);
    ReductionMap map = build_reduction(sys, vs, 2);

    ChordFunction chord = map.reduced_chord();
    RadiativeProfile scalar = assemble_profile(chord, 1.0);
    SystemProfile lifted = lift_profile(map, scalar);

    CHECK(lifted.residual_flux < 1e-6);
    CHECK(lifted.residual_constraint < 1e-10);
    CHECK((lifted.u.front() - vs.u_minus).norm() < 1e-4);
    CHECK((lifted.u.back() - vs.u_plus).norm() < 1e-4);
    // small shock: the profile is continuous
    for (const auto& ij : lifted.jumps) CHECK(ij.rh_residual < 1e-8);
}

TEST_CASE("translate_admissibility: decoupled inner jump is a Lax/Liu shock") {
    SystemModel sys = decoupled_model();
    const double c = 0.7;
    VectorShock vs = vector_shock(sys, Vector2d(1, c), Vector2d(-1, c));
    ReductionMap map = build_reduction(sys, vs, 1);

    ChordFunction chord = map.reduced_chord();
    RadiativeProfile scalar = assemble_profile(chord, 1.0);
    REQUIRE(!scalar.jumps.empty());
    const JumpRecord& jr = scalar.jumps[0];
    REQUIRE(!jr.continuous);

    VectorXd u_l = map.Phi(jr.u_left);
    VectorXd u_r = map.Phi(jr.u_right);
    CHECK(u_l(0) > 0.0);
    CHECK(u_r(0) < 0.0);

    JumpTranslation rep = translate_admissibility(map, u_l, u_r);
    CHECK(!rep.no_jump);
    CHECK(rep.rh_residual < 1e-8);
    CHECK(rep.lax);
    CHECK(rep.lax_separation);
    CHECK(rep.sign_consistent);
    CHECK(rep.sign_samples > 40);
    CHECK(rep.liu);
    CHECK(rep.liu_min_margin > 0.0);
    CHECK(rep.speed_at_end == doctest::Approx(map.speed()).epsilon(1e-6));
}

TEST_CASE("translate_admissibility: trivial jump flagged") {
    SystemModel sys = symmetric_model();
    VectorShock vs = symmetric_shock(sys, Vector2d(1, 0.2), 0.1);
    ReductionMap map = build_reduction(sys, vs, 2);
    JumpTranslation rep = translate_admissibility(map, vs.u_minus, vs.u_minus);
    CHECK(rep.no_jump);
    CHECK(rep.liu);
}

TEST_CASE("translate_admissibility: whole coupled shock sign consistency") {
    SystemModel sys = symmetric_model();
    VectorShock vs = symmetric_shock(sys, Vector2d(1, 0.2), 0.1);
    ReductionMap map = build_reduction(sys, vs, 2);
    JumpTranslation rep = translate_admissibility(map, vs.u_minus, vs.u_plus);
    CHECK(rep.rh_residual < 1e-10);
    CHECK(rep.lax);
    CHECK(rep.sign_consistent);
    CHECK(rep.liu);
    CHECK(rep.speed_at_end == doctest::Approx(map.speed()).epsilon(1e-6));
}

TEST_CASE("general R rescaling factors") {
    SystemModel sys(FluxModel::parse_components({"u1^2/2", "3*u2"}), Vector2d(1, 0),
                    Vector2d(1, 0), 4.0);
    VectorShock vs = vector_shock(sys, Vector2d(1, 0.3), Vector2d(-1, 0.3));
    ReductionMap map = build_reduction(sys, vs, 1);
    CHECK(map.space_factor() == doctest::Approx(2.0));
    CHECK(map.q_factor() == doctest::Approx(0.5));
    CHECK(map.unit_speed() == doctest::Approx(2.0 * vs.s).epsilon(1e-14));
    // the unit-frame chord is sqrt(R) times the raw reduced chord
    ChordFunction chord = map.reduced_chord();
    for (int i = 1; i < 8; ++i) {
        double w = -1.0 + 2.0 * i / 8.0;
        CHECK(chord.F(w) == doctest::Approx(2.0 * map.Fhat(w)).epsilon(1e-9));
    }
}
