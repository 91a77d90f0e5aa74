#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <random>

#include "radshock/ode.hpp"
#include "radshock/regularity.hpp"

using namespace radshock;

namespace {

// independent oracle: root of e^2 f'' v^2 + v - f(ubar) = 0 nearer zero,
// located by bisection
double v2_oracle(const ScaledFlux& sf) {
    double ub = sf.u_bar();
    double f2 = sf.deriv(ub, 2);
    double fv = sf.f(ub);
    double e2 = sf.eps() * sf.eps();
    auto g = [&](double v) { return e2 * f2 * v * v + v - fv; };
    double lo = 0.0, hi = fv;  // g(0) = -f > 0, g(f) = e2 f2 f^2 < 0... bracket by scan
    if (g(lo) * g(hi) > 0.0) {
        hi = 2.0 * fv;
        while (g(lo) * g(hi) > 0.0) hi *= 2.0;
    }
    for (int i = 0; i < 200; ++i) {
        double mid = 0.5 * (lo + hi);
        if ((g(mid) > 0.0) == (g(lo) > 0.0))
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

// generic 2x2 eigenvalue oracle via the characteristic polynomial
std::pair<double, double> eigen2_oracle(double a, double b, double c, double d) {
    double tr = a + d, det = a * d - b * c;
    double disc = std::sqrt(tr * tr - 4 * det);
    double l1 = 0.5 * (tr + disc), l2 = 0.5 * (tr - disc);
    if (l1 < l2) std::swap(l1, l2);
    return {l1, l2};  // descending
}

}  // namespace

TEST_CASE("burgers scaled flux is eps-independent") {
    auto f = FluxModel::builtin("burgers");
    for (double eps : {0.3, 1.0, 1.3}) {
        ScaledFlux sf(f, -eps / 2.0, eps);
        for (double u : {0.1, 0.25, 0.5, 0.9}) {
            CHECK(sf.f(u) == doctest::Approx(0.5 * u * (u - 1.0)).epsilon(1e-13));
        }
        CHECK(sf.u_bar() == doctest::Approx(0.5).epsilon(1e-10));
        CHECK(sf.f(0.5) == doctest::Approx(-0.125).epsilon(1e-13));
        CHECK(sf.f(0.0) == doctest::Approx(0.0));
        CHECK(sf.f(1.0) == doctest::Approx(0.0));
    }
}

TEST_CASE("small-shock limit of the scaled flux") {
    auto f = FluxModel::parse("u^4");
    ScaledFlux sf(f, 1.0, 1e-3);  // f''(1) = 12
    for (int i = 0; i <= 20; ++i) {
        double u = i / 20.0;
        CHECK(std::abs(sf.f(u) - 6.0 * u * (u - 1.0)) < 1e-2);
    }
}

TEST_CASE("sink equilibrium frozen values") {
    auto f = FluxModel::builtin("burgers");
    {
        ScaledFlux sf(f, -0.5, 1.0);
        auto [ub, v2] = sink_equilibrium(sf);
        CHECK(ub == doctest::Approx(0.5).epsilon(1e-10));
        CHECK(v2 == doctest::Approx((-1.0 + std::sqrt(0.5)) / 2.0).epsilon(1e-12));
        CHECK(v2 == doctest::Approx(-0.146446609406726).epsilon(1e-10));
    }
    {
        ScaledFlux sf(f, -5e-5, 1e-4);
        auto [ub, v2] = sink_equilibrium(sf);
        CHECK(v2 == doctest::Approx(-0.125).epsilon(1e-8));
    }
    {
        double eps = std::sqrt(2.0) * (1.0 - 1e-12);
        ScaledFlux sf(f, -eps / 2, eps);
        auto [ub, v2] = sink_equilibrium(sf);
        CHECK(v2 == doctest::Approx(-0.25).epsilon(1e-5));
    }
}

TEST_CASE("sink eigenvalues frozen values") {
    auto f = FluxModel::builtin("burgers");
    {
        ScaledFlux sf(f, -0.5, 1.0);
        auto [l1, l2] = sink_eigenvalues(sf);
        CHECK(l1 == doctest::Approx(-0.146446609406726).epsilon(1e-10));
        CHECK(l2 == doctest::Approx(-std::sqrt(0.5)).epsilon(1e-12));
    }
    {
        double eps = std::sqrt(2.0) * (1.0 - 1e-12);
        ScaledFlux sf(f, -eps / 2, eps);
        auto [l1, l2] = sink_eigenvalues(sf);
        CHECK(std::abs(l2) < 1e-5);
        CHECK(l1 == doctest::Approx(-1.0 / (2.0 * eps * eps)).epsilon(1e-5));
    }
}

TEST_CASE("equilibrium and eigenvalues match independent oracles") {
    std::mt19937 rng(17);
    std::uniform_real_distribution<double> pick_eps(0.2, 1.1);
    std::uniform_real_distribution<double> pick_up(-1.0, 0.0);
    const char* fluxes[] = {"u^2/2", "u^2/2 + u^3/12", "u^2/2 + u^4/40",
                            "exp(u)/2 + u^2/4"};
    for (const char* e : fluxes) {
        auto f = FluxModel::parse(e);
        for (int i = 0; i < 5; ++i) {
            double eps = pick_eps(rng), up = pick_up(rng);
            ScaledFlux sf(f, up, eps);
            double ub = sf.u_bar();
            double f2 = sf.deriv(ub, 2), f3 = sf.deriv(ub, 3);
            double e2 = eps * eps;
            double disc = 1.0 - 4.0 * e2 * f2 * std::abs(sf.f(ub));
            if (disc <= 1e-4) continue;
            auto [ub2, v2] = sink_equilibrium(sf);
            CHECK(std::abs(v2 - v2_oracle(sf)) < 1e-10);
            auto [l1, l2] = sink_eigenvalues(sf);
            // displayed Jacobian at the sink is lower triangular
            auto [o1, o2] =
                eigen2_oracle(f2 * v2, 0.0, -f3 * v2 * v2, -2.0 * f2 * v2 - 1.0 / e2);
            CHECK(std::abs(l1 - o1) < 1e-10);
            CHECK(std::abs(l2 - o2) < 1e-10);
            // residual of the defining quadratic
            CHECK(std::abs(e2 * f2 * v2 * v2 + v2 - sf.f(ub)) < 1e-12);
        }
    }
}

TEST_CASE("burgers thresholds equal the closed form") {
    auto f = FluxModel::builtin("burgers");
    ScaledFlux sf(f, -0.5, 1.0);
    auto rep = expansion_and_thresholds(sf, 5);
    for (int n = 1; n <= 5; ++n) {
        double expected = 2.0 * std::sqrt(2.0 * n) / (n + 1);
        CHECK(std::abs(rep.eps_n[n - 1] - expected) < 1e-12);
    }
    // strictly decreasing
    for (std::size_t j = 1; j < rep.eps_n.size(); ++j)
        CHECK(rep.eps_n[j] < rep.eps_n[j - 1]);
    // quadratic flux: w_1 vanishes with f'''
    CHECK(std::abs(rep.w_bar[1]) < 1e-12);
    CHECK(rep.w_bar[0] == doctest::Approx((-1.0 + std::sqrt(0.5)) / 2.0).epsilon(1e-12));
}

TEST_CASE("w1 matches the closed form") {
    auto f = FluxModel::parse("u^2/2 + u^3/12");
    ScaledFlux sf(f, -0.3, 0.5);
    auto rep = expansion_and_thresholds(sf, 3);
    double f3 = sf.deriv(sf.u_bar(), 3);
    double expected = f3 * rep.v_bar2 * rep.v_bar2 / (rep.lambda2 - rep.lambda1);
    CHECK(rep.w_bar[1] == doctest::Approx(expected).epsilon(1e-10));
}

TEST_CASE("predicted class steps at the thresholds") {
    auto f = FluxModel::builtin("burgers");
    struct Case {
        double eps;
        int cls;
    } cases[] = {{1.45, 0}, {1.40, 1}, {1.35, 1}, {1.30, 2}, {1.0, 5}};
    for (auto [eps, cls] : cases) {
        ScaledFlux sf(f, -eps / 2, eps);
        auto rep = expansion_and_thresholds(sf, 4);
        if (cls >= 5)
            CHECK(rep.predicted_class >= 5);
        else
            CHECK(rep.predicted_class == cls);
    }
}

TEST_CASE("threshold monotonicity for a cubic-perturbed flux") {
    auto f = FluxModel::parse("u^2/2 + u^3/12");
    ScaledFlux sf(f, -0.3, 0.5);
    auto rep = expansion_and_thresholds(sf, 5);
    for (std::size_t j = 1; j < rep.eps_n.size(); ++j)
        CHECK(rep.eps_n[j] < rep.eps_n[j - 1]);
    CHECK(rep.eps_bar > 0.0);
}

TEST_CASE("orbit fit recovers the expansion coefficients") {
    auto f = FluxModel::parse("u^2/2 + u^3/12");
    double eps = 0.5, up = -0.3;
    ScaledFlux sf(f, up, eps);
    auto rep = expansion_and_thresholds(sf, 5);
    double ub = sf.u_bar();
    double e2 = eps * eps;

    // integrate the desingularized system from the (1,0) saddle
    auto rhs = [&](double, const State2& x) -> State2 {
        double fp = sf.deriv(x[0], 1), f2 = sf.deriv(x[0], 2);
        return {fp * x[1], (-e2 * f2 * x[1] * x[1] - x[1] + sf.f(x[0])) / e2};
    };
    double fp1 = sf.deriv(1.0, 1), f21 = sf.deriv(1.0, 2), f31 = sf.deriv(1.0, 3);
    double a = f21 * 0.0, b = fp1, c = -f31 + fp1 / e2, d = -1.0 / e2;
    double tr = a + d, det = a * d - b * c;
    double lp = 0.5 * (tr + std::sqrt(tr * tr - 4 * det));
    double delta = 1e-9;
    State2 x0 = {1.0 - delta, -delta * lp / fp1};
    OdeOptions opts;
    opts.rel_tol = 1e-12;
    opts.abs_tol = 1e-14;
    opts.t_budget = 1e5;
    auto res = integrate_rk45(rhs, x0, 0.0, 1.0,
                              [&](const State2& x) { return x[0] - (ub + 1e-4); }, opts);
    REQUIRE(res.event_hit);

    // least-squares polynomial fit of v(u) about ub on a small window
    std::vector<double> xs, ys;
    for (const auto& s : res.samples) {
        double x = s.x[0] - ub;
        if (x > 1e-3 && x < 0.05) {
            xs.push_back(x);
            ys.push_back(s.x[1]);
        }
    }
    REQUIRE(xs.size() > 20);
    const int deg = 5;
    Eigen::MatrixXd A(xs.size(), deg + 1);
    Eigen::VectorXd y(xs.size());
    const double sc = 0.05;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        double t = xs[i] / sc, p = 1.0;
        for (int j = 0; j <= deg; ++j) {
            A(i, j) = p;
            p *= t;
        }
        y(i) = ys[i];
    }
    Eigen::VectorXd coef = A.householderQr().solve(y);
    for (int j = 0; j <= 3; ++j) {
        double fitted = coef(j) / std::pow(sc, j);
        CHECK(std::abs(fitted - rep.w_bar[j]) < 1e-4);
    }
}

TEST_CASE("regular crossing diagnostic for the quartic") {
    auto f = FluxModel::builtin("quartic");
    ChordFunction chord(f, shock_speed(f, 2.0, -2.0));
    CHECK(regular_crossing(chord, 1));
}

TEST_CASE("scaled flux rejects the nonconvex case") {
    auto f = FluxModel::builtin("quartic");
    ChordFunction chord(f, shock_speed(f, 2.0, -2.0));
    CHECK_THROWS_AS(scaled_flux(chord), RegularityError);
}

TEST_CASE("report export carries the expected keys") {
    auto f = FluxModel::builtin("burgers");
    ScaledFlux sf(f, -0.65, 1.3);
    auto rep = expansion_and_thresholds(sf, 3);
    auto text = rep.to_text();
    for (const char* key : {"eps0=", "eps_bar=", "eps_n=", "ubar=", "vbar2=",
                            "lambda1=", "lambda2=", "wbar=", "predicted_class=C"})
        CHECK(text.find(key) != std::string::npos);
    CHECK(rep.predicted_class == 2);  // 1.3 < 4/3
}
