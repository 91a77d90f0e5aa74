#include "radshock/regularity.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <sstream>

namespace radshock {

namespace {

// truncated power-series helpers (coefficients about u_bar, fixed length)
std::vector<double> series_mul(const std::vector<double>& a, const std::vector<double>& b) {
    std::vector<double> r(a.size(), 0.0);
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; i + j < a.size() && j < b.size(); ++j)
            r[i + j] += a[i] * b[j];
    return r;
}

std::vector<double> series_diff(const std::vector<double>& a) {
    std::vector<double> r(a.size(), 0.0);
    for (std::size_t k = 1; k < a.size(); ++k) r[k - 1] = k * a[k];
    return r;
}

double bisect(const std::function<double(double)>& g, double lo, double hi, int iters = 200) {
    double glo = g(lo);
    for (int i = 0; i < iters; ++i) {
        double mid = 0.5 * (lo + hi);
        double gm = g(mid);
        if (gm == 0.0) return mid;
        if ((gm < 0.0) == (glo < 0.0)) {
            lo = mid;
            glo = gm;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

double factorial(int k) {
    double r = 1.0;
    for (int i = 2; i <= k; ++i) r *= i;
    return r;
}

}  // namespace

ScaledFlux::ScaledFlux(FluxModel flux, double u_plus, double eps)
    : flux_(std::move(flux)), u_plus_(u_plus), eps_(eps) {
    if (eps <= 0.0) throw std::invalid_argument("shock size must be positive");
    double u_minus = u_plus + eps;
    s_ = (flux_(u_minus) - flux_(u_plus)) / eps;
    // locate the single interior critical point of f_eps on (0,1)
    auto fp = [this](double u) { return deriv(u, 1); };
    const int n = 512;
    int crossings = 0;
    double a = 0.0, b = 1.0;
    double prev = fp(0.0);
    for (int i = 1; i <= n; ++i) {
        double u = static_cast<double>(i) / n;
        double cur = fp(u);
        if ((prev < 0.0) != (cur < 0.0)) {
            ++crossings;
            a = static_cast<double>(i - 1) / n;
            b = u;
        }
        prev = cur;
    }
    if (crossings != 1)
        throw RegularityError(
            "scaled flux requires a single interior critical point; use the "
            "nonconvex branch machinery instead");
    u_bar_ = bisect(fp, a, b);
}

ScaledFlux ScaledFlux::from_chord(const ChordFunction& chord) {
    if (!chord.flux_model())
        throw RegularityError("chord carries no flux model; high-order derivatives "
                              "unavailable");
    if (chord.z_stars().size() != 1)
        throw RegularityError("scaled flux requires the convex case (one critical "
                              "point)");
    double eps = chord.u_minus() - chord.u_plus();
    if (eps <= 0.0) throw RegularityError("decreasing shock required (u_minus > u_plus)");
    return ScaledFlux(*chord.flux_model(), chord.u_plus(), eps);
}

ScaledFlux scaled_flux(const ChordFunction& chord) { return ScaledFlux::from_chord(chord); }

double ScaledFlux::f(double u) const {
    double x = u_plus_ + eps_ * u;
    return (flux_(x) - flux_(u_plus_) - s_ * (x - u_plus_)) / (eps_ * eps_);
}

double ScaledFlux::deriv(double u, int order) const {
    if (order <= 0) return f(u);
    double x = u_plus_ + eps_ * u;
    double chain = std::pow(eps_, order - 2);
    if (order == 1) return chain * (flux_.deriv(x, 1) - s_);
    return chain * flux_.deriv_any_order(x, order);
}

std::pair<double, double> sink_equilibrium(const ScaledFlux& sf) {
    double ub = sf.u_bar();
    double f2 = sf.deriv(ub, 2);
    double fv = sf.f(ub);
    double e2 = sf.eps() * sf.eps();
    double disc = 1.0 - 4.0 * e2 * f2 * std::abs(fv);
    if (disc < 0.0)
        throw RegularityError("negative discriminant: shock size at or above eps_0");
    if (std::abs(f2) < 1e-14)
        throw RegularityError("degenerate f'' at the singular point");
    double v2 = (-1.0 + std::sqrt(disc)) / (2.0 * e2 * f2);
    return {ub, v2};
}

std::pair<double, double> sink_eigenvalues(const ScaledFlux& sf) {
    auto [ub, v2] = sink_equilibrium(sf);
    double f2 = sf.deriv(ub, 2);
    double e2 = sf.eps() * sf.eps();
    double disc = 1.0 - 4.0 * e2 * f2 * std::abs(sf.f(ub));
    return {f2 * v2, -std::sqrt(disc) / e2};
}

namespace {

// discriminant of the invariant-curve formula at the singular point
double sink_discriminant(const FluxModel& flux, double u_plus, double eps) {
    ScaledFlux sf(flux, u_plus, eps);
    double ub = sf.u_bar();
    return 1.0 - 4.0 * eps * eps * sf.deriv(ub, 2) * std::abs(sf.f(ub));
}

// curve-reality margin: min over u in [0,1] of the radicand in the
// closed-form invariant curves
double curve_reality_margin(const FluxModel& flux, double u_plus, double eps) {
    ScaledFlux sf(flux, u_plus, eps);
    double worst = std::numeric_limits<double>::infinity();
    const int n = 512;
    for (int i = 0; i <= n; ++i) {
        double u = static_cast<double>(i) / n;
        double r = 1.0 - 4.0 * eps * eps * sf.deriv(u, 2) * std::abs(sf.f(u));
        worst = std::min(worst, r);
    }
    return worst;
}

// root of `g` in eps, bracketed by scanning a geometric grid upward from lo.
// Returns fallback when no sign change is found before the scan fails.
double solve_eps_threshold(const std::function<double(double)>& g, double lo,
                           double hi_cap, double fallback) {
    double prev_eps = lo;
    double prev = g(lo);
    if (prev <= 0.0) return lo;
    for (double eps = lo * 1.05; eps <= hi_cap; eps *= 1.05) {
        double cur;
        try {
            cur = g(eps);
        } catch (const std::exception&) {
            return prev_eps;  // validity boundary reached first
        }
        if (cur <= 0.0)
            return bisect(g, prev_eps, eps);
        prev_eps = eps;
        prev = cur;
    }
    return fallback;
}

}  // namespace

RegularityReport expansion_and_thresholds(const ScaledFlux& sf, int n_max) {
    if (n_max < 1 || n_max > 8)
        throw std::invalid_argument("n_max must be in 1..8");
    RegularityReport rep;
    rep.eps = sf.eps();
    rep.u_bar = sf.u_bar();
    const double eps = sf.eps();
    bool below_eps0 = true;
    double ub = rep.u_bar, v2 = 0.0;
    try {
        auto eq = sink_equilibrium(sf);
        v2 = eq.second;
        auto [l1, l2] = sink_eigenvalues(sf);
        rep.v_bar2 = v2;
        rep.lambda1 = l1;
        rep.lambda2 = l2;
    } catch (const RegularityError&) {
        // shock size at or above eps_0: thresholds are still well defined,
        // but there is no sink and no expansion; classify as 0
        below_eps0 = false;
        rep.v_bar2 = rep.lambda1 = rep.lambda2 =
            std::numeric_limits<double>::quiet_NaN();
    }
    const double e2 = eps * eps;
    const double f2b = sf.deriv(ub, 2);
    const int N = n_max;

    // Taylor series about u_bar, truncated at degree N
    std::vector<double> tf(N + 1), tf1(N + 1), tf2(N + 1);
    for (int k = 0; k <= N; ++k) {
        tf[k] = sf.deriv(ub, k) / factorial(k);
        tf1[k] = sf.deriv(ub, k + 1) / factorial(k);
        tf2[k] = sf.deriv(ub, k + 2) / factorial(k);
    }

    // solve c_j = alpha_j + beta_j w_j = 0 order by order
    std::vector<double> W(N + 1, 0.0);
    W[0] = v2;
    rep.w_bar.assign(N + 1, 0.0);
    rep.w_bar[0] = v2;
    for (int j = 1; below_eps0 && j <= N; ++j) {
        auto Wp = series_diff(W);
        auto WW = series_mul(W, W);
        auto WpW = series_mul(Wp, W);
        std::vector<double> F(N + 1, 0.0);
        for (int k = 0; k <= N; ++k) {
            F[k] = tf[k] - W[k];
        }
        auto t1 = series_mul(tf2, WW);
        auto t2 = series_mul(tf1, WpW);
        for (int k = 0; k <= N; ++k) F[k] -= e2 * (t1[k] + t2[k]);
        double alpha = F[j];
        double beta = -(e2 * (2 + j) * f2b * v2 + 1.0);
        if (std::abs(beta) < 1e-13)
            throw RegularityError("shock size sits exactly on a regularity threshold");
        W[j] = -alpha / beta;
        rep.w_bar[j] = W[j];
    }

    // thresholds in the shock-size family with u_plus held fixed
    const FluxModel& flux = sf.flux();
    double up = sf.u_plus();
    const double lo = 1e-3, cap = 20.0, fallback = cap;
    rep.eps_n.assign(N + 1, 0.0);
    rep.eps_n[0] = solve_eps_threshold(
        [&](double e) { return sink_discriminant(flux, up, e); }, lo, cap, fallback);
    rep.eps_bar = solve_eps_threshold(
        [&](double e) { return curve_reality_margin(flux, up, e); }, lo, cap, fallback);
    for (int j = 1; j <= N; ++j) {
        auto beta_neg = [&](double e) {
            ScaledFlux s(flux, up, e);
            auto [ubx, w0] = sink_equilibrium(s);
            return -(e * e * (2 + j) * s.deriv(ubx, 2) * w0 + 1.0);
        };
        // beta < 0 for small eps, > 0 approaching eps_0; root inside
        rep.eps_n[j] = bisect([&](double e) { return -beta_neg(e); }, lo,
                              rep.eps_n[0] * (1.0 - 1e-13));
    }

    // predicted smoothness class
    if (!below_eps0 || eps >= std::min(rep.eps_bar, rep.eps_n[0])) {
        rep.predicted_class = 0;
    } else {
        int best = 0;
        for (int j = 0; j <= N; ++j)
            if (eps < rep.eps_n[j]) best = j;
        rep.predicted_class = best + 1;
    }
    return rep;
}

bool regular_crossing(const ChordFunction& chord, int k, double tol) {
    int n = chord.pair_count();
    if (k < 1 || k > n - 1) throw std::invalid_argument("index k out of range");
    double z = chord.z_stars()[2 * k - 1];
    // the trajectory crosses the local maximum with speed z' = F(z*_2k) != 0,
    // so its tangent is horizontal, never the vertical direction (0,1)
    return std::abs(chord.F(z)) > tol * chord.scale();
}

std::string RegularityReport::to_text() const {
    std::ostringstream os;
    os.precision(17);
    os << "eps=" << eps << '\n';
    os << "eps0=" << (eps_n.empty() ? 0.0 : eps_n[0]) << '\n';
    os << "eps_bar=" << eps_bar << '\n';
    os << "eps_n=";
    for (std::size_t j = 1; j < eps_n.size(); ++j)
        os << (j > 1 ? "," : "") << eps_n[j];
    os << '\n';
    os << "ubar=" << u_bar << '\n';
    os << "vbar2=" << v_bar2 << '\n';
    os << "lambda1=" << lambda1 << '\n';
    os << "lambda2=" << lambda2 << '\n';
    os << "wbar=";
    for (std::size_t j = 0; j < w_bar.size(); ++j) os << (j > 0 ? "," : "") << w_bar[j];
    os << '\n';
    os << "predicted_class=C" << predicted_class << '\n';
    return os.str();
}

}  // namespace radshock
