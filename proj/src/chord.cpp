#include "radshock/chord.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace radshock {

namespace {

constexpr int kScanSamples = 1 << 12;

// Bracketed root of g on [a,b], bisection refined with safeguarded Newton.
double refine_root(const std::function<double(double)>& g,
                   const std::function<double(double)>& gprime, double a, double b,
                   double tol) {
    double ga = g(a);
    double gb = g(b);
    if (ga == 0.0) return a;
    if (gb == 0.0) return b;
    double x = 0.5 * (a + b);
    for (int it = 0; it < 200; ++it) {
        double gx = g(x);
        if (gx == 0.0 || 0.5 * (b - a) < tol) return x;
        if ((gx < 0.0) == (ga < 0.0)) {
            a = x;
            ga = gx;
        } else {
            b = x;
        }
        double step = gprime ? gprime(x) : 0.0;
        double xn = (step != 0.0) ? x - gx / step : 0.5 * (a + b);
        x = (xn > a && xn < b) ? xn : 0.5 * (a + b);
    }
    return x;
}

}  // namespace

ScalarFunc ScalarFunc::from_flux(const FluxModel& flux) {
    ScalarFunc s;
    s.f = [flux](double u) { return flux(u); };
    s.deriv = [flux](double u, int order) { return flux.deriv(u, order); };
    return s;
}

ScalarFunc ScalarFunc::from_callable(std::function<double(double)> f, double h) {
    ScalarFunc s;
    s.f = f;
    s.deriv = [f, h](double u, int order) -> double {
        switch (order) {
            case 1: return (f(u + h) - f(u - h)) / (2.0 * h);
            case 2: return (f(u + h) - 2.0 * f(u) + f(u - h)) / (h * h);
            case 3:
                return (f(u + 2 * h) - 2.0 * f(u + h) + 2.0 * f(u - h) - f(u - 2 * h)) /
                       (2.0 * h * h * h);
            default: throw std::invalid_argument("derivative order must be 1..3");
        }
    };
    return s;
}

ShockTriple shock_speed(const ScalarFunc& f, double u_minus, double u_plus) {
    if (u_minus == u_plus)
        throw std::invalid_argument("coincident states");
    ShockTriple t;
    t.u_minus = u_minus;
    t.u_plus = u_plus;
    t.s = (f.f(u_plus) - f.f(u_minus)) / (u_plus - u_minus);
    return t;
}

ShockTriple shock_speed(const FluxModel& f, double u_minus, double u_plus) {
    return shock_speed(ScalarFunc::from_flux(f), u_minus, u_plus);
}

ChordFunction::ChordFunction(ScalarFunc f, ShockTriple triple)
    : f_(std::move(f)), triple_(triple) {
    scale_ = std::max(1.0, std::abs(triple_.u_minus - triple_.u_plus));
    build();
}

ChordFunction::ChordFunction(const FluxModel& flux, ShockTriple triple)
    : ChordFunction(ScalarFunc::from_flux(flux), triple) {
    flux_ = flux;
}

double ChordFunction::F(double u) const {
    return f_.f(u) - f_.f(triple_.u_minus) - triple_.s * (u - triple_.u_minus);
}

double ChordFunction::Fprime(double u) const { return f_.deriv(u, 1) - triple_.s; }

double ChordFunction::F2(double u) const { return f_.deriv(u, 2); }

void ChordFunction::build() {
    const double lo = std::min(triple_.u_plus, triple_.u_minus);
    const double hi = std::max(triple_.u_plus, triple_.u_minus);
    const double span = hi - lo;
    const double root_tol = 1e-14 * scale_;

    // residual of the RH relation is a precondition
    if (std::abs(F(triple_.u_plus)) > 1e-10 * scale_)
        throw std::invalid_argument("triple does not satisfy the Rankine-Hugoniot relation");

    z_star_.clear();
    double prev_u = lo;
    double prev_g = Fprime(lo);
    for (int i = 1; i <= kScanSamples; ++i) {
        double u = lo + span * static_cast<double>(i) / kScanSamples;
        double g = Fprime(u);
        if (prev_g == 0.0 && i == 1) {
            // endpoint critical; skip, interior roots only
        } else if ((prev_g < 0.0) != (g < 0.0)) {
            double r = refine_root([this](double x) { return Fprime(x); },
                                   [this](double x) { return F2(x); }, prev_u, u, root_tol);
            if (r > lo + root_tol && r < hi - root_tol) z_star_.push_back(r);
        }
        prev_u = u;
        prev_g = g;
    }

    // Oleinik sanity: F must be < 0 at all interior critical points and at a
    // dense sample; otherwise no monotone-branch construction exists.
    double worst = std::numeric_limits<double>::infinity();
    for (double z : z_star_) worst = std::min(worst, -F(z));
    for (int i = 1; i < kScanSamples; ++i) {
        double u = lo + span * static_cast<double>(i) / kScanSamples;
        worst = std::min(worst, -F(u));
    }
    if (worst <= 0.0)
        throw AdmissibilityError("Oleinik violated: F(u;s) >= 0 strictly inside (u+, u-)");

    // degenerate interior critical point -> cubic mollification, once
    if (!mollified_) {
        for (double z : z_star_) {
            if (std::abs(F2(z)) < 1e-8 * scale_) {
                eta_ = 1e-6 * scale_;
                mollified_ = true;
                ScalarFunc base = f_;
                double up = triple_.u_plus;
                double eta = eta_;
                ScalarFunc g;
                g.f = [base, up, eta](double u) {
                    double d = u - up;
                    return base.f(u) + eta * d * d * d;
                };
                g.deriv = [base, up, eta](double u, int order) {
                    double d = u - up;
                    switch (order) {
                        case 1: return base.deriv(u, 1) + 3.0 * eta * d * d;
                        case 2: return base.deriv(u, 2) + 6.0 * eta * d;
                        case 3: return base.deriv(u, 3) + 6.0 * eta;
                        default: return base.deriv(u, order);
                    }
                };
                f_ = g;
                triple_ = shock_speed(f_, triple_.u_minus, triple_.u_plus);
                build();
                return;
            }
        }
    }

    if (z_star_.size() % 2 == 0)
        throw AdmissibilityError(
            "even number of interior critical points; chord decomposition failed");

    branches_.clear();
    std::vector<double> nodes;
    nodes.push_back(triple_.u_plus);
    for (double z : z_star_) nodes.push_back(z);
    nodes.push_back(triple_.u_minus);
    for (std::size_t i = 0; i + 1 < nodes.size(); ++i) {
        BranchInterval b;
        b.lo = nodes[i];
        b.hi = nodes[i + 1];
        b.increasing = (i % 2 == 1);  // branches alternate: decreasing first
        b.F_lo = F(b.lo);
        b.F_hi = F(b.hi);
        branches_.push_back(b);
    }

    m_ = 0.0;
    for (double z : z_star_) m_ = std::max(m_, -F(z));
}

double ChordFunction::invert_branch(int i, double y, bool clamp) const {
    const BranchInterval& b = branch(i);
    double ylo = std::min(b.F_lo, b.F_hi);
    double yhi = std::max(b.F_lo, b.F_hi);
    if (y < ylo || y > yhi) {
        double tol = 1e-9 * scale_;
        if (clamp && y >= ylo - tol && y <= yhi + tol) {
            y = std::clamp(y, ylo, yhi);
        } else if (clamp) {
            y = std::clamp(y, ylo, yhi);
        } else {
            throw std::domain_error("target value outside branch range");
        }
    }
    double u = refine_root([this, y](double x) { return F(x) - y; },
                           [this](double x) { return Fprime(x); }, b.lo, b.hi,
                           1e-15 * scale_);
    return u;
}

AdmissibilityReport ChordFunction::check_admissibility() const {
    AdmissibilityReport rep;
    const double lo = std::min(triple_.u_plus, triple_.u_minus);
    const double hi = std::max(triple_.u_plus, triple_.u_minus);
    const int n = 1 << 13;
    const double h = (hi - lo) / n;

    // Lipschitz estimate for F' to bound F between samples
    double lip = 0.0;
    for (int i = 0; i <= 256; ++i) {
        double u = lo + (hi - lo) * i / 256.0;
        lip = std::max(lip, std::abs(F2(u)));
    }
    // chord inequality, oriented: a decreasing shock needs F < 0 inside,
    // an increasing one F > 0
    const double sigma = (triple_.u_minus > triple_.u_plus) ? 1.0 : -1.0;
    double margin = std::numeric_limits<double>::infinity();
    for (int i = 1; i < n; ++i) {
        double u = lo + h * i;
        margin = std::min(margin, -sigma * F(u));
    }
    // between samples F can rise at most lip*h^2/8 above the chord of values
    rep.oleinik_margin = margin - lip * h * h / 8.0;
    rep.oleinik_strict = rep.oleinik_margin > 1e-10 * scale_;

    rep.lax_strict = (f_.deriv(triple_.u_minus, 1) - triple_.s > 0.0) &&
                     (triple_.s - f_.deriv(triple_.u_plus, 1) > 0.0);

    double minf2 = std::numeric_limits<double>::infinity();
    for (double z : z_star_) minf2 = std::min(minf2, std::abs(f_.deriv(z, 2)));
    rep.min_f2_at_critical = z_star_.empty() ? 0.0 : minf2;
    rep.nondegenerate = !z_star_.empty() && minf2 > 1e-8 * scale_;
    return rep;
}

}  // namespace radshock
