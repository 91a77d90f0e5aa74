#ifndef RADSHOCK_REGULARITY_HPP
#define RADSHOCK_REGULARITY_HPP

#include <string>
#include <vector>

#include "radshock/chord.hpp"

namespace radshock {

class RegularityError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Rescaled chord f_eps(u) = F(u_plus + eps*u; s) / eps^2 on [0,1], where eps
// is the shock size u_minus - u_plus. f_eps(0) = f_eps(1) = 0 and f_eps has a
// single interior critical point u_bar for convex fluxes.
class ScaledFlux {
public:
    // Shock family with fixed left-of-chord state u_plus and size eps.
    ScaledFlux(FluxModel flux, double u_plus, double eps);
    // From a built chord (convex case, single critical point); requires the
    // chord to carry its flux model.
    static ScaledFlux from_chord(const ChordFunction& chord);

    double eps() const { return eps_; }
    double u_plus() const { return u_plus_; }
    double speed() const { return s_; }
    double u_bar() const { return u_bar_; }
    const FluxModel& flux() const { return flux_; }

    double f(double u) const;
    // d^k f_eps / du^k = eps^(k-2) * d^k F / dx^k at x = u_plus + eps*u.
    double deriv(double u, int order) const;

private:
    FluxModel flux_;
    double u_plus_ = 0.0;
    double eps_ = 0.0;
    double s_ = 0.0;
    double u_bar_ = 0.0;
};

ScaledFlux scaled_flux(const ChordFunction& chord);

// Sink of the desingularized phase-plane system: (u_bar, v_bar2) with
// eps^2 f'' v^2 + v - f = 0 at u_bar, root closer to zero.
// Throws RegularityError when the discriminant is negative (eps >= eps_0).
std::pair<double, double> sink_equilibrium(const ScaledFlux& sf);

// Eigenvalues at the sink: lambda1 = f''(u_bar) v_bar2,
// lambda2 = -sqrt(1 - 4 eps^2 f''(u_bar) |f(u_bar)|) / eps^2.
std::pair<double, double> sink_eigenvalues(const ScaledFlux& sf);

struct RegularityReport {
    double eps = 0.0;       // shock size analyzed
    double eps_bar = 0.0;   // largest eps for which the invariant curves stay real
    std::vector<double> eps_n;  // eps_0 > eps_1 > ...; size n+1 means C^(n+1) below eps_n
    double u_bar = 0.0;
    double v_bar2 = 0.0;
    double lambda1 = 0.0;
    double lambda2 = 0.0;
    std::vector<double> w_bar;  // expansion coefficients w_0..w_nmax
    // Profile smoothness class: u is C^m with m = predicted_class; 0 means
    // eps >= eps_0 (a jump is possible).
    int predicted_class = 0;

    std::string to_text() const;  // flat key=value export
};

// Expansion coefficients w_j (series solve of c_j = alpha_j + beta_j w_j = 0)
// and thresholds eps_n from beta_n(w_0(eps)) = 0, n_max <= 8.
RegularityReport expansion_and_thresholds(const ScaledFlux& sf, int n_max);

// Nonconvex diagnostic: a local maximum z*_2k of F is a "regular crossing"
// when the trajectory crosses it with nonzero speed (tangent not vertical).
bool regular_crossing(const ChordFunction& chord, int k, double tol = 1e-10);

}  // namespace radshock

#endif
