#ifndef RADSHOCK_CHORD_HPP
#define RADSHOCK_CHORD_HPP

#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "radshock/flux.hpp"

namespace radshock {

class AdmissibilityError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Scalar function with derivatives up to order 3. FluxModel converts to
// this; the system module wraps its reduced flux numerically.
struct ScalarFunc {
    std::function<double(double)> f;
    std::function<double(double, int)> deriv;  // order 1..3

    static ScalarFunc from_flux(const FluxModel& flux);
    // Numeric derivatives by central differences with step h.
    static ScalarFunc from_callable(std::function<double(double)> f, double h = 1e-6);
};

// Shock triple (u_minus, u_plus, s) with s from the Rankine-Hugoniot chord.
struct ShockTriple {
    double u_minus = 0.0;
    double u_plus = 0.0;
    double s = 0.0;

    double size() const { return u_minus - u_plus; }
};

ShockTriple shock_speed(const ScalarFunc& f, double u_minus, double u_plus);
ShockTriple shock_speed(const FluxModel& f, double u_minus, double u_plus);

struct BranchInterval {
    double lo = 0.0;
    double hi = 0.0;
    bool increasing = false;  // F increasing on the branch
    double F_lo = 0.0;        // F at lo
    double F_hi = 0.0;        // F at hi
};

struct AdmissibilityReport {
    bool oleinik_strict = false;
    bool lax_strict = false;
    bool nondegenerate = false;
    double oleinik_margin = 0.0;  // min over interior u of -F(u;s)
    double min_f2_at_critical = 0.0;
};

// Chord function F(u;s) = f(u) - f(u_pm) - s(u - u_pm) on [u_plus, u_minus],
// decomposed into maximal monotone branches I_1..I_2n with inverses h_i.
// F is decreasing on odd branches and increasing on even ones; the interior
// critical points z*_1 < ... < z*_{2n-1} alternate local min / local max.
class ChordFunction {
public:
    // Throws AdmissibilityError if F >= 0 strictly inside (u_plus, u_minus).
    // A degenerate critical point (|F''| below tolerance) triggers the cubic
    // mollification f -> f + eta (u - u_plus)^3 and a rebuild; `mollified()`
    // reports the perturbation.
    ChordFunction(ScalarFunc f, ShockTriple triple);
    ChordFunction(const FluxModel& flux, ShockTriple triple);

    double F(double u) const;
    double Fprime(double u) const;
    double F2(double u) const;

    const ShockTriple& triple() const { return triple_; }
    const ScalarFunc& func() const { return f_; }
    double u_plus() const { return triple_.u_plus; }
    double u_minus() const { return triple_.u_minus; }
    double scale() const { return scale_; }

    // Interior critical points of F, ascending.
    const std::vector<double>& z_stars() const { return z_star_; }
    int branch_count() const { return static_cast<int>(branches_.size()); }
    int pair_count() const { return branch_count() / 2; }  // n branch pairs
    const BranchInterval& branch(int i) const { return branches_.at(i - 1); }  // 1-based

    // Magnitude of the global minimum of F on [u_plus, u_minus].
    double m() const { return m_; }

    // Inverse of F restricted to branch i (1-based). With clamp the target
    // is clamped into the branch range when within tolerance, matching the
    // continuous extension of h used by the phase-plane construction.
    double invert_branch(int i, double y, bool clamp = false) const;

    AdmissibilityReport check_admissibility() const;

    bool mollified() const { return mollified_; }
    double mollification_eta() const { return eta_; }

    // Original flux model, when the chord was built from one. High-order
    // (> 3) derivatives for the regularity expansion come from here; the
    // cubic mollification term has zero derivatives past order 3.
    const std::optional<FluxModel>& flux_model() const { return flux_; }

private:
    void build();

    ScalarFunc f_;
    ShockTriple triple_;
    double scale_ = 1.0;
    std::vector<double> z_star_;
    std::vector<BranchInterval> branches_;
    double m_ = 0.0;
    bool mollified_ = false;
    double eta_ = 0.0;
    std::optional<FluxModel> flux_;
};

}  // namespace radshock

#endif
