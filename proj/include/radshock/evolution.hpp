#ifndef RADSHOCK_EVOLUTION_HPP
#define RADSHOCK_EVOLUTION_HPP

#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "radshock/flux.hpp"
#include "radshock/profile.hpp"

namespace radshock {

class EvolutionError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class BoundaryMode { Outflow, Periodic };

struct Grid1D {
    double a = 0.0, b = 1.0;
    int M = 0;
    BoundaryMode mode = BoundaryMode::Periodic;

    double dx() const { return (b - a) / M; }
    double center(int i) const { return a + (i + 0.5) * dx(); }
};

// Cell averages; vector components stored per cell: u[i*n + c].
struct FieldState {
    double t = 0.0;
    int n = 1;
    std::vector<double> u;
};

// Discrete exponential kernel (1/(2 sqrt(eps))) exp(-|x|/sqrt(eps)) sampled
// on the grid, truncated at radius 40 sqrt(eps) and renormalized to unit
// mass. Weights are positive and symmetric.
struct RadiationKernel {
    double eps = 1.0;
    double dx = 1.0;
    int half = 0;                  // weights cover offsets -half..half
    std::vector<double> weights;   // size 2*half+1, sums to 1

    static RadiationKernel build(double eps, double dx);
};

// Discrete Helmholtz solve -alpha D2 q + beta q = -G . D1 u with centered
// second-order differences; q = 0 Dirichlet at outflow boundaries, cyclic
// tridiagonal in periodic mode. For the unit scalar model (alpha, beta) =
// (eps, 1); for the system form (1, R).
std::vector<double> solve_elliptic(const Grid1D& grid, const FieldState& state,
                                   const std::vector<double>& G, double alpha,
                                   double beta,
                                   const std::vector<double>* ghost_minus = nullptr,
                                   const std::vector<double>* ghost_plus = nullptr);

enum class SourceForm { Kernel, Elliptic };

struct EvolveParams {
    double eps = 1.0;     // radiation length-scale coefficient
    double R = 1.0;       // zeroth-order elliptic coefficient (system form)
    SourceForm form = SourceForm::Elliptic;
    double cfl = 0.45;
};

// First-order conservative finite-volume solver for
//   u_t + f(u)_x + L q_x = 0,   -eps q_xx + R q + G.u_x = 0,
// with a local Lax-Friedrichs (Rusanov) numerical flux. The scalar kernel
// form replaces the q coupling by the relaxation source
// -(u - K^eps * u)/eps (equivalent for L = G = R = 1).
class Evolver {
public:
    Evolver(FluxModel flux, Grid1D grid, EvolveParams params,
            std::vector<double> L = {1.0}, std::vector<double> G = {1.0});

    const Grid1D& grid() const { return grid_; }
    int dimension() const { return n_; }
    const EvolveParams& params() const { return params_; }

    // Far-field ghost states for outflow boundaries.
    void set_farfield(std::vector<double> u_minus, std::vector<double> u_plus);

    FieldState init(const std::function<std::vector<double>(double)>& u0) const;
    FieldState init_scalar(const std::function<double(double)>& u0) const;

    // Largest stable dt at the current state.
    double max_dt(const FieldState& s) const;
    // One conservative step; throws EvolutionError on CFL violation.
    void step(FieldState& s, double dt) const;
    // Advance to time T choosing dt from the CFL bound.
    void advance(FieldState& s, double T) const;

    // Radiation field at the current state (elliptic solve).
    std::vector<double> radiation(const FieldState& s) const;

    double total_mass(const FieldState& s, int component = 0) const;

private:
    std::vector<double> convolve(const FieldState& s) const;  // scalar kernel
    double max_speed(const FieldState& s) const;

    FluxModel flux_;
    Grid1D grid_;
    EvolveParams params_;
    std::vector<double> L_, G_;
    int n_ = 1;
    RadiationKernel kernel_;
    std::vector<double> ghost_minus_, ghost_plus_;
};

struct DriftReport {
    double l1_drift = 0.0;        // min over shifts of |u(.,T) - U(. - h)|_L1
    double best_shift = 0.0;
    double recovered_speed = 0.0; // from half-level front tracking
    double front_start = 0.0, front_end = 0.0;
};

// Evolve the sampled profile to time T on the evolver's (outflow) grid and
// measure the shift-minimized L1 drift and the recovered front speed.
// `s` is the exact profile speed in the evolver's frame.
DriftReport verify_traveling_wave(Evolver& ev, const RadiativeProfile& profile,
                                  double s, double T);

struct PropertyReport {
    bool contraction_ok = true;
    double max_contraction_violation = 0.0;  // growth of |u-v|_L1 per step
    bool ordered_input = false;
    bool comparison_ok = true;
    bool monotone_input = false;
    bool monotone_preserved = true;
    double mass_drift = 0.0;  // |mass(T) - mass(0)| of u (periodic)
    double final_distance = 0.0;
    int steps = 0;
};

// Evolve the scalar pair (u0, v0) to time T with a shared step sequence and
// report L1 contraction, comparison, monotonicity preservation and mass
// conservation.
PropertyReport property_suite(const Evolver& ev, const std::vector<double>& u0,
                              const std::vector<double>& v0, double T);

}  // namespace radshock

#endif
