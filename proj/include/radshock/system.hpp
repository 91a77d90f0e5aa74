#ifndef RADSHOCK_SYSTEM_HPP
#define RADSHOCK_SYSTEM_HPP

#include <Eigen/Dense>
#include <stdexcept>
#include <vector>

#include "radshock/chord.hpp"
#include "radshock/flux.hpp"
#include "radshock/profile.hpp"

namespace radshock {

class SystemError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Hyperbolic-elliptic coupled system
//   u_t + f(u)_x + L q_x = 0,   -q_xx + R q + G.u_x = 0,
// with u in R^n, scalar q, constant vectors L, G and R > 0.
struct SystemModel {
    SystemModel(FluxModel flux, Eigen::VectorXd L, Eigen::VectorXd G, double R = 1.0);

    int dimension() const { return flux.dimension(); }
    Eigen::VectorXd f(const Eigen::VectorXd& u) const;
    Eigen::MatrixXd jac(const Eigen::VectorXd& u) const;

    // Orthogonal projector with kernel span{L}, and covector with Q.L = 1.
    Eigen::MatrixXd P() const;
    Eigen::RowVectorXd Q() const;

    FluxModel flux;
    Eigen::VectorXd L;
    Eigen::VectorXd G;
    double R = 1.0;
};

// Eigen-decomposition of the flux Jacobian at a state. Rows of `left` and
// columns of `right` are paired; left = right^{-1}, so l_i . r_j = delta_ij
// to machine precision.
struct SpectralData {
    Eigen::VectorXd lambda;  // ascending
    Eigen::MatrixXd right;   // column k-1 is r_k
    Eigen::MatrixXd left;    // row k-1 is l_k

    Eigen::VectorXd r(int k) const { return right.col(k - 1); }
    Eigen::RowVectorXd l(int k) const { return left.row(k - 1); }
};

// Throws SystemError for complex or coalescing eigenvalues (loss of strict
// hyperbolicity at u).
SpectralData spectral(const SystemModel& sys, const Eigen::VectorXd& u);

// Diffusive-coupling indicator (l_k . L)(G . r_k); positive means the k-th
// field couples diffusively to the radiation. k is 1-based.
double main_assumption(const SystemModel& sys, const Eigen::VectorXd& u, int k);

// Directional derivative of lambda_k along r_k (genuine nonlinearity probe),
// by central differencing of the eigenvalue.
double genuine_nonlinearity(const SystemModel& sys, const Eigen::VectorXd& u, int k);

// Leading-order value of d^2 Fhat / dw^2 at u:
// (grad lambda_k . r_k) / ((l_k . L)(G . r_k)^2).
double convexity_reference(const SystemModel& sys, const Eigen::VectorXd& u, int k);

// Vector shock triple; s is the least-squares Rankine-Hugoniot speed, and
// construction verifies the residual f(u+)-f(u-)-s(u+-u-) componentwise.
struct VectorShock {
    Eigen::VectorXd u_minus, u_plus;
    double s = 0.0;
};
VectorShock vector_shock(const SystemModel& sys, const Eigen::VectorXd& u_minus,
                         const Eigen::VectorXd& u_plus);

// Scalar reduction of the system around a reference shock: the constraint
// set { V.(f(u)-f(u_pm)-s(u-u_pm)) = 0 for V in a basis of L-perp,
// G.u = w } defines u = Phi(w), and Fhat(w) = Q.(f(Phi(w))-f(u_pm)
// -s(Phi(w)-u_pm)) is the reduced chord. Phi is solved by damped Newton with
// continuation in w from the nearest reference endpoint (step |w+-w-|/64,
// halved on failure, floor /4096). Evaluation is reentrant.
//
// General R is absorbed by rescaling to the unit-coefficient scalar model:
// xi_unit = sqrt(R) xi, q_unit = q / sqrt(R), f_unit = sqrt(R) fhat,
// s_unit = sqrt(R) s; the factors are exposed below.
class ReductionMap {
public:
    // basis: optional (n-1) x n matrix whose rows span L-perp; defaults to an
    // orthonormal complement of L. Any full-rank choice yields the same Phi.
    ReductionMap(SystemModel sys, VectorShock shock, int k,
                 const Eigen::MatrixXd& basis = Eigen::MatrixXd());

    const SystemModel& model() const { return sys_; }
    const VectorShock& shock() const { return shock_; }
    int family() const { return k_; }
    double speed() const { return shock_.s; }
    double w_minus() const { return w_minus_; }
    double w_plus() const { return w_plus_; }
    double w_scale() const { return w_scale_; }

    // State on the constraint set with G.u = w.
    Eigen::VectorXd Phi(double w) const;
    double Fhat(double w) const;
    double Fhat_prime(double w) const;   // central difference, h = 1e-6 * scale
    double Fhat_second(double w) const;  // central difference, h = 1e-4 * scale

    // Residuals of the defining equations at w (diagnostic).
    double constraint_residual(double w) const;

    // Unit-coefficient scalar frame.
    double space_factor() const;  // xi_unit = space_factor * xi
    double q_factor() const;      // q_unit = q_factor * q
    double unit_speed() const;    // sqrt(R) * s

    // Scalar flux of the unit-frame reduced model, w -> sqrt(R)(Fhat(w)+s w),
    // and the chord of the reduced shock (w_minus, w_plus, unit_speed).
    ScalarFunc reduced_flux_unit() const;
    ChordFunction reduced_chord() const;

private:
    Eigen::VectorXd solve_at(double w, Eigen::VectorXd seed) const;
    Eigen::VectorXd newton(double w, Eigen::VectorXd u) const;

    SystemModel sys_;
    VectorShock shock_;
    int k_ = 1;
    Eigen::MatrixXd V_;  // rows span L-perp
    double w_minus_ = 0.0, w_plus_ = 0.0, w_scale_ = 1.0;
};

ReductionMap build_reduction(const SystemModel& sys, const VectorShock& shock, int k);

// Lifted traveling wave of the coupled system, sampled on the scalar
// profile's unit-frame grid.
struct SystemProfile {
    double epsilon = 1.0;
    std::vector<double> xi;  // unit frame; physical xi = xi / space_factor
    std::vector<Eigen::VectorXd> u;
    std::vector<double> w, z, q;  // q in the unit frame

    struct InnerJump {
        double xi0 = 0.0;
        Eigen::VectorXd u_left, u_right;
        double rh_residual = 0.0;
    };
    std::vector<InnerJump> jumps;

    double residual_flux = 0.0;        // sup |f(u)-f(u_pm)-s(u-u_pm) - Fhat L|
    double residual_constraint = 0.0;  // sup |G.u - w|
};

SystemProfile lift_profile(const ReductionMap& map, const RadiativeProfile& scalar);

// Admissibility translation for an inner jump (u_l, u_r) moving with the
// profile speed.
struct JumpTranslation {
    bool no_jump = false;
    double rh_residual = 0.0;
    bool lax = false;             // lambda_k(u_r) < s < lambda_k(u_l)
    bool lax_separation = false;  // lambda_{k-1}(u_l) < s < lambda_{k+1}(u_r)
    bool sign_consistent = false; // sign(lambda_k - s) == sign(Fhat') sampled
    int sign_samples = 0;
    bool liu = false;             // s_k(tau) >= s along the traced shock curve
    double liu_min_margin = 0.0;  // min over interior trace of s_k(tau) - s
    double speed_at_end = 0.0;    // s_k at the far end of the trace
};

JumpTranslation translate_admissibility(const ReductionMap& map,
                                        const Eigen::VectorXd& u_l,
                                        const Eigen::VectorXd& u_r);

}  // namespace radshock

#endif
