#ifndef RADSHOCK_PROFILE_HPP
#define RADSHOCK_PROFILE_HPP

#include <string>
#include <vector>

#include "radshock/chord.hpp"
#include "radshock/ode.hpp"

namespace radshock {

class ProfileError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class ArcOrigin { TailPlus, TailMinus, IntermediateLeft, IntermediateRight };

// Sampled curve in the (z, z') phase plane. z is strictly decreasing along
// the trajectory; z'' is recovered from the branch relation
// eps z'' = z - h_branch(z').
struct PhaseTrajectory {
    int branch = 0;  // 1-based branch index into the chord decomposition
    ArcOrigin origin = ArcOrigin::TailPlus;
    double epsilon = 1.0;
    // ordered by increasing xi
    std::vector<double> xi, z, zp, zpp;
    bool terminated_at_boundary = false;
    double terminal_zp = 0.0;  // the branch-boundary value F(z*;s) that stopped it

    double z_front() const { return z.front(); }
    double z_back() const { return z.back(); }

    // Phase-plane graph z' = phi(z), refined by integrating dphi/dz from the
    // nearest stored sample. Requires z within the sampled range.
    double phi_at(const ChordFunction& chord, double z_query) const;
    // xi at which the arc passes through z_query (monotone interpolation).
    double xi_at(double z_query) const;
};

PhaseTrajectory tail_trajectory(const ChordFunction& chord, bool right_side,
                                double epsilon);

// Intermediate arcs starting at the local maximum z*_{2k}; first checks the
// sufficient smallness eps*|F(z*_{2k})|*|F''(z*_{2k})| < 2 and verifies the
// overlap inequalities a posteriori. k is 1-based, 1 <= k <= n-1.
std::pair<PhaseTrajectory, PhaseTrajectory> intermediate_trajectories(
    const ChordFunction& chord, int k, double epsilon);

struct MatchPoint {
    double z_bar = 0.0;
    double z_tilde = 0.0;
    double shift_left = 0.0;
    double shift_right = 0.0;
};

// Unique intersection of the two monotone phase-plane graphs. left_arc is
// the arc covering larger z (to the left in xi).
MatchPoint match_pair(const ChordFunction& chord, const PhaseTrajectory& left_arc,
                      const PhaseTrajectory& right_arc);

struct JumpRecord {
    double xi0 = 0.0;
    double u_left = 0.0;
    double u_right = 0.0;
    double rh_residual = 0.0;
    double oleinik_margin = 0.0;
    bool continuous = false;  // |u_left - u_right| below the classification threshold
};

struct RadiativeProfile {
    double epsilon = 1.0;
    std::vector<double> xi, z, zp, zpp, u, q;
    std::vector<JumpRecord> jumps;
    double decay_rate_left = 0.0;   // fitted exponential rate toward z_minus
    double decay_rate_right = 0.0;  // toward z_plus

    // u at xi by monotone lookup (left-continuous at jumps).
    double u_at(double x) const;
};

struct AssemblyOptions {
    double ode_rel_tol = 1e-10;
    double continuity_threshold_factor = 1e-6;  // times scale
};

RadiativeProfile assemble_profile(const ChordFunction& chord, double epsilon,
                                  const AssemblyOptions& opts = {});

// CSV export, header "xi,z,dz,ddz,u,q"; 17 significant digits.
std::string profile_csv(const RadiativeProfile& p);
std::string jumps_csv(const RadiativeProfile& p);

}  // namespace radshock

#endif
