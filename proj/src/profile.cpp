#include "radshock/profile.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace radshock {

namespace {

struct Saddle {
    double lambda_stable;
    double lambda_unstable;
};

// Eigenvalues of the linearization of X' = (z', (z - h(z'))/eps) at (z_eq, 0):
// J = [[0, 1], [1/eps, -1/(eps F'(z_eq))]].
Saddle saddle_eigen(const ChordFunction& chord, double z_eq, double eps) {
    double fp = chord.Fprime(z_eq);
    if (std::abs(fp) < 1e-12 * chord.scale())
        throw ProfileError("degenerate equilibrium: F'(z_eq) ~ 0, not a saddle");
    double tr = -1.0 / (eps * fp);
    double disc = tr * tr + 4.0 / eps;
    double sq = std::sqrt(disc);
    return {0.5 * (tr - sq), 0.5 * (tr + sq)};
}

std::function<State2(double, const State2&)> branch_rhs(const ChordFunction& chord,
                                                        int branch, double eps) {
    return [&chord, branch, eps](double, const State2& x) -> State2 {
        double h = chord.invert_branch(branch, x[1], /*clamp=*/true);
        return {x[1], (x[0] - h) / eps};
    };
}

void fill_trajectory(PhaseTrajectory& tr, const ChordFunction& chord,
                     const OdeResult& ode, bool reversed, double eps) {
    const auto& s = ode.samples;
    std::size_t n = s.size();
    tr.xi.resize(n);
    tr.z.resize(n);
    tr.zp.resize(n);
    tr.zpp.resize(n);
    // re-index so xi increases; reversed integrations are flipped
    double t_end = s.back().t;
    for (std::size_t i = 0; i < n; ++i) {
        const auto& smp = reversed ? s[n - 1 - i] : s[i];
        tr.xi[i] = reversed ? (smp.t - t_end) : smp.t;
        tr.z[i] = smp.x[0];
        tr.zp[i] = smp.x[1];
        double h = chord.invert_branch(tr.branch, smp.x[1], true);
        tr.zpp[i] = (smp.x[0] - h) / eps;
    }
}

}  // namespace

double PhaseTrajectory::phi_at(const ChordFunction& chord, double z_query) const {
    // z decreases with xi; find bracketing sample
    double zmax = z.front(), zmin = z.back();
    double tol = 1e-9 * chord.scale();
    if (z_query > zmax + tol || z_query < zmin - tol)
        throw ProfileError("phase query outside trajectory z-range");
    double zq = std::clamp(z_query, zmin, zmax);

    auto it = std::lower_bound(z.begin(), z.end(), zq, std::greater<double>());
    std::size_t i = (it == z.begin()) ? 0 : static_cast<std::size_t>(it - z.begin() - 1);
    if (i >= z.size() - 1) i = z.size() - 2;
    // start from the nearer endpoint of the bracket
    std::size_t j = (std::abs(z[i] - zq) < std::abs(z[i + 1] - zq)) ? i : i + 1;
    double zc = z[j];
    double phi = zp[j];
    double eps = epsilon;
    int b = branch;
    // integrate dphi/dz = (z - h(phi)) / (eps * phi) from zc to zq
    int nsub = 32;
    double hstep = (zq - zc) / nsub;
    if (hstep == 0.0) return phi;
    auto rhs = [&](double zz, double p) {
        double hh = chord.invert_branch(b, p, true);
        return (zz - hh) / (eps * p);
    };
    for (int k = 0; k < nsub; ++k) {
        double z0 = zc + k * hstep;
        double k1 = rhs(z0, phi);
        double k2 = rhs(z0 + 0.5 * hstep, phi + 0.5 * hstep * k1);
        double k3 = rhs(z0 + 0.5 * hstep, phi + 0.5 * hstep * k2);
        double k4 = rhs(z0 + hstep, phi + hstep * k3);
        phi += hstep / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4);
    }
    return phi;
}

double PhaseTrajectory::xi_at(double z_query) const {
    double zmax = z.front(), zmin = z.back();
    double zq = std::clamp(z_query, zmin, zmax);
    auto it = std::lower_bound(z.begin(), z.end(), zq, std::greater<double>());
    std::size_t i = (it == z.begin()) ? 0 : static_cast<std::size_t>(it - z.begin() - 1);
    if (i >= z.size() - 1) i = z.size() - 2;
    double x0 = xi[i], x1 = xi[i + 1];
    double z0 = z[i], z1 = z[i + 1];
    double d0 = zp[i], d1 = zp[i + 1];
    // cubic Hermite z(xi), solved for xi by bisection
    double lo = x0, hi = x1;
    double hgap = x1 - x0;
    auto zval = [&](double x) {
        double t = (x - x0) / hgap;
        double t2 = t * t, t3 = t2 * t;
        return (2 * t3 - 3 * t2 + 1) * z0 + (t3 - 2 * t2 + t) * hgap * d0 +
               (-2 * t3 + 3 * t2) * z1 + (t3 - t2) * hgap * d1;
    };
    for (int k = 0; k < 100; ++k) {
        double mid = 0.5 * (lo + hi);
        if ((zval(mid) > zq) == (z0 > zq))
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

PhaseTrajectory tail_trajectory(const ChordFunction& chord, bool right_side,
                                double epsilon) {
    if (epsilon <= 0.0) throw std::invalid_argument("epsilon must be positive");
    const auto& zs = chord.z_stars();
    if (zs.empty()) throw ProfileError("chord has no interior critical point");

    PhaseTrajectory tr;
    tr.epsilon = epsilon;
    double z_eq, z_adjacent;
    if (right_side) {
        tr.branch = 1;
        tr.origin = ArcOrigin::TailPlus;
        z_eq = chord.u_plus();
        z_adjacent = zs.front();
    } else {
        tr.branch = chord.branch_count();
        tr.origin = ArcOrigin::TailMinus;
        z_eq = chord.u_minus();
        z_adjacent = zs.back();
    }
    Saddle sd = saddle_eigen(chord, z_eq, epsilon);
    double target_zp = chord.F(z_adjacent);

    double delta = 1e-8 * chord.scale();
    double lambda = right_side ? sd.lambda_stable : sd.lambda_unstable;
    double norm = std::hypot(1.0, lambda);
    State2 x0;
    double direction;
    if (right_side) {
        // stable manifold, z > z_plus, z' < 0; walk backward in xi
        x0 = {z_eq + delta / norm, delta * lambda / norm};
        direction = -1.0;
    } else {
        // unstable manifold, z < z_minus, z' < 0; forward in xi
        x0 = {z_eq - delta / norm, -delta * lambda / norm};
        direction = 1.0;
    }

    OdeOptions opts;
    opts.abs_tol = 1e-13 * chord.scale();
    double lam_min = std::min(std::abs(sd.lambda_stable), std::abs(sd.lambda_unstable));
    opts.t_budget = 1e3 / lam_min;
    opts.max_step = std::min(0.05, 0.5 / std::max(1.0, std::abs(lambda)));

    auto rhs = branch_rhs(chord, tr.branch, epsilon);
    auto event = [target_zp](const State2& x) { return x[1] - target_zp; };
    OdeResult res = integrate_rk45(rhs, x0, 0.0, direction, event, opts);
    if (!res.event_hit)
        throw ProfileError("tail integration exhausted its xi budget before the "
                           "branch boundary event");
    fill_trajectory(tr, chord, res, /*reversed=*/right_side, epsilon);
    tr.terminated_at_boundary = true;
    tr.terminal_zp = target_zp;
    return tr;
}

std::pair<PhaseTrajectory, PhaseTrajectory> intermediate_trajectories(
    const ChordFunction& chord, int k, double epsilon) {
    int n = chord.pair_count();
    if (k < 1 || k > n - 1)
        throw std::invalid_argument("intermediate index k out of range");
    const auto& zs = chord.z_stars();
    double z_max = zs[2 * k - 1];  // z*_{2k}, a local maximum of F
    double F_max = chord.F(z_max);
    double F2_max = chord.F2(z_max);

    // sufficient smallness from the cubic-root comparison at the local maximum
    double threshold = 2.0 / (std::abs(F_max) * std::abs(F2_max));
    if (!(epsilon * std::abs(F_max) * std::abs(F2_max) < 2.0))
        throw ProfileError("no profile constructed at this epsilon (exceeds the "
                           "sufficient threshold " +
                           std::to_string(threshold) + ")");

    OdeOptions opts;
    opts.abs_tol = 1e-13 * chord.scale();
    opts.max_step = 0.05 * std::min(1.0, std::sqrt(epsilon));
    opts.initial_step = 1e-6 * std::min(1.0, epsilon);
    opts.t_budget = 1e3 * std::max(1.0, epsilon);

    // The branch inverse has a square-root vertex at the start point, which
    // defeats the integrator's error estimate. Seed a distance tau0 from the
    // vertex with the exact local expansion z' = F* - c tau^2, where c solves
    // 2 eps c + sqrt(2c/|F''|) = |F*| (substitute the ansatz into the ODE).
    const double af2 = std::abs(F2_max);
    const double y = (-1.0 + std::sqrt(1.0 + 4.0 * epsilon * af2 * std::abs(F_max))) /
                     (2.0 * epsilon * af2);
    const double c_loc = 0.5 * y * y * af2;
    const double tau0 = 1e-4;
    const int n_seed = 4;  // analytic samples on [0, tau0)
    State2 start = {z_max - F_max * tau0, F_max - c_loc * tau0 * tau0};
    State2 start_l = {z_max + F_max * tau0, F_max - c_loc * tau0 * tau0};

    PhaseTrajectory left;
    left.epsilon = epsilon;
    left.branch = 2 * k;
    left.origin = ArcOrigin::IntermediateLeft;
    {
        double target = chord.F(zs[2 * k - 2]);  // F(z*_{2k-1})
        auto rhs = branch_rhs(chord, left.branch, epsilon);
        auto event = [target](const State2& x) { return x[1] - target; };
        OdeResult res = integrate_rk45(rhs, start_l, tau0, 1.0, event, opts);
        if (!res.event_hit)
            throw ProfileError("intermediate left arc exhausted its xi budget");
        fill_trajectory(left, chord, res, false, epsilon);
        // prepend the analytic window [0, tau0)
        for (int j = n_seed - 1; j >= 0; --j) {
            double tau = tau0 * j / n_seed;
            left.xi.insert(left.xi.begin(), tau);
            left.z.insert(left.z.begin(), z_max + F_max * tau);
            left.zp.insert(left.zp.begin(), F_max - c_loc * tau * tau);
            left.zpp.insert(left.zpp.begin(), -2.0 * c_loc * tau);
        }
        left.terminated_at_boundary = true;
        left.terminal_zp = target;
        // a posteriori overlap inequality
        // The terminal z is ill-conditioned (the graph meets the critical
        // value tangentially), so allow the grazing window handled by
        // match_pair before declaring a genuine gap.
        if (res.samples.back().x[0] > zs[2 * k - 2] + 1e-4 * chord.scale())
            throw ProfileError("no profile at this epsilon: left arc stops short of "
                               "the next critical point");
    }

    PhaseTrajectory right;
    right.epsilon = epsilon;
    right.branch = 2 * k + 1;
    right.origin = ArcOrigin::IntermediateRight;
    {
        double target = chord.F(zs[2 * k]);  // F(z*_{2k+1})
        auto rhs = branch_rhs(chord, right.branch, epsilon);
        auto event = [target](const State2& x) { return x[1] - target; };
        OdeResult res = integrate_rk45(rhs, start, -tau0, -1.0, event, opts);
        if (!res.event_hit)
            throw ProfileError("intermediate right arc exhausted its xi budget");
        fill_trajectory(right, chord, res, true, epsilon);
        // append the analytic window up to the vertex at local xi_back + tau0
        double base = right.xi.back();
        for (int j = n_seed - 1; j >= 0; --j) {
            double tau = tau0 * j / n_seed;  // distance before the vertex
            right.xi.push_back(base + tau0 - tau);
            right.z.push_back(z_max - F_max * tau);
            right.zp.push_back(F_max - c_loc * tau * tau);
            right.zpp.push_back(2.0 * c_loc * tau);
        }
        right.terminated_at_boundary = true;
        right.terminal_zp = target;
        if (res.samples.back().x[0] < zs[2 * k] - 1e-4 * chord.scale())
            throw ProfileError("no profile at this epsilon: right arc stops short of "
                               "the next critical point");
    }
    return {std::move(left), std::move(right)};
}

MatchPoint match_pair(const ChordFunction& chord, const PhaseTrajectory& left_arc,
                      const PhaseTrajectory& right_arc) {
    double lo = std::max(left_arc.z_back(), right_arc.z_back());
    double hi = std::min(left_arc.z_front(), right_arc.z_front());
    if (lo > hi) {
        // grazing contact: both arcs terminate at the branch vertex (z*, -m)
        // and integration error leaves a tiny gap instead of an overlap
        if (lo - hi < 1e-4 * chord.scale()) {
            MatchPoint mp;
            mp.z_bar = 0.5 * (lo + hi);
            mp.z_tilde = 0.5 * (left_arc.zp.back() + right_arc.zp.front());
            mp.shift_left = -left_arc.xi.back();
            mp.shift_right = -right_arc.xi.front();
            return mp;
        }
        throw ProfileError("phase-plane graphs do not overlap; upstream integration "
                           "failed");
    }
    auto g = [&](double zz) {
        return left_arc.phi_at(chord, zz) - right_arc.phi_at(chord, zz);
    };
    double ga = g(lo), gb = g(hi);
    double z_bar;
    double match_tol = 1e-9 * chord.scale();
    if ((ga < 0.0) != (gb < 0.0)) {
        double a = lo, b = hi;
        for (int it = 0; it < 200; ++it) {
            double mid = 0.5 * (a + b);
            double gm = g(mid);
            if (gm == 0.0 || 0.5 * (b - a) < 1e-15 * chord.scale()) break;
            if ((gm < 0.0) == (ga < 0.0))
                a = mid;
            else
                b = mid;
        }
        z_bar = 0.5 * (a + b);
    } else if (std::abs(ga) <= match_tol || std::abs(gb) <= match_tol ||
               hi - lo <= match_tol) {
        // grazing contact: the arcs meet at a shared terminal point
        z_bar = (std::abs(ga) < std::abs(gb)) ? lo : hi;
    } else {
        throw ProfileError("monotone graphs fail to intersect; invariant violated");
    }
    MatchPoint mp;
    mp.z_bar = z_bar;
    mp.z_tilde = 0.5 * (left_arc.phi_at(chord, z_bar) + right_arc.phi_at(chord, z_bar));
    mp.shift_left = -left_arc.xi_at(z_bar);
    mp.shift_right = -right_arc.xi_at(z_bar);
    return mp;
}

double RadiativeProfile::u_at(double x) const {
    auto it = std::upper_bound(xi.begin(), xi.end(), x);
    if (it == xi.begin()) return u.front();
    std::size_t i = static_cast<std::size_t>(it - xi.begin() - 1);
    if (i >= xi.size() - 1) return u.back();
    double t = (x - xi[i]) / (xi[i + 1] - xi[i]);
    if (!std::isfinite(t) || xi[i + 1] == xi[i]) return u[i];
    return (1 - t) * u[i] + t * u[i + 1];
}

RadiativeProfile assemble_profile(const ChordFunction& chord, double epsilon,
                                  const AssemblyOptions& opts) {
    int n = chord.pair_count();

    // arcs ordered left to right in xi (descending z coverage), grouped so
    // that intermediate (right, left) pairs share their local origin
    struct Placed {
        PhaseTrajectory arc;
        double shift = 0.0;
        double glue_lo = -std::numeric_limits<double>::infinity();  // global xi window
        double glue_hi = std::numeric_limits<double>::infinity();
    };
    std::vector<Placed> placed;
    placed.push_back({tail_trajectory(chord, /*right_side=*/false, epsilon)});
    for (int k = n - 1; k >= 1; --k) {
        auto [left, right] = intermediate_trajectories(chord, k, epsilon);
        placed.push_back({std::move(right)});
        placed.push_back({std::move(left)});
    }
    placed.push_back({tail_trajectory(chord, /*right_side=*/true, epsilon)});

    RadiativeProfile prof;
    prof.epsilon = epsilon;

    struct Glue {
        std::size_t left_idx, right_idx;
        MatchPoint mp;
        double xi_global = 0.0;
    };
    std::vector<Glue> glues;

    // propagate shifts left to right; the first phase-plane match lands at 0
    bool first_match = true;
    for (std::size_t i = 0; i + 1 < placed.size(); ++i) {
        PhaseTrajectory& L = placed[i].arc;
        PhaseTrajectory& R = placed[i + 1].arc;
        bool internal_join = (L.origin == ArcOrigin::IntermediateRight &&
                              R.origin == ArcOrigin::IntermediateLeft &&
                              L.branch == R.branch + 1);
        if (internal_join) {
            // the two arcs of one intermediate pair share their start point:
            // the reversed right arc ends there (its last sample), the left
            // arc begins there (local xi 0)
            double join_xi = placed[i].shift + L.xi.back();
            placed[i + 1].shift = join_xi;
            placed[i].glue_hi = join_xi;
            placed[i + 1].glue_lo = join_xi;
            continue;
        }
        MatchPoint mp = match_pair(chord, L, R);
        double glue_xi;
        if (first_match) {
            glue_xi = 0.0;
            placed[i].shift = mp.shift_left;
            // re-shift everything already placed (only matters for groups
            // before the first match)
            for (std::size_t j = 0; j < i; ++j) placed[j].shift += mp.shift_left;
            first_match = false;
        } else {
            glue_xi = placed[i].shift + L.xi_at(mp.z_bar);
        }
        placed[i + 1].shift = glue_xi + mp.shift_right;
        placed[i].glue_hi = glue_xi;
        placed[i + 1].glue_lo = glue_xi;
        glues.push_back({i, i + 1, mp, glue_xi});
    }
    // assemble the global grid
    for (std::size_t a = 0; a < placed.size(); ++a) {
        const auto& P = placed[a];
        const auto& tr = P.arc;
        for (std::size_t i = 0; i < tr.xi.size(); ++i) {
            double gx = tr.xi[i] + P.shift;
            if (gx < P.glue_lo - 1e-14 || gx > P.glue_hi + 1e-14) continue;
            prof.xi.push_back(gx);
            prof.z.push_back(tr.z[i]);
            prof.zp.push_back(tr.zp[i]);
            prof.zpp.push_back(tr.zpp[i]);
        }
    }
    // insert the two one-sided rows at every glue point
    for (const auto& gl : glues) {
        for (int side = 0; side < 2; ++side) {
            const auto& tr = (side == 0) ? placed[gl.left_idx].arc : placed[gl.right_idx].arc;
            double h = chord.invert_branch(tr.branch, gl.mp.z_tilde, true);
            prof.xi.push_back(gl.xi_global + (side == 0 ? -1e-13 : 1e-13));
            prof.z.push_back(gl.mp.z_bar);
            prof.zp.push_back(gl.mp.z_tilde);
            prof.zpp.push_back((gl.mp.z_bar - h) / epsilon);
        }
    }
    // sort rows by xi
    std::vector<std::size_t> order(prof.xi.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return prof.xi[a] < prof.xi[b]; });
    auto permute = [&](std::vector<double>& v) {
        std::vector<double> w(v.size());
        for (std::size_t i = 0; i < order.size(); ++i) w[i] = v[order[i]];
        v = std::move(w);
    };
    permute(prof.xi);
    permute(prof.z);
    permute(prof.zp);
    permute(prof.zpp);

    prof.u.resize(prof.xi.size());
    prof.q.resize(prof.xi.size());
    for (std::size_t i = 0; i < prof.xi.size(); ++i) {
        prof.u[i] = prof.z[i] - epsilon * prof.zpp[i];
        prof.q[i] = -prof.zp[i];
    }

    // jump records
    const double cont_tol = opts.continuity_threshold_factor * chord.scale();
    for (const auto& gl : glues) {
        JumpRecord jr;
        jr.xi0 = gl.xi_global;
        double z_t = gl.mp.z_tilde;
        jr.u_left = chord.invert_branch(placed[gl.left_idx].arc.branch, z_t, true);
        jr.u_right = chord.invert_branch(placed[gl.right_idx].arc.branch, z_t, true);
        double du = jr.u_left - jr.u_right;
        if (std::abs(du) > 1e-14 * chord.scale()) {
            const auto& f = chord.func();
            double s_chord = (f.f(jr.u_right) - f.f(jr.u_left)) / (jr.u_right - jr.u_left);
            jr.rh_residual = std::abs(s_chord - chord.triple().s);
        }
        double margin = std::numeric_limits<double>::infinity();
        for (int i = 1; i < 256; ++i) {
            double uu = jr.u_right + (jr.u_left - jr.u_right) * i / 256.0;
            margin = std::min(margin, z_t - chord.F(uu));
        }
        jr.oleinik_margin = std::isfinite(margin) ? margin : 0.0;
        jr.continuous = std::abs(du) < cont_tol;
        prof.jumps.push_back(jr);
    }

    // exponential decay rates from the outer tail samples
    auto fit_rate = [&](bool left_side) {
        double z_inf = left_side ? chord.u_minus() : chord.u_plus();
        std::vector<double> xs, ys;
        for (std::size_t i = 0; i < prof.xi.size(); ++i) {
            double d = std::abs(prof.z[i] - z_inf);
            if (d > 1e-7 * chord.scale() && d < 1e-2 * chord.scale()) {
                xs.push_back(prof.xi[i]);
                ys.push_back(std::log(d));
            }
        }
        if (xs.size() < 3) return 0.0;
        double mx = 0, my = 0;
        for (std::size_t i = 0; i < xs.size(); ++i) {
            mx += xs[i];
            my += ys[i];
        }
        mx /= xs.size();
        my /= ys.size();
        double num = 0, den = 0;
        for (std::size_t i = 0; i < xs.size(); ++i) {
            num += (xs[i] - mx) * (ys[i] - my);
            den += (xs[i] - mx) * (xs[i] - mx);
        }
        double slope = num / den;
        return left_side ? slope : -slope;
    };
    prof.decay_rate_left = fit_rate(true);
    prof.decay_rate_right = fit_rate(false);
    return prof;
}

namespace {

std::string fmt17(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

}  // namespace

std::string profile_csv(const RadiativeProfile& p) {
    std::ostringstream os;
    os << "xi,z,dz,ddz,u,q\n";
    for (std::size_t i = 0; i < p.xi.size(); ++i) {
        os << fmt17(p.xi[i]) << ',' << fmt17(p.z[i]) << ',' << fmt17(p.zp[i]) << ','
           << fmt17(p.zpp[i]) << ',' << fmt17(p.u[i]) << ',' << fmt17(p.q[i]) << '\n';
    }
    return os.str();
}

std::string jumps_csv(const RadiativeProfile& p) {
    std::ostringstream os;
    os << "xi0,u_left,u_right,rh_residual,oleinik_margin\n";
    for (const auto& j : p.jumps) {
        if (j.continuous) continue;
        os << fmt17(j.xi0) << ',' << fmt17(j.u_left) << ',' << fmt17(j.u_right) << ','
           << fmt17(j.rh_residual) << ',' << fmt17(j.oleinik_margin) << '\n';
    }
    return os.str();
}

}  // namespace radshock
