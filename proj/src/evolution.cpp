#include "radshock/evolution.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace radshock {

namespace {

// Thomas algorithm; sub/sup have size m-1.
std::vector<double> tridiag_solve(std::vector<double> sub, std::vector<double> diag,
                                  std::vector<double> sup, std::vector<double> rhs) {
    const std::size_t m = diag.size();
    for (std::size_t i = 1; i < m; ++i) {
        double w = sub[i - 1] / diag[i - 1];
        diag[i] -= w * sup[i - 1];
        rhs[i] -= w * rhs[i - 1];
    }
    std::vector<double> x(m);
    x[m - 1] = rhs[m - 1] / diag[m - 1];
    for (std::size_t i = m - 1; i-- > 0;) x[i] = (rhs[i] - sup[i] * x[i + 1]) / diag[i];
    return x;
}

// Cyclic tridiagonal (constant coefficients off the corners) via
// Sherman-Morrison.
std::vector<double> cyclic_tridiag_solve(double sub, double diag, double sup,
                                         std::vector<double> rhs) {
    const std::size_t m = rhs.size();
    if (m == 1) return {rhs[0] / (diag + sub + sup)};
    const double gamma = -diag;
    std::vector<double> d(m, diag), lo(m - 1, sub), up(m - 1, sup);
    d[0] -= gamma;
    d[m - 1] -= sup * sub / gamma;
    std::vector<double> u(m, 0.0);
    u[0] = gamma;
    u[m - 1] = sup;
    std::vector<double> y = tridiag_solve(lo, d, up, rhs);
    std::vector<double> z = tridiag_solve(std::vector<double>(m - 1, sub),
                                          [&] {
                                              std::vector<double> dd(m, diag);
                                              dd[0] -= gamma;
                                              dd[m - 1] -= sup * sub / gamma;
                                              return dd;
                                          }(),
                                          std::vector<double>(m - 1, sup), u);
    double vy = y[0] + (sub / gamma) * y[m - 1];
    double vz = 1.0 + z[0] + (sub / gamma) * z[m - 1];
    std::vector<double> x(m);
    for (std::size_t i = 0; i < m; ++i) x[i] = y[i] - (vy / vz) * z[i];
    return x;
}

}  // namespace

RadiationKernel RadiationKernel::build(double eps, double dx) {
    if (eps <= 0.0 || dx <= 0.0)
        throw EvolutionError("kernel requires positive eps and dx");
    RadiationKernel k;
    k.eps = eps;
    k.dx = dx;
    const double root = std::sqrt(eps);
    k.half = std::max(1, static_cast<int>(std::ceil(40.0 * root / dx)));
    k.weights.resize(2 * k.half + 1);
    // exact cell integrals of the kernel (integrable in closed form); the
    // half-integral of exp(-|x|/sqrt(eps))/(2 sqrt(eps)) over [a,b] in x>=0
    // is (exp(-a/root) - exp(-b/root))/2
    auto half_integral = [root](double a, double b) {
        return 0.5 * (std::exp(-a / root) - std::exp(-b / root));
    };
    auto cell_mass = [&](double lo, double hi) {
        double m = 0.0;
        if (hi > 0.0) m += half_integral(std::max(lo, 0.0), hi);
        if (lo < 0.0) m += half_integral(std::max(-hi, 0.0), -lo);
        return m;
    };
    double sum = 0.0;
    for (int j = -k.half; j <= k.half; ++j) {
        double w = cell_mass((j - 0.5) * dx, (j + 0.5) * dx);
        k.weights[j + k.half] = w;
        sum += w;
    }
    for (double& w : k.weights) w /= sum;
    return k;
}

std::vector<double> solve_elliptic(const Grid1D& grid, const FieldState& state,
                                   const std::vector<double>& G, double alpha,
                                   double beta,
                                   const std::vector<double>* ghost_minus,
                                   const std::vector<double>* ghost_plus) {
    const int M = grid.M;
    const int n = state.n;
    const double dx = grid.dx();
    if (static_cast<int>(G.size()) != n)
        throw EvolutionError("G dimension mismatch");
    if (alpha <= 0.0 || beta <= 0.0)
        throw EvolutionError("elliptic coefficients must be positive");

    auto gdot = [&](int i) {
        double v = 0.0;
        for (int c = 0; c < n; ++c) v += G[c] * state.u[i * n + c];
        return v;
    };
    auto gdot_ghost = [&](const std::vector<double>* gh, int edge) {
        if (gh) {
            double v = 0.0;
            for (int c = 0; c < n; ++c) v += G[c] * (*gh)[c];
            return v;
        }
        return gdot(edge);  // zero-gradient fallback
    };

    const double r = alpha / (dx * dx);
    std::vector<double> rhs(M);
    for (int i = 0; i < M; ++i) {
        double wl = (i == 0)
                        ? (grid.mode == BoundaryMode::Periodic ? gdot(M - 1)
                                                               : gdot_ghost(ghost_minus, 0))
                        : gdot(i - 1);
        double wr = (i == M - 1)
                        ? (grid.mode == BoundaryMode::Periodic ? gdot(0)
                                                               : gdot_ghost(ghost_plus, M - 1))
                        : gdot(i + 1);
        rhs[i] = -(wr - wl) / (2.0 * dx);
    }

    if (grid.mode == BoundaryMode::Periodic)
        return cyclic_tridiag_solve(-r, beta + 2.0 * r, -r, std::move(rhs));
    // Dirichlet q = 0 in the ghost cells
    return tridiag_solve(std::vector<double>(M - 1, -r),
                         std::vector<double>(M, beta + 2.0 * r),
                         std::vector<double>(M - 1, -r), std::move(rhs));
}

Evolver::Evolver(FluxModel flux, Grid1D grid, EvolveParams params,
                 std::vector<double> L, std::vector<double> G)
    : flux_(std::move(flux)), grid_(grid), params_(params), L_(std::move(L)),
      G_(std::move(G)), n_(flux_.dimension()) {
    if (grid_.M < 4) throw EvolutionError("grid too coarse");
    if (static_cast<int>(L_.size()) != n_ || static_cast<int>(G_.size()) != n_)
        throw EvolutionError("L and G must match the flux dimension");
    if (params_.eps <= 0.0 || params_.R <= 0.0)
        throw EvolutionError("eps and R must be positive");
    if (params_.form == SourceForm::Kernel) {
        if (n_ != 1)
            throw EvolutionError("kernel relaxation form is scalar-only");
        kernel_ = RadiationKernel::build(params_.eps, grid_.dx());
    }
}

void Evolver::set_farfield(std::vector<double> u_minus, std::vector<double> u_plus) {
    if (static_cast<int>(u_minus.size()) != n_ ||
        static_cast<int>(u_plus.size()) != n_)
        throw EvolutionError("far-field state dimension mismatch");
    ghost_minus_ = std::move(u_minus);
    ghost_plus_ = std::move(u_plus);
}

FieldState Evolver::init(const std::function<std::vector<double>(double)>& u0) const {
    FieldState s;
    s.n = n_;
    s.u.resize(static_cast<std::size_t>(grid_.M) * n_);
    for (int i = 0; i < grid_.M; ++i) {
        auto v = u0(grid_.center(i));
        if (static_cast<int>(v.size()) != n_)
            throw EvolutionError("initial data dimension mismatch");
        for (int c = 0; c < n_; ++c) s.u[i * n_ + c] = v[c];
    }
    return s;
}

FieldState Evolver::init_scalar(const std::function<double(double)>& u0) const {
    if (n_ != 1) throw EvolutionError("init_scalar requires a scalar model");
    return init([&](double x) { return std::vector<double>{u0(x)}; });
}

double Evolver::max_speed(const FieldState& s) const {
    double a = 0.0;
    if (n_ == 1) {
        for (int i = 0; i < grid_.M; ++i)
            a = std::max(a, std::abs(flux_.deriv(s.u[i], 1)));
    } else {
        std::vector<double> cell(n_);
        for (int i = 0; i < grid_.M; ++i) {
            for (int c = 0; c < n_; ++c) cell[c] = s.u[i * n_ + c];
            auto J = flux_.jacobian(cell);
            // Gershgorin bound on the spectral radius
            for (int r = 0; r < n_; ++r) {
                double row = 0.0;
                for (int c = 0; c < n_; ++c) row += std::abs(J[r][c]);
                a = std::max(a, row);
            }
        }
    }
    return a;
}

double Evolver::max_dt(const FieldState& s) const {
    double a = max_speed(s);
    double dt = params_.cfl * grid_.dx() / std::max(a, 1e-14);
    if (params_.form == SourceForm::Kernel)
        dt = std::min(dt, params_.cfl * params_.eps);
    return dt;
}

std::vector<double> Evolver::convolve(const FieldState& s) const {
    const int M = grid_.M;
    std::vector<double> out(M, 0.0);
    auto at = [&](int i) -> double {
        if (grid_.mode == BoundaryMode::Periodic) return s.u[((i % M) + M) % M];
        if (i < 0) return ghost_minus_.empty() ? s.u[0] : ghost_minus_[0];
        if (i >= M) return ghost_plus_.empty() ? s.u[M - 1] : ghost_plus_[0];
        return s.u[i];
    };
    for (int i = 0; i < M; ++i) {
        double acc = 0.0;
        for (int j = -kernel_.half; j <= kernel_.half; ++j)
            acc += kernel_.weights[j + kernel_.half] * at(i + j);
        out[i] = acc;
    }
    return out;
}

std::vector<double> Evolver::radiation(const FieldState& s) const {
    return solve_elliptic(grid_, s, G_, params_.eps, params_.R,
                          ghost_minus_.empty() ? nullptr : &ghost_minus_,
                          ghost_plus_.empty() ? nullptr : &ghost_plus_);
}

void Evolver::step(FieldState& s, double dt) const {
    if (dt <= 0.0) throw EvolutionError("dt must be positive");
    if (dt > max_dt(s) * (1.0 + 1e-12))
        throw EvolutionError("CFL violation: dt exceeds the stable bound");
    const int M = grid_.M;
    const int n = n_;
    const double dx = grid_.dx();

    auto cell = [&](int i, std::vector<double>& buf) {
        if (grid_.mode == BoundaryMode::Periodic) {
            int j = ((i % M) + M) % M;
            for (int c = 0; c < n; ++c) buf[c] = s.u[j * n + c];
        } else if (i < 0) {
            for (int c = 0; c < n; ++c)
                buf[c] = ghost_minus_.empty() ? s.u[c] : ghost_minus_[c];
        } else if (i >= M) {
            for (int c = 0; c < n; ++c)
                buf[c] = ghost_plus_.empty() ? s.u[(M - 1) * n + c] : ghost_plus_[c];
        } else {
            for (int c = 0; c < n; ++c) buf[c] = s.u[i * n + c];
        }
    };
    auto speed = [&](const std::vector<double>& u) {
        if (n == 1) return std::abs(flux_.deriv(u[0], 1));
        auto J = flux_.jacobian(u);
        double a = 0.0;
        for (int r = 0; r < n; ++r) {
            double row = 0.0;
            for (int c = 0; c < n; ++c) row += std::abs(J[r][c]);
            a = std::max(a, row);
        }
        return a;
    };

    std::vector<double> q;
    if (params_.form == SourceForm::Elliptic) q = radiation(s);
    auto q_at = [&](int i) -> double {
        if (grid_.mode == BoundaryMode::Periodic) return q[((i % M) + M) % M];
        if (i < 0 || i >= M) return 0.0;  // Dirichlet ghost
        return q[i];
    };

    // interface fluxes j = 0..M between cells j-1 and j
    std::vector<double> F(static_cast<std::size_t>(M + 1) * n);
    std::vector<double> uL(n), uR(n);
    for (int j = 0; j <= M; ++j) {
        cell(j - 1, uL);
        cell(j, uR);
        auto fL = flux_.eval(uL);
        auto fR = flux_.eval(uR);
        double a = std::max(speed(uL), speed(uR));
        double qf = 0.0;
        if (params_.form == SourceForm::Elliptic) qf = 0.5 * (q_at(j - 1) + q_at(j));
        for (int c = 0; c < n; ++c)
            F[j * n + c] = 0.5 * (fL[c] + fR[c]) - 0.5 * a * (uR[c] - uL[c]) +
                           L_[c] * qf;
    }

    std::vector<double> relax;
    if (params_.form == SourceForm::Kernel) relax = convolve(s);

    const double lam = dt / dx;
    std::vector<double> unew(s.u.size());
    for (int i = 0; i < M; ++i)
        for (int c = 0; c < n; ++c) {
            double ui = s.u[i * n + c];
            double v = ui - lam * (F[(i + 1) * n + c] - F[i * n + c]);
            if (params_.form == SourceForm::Kernel)
                v -= (dt / params_.eps) * (ui - relax[i]);
            unew[i * n + c] = v;
        }
    s.u = std::move(unew);
    s.t += dt;
}

void Evolver::advance(FieldState& s, double T) const {
    while (s.t < T - 1e-14) {
        double dt = std::min(max_dt(s), T - s.t);
        step(s, dt);
    }
}

double Evolver::total_mass(const FieldState& s, int component) const {
    double m = 0.0;
    for (int i = 0; i < grid_.M; ++i) m += s.u[i * n_ + component];
    return m * grid_.dx();
}

DriftReport verify_traveling_wave(Evolver& ev, const RadiativeProfile& profile,
                                  double s, double T) {
    if (ev.dimension() != 1)
        throw EvolutionError("traveling-wave verification is scalar");
    const Grid1D& g = ev.grid();
    if (g.mode != BoundaryMode::Outflow)
        throw EvolutionError("traveling-wave verification needs an outflow grid");

    const double u_minus = profile.u.front();
    const double u_plus = profile.u.back();
    ev.set_farfield({u_minus}, {u_plus});
    FieldState st = ev.init_scalar([&](double x) { return profile.u_at(x); });

    const double level = 0.5 * (u_minus + u_plus);
    auto front = [&](const FieldState& f) {
        for (int i = 0; i + 1 < g.M; ++i) {
            double a = f.u[i] - level, b = f.u[i + 1] - level;
            if (a == 0.0) return g.center(i);
            if ((a > 0.0) != (b > 0.0)) {
                double t = a / (a - b);
                return g.center(i) + t * g.dx();
            }
        }
        throw EvolutionError("wave front left the domain");
    };

    DriftReport rep;
    rep.front_start = front(st);
    ev.advance(st, T);
    rep.front_end = front(st);
    rep.recovered_speed = (rep.front_end - rep.front_start) / T;

    auto l1 = [&](double h) {
        double acc = 0.0;
        for (int i = 0; i < g.M; ++i)
            acc += std::abs(st.u[i] - profile.u_at(g.center(i) - h));
        return acc * g.dx();
    };
    // coarse scan around the exact displacement, then two refinements
    double best_h = s * T, best = l1(best_h);
    double w = 1.0, step_h = 0.005;
    for (int pass = 0; pass < 3; ++pass) {
        double center = best_h;
        for (double h = center - w; h <= center + w; h += step_h) {
            double v = l1(h);
            if (v < best) {
                best = v;
                best_h = h;
            }
        }
        w = 2.0 * step_h;
        step_h /= 50.0;
    }
    rep.l1_drift = best;
    rep.best_shift = best_h;
    return rep;
}

PropertyReport property_suite(const Evolver& ev, const std::vector<double>& u0,
                              const std::vector<double>& v0, double T) {
    if (ev.dimension() != 1)
        throw EvolutionError("property suite is scalar");
    const int M = ev.grid().M;
    if (static_cast<int>(u0.size()) != M || static_cast<int>(v0.size()) != M)
        throw EvolutionError("initial data size mismatch");
    const double dx = ev.grid().dx();

    FieldState su, sv;
    su.n = sv.n = 1;
    su.u = u0;
    sv.u = v0;

    auto l1 = [&] {
        double acc = 0.0;
        for (int i = 0; i < M; ++i) acc += std::abs(su.u[i] - sv.u[i]);
        return acc * dx;
    };
    auto is_ordered = [&] {
        for (int i = 0; i < M; ++i)
            if (su.u[i] > sv.u[i] + 1e-12) return false;
        return true;
    };
    auto monotone_dir = [&](const std::vector<double>& u) {
        bool up = true, down = true;
        for (int i = 0; i + 1 < M; ++i) {
            if (u[i + 1] < u[i] - 1e-13) up = false;
            if (u[i + 1] > u[i] + 1e-13) down = false;
        }
        return up ? 1 : (down ? -1 : 0);
    };

    PropertyReport rep;
    rep.ordered_input = is_ordered();
    int dir = monotone_dir(su.u);
    rep.monotone_input = dir != 0;
    double mass0 = ev.total_mass(su);
    double d_prev = l1();

    while (su.t < T - 1e-14) {
        double dt = std::min({ev.max_dt(su), ev.max_dt(sv), T - su.t});
        ev.step(su, dt);
        ev.step(sv, dt);
        double d = l1();
        double growth = d - d_prev;
        rep.max_contraction_violation = std::max(rep.max_contraction_violation, growth);
        if (growth > 1e-10) rep.contraction_ok = false;
        d_prev = d;
        if (rep.ordered_input && !is_ordered()) rep.comparison_ok = false;
        if (rep.monotone_input && monotone_dir(su.u) != dir)
            rep.monotone_preserved = false;
        ++rep.steps;
    }
    rep.mass_drift = std::abs(ev.total_mass(su) - mass0);
    rep.final_distance = d_prev;
    return rep;
}

}  // namespace radshock
