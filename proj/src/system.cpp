#include "radshock/system.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace radshock {

namespace {

std::vector<double> to_std(const Eigen::VectorXd& v) {
    return std::vector<double>(v.data(), v.data() + v.size());
}

std::string fmt(double x) {
    std::ostringstream os;
    os.precision(17);
    os << x;
    return os.str();
}

}  // namespace

SystemModel::SystemModel(FluxModel flux_in, Eigen::VectorXd L_in, Eigen::VectorXd G_in,
                         double R_in)
    : flux(std::move(flux_in)), L(std::move(L_in)), G(std::move(G_in)), R(R_in) {
    const int n = flux.dimension();
    if (L.size() != n || G.size() != n)
        throw SystemError("L and G must match the flux dimension");
    if (R <= 0.0) throw SystemError("R must be positive");
    if (L.norm() == 0.0 || G.norm() == 0.0)
        throw SystemError("L and G must be nonzero");
}

Eigen::VectorXd SystemModel::f(const Eigen::VectorXd& u) const {
    auto v = flux.eval(std::span<const double>(u.data(), static_cast<std::size_t>(u.size())));
    return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

Eigen::MatrixXd SystemModel::jac(const Eigen::VectorXd& u) const {
    auto rows =
        flux.jacobian(std::span<const double>(u.data(), static_cast<std::size_t>(u.size())));
    const int n = dimension();
    Eigen::MatrixXd J(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) J(i, j) = rows[i][j];
    return J;
}

Eigen::MatrixXd SystemModel::P() const {
    const int n = dimension();
    return Eigen::MatrixXd::Identity(n, n) - (L * L.transpose()) / L.squaredNorm();
}

Eigen::RowVectorXd SystemModel::Q() const { return L.transpose() / L.squaredNorm(); }

SpectralData spectral(const SystemModel& sys, const Eigen::VectorXd& u) {
    const int n = sys.dimension();
    Eigen::MatrixXd J = sys.jac(u);
    Eigen::EigenSolver<Eigen::MatrixXd> es(J);
    if (es.info() != Eigen::Success) throw SystemError("eigenvalue iteration failed");

    const double lam_scale = std::max(1.0, es.eigenvalues().cwiseAbs().maxCoeff());
    for (int i = 0; i < n; ++i)
        if (std::abs(es.eigenvalues()(i).imag()) > 1e-9 * lam_scale)
            throw SystemError("complex eigenvalues: not strictly hyperbolic at this state");

    std::vector<int> order(n);
    for (int i = 0; i < n; ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        return es.eigenvalues()(a).real() < es.eigenvalues()(b).real();
    });

    SpectralData sd;
    sd.lambda.resize(n);
    sd.right.resize(n, n);
    for (int k = 0; k < n; ++k) {
        sd.lambda(k) = es.eigenvalues()(order[k]).real();
        Eigen::VectorXd v = es.eigenvectors().col(order[k]).real();
        double nv = v.norm();
        if (nv < 1e-12) throw SystemError("defective eigenvector");
        v /= nv;
        // fix the sign: largest-magnitude component positive
        int imax = 0;
        for (int i = 1; i < n; ++i)
            if (std::abs(v(i)) > std::abs(v(imax))) imax = i;
        if (v(imax) < 0.0) v = -v;
        sd.right.col(k) = v;
    }
    for (int k = 0; k + 1 < n; ++k)
        if (sd.lambda(k + 1) - sd.lambda(k) <= 1e-8 * lam_scale)
            throw SystemError("coalescing eigenvalues: not strictly hyperbolic at this state");

    Eigen::FullPivLU<Eigen::MatrixXd> lu(sd.right);
    if (!lu.isInvertible())
        throw SystemError("eigenvector matrix singular (defective Jacobian)");
    sd.left = lu.inverse();
    return sd;
}

double main_assumption(const SystemModel& sys, const Eigen::VectorXd& u, int k) {
    SpectralData sd = spectral(sys, u);
    if (k < 1 || k > sys.dimension()) throw SystemError("family index out of range");
    return (sd.l(k) * sys.L).value() * sys.G.dot(sd.r(k));
}

double genuine_nonlinearity(const SystemModel& sys, const Eigen::VectorXd& u, int k) {
    SpectralData sd = spectral(sys, u);
    Eigen::VectorXd r = sd.r(k);
    const double h = 1e-6 * (1.0 + u.norm());
    SpectralData sp = spectral(sys, u + h * r);
    SpectralData sm = spectral(sys, u - h * r);
    return (sp.lambda(k - 1) - sm.lambda(k - 1)) / (2.0 * h);
}

double convexity_reference(const SystemModel& sys, const Eigen::VectorXd& u, int k) {
    SpectralData sd = spectral(sys, u);
    double num = genuine_nonlinearity(sys, u, k);
    double lL = (sd.l(k) * sys.L).value();
    double Gr = sys.G.dot(sd.r(k));
    return num / (lL * Gr * Gr);
}

VectorShock vector_shock(const SystemModel& sys, const Eigen::VectorXd& u_minus,
                         const Eigen::VectorXd& u_plus) {
    Eigen::VectorXd du = u_plus - u_minus;
    if (du.norm() == 0.0) throw SystemError("coincident states");
    Eigen::VectorXd df = sys.f(u_plus) - sys.f(u_minus);
    VectorShock vs;
    vs.u_minus = u_minus;
    vs.u_plus = u_plus;
    vs.s = df.dot(du) / du.squaredNorm();
    double scale = std::max(1.0, du.norm());
    if ((df - vs.s * du).norm() > 1e-10 * scale)
        throw SystemError("states do not satisfy the vector Rankine-Hugoniot relation");
    return vs;
}

ReductionMap::ReductionMap(SystemModel sys, VectorShock shock, int k,
                           const Eigen::MatrixXd& basis)
    : sys_(std::move(sys)), shock_(std::move(shock)), k_(k) {
    const int n = sys_.dimension();
    if (k_ < 1 || k_ > n) throw SystemError("family index out of range");

    if (basis.size() == 0) {
        // orthonormal complement of L from a Householder QR of the column L
        Eigen::HouseholderQR<Eigen::MatrixXd> qr(sys_.L);
        Eigen::MatrixXd Qfull = qr.householderQ();
        V_ = Qfull.rightCols(n - 1).transpose();
    } else {
        if (basis.rows() != n - 1 || basis.cols() != n)
            throw SystemError("basis must be (n-1) x n");
        if ((basis * sys_.L).cwiseAbs().maxCoeff() > 1e-10 * sys_.L.norm())
            throw SystemError("basis rows must be orthogonal to L");
        Eigen::FullPivLU<Eigen::MatrixXd> lu(basis);
        if (lu.rank() != n - 1) throw SystemError("basis rows must be independent");
        V_ = basis;
    }

    if (main_assumption(sys_, shock_.u_minus, k_) <= 0.0 ||
        main_assumption(sys_, shock_.u_plus, k_) <= 0.0)
        throw SystemError("diffusive-coupling condition fails at an end state");

    // re-verify the vector RH relation
    Eigen::VectorXd du = shock_.u_plus - shock_.u_minus;
    Eigen::VectorXd df = sys_.f(shock_.u_plus) - sys_.f(shock_.u_minus);
    if ((df - shock_.s * du).norm() > 1e-9 * std::max(1.0, du.norm()))
        throw SystemError("reference triple violates the Rankine-Hugoniot relation");

    w_minus_ = sys_.G.dot(shock_.u_minus);
    w_plus_ = sys_.G.dot(shock_.u_plus);
    if (w_minus_ == w_plus_)
        throw SystemError("G projects the end states to the same value");
    w_scale_ = std::max(1.0, std::abs(w_minus_ - w_plus_));
}

Eigen::VectorXd ReductionMap::newton(double w, Eigen::VectorXd u) const {
    const int n = sys_.dimension();
    const double res_scale =
        std::max({1.0, shock_.u_minus.norm(), shock_.u_plus.norm()});
    auto residual = [&](const Eigen::VectorXd& x) {
        Eigen::VectorXd F = sys_.f(x) - sys_.f(shock_.u_minus) -
                            shock_.s * (x - shock_.u_minus);
        Eigen::VectorXd r(n);
        r.head(n - 1) = V_ * F;
        r(n - 1) = sys_.G.dot(x) - w;
        return r;
    };
    Eigen::VectorXd r = residual(u);
    for (int it = 0; it < 60; ++it) {
        if (r.norm() <= 1e-14 * res_scale) return u;
        Eigen::MatrixXd J(n, n);
        Eigen::MatrixXd A = sys_.jac(u) - shock_.s * Eigen::MatrixXd::Identity(n, n);
        J.topRows(n - 1) = V_ * A;
        J.row(n - 1) = sys_.G.transpose();
        Eigen::VectorXd step = J.fullPivLu().solve(-r);
        double t = 1.0;
        for (int half = 0; half < 40; ++half) {
            Eigen::VectorXd cand = u + t * step;
            Eigen::VectorXd rc = residual(cand);
            if (rc.norm() < r.norm() || rc.norm() <= 1e-14 * res_scale) {
                u = cand;
                r = rc;
                break;
            }
            t *= 0.5;
            if (half == 39) throw SystemError("Newton stalled");
        }
    }
    if (r.norm() <= 1e-12 * res_scale) return u;
    throw SystemError("Newton failed to converge");
}

Eigen::VectorXd ReductionMap::solve_at(double w, Eigen::VectorXd seed) const {
    try {
        return newton(w, seed);
    } catch (const SystemError&) {
        // continuation in w from the seed, step 1/64 of the reference span
    }
    double w_cur = sys_.G.dot(seed);
    double step = std::abs(w_minus_ - w_plus_) / 64.0;
    const double floor_step = std::abs(w_minus_ - w_plus_) / 4096.0;
    Eigen::VectorXd u = seed;
    while (w_cur != w) {
        double dir = (w > w_cur) ? 1.0 : -1.0;
        double next = w_cur + dir * std::min(step, std::abs(w - w_cur));
        try {
            u = newton(next, u);
            w_cur = next;
        } catch (const SystemError&) {
            step *= 0.5;
            if (step < floor_step)
                throw SystemError("Newton continuation failed approaching w=" +
                                  fmt(next) + " (neighborhood too large)");
        }
    }
    return u;
}

Eigen::VectorXd ReductionMap::Phi(double w) const {
    bool nearer_minus = std::abs(w - w_minus_) <= std::abs(w - w_plus_);
    return solve_at(w, nearer_minus ? shock_.u_minus : shock_.u_plus);
}

double ReductionMap::Fhat(double w) const {
    Eigen::VectorXd u = Phi(w);
    Eigen::VectorXd F =
        sys_.f(u) - sys_.f(shock_.u_minus) - shock_.s * (u - shock_.u_minus);
    return (sys_.Q() * F).value();
}

double ReductionMap::Fhat_prime(double w) const {
    const double h = 1e-6 * w_scale_;
    return (Fhat(w + h) - Fhat(w - h)) / (2.0 * h);
}

double ReductionMap::Fhat_second(double w) const {
    const double h = 1e-4 * w_scale_;
    return (Fhat(w + h) - 2.0 * Fhat(w) + Fhat(w - h)) / (h * h);
}

double ReductionMap::constraint_residual(double w) const {
    Eigen::VectorXd u = Phi(w);
    Eigen::VectorXd F =
        sys_.f(u) - sys_.f(shock_.u_minus) - shock_.s * (u - shock_.u_minus);
    return std::max((V_ * F).cwiseAbs().maxCoeff(), std::abs(sys_.G.dot(u) - w));
}

double ReductionMap::space_factor() const { return std::sqrt(sys_.R); }
double ReductionMap::q_factor() const { return 1.0 / std::sqrt(sys_.R); }
double ReductionMap::unit_speed() const { return std::sqrt(sys_.R) * shock_.s; }

ScalarFunc ReductionMap::reduced_flux_unit() const {
    const double root_R = std::sqrt(sys_.R);
    const double s = shock_.s;
    const ReductionMap* self = this;
    ScalarFunc sf;
    sf.f = [self, root_R, s](double w) { return root_R * (self->Fhat(w) + s * w); };
    sf.deriv = [self, root_R, s](double w, int order) -> double {
        switch (order) {
            case 1: return root_R * (self->Fhat_prime(w) + s);
            case 2: return root_R * self->Fhat_second(w);
            case 3: {
                const double h = 1e-3 * self->w_scale_;
                return root_R *
                       (self->Fhat_second(w + h) - self->Fhat_second(w - h)) / (2.0 * h);
            }
            default: throw std::invalid_argument("derivative order must be 1..3");
        }
    };
    return sf;
}

ChordFunction ReductionMap::reduced_chord() const {
    ScalarFunc sf = reduced_flux_unit();
    return ChordFunction(sf, shock_speed(sf, w_minus_, w_plus_));
}

ReductionMap build_reduction(const SystemModel& sys, const VectorShock& shock, int k) {
    return ReductionMap(sys, shock, k);
}

SystemProfile lift_profile(const ReductionMap& map, const RadiativeProfile& scalar) {
    SystemProfile sp;
    sp.epsilon = scalar.epsilon;
    sp.xi = scalar.xi;
    sp.w = scalar.u;
    sp.z = scalar.z;
    sp.q = scalar.q;
    const SystemModel& sys = map.model();
    const VectorShock& sh = map.shock();
    const double root_R = map.space_factor();

    sp.u.reserve(scalar.u.size());
    for (double w : scalar.u) sp.u.push_back(map.Phi(w));

    // residuals against both profile equations; along the unit-frame scalar
    // profile z' = sqrt(R) * Fhat(w)
    double rflux = 0.0, rcon = 0.0;
    for (std::size_t i = 0; i < sp.u.size(); ++i) {
        const Eigen::VectorXd& u = sp.u[i];
        Eigen::VectorXd F = sys.f(u) - sys.f(sh.u_minus) - sh.s * (u - sh.u_minus);
        double fhat = scalar.zp[i] / root_R;  // z' = sqrt(R) Fhat along the profile
        rflux = std::max(rflux, (F - fhat * sys.L).cwiseAbs().maxCoeff());
        rcon = std::max(rcon, std::abs(sys.G.dot(u) - sp.w[i]));
    }
    sp.residual_flux = rflux;
    sp.residual_constraint = rcon;

    for (const JumpRecord& jr : scalar.jumps) {
        if (jr.continuous) continue;
        SystemProfile::InnerJump ij;
        ij.xi0 = jr.xi0;
        ij.u_left = map.Phi(jr.u_left);
        ij.u_right = map.Phi(jr.u_right);
        ij.rh_residual = (sys.f(ij.u_right) - sys.f(ij.u_left) -
                          sh.s * (ij.u_right - ij.u_left))
                             .norm();
        sp.jumps.push_back(std::move(ij));
    }
    return sp;
}

namespace {

// Tangent of the Hugoniot locus H(u, sigma) = 0 in (u, sigma) space.
Eigen::VectorXd hugoniot_tangent(const SystemModel& sys, const Eigen::VectorXd& u_l,
                                 const Eigen::VectorXd& u, double sigma) {
    const int n = sys.dimension();
    Eigen::MatrixXd DH(n, n + 1);
    DH.leftCols(n) = sys.jac(u) - sigma * Eigen::MatrixXd::Identity(n, n);
    DH.col(n) = -(u - u_l);
    Eigen::FullPivLU<Eigen::MatrixXd> lu(DH);
    lu.setThreshold(1e-10);
    if (lu.dimensionOfKernel() != 1)
        throw SystemError("shock-curve trace lost transversality");
    Eigen::VectorXd t = lu.kernel().col(0);
    return t / t.norm();
}

}  // namespace

JumpTranslation translate_admissibility(const ReductionMap& map,
                                        const Eigen::VectorXd& u_l,
                                        const Eigen::VectorXd& u_r) {
    const SystemModel& sys = map.model();
    const int n = sys.dimension();
    const int k = map.family();
    const double s = map.speed();
    JumpTranslation rep;

    const double state_scale = std::max({1.0, u_l.norm(), u_r.norm()});
    if ((u_r - u_l).norm() <= 1e-12 * state_scale) {
        rep.no_jump = true;
        rep.lax = rep.lax_separation = rep.sign_consistent = rep.liu = true;
        rep.speed_at_end = s;
        return rep;
    }

    rep.rh_residual =
        (sys.f(u_r) - sys.f(u_l) - s * (u_r - u_l)).norm();

    SpectralData sl = spectral(sys, u_l);
    SpectralData sr = spectral(sys, u_r);
    rep.lax = sr.lambda(k - 1) < s && s < sl.lambda(k - 1);
    bool sep = true;
    if (k > 1) sep = sep && sl.lambda(k - 2) < s;
    if (k < n) sep = sep && s < sr.lambda(k);
    rep.lax_separation = sep;

    // scalar-side sign consistency at states Phi(w) sampled across the jump
    const double w_l = sys.G.dot(u_l);
    const double w_r = sys.G.dot(u_r);
    bool ok = true;
    int counted = 0;
    for (int i = 0; i < 50; ++i) {
        double w = w_l + (w_r - w_l) * (i + 0.5) / 50.0;
        double fp = map.Fhat_prime(w);
        if (std::abs(fp) < 1e-8 * map.w_scale()) continue;  // near-sonic sample
        SpectralData su = spectral(sys, map.Phi(w));
        double lhs = su.lambda(k - 1) - s;
        if ((lhs > 0.0) != (fp > 0.0)) ok = false;
        ++counted;
    }
    rep.sign_consistent = ok;
    rep.sign_samples = counted;

    // Liu E-condition along the k-shock curve traced from u_l to u_r
    Eigen::VectorXd delta = u_r - u_l;
    const double dist = delta.norm();
    Eigen::VectorXd dhat = delta / dist;
    Eigen::VectorXd d0 = sl.r(k);
    if (d0.dot(delta) < 0.0) d0 = -d0;

    const double tau0 = 1e-3 * dist;
    Eigen::VectorXd y(n + 1);
    y.head(n) = u_l + tau0 * d0;
    {
        Eigen::VectorXd du = y.head(n) - u_l;
        y(n) = (sys.f(y.head(n)) - sys.f(u_l)).dot(du) / du.squaredNorm();
    }
    auto Hres = [&](const Eigen::VectorXd& yy) {
        return Eigen::VectorXd(sys.f(yy.head(n)) - sys.f(u_l) -
                               yy(n) * (yy.head(n) - u_l));
    };
    auto correct = [&](Eigen::VectorXd yy, const Eigen::VectorXd& tang,
                       const Eigen::VectorXd& anchor) {
        for (int it = 0; it < 20; ++it) {
            Eigen::VectorXd r(n + 1);
            r.head(n) = Hres(yy);
            r(n) = tang.dot(yy - anchor);
            if (r.norm() <= 1e-13 * state_scale) break;
            Eigen::MatrixXd J(n + 1, n + 1);
            J.topLeftCorner(n, n) =
                sys.jac(yy.head(n)) - yy(n) * Eigen::MatrixXd::Identity(n, n);
            J.topRightCorner(n, 1) = -(yy.head(n) - u_l);
            J.row(n) = tang.transpose();
            yy += J.fullPivLu().solve(-r);
        }
        return yy;
    };

    double min_margin = std::numeric_limits<double>::infinity();
    const double ds = 1.3 * dist / 200.0;
    Eigen::VectorXd prev_t = Eigen::VectorXd::Zero(n + 1);
    prev_t.head(n) = d0;
    bool reached = false;
    for (int step = 0; step < 200 && !reached; ++step) {
        Eigen::VectorXd t = hugoniot_tangent(sys, u_l, y.head(n), y(n));
        if (t.dot(prev_t) < 0.0) t = -t;
        prev_t = t;
        Eigen::VectorXd y_pred = y + ds * t;
        y = correct(y_pred, t, y_pred);
        double progress = (y.head(n) - u_l).dot(dhat);
        if (progress >= dist - 0.75 * ds) {
            // land exactly on the far state's cross-section
            Eigen::VectorXd tend = Eigen::VectorXd::Zero(n + 1);
            tend.head(n) = dhat;
            Eigen::VectorXd anchor = y;
            anchor.head(n) += (dist - progress) * dhat;
            y = correct(y, tend, anchor);
            rep.speed_at_end = y(n);
            reached = true;
            break;
        }
        min_margin = std::min(min_margin, y(n) - s);
    }
    if (!reached)
        throw SystemError("shock-curve trace did not reach the far state");
    rep.liu_min_margin = min_margin;
    rep.liu = min_margin >= -1e-8 * std::max(1.0, std::abs(s));
    return rep;
}

}  // namespace radshock
