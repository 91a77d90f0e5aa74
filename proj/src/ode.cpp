#include "radshock/ode.hpp"

#include <algorithm>
#include <cmath>

namespace radshock {

namespace {

// Dormand-Prince coefficients
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                 a64 = 49.0 / 176, a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                 b5 = -2187.0 / 6784, b6 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                 e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

State2 axpy(const State2& x, double h, const State2& d) {
    return {x[0] + h * d[0], x[1] + h * d[1]};
}

}  // namespace

OdeResult integrate_rk45(const std::function<State2(double, const State2&)>& rhs,
                         State2 x0, double t0, double direction,
                         const std::function<double(const State2&)>& event,
                         const OdeOptions& opts) {
    OdeResult res;
    double t = t0;
    State2 x = x0;
    res.samples.push_back({t, x});
    double h = opts.initial_step * direction;
    double g_prev = event ? event(x) : 1.0;

    State2 k1 = rhs(t, x);
    long iter = 0;
    while (std::abs(t - t0) < opts.t_budget && ++iter < 2000000) {
        if (std::abs(h) > opts.max_step) h = opts.max_step * direction;
        State2 k2 = rhs(t + c2 * h, axpy(x, h, {a21 * k1[0], a21 * k1[1]}));
        State2 k3 = rhs(t + c3 * h, {x[0] + h * (a31 * k1[0] + a32 * k2[0]),
                                     x[1] + h * (a31 * k1[1] + a32 * k2[1])});
        State2 k4 = rhs(t + c4 * h, {x[0] + h * (a41 * k1[0] + a42 * k2[0] + a43 * k3[0]),
                                     x[1] + h * (a41 * k1[1] + a42 * k2[1] + a43 * k3[1])});
        State2 k5 = rhs(t + c5 * h,
                        {x[0] + h * (a51 * k1[0] + a52 * k2[0] + a53 * k3[0] + a54 * k4[0]),
                         x[1] + h * (a51 * k1[1] + a52 * k2[1] + a53 * k3[1] + a54 * k4[1])});
        State2 k6 = rhs(
            t + h,
            {x[0] + h * (a61 * k1[0] + a62 * k2[0] + a63 * k3[0] + a64 * k4[0] + a65 * k5[0]),
             x[1] + h * (a61 * k1[1] + a62 * k2[1] + a63 * k3[1] + a64 * k4[1] + a65 * k5[1])});
        State2 xn = {
            x[0] + h * (b1 * k1[0] + b3 * k3[0] + b4 * k4[0] + b5 * k5[0] + b6 * k6[0]),
            x[1] + h * (b1 * k1[1] + b3 * k3[1] + b4 * k4[1] + b5 * k5[1] + b6 * k6[1])};
        State2 k7 = rhs(t + h, xn);
        double err = 0.0;
        for (int i = 0; i < 2; ++i) {
            double ei = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] +
                             e7 * k7[i]);
            double sc = opts.abs_tol +
                        opts.rel_tol * std::max(std::abs(x[i]), std::abs(xn[i]));
            err = std::max(err, std::abs(ei) / sc);
        }
        if (err <= 1.0) {
            double g_new = event ? event(xn) : 1.0;
            if (event && (g_new == 0.0 || (g_prev > 0.0) != (g_new > 0.0))) {
                // localize the crossing by bisection on the step length
                double lo = 0.0, hi = h;
                State2 xe = xn;
                for (int it = 0; it < 80; ++it) {
                    double mid = 0.5 * (lo + hi);
                    // composite RK4 from (t, x) over `mid`
                    State2 xm = x;
                    const int nsub = 8;
                    double hs = mid / nsub;
                    double ts = t;
                    for (int ss = 0; ss < nsub; ++ss) {
                        State2 m1 = rhs(ts, xm);
                        State2 m2 = rhs(ts + 0.5 * hs, axpy(xm, 0.5 * hs, m1));
                        State2 m3 = rhs(ts + 0.5 * hs, axpy(xm, 0.5 * hs, m2));
                        State2 m4 = rhs(ts + hs, axpy(xm, hs, m3));
                        xm = {xm[0] + hs / 6.0 * (m1[0] + 2 * m2[0] + 2 * m3[0] + m4[0]),
                              xm[1] + hs / 6.0 * (m1[1] + 2 * m2[1] + 2 * m3[1] + m4[1])};
                        ts += hs;
                    }
                    double gm = event(xm);
                    if ((gm > 0.0) == (g_prev > 0.0)) {
                        lo = mid;
                    } else {
                        hi = mid;
                        xe = xm;
                    }
                    if (std::abs(hi - lo) < 1e-15 * std::max(1.0, std::abs(h))) break;
                }
                res.samples.push_back({t + hi, xe});
                res.event_hit = true;
                res.event_time = t + hi;
                return res;
            }
            t += h;
            x = xn;
            k1 = k7;  // FSAL
            g_prev = g_new;
            res.samples.push_back({t, x});
        }
        double fac = 0.9 * std::pow(err > 1e-300 ? err : 1e-300, -0.2);
        fac = std::clamp(fac, 0.2, 5.0);
        h *= fac;
        if (std::abs(h) < 1e-14) h = (direction > 0 ? 1e-14 : -1e-14);
    }
    return res;
}

}  // namespace radshock
