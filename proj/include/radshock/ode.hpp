#ifndef RADSHOCK_ODE_HPP
#define RADSHOCK_ODE_HPP

#include <array>
#include <functional>
#include <vector>

namespace radshock {

using State2 = std::array<double, 2>;

struct OdeOptions {
    double rel_tol = 1e-10;
    double abs_tol = 1e-12;
    double max_step = 0.05;
    double initial_step = 1e-4;
    double t_budget = 1e4;  // |t| limit; exceeding it is an error upstream
};

struct OdeSample {
    double t;
    State2 x;
};

struct OdeResult {
    std::vector<OdeSample> samples;
    bool event_hit = false;
    double event_time = 0.0;
};

// Dormand-Prince 5(4) with step control. Integration stops when the event
// function crosses zero (localized by bisection on the step) or |t| exceeds
// the budget. `rhs(t, x)` must be autonomous-friendly (t unused is fine).
OdeResult integrate_rk45(const std::function<State2(double, const State2&)>& rhs,
                         State2 x0, double t0, double direction,
                         const std::function<double(const State2&)>& event,
                         const OdeOptions& opts);

}  // namespace radshock

#endif
