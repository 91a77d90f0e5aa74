#ifndef RADSHOCK_FLUX_HPP
#define RADSHOCK_FLUX_HPP

#include <span>
#include <string>
#include <vector>

#include "radshock/expr.hpp"

namespace radshock {

// Flux function f with exact analytic derivatives, scalar or vector-valued.
// Components are expression trees; derivatives come from symbolic
// differentiation, so f''' is exact wherever the expression is smooth.
// Immutable after construction.
class FluxModel {
public:
    // Scalar flux from an expression in u.
    static FluxModel parse(const std::string& expr, int dimension = 1);
    // Vector flux, one expression per component, variables u1..un.
    static FluxModel parse_components(const std::vector<std::string>& exprs);
    // Built-in fluxes: "burgers" (u^2/2), "quartic" (u^4/4 - u^2/2), "cubic" (u^3).
    static FluxModel builtin(const std::string& name);

    int dimension() const { return dim_; }

    // Scalar interface (dimension() == 1). order 0 is f itself; orders 1..3
    // are exact analytic derivatives. order > 3 is rejected.
    double operator()(double u) const { return eval_scalar(u, 0); }
    double deriv(double u, int order) const;

    // Unbounded-order scalar derivative, used internally by the regularity
    // machinery for Taylor expansions. Same exact symbolic route.
    double deriv_any_order(double u, int order) const;

    // Vector interface: f(u) and the Jacobian df_i/du_j.
    std::vector<double> eval(std::span<const double> u) const;
    std::vector<std::vector<double>> jacobian(std::span<const double> u) const;
    // Partial derivative d f_i / d u_j at u.
    double partial(std::span<const double> u, int i, int j) const;

    std::string to_string() const;

private:
    FluxModel() = default;
    void build_scalar_derivatives();
    double eval_scalar(double u, int order) const;

    int dim_ = 1;
    std::vector<Expr::Ptr> components_;
    // scalar case: cached d^k f / du^k for k = 0..3
    std::vector<Expr::Ptr> scalar_derivs_;
    // vector case: cached Jacobian entries [i][j]
    std::vector<std::vector<Expr::Ptr>> jac_;
};

}  // namespace radshock

#endif
