#include "radshock/flux.hpp"

#include <stdexcept>

namespace radshock {

FluxModel FluxModel::parse(const std::string& expr, int dimension) {
    FluxModel m;
    m.dim_ = dimension;
    if (dimension == 1) {
        m.components_.push_back(parse_expression(expr, 1));
        m.build_scalar_derivatives();
    } else {
        throw std::invalid_argument(
            "use parse_components for vector fluxes (one expression per component)");
    }
    return m;
}

FluxModel FluxModel::parse_components(const std::vector<std::string>& exprs) {
    if (exprs.empty())
        throw std::invalid_argument("flux needs at least one component");
    FluxModel m;
    m.dim_ = static_cast<int>(exprs.size());
    for (const auto& e : exprs)
        m.components_.push_back(parse_expression(e, m.dim_));
    if (m.dim_ == 1) {
        m.build_scalar_derivatives();
    } else {
        m.jac_.resize(m.dim_);
        for (int i = 0; i < m.dim_; ++i) {
            m.jac_[i].resize(m.dim_);
            for (int j = 0; j < m.dim_; ++j)
                m.jac_[i][j] = m.components_[i]->derivative(j);
        }
    }
    return m;
}

FluxModel FluxModel::builtin(const std::string& name) {
    if (name == "burgers") return parse("u^2/2");
    if (name == "quartic") return parse("u^4/4 - u^2/2");
    if (name == "cubic") return parse("u^3");
    throw std::invalid_argument("unknown builtin flux: " + name);
}

void FluxModel::build_scalar_derivatives() {
    scalar_derivs_.clear();
    scalar_derivs_.push_back(components_[0]);
    for (int k = 1; k <= 3; ++k)
        scalar_derivs_.push_back(scalar_derivs_.back()->derivative(0));
}

double FluxModel::eval_scalar(double u, int order) const {
    if (dim_ != 1)
        throw std::logic_error("scalar evaluation on vector flux");
    return scalar_derivs_[order]->eval(std::span<const double>(&u, 1));
}

double FluxModel::deriv(double u, int order) const {
    if (order < 0 || order > 3)
        throw std::invalid_argument("derivative order must be in 0..3");
    return eval_scalar(u, order);
}

double FluxModel::deriv_any_order(double u, int order) const {
    if (order < 0)
        throw std::invalid_argument("negative derivative order");
    if (order <= 3) return eval_scalar(u, order);
    Expr::Ptr e = scalar_derivs_[3];
    for (int k = 3; k < order; ++k) e = e->derivative(0);
    return e->eval(std::span<const double>(&u, 1));
}

std::vector<double> FluxModel::eval(std::span<const double> u) const {
    std::vector<double> out(dim_);
    for (int i = 0; i < dim_; ++i) out[i] = components_[i]->eval(u);
    return out;
}

std::vector<std::vector<double>> FluxModel::jacobian(std::span<const double> u) const {
    std::vector<std::vector<double>> J(dim_, std::vector<double>(dim_));
    for (int i = 0; i < dim_; ++i)
        for (int j = 0; j < dim_; ++j) J[i][j] = partial(u, i, j);
    return J;
}

double FluxModel::partial(std::span<const double> u, int i, int j) const {
    if (dim_ == 1) {
        if (i != 0 || j != 0) throw std::out_of_range("component index");
        return scalar_derivs_[1]->eval(u);
    }
    return jac_[i][j]->eval(u);
}

std::string FluxModel::to_string() const {
    std::string s;
    for (int i = 0; i < dim_; ++i) {
        if (i) s += "; ";
        s += components_[i]->to_string();
    }
    return s;
}

}  // namespace radshock
