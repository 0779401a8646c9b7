#include "fbsde/ode.hpp"

#include <cmath>
#include <vector>

namespace fbsde {

namespace {

bool all_finite(std::span<const double> v) {
    for (double x : v)
        if (!std::isfinite(x)) return false;
    return true;
}

} // namespace

GridFunction integrate_forward(const OdeRhs& rhs, std::span<const double> v0, const TimeGrid& grid) {
    const int dim = static_cast<int>(v0.size());
    GridFunction out(grid, dim);
    std::vector<double> v(v0.begin(), v0.end());
    std::vector<double> k1(dim), k2(dim), k3(dim), k4(dim), tmp(dim);
    const double h = grid.dt();

    std::copy(v.begin(), v.end(), out.node_values(0).begin());
    for (int i = 0; i < grid.n_steps(); ++i) {
        const double s = grid.node(i);
        rhs(s, v, k1);
        for (int c = 0; c < dim; ++c) tmp[c] = v[c] + 0.5 * h * k1[c];
        rhs(s + 0.5 * h, tmp, k2);
        for (int c = 0; c < dim; ++c) tmp[c] = v[c] + 0.5 * h * k2[c];
        rhs(s + 0.5 * h, tmp, k3);
        for (int c = 0; c < dim; ++c) tmp[c] = v[c] + h * k3[c];
        rhs(grid.node(i + 1), tmp, k4);
        for (int c = 0; c < dim; ++c)
            v[c] += h / 6.0 * (k1[c] + 2.0 * k2[c] + 2.0 * k3[c] + k4[c]);
        if (!all_finite(v))
            throw numeric_error("integrate_forward: non-finite state at node " + std::to_string(i + 1));
        std::copy(v.begin(), v.end(), out.node_values(i + 1).begin());
    }
    return out;
}

GridFunction integrate_terminal(const OdeRhs& rhs, std::span<const double> vT, const TimeGrid& grid) {
    const int dim = static_cast<int>(vT.size());
    GridFunction out(grid, dim);
    std::vector<double> v(vT.begin(), vT.end());
    std::vector<double> k1(dim), k2(dim), k3(dim), k4(dim), tmp(dim);
    const double h = grid.dt();

    std::copy(v.begin(), v.end(), out.node_values(grid.n_steps()).begin());
    // RK4 for w(tau) := v(t1 - tau), dw/dtau = rhs(t1 - tau, w).
    for (int i = grid.n_steps(); i > 0; --i) {
        const double s = grid.node(i);
        rhs(s, v, k1);
        for (int c = 0; c < dim; ++c) tmp[c] = v[c] + 0.5 * h * k1[c];
        rhs(s - 0.5 * h, tmp, k2);
        for (int c = 0; c < dim; ++c) tmp[c] = v[c] + 0.5 * h * k2[c];
        rhs(s - 0.5 * h, tmp, k3);
        for (int c = 0; c < dim; ++c) tmp[c] = v[c] + h * k3[c];
        rhs(grid.node(i - 1), tmp, k4);
        for (int c = 0; c < dim; ++c)
            v[c] += h / 6.0 * (k1[c] + 2.0 * k2[c] + 2.0 * k3[c] + k4[c]);
        if (!all_finite(v))
            throw numeric_error("integrate_terminal: non-finite state at node " + std::to_string(i - 1));
        std::copy(v.begin(), v.end(), out.node_values(i - 1).begin());
    }
    return out;
}

GridFunction integrate_forward(const ScalarOdeRhs& rhs, double v0, const TimeGrid& grid) {
    return integrate_forward(
        [&rhs](double s, std::span<const double> v, std::span<double> dv) { dv[0] = rhs(s, v[0]); },
        std::span<const double>(&v0, 1), grid);
}

GridFunction integrate_terminal(const ScalarOdeRhs& rhs, double vT, const TimeGrid& grid) {
    return integrate_terminal(
        [&rhs](double s, std::span<const double> v, std::span<double> dv) { dv[0] = rhs(s, v[0]); },
        std::span<const double>(&vT, 1), grid);
}

} // namespace fbsde
