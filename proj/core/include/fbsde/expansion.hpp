#pragma once

#include <functional>

#include "fbsde/grid.hpp"
#include "fbsde/jump_measure.hpp"
#include "fbsde/model.hpp"
#include "fbsde/ode.hpp"

namespace fbsde {

/// Deterministic zeroth-order solution: X^[0] solves the drift-only forward
/// ODE at eps = 0, Y^[0] the nonlinear backward ODE along it. Z^[0] and
/// psi^[0] vanish identically and are carried implicitly.
struct Order0Solution {
    GridFunction x0;
    GridFunction y0;
};

/// Coefficient functions and jump moments frozen along (X^[0], Y^[0]).
/// Driver partials are evaluated at (s, X^[0](s), Y^[0](s), 0, 0); everything
/// is tabulated once on the master grid and linearly interpolated at RK4
/// stage midpoints.
struct FrozenCoefficients {
    TimeGrid grid;

    GridFunction b0, sigma0, Gamma0;
    GridFunction dx_b0, de_b0, dxx_b0, dxe_b0, dee_b0;
    GridFunction dx_sigma0, dx_Gamma0;

    double xi0 = 0.0;     // xi(X^[0]_T)
    double dx_xi0 = 0.0;  // d/dx xi at X^[0]_T
    double dxx_xi0 = 0.0; // d2/dx2 xi at X^[0]_T

    GridFunction f_x, f_y, f_z, f_u;
    GridFunction f_xx, f_xy, f_xz, f_xu, f_yy, f_yz, f_yu, f_zz, f_zu, f_uu;

    GridFunction int_gamma0;       // int gamma^[0](s, z) nu(dz)
    GridFunction int_dx_gamma0;    // int d_x gamma^[0](s, z) nu(dz)
    GridFunction int_gamma0_sq;    // int gamma^[0](s, z)^2 nu(dz)
    GridFunction int_rho_gamma0_sq;// int rho(z) gamma^[0](s, z)^2 nu(dz)

    DiscreteLevyMeasure measure;
    GridFunction x0_path;
    std::function<double(double, double, double)> gamma_cb;    // gamma(t, x, z)
    std::function<double(double, double, double)> dx_gamma_cb; // d_x gamma(t, x, z)
    std::function<double(double)> rho_cb;

    double gamma0(int node, double z) const { return gamma_cb(grid.node(node), x0_path(node), z); }
    double dx_gamma0(int node, double z) const { return dx_gamma_cb(grid.node(node), x0_path(node), z); }

    explicit FrozenCoefficients(const TimeGrid& g);
};

/// Y^[1]_s = y1(s) X^[1]_s + y0(s); terminal values y1(T) = d_x xi^[0],
/// y0(T) = 0 hold exactly.
struct Order1Coefficients {
    GridFunction y1;
    GridFunction y0;
};

/// Y^[2]_s = y2(s) X^[2]_s + y11(s) (X^[1]_s)^2 + y1(s) X^[1]_s + y0(s).
struct Order2Coefficients {
    GridFunction y2;
    GridFunction y11;
    GridFunction y1;
    GridFunction y0;
};

Order0Solution solve_order0(const FBSDEProblem& problem, const TimeGrid& grid);

FrozenCoefficients freeze(const FBSDEProblem& problem, const Order0Solution& order0,
                          const DiscreteLevyMeasure& measure);

/// Solves the two linear terminal-value ODEs of the first order (y1, then y0
/// which consumes y1).
Order1Coefficients solve_order1(const FrozenCoefficients& frozen);

/// Solves the four linear ODEs of the second order in dependency order
/// (y2, y11, y1, y0); the y0 equation carries the jump-moment forcings
/// int (gamma^[0])^2 nu and int rho (gamma^[0])^2 nu.
Order2Coefficients solve_order2(const FrozenCoefficients& frozen, const Order1Coefficients& o1);

/// (Y^[n], Z^[n], psi^[n](.)) at one node given flow values x1 = X^[1],
/// x2 = X^[2]. The mark function is valid as long as the inputs it was built
/// from are alive.
struct OrderEval {
    double y = 0.0;
    double z = 0.0;
    std::function<double(double)> psi;
};

OrderEval evaluate_order(int n, const Order0Solution& order0, const Order1Coefficients* o1,
                         const Order2Coefficients* o2, const FrozenCoefficients& frozen, double x1, double x2,
                         int s_index);

} // namespace fbsde
