#pragma once

#include <functional>
#include <vector>

#include "fbsde/grid.hpp"
#include "fbsde/jump_measure.hpp"
#include "fbsde/model.hpp"

namespace fbsde {

/// Forward dynamics with time-only coefficients, in one of two linear forms:
///
///   multiplicative (additive = false):
///     dX = X (b(s) ds + sigma(s) dW) + X_- gamma(s, z) mu~(ds, dz)
///   additive (additive = true):
///     dX = b(s) ds + sigma(s) dW + gamma(s, z) mu~(ds, dz)
///
/// The backward equation keeps epsilon out of the dynamics and places it in
/// the data: Y = xi(eps X_T) + int f(r, eps X_r, Y, Z, int rho psi dnu) dr - ...
/// Coefficient functions y^[n] then come from linear ODEs solvable to
/// arbitrary order.
///
/// High-order terminal and driver derivatives cannot come from finite
/// differences, so the model carries them explicitly:
/// terminal_derivative(n) returns d^n xi / dx^n at 0, and driver partials are
/// registered analytically on `driver` for every order the expansion needs.
struct ExpLevyModel {
    std::function<double(double)> drift;              // b(s)
    std::function<double(double)> vol;                // sigma(s)
    std::function<double(double, double)> jump_gamma; // gamma(s, z)
    DiscreteLevyMeasure measure;
    std::function<double(double)> rho;             // weight in the driver's u-argument
    std::function<double(double)> terminal;        // xi(v), used by simulation oracles
    std::function<double(int)> terminal_derivative; // n -> d^n xi(0)
    CoefficientSet driver;                          // Coef::driver only
    double initial_state = 0.0;
    double horizon = 1.0;
    bool additive = false;

    double rho_at(double z) const { return rho ? rho(z) : 1.0; }
    double f0(double s, double y0) const {
        return driver.eval(Coef::driver, MultiIndex::none(), {.t = s, .y = y0});
    }
    /// Driver partial along the zeroth-order point (s, 0, Y^[0](s), 0, 0).
    double f0_partial(const MultiIndex& mi, double s, double y0) const {
        return driver.eval(Coef::driver, mi, {.t = s, .y = y0});
    }
};

/// y^[n] tables. Multiplicative models store one scalar function per order;
/// additive models store the polynomial coefficients y^[n]_j, j = 0..n, as
/// the components of an (n+1)-dimensional grid function.
struct LevyCoefficients {
    GridFunction y0_order; // Y^[0](s)
    std::vector<GridFunction> orders;
    bool additive = false;

    int max_order() const { return static_cast<int>(orders.size()); }
    const GridFunction& order(int n) const { return orders.at(n - 1); }
};

/// All ordered tuples of `parts` positive integers summing to `total`
/// (compositions); empty when parts > total. There are binomial(total-1,
/// parts-1) of them.
std::vector<std::vector<int>> compositions(int total, int parts);

/// Number of terms assembled for the order-n multi-index driver sum.
std::size_t driver_term_count(int n);

/// Y^[0] from the terminal-value ODE -dY/ds = f(s, 0, Y, 0, 0), Y(T) = xi(0).
GridFunction solve_levy_order0(const ExpLevyModel& model, const TimeGrid& grid);

/// Solves y^[1..N] in order. Each right-hand side assembles the linear
/// homogeneous bracket (with the jump moments q(s, j) and Gamma(s, j)), the
/// explicit forcing d_x^n f^[0]/n!, and the multi-index sum over lower-order
/// coefficients. Moment tables are tabulated once per (node, j).
LevyCoefficients solve_levy_coeffs(const ExpLevyModel& model, const GridFunction& y0, int order,
                                   const TimeGrid& grid);

struct LevyEval {
    double y = 0.0;
    double z = 0.0;
    std::function<double(double)> psi;
};

/// Reconstructs (Y, Z, psi) at node s_index from the coefficient tables and
/// the flow value x_value, truncated at order N.
LevyEval evaluate_levy(const LevyCoefficients& coeffs, const ExpLevyModel& model, double x_value, int s_index,
                       double eps, int order);

/// Wraps the model as a generic FBSDE problem with the eps-placement baked
/// into the data (xi(eps x), f(t, eps x, ...)); simulate the wrap at unit
/// noise scale to realize the unscaled linear forward dynamics. Used by the
/// simulation-based reference solvers.
FBSDEProblem wrap_for_reference(const ExpLevyModel& model, double eps);

} // namespace fbsde
