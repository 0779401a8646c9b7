#pragma once

#include <complex>
#include <cstdint>
#include <vector>

#include "fbsde/grid.hpp"
#include "fbsde/jump_measure.hpp"
#include "fbsde/model.hpp"

namespace fbsde {

/// Least-squares Monte-Carlo backward solver configuration. The monomial
/// basis {1, X, ..., X^degree} is applied to the standardized state; normal
/// equations carry a small ridge.
struct LSMCConfig {
    int n_paths = 100000;
    int basis_degree = 3;
    TimeGrid grid{0.0, 1.0, 256};
    std::uint64_t seed = 0;
    int picard_sweeps = 3;
    double ridge = 1e-10;
    int threads = 0;    // 0 = hardware concurrency
    int se_batches = 8; // independent backward chains for the std-error estimate
};

struct LSMCResult {
    double y0 = 0.0;
    double std_error = 0.0;
    std::vector<double> step_condition; // regression condition number per step
    std::vector<double> path_values;    // per-path step-0 contributions (mean = y0)
};

/// Regression-based backward induction
///   Y_i = E^[Y_{i+1} | X_i] + f(t_i, X_i, Y_i, Z_i, U_i) dt
/// with Z from the dW-weighted response, U from the realized compensated
/// rho-weighted jump sum, and an implicit-in-Y Picard fixed point per step.
/// With an IntensitySpec the forward jumps are simulated under the
/// state-dependent intensity by thinning (candidates at rate c2, acceptance
/// probability lambda/c2) and the U response is rescaled by lambda.
/// Throws numeric_error on a singular regression after degree reduction.
LSMCResult lsmc_solve(const FBSDEProblem& problem, const DiscreteLevyMeasure& measure, double eps,
                      const LSMCConfig& config, const IntensitySpec* intensity = nullptr);

struct McEstimate {
    double value = 0.0;
    double std_error = 0.0;
};

/// Sample mean of xi(X^eps_T) on the Euler scheme; requires f == 0 (sampled
/// check) since only then Y_0 = E[xi(X_T)].
McEstimate plain_mc_terminal(const FBSDEProblem& problem, const DiscreteLevyMeasure& measure, double eps,
                             int n_paths, std::uint64_t seed, const TimeGrid& grid,
                             const IntensitySpec* intensity = nullptr);

/// Closed-form characteristic function of the additive compensated dynamics
///   X_T = x + b T + eps sigma W_T + eps int gamma(z) mu~
/// with time-constant coefficients:
///   exp( i theta x + T [ i theta b - theta^2 eps^2 sigma^2 / 2
///        + sum_j w_j (e^{i theta eps gamma(z_j)} - 1 - i theta eps gamma(z_j)) ] ).
std::complex<double> levy_khintchine_exact(double b, double sigma, const DiscreteLevyMeasure& measure,
                                           const MarkFn& gamma, double eps, double theta, double T, double x);

} // namespace fbsde
