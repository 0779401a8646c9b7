#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "fbsde/expansion.hpp"
#include "fbsde/grid.hpp"
#include "fbsde/jump_measure.hpp"
#include "fbsde/levy_poly.hpp"
#include "fbsde/model.hpp"

namespace fbsde {

/// One Monte-Carlo scenario: Brownian increments on the grid steps plus the
/// jump events of the interval, shared by every process built on it.
struct PathBundle {
    TimeGrid grid;
    std::vector<double> brownian_increments; // one per step, variance = dt
    std::vector<JumpEvent> jump_events;      // sorted by time
    std::uint64_t seed = 0;
};

/// Deterministic per-seed bundle; derive per-path seeds with
/// Rng::mix(master_seed, path_index) for reproducible parallel fan-out.
PathBundle simulate_noise(const TimeGrid& grid, const DiscreteLevyMeasure& measure, std::uint64_t seed);

/// X^eps together with the first and second flows on shared noise.
struct FlowPaths {
    GridFunction x_eps;
    GridFunction x1;
    GridFunction x2;
};

/// Euler-Maruyama on the grid for X^eps (drift b(.,.,eps), diffusion
/// eps*sigma, jumps eps*gamma), X^[1] and X^[2], all consuming the identical
/// bundle. Jumps are binned to the node right after their event time with
/// coefficients evaluated at the pre-jump node; compensators are subtracted
/// as exact atom sums each step.
FlowPaths simulate_flows(const FBSDEProblem& problem, const FrozenCoefficients& frozen, double eps,
                         const PathBundle& bundle);

/// Node-wise reconstruction Y^[0] + sum eps^n Y^[n] along simulated flows,
/// with matching Z path and a per-node psi evaluator.
struct ReconstructedPath {
    GridFunction y_path;
    GridFunction z_path;
    std::function<double(int node, double z)> psi;
};

ReconstructedPath reconstruct(const Order0Solution& order0, const Order1Coefficients* o1,
                              const Order2Coefficients* o2, const FrozenCoefficients& frozen,
                              const FlowPaths& flows, double eps, int order);

/// Order-N characteristic-function estimate E[exp(i theta X^eps_T)] for an
/// additive Levy model, computed deterministically by running the
/// cos/sin terminal pair through the polynomial expansion (the deterministic
/// drift of X folds into the terminal). n_paths > 0 additionally runs a plain
/// Monte-Carlo cross-check on the same model.
struct CharFnEstimate {
    std::complex<double> value;
    std::optional<std::complex<double>> mc_value;
    double mc_std_error = 0.0;
};

CharFnEstimate estimate_charfn(const ExpLevyModel& model, double theta, double eps, int order,
                               const TimeGrid& grid, int n_paths = 0, std::uint64_t seed = 0);

} // namespace fbsde
