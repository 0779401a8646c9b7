#pragma once

#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "fbsde/grid.hpp"
#include "fbsde/model.hpp"
#include "fbsde/rng.hpp"

namespace fbsde {

struct Atom {
    double mark;   // z != 0
    double weight; // > 0
};

/// Finite-atom representation of the compensator nu, one atom list per
/// component. Quadratures, samplers and compensator sums are exact finite
/// sums over the atoms; sigma-finite measures must be pre-truncated by the
/// caller.
class DiscreteLevyMeasure {
public:
    DiscreteLevyMeasure() = default;
    explicit DiscreteLevyMeasure(std::vector<Atom> single_component) { add_component(std::move(single_component)); }

    void add_component(std::vector<Atom> atoms);

    int components() const { return static_cast<int>(atoms_.size()); }
    std::span<const Atom> atoms(int component = 0) const { return atoms_.at(component); }
    double total_mass(int component = 0) const { return mass_.at(component); }
    bool empty() const;

    /// All weights multiplied by `factor` (kept exact for the intensity-change
    /// rescaling to total mass c2).
    DiscreteLevyMeasure scaled(double factor) const;

    /// Reads one component from a two-column numeric table (mark weight),
    /// '#' comments and blank lines allowed.
    static DiscreteLevyMeasure from_table(std::istream& in);
    static DiscreteLevyMeasure from_files(const std::vector<std::string>& paths);

private:
    std::vector<std::vector<Atom>> atoms_;
    std::vector<double> mass_;
};

using MarkFn = std::function<double(double)>;

/// Exact quadrature sum_j g(z_j) w_j against one component of nu.
double integrate(const DiscreteLevyMeasure& measure, const MarkFn& g, int component = 0);

/// q(s, j) = int gamma(s, z)^j nu(dz), j >= 2.
double moment_q(const DiscreteLevyMeasure& measure, const MarkFn& gamma_at_s, int j, int component = 0);

/// Gamma(s, j) = int rho(z) [(1 + gamma(s, z))^j - 1] nu(dz), j >= 1.
double moment_Gamma(const DiscreteLevyMeasure& measure, const MarkFn& rho, const MarkFn& gamma_at_s, int j,
                    int component = 0);

/// Gamma^[0](s) = int rho(z) gamma^[0](s, z) nu(dz).
double gamma_bar0(const DiscreteLevyMeasure& measure, const MarkFn& rho, const MarkFn& gamma0_at_s,
                  int component = 0);

struct JumpEvent {
    double time;
    int component;
    double mark;
};

/// Poisson(total_mass * (t1 - t0)) events per component, times uniform on the
/// interval, marks drawn with probability weight/total_mass; sorted by time.
std::vector<JumpEvent> sample_jumps(const DiscreteLevyMeasure& measure, double t0, double t1, Rng& rng);

/// State-dependent jump intensity lambda^i(t, x) with bounds
/// 0 < c1 <= lambda <= c2. Analytic x-derivatives are optional; central
/// differences fill the gaps.
struct IntensitySpec {
    std::vector<std::function<double(double, double)>> lambda;
    double c1 = 0.0;
    double c2 = 0.0;
    std::vector<std::function<double(double, double)>> dx_lambda;  // optional, per component
    std::vector<std::function<double(double, double)>> dxx_lambda; // optional, per component

    double lambda_at(int component, double t, double x) const;
    double dx_lambda_at(int component, int order, double t, double x) const;
};

struct IntensityTransform {
    FBSDEProblem problem;
    DiscreteLevyMeasure measure;
};

/// Girsanov-style change to a constant-intensity compensator: returns the
/// problem with drift
///   b~(t,x,eps) = b(t,x,eps) + sum_i (c2 - lambda^i(t,x)) * eps*int gamma^i(t,x,z) nu^i(dz)
/// and driver
///   f~(t,x,y,z,u) = f(t,x,y,z,u) - sum_i (c2 - lambda^i(t,x)) u^i,
/// plus the measure rescaled to total mass c2 per component. The derivative
/// oracle of the result wraps the original with exact product/chain-rule
/// corrections for the added terms. Requires nu normalized (mass 1 per
/// component) on input.
IntensityTransform transform_intensity(const FBSDEProblem& problem, const DiscreteLevyMeasure& measure,
                                       const IntensitySpec& spec);

/// Explicit density M_s of the intensity change along a tabulated path:
///   M_s = prod_i [ prod_{jumps r<=s} c2/lambda^i(r, X_{r-}) ] * exp(-int_0^s (c2 - lambda^i(r, X_r)) dr).
/// X_{r-} is read at the last grid node before the jump (jumps bin to the
/// following node). Throws if lambda evaluates <= 0 anywhere on the path.
GridFunction density_path(const IntensitySpec& spec, const GridFunction& x_path, std::span<const JumpEvent> jumps);

} // namespace fbsde
