#include "fbsde/monte_carlo.hpp"

#include <cmath>

#include "fbsde/ode.hpp"
#include "fbsde/rng.hpp"

namespace fbsde {

PathBundle simulate_noise(const TimeGrid& grid, const DiscreteLevyMeasure& measure, std::uint64_t seed) {
    PathBundle bundle{grid, {}, {}, seed};
    Rng rng(seed);
    const double sd = std::sqrt(grid.dt());
    bundle.brownian_increments.resize(grid.n_steps());
    for (int i = 0; i < grid.n_steps(); ++i) bundle.brownian_increments[i] = sd * rng.normal();
    if (!measure.empty()) bundle.jump_events = sample_jumps(measure, grid.t0(), grid.t1(), rng);
    return bundle;
}

FlowPaths simulate_flows(const FBSDEProblem& problem, const FrozenCoefficients& frozen, double eps,
                         const PathBundle& bundle) {
    const TimeGrid& grid = bundle.grid;
    if (!(grid == frozen.grid)) throw std::invalid_argument("simulate_flows: bundle and frozen grids differ");
    const double dt = grid.dt();
    const DiscreteLevyMeasure& measure = frozen.measure;

    GridFunction x_eps(grid), x1(grid), x2(grid);
    x_eps(0) = problem.initial_state;
    x1(0) = 0.0;
    x2(0) = 0.0;

    std::size_t next_event = 0;
    for (int i = 0; i < grid.n_steps(); ++i) {
        const double s = grid.node(i);
        const double xe = x_eps(i);
        const double v1 = x1(i);
        const double v2 = x2(i);
        const double dw = bundle.brownian_increments[i];

        // jump sums over events in (s_i, s_{i+1}], coefficients at the pre-jump node
        double jump_eps = 0.0, jump_1 = 0.0, jump_2 = 0.0;
        const double s_next = grid.node(i + 1);
        while (next_event < bundle.jump_events.size() && bundle.jump_events[next_event].time <= s_next) {
            const double z = bundle.jump_events[next_event].mark;
            jump_eps += problem.gamma(s, xe, z);
            jump_1 += frozen.gamma0(i, z);
            jump_2 += frozen.dx_gamma0(i, z) * v1;
            ++next_event;
        }
        // exact atom-sum compensators
        const double comp_eps = integrate(measure, [&](double z) { return problem.gamma(s, xe, z); });

        x_eps(i + 1) = xe + problem.b(s, xe, eps) * dt + eps * problem.sigma(s, xe) * dw +
                       eps * (jump_eps - comp_eps * dt);
        x1(i + 1) = v1 + (frozen.de_b0(i) + frozen.dx_b0(i) * v1) * dt + frozen.sigma0(i) * dw +
                    (jump_1 - frozen.int_gamma0(i) * dt);
        x2(i + 1) = v2 +
                    (frozen.dx_b0(i) * v2 + 0.5 * frozen.dxx_b0(i) * v1 * v1 + frozen.dxe_b0(i) * v1 +
                     0.5 * frozen.dee_b0(i)) *
                        dt +
                    frozen.dx_sigma0(i) * v1 * dw + (jump_2 - frozen.int_dx_gamma0(i) * v1 * dt);
        for (double v : {x_eps(i + 1), x1(i + 1), x2(i + 1)})
            if (!std::isfinite(v))
                throw numeric_error("simulate_flows: non-finite state at node " + std::to_string(i + 1));
    }
    return {std::move(x_eps), std::move(x1), std::move(x2)};
}

ReconstructedPath reconstruct(const Order0Solution& order0, const Order1Coefficients* o1,
                              const Order2Coefficients* o2, const FrozenCoefficients& frozen,
                              const FlowPaths& flows, double eps, int order) {
    if (order >= 1 && !o1) throw std::invalid_argument("reconstruct: order-1 coefficients missing");
    if (order >= 2 && !o2) throw std::invalid_argument("reconstruct: order-2 coefficients missing");
    const TimeGrid& grid = frozen.grid;

    ReconstructedPath out{GridFunction(grid), GridFunction(grid), {}};
    for (int i = 0; i < grid.n_nodes(); ++i) {
        double y = order0.y0(i);
        double z = 0.0;
        double epsn = 1.0;
        for (int n = 1; n <= order; ++n) {
            epsn *= eps;
            const OrderEval ev = evaluate_order(n, order0, o1, o2, frozen, flows.x1(i), flows.x2(i), i);
            y += epsn * ev.y;
            z += epsn * ev.z;
        }
        out.y_path(i) = y;
        out.z_path(i) = z;
    }
    out.psi = [&order0, o1, o2, &frozen, &flows, eps, order](int node, double z) {
        double acc = 0.0;
        double epsn = 1.0;
        for (int n = 1; n <= order; ++n) {
            epsn *= eps;
            const OrderEval ev =
                evaluate_order(n, order0, o1, o2, frozen, flows.x1(node), flows.x2(node), node);
            acc += epsn * ev.psi(z);
        }
        return acc;
    };
    return out;
}

CharFnEstimate estimate_charfn(const ExpLevyModel& model, double theta, double eps, int order,
                               const TimeGrid& grid, int n_paths, std::uint64_t seed) {
    if (!model.additive) throw std::invalid_argument("estimate_charfn: model must be additive");
    for (double s : {0.0, 0.37 * model.horizon, model.horizon})
        for (double y : {-1.0, 0.4})
            if (model.f0(s, y) != 0.0)
                throw std::invalid_argument("estimate_charfn: driver must be identically zero");

    // The deterministic drift accumulates into the terminal argument:
    // X^eps_T = x + int_0^T b + eps * (martingale part).
    const GridFunction drift_path =
        integrate_forward([&model](double s, double) { return model.drift(s); }, model.initial_state, grid);
    const double x_bar = drift_path.terminal();

    static const double half_pi = 1.5707963267948966192313216916398;
    CharFnEstimate out;
    if (theta == 0.0) {
        out.value = {1.0, 0.0};
        return out;
    }

    std::complex<double> parts[2];
    for (int im = 0; im < 2; ++im) {
        ExpLevyModel scalar = model;
        scalar.drift = [](double) { return 0.0; };
        scalar.initial_state = 0.0;
        scalar.terminal_derivative = [theta, x_bar, im](int n) {
            const double phase = theta * x_bar + n * half_pi + (im ? -half_pi : 0.0);
            return std::pow(theta, n) * std::cos(phase);
        };
        scalar.terminal = [theta, x_bar, im](double v) {
            return im ? std::sin(theta * (x_bar + v)) : std::cos(theta * (x_bar + v));
        };
        const GridFunction y0 = solve_levy_order0(scalar, grid);
        const LevyCoefficients coeffs = solve_levy_coeffs(scalar, y0, order, grid);
        parts[im] = evaluate_levy(coeffs, scalar, 0.0, 0, eps, order).y;
    }
    out.value = {parts[0].real(), parts[1].real()};

    if (n_paths > 0) {
        // Plain Monte-Carlo on the same additive dynamics.
        double sum_re = 0.0, sum_im = 0.0, sq_re = 0.0, sq_im = 0.0;
        for (int p = 0; p < n_paths; ++p) {
            Rng rng(Rng::mix(seed, static_cast<std::uint64_t>(p)));
            double mart = 0.0;
            const double sd = std::sqrt(grid.dt());
            for (int i = 0; i < grid.n_steps(); ++i) {
                const double s = grid.node(i);
                double comp = integrate(model.measure, [&](double z) { return model.jump_gamma(s, z); });
                mart += model.vol(s) * sd * rng.normal() - comp * grid.dt();
            }
            Rng jrng(Rng::mix(Rng::mix(seed, static_cast<std::uint64_t>(p)), 0x9e37u));
            for (const JumpEvent& e : sample_jumps(model.measure, grid.t0(), grid.t1(), jrng))
                mart += model.jump_gamma(e.time, e.mark);
            const double xT = x_bar + eps * mart;
            const double re = std::cos(theta * xT), im_v = std::sin(theta * xT);
            sum_re += re;
            sum_im += im_v;
            sq_re += re * re;
            sq_im += im_v * im_v;
        }
        const double n = n_paths;
        out.mc_value = std::complex<double>(sum_re / n, sum_im / n);
        const double var_re = (sq_re - sum_re * sum_re / n) / (n - 1);
        const double var_im = (sq_im - sum_im * sum_im / n) / (n - 1);
        out.mc_std_error = std::sqrt((var_re + var_im) / n);
    }
    return out;
}

} // namespace fbsde
