#include "fbsde/expansion.hpp"

namespace fbsde {

FrozenCoefficients::FrozenCoefficients(const TimeGrid& g)
    : grid(g), b0(g), sigma0(g), Gamma0(g), dx_b0(g), de_b0(g), dxx_b0(g), dxe_b0(g), dee_b0(g),
      dx_sigma0(g), dx_Gamma0(g), f_x(g), f_y(g), f_z(g), f_u(g), f_xx(g), f_xy(g), f_xz(g), f_xu(g),
      f_yy(g), f_yz(g), f_yu(g), f_zz(g), f_zu(g), f_uu(g), int_gamma0(g), int_dx_gamma0(g),
      int_gamma0_sq(g), int_rho_gamma0_sq(g), x0_path(g) {}

Order0Solution solve_order0(const FBSDEProblem& problem, const TimeGrid& grid) {
    problem.require_scalar("solve_order0");

    GridFunction x0 = integrate_forward(
        [&problem](double s, double v) { return problem.b(s, v, 0.0); }, problem.initial_state, grid);

    const double xi_T = problem.xi(x0.terminal());
    GridFunction y0 = integrate_terminal(
        [&problem, &x0](double s, double v) { return problem.f(s, x0.interpolate(s), v, 0.0, 0.0); }, xi_T, grid);

    x0.check_finite("X^[0]");
    y0.check_finite("Y^[0]");
    return {std::move(x0), std::move(y0)};
}

FrozenCoefficients freeze(const FBSDEProblem& problem, const Order0Solution& order0,
                          const DiscreteLevyMeasure& measure) {
    const TimeGrid& grid = order0.x0.grid();
    FrozenCoefficients fc(grid);
    fc.measure = measure;
    fc.x0_path = order0.x0;
    fc.gamma_cb = [&problem](double t, double x, double z) { return problem.gamma(t, x, z); };
    fc.dx_gamma_cb = [&problem](double t, double x, double z) {
        return problem.partial(Coef::jump, MultiIndex::x(1), {.t = t, .x = x, .mark = z});
    };
    fc.rho_cb = [&problem](double z) { return problem.rho(z); };

    for (int i = 0; i < grid.n_nodes(); ++i) {
        const double s = grid.node(i);
        const double x = order0.x0(i);
        const double y = order0.y0(i);

        const Point pb{.t = s, .x = x, .eps = 0.0};
        fc.b0(i) = problem.partial(Coef::drift, MultiIndex::none(), pb);
        fc.dx_b0(i) = problem.partial(Coef::drift, MultiIndex::x(1), pb);
        fc.de_b0(i) = problem.partial(Coef::drift, MultiIndex::eps(1), pb);
        fc.dxx_b0(i) = problem.partial(Coef::drift, MultiIndex::x(2), pb);
        fc.dxe_b0(i) = problem.partial(Coef::drift, MultiIndex::x_eps(1, 1), pb);
        fc.dee_b0(i) = problem.partial(Coef::drift, MultiIndex::eps(2), pb);

        fc.sigma0(i) = problem.sigma(s, x);
        fc.dx_sigma0(i) = problem.partial(Coef::diffusion, MultiIndex::x(1), {.t = s, .x = x});

        const Point pf{.t = s, .x = x, .y = y, .z = 0.0, .u = 0.0};
        fc.f_x(i) = problem.partial(Coef::driver, MultiIndex::driver(1, 0, 0, 0), pf);
        fc.f_y(i) = problem.partial(Coef::driver, MultiIndex::driver(0, 1, 0, 0), pf);
        fc.f_z(i) = problem.partial(Coef::driver, MultiIndex::driver(0, 0, 1, 0), pf);
        fc.f_u(i) = problem.partial(Coef::driver, MultiIndex::driver(0, 0, 0, 1), pf);
        fc.f_xx(i) = problem.partial(Coef::driver, MultiIndex::driver(2, 0, 0, 0), pf);
        fc.f_xy(i) = problem.partial(Coef::driver, MultiIndex::driver(1, 1, 0, 0), pf);
        fc.f_xz(i) = problem.partial(Coef::driver, MultiIndex::driver(1, 0, 1, 0), pf);
        fc.f_xu(i) = problem.partial(Coef::driver, MultiIndex::driver(1, 0, 0, 1), pf);
        fc.f_yy(i) = problem.partial(Coef::driver, MultiIndex::driver(0, 2, 0, 0), pf);
        fc.f_yz(i) = problem.partial(Coef::driver, MultiIndex::driver(0, 1, 1, 0), pf);
        fc.f_yu(i) = problem.partial(Coef::driver, MultiIndex::driver(0, 1, 0, 1), pf);
        fc.f_zz(i) = problem.partial(Coef::driver, MultiIndex::driver(0, 0, 2, 0), pf);
        fc.f_zu(i) = problem.partial(Coef::driver, MultiIndex::driver(0, 0, 1, 1), pf);
        fc.f_uu(i) = problem.partial(Coef::driver, MultiIndex::driver(0, 0, 0, 2), pf);

        auto gamma_here = [&](double z) { return problem.gamma(s, x, z); };
        auto dx_gamma_here = [&](double z) {
            return problem.partial(Coef::jump, MultiIndex::x(1), {.t = s, .x = x, .mark = z});
        };
        auto rho = [&](double z) { return problem.rho(z); };
        fc.Gamma0(i) = gamma_bar0(measure, rho, gamma_here);
        fc.dx_Gamma0(i) = gamma_bar0(measure, rho, dx_gamma_here);
        fc.int_gamma0(i) = integrate(measure, gamma_here);
        fc.int_dx_gamma0(i) = integrate(measure, dx_gamma_here);
        fc.int_gamma0_sq(i) = integrate(measure, [&](double z) { return gamma_here(z) * gamma_here(z); });
        fc.int_rho_gamma0_sq(i) =
            integrate(measure, [&](double z) { return rho(z) * gamma_here(z) * gamma_here(z); });
    }

    const double xT = order0.x0.terminal();
    fc.xi0 = problem.xi(xT);
    fc.dx_xi0 = problem.partial(Coef::terminal, MultiIndex::x(1), {.x = xT});
    fc.dxx_xi0 = problem.partial(Coef::terminal, MultiIndex::x(2), {.x = xT});

    for (const GridFunction* g :
         {&fc.b0, &fc.sigma0, &fc.Gamma0, &fc.dx_b0, &fc.de_b0, &fc.dxx_b0, &fc.dxe_b0, &fc.dee_b0,
          &fc.dx_sigma0, &fc.dx_Gamma0, &fc.f_x, &fc.f_y, &fc.f_z, &fc.f_u, &fc.f_xx, &fc.f_xy, &fc.f_xz,
          &fc.f_xu, &fc.f_yy, &fc.f_yz, &fc.f_yu, &fc.f_zz, &fc.f_zu, &fc.f_uu, &fc.int_gamma0,
          &fc.int_dx_gamma0, &fc.int_gamma0_sq, &fc.int_rho_gamma0_sq})
        g->check_finite("frozen coefficient");
    return fc;
}

Order1Coefficients solve_order1(const FrozenCoefficients& fc) {
    const TimeGrid& grid = fc.grid;

    // -y1' = (d_x b^[0] + d_y f^[0]) y1 + d_x f^[0]
    GridFunction y1 = integrate_terminal(
        [&fc](double s, double v) {
            return (fc.dx_b0.interpolate(s) + fc.f_y.interpolate(s)) * v + fc.f_x.interpolate(s);
        },
        fc.dx_xi0, grid);

    // -y0' = d_y f^[0] y0 + (d_e b^[0] + d_z f^[0] sigma^[0] + d_u f^[0] Gamma^[0]) y1
    GridFunction y0 = integrate_terminal(
        [&fc, &y1](double s, double v) {
            const double force = fc.de_b0.interpolate(s) + fc.f_z.interpolate(s) * fc.sigma0.interpolate(s) +
                                 fc.f_u.interpolate(s) * fc.Gamma0.interpolate(s);
            return fc.f_y.interpolate(s) * v + force * y1.interpolate(s);
        },
        0.0, grid);

    y1.check_finite("y1^[1]");
    y0.check_finite("y0^[1]");
    return {std::move(y1), std::move(y0)};
}

Order2Coefficients solve_order2(const FrozenCoefficients& fc, const Order1Coefficients& o1) {
    const TimeGrid& grid = fc.grid;

    // -y2' = (d_x b^[0] + d_y f^[0]) y2 + d_x f^[0]
    GridFunction y2 = integrate_terminal(
        [&fc](double s, double v) {
            return (fc.dx_b0.interpolate(s) + fc.f_y.interpolate(s)) * v + fc.f_x.interpolate(s);
        },
        fc.dx_xi0, grid);

    // -y11' = (2 d_x b^[0] + d_y f^[0]) y11 + 1/2 d_xx f^[0]
    //         + 1/2 d_xx b^[0] y2 + d_xy f^[0] y1^[1] + 1/2 d_yy f^[0] (y1^[1])^2
    GridFunction y11 = integrate_terminal(
        [&fc, &y2, &o1](double s, double v) {
            const double a1 = o1.y1.interpolate(s);
            return (2.0 * fc.dx_b0.interpolate(s) + fc.f_y.interpolate(s)) * v + 0.5 * fc.f_xx.interpolate(s) +
                   0.5 * fc.dxx_b0.interpolate(s) * y2.interpolate(s) + fc.f_xy.interpolate(s) * a1 +
                   0.5 * fc.f_yy.interpolate(s) * a1 * a1;
        },
        0.5 * fc.dxx_xi0, grid);

    // -y1' = (d_x b^[0] + d_y f^[0]) y1
    //        + d_xe b^[0] y2 + 2 d_e b^[0] y11
    //        + d_z f^[0] (y2 d_x sigma^[0] + 2 y11 sigma^[0])
    //        + d_u f^[0] (y2 d_x Gamma^[0] + 2 y11 Gamma^[0])
    //        + d_yy f^[0] y1^[1] y0^[1] + d_xy f^[0] y0^[1]
    //        + y1^[1] (d_xz f^[0] sigma^[0] + d_xu f^[0] Gamma^[0])
    //        + (y1^[1])^2 (d_yz f^[0] sigma^[0] + d_yu f^[0] Gamma^[0])
    GridFunction y1 = integrate_terminal(
        [&fc, &y2, &y11, &o1](double s, double v) {
            const double a1 = o1.y1.interpolate(s);
            const double a0 = o1.y0.interpolate(s);
            const double s0 = fc.sigma0.interpolate(s);
            const double g0 = fc.Gamma0.interpolate(s);
            const double v2 = y2.interpolate(s);
            const double v11 = y11.interpolate(s);
            return (fc.dx_b0.interpolate(s) + fc.f_y.interpolate(s)) * v + fc.dxe_b0.interpolate(s) * v2 +
                   2.0 * fc.de_b0.interpolate(s) * v11 +
                   fc.f_z.interpolate(s) * (v2 * fc.dx_sigma0.interpolate(s) + 2.0 * v11 * s0) +
                   fc.f_u.interpolate(s) * (v2 * fc.dx_Gamma0.interpolate(s) + 2.0 * v11 * g0) +
                   fc.f_yy.interpolate(s) * a1 * a0 + fc.f_xy.interpolate(s) * a0 +
                   a1 * (fc.f_xz.interpolate(s) * s0 + fc.f_xu.interpolate(s) * g0) +
                   a1 * a1 * (fc.f_yz.interpolate(s) * s0 + fc.f_yu.interpolate(s) * g0);
        },
        0.0, grid);

    // -y0' = d_y f^[0] y0 + y11 ((sigma^[0])^2 + int (gamma^[0])^2 nu)
    //        + 1/2 d_ee b^[0] y2 + d_e b^[0] y1
    //        + y1 (d_z f^[0] sigma^[0] + d_u f^[0] Gamma^[0])
    //        + y11 d_u f^[0] int rho (gamma^[0])^2 nu
    //        + 1/2 d_yy f^[0] (y0^[1])^2
    //        + (y1^[1])^2 (1/2 d_zz f^[0] (sigma^[0])^2 + 1/2 d_uu f^[0] (Gamma^[0])^2
    //                      + d_zu f^[0] sigma^[0] Gamma^[0])
    //        + y1^[1] y0^[1] (d_yz f^[0] sigma^[0] + d_yu f^[0] Gamma^[0])
    GridFunction y0 = integrate_terminal(
        [&fc, &y2, &y11, &y1, &o1](double s, double v) {
            const double a1 = o1.y1.interpolate(s);
            const double a0 = o1.y0.interpolate(s);
            const double s0 = fc.sigma0.interpolate(s);
            const double g0 = fc.Gamma0.interpolate(s);
            const double v2 = y2.interpolate(s);
            const double v11 = y11.interpolate(s);
            const double v1 = y1.interpolate(s);
            return fc.f_y.interpolate(s) * v + v11 * (s0 * s0 + fc.int_gamma0_sq.interpolate(s)) +
                   0.5 * fc.dee_b0.interpolate(s) * v2 + fc.de_b0.interpolate(s) * v1 +
                   v1 * (fc.f_z.interpolate(s) * s0 + fc.f_u.interpolate(s) * g0) +
                   v11 * fc.f_u.interpolate(s) * fc.int_rho_gamma0_sq.interpolate(s) +
                   0.5 * fc.f_yy.interpolate(s) * a0 * a0 +
                   a1 * a1 * (0.5 * fc.f_zz.interpolate(s) * s0 * s0 + 0.5 * fc.f_uu.interpolate(s) * g0 * g0 +
                              fc.f_zu.interpolate(s) * s0 * g0) +
                   a1 * a0 * (fc.f_yz.interpolate(s) * s0 + fc.f_yu.interpolate(s) * g0);
        },
        0.0, grid);

    y2.check_finite("y2^[2]");
    y11.check_finite("y11^[2]");
    y1.check_finite("y1^[2]");
    y0.check_finite("y0^[2]");
    return {std::move(y2), std::move(y11), std::move(y1), std::move(y0)};
}

OrderEval evaluate_order(int n, const Order0Solution& order0, const Order1Coefficients* o1,
                         const Order2Coefficients* o2, const FrozenCoefficients& frozen, double x1, double x2,
                         int s_index) {
    OrderEval out;
    switch (n) {
        case 0:
            out.y = order0.y0(s_index);
            out.z = 0.0;
            out.psi = [](double) { return 0.0; };
            return out;
        case 1: {
            if (!o1) throw std::invalid_argument("evaluate_order: order-1 coefficients missing");
            const double a1 = o1->y1(s_index);
            out.y = a1 * x1 + o1->y0(s_index);
            out.z = a1 * frozen.sigma0(s_index);
            out.psi = [a1, &frozen, s_index](double z) { return a1 * frozen.gamma0(s_index, z); };
            return out;
        }
        case 2: {
            if (!o2) throw std::invalid_argument("evaluate_order: order-2 coefficients missing");
            const double v2 = o2->y2(s_index);
            const double v11 = o2->y11(s_index);
            const double v1 = o2->y1(s_index);
            out.y = v2 * x2 + v11 * x1 * x1 + v1 * x1 + o2->y0(s_index);
            out.z = x1 * (v2 * frozen.dx_sigma0(s_index) + 2.0 * v11 * frozen.sigma0(s_index)) +
                    v1 * frozen.sigma0(s_index);
            out.psi = [v2, v11, v1, x1, &frozen, s_index](double z) {
                const double g = frozen.gamma0(s_index, z);
                return x1 * (v2 * frozen.dx_gamma0(s_index, z) + 2.0 * v11 * g) + v11 * g * g + v1 * g;
            };
            return out;
        }
        default:
            throw std::invalid_argument("evaluate_order: generic engine supports orders 0..2 only");
    }
}

} // namespace fbsde
