#include <doctest.h>

#include <cmath>

#include "fbsde/expansion.hpp"
#include "fbsde/rng.hpp"

using namespace fbsde;

namespace {

FBSDEProblem trivial_problem(double x0) {
    FBSDEProblem p;
    p.horizon = 1.0;
    p.initial_state = x0;
    p.set_drift([](double, double, double) { return 0.0; });
    p.set_diffusion([](double, double) { return 0.0; });
    p.set_jump_coeff([](double, double, double) { return 0.0; });
    p.set_terminal([](double x) { return x; });
    p.set_driver([](double, double, double, double, double) { return 0.0; });
    return p;
}

DiscreteLevyMeasure test_atoms() { return DiscreteLevyMeasure({{0.5, 2.0}, {-0.3, 1.0}}); }

} // namespace

TEST_SUITE("expansion") {

TEST_CASE("order0: zero coefficients keep the initial state") {
    TimeGrid grid(0.0, 1.0, 64);
    const Order0Solution sol = solve_order0(trivial_problem(0.8), grid);
    for (int i = 0; i < grid.n_nodes(); ++i) {
        CHECK(sol.x0(i) == 0.8);
        CHECK(sol.y0(i) == 0.8);
    }
}

TEST_CASE("order0: linear driver discounts the terminal value") {
    const double c = 0.4, x0 = 1.3;
    FBSDEProblem p = trivial_problem(x0);
    p.set_driver([c](double, double, double y, double, double) { return -c * y; });
    TimeGrid grid(0.0, 1.0, 512);
    const Order0Solution sol = solve_order0(p, grid);
    for (int i = 0; i < grid.n_nodes(); i += 64)
        CHECK(std::abs(sol.y0(i) - x0 * std::exp(-c * (1.0 - grid.node(i)))) < 1e-8);
}

TEST_CASE("order0: exponential drift flow, Y constant in s") {
    const double a = 0.35, x0 = 0.9;
    FBSDEProblem p = trivial_problem(x0);
    p.set_drift([a](double, double x, double) { return a * x; });
    TimeGrid grid(0.0, 1.0, 512);
    const Order0Solution sol = solve_order0(p, grid);
    CHECK(std::abs(sol.x0.terminal() - x0 * std::exp(a)) < 1e-9);
    for (int i = 0; i < grid.n_nodes(); i += 64)
        CHECK(std::abs(sol.y0(i) - x0 * std::exp(a)) < 1e-9);
}

TEST_CASE("freeze: constant coefficients give constant tables") {
    FBSDEProblem p = trivial_problem(0.8);
    p.set_diffusion([](double, double) { return 0.4; });
    p.set_driver([](double, double, double y, double, double) { return -0.3 * y; });
    TimeGrid grid(0.0, 1.0, 32);
    const FrozenCoefficients fc = freeze(p, solve_order0(p, grid), test_atoms());
    for (int i = 0; i < grid.n_nodes(); ++i) {
        CHECK(fc.sigma0(i) == 0.4);
        CHECK(std::abs(fc.f_y(i) + 0.3) < 1e-9);
        CHECK(std::abs(fc.f_x(i)) < 1e-9);
        CHECK(std::abs(fc.f_zz(i)) < 1e-7);
        CHECK(fc.b0(i) == 0.0);
    }
}

TEST_CASE("freeze: Gamma0 is the rho-weighted jump moment along X0") {
    FBSDEProblem p = trivial_problem(2.0);
    p.set_jump_coeff([](double, double x, double z) { return x * z; });
    p.jump_weight = [](double) { return 1.0; };
    TimeGrid grid(0.0, 1.0, 16);
    const FrozenCoefficients fc = freeze(p, solve_order0(p, grid), test_atoms());
    for (int i = 0; i < grid.n_nodes(); ++i) CHECK(std::abs(fc.Gamma0(i) - 1.4) < 1e-12);
    // d/dx (x z) = z, so the derivative moment is the bare first moment
    for (int i = 0; i < grid.n_nodes(); ++i) CHECK(std::abs(fc.dx_Gamma0(i) - 0.7) < 1e-9);
    CHECK(std::abs(fc.int_gamma0_sq(0) - 4.0 * 0.59) < 1e-9);
}

TEST_CASE("order1: zero frozen data keeps the terminal slope") {
    FBSDEProblem p = trivial_problem(0.0);
    p.set_terminal([](double x) { return 2.5 * x; });
    TimeGrid grid(0.0, 1.0, 64);
    const FrozenCoefficients fc = freeze(p, solve_order0(p, grid), test_atoms());
    const Order1Coefficients o1 = solve_order1(fc);
    for (int i = 0; i < grid.n_nodes(); ++i) {
        CHECK(std::abs(o1.y1(i) - 2.5) < 1e-12);
        CHECK(o1.y0(i) == 0.0);
    }
}

TEST_CASE("order1: constant d_x f integrates linearly") {
    const double a = 0.7, c = 1.2;
    FBSDEProblem p = trivial_problem(0.0);
    p.set_terminal([c](double x) { return c * x; });
    p.set_driver([a](double, double x, double, double, double) { return a * x; });
    TimeGrid grid(0.0, 1.0, 256);
    const FrozenCoefficients fc = freeze(p, solve_order0(p, grid), test_atoms());
    const Order1Coefficients o1 = solve_order1(fc);
    for (int i = 0; i < grid.n_nodes(); i += 32)
        CHECK(std::abs(o1.y1(i) - (c + a * (1.0 - grid.node(i)))) < 1e-9);
}

TEST_CASE("order1: discounting driver gives the exponential slope") {
    const double r = 0.55;
    FBSDEProblem p = trivial_problem(0.0);
    p.set_driver([r](double, double, double y, double, double) { return -r * y; });
    TimeGrid grid(0.0, 1.0, 512);
    const FrozenCoefficients fc = freeze(p, solve_order0(p, grid), test_atoms());
    const Order1Coefficients o1 = solve_order1(fc);
    for (int i = 0; i < grid.n_nodes(); i += 64)
        CHECK(std::abs(o1.y1(i) - std::exp(-r * (1.0 - grid.node(i)))) < 1e-8);
}

TEST_CASE("order2: pure terminal curvature") {
    const double c = 0.8, d = -1.1;
    FBSDEProblem p = trivial_problem(0.0);
    p.set_terminal([c, d](double x) { return c * x + 0.5 * d * x * x; });
    TimeGrid grid(0.0, 1.0, 64);
    const FrozenCoefficients fc = freeze(p, solve_order0(p, grid), test_atoms());
    const Order1Coefficients o1 = solve_order1(fc);
    const Order2Coefficients o2 = solve_order2(fc, o1);
    for (int i = 0; i < grid.n_nodes(); i += 8) {
        CHECK(std::abs(o2.y2(i) - c) < 1e-10);
        CHECK(std::abs(o2.y11(i) - 0.5 * d) < 1e-7);
        CHECK(o2.y1(i) == 0.0);
        CHECK(o2.y0(i) == 0.0);
    }
}

TEST_CASE("order2: linear model collapses to the first order") {
    FBSDEProblem p = trivial_problem(1.0);
    p.set_drift([](double, double x, double) { return 0.2 * x; });
    p.set_diffusion([](double, double) { return 0.5; });
    p.set_jump_coeff([](double, double, double z) { return z; });
    p.set_driver([](double, double, double y, double, double) { return -0.1 * y; });
    p.coefficients.set_partial_evaluator(Coef::driver, [](const MultiIndex& mi, const Point& q) {
        if (mi.zero()) return -0.1 * q.y;
        return mi == MultiIndex::driver(0, 1, 0, 0) ? -0.1 : 0.0;
    });
    p.coefficients.set_partial_evaluator(Coef::drift, [](const MultiIndex& mi, const Point& q) {
        if (mi.zero()) return 0.2 * q.x;
        return mi == MultiIndex::x(1) ? 0.2 : 0.0;
    });
    p.coefficients.set_partial(Coef::terminal, MultiIndex::x(1), [](const Point&) { return 1.0; });
    p.coefficients.set_partial(Coef::terminal, MultiIndex::x(2), [](const Point&) { return 0.0; });
    p.jump_weight = [](double) { return 1.0; };
    TimeGrid grid(0.0, 1.0, 128);
    const FrozenCoefficients fc = freeze(p, solve_order0(p, grid), test_atoms());
    const Order1Coefficients o1 = solve_order1(fc);
    const Order2Coefficients o2 = solve_order2(fc, o1);
    for (int i = 0; i < grid.n_nodes(); i += 16) {
        CHECK(std::abs(o2.y11(i)) < 1e-12);
        CHECK(std::abs(o2.y1(i)) < 1e-12);
        CHECK(std::abs(o2.y0(i)) < 1e-12);
    }
}

TEST_CASE("terminal conditions are assigned exactly") {
    FBSDEProblem p = trivial_problem(0.4);
    p.set_terminal([](double x) { return std::sqrt(1.0 + x * x); });
    p.coefficients.set_partial(Coef::terminal, MultiIndex::x(1),
                               [](const Point& q) { return q.x / std::sqrt(1.0 + q.x * q.x); });
    p.coefficients.set_partial(Coef::terminal, MultiIndex::x(2),
                               [](const Point& q) { return 1.0 / std::pow(1.0 + q.x * q.x, 1.5); });
    p.set_driver([](double, double x, double y, double, double) { return std::sin(x) - 0.3 * y; });
    TimeGrid grid(0.0, 1.0, 32);
    const FrozenCoefficients fc = freeze(p, solve_order0(p, grid), test_atoms());
    const Order1Coefficients o1 = solve_order1(fc);
    const Order2Coefficients o2 = solve_order2(fc, o1);
    const int T = grid.n_steps();
    CHECK(o1.y1(T) == fc.dx_xi0);
    CHECK(o1.y0(T) == 0.0);
    CHECK(o2.y2(T) == fc.dx_xi0);
    CHECK(o2.y11(T) == 0.5 * fc.dxx_xi0);
    CHECK(o2.y1(T) == 0.0);
    CHECK(o2.y0(T) == 0.0);
}

TEST_CASE("evaluate_order arithmetic") {
    FBSDEProblem p = trivial_problem(0.6);
    p.set_diffusion([](double, double) { return 0.4; });
    p.set_jump_coeff([](double, double, double z) { return z; });
    p.jump_weight = [](double) { return 1.0; };
    TimeGrid grid(0.0, 1.0, 16);
    const Order0Solution sol = solve_order0(p, grid);
    const FrozenCoefficients fc = freeze(p, sol, test_atoms());

    Order1Coefficients o1{GridFunction::constant(grid, 2.0), GridFunction::constant(grid, 0.3)};
    const OrderEval e1 = evaluate_order(1, sol, &o1, nullptr, fc, 1.5, 0.0, 4);
    CHECK(std::abs(e1.y - 3.3) < 1e-14);
    CHECK(std::abs(e1.z - 0.8) < 1e-14);
    CHECK(std::abs(e1.psi(0.5) - 2.0 * 0.5) < 1e-14);

    const OrderEval e0 = evaluate_order(0, sol, nullptr, nullptr, fc, 9.0, 9.0, 4);
    CHECK(e0.y == sol.y0(4));
    CHECK(e0.z == 0.0);
    CHECK(e0.psi(0.5) == 0.0);

    Order2Coefficients o2{GridFunction::constant(grid, 1.1), GridFunction::constant(grid, -0.7),
                          GridFunction::constant(grid, 0.9), GridFunction::constant(grid, 0.05)};
    const OrderEval e2 = evaluate_order(2, sol, &o1, &o2, fc, 0.0, 0.0, 4);
    CHECK(std::abs(e2.y - 0.05) < 1e-14);
    CHECK(std::abs(e2.z - 0.9 * 0.4) < 1e-14);
}

TEST_CASE("representation identities at order one") {
    // Z^[1]/sigma^[0] equals the x1-slope of Y^[1], and psi^[1] is the
    // increment of u1(x) = y1 x + y0 over the jump, at random nodes
    FBSDEProblem p = trivial_problem(0.9);
    p.set_drift([](double, double x, double e) { return 0.2 * (1.0 - x) + 0.1 * e; });
    p.set_diffusion([](double, double x) { return 0.3 + 0.05 * std::cos(x); });
    p.set_jump_coeff([](double, double x, double z) { return z * (1.0 + 0.2 * std::sin(x)); });
    p.set_terminal([](double x) { return std::sqrt(1.0 + x * x); });
    p.set_driver([](double, double x, double y, double z, double) { return -0.3 * y + 0.1 * std::sin(x + z); });
    p.jump_weight = [](double) { return 1.0; };
    TimeGrid grid(0.0, 1.0, 128);
    const Order0Solution sol = solve_order0(p, grid);
    const FrozenCoefficients fc = freeze(p, sol, test_atoms());
    const Order1Coefficients o1 = solve_order1(fc);

    Rng rng(5150);
    for (int k = 0; k < 100; ++k) {
        const int i = static_cast<int>(rng.next_double() * grid.n_steps());
        const double x1 = -2.0 + 4.0 * rng.next_double();
        const double z = rng.next_double() < 0.5 ? 0.5 : -0.3;
        const OrderEval at_x1 = evaluate_order(1, sol, &o1, nullptr, fc, x1, 0.0, i);
        const OrderEval at_x1p = evaluate_order(1, sol, &o1, nullptr, fc, x1 + 1.0, 0.0, i);
        const double slope = at_x1p.y - at_x1.y;
        CHECK(std::abs(at_x1.z / fc.sigma0(i) - slope) < 1e-12);
        const double u_jump = o1.y1(i) * (x1 + fc.gamma0(i, z)) + o1.y0(i);
        const double u_here = o1.y1(i) * x1 + o1.y0(i);
        CHECK(std::abs(at_x1.psi(z) - (u_jump - u_here)) < 1e-12);
    }
}

} // TEST_SUITE
