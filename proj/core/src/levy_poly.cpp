#include "fbsde/levy_poly.hpp"

#include <cmath>

#include "fbsde/ode.hpp"

namespace fbsde {

namespace {

double factorial(int n) {
    double r = 1.0;
    for (int i = 2; i <= n; ++i) r *= i;
    return r;
}

double binom(int n, int k) {
    if (k < 0 || k > n) return 0.0;
    double r = 1.0;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

void compose_rec(int remaining, int parts, std::vector<int>& cur, std::vector<std::vector<int>>& out) {
    if (parts == 1) {
        cur.push_back(remaining);
        out.push_back(cur);
        cur.pop_back();
        return;
    }
    for (int first = 1; first <= remaining - (parts - 1); ++first) {
        cur.push_back(first);
        compose_rec(remaining - first, parts - 1, cur, out);
        cur.pop_back();
    }
}

// One term of the nested multi-index driver sum: multinomial weight,
// derivative index, and the composition split into y/z/u factor groups.
struct SumTerm {
    double weight; // 1 / (ix! iy! iz! iu!)
    MultiIndex mi;
    std::vector<int> beta_y, beta_z, beta_u;
};

std::vector<SumTerm> enumerate_terms(int n) {
    std::vector<SumTerm> terms;
    for (int k = 2; k <= n; ++k) {
        for (int ix = 0; ix <= k - 1; ++ix) {
            const auto combos = compositions(n - ix, k - ix);
            for (int iy = 0; iy <= k - ix; ++iy) {
                for (int iz = 0; iz <= k - ix - iy; ++iz) {
                    const int iu = k - ix - iy - iz;
                    SumTerm t;
                    t.weight = 1.0 / (factorial(ix) * factorial(iy) * factorial(iz) * factorial(iu));
                    t.mi = MultiIndex::driver(ix, iy, iz, iu);
                    for (const auto& beta : combos) {
                        t.beta_y.assign(beta.begin(), beta.begin() + iy);
                        t.beta_z.assign(beta.begin() + iy, beta.begin() + iy + iz);
                        t.beta_u.assign(beta.begin() + iy + iz, beta.end());
                        terms.push_back(t);
                    }
                }
            }
        }
    }
    return terms;
}

// Half-grid tabulation: index 2i is node i, index 2i+1 the midpoint after it.
struct HalfGrid {
    const TimeGrid& grid;
    int size() const { return 2 * grid.n_steps() + 1; }
    double time(int h) const { return grid.t0() + 0.5 * grid.dt() * h; }
};

// Jump-moment tables per (node, order). Multiplicative models use
// q(s, j) = int gamma^j nu and Gamma(s, j) = int rho [(1+gamma)^j - 1] nu;
// additive models use int gamma^m nu and int rho gamma^m nu instead.
struct MomentTables {
    std::vector<std::vector<double>> q;     // [j-2][half index], j = 2..N
    std::vector<std::vector<double>> gamma; // [j-1][half index], j = 1..N

    double q_at(int j, int h) const { return j >= 2 ? q[j - 2][h] : 0.0; }
    double gamma_at(int j, int h) const { return gamma[j - 1][h]; }
};

MomentTables tabulate_moments(const ExpLevyModel& model, int order, const HalfGrid& hg) {
    MomentTables mt;
    mt.q.assign(order >= 2 ? order - 1 : 0, std::vector<double>(hg.size(), 0.0));
    mt.gamma.assign(order, std::vector<double>(hg.size(), 0.0));
    if (model.measure.components() == 0) return mt;
    auto rho = [&model](double z) { return model.rho_at(z); };
    for (int h = 0; h < hg.size(); ++h) {
        const double s = hg.time(h);
        auto g = [&model, s](double z) { return model.jump_gamma(s, z); };
        for (int j = 2; j <= order; ++j) mt.q[j - 2][h] = moment_q(model.measure, g, j);
        if (model.additive) {
            for (int j = 1; j <= order; ++j)
                mt.gamma[j - 1][h] =
                    integrate(model.measure, [&](double z) { return rho(z) * std::pow(g(z), j); });
        } else {
            for (int j = 1; j <= order; ++j) mt.gamma[j - 1][h] = moment_Gamma(model.measure, rho, g, j);
        }
    }
    return mt;
}

// -y'(s) = coeff(s) y(s) + force(s) with both tabulated on the half grid.
GridFunction solve_linear_terminal(const std::vector<double>& coeff, const std::vector<double>& force,
                                   double terminal_value, const TimeGrid& grid) {
    GridFunction out(grid);
    const double h = grid.dt();
    double v = terminal_value;
    out(grid.n_steps()) = v;
    for (int i = grid.n_steps(); i > 0; --i) {
        const int top = 2 * i, mid = 2 * i - 1, bot = 2 * i - 2;
        const double k1 = coeff[top] * v + force[top];
        const double k2 = coeff[mid] * (v + 0.5 * h * k1) + force[mid];
        const double k3 = coeff[mid] * (v + 0.5 * h * k2) + force[mid];
        const double k4 = coeff[bot] * (v + h * k3) + force[bot];
        v += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        if (!std::isfinite(v))
            throw numeric_error("solve_levy_coeffs: non-finite coefficient at node " + std::to_string(i - 1));
        out(i - 1) = v;
    }
    return out;
}

std::vector<double> poly_mul(const std::vector<double>& a, const std::vector<double>& b) {
    std::vector<double> r(a.size() + b.size() - 1, 0.0);
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < b.size(); ++j) r[i + j] += a[i] * b[j];
    return r;
}

} // namespace

std::vector<std::vector<int>> compositions(int total, int parts) {
    if (total < 1 || parts < 1) throw std::invalid_argument("compositions: total and parts must be >= 1");
    std::vector<std::vector<int>> out;
    if (parts > total) return out;
    std::vector<int> cur;
    compose_rec(total, parts, cur, out);
    return out;
}

std::size_t driver_term_count(int n) { return enumerate_terms(n).size(); }

GridFunction solve_levy_order0(const ExpLevyModel& model, const TimeGrid& grid) {
    GridFunction y0 = integrate_terminal([&model](double s, double v) { return model.f0(s, v); },
                                         model.terminal_derivative(0), grid);
    y0.check_finite("Y^[0]");
    return y0;
}

LevyCoefficients solve_levy_coeffs(const ExpLevyModel& model, const GridFunction& y0, int order,
                                   const TimeGrid& grid) {
    if (order < 1) throw std::invalid_argument("solve_levy_coeffs: order must be >= 1");

    LevyCoefficients out{y0, {}, model.additive};
    const HalfGrid hg{grid};
    const MomentTables moments = tabulate_moments(model, order, hg);

    std::vector<double> y0_half(hg.size());
    for (int h = 0; h < hg.size(); ++h) y0_half[h] = y0.interpolate(hg.time(h));

    auto fp = [&](const MultiIndex& mi, int h) { return model.f0_partial(mi, hg.time(h), y0_half[h]); };

    if (!model.additive) {
        // One scalar function per order, exactly the exponential-Levy system:
        // -dy^[n]/ds = ( n b + n(n-1)/2 sigma^2 + sum_j C(n,j) q(s,j)
        //                + f_y + f_z n sigma + f_u Gamma(s,n) ) y^[n]
        //              + d_x^n f^[0]/n! + multi-index sum.
        for (int n = 1; n <= order; ++n) {
            const auto terms = enumerate_terms(n);
            std::vector<double> coeff(hg.size()), force(hg.size());
            for (int h = 0; h < hg.size(); ++h) {
                const double s = hg.time(h);
                const double b = model.drift(s);
                const double sig = model.vol(s);
                double bracket = n * b + 0.5 * n * (n - 1) * sig * sig;
                for (int j = 2; j <= n; ++j) bracket += binom(n, j) * moments.q_at(j, h);
                bracket += fp(MultiIndex::driver(0, 1, 0, 0), h) +
                           fp(MultiIndex::driver(0, 0, 1, 0), h) * n * sig +
                           fp(MultiIndex::driver(0, 0, 0, 1), h) * moments.gamma_at(n, h);
                coeff[h] = bracket;

                double g = fp(MultiIndex::driver(n, 0, 0, 0), h) / factorial(n);
                for (const SumTerm& t : terms) {
                    double prod = t.weight * fp(t.mi, h);
                    for (int beta : t.beta_y) prod *= out.order(beta).interpolate(hg.time(h));
                    for (int beta : t.beta_z) prod *= beta * sig * out.order(beta).interpolate(hg.time(h));
                    for (int beta : t.beta_u)
                        prod *= moments.gamma_at(beta, h) * out.order(beta).interpolate(hg.time(h));
                    g += prod;
                }
                force[h] = g;
            }
            out.orders.push_back(
                solve_linear_terminal(coeff, force, model.terminal_derivative(n) / factorial(n), grid));
        }
        return out;
    }

    // Additive form: Y^[n] = sum_{j=0}^n y^[n]_j X^j. Matching powers of X in
    // the backward equation against the Ito drift of X^j gives a triangular
    // scalar system per order, solved from j = n down to 0:
    //   -y_j' = f_y y_j + (j+1)(b + f_z sigma) y_{j+1} + (j+2)(j+1)/2 sigma^2 y_{j+2}
    //           + sum_{m>=2} C(j+m, m) [int gamma^m nu] y_{j+m}
    //           + f_u sum_{m>=1} C(j+m, m) [int rho gamma^m nu] y_{j+m}
    //           + [j = n] d_x^n f^[0]/n! + x^j-coefficient of the multi-index sum.
    auto y_low = [&](int beta, int j, int h) {
        return j <= beta ? out.order(beta).interpolate(hg.time(h), j) : 0.0;
    };
    auto poly_of_y = [&](int beta, int h) {
        std::vector<double> p(beta + 1);
        for (int j = 0; j <= beta; ++j) p[j] = y_low(beta, j, h);
        return p;
    };
    auto poly_of_z = [&](int beta, int h, double sig) {
        std::vector<double> p(std::max(beta, 1), 0.0);
        for (int a = 0; a + 1 <= beta; ++a) p[a] = (a + 1) * y_low(beta, a + 1, h) * sig;
        return p;
    };
    auto poly_of_u = [&](int beta, int h) {
        std::vector<double> p(std::max(beta, 1), 0.0);
        for (int a = 0; a < beta; ++a)
            for (int m = 1; m <= beta - a; ++m)
                p[a] += binom(a + m, m) * moments.gamma_at(m, h) * y_low(beta, a + m, h);
        return p;
    };

    for (int n = 1; n <= order; ++n) {
        const auto terms = enumerate_terms(n);
        GridFunction coeffs_n(grid, n + 1);

        // Multi-index sum assembled once per half-grid time as a polynomial in x.
        std::vector<std::vector<double>> sum_poly(hg.size());
        for (int h = 0; h < hg.size(); ++h) {
            std::vector<double> acc(n + 1, 0.0);
            const double sig = model.vol(hg.time(h));
            for (const SumTerm& t : terms) {
                std::vector<double> p(t.mi.k[0] + 1, 0.0);
                p[t.mi.k[0]] = t.weight * fp(t.mi, h);
                for (int beta : t.beta_y) p = poly_mul(p, poly_of_y(beta, h));
                for (int beta : t.beta_z) p = poly_mul(p, poly_of_z(beta, h, sig));
                for (int beta : t.beta_u) p = poly_mul(p, poly_of_u(beta, h));
                for (std::size_t a = 0; a < p.size() && a <= static_cast<std::size_t>(n); ++a) acc[a] += p[a];
            }
            sum_poly[h] = std::move(acc);
        }

        for (int j = n; j >= 0; --j) {
            std::vector<double> coeff(hg.size()), force(hg.size());
            for (int h = 0; h < hg.size(); ++h) {
                const double s = hg.time(h);
                const double sig = model.vol(s);
                coeff[h] = fp(MultiIndex::driver(0, 1, 0, 0), h);

                double g = sum_poly[h][j];
                auto solved = [&](int jj) { return jj <= n ? coeffs_n.interpolate(s, jj) : 0.0; };
                // components above j of the same order are already solved
                if (j + 1 <= n)
                    g += (j + 1) * (model.drift(s) + fp(MultiIndex::driver(0, 0, 1, 0), h) * sig) * solved(j + 1);
                if (j + 2 <= n) g += 0.5 * (j + 2) * (j + 1) * sig * sig * solved(j + 2);
                for (int m = 2; m <= n - j; ++m) g += binom(j + m, m) * moments.q_at(m, h) * solved(j + m);
                const double fu = fp(MultiIndex::driver(0, 0, 0, 1), h);
                for (int m = 1; m <= n - j; ++m) g += fu * binom(j + m, m) * moments.gamma_at(m, h) * solved(j + m);
                if (j == n) g += fp(MultiIndex::driver(n, 0, 0, 0), h) / factorial(n);
                force[h] = g;
            }
            const double terminal = (j == n) ? model.terminal_derivative(n) / factorial(n) : 0.0;
            GridFunction yj = solve_linear_terminal(coeff, force, terminal, grid);
            for (int i = 0; i < grid.n_nodes(); ++i) coeffs_n.at(i, j) = yj(i);
        }
        out.orders.push_back(std::move(coeffs_n));
    }
    return out;
}

LevyEval evaluate_levy(const LevyCoefficients& coeffs, const ExpLevyModel& model, double x_value, int s_index,
                       double eps, int order) {
    if (order < 0 || order > coeffs.max_order())
        throw std::invalid_argument("evaluate_levy: order exceeds solved coefficients");

    const double s = coeffs.y0_order.grid().node(s_index);
    LevyEval out;
    out.y = coeffs.y0_order(s_index);
    out.z = 0.0;

    if (!coeffs.additive) {
        std::vector<double> yn(order + 1, 0.0);
        double scale = 1.0;
        for (int n = 1; n <= order; ++n) {
            scale *= eps * x_value;
            yn[n] = scale * coeffs.order(n)(s_index);
            out.y += yn[n];
            out.z += yn[n] * n * model.vol(s);
        }
        out.psi = [yn, order, s, &model](double z) {
            const double g = model.jump_gamma(s, z);
            double acc = 0.0;
            for (int n = 1; n <= order; ++n) acc += yn[n] * (std::pow(1.0 + g, n) - 1.0);
            return acc;
        };
        return out;
    }

    std::vector<std::vector<double>> poly(order + 1);
    double epsn = 1.0;
    for (int n = 1; n <= order; ++n) {
        epsn *= eps;
        const GridFunction& c = coeffs.order(n);
        poly[n].resize(n + 1);
        for (int j = 0; j <= n; ++j) poly[n][j] = epsn * c.at(s_index, j);
        double xv = 1.0;
        double dy = poly[n][0];
        double dz = 0.0;
        for (int j = 1; j <= n; ++j) {
            dz += j * poly[n][j] * xv; // x^{j-1}
            xv *= x_value;
            dy += poly[n][j] * xv;
        }
        out.y += dy;
        out.z += dz * model.vol(s);
    }
    out.psi = [poly, order, s, x_value, &model](double z) {
        const double g = model.jump_gamma(s, z);
        double acc = 0.0;
        for (int n = 1; n <= order; ++n) {
            double xv = 1.0, xgv = 1.0;
            for (int j = 1; j <= n; ++j) {
                xv *= x_value;
                xgv *= x_value + g;
                acc += poly[n][j] * (xgv - xv);
            }
        }
        return acc;
    };
    return out;
}

FBSDEProblem wrap_for_reference(const ExpLevyModel& model, double eps) {
    FBSDEProblem p;
    p.horizon = model.horizon;
    p.initial_state = model.initial_state;
    p.jump_weight = model.rho;
    const bool additive = model.additive;
    p.set_drift([b = model.drift, additive](double t, double x, double) { return additive ? b(t) : b(t) * x; });
    p.set_diffusion([s = model.vol, additive](double t, double x) { return additive ? s(t) : s(t) * x; });
    p.set_jump_coeff(
        [g = model.jump_gamma, additive](double t, double x, double z) { return additive ? g(t, z) : g(t, z) * x; });
    p.set_terminal([xi = model.terminal, eps](double x) { return xi(eps * x); });
    p.set_driver([drv = model.driver, eps](double t, double x, double y, double z, double u) {
        return drv.eval(Coef::driver, MultiIndex::none(), {.t = t, .x = eps * x, .y = y, .z = z, .u = u});
    });
    return p;
}

} // namespace fbsde
