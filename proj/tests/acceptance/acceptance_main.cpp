// Acceptance suite: one pass/fail line per criterion, nonzero exit on any
// failure. Tolerances are fixed here, not configurable.

#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "fbsde/catalog.hpp"
#include "fbsde/expansion.hpp"
#include "fbsde/experiment.hpp"
#include "fbsde/monte_carlo.hpp"
#include "fbsde/reference.hpp"

using namespace fbsde;
namespace fs = std::filesystem;

namespace {

struct Criterion {
    std::string name;
    std::function<bool(std::string&)> run;
};

bool check(bool ok, std::string& detail, const std::string& note) {
    if (!ok) detail += (detail.empty() ? "" : "; ") + note;
    return ok;
}

// ---------------------------------------------------------------------------
// 1. eps-scaling of the expansion error against the LSMC reference
// ---------------------------------------------------------------------------
bool criterion_eps_scaling(std::string& detail) {
    const auto started = std::chrono::steady_clock::now();
    const CatalogModel cat = make_model("cir_like_smooth");
    const TimeGrid grid(0.0, 1.0, 512);
    const Order0Solution o0 = solve_order0(cat.problem, grid);
    const FrozenCoefficients fr = freeze(cat.problem, o0, cat.measure);
    const Order1Coefficients o1 = solve_order1(fr);
    const Order2Coefficients o2 = solve_order2(fr, o1);

    const std::vector<double> eps_list{0.05, 0.1, 0.15, 0.2, 0.3, 0.4};
    std::vector<double> eps_kept_1, gap_kept_1, eps_kept_2, gap_kept_2;
    for (double eps : eps_list) {
        LSMCConfig rc;
        rc.n_paths = 200000;
        rc.basis_degree = 3;
        rc.grid = TimeGrid(0.0, 1.0, 256);
        rc.seed = 777;
        const LSMCResult ref = lsmc_solve(cat.problem, cat.measure, eps, rc);
        const double y_n1 = o0.y0(0) + eps * o1.y0(0);
        const double y_n2 = y_n1 + eps * eps * o2.y0(0);
        const double gap1 = std::abs(y_n1 - ref.y0);
        const double gap2 = std::abs(y_n2 - ref.y0);
        if (gap1 >= 3.0 * ref.std_error) {
            eps_kept_1.push_back(eps);
            gap_kept_1.push_back(gap1);
        }
        if (gap2 >= 3.0 * ref.std_error) {
            eps_kept_2.push_back(eps);
            gap_kept_2.push_back(gap2);
        }
    }
    bool ok = check(eps_kept_1.size() >= 2, detail, "fewer than two kept points at N=1");
    ok = check(eps_kept_2.size() >= 2, detail, "fewer than two kept points at N=2") && ok;
    if (!ok) return false;
    const double slope1 = fit_loglog_slope(eps_kept_1, gap_kept_1);
    const double slope2 = fit_loglog_slope(eps_kept_2, gap_kept_2);
    {
        std::ostringstream ss;
        ss << "slope(N=1) = " << slope1 << " over " << eps_kept_1.size() << " pts, slope(N=2) = " << slope2
           << " over " << eps_kept_2.size() << " pts";
        detail = ss.str();
    }
    ok = check(slope1 >= 1.5, detail, "N=1 slope below 1.5") && ok;
    ok = check(slope2 >= 2.4, detail, "N=2 slope below 2.4") && ok;
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    ok = check(secs < 300.0, detail, "runtime " + format_g17(secs) + "s exceeds 5 minutes") && ok;
    return ok;
}

// ---------------------------------------------------------------------------
// 2. order-1 exactness on the linear model
// ---------------------------------------------------------------------------
bool criterion_linear_exactness(std::string& detail) {
    const CatalogModel cat = make_model("linear");
    const TimeGrid grid(0.0, 1.0, 512);
    const Order0Solution o0 = solve_order0(cat.problem, grid);
    const FrozenCoefficients fr = freeze(cat.problem, o0, cat.measure);
    const Order1Coefficients o1 = solve_order1(fr);
    bool ok = true;
    for (double eps : {0.1, 0.25, 0.5, 1.0}) {
        const double approx = o0.y0(0) + eps * o1.y0(0);
        const double exact = (*cat.closed_form_y0)(eps);
        const double rel = std::abs(approx - exact) / std::abs(exact);
        ok = check(rel < 1e-6, detail, "rel err " + format_g17(rel) + " at eps " + format_g17(eps)) && ok;
    }
    if (ok) detail = "order-1 expansion matches the closed form to < 1e-6 relative";
    return ok;
}

// ---------------------------------------------------------------------------
// 3. characteristic function vs the exact transform
// ---------------------------------------------------------------------------
bool criterion_charfn(std::string& detail) {
    const auto started = std::chrono::steady_clock::now();
    const CatalogModel cat = make_model("gauss_jump");
    const ExpLevyModel& levy = *cat.levy;
    const TimeGrid grid(0.0, 1.0, 512);
    const double eps = 0.1;
    bool ok = true;
    double worst = 0.0;
    for (double theta : {0.5, 1.0, 2.0}) {
        const CharFnEstimate est = estimate_charfn(levy, theta, eps, 4, grid);
        const std::complex<double> exact = levy_khintchine_exact(
            levy.drift(0.0), levy.vol(0.0), levy.measure,
            [&levy](double z) { return levy.jump_gamma(0.0, z); }, eps, theta, levy.horizon,
            levy.initial_state);
        const double gap = std::abs(est.value - exact);
        worst = std::max(worst, gap);
        ok = check(gap < 1e-5, detail, "gap " + format_g17(gap) + " at theta " + format_g17(theta)) && ok;
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    ok = check(secs < 10.0, detail, "runtime " + format_g17(secs) + "s exceeds 10 seconds") && ok;
    if (ok) detail = "order-4 estimate within " + format_g17(worst) + " of the exact transform";
    return ok;
}

// ---------------------------------------------------------------------------
// 4. Levy polynomial consistency (martingale and discounted cases)
// ---------------------------------------------------------------------------
bool criterion_levy_consistency(std::string& detail) {
    ExpLevyModel m;
    m.additive = false;
    m.drift = [](double) { return 0.0; };
    m.vol = [](double) { return 0.3; };
    m.jump_gamma = [](double, double z) { return 0.35 * z; };
    m.measure = DiscreteLevyMeasure({{0.5, 0.6}, {-0.35, 0.8}});
    m.rho = [](double) { return 1.0; };
    m.terminal = [](double v) { return v; };
    m.terminal_derivative = [](int n) { return n == 1 ? 1.0 : 0.0; };
    m.driver = driver_zero();
    m.initial_state = 1.3;
    m.horizon = 1.0;

    const TimeGrid grid(0.0, 1.0, 512);
    bool ok = true;
    {
        const GridFunction y0 = solve_levy_order0(m, grid);
        const LevyCoefficients coeffs = solve_levy_coeffs(m, y0, 1, grid);
        ok = check(std::abs(coeffs.order(1)(0) - 1.0) < 1e-10, detail,
                   "martingale y1(0) deviates: " + format_g17(coeffs.order(1)(0) - 1.0)) &&
             ok;
        for (double eps : {0.1, 0.4}) {
            const double y = evaluate_levy(coeffs, m, m.initial_state, 0, eps, 1).y;
            ok = check(std::abs(y - eps * m.initial_state) < 1e-10, detail,
                       "martingale Y0 deviates at eps " + format_g17(eps)) &&
                 ok;
        }
    }
    double worst = 0.0;
    {
        const double c = 0.3;
        ExpLevyModel md = m;
        md.driver = driver_linear_y(-c);
        const GridFunction y0 = solve_levy_order0(md, grid);
        const LevyCoefficients coeffs = solve_levy_coeffs(md, y0, 1, grid);
        for (int i = 0; i < grid.n_nodes(); ++i)
            worst = std::max(worst,
                             std::abs(coeffs.order(1)(i) - std::exp(-c * (1.0 - grid.node(i)))));
        ok = check(worst < 1e-8, detail, "discounted y1 deviates by " + format_g17(worst)) && ok;
    }
    if (ok) detail = "martingale exact to 1e-10; discounted coefficients within " + format_g17(worst);
    return ok;
}

// ---------------------------------------------------------------------------
// 5. order-2 coefficient vs the finite-difference-in-eps LSMC oracle
// ---------------------------------------------------------------------------
bool criterion_order2_fd(std::string& detail) {
    const CatalogModel cat = make_model("cir_like_smooth");
    const TimeGrid grid(0.0, 1.0, 512);
    const Order0Solution o0 = solve_order0(cat.problem, grid);
    const FrozenCoefficients fr = freeze(cat.problem, o0, cat.measure);
    const Order1Coefficients o1 = solve_order1(fr);
    const Order2Coefficients o2 = solve_order2(fr, o1);
    const double y2_expansion = o2.y0(0);

    // central differences of lsmc_solve at eps magnitudes 0.1 and 0.2 with
    // shared seeds; the symmetric stencil sees only even orders in eps
    LSMCConfig rc;
    rc.n_paths = 200000;
    rc.basis_degree = 3;
    rc.grid = TimeGrid(0.0, 1.0, 256);
    rc.seed = 20240801;
    const double h = 0.1;
    const double eps_at[5] = {0.0, h, -h, 2.0 * h, -2.0 * h};
    std::vector<std::vector<double>> pv(5);
    for (int k = 0; k < 5; ++k)
        pv[k] = lsmc_solve(cat.problem, cat.measure, eps_at[k], rc).path_values;

    const std::size_t P = pv[0].size();
    double mean = 0.0;
    std::vector<double> combo(P);
    for (std::size_t p = 0; p < P; ++p) {
        const double d_h = (pv[1][p] - 2.0 * pv[0][p] + pv[2][p]) / (2.0 * h * h);
        const double d_2h = (pv[3][p] - 2.0 * pv[0][p] + pv[4][p]) / (8.0 * h * h);
        combo[p] = (4.0 * d_h - d_2h) / 3.0;
        mean += combo[p];
    }
    mean /= static_cast<double>(P);
    double var = 0.0;
    for (double d : combo) var += (d - mean) * (d - mean);
    const double se = std::sqrt(var / (P - 1.0) / P);

    const double tol = std::max(0.05 * std::abs(y2_expansion), 3.0 * se);
    const double gap = std::abs(y2_expansion - mean);
    {
        std::ostringstream ss;
        ss << "y2_expansion = " << y2_expansion << ", fd oracle = " << mean << " (se " << se << "), gap = " << gap
           << ", tol = " << tol;
        detail = ss.str();
    }
    return gap < tol;
}

// ---------------------------------------------------------------------------
// 6. state-dependent intensity: transform identity, Q-vs-P agreement, density bound
// ---------------------------------------------------------------------------
bool criterion_intensity(std::string& detail) {
    const CatalogModel cat = make_model("intensity_demo");
    const IntensitySpec& spec = *cat.intensity;
    const TimeGrid grid(0.0, 1.0, 512);
    bool ok = true;

    auto y0_of = [&grid](const FBSDEProblem& pr, const DiscreteLevyMeasure& ms, double eps) {
        const Order0Solution o0 = solve_order0(pr, grid);
        const FrozenCoefficients fr = freeze(pr, o0, ms);
        const Order1Coefficients o1 = solve_order1(fr);
        const Order2Coefficients o2 = solve_order2(fr, o1);
        return o0.y0(0) + eps * o1.y0(0) + eps * eps * o2.y0(0);
    };

    // lambda == c2 leaves Y0 unchanged: the transformed problem must match the
    // equivalent constant-intensity model (compensator c2 nu, driver reading
    // its u-argument in normalized units)
    {
        IntensitySpec flat;
        flat.c1 = spec.c1;
        flat.c2 = spec.c2;
        flat.lambda.push_back([&spec](double, double) { return spec.c2; });
        const IntensityTransform q = transform_intensity(cat.problem, cat.measure, flat);

        FBSDEProblem equivalent = cat.problem;
        const double c2 = spec.c2;
        equivalent.coefficients.set_partial_evaluator(
            Coef::driver, [base = cat.problem, c2](const MultiIndex& mi, const Point& p) {
                Point rescaled = p;
                rescaled.u = p.u / c2;
                return base.partial(Coef::driver, mi, rescaled) / std::pow(c2, mi.k[3]);
            });
        const double with_transform = y0_of(q.problem, q.measure, 0.2);
        const double direct = y0_of(equivalent, cat.measure.scaled(c2), 0.2);
        ok = check(std::abs(with_transform - direct) < 1e-12, detail,
                   "flat-intensity transform shifted Y0 by " + format_g17(with_transform - direct)) &&
             ok;
    }

    // nonconstant lambda: expansion under Q vs thinning-based LSMC under P
    double q_y0 = 0.0, p_y0 = 0.0, p_se = 0.0;
    {
        const double eps = 0.15;
        const IntensityTransform q = transform_intensity(cat.problem, cat.measure, spec);
        const Order0Solution o0 = solve_order0(q.problem, grid);
        const FrozenCoefficients fr = freeze(q.problem, o0, q.measure);
        const Order1Coefficients o1 = solve_order1(fr);
        const Order2Coefficients o2 = solve_order2(fr, o1);
        q_y0 = o0.y0(0) + eps * o1.y0(0) + eps * eps * o2.y0(0);

        LSMCConfig rc;
        rc.n_paths = 200000;
        rc.basis_degree = 3;
        rc.grid = TimeGrid(0.0, 1.0, 256);
        rc.seed = 606060;
        const LSMCResult ref = lsmc_solve(cat.problem, cat.measure, eps, rc, &spec);
        p_y0 = ref.y0;
        p_se = ref.std_error;
        ok = check(std::abs(q_y0 - p_y0) < 3.0 * p_se, detail,
                   "Q-expansion " + format_g17(q_y0) + " vs P-LSMC " + format_g17(p_y0) + " exceeds 3 sigma (" +
                       format_g17(3.0 * p_se) + ")") &&
             ok;
    }

    // density lower bound on 1e5 simulated paths, zero violations
    {
        const double eps = 0.15;
        const double bound = std::exp(-(spec.c2 - spec.c1) * 1.0);
        const DiscreteLevyMeasure q_measure = cat.measure.scaled(spec.c2);
        const TimeGrid dgrid(0.0, 1.0, 128);
        const double dt = dgrid.dt();
        long long violations = 0;
        for (int p = 0; p < 100000; ++p) {
            const PathBundle bundle = simulate_noise(dgrid, q_measure, Rng::mix(424242, p));
            GridFunction x(dgrid);
            double xv = cat.problem.initial_state;
            std::size_t next = 0;
            for (int i = 0; i < dgrid.n_nodes(); ++i) {
                x(i) = xv;
                if (i == dgrid.n_steps()) break;
                const double s = dgrid.node(i);
                double jump = 0.0;
                while (next < bundle.jump_events.size() && bundle.jump_events[next].time <= dgrid.node(i + 1)) {
                    jump += cat.problem.gamma(s, xv, bundle.jump_events[next].mark);
                    ++next;
                }
                const double comp =
                    spec.lambda_at(0, s, xv) *
                    integrate(cat.measure, [&](double z) { return cat.problem.gamma(s, xv, z); });
                xv += cat.problem.b(s, xv, eps) * dt +
                      eps * cat.problem.sigma(s, xv) * bundle.brownian_increments[i] +
                      eps * (jump - comp * dt);
            }
            const GridFunction dens = density_path(spec, x, bundle.jump_events);
            for (int i = 0; i < dgrid.n_nodes(); ++i)
                if (dens(i) < bound - 1e-12) ++violations;
        }
        ok = check(violations == 0, detail, std::to_string(violations) + " density bound violations") && ok;
    }

    if (ok) {
        std::ostringstream ss;
        ss << "flat transform exact; Q-expansion " << q_y0 << " vs P-LSMC " << p_y0 << " +- " << p_se
           << "; density bound clean on 1e5 paths";
        detail = ss.str();
    }
    return ok;
}

// ---------------------------------------------------------------------------
// 7. property suites (no Monte Carlo)
// ---------------------------------------------------------------------------
bool criterion_properties(std::string& detail) {
    bool ok = true;

    // terminal-condition exactness of the coefficient ODEs
    {
        const CatalogModel cat = make_model("cir_like_smooth");
        const TimeGrid grid(0.0, 1.0, 128);
        const Order0Solution o0 = solve_order0(cat.problem, grid);
        const FrozenCoefficients fr = freeze(cat.problem, o0, cat.measure);
        const Order1Coefficients o1 = solve_order1(fr);
        const Order2Coefficients o2 = solve_order2(fr, o1);
        const int T = grid.n_steps();
        ok = check(o1.y1(T) == fr.dx_xi0 && o1.y0(T) == 0.0 && o2.y2(T) == fr.dx_xi0 &&
                       o2.y11(T) == 0.5 * fr.dxx_xi0 && o2.y1(T) == 0.0 && o2.y0(T) == 0.0,
                   detail, "terminal conditions not exact") &&
             ok;

        const CatalogModel levy_cat = make_model("exp_levy");
        const ExpLevyModel& levy = *levy_cat.levy;
        const GridFunction y0 = solve_levy_order0(levy, grid);
        const LevyCoefficients coeffs = solve_levy_coeffs(levy, y0, 4, grid);
        double fact = 1.0;
        for (int n = 1; n <= 4; ++n) {
            fact *= n;
            ok = check(coeffs.order(n)(T) == levy.terminal_derivative(n) / fact, detail,
                       "levy terminal condition not exact at order " + std::to_string(n)) &&
                 ok;
        }
    }

    // RK4 order-4 error ratio
    {
        auto rk_error = [](int n_steps) {
            const GridFunction v =
                integrate_forward([](double, double x) { return x; }, 1.0, TimeGrid(0.0, 1.0, n_steps));
            return std::abs(v.terminal() - std::exp(1.0));
        };
        const double ratio = rk_error(16) / rk_error(32);
        ok = check(ratio >= 14.0 && ratio <= 18.0, detail, "RK4 ratio " + format_g17(ratio)) && ok;
    }

    // composition counts
    {
        auto binom = [](int n, int k) {
            double r = 1.0;
            for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
            return r;
        };
        for (int n = 1; n <= 8; ++n)
            for (int k = 1; k <= n; ++k)
                ok = check(compositions(n, k).size() == static_cast<std::size_t>(binom(n - 1, k - 1)), detail,
                           "composition count off at (" + std::to_string(n) + "," + std::to_string(k) + ")") &&
                     ok;
    }

    // order-1 representation identities at 100 random nodes
    {
        const CatalogModel cat = make_model("quadratic_driver");
        const TimeGrid grid(0.0, 1.0, 256);
        const Order0Solution o0 = solve_order0(cat.problem, grid);
        const FrozenCoefficients fr = freeze(cat.problem, o0, cat.measure);
        const Order1Coefficients o1 = solve_order1(fr);
        Rng rng(31415);
        for (int k = 0; k < 100; ++k) {
            const int i = static_cast<int>(rng.next_double() * grid.n_steps());
            const double x1 = -2.0 + 4.0 * rng.next_double();
            const double z = rng.next_double() < 0.5 ? 0.6 : -0.45;
            const OrderEval a = evaluate_order(1, o0, &o1, nullptr, fr, x1, 0.0, i);
            const OrderEval b = evaluate_order(1, o0, &o1, nullptr, fr, x1 + 1.0, 0.0, i);
            ok = check(std::abs(a.z / fr.sigma0(i) - (b.y - a.y)) < 1e-11, detail, "Z-representation fails") && ok;
            const double u_move = o1.y1(i) * (x1 + fr.gamma0(i, z)) + o1.y0(i);
            const double u_here = o1.y1(i) * x1 + o1.y0(i);
            ok = check(std::abs(a.psi(z) - (u_move - u_here)) < 1e-11, detail, "psi-representation fails") && ok;
            if (!ok) break;
        }
    }

    // byte-identical rerun of a full experiment
    {
        const fs::path dir = fs::temp_directory_path() / "fbsde_acceptance_determinism";
        fs::remove_all(dir);
        ExperimentConfig c;
        c.command = "compare";
        c.model = "linear";
        c.eps_list = {0.2};
        c.order = 1;
        c.n_steps = 64;
        c.lsmc_paths = 2000;
        c.lsmc_steps = 32;
        c.seed = 11;
        c.threads = 2;
        c.out_dir = (dir / "a").string();
        run_experiment(c);
        c.out_dir = (dir / "b").string();
        run_experiment(c);
        auto slurp = [](const fs::path& p) {
            std::ifstream in(p, std::ios::binary);
            std::ostringstream ss;
            ss << in.rdbuf();
            return ss.str();
        };
        ok = check(slurp(dir / "a" / "compare.csv") == slurp(dir / "b" / "compare.csv"), detail,
                   "rerun outputs differ") &&
             ok;
        fs::remove_all(dir);
    }

    if (ok) detail = "terminal exactness, RK4 ratio, composition counts, representation identities, determinism";
    return ok;
}

} // namespace

int main() {
    std::vector<Criterion> criteria{
        {"eps-scaling slopes (N=1 >= 1.5, N=2 >= 2.4) on cir_like_smooth vs LSMC", criterion_eps_scaling},
        {"linear model order-1 exactness (< 1e-6 relative)", criterion_linear_exactness},
        {"characteristic function vs exact transform (< 1e-5, N=4, eps=0.1)", criterion_charfn},
        {"Levy polynomial martingale and discount consistency", criterion_levy_consistency},
        {"order-2 coefficient vs FD-in-eps LSMC oracle (max(5%, 3 sigma))", criterion_order2_fd},
        {"state-dependent intensity: transform, Q-vs-P, density bound", criterion_intensity},
        {"property suites: terminals, RK4 ratio, compositions, representations, determinism",
         criterion_properties},
    };

    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const auto start = std::chrono::steady_clock::now();
        std::string detail;
        bool ok = false;
        try {
            ok = criteria[i].run(detail);
        } catch (const std::exception& e) {
            detail = std::string("exception: ") + e.what();
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        std::printf("[%s] criterion %zu: %s (%.1fs)%s%s\n", ok ? "PASS" : "FAIL", i + 1,
                    criteria[i].name.c_str(), secs, detail.empty() ? "" : " -- ", detail.c_str());
        std::fflush(stdout);
        if (!ok) ++failures;
    }
    if (failures == 0)
        std::printf("acceptance: all %zu criteria passed\n", criteria.size());
    else
        std::printf("acceptance: %d of %zu criteria FAILED\n", failures, criteria.size());
    return failures == 0 ? 0 : 1;
}
