#include "fbsde/reference.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

#include "fbsde/rng.hpp"

namespace fbsde {

namespace {

int resolve_threads(int requested) {
    if (requested > 0) return requested;
    const unsigned hc = std::thread::hardware_concurrency();
    return hc == 0 ? 1 : static_cast<int>(hc);
}

// Static path partition; chunk results are combined in chunk order so a rerun
// with the same thread count is bit-identical.
template <typename Body>
void parallel_chunks(int n_items, int threads, const Body& body) {
    if (threads <= 1) {
        body(0, 0, n_items);
        return;
    }
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(threads);
    const int chunk = (n_items + threads - 1) / threads;
    for (int t = 0; t < threads; ++t) {
        const int lo = t * chunk;
        const int hi = std::min(n_items, lo + chunk);
        if (lo >= hi) break;
        pool.emplace_back([&body, &errors, t, lo, hi] {
            try {
                body(t, lo, hi);
            } catch (...) {
                errors[t] = std::current_exception();
            }
        });
    }
    for (auto& th : pool) th.join();
    for (const auto& e : errors)
        if (e) std::rethrow_exception(e);
}

struct ForwardModel {
    const FBSDEProblem& problem;
    const DiscreteLevyMeasure& measure;
    double eps;
    const IntensitySpec* intensity; // nullptr for plain Poisson jumps

    // int rho nu per component, and candidate rates
    std::vector<double> rho_moment;
    std::vector<double> rate;

    explicit ForwardModel(const FBSDEProblem& p, const DiscreteLevyMeasure& m, double e,
                          const IntensitySpec* spec)
        : problem(p), measure(m), eps(e), intensity(spec) {
        for (int c = 0; c < m.components(); ++c) {
            rho_moment.push_back(integrate(m, [&p](double z) { return p.rho(z); }, c));
            rate.push_back(spec ? spec->c2 * m.total_mass(c) : m.total_mass(c));
        }
    }
};

// Per-(path, step) noise, regenerable from the seed alone. The same stream
// and consumption order serve the forward pass (which needs gamma sums at the
// current state) and the backward pass (which needs dW and the compensated
// rho-weighted jump sum).
struct StepDraw {
    double dw = 0.0;
    double gamma_sum = 0.0;     // sum gamma(s, x, z_event) over accepted events
    double rho_sum = 0.0;       // sum rho(z_event) over accepted events
    double lambda_factor = 1.0; // lambda(s, x) for the intensity case, else 1
};

StepDraw draw_step(const ForwardModel& fm, std::uint64_t seed, int path, int step, double s, double x,
                   double dt, double sqrt_dt) {
    Rng rng(Rng::mix(Rng::mix(seed, static_cast<std::uint64_t>(path)), static_cast<std::uint64_t>(step)));
    StepDraw d;
    d.dw = sqrt_dt * rng.normal();
    for (int c = 0; c < fm.measure.components(); ++c) {
        const double rate = fm.rate[c];
        if (fm.intensity) d.lambda_factor = fm.intensity->lambda_at(c, s, x);
        if (rate <= 0.0) continue;
        const int count = rng.poisson(rate * dt);
        const auto atoms = fm.measure.atoms(c);
        const double mass = fm.measure.total_mass(c);
        const double accept_p = fm.intensity ? d.lambda_factor / fm.intensity->c2 : 1.0;
        for (int e = 0; e < count; ++e) {
            double pick = mass * rng.next_double();
            std::size_t j = 0;
            while (j + 1 < atoms.size() && pick >= atoms[j].weight) {
                pick -= atoms[j].weight;
                ++j;
            }
            const bool accepted = !fm.intensity || rng.next_double() < accept_p;
            if (accepted) {
                d.gamma_sum += fm.problem.gamma(s, x, atoms[j].mark);
                d.rho_sum += fm.problem.rho(atoms[j].mark);
            }
        }
    }
    return d;
}

// One Euler step of X^eps; the running state is kept float-rounded so the
// backward pass regenerates identical draws from the stored array.
double euler_step(const ForwardModel& fm, double s, double x, double dt, const StepDraw& d) {
    double comp = 0.0;
    for (int c = 0; c < fm.measure.components(); ++c) {
        double g = integrate(fm.measure, [&](double z) { return fm.problem.gamma(s, x, z); }, c);
        comp += (fm.intensity ? fm.intensity->lambda_at(c, s, x) : 1.0) * g;
    }
    return x + fm.problem.b(s, x, fm.eps) * dt + fm.eps * fm.problem.sigma(s, x) * d.dw +
           fm.eps * (d.gamma_sum - comp * dt);
}

// lambda_max / lambda_min of a small symmetric matrix by cyclic Jacobi.
double condition_number(std::vector<double> a, int n) {
    for (int sweep = 0; sweep < 32; ++sweep) {
        double off = 0.0;
        for (int p = 0; p < n; ++p)
            for (int q = p + 1; q < n; ++q) off += a[p * n + q] * a[p * n + q];
        if (off < 1e-30) break;
        for (int p = 0; p < n; ++p)
            for (int q = p + 1; q < n; ++q) {
                const double apq = a[p * n + q];
                if (std::abs(apq) < 1e-300) continue;
                const double tau = (a[q * n + q] - a[p * n + p]) / (2.0 * apq);
                const double t = (tau >= 0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double sv = t * c;
                for (int k = 0; k < n; ++k) {
                    const double akp = a[k * n + p], akq = a[k * n + q];
                    a[k * n + p] = c * akp - sv * akq;
                    a[k * n + q] = sv * akp + c * akq;
                }
                for (int k = 0; k < n; ++k) {
                    const double apk = a[p * n + k], aqk = a[q * n + k];
                    a[p * n + k] = c * apk - sv * aqk;
                    a[q * n + k] = sv * apk + c * aqk;
                }
            }
    }
    double lo = a[0], hi = a[0];
    for (int i = 1; i < n; ++i) {
        lo = std::min(lo, a[i * n + i]);
        hi = std::max(hi, a[i * n + i]);
    }
    return lo > 0.0 ? hi / lo : std::numeric_limits<double>::infinity();
}

// Cholesky solve of the (ridge-regularized) normal equations; false if the
// matrix is not positive definite.
bool solve_spd(std::vector<double> a, int n, std::vector<std::vector<double>*> rhs) {
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j <= i; ++j) {
            double s = a[i * n + j];
            for (int k = 0; k < j; ++k) s -= a[i * n + k] * a[j * n + k];
            if (i == j) {
                if (s <= 0.0) return false;
                a[i * n + i] = std::sqrt(s);
            } else {
                a[i * n + j] = s / a[j * n + j];
            }
        }
    }
    for (auto* b : rhs) {
        auto& v = *b;
        for (int i = 0; i < n; ++i) {
            double s = v[i];
            for (int k = 0; k < i; ++k) s -= a[i * n + k] * v[k];
            v[i] = s / a[i * n + i];
        }
        for (int i = n - 1; i >= 0; --i) {
            double s = v[i];
            for (int k = i + 1; k < n; ++k) s -= a[k * n + i] * v[k];
            v[i] = s / a[i * n + i];
        }
    }
    return true;
}

} // namespace

LSMCResult lsmc_solve(const FBSDEProblem& problem, const DiscreteLevyMeasure& measure, double eps,
                      const LSMCConfig& config, const IntensitySpec* intensity) {
    if (config.basis_degree < 1) throw std::invalid_argument("lsmc_solve: basis_degree must be >= 1");
    if (config.n_paths < 10 * (config.basis_degree + 1))
        throw std::invalid_argument("lsmc_solve: n_paths must be >= 10 * (basis_degree + 1)");

    const TimeGrid& grid = config.grid;
    const int P = config.n_paths;
    const int n_steps = grid.n_steps();
    const double dt = grid.dt();
    const double sqrt_dt = std::sqrt(dt);
    const int threads = resolve_threads(config.threads);
    const ForwardModel fm(problem, measure, eps, intensity);

    // Forward sweep. States are stored float-rounded, [step][path].
    std::vector<float> x(static_cast<std::size_t>(n_steps + 1) * P);
    parallel_chunks(P, threads, [&](int, int lo, int hi) {
        for (int p = lo; p < hi; ++p) {
            double xv = problem.initial_state;
            x[p] = static_cast<float>(xv);
            for (int i = 0; i < n_steps; ++i) {
                xv = x[static_cast<std::size_t>(i) * P + p];
                const double s = grid.node(i);
                const StepDraw d = draw_step(fm, config.seed, p, i, s, xv, dt, sqrt_dt);
                const double next = euler_step(fm, s, xv, dt, d);
                if (!std::isfinite(next))
                    throw numeric_error("lsmc_solve: non-finite forward state at node " + std::to_string(i + 1));
                x[static_cast<std::size_t>(i + 1) * P + p] = static_cast<float>(next);
            }
        }
    });

    LSMCResult result;
    result.step_condition.assign(n_steps, 0.0);
    std::vector<double> y(P);
    parallel_chunks(P, threads, [&](int, int lo, int hi) {
        for (int p = lo; p < hi; ++p) y[p] = problem.xi(x[static_cast<std::size_t>(n_steps) * P + p]);
    });
    // terminal payoff plus the driver increments actually applied; the mean
    // telescopes to y0 because every regression carries an intercept
    std::vector<double> realized(y);

    const int dim_full = config.basis_degree + 1;
    std::vector<double> rho_nu(measure.components());
    for (int c = 0; c < measure.components(); ++c)
        rho_nu[c] = integrate(measure, [&problem](double z) { return problem.rho(z); }, c);

    // The backward induction runs as independent chains over path stripes.
    // Batch means give a standard error that sees the regression-coefficient
    // noise shared within a chain, which a per-path spread cannot.
    const int batches = std::max(1, std::min(config.se_batches, P / std::max(1, 10 * dim_full)));
    const int stripe = P / batches;
    std::vector<double> batch_y0(batches, 0.0);
    std::vector<std::vector<double>> batch_cond(batches);

    auto run_chain = [&](int b) {
        const int lo = b * stripe;
        const int hi = (b == batches - 1) ? P : lo + stripe;
        const int m = hi - lo;
        batch_cond[b].assign(n_steps, 0.0);
        std::vector<double> dw(m), nj(m), lam(m);
        std::vector<double> phi(dim_full), phi_coef_y, phi_coef_z, phi_coef_u;

        for (int i = n_steps - 1; i >= 0; --i) {
            const double s = grid.node(i);
            const float* xi_row = x.data() + static_cast<std::size_t>(i) * P;

            for (int p = lo; p < hi; ++p) {
                const double xv = xi_row[p];
                const StepDraw d = draw_step(fm, config.seed, p, i, s, xv, dt, sqrt_dt);
                double compensator = 0.0;
                for (int c = 0; c < measure.components(); ++c)
                    compensator += (intensity ? d.lambda_factor : 1.0) * rho_nu[c];
                dw[p - lo] = d.dw;
                nj[p - lo] = d.rho_sum - compensator * dt;
                lam[p - lo] = intensity ? d.lambda_factor : 1.0;
            }

            double mean = 0.0, sq = 0.0;
            for (int p = lo; p < hi; ++p) mean += xi_row[p];
            mean /= m;
            for (int p = lo; p < hi; ++p) sq += (xi_row[p] - mean) * (xi_row[p] - mean);
            double sd = std::sqrt(sq / std::max(1, m - 1));

            int dim = (i == 0 || sd < 1e-12) ? 1 : dim_full;
            if (sd < 1e-12) sd = 1.0;

            for (bool solved = false; !solved;) {
                std::vector<double> a(dim * dim, 0.0);
                phi_coef_y.assign(dim, 0.0);
                for (int p = lo; p < hi; ++p) {
                    const double xs = (xi_row[p] - mean) / sd;
                    phi[0] = 1.0;
                    for (int k = 1; k < dim; ++k) phi[k] = phi[k - 1] * xs;
                    for (int r = 0; r < dim; ++r) {
                        for (int c2 = 0; c2 <= r; ++c2) a[r * dim + c2] += phi[r] * phi[c2];
                        phi_coef_y[r] += phi[r] * y[p];
                    }
                }
                for (int r = 0; r < dim; ++r)
                    for (int c2 = 0; c2 <= r; ++c2) {
                        a[r * dim + c2] /= m;
                        a[c2 * dim + r] = a[r * dim + c2];
                    }
                for (int r = 0; r < dim; ++r) {
                    if (r > 0) a[r * dim + r] += config.ridge;
                    phi_coef_y[r] /= m;
                }
                std::vector<double> a2 = a;
                batch_cond[b][i] = std::max(batch_cond[b][i], condition_number(a, dim));
                if (!solve_spd(a, dim, {&phi_coef_y})) {
                    if (dim > 1) {
                        dim -= 1; // degree reduction remedy
                        continue;
                    }
                    throw numeric_error("lsmc_solve: singular regression at step " + std::to_string(i) +
                                        " (condition " + format_g17(batch_cond[b][i]) + ")");
                }

                // Z and U responses centered by the fitted continuation value
                // (same conditional expectation, far lower response variance).
                phi_coef_z.assign(dim, 0.0);
                phi_coef_u.assign(dim, 0.0);
                for (int p = lo; p < hi; ++p) {
                    const double xs = (xi_row[p] - mean) / sd;
                    phi[0] = 1.0;
                    for (int k = 1; k < dim; ++k) phi[k] = phi[k - 1] * xs;
                    double fitted = 0.0;
                    for (int k = 0; k < dim; ++k) fitted += phi_coef_y[k] * phi[k];
                    const double residual = y[p] - fitted;
                    for (int r = 0; r < dim; ++r) {
                        phi_coef_z[r] += phi[r] * residual * dw[p - lo] / dt;
                        phi_coef_u[r] += phi[r] * residual * nj[p - lo] / (dt * lam[p - lo]);
                    }
                }
                for (int r = 0; r < dim; ++r) {
                    phi_coef_z[r] /= m;
                    phi_coef_u[r] /= m;
                }
                if (!solve_spd(a2, dim, {&phi_coef_z, &phi_coef_u}))
                    throw numeric_error("lsmc_solve: singular regression at step " + std::to_string(i));
                solved = true;
            }

            const int dim_used = static_cast<int>(phi_coef_y.size());
            for (int p = lo; p < hi; ++p) {
                const double xv = xi_row[p];
                const double xs = (xv - mean) / sd;
                phi[0] = 1.0;
                for (int k = 1; k < dim_used; ++k) phi[k] = phi[k - 1] * xs;
                double cont = 0.0, zv = 0.0, uv = 0.0;
                for (int k = 0; k < dim_used; ++k) {
                    cont += phi_coef_y[k] * phi[k];
                    zv += phi_coef_z[k] * phi[k];
                    uv += phi_coef_u[k] * phi[k];
                }
                double yv = cont;
                for (int sweep = 0; sweep < config.picard_sweeps; ++sweep)
                    yv = cont + problem.f(s, xv, yv, zv, uv) * dt;
                y[p] = yv;
                realized[p] += yv - cont;
            }
        }
        batch_y0[b] = y[lo]; // step 0 collapses to a plain stripe mean
    };

    parallel_chunks(batches, threads, [&](int, int blo, int bhi) {
        for (int b = blo; b < bhi; ++b) run_chain(b);
    });

    double y0 = 0.0;
    for (int b = 0; b < batches; ++b) y0 += batch_y0[b] * ((b == batches - 1) ? P - b * stripe : stripe);
    result.y0 = y0 / P;
    if (batches >= 2) {
        double var = 0.0;
        for (double v : batch_y0) var += (v - result.y0) * (v - result.y0);
        result.std_error = std::sqrt(var / (batches - 1.0) / batches);
    } else {
        double var = 0.0;
        for (double v : realized) var += (v - result.y0) * (v - result.y0);
        result.std_error = std::sqrt(var / std::max(1, P - 1) / P);
    }
    for (int i = 0; i < n_steps; ++i)
        for (int b = 0; b < batches; ++b)
            result.step_condition[i] = std::max(result.step_condition[i], batch_cond[b][i]);
    result.path_values = std::move(realized);
    return result;
}

McEstimate plain_mc_terminal(const FBSDEProblem& problem, const DiscreteLevyMeasure& measure, double eps,
                             int n_paths, std::uint64_t seed, const TimeGrid& grid,
                             const IntensitySpec* intensity) {
    for (double t : {0.0, 0.31 * problem.horizon, problem.horizon})
        for (double v : {-0.7, 0.0, 1.3})
            if (problem.f(t, v, 0.8 * v, -v, 0.5 * v) != 0.0)
                throw std::invalid_argument("plain_mc_terminal: driver must be identically zero");

    const ForwardModel fm(problem, measure, eps, intensity);
    const double dt = grid.dt();
    const double sqrt_dt = std::sqrt(dt);
    std::vector<double> vals(n_paths);
    parallel_chunks(n_paths, resolve_threads(0), [&](int, int lo, int hi) {
        for (int p = lo; p < hi; ++p) {
            double xv = problem.initial_state;
            for (int i = 0; i < grid.n_steps(); ++i) {
                xv = static_cast<float>(xv);
                const double s = grid.node(i);
                const StepDraw d = draw_step(fm, seed, p, i, s, xv, dt, sqrt_dt);
                xv = euler_step(fm, s, xv, dt, d);
                if (!std::isfinite(xv))
                    throw numeric_error("plain_mc_terminal: non-finite state at node " + std::to_string(i + 1));
            }
            vals[p] = problem.xi(xv);
        }
    });
    double m = 0.0;
    for (double v : vals) m += v;
    m /= n_paths;
    double var = 0.0;
    for (double v : vals) var += (v - m) * (v - m);
    return {m, std::sqrt(var / std::max(1, n_paths - 1) / n_paths)};
}

std::complex<double> levy_khintchine_exact(double b, double sigma, const DiscreteLevyMeasure& measure,
                                           const MarkFn& gamma, double eps, double theta, double T, double x) {
    const std::complex<double> i(0.0, 1.0);
    std::complex<double> exponent = i * theta * x + T * (i * theta * b - 0.5 * theta * theta * eps * eps * sigma * sigma);
    for (int c = 0; c < measure.components(); ++c)
        for (const Atom& a : measure.atoms(c)) {
            const double g = gamma ? gamma(a.mark) : a.mark;
            exponent += T * a.weight * (std::exp(i * theta * eps * g) - 1.0 - i * theta * eps * g);
        }
    return std::exp(exponent);
}

} // namespace fbsde
