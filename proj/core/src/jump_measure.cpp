#include "fbsde/jump_measure.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <memory>
#include <sstream>

namespace fbsde {

void DiscreteLevyMeasure::add_component(std::vector<Atom> atoms) {
    double mass = 0.0;
    double second_moment = 0.0;
    for (const Atom& a : atoms) {
        if (!(a.weight > 0.0) || !std::isfinite(a.weight))
            throw std::invalid_argument("DiscreteLevyMeasure: atom weights must be positive and finite");
        if (a.mark == 0.0 || !std::isfinite(a.mark))
            throw std::invalid_argument("DiscreteLevyMeasure: atom marks must be finite and nonzero");
        mass += a.weight;
        second_moment += a.mark * a.mark * a.weight;
    }
    if (!std::isfinite(mass) || !std::isfinite(second_moment))
        throw std::invalid_argument("DiscreteLevyMeasure: non-finite mass");
    atoms_.push_back(std::move(atoms));
    mass_.push_back(mass);
}

bool DiscreteLevyMeasure::empty() const {
    for (const auto& c : atoms_)
        if (!c.empty()) return false;
    return true;
}

DiscreteLevyMeasure DiscreteLevyMeasure::scaled(double factor) const {
    DiscreteLevyMeasure out;
    for (const auto& comp : atoms_) {
        std::vector<Atom> scaled_atoms = comp;
        for (Atom& a : scaled_atoms) a.weight *= factor;
        out.add_component(std::move(scaled_atoms));
    }
    return out;
}

DiscreteLevyMeasure DiscreteLevyMeasure::from_table(std::istream& in) {
    std::vector<Atom> atoms;
    std::string line;
    while (std::getline(in, line)) {
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream ls(line);
        double mark, weight;
        if (ls >> mark >> weight) atoms.push_back({mark, weight});
    }
    return DiscreteLevyMeasure(std::move(atoms));
}

DiscreteLevyMeasure DiscreteLevyMeasure::from_files(const std::vector<std::string>& paths) {
    DiscreteLevyMeasure out;
    for (const auto& path : paths) {
        std::ifstream in(path);
        if (!in) throw config_error("cannot open atom table: " + path);
        DiscreteLevyMeasure one = from_table(in);
        out.add_component({one.atoms(0).begin(), one.atoms(0).end()});
    }
    return out;
}

double integrate(const DiscreteLevyMeasure& measure, const MarkFn& g, int component) {
    double sum = 0.0;
    for (const Atom& a : measure.atoms(component)) {
        const double v = g(a.mark);
        if (!std::isfinite(v)) throw numeric_error("integrate: non-finite integrand at mark " + format_g17(a.mark));
        sum += v * a.weight;
    }
    return sum;
}

double moment_q(const DiscreteLevyMeasure& measure, const MarkFn& gamma_at_s, int j, int component) {
    if (j < 2) throw std::invalid_argument("moment_q: j must be >= 2");
    return integrate(measure, [&](double z) { return std::pow(gamma_at_s(z), j); }, component);
}

double moment_Gamma(const DiscreteLevyMeasure& measure, const MarkFn& rho, const MarkFn& gamma_at_s, int j,
                    int component) {
    if (j < 1) throw std::invalid_argument("moment_Gamma: j must be >= 1");
    return integrate(
        measure, [&](double z) { return rho(z) * (std::pow(1.0 + gamma_at_s(z), j) - 1.0); }, component);
}

double gamma_bar0(const DiscreteLevyMeasure& measure, const MarkFn& rho, const MarkFn& gamma0_at_s, int component) {
    return integrate(measure, [&](double z) { return rho(z) * gamma0_at_s(z); }, component);
}

std::vector<JumpEvent> sample_jumps(const DiscreteLevyMeasure& measure, double t0, double t1, Rng& rng) {
    if (!(t1 > t0)) throw std::invalid_argument("sample_jumps: t1 must exceed t0");
    std::vector<JumpEvent> events;
    for (int c = 0; c < measure.components(); ++c) {
        const double mass = measure.total_mass(c);
        if (mass <= 0.0) continue;
        const int count = rng.poisson(mass * (t1 - t0));
        const auto atoms = measure.atoms(c);
        for (int e = 0; e < count; ++e) {
            const double time = t0 + (t1 - t0) * rng.next_double();
            double pick = mass * rng.next_double();
            std::size_t j = 0;
            while (j + 1 < atoms.size() && pick >= atoms[j].weight) {
                pick -= atoms[j].weight;
                ++j;
            }
            events.push_back({time, c, atoms[j].mark});
        }
    }
    std::sort(events.begin(), events.end(), [](const JumpEvent& a, const JumpEvent& b) { return a.time < b.time; });
    return events;
}

double IntensitySpec::lambda_at(int component, double t, double x) const {
    return lambda.at(component)(t, x);
}

double IntensitySpec::dx_lambda_at(int component, int order, double t, double x) const {
    if (order == 0) return lambda_at(component, t, x);
    if (order == 1 && component < static_cast<int>(dx_lambda.size()) && dx_lambda[component])
        return dx_lambda[component](t, x);
    if (order == 2 && component < static_cast<int>(dxx_lambda.size()) && dxx_lambda[component])
        return dxx_lambda[component](t, x);
    const double h = 1e-5 * std::max(1.0, std::abs(x));
    return (dx_lambda_at(component, order - 1, t, x + h) - dx_lambda_at(component, order - 1, t, x - h)) / (2.0 * h);
}

namespace {

double binomial_coeff(int n, int k) {
    double r = 1.0;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

// Shared state for the wrapped derivative oracle of a transformed problem.
struct TransformState {
    FBSDEProblem original;
    DiscreteLevyMeasure unit_measure; // mass 1 per component
    IntensitySpec spec;

    // d^n/dx^n of int gamma^i(t, x, z) nu^i(dz)
    double gamma_moment_dx(int component, int order, double t, double x) const {
        double sum = 0.0;
        for (const Atom& a : unit_measure.atoms(component))
            sum += a.weight *
                   original.partial(Coef::jump, MultiIndex::x(order), {.t = t, .x = x, .mark = a.mark});
        return sum;
    }

    // d^n/dx^n of (c2 - lambda^i(t, x)) * int gamma^i nu^i  (Leibniz)
    double drift_term_dx(int component, int order, double t, double x) const {
        double sum = 0.0;
        for (int j = 0; j <= order; ++j) {
            const double lam = (j == 0) ? (spec.c2 - spec.lambda_at(component, t, x))
                                        : -spec.dx_lambda_at(component, j, t, x);
            sum += binomial_coeff(order, j) * lam * gamma_moment_dx(component, order - j, t, x);
        }
        return sum;
    }
};

} // namespace

IntensityTransform transform_intensity(const FBSDEProblem& problem, const DiscreteLevyMeasure& measure,
                                       const IntensitySpec& spec) {
    if (spec.lambda.size() != static_cast<std::size_t>(measure.components()))
        throw std::invalid_argument("transform_intensity: one lambda per measure component required");
    if (!(0.0 < spec.c1 && spec.c1 <= spec.c2))
        throw std::invalid_argument("transform_intensity: bounds must satisfy 0 < c1 <= c2");
    for (int c = 0; c < measure.components(); ++c)
        if (std::abs(measure.total_mass(c) - 1.0) > 1e-9)
            throw std::invalid_argument("transform_intensity: measure must be normalized to mass 1 per component");
    for (int c = 0; c < measure.components(); ++c)
        for (double t : {0.0, 0.5 * problem.horizon, problem.horizon})
            for (double dx : {-3.0, -1.0, 0.0, 1.0, 3.0}) {
                const double lam = spec.lambda_at(c, t, problem.initial_state + dx);
                if (!(lam >= spec.c1 - 1e-12 && lam <= spec.c2 + 1e-12))
                    throw std::invalid_argument("transform_intensity: sampled intensity outside [c1, c2]");
            }

    auto state = std::make_shared<TransformState>(TransformState{problem, measure, spec});

    IntensityTransform out;
    out.problem.dims = problem.dims;
    out.problem.horizon = problem.horizon;
    out.problem.initial_state = problem.initial_state;
    out.problem.jump_weight = problem.jump_weight;
    out.problem.coefficients.max_order = problem.coefficients.max_order;

    auto delegate = [state](Coef c) {
        return [state, c](const MultiIndex& mi, const Point& p) { return state->original.partial(c, mi, p); };
    };
    out.problem.coefficients.set_partial_evaluator(Coef::diffusion, delegate(Coef::diffusion));
    out.problem.coefficients.set_partial_evaluator(Coef::jump, delegate(Coef::jump));
    out.problem.coefficients.set_partial_evaluator(Coef::terminal, delegate(Coef::terminal));

    // b~ adds eps * sum_i (c2 - lambda^i) int gamma^i nu^i, linear in eps.
    out.problem.coefficients.set_partial_evaluator(Coef::drift, [state](const MultiIndex& mi, const Point& p) {
        const double base = state->original.partial(Coef::drift, mi, p);
        const int n = mi.k[0];
        const int m = mi.k[1];
        if (m >= 2) return base;
        double term = 0.0;
        for (int c = 0; c < state->unit_measure.components(); ++c)
            term += state->drift_term_dx(c, n, p.t, p.x);
        return base + (m == 1 ? term : p.eps * term);
    });

    // The intensity-change driver correction is stated for u integrated against the
    // normalized nu; downstream the problem carries the c2-mass measure, so
    // the wrapped driver reads its u-argument at u/c2:
    //   f~(t,x,y,z,u) = f(t,x,y,z, u/c2) - (c2 - lambda(t,x)) u/c2.
    out.problem.coefficients.set_partial_evaluator(Coef::driver, [state](const MultiIndex& mi, const Point& p) {
        const double c2 = state->spec.c2;
        const int ix = mi.k[0], iy = mi.k[1], iz = mi.k[2], iu = mi.k[3];
        Point rescaled = p;
        rescaled.u = p.u / c2;
        const double base = state->original.partial(Coef::driver, mi, rescaled) / std::pow(c2, iu);
        if (iy > 0 || iz > 0 || iu >= 2) return base;
        double factor = 0.0;
        for (int c = 0; c < state->unit_measure.components(); ++c)
            factor += (ix == 0) ? -(c2 - state->spec.lambda_at(c, p.t, p.x))
                                : state->spec.dx_lambda_at(c, ix, p.t, p.x);
        factor /= c2;
        return base + (iu == 1 ? factor : factor * p.u);
    });

    out.measure = measure.scaled(spec.c2);
    return out;
}

GridFunction density_path(const IntensitySpec& spec, const GridFunction& x_path, std::span<const JumpEvent> jumps) {
    const TimeGrid& grid = x_path.grid();
    const int k = static_cast<int>(spec.lambda.size());
    const double dt = grid.dt();

    auto lambda_checked = [&](int c, double t, double x) {
        const double v = spec.lambda_at(c, t, x);
        if (!(v > 0.0) || !std::isfinite(v))
            throw numeric_error("density_path: intensity must stay strictly positive");
        return v;
    };

    // c2 - lambda summed over components, tabulated at the nodes.
    std::vector<double> decay(grid.n_nodes(), 0.0);
    for (int i = 0; i < grid.n_nodes(); ++i)
        for (int c = 0; c < k; ++c) decay[i] += spec.c2 - lambda_checked(c, grid.node(i), x_path(i));

    // ln of the jump factor prod c2/lambda(tau, X_{tau-}), binned so the
    // factor multiplies M from the node right after the event.
    std::vector<double> jump_log(grid.n_nodes(), 0.0);
    for (const JumpEvent& e : jumps) {
        int pre = grid.floor_index(e.time);
        if (pre > 0 && grid.node(pre) >= e.time) --pre;
        const int post = std::min(pre + 1, grid.n_steps());
        jump_log[post] += std::log(spec.c2 / lambda_checked(e.component, e.time, x_path(pre)));
    }

    GridFunction m(grid);
    double log_m = 0.0;
    m(0) = 1.0;
    for (int i = 1; i < grid.n_nodes(); ++i) {
        log_m += -0.5 * dt * (decay[i - 1] + decay[i]) + jump_log[i];
        m(i) = std::exp(log_m);
    }
    m.check_finite("density_path");
    return m;
}

} // namespace fbsde
