#include "fbsde/model.hpp"

#include <cmath>

#include "fbsde/rng.hpp"

namespace fbsde {

namespace {

double* slot_field(Coef c, int slot, Point& p) {
    switch (c) {
        case Coef::driver:
            switch (slot) {
                case 0: return &p.x;
                case 1: return &p.y;
                case 2: return &p.z;
                default: return &p.u;
            }
        case Coef::drift:
            return slot == 0 ? &p.x : &p.eps;
        default:
            return &p.x;
    }
}

const char* coef_name(Coef c) {
    switch (c) {
        case Coef::drift: return "drift";
        case Coef::diffusion: return "diffusion";
        case Coef::jump: return "jump_coeff";
        case Coef::terminal: return "terminal";
        default: return "driver";
    }
}

} // namespace

double CoefficientSet::eval(Coef c, const MultiIndex& mi, const Point& p) const {
    const int nslots = slot_count(c);
    for (int s = nslots; s < 4; ++s)
        if (mi.k[s] != 0)
            throw config_error(std::string("eval_partial: index slot not applicable to ") + coef_name(c));
    if (mi.total() > max_order)
        throw config_error("eval_partial: requested order exceeds configured maximum");

    if (const auto& ev = evaluator_[idx(c)]) return ev(mi, p);

    if (mi.zero()) {
        const auto& b = base_[idx(c)];
        if (!b) throw config_error(std::string(coef_name(c)) + " callback not set");
        return b(p);
    }
    if (auto it = analytic_.find({idx(c), mi}); it != analytic_.end()) return it->second(p);

    // Central difference on the first differentiated argument, recursing into
    // the reduced index so analytic lower-order partials are reused.
    int slot = 0;
    while (mi.k[slot] == 0) ++slot;
    MultiIndex lower = mi;
    lower.k[slot] -= 1;

    Point hi = p;
    Point lo = p;
    double* f_hi = slot_field(c, slot, hi);
    double* f_lo = slot_field(c, slot, lo);
    const double h = 1e-5 * std::max(1.0, std::abs(*f_hi));
    *f_hi += h;
    *f_lo -= h;
    return (eval(c, lower, hi) - eval(c, lower, lo)) / (2.0 * h);
}

double eval_partial(const FBSDEProblem& problem, Coef target, const MultiIndex& mi, const Point& p) {
    return problem.coefficients.eval(target, mi, p);
}

ValidationReport validate(const FBSDEProblem& problem, int samples, std::uint64_t rng_seed) {
    if (samples < 1) throw config_error("validate: samples must be >= 1");
    Rng rng(rng_seed);
    ValidationReport report;
    report.samples = samples;

    static constexpr double eps_levels[4] = {0.0, 0.25, 0.5, 1.0};
    static constexpr double marks[6] = {-1.0, -0.5, -0.25, 0.25, 0.5, 1.0};
    const double T = problem.horizon;
    const double x0 = problem.initial_state;

    auto checked = [&](Coef c, const MultiIndex& mi, const Point& p) {
        const double v = problem.partial(c, mi, p);
        if (!std::isfinite(v)) throw numeric_error("non-finite coefficient value");
        return v;
    };

    Point prev;
    bool have_prev = false;
    for (int n = 0; n < samples; ++n) {
        Point p;
        p.t = T * rng.next_double();
        p.x = x0 - 3.0 + 6.0 * rng.next_double();
        p.eps = eps_levels[n % 4];
        p.mark = marks[n % 6];
        p.y = -2.0 + 4.0 * rng.next_double();
        p.z = -2.0 + 4.0 * rng.next_double();
        p.u = -2.0 + 4.0 * rng.next_double();

        const double b = checked(Coef::drift, MultiIndex::none(), p);
        const double s = checked(Coef::diffusion, MultiIndex::none(), p);
        const double g = checked(Coef::jump, MultiIndex::none(), p);
        const double xi = checked(Coef::terminal, MultiIndex::none(), p);
        const double f = checked(Coef::driver, MultiIndex::none(), p);
        if (problem.jump_weight && !std::isfinite(problem.rho(p.mark)))
            throw numeric_error("non-finite coefficient value");

        // The order-0 oracle and the plain callback are the same route by
        // construction; record the (exactly zero) gap so the report shows the
        // invariant was exercised.
        report.max_zero_index_gap = std::max(report.max_zero_index_gap,
                                             std::abs(checked(Coef::drift, MultiIndex::none(), p) - b));

        if (have_prev && std::abs(p.x - prev.x) > 1e-8) {
            Point q = prev;
            q.t = p.t;
            q.eps = p.eps;
            q.mark = p.mark;
            q.y = p.y;
            q.z = p.z;
            q.u = p.u;
            const double dx = std::abs(p.x - q.x);
            auto ratio = [&](double a, double bb) { return std::abs(a - bb) / dx; };
            report.max_lipschitz_ratio = std::max({report.max_lipschitz_ratio,
                                                   ratio(b, checked(Coef::drift, MultiIndex::none(), q)),
                                                   ratio(s, checked(Coef::diffusion, MultiIndex::none(), q)),
                                                   ratio(g, checked(Coef::jump, MultiIndex::none(), q)),
                                                   ratio(xi, checked(Coef::terminal, MultiIndex::none(), q)),
                                                   ratio(f, checked(Coef::driver, MultiIndex::none(), q))});
        }
        prev = p;
        have_prev = true;

        // Registered analytic partials vs central differences of the base.
        problem.coefficients.visit_analytic([&](Coef c, const MultiIndex& mi, const CoefficientSet::Fn& fn) {
            if (mi.total() != 1) return;
            int slot = 0;
            while (mi.k[slot] == 0) ++slot;
            Point hi = p;
            Point lo = p;
            double* f_hi = slot_field(c, slot, hi);
            double* f_lo = slot_field(c, slot, lo);
            const double h = 1e-5 * std::max(1.0, std::abs(*f_hi));
            *f_hi += h;
            *f_lo -= h;
            const double fd =
                (problem.partial(c, MultiIndex::none(), hi) - problem.partial(c, MultiIndex::none(), lo)) / (2.0 * h);
            const double an = fn(p);
            if (!std::isfinite(an)) throw numeric_error("non-finite coefficient value");
            const double rel = std::abs(an - fd) / std::max(1.0, std::abs(an));
            report.max_partial_mismatch = std::max(report.max_partial_mismatch, rel);
        });
    }

    report.ok = report.max_partial_mismatch < 1e-4;
    return report;
}

} // namespace fbsde
