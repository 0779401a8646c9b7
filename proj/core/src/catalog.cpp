#include "fbsde/catalog.hpp"

#include <cmath>

namespace fbsde {

namespace {

double sech2(double v) {
    const double c = std::cosh(v);
    return 1.0 / (c * c);
}

double sat(double v) { return v * v / (1.0 + v * v); }          // saturated square
double sat_d(double v) {
    const double d = 1.0 + v * v;
    return 2.0 * v / (d * d);
}
double sat_dd(double v) {
    const double d = 1.0 + v * v;
    return (2.0 - 6.0 * v * v) / (d * d * d);
}

void set_driver_partial(FBSDEProblem& p, int ix, int iy, int iz, int iu,
                        std::function<double(const Point&)> fn) {
    p.coefficients.set_partial(Coef::driver, MultiIndex::driver(ix, iy, iz, iu), std::move(fn));
}

CatalogModel make_linear() {
    constexpr double a = 0.1;     // drift slope
    constexpr double alpha = -0.05; // driver slope in y
    CatalogModel m;
    m.name = "linear";
    m.measure = DiscreteLevyMeasure({{0.4, 1.0}, {-0.25, 1.5}});

    FBSDEProblem& p = m.problem;
    p.horizon = 1.0;
    p.initial_state = 1.0;
    p.set_drift([](double, double x, double) { return a * x; });
    p.set_diffusion([](double, double) { return 0.3; });
    p.set_jump_coeff([](double, double, double z) { return z; });
    p.set_terminal([](double x) { return x; });
    p.set_driver([](double, double, double y, double, double) { return alpha * y; });
    p.jump_weight = [](double) { return 1.0; };

    p.coefficients.set_partial(Coef::drift, MultiIndex::x(1), [](const Point&) { return a; });
    p.coefficients.set_partial(Coef::terminal, MultiIndex::x(1), [](const Point&) { return 1.0; });
    set_driver_partial(p, 0, 1, 0, 0, [](const Point&) { return alpha; });

    const double x0 = p.initial_state;
    m.closed_form_y0 = [x0](double) { return x0 * std::exp(a + alpha); }; // T = 1
    return m;
}

CatalogModel make_cir_like() {
    constexpr double kappa = 0.5, theta_bar = 1.2;
    constexpr double beta1 = 0.3, beta2 = 0.4, beta3 = 2.0; // eps-drift couplings
    constexpr double vol = 0.4, jump_scale = 0.35;

    CatalogModel m;
    m.name = "cir_like_smooth";
    m.measure = DiscreteLevyMeasure({{0.5, 0.8}, {-0.3, 1.2}});

    // The initial state sits at the drift equilibrium and the driver vanishes
    // on (y = xi(x), z = u = 0), so the zeroth-order path is stationary and
    // f^[0] is identically zero; everything nontrivial enters through eps.
    FBSDEProblem& p = m.problem;
    p.horizon = 1.0;
    p.initial_state = theta_bar;
    p.set_drift([](double, double x, double e) {
        return kappa * (theta_bar - x) + beta1 * e * std::tanh(x) + 0.5 * beta2 * e * e * std::sin(x) +
               beta3 / 6.0 * e * e * e * std::cos(x);
    });
    p.set_diffusion([](double, double x) { return vol * (0.2 + sat(x)); });
    p.set_jump_coeff([](double, double x, double z) { return jump_scale * z * (1.0 + 0.25 * std::sin(x)); });
    p.set_terminal([](double x) { return std::sqrt(1.0 + x * x); });
    p.set_driver([](double, double x, double y, double z, double u) {
        return -0.3 * (y - std::sqrt(1.0 + x * x)) + 0.25 * std::sin(z) + 0.2 * std::tanh(u) +
               0.15 * std::sin(z) * std::tanh(y);
    });
    p.jump_weight = [](double z) { return std::min(1.0, std::abs(z)); };

    auto& c = p.coefficients;
    c.set_partial(Coef::drift, MultiIndex::x(1), [](const Point& q) {
        return -kappa + beta1 * q.eps * sech2(q.x) + 0.5 * beta2 * q.eps * q.eps * std::cos(q.x) -
               beta3 / 6.0 * q.eps * q.eps * q.eps * std::sin(q.x);
    });
    c.set_partial(Coef::drift, MultiIndex::eps(1), [](const Point& q) {
        return beta1 * std::tanh(q.x) + beta2 * q.eps * std::sin(q.x) +
               0.5 * beta3 * q.eps * q.eps * std::cos(q.x);
    });
    c.set_partial(Coef::drift, MultiIndex::x(2), [](const Point& q) {
        return -2.0 * beta1 * q.eps * sech2(q.x) * std::tanh(q.x) - 0.5 * beta2 * q.eps * q.eps * std::sin(q.x) -
               beta3 / 6.0 * q.eps * q.eps * q.eps * std::cos(q.x);
    });
    c.set_partial(Coef::drift, MultiIndex::x_eps(1, 1), [](const Point& q) {
        return beta1 * sech2(q.x) + beta2 * q.eps * std::cos(q.x) -
               0.5 * beta3 * q.eps * q.eps * std::sin(q.x);
    });
    c.set_partial(Coef::drift, MultiIndex::eps(2),
                  [](const Point& q) { return beta2 * std::sin(q.x) + beta3 * q.eps * std::cos(q.x); });

    c.set_partial(Coef::diffusion, MultiIndex::x(1), [](const Point& q) { return vol * sat_d(q.x); });
    c.set_partial(Coef::jump, MultiIndex::x(1),
                  [](const Point& q) { return jump_scale * q.mark * 0.25 * std::cos(q.x); });
    c.set_partial(Coef::terminal, MultiIndex::x(1),
                  [](const Point& q) { return q.x / std::sqrt(1.0 + q.x * q.x); });
    c.set_partial(Coef::terminal, MultiIndex::x(2),
                  [](const Point& q) { return 1.0 / std::pow(1.0 + q.x * q.x, 1.5); });

    set_driver_partial(p, 1, 0, 0, 0, [](const Point& q) { return 0.3 * q.x / std::sqrt(1.0 + q.x * q.x); });
    set_driver_partial(p, 0, 1, 0, 0,
                       [](const Point& q) { return -0.3 + 0.15 * std::sin(q.z) * sech2(q.y); });
    set_driver_partial(p, 0, 0, 1, 0,
                       [](const Point& q) { return 0.25 * std::cos(q.z) + 0.15 * std::cos(q.z) * std::tanh(q.y); });
    set_driver_partial(p, 0, 0, 0, 1, [](const Point& q) { return 0.2 * sech2(q.u); });
    set_driver_partial(p, 2, 0, 0, 0,
                       [](const Point& q) { return 0.3 / std::pow(1.0 + q.x * q.x, 1.5); });
    set_driver_partial(p, 0, 2, 0, 0,
                       [](const Point& q) { return -0.3 * std::sin(q.z) * sech2(q.y) * std::tanh(q.y); });
    set_driver_partial(p, 0, 0, 2, 0,
                       [](const Point& q) { return -0.25 * std::sin(q.z) - 0.15 * std::sin(q.z) * std::tanh(q.y); });
    set_driver_partial(p, 0, 0, 0, 2,
                       [](const Point& q) { return -0.4 * sech2(q.u) * std::tanh(q.u); });
    set_driver_partial(p, 0, 1, 1, 0, [](const Point& q) { return 0.15 * std::cos(q.z) * sech2(q.y); });
    set_driver_partial(p, 1, 1, 0, 0, [](const Point&) { return 0.0; });
    set_driver_partial(p, 1, 0, 1, 0, [](const Point&) { return 0.0; });
    set_driver_partial(p, 1, 0, 0, 1, [](const Point&) { return 0.0; });
    set_driver_partial(p, 0, 1, 0, 1, [](const Point&) { return 0.0; });
    set_driver_partial(p, 0, 0, 1, 1, [](const Point&) { return 0.0; });
    return m;
}

CatalogModel make_quadratic_driver() {
    CatalogModel m;
    m.name = "quadratic_driver";
    m.measure = DiscreteLevyMeasure({{0.6, 0.5}, {-0.45, 0.7}});

    FBSDEProblem& p = m.problem;
    p.horizon = 1.0;
    p.initial_state = 0.5;
    p.set_drift([](double, double x, double e) { return -0.4 * x + 0.2 * e * x / (1.0 + x * x); });
    p.set_diffusion([](double, double x) { return 0.35 * (0.3 + 1.0 / (1.0 + x * x)); });
    p.set_jump_coeff([](double, double x, double z) { return 0.3 * z / (1.0 + 0.2 * x * x); });
    p.set_terminal([](double x) { return std::tanh(x); });
    p.set_driver([](double, double x, double y, double z, double u) {
        return -0.2 * y + 0.3 * sat(y) + 0.25 * sat(z) + 0.2 * sat(u) + 0.1 * std::tanh(y) * std::tanh(z) +
               0.1 * std::tanh(z) * std::tanh(u) + 0.05 * std::tanh(x) * std::tanh(y);
    });
    p.jump_weight = [](double z) { return z; };

    auto& c = p.coefficients;
    c.set_partial(Coef::terminal, MultiIndex::x(1), [](const Point& q) { return sech2(q.x); });
    c.set_partial(Coef::terminal, MultiIndex::x(2),
                  [](const Point& q) { return -2.0 * sech2(q.x) * std::tanh(q.x); });

    set_driver_partial(p, 1, 0, 0, 0, [](const Point& q) { return 0.05 * sech2(q.x) * std::tanh(q.y); });
    set_driver_partial(p, 0, 1, 0, 0, [](const Point& q) {
        return -0.2 + 0.3 * sat_d(q.y) + sech2(q.y) * (0.1 * std::tanh(q.z) + 0.05 * std::tanh(q.x));
    });
    set_driver_partial(p, 0, 0, 1, 0, [](const Point& q) {
        return 0.25 * sat_d(q.z) + sech2(q.z) * (0.1 * std::tanh(q.y) + 0.1 * std::tanh(q.u));
    });
    set_driver_partial(p, 0, 0, 0, 1,
                       [](const Point& q) { return 0.2 * sat_d(q.u) + 0.1 * std::tanh(q.z) * sech2(q.u); });
    set_driver_partial(p, 2, 0, 0, 0,
                       [](const Point& q) { return -0.1 * sech2(q.x) * std::tanh(q.x) * std::tanh(q.y); });
    set_driver_partial(p, 0, 2, 0, 0, [](const Point& q) {
        return 0.3 * sat_dd(q.y) -
               2.0 * sech2(q.y) * std::tanh(q.y) * (0.1 * std::tanh(q.z) + 0.05 * std::tanh(q.x));
    });
    set_driver_partial(p, 0, 0, 2, 0, [](const Point& q) {
        return 0.25 * sat_dd(q.z) -
               2.0 * sech2(q.z) * std::tanh(q.z) * (0.1 * std::tanh(q.y) + 0.1 * std::tanh(q.u));
    });
    set_driver_partial(p, 0, 0, 0, 2, [](const Point& q) {
        return 0.2 * sat_dd(q.u) - 0.2 * std::tanh(q.z) * sech2(q.u) * std::tanh(q.u);
    });
    set_driver_partial(p, 1, 1, 0, 0, [](const Point& q) { return 0.05 * sech2(q.x) * sech2(q.y); });
    set_driver_partial(p, 0, 1, 1, 0, [](const Point& q) { return 0.1 * sech2(q.y) * sech2(q.z); });
    set_driver_partial(p, 0, 0, 1, 1, [](const Point& q) { return 0.1 * sech2(q.z) * sech2(q.u); });
    set_driver_partial(p, 1, 0, 1, 0, [](const Point&) { return 0.0; });
    set_driver_partial(p, 1, 0, 0, 1, [](const Point&) { return 0.0; });
    set_driver_partial(p, 0, 1, 0, 1, [](const Point&) { return 0.0; });
    return m;
}

CatalogModel make_intensity_demo() {
    constexpr double c1 = 0.6, c2 = 1.4;

    CatalogModel m;
    m.name = "intensity_demo";
    m.measure = DiscreteLevyMeasure({{0.6, 0.5}, {-0.4, 0.5}}); // normalized, mass 1

    // Same equilibrium design as cir_like_smooth: x0 at the drift fixed point,
    // driver centered on the terminal function, so f^[0] vanishes.
    FBSDEProblem& p = m.problem;
    p.horizon = 1.0;
    p.initial_state = 1.0;
    p.set_drift([](double, double x, double) { return 0.3 * (1.0 - x); });
    p.set_diffusion([](double, double) { return 0.3; });
    p.set_jump_coeff([](double, double x, double z) { return 0.3 * z / (1.0 + 0.1 * x * x); });
    p.set_terminal([](double x) { return std::sqrt(1.0 + x * x); });
    p.set_driver([](double, double x, double y, double, double u) {
        return -0.25 * (y - std::sqrt(1.0 + x * x)) + 0.15 * std::tanh(u);
    });
    p.jump_weight = [](double) { return 1.0; }; // rho = 1 in the intensity setting

    auto& c = p.coefficients;
    c.set_partial(Coef::drift, MultiIndex::x(1), [](const Point&) { return -0.3; });
    c.set_partial(Coef::terminal, MultiIndex::x(1),
                  [](const Point& q) { return q.x / std::sqrt(1.0 + q.x * q.x); });
    c.set_partial(Coef::terminal, MultiIndex::x(2),
                  [](const Point& q) { return 1.0 / std::pow(1.0 + q.x * q.x, 1.5); });
    set_driver_partial(p, 1, 0, 0, 0, [](const Point& q) { return 0.25 * q.x / std::sqrt(1.0 + q.x * q.x); });
    set_driver_partial(p, 2, 0, 0, 0, [](const Point& q) { return 0.25 / std::pow(1.0 + q.x * q.x, 1.5); });
    set_driver_partial(p, 0, 1, 0, 0, [](const Point&) { return -0.25; });
    set_driver_partial(p, 0, 0, 0, 1, [](const Point& q) { return 0.15 * sech2(q.u); });
    set_driver_partial(p, 0, 0, 0, 2,
                       [](const Point& q) { return -0.3 * sech2(q.u) * std::tanh(q.u); });
    set_driver_partial(p, 1, 1, 0, 0, [](const Point&) { return 0.0; });
    set_driver_partial(p, 1, 0, 1, 0, [](const Point&) { return 0.0; });
    set_driver_partial(p, 1, 0, 0, 1, [](const Point&) { return 0.0; });

    IntensitySpec spec;
    spec.c1 = c1;
    spec.c2 = c2;
    spec.lambda.push_back([](double, double x) { return c1 + (c2 - c1) / (1.0 + x * x); });
    spec.dx_lambda.push_back([](double, double x) {
        const double d = 1.0 + x * x;
        return -(c2 - c1) * 2.0 * x / (d * d);
    });
    spec.dxx_lambda.push_back([](double, double x) {
        const double d = 1.0 + x * x;
        return (c2 - c1) * (6.0 * x * x - 2.0) / (d * d * d);
    });
    m.intensity = spec;
    return m;
}

CatalogModel make_merton_smooth() {
    constexpr double strike = 0.1, eta = 0.5, rate = 0.05;

    CatalogModel m;
    m.name = "merton_smooth";
    m.is_levy = true;
    m.measure = DiscreteLevyMeasure({{-0.35, 0.6}, {0.2, 0.8}});

    ExpLevyModel levy;
    levy.additive = true;
    levy.drift = [](double) { return 0.03; };
    levy.vol = [](double) { return 0.25; };
    levy.jump_gamma = [](double, double z) { return z; };
    levy.measure = m.measure;
    levy.rho = [](double) { return 1.0; };
    levy.terminal = [](double v) { return eta * std::log1p(std::exp((v - strike) / eta)); };
    levy.terminal_derivative = [](int n) { return softplus_derivative(n, 0.0, strike, eta); };
    levy.driver = driver_linear_y(-rate);
    levy.initial_state = 0.0;
    levy.horizon = 1.0;
    m.levy = levy;
    return m;
}

CatalogModel make_gauss_jump() {
    CatalogModel m;
    m.name = "gauss_jump";
    m.is_levy = true;
    m.measure = DiscreteLevyMeasure({{1.0, 0.5}});

    ExpLevyModel levy;
    levy.additive = true;
    levy.drift = [](double) { return 0.05; };
    levy.vol = [](double) { return 0.3; };
    levy.jump_gamma = [](double, double z) { return 0.4 * z; };
    levy.measure = m.measure;
    levy.rho = [](double) { return 1.0; };
    levy.terminal = [](double v) { return std::cos(v); };
    levy.terminal_derivative = [](int n) { return std::cos(n * 1.5707963267948966); };
    levy.driver = driver_zero();
    levy.initial_state = 0.5;
    levy.horizon = 1.0;
    m.levy = levy;
    return m;
}

CatalogModel make_exp_levy() {
    constexpr double rate = 0.25;
    CatalogModel m;
    m.name = "exp_levy";
    m.is_levy = true;
    m.measure = DiscreteLevyMeasure({{0.5, 0.6}, {-0.35, 0.8}});

    ExpLevyModel levy;
    levy.additive = false;
    levy.drift = [](double) { return 0.0; };
    levy.vol = [](double) { return 0.3; };
    levy.jump_gamma = [](double, double z) { return 0.35 * z; };
    levy.measure = m.measure;
    levy.rho = [](double) { return 1.0; };
    levy.terminal = [](double v) { return v; };
    levy.terminal_derivative = [](int n) { return n == 1 ? 1.0 : 0.0; };
    levy.driver = driver_linear_y(-rate);
    levy.initial_state = 1.0;
    levy.horizon = 1.0;
    m.levy = levy;

    const double x0 = levy.initial_state;
    m.closed_form_y0 = [x0](double eps) { return eps * x0 * std::exp(-rate); }; // T = 1
    return m;
}

} // namespace

CoefficientSet driver_zero() {
    CoefficientSet c;
    c.set_base(Coef::driver, [](const Point&) { return 0.0; });
    c.set_partial_evaluator(Coef::driver, [](const MultiIndex&, const Point&) { return 0.0; });
    return c;
}

CoefficientSet driver_linear_y(double slope) {
    CoefficientSet c;
    c.set_base(Coef::driver, [slope](const Point& p) { return slope * p.y; });
    c.set_partial_evaluator(Coef::driver, [slope](const MultiIndex& mi, const Point& p) {
        if (mi.zero()) return slope * p.y;
        if (mi == MultiIndex::driver(0, 1, 0, 0)) return slope;
        return 0.0;
    });
    return c;
}

double softplus_derivative(int n, double v, double strike, double eta) {
    const double w = (v - strike) / eta;
    if (n == 0) return eta * std::log1p(std::exp(w));
    // sigmoid derivatives as polynomials in s, via s' = s - s^2
    const double s = 1.0 / (1.0 + std::exp(-w));
    std::vector<double> poly{0.0, 1.0}; // sigma itself
    for (int m = 1; m < n; ++m) {
        std::vector<double> next(poly.size() + 1, 0.0);
        for (std::size_t j = 1; j < poly.size(); ++j) {
            next[j] += poly[j] * j;      // j s^{j-1} * s
            next[j + 1] -= poly[j] * j;  // j s^{j-1} * (-s^2)
        }
        poly = std::move(next);
    }
    double val = 0.0, sp = 1.0;
    for (std::size_t j = 1; j < poly.size(); ++j) {
        sp *= s;
        val += poly[j] * sp;
    }
    return val / std::pow(eta, n - 1);
}

CatalogModel make_model(const std::string& name) {
    if (name == "linear") return make_linear();
    if (name == "cir_like_smooth") return make_cir_like();
    if (name == "quadratic_driver") return make_quadratic_driver();
    if (name == "intensity_demo") return make_intensity_demo();
    if (name == "merton_smooth") return make_merton_smooth();
    if (name == "gauss_jump") return make_gauss_jump();
    if (name == "exp_levy") return make_exp_levy();
    throw config_error("unknown model: " + name);
}

std::vector<std::string> catalog_names() {
    return {"linear", "cir_like_smooth", "quadratic_driver", "intensity_demo",
            "merton_smooth", "gauss_jump", "exp_levy"};
}

} // namespace fbsde
