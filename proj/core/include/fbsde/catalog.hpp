#pragma once

#include <optional>
#include <string>
#include <vector>

#include "fbsde/jump_measure.hpp"
#include "fbsde/levy_poly.hpp"
#include "fbsde/model.hpp"

namespace fbsde {

/// A named test model. Generic models carry the FBSDE problem for the
/// order-0..2 engine; Levy models carry the polynomial-expansion form (the
/// generic problem is then derived on demand via wrap_for_reference).
struct CatalogModel {
    std::string name;
    bool is_levy = false;

    FBSDEProblem problem; // generic models only
    DiscreteLevyMeasure measure;
    std::optional<IntensitySpec> intensity;
    std::optional<ExpLevyModel> levy;

    /// Exact Y_0(eps) where a closed form exists (linear, exp_levy).
    std::optional<std::function<double(double)>> closed_form_y0;
};

CatalogModel make_model(const std::string& name);
std::vector<std::string> catalog_names();

/// Driver oracles with closed-form partials of every order, for models whose
/// expansions need high-order derivatives.
CoefficientSet driver_zero();
CoefficientSet driver_linear_y(double slope);

/// d^n/dv^n of eta*log(1 + exp((v - strike)/eta)), the mollified call payoff.
double softplus_derivative(int n, double v, double strike, double eta);

} // namespace fbsde
