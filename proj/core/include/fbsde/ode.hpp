#pragma once

#include <functional>
#include <span>

#include "fbsde/grid.hpp"

namespace fbsde {

/// Right-hand side of a first-order system. For integrate_forward the
/// callback fills dv = dv/ds; for integrate_terminal it fills dv = -dv/ds
/// (the natural orientation of a terminal-value problem).
using OdeRhs = std::function<void(double s, std::span<const double> v, std::span<double> dv)>;

/// Scalar convenience form.
using ScalarOdeRhs = std::function<double(double s, double v)>;

/// Classical fixed-step RK4 from grid.t0() to grid.t1(); v(t0) = v0 exactly.
/// Throws numeric_error naming the node where the state stops being finite.
GridFunction integrate_forward(const OdeRhs& rhs, std::span<const double> v0, const TimeGrid& grid);
GridFunction integrate_forward(const ScalarOdeRhs& rhs, double v0, const TimeGrid& grid);

/// RK4 on the time-reversed system from grid.t1() down to grid.t0();
/// v(t1) = vT exactly (assigned, not integrated).
GridFunction integrate_terminal(const OdeRhs& rhs, std::span<const double> vT, const TimeGrid& grid);
GridFunction integrate_terminal(const ScalarOdeRhs& rhs, double vT, const TimeGrid& grid);

} // namespace fbsde
