#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "fbsde/errors.hpp"

namespace fbsde {

/// Uniform grid on [t0, t1] with n_steps intervals, n_steps + 1 nodes.
class TimeGrid {
public:
    TimeGrid(double t0, double t1, int n_steps)
        : t0_(t0), t1_(t1), n_steps_(n_steps) {
        if (!(t1 > t0)) throw config_error("TimeGrid: t1 must exceed t0");
        if (n_steps < 1) throw config_error("TimeGrid: n_steps must be >= 1");
        dt_ = (t1 - t0) / n_steps;
    }

    double t0() const { return t0_; }
    double t1() const { return t1_; }
    double dt() const { return dt_; }
    int n_steps() const { return n_steps_; }
    int n_nodes() const { return n_steps_ + 1; }
    double node(int i) const { return (i == n_steps_) ? t1_ : t0_ + i * dt_; }

    /// Index of the last node at or before s (clamped to [0, n_steps]).
    int floor_index(double s) const {
        int i = static_cast<int>(std::floor((s - t0_) / dt_));
        return std::clamp(i, 0, n_steps_);
    }

    bool operator==(const TimeGrid& o) const {
        return t0_ == o.t0_ && t1_ == o.t1_ && n_steps_ == o.n_steps_;
    }

private:
    double t0_, t1_;
    int n_steps_;
    double dt_;
};

/// Values of an R^dim-valued function tabulated at the nodes of a TimeGrid.
class GridFunction {
public:
    explicit GridFunction(const TimeGrid& grid, int dim = 1)
        : grid_(grid), dim_(dim), values_(static_cast<std::size_t>(grid.n_nodes()) * dim, 0.0) {
        if (dim < 1) throw config_error("GridFunction: dim must be >= 1");
    }

    static GridFunction constant(const TimeGrid& grid, double value) {
        GridFunction g(grid);
        std::fill(g.values_.begin(), g.values_.end(), value);
        return g;
    }

    const TimeGrid& grid() const { return grid_; }
    int dim() const { return dim_; }
    int n_nodes() const { return grid_.n_nodes(); }

    double operator()(int node) const { return values_[static_cast<std::size_t>(node) * dim_]; }
    double& operator()(int node) { return values_[static_cast<std::size_t>(node) * dim_]; }
    double at(int node, int comp) const { return values_[static_cast<std::size_t>(node) * dim_ + comp]; }
    double& at(int node, int comp) { return values_[static_cast<std::size_t>(node) * dim_ + comp]; }

    std::span<const double> node_values(int node) const {
        return {values_.data() + static_cast<std::size_t>(node) * dim_, static_cast<std::size_t>(dim_)};
    }
    std::span<double> node_values(int node) {
        return {values_.data() + static_cast<std::size_t>(node) * dim_, static_cast<std::size_t>(dim_)};
    }

    double initial(int comp = 0) const { return at(0, comp); }
    double terminal(int comp = 0) const { return at(grid_.n_steps(), comp); }

    /// Piecewise-linear interpolation, clamped at the ends.
    double interpolate(double s, int comp = 0) const {
        if (s <= grid_.t0()) return at(0, comp);
        if (s >= grid_.t1()) return terminal(comp);
        const int i = std::min(grid_.floor_index(s), grid_.n_steps() - 1);
        const double w = (s - grid_.node(i)) / grid_.dt();
        return (1.0 - w) * at(i, comp) + w * at(i + 1, comp);
    }

    void check_finite(const char* what) const {
        for (int i = 0; i < n_nodes(); ++i)
            for (int c = 0; c < dim_; ++c)
                if (!std::isfinite(at(i, c)))
                    throw numeric_error(std::string(what) + ": non-finite value at node " + std::to_string(i));
    }

    /// CSV: column 1 is s, columns 2+ are the components.
    void write_csv(std::ostream& os, const std::vector<std::string>& labels = {}) const;

private:
    TimeGrid grid_;
    int dim_;
    std::vector<double> values_;
};

/// Round-trip-exact decimal formatting shared by all CSV writers.
inline std::string format_g17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

/// Several same-grid functions side by side, one column each.
void write_csv_columns(std::ostream& os, const TimeGrid& grid,
                       const std::vector<const GridFunction*>& columns,
                       const std::vector<std::string>& labels);

} // namespace fbsde
