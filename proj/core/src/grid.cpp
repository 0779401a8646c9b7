#include "fbsde/grid.hpp"

namespace fbsde {

void GridFunction::write_csv(std::ostream& os, const std::vector<std::string>& labels) const {
    os << "s";
    for (int c = 0; c < dim_; ++c) {
        if (static_cast<std::size_t>(c) < labels.size())
            os << "," << labels[c];
        else
            os << ",c" << c;
    }
    os << "\n";
    for (int i = 0; i < n_nodes(); ++i) {
        os << format_g17(grid_.node(i));
        for (int c = 0; c < dim_; ++c)
            os << "," << format_g17(at(i, c));
        os << "\n";
    }
}

void write_csv_columns(std::ostream& os, const TimeGrid& grid,
                       const std::vector<const GridFunction*>& columns,
                       const std::vector<std::string>& labels) {
    os << "s";
    for (const auto& l : labels) os << "," << l;
    os << "\n";
    for (int i = 0; i < grid.n_nodes(); ++i) {
        os << format_g17(grid.node(i));
        for (const auto* g : columns) {
            for (int c = 0; c < g->dim(); ++c)
                os << "," << format_g17(g->at(i, c));
        }
        os << "\n";
    }
}

} // namespace fbsde
