#include "heatctrl/grid.hpp"

#include <algorithm>
#include <cmath>

namespace heatctrl {

GridSpec::GridSpec(std::vector<double> nodes) : nodes_(std::move(nodes)) {
    if (nodes_.size() < 2)
        throw GridError("grid needs at least 2 nodes");
    for (std::size_t i = 1; i < nodes_.size(); ++i)
        if (!(nodes_[i] > nodes_[i - 1]))
            throw GridError("grid nodes must be strictly increasing (index " +
                            std::to_string(i) + ")");
    classify();
}

void GridSpec::classify() {
    const double h0 = nodes_[1] - nodes_[0];
    bool uniform = true;
    for (std::size_t i = 1; i + 1 < nodes_.size(); ++i) {
        if (std::abs((nodes_[i + 1] - nodes_[i]) - h0) > 1e-12 * (1.0 + std::abs(h0))) {
            uniform = false;
            break;
        }
    }
    grading_ = uniform ? Grading::Uniform : Grading::GeometricAtLeft;
    step_ = uniform ? h0 : 0.0;
}

GridSpec GridSpec::uniform(double a, double b, std::size_t n) {
    if (n < 2)
        throw GridError("uniform grid needs n >= 2");
    if (!(b > a))
        throw GridError("uniform grid needs b > a");
    std::vector<double> nodes(n);
    const double h = (b - a) / static_cast<double>(n - 1);
    for (std::size_t i = 0; i < n; ++i)
        nodes[i] = a + h * static_cast<double>(i);
    nodes.back() = b;
    return GridSpec(std::move(nodes));
}

GridSpec GridSpec::geometric_at_left(double a, double b, double first_step,
                                     double ratio, double max_step) {
    if (!(b > a) || !(first_step > 0) || !(ratio > 1.0) || !(max_step > 0))
        throw GridError("bad geometric grid parameters");
    std::vector<double> nodes{a};
    double step = first_step;
    while (nodes.back() < b) {
        double next = nodes.back() + step;
        if (next > b - 0.25 * step) next = b;
        nodes.push_back(next);
        step = std::min(step * ratio, max_step);
    }
    GridSpec g(std::move(nodes));
    g.grading_ = Grading::GeometricAtLeft;
    return g;
}

std::size_t GridSpec::cell_of(double x) const {
    if (!contains(x))
        throw DomainError("point " + std::to_string(x) + " outside grid [" +
                          std::to_string(a()) + ", " + std::to_string(b()) + "]");
    if (grading_ == Grading::Uniform) {
        auto i = static_cast<std::size_t>((x - a()) / step_);
        return std::min(i, nodes_.size() - 2);
    }
    auto it = std::upper_bound(nodes_.begin(), nodes_.end(), x);
    std::size_t i = static_cast<std::size_t>(it - nodes_.begin());
    if (i == 0) return 0;
    return std::min(i - 1, nodes_.size() - 2);
}

SampledFunction::SampledFunction(GridSpec grid, std::vector<double> values, Interp interp)
    : grid_(std::move(grid)), values_(std::move(values)), interp_(interp) {
    if (values_.size() != grid_.size())
        throw GridError("sample count " + std::to_string(values_.size()) +
                        " does not match node count " + std::to_string(grid_.size()));
}

SampledFunction SampledFunction::from_function(GridSpec grid,
                                               const std::function<double(double)>& f,
                                               Interp interp) {
    std::vector<double> v(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i)
        v[i] = f(grid[i]);
    return SampledFunction(std::move(grid), std::move(v), interp);
}

SampledFunction SampledFunction::zero(GridSpec grid, Interp interp) {
    std::vector<double> v(grid.size(), 0.0);
    return SampledFunction(std::move(grid), std::move(v), interp);
}

double SampledFunction::operator()(double x) const {
    const std::size_t i = grid_.cell_of(x);
    const auto& xs = grid_.nodes();
    if (interp_ == Interp::Linear || values_.size() < 4) {
        const double t = (x - xs[i]) / (xs[i + 1] - xs[i]);
        return values_[i] * (1.0 - t) + values_[i + 1] * t;
    }
    // Local cubic Lagrange on the 4-node stencil around the cell.
    std::size_t s = (i == 0) ? 0 : i - 1;
    s = std::min(s, values_.size() - 4);
    double result = 0.0;
    for (std::size_t j = 0; j < 4; ++j) {
        double lj = 1.0;
        for (std::size_t m = 0; m < 4; ++m) {
            if (m == j) continue;
            lj *= (x - xs[s + m]) / (xs[s + j] - xs[s + m]);
        }
        result += values_[s + j] * lj;
    }
    return result;
}

double SampledFunction::max_abs() const {
    double m = 0.0;
    for (double v : values_)
        m = std::max(m, std::abs(v));
    return m;
}

} // namespace heatctrl
