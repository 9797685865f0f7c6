#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "heatctrl/errors.hpp"

namespace heatctrl {

/// One-dimensional node set on [a, b], strictly increasing.
class GridSpec {
public:
    enum class Grading { Uniform, GeometricAtLeft };

    GridSpec() = default;
    explicit GridSpec(std::vector<double> nodes);

    /// n equally spaced nodes on [a, b], n >= 2.
    static GridSpec uniform(double a, double b, std::size_t n);

    /// Geometric refinement at the left endpoint: the first cell has width
    /// first_step, each following cell grows by `ratio` until the width
    /// reaches max_step, after which cells stay uniform up to b.
    static GridSpec geometric_at_left(double a, double b, double first_step,
                                      double ratio, double max_step);

    double a() const { return nodes_.front(); }
    double b() const { return nodes_.back(); }
    std::size_t size() const { return nodes_.size(); }
    double operator[](std::size_t i) const { return nodes_[i]; }
    const std::vector<double>& nodes() const { return nodes_; }
    Grading grading() const { return grading_; }
    bool is_uniform() const { return grading_ == Grading::Uniform; }
    double uniform_step() const { return step_; }

    bool contains(double x) const { return x >= a() && x <= b(); }

    /// Index i with nodes[i] <= x <= nodes[i+1]; clamps to the last cell at b.
    std::size_t cell_of(double x) const;

private:
    std::vector<double> nodes_;
    Grading grading_ = Grading::Uniform;
    double step_ = 0.0;

    void classify();
};

/// Function samples on a grid with an interpolation rule. Evaluation is
/// defined inside [a, b] only.
class SampledFunction {
public:
    enum class Interp { Linear, Cubic };

    SampledFunction() = default;
    SampledFunction(GridSpec grid, std::vector<double> values,
                    Interp interp = Interp::Cubic);

    static SampledFunction from_function(GridSpec grid,
                                         const std::function<double(double)>& f,
                                         Interp interp = Interp::Cubic);
    static SampledFunction zero(GridSpec grid, Interp interp = Interp::Cubic);

    double operator()(double x) const;

    const GridSpec& grid() const { return grid_; }
    const std::vector<double>& values() const { return values_; }
    std::vector<double>& values() { return values_; }
    Interp interp() const { return interp_; }
    std::size_t size() const { return values_.size(); }

    double max_abs() const;

private:
    GridSpec grid_;
    std::vector<double> values_;
    Interp interp_ = Interp::Cubic;
};

} // namespace heatctrl
