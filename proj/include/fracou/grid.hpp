#pragma once

#include <Eigen/Core>

#include <cmath>
#include <stdexcept>

namespace fracou {

// Uniform time grid on [t0, t_max] with n_steps intervals (n_steps+1 nodes).
struct TimeGrid {
    double t0 = 0.0;
    double t_max = 1.0;
    int n_steps = 1;

    void validate() const {
        if (!std::isfinite(t0) || !std::isfinite(t_max) || t0 < 0.0)
            throw std::invalid_argument("grid: endpoints must be finite, t0 >= 0");
        if (!(t_max > t0)) throw std::invalid_argument("grid: t_max must exceed t0");
        if (n_steps < 2) throw std::invalid_argument("grid: n_steps must be >= 2");
    }

    double h() const { return (t_max - t0) / n_steps; }

    double node(int i) const { return t0 + i * h(); }

    Eigen::VectorXd nodes() const {
        return Eigen::VectorXd::LinSpaced(n_steps + 1, t0, t_max);
    }
};

// Values of a function sampled on a TimeGrid, one value per node.
template <class Scalar>
struct GridFunctionT {
    TimeGrid grid;
    Eigen::Matrix<Scalar, Eigen::Dynamic, 1> values;

    void validate() const {
        grid.validate();
        if (values.size() != grid.n_steps + 1)
            throw std::invalid_argument("grid: values must have n_steps+1 entries");
        if (!values.allFinite())
            throw std::invalid_argument("grid: values must all be finite");
    }
};

using GridFunction = GridFunctionT<double>;

}  // namespace fracou
