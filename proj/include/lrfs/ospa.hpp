#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "lrfs/assignment.hpp"

namespace lrfs {

/// Optimal subpattern assignment distance between two position sets, with
/// order p and cutoff c.
template <typename Scalar>
Scalar ospa(const std::vector<Eigen::Vector2<Scalar>>& truth,
            const std::vector<Eigen::Vector2<Scalar>>& estimate, Scalar p, Scalar c) {
    if (!(p >= Scalar(1)) || !(c > Scalar(0)))
        throw std::invalid_argument("ospa: need p >= 1 and c > 0");
    const std::size_t m = std::min(truth.size(), estimate.size());
    const std::size_t n = std::max(truth.size(), estimate.size());
    if (n == 0) return Scalar(0);

    const auto& small = truth.size() <= estimate.size() ? truth : estimate;
    const auto& large = truth.size() <= estimate.size() ? estimate : truth;

    Scalar assigned = Scalar(0);
    if (m > 0) {
        Eigen::MatrixX<Scalar> cost(m, n);
        for (std::size_t i = 0; i < m; ++i)
            for (std::size_t j = 0; j < n; ++j)
                cost(i, j) = std::pow(std::min((small[i] - large[j]).norm(), c), p);
        // pad to square so the surplus columns stay unassigned for free
        Eigen::MatrixX<Scalar> square = Eigen::MatrixX<Scalar>::Zero(n, n);
        square.topRows(m) = cost;
        assigned = solve_lap(square).total;
    }
    const Scalar penalty = std::pow(c, p) * Scalar(n - m);
    return std::pow((assigned + penalty) / Scalar(n), Scalar(1) / p);
}

}  // namespace lrfs
