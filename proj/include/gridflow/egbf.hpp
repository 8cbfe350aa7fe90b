#pragma once

#include "gridflow/filters.hpp"

namespace gridflow {

/// Chapman-Kolmogorov prediction by direct summation over all grid-point
/// pairs, O(N^2): P'(xi_j) = sum_i p_w(xi_j - f(xi_i)) P(xi_i) delta.
PointMassDensity egbf_predict(const PointMassDensity& filt, const Grid& new_grid,
                              const StateSpaceModel& model);

struct GbfStepResult {
    PointMassDensity pred;
    PointMassDensity filt;
};

/// One Eulerian filter cycle: moments of the filtering PMD, EKF moment
/// prediction, new-grid design, O(N^2) prediction, measurement update.
GbfStepResult egbf_step(const PointMassDensity& filt, const Vector& z_next,
                        const StateSpaceModel& model, double kappa,
                        const std::vector<int>& counts);

}  // namespace gridflow
