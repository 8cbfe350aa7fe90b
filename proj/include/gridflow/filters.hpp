#pragma once

#include "gridflow/model.hpp"
#include "gridflow/pmd.hpp"

namespace gridflow {

/// p(z | x = xi) per lattice point, same tensor layout as the grid.
struct LikelihoodField {
    std::vector<double> values;
};

/// Gaussian measurement likelihood N(z - h(xi); 0, R) at every lattice
/// point; residual components flagged angular in the model are wrapped into
/// (-pi, pi] before evaluation.
LikelihoodField likelihood(const StateSpaceModel& model, const Grid& grid,
                           const Vector& z);

/// Bayes rule on the grid: elementwise product with the prior, then
/// normalization. Throws divergence_error when the product is all zero.
PointMassDensity measurement_update(const PointMassDensity& prior,
                                    const LikelihoodField& field);

/// EKF-style moment prediction used for new-grid placement:
/// mean' = f(mean), cov' = J cov J^T + Q (symmetrized).
GaussianMoments local_predict_moments(const StateSpaceModel& model,
                                      const GaussianMoments& filt);

}  // namespace gridflow
