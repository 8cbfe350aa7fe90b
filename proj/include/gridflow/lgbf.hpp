#pragma once

#include "gridflow/egbf.hpp"
#include "gridflow/filters.hpp"

namespace gridflow {

/// Image of the new predictive grid under the inverse dynamics. Points are
/// stored in the multi-index order of the forward grid; each carries the
/// volume of its (parallelotope) neighbourhood.
struct BackPropagatedGrid {
    std::vector<Vector> points;        // f^{-1}(xi_{k+1}^{(i)})
    std::vector<double> cell_volumes;  // |det J_{f^{-1}}| * delta_{k+1}
};

BackPropagatedGrid back_propagate(const Grid& grid_next, const StateSpaceModel& model);

/// Advection: interpolate the filtering weights at the back-propagated
/// points, apply the per-point volume correction, normalize on the new
/// grid. Throws divergence_error if no mass survives.
std::vector<double> advect(const PointMassDensity& filt, const BackPropagatedGrid& bp,
                           const Grid& grid_next);

/// Diffusion: linear convolution of the advected weights with the process
/// noise kernel sampled on the grid, computed spectrally with zero padding
/// (no circular wrap-around); negatives from round-off are clamped and the
/// result normalized.
std::vector<double> diffuse(const std::vector<double>& adv_weights,
                            const Grid& grid_next, const Matrix& process_noise_cov);

/// The Lagrangian time update: moments, EKF moment prediction, new-grid
/// design, back-propagation, advection, diffusion.
PointMassDensity lgbf_predict(const PointMassDensity& filt, const StateSpaceModel& model,
                              double kappa, const std::vector<int>& counts);

/// One Lagrangian filter cycle (prediction + measurement update).
GbfStepResult lgbf_step(const PointMassDensity& filt, const Vector& z_next,
                        const StateSpaceModel& model, double kappa,
                        const std::vector<int>& counts);

}  // namespace gridflow
