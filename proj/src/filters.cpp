#include "gridflow/filters.hpp"

#include <cmath>

namespace gridflow {

LikelihoodField likelihood(const StateSpaceModel& model, const Grid& grid,
                           const Vector& z) {
    const int nz = model.meas_dim;
    Eigen::LLT<Matrix> llt(model.meas_noise_cov);
    if (llt.info() != Eigen::Success)
        throw std::invalid_argument("likelihood: measurement noise covariance not PD");
    const double log_det = 2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
    const double log_norm = -0.5 * (nz * std::log(2.0 * M_PI) + log_det);

    const std::size_t total = grid.size();
    LikelihoodField field;
    field.values.resize(total);
    for (std::size_t i = 0; i < total; ++i) {
        Vector r = z - model.measurement(grid.point(i));
        for (int c = 0; c < nz; ++c)
            if (model.angular_meas_mask[c]) r[c] = wrap_angle(r[c]);
        const Vector y = llt.matrixL().solve(r);
        field.values[i] = std::exp(log_norm - 0.5 * y.squaredNorm());
    }
    return field;
}

PointMassDensity measurement_update(const PointMassDensity& prior,
                                    const LikelihoodField& field) {
    if (field.values.size() != prior.weights.size())
        throw std::invalid_argument("measurement_update: field/prior shape mismatch");
    PointMassDensity post;
    post.grid = prior.grid;
    post.weights.resize(prior.weights.size());
    for (std::size_t i = 0; i < prior.weights.size(); ++i)
        post.weights[i] = prior.weights[i] * field.values[i];
    double sum = 0.0;
    for (double w : post.weights) sum += w;
    if (!(sum > 0.0))
        throw divergence_error("measurement_update: measurement incompatible with prior support");
    normalize(post.weights, post.grid.cell_volume());
    return post;
}

GaussianMoments local_predict_moments(const StateSpaceModel& model,
                                      const GaussianMoments& filt) {
    const Matrix j = model.dynamics_jacobian(filt.mean);
    Matrix cov = j * filt.cov * j.transpose() + model.process_noise_cov;
    cov = 0.5 * (cov + cov.transpose()).eval();
    return {model.dynamics(filt.mean), cov};
}

}  // namespace gridflow
