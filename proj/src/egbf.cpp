#include "gridflow/egbf.hpp"

#include <cmath>

namespace gridflow {

PointMassDensity egbf_predict(const PointMassDensity& filt, const Grid& new_grid,
                              const StateSpaceModel& model) {
    const int n = model.state_dim;
    const Matrix& q = model.process_noise_cov;
    const double eps = 1e-12 * q.trace() / n;
    Eigen::LLT<Matrix> llt(Matrix(q + eps * Matrix::Identity(n, n)));
    if (llt.info() != Eigen::Success)
        throw std::invalid_argument("egbf_predict: process noise covariance is singular");
    const double log_det = 2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
    const double log_norm = -0.5 * (n * std::log(2.0 * M_PI) + log_det);
    const Matrix prec = llt.solve(Matrix::Identity(n, n));

    const std::size_t n_old = filt.grid.size();
    const std::size_t n_new = new_grid.size();
    const double delta_old = filt.grid.cell_volume();

    // propagated old points and pre-scaled weights
    Matrix fx(n, n_old);
    Vector wdelta(n_old);
    for (std::size_t i = 0; i < n_old; ++i) {
        fx.col(i) = model.dynamics(filt.grid.point(i));
        wdelta[i] = filt.weights[i] * delta_old;
    }

    PointMassDensity pred;
    pred.grid = new_grid;
    pred.weights.resize(n_new);
    Vector r(n);
    for (std::size_t j = 0; j < n_new; ++j) {
        const Vector xi = new_grid.point(j);
        double acc = 0.0;
        for (std::size_t i = 0; i < n_old; ++i) {
            r = xi - fx.col(i);
            acc += wdelta[i] * std::exp(log_norm - 0.5 * r.dot(prec * r));
        }
        pred.weights[j] = acc;
    }
    normalize(pred.weights, new_grid.cell_volume());
    return pred;
}

GbfStepResult egbf_step(const PointMassDensity& filt, const Vector& z_next,
                        const StateSpaceModel& model, double kappa,
                        const std::vector<int>& counts) {
    const GaussianMoments fm = pmd_moments(filt);
    const GaussianMoments pm = local_predict_moments(model, fm);
    const Grid new_grid = design_grid(pm, kappa, counts);
    GbfStepResult out;
    out.pred = egbf_predict(filt, new_grid, model);
    out.filt = measurement_update(out.pred, likelihood(model, new_grid, z_next));
    return out;
}

}  // namespace gridflow
