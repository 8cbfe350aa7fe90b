#include "gridflow/pf.hpp"

#include <cmath>
#include <numeric>

namespace gridflow {

ParticleSet pf_init(const StateSpaceModel& model, int n_particles, std::uint64_t seed) {
    if (n_particles < 1) throw std::invalid_argument("pf_init: n_particles must be >= 1");
    ParticleSet ps;
    ps.rng.seed(mix_seed(seed, 0x7066ULL));
    ps.particles.resize(model.state_dim, n_particles);
    const Matrix sq = psd_sqrt(model.initial_cov);
    for (int i = 0; i < n_particles; ++i)
        ps.particles.col(i) = model.initial_mean + gaussian_draw(ps.rng, sq);
    ps.weights = Vector::Constant(n_particles, 1.0 / n_particles);
    return ps;
}

std::vector<int> systematic_resample(const Vector& weights, double u) {
    const int n = static_cast<int>(weights.size());
    std::vector<int> idx(n);
    double cum = weights[0];
    int i = 0;
    for (int j = 0; j < n; ++j) {
        const double pos = (u + j) / n;
        // a position exactly on a boundary belongs to the next stratum
        while (pos >= cum && i < n - 1) cum += weights[++i];
        idx[j] = i;
    }
    return idx;
}

GaussianMoments weighted_moments(const ParticleSet& ps) {
    const Vector mean = ps.particles * ps.weights;
    const Matrix centered = ps.particles.colwise() - mean;
    Matrix cov = centered * ps.weights.asDiagonal() * centered.transpose();
    cov = 0.5 * (cov + cov.transpose()).eval();
    return {mean, cov};
}

void pf_propagate(ParticleSet& ps, const StateSpaceModel& model) {
    const Matrix sq = psd_sqrt(model.process_noise_cov);
    for (int i = 0; i < ps.particles.cols(); ++i)
        ps.particles.col(i) = model.dynamics(ps.particles.col(i)) + gaussian_draw(ps.rng, sq);
}

void pf_weight(ParticleSet& ps, const Vector& z, const StateSpaceModel& model) {
    const int nz = model.meas_dim;
    Eigen::LLT<Matrix> llt(model.meas_noise_cov);
    const int n = static_cast<int>(ps.particles.cols());
    for (int i = 0; i < n; ++i) {
        Vector r = z - model.measurement(ps.particles.col(i));
        for (int c = 0; c < nz; ++c)
            if (model.angular_meas_mask[c]) r[c] = wrap_angle(r[c]);
        const Vector y = llt.matrixL().solve(r);
        ps.weights[i] *= std::exp(-0.5 * y.squaredNorm());
    }
    const double sum = ps.weights.sum();
    if (!(sum > 0.0))
        throw divergence_error("pf_weight: all particle likelihoods vanished");
    ps.weights /= sum;
}

void pf_resample(ParticleSet& ps) {
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    const std::vector<int> idx = systematic_resample(ps.weights, u01(ps.rng));
    const Matrix old = ps.particles;
    for (std::size_t j = 0; j < idx.size(); ++j) ps.particles.col(j) = old.col(idx[j]);
    ps.weights.setConstant(1.0 / static_cast<double>(idx.size()));
}

ParticleSet pf_step(const ParticleSet& ps, const Vector& z_next,
                    const StateSpaceModel& model) {
    ParticleSet next = ps;
    pf_propagate(next, model);
    pf_weight(next, z_next, model);
    pf_resample(next);
    return next;
}

}  // namespace gridflow
