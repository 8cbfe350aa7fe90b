#pragma once

#include "gridflow/model.hpp"
#include "gridflow/pmd.hpp"

namespace gridflow {

/// Bootstrap particle set; the filter owns its deterministic RNG stream.
struct ParticleSet {
    Matrix particles;  // state_dim x N
    Vector weights;    // sums to 1
    std::mt19937_64 rng;
};

ParticleSet pf_init(const StateSpaceModel& model, int n_particles, std::uint64_t seed);

/// Systematic resampling: stratified positions (u + j)/N against the
/// cumulative weights; returns N indices sorted non-decreasing.
std::vector<int> systematic_resample(const Vector& weights, double u);

/// Weighted mean and covariance of the particle set.
GaussianMoments weighted_moments(const ParticleSet& ps);

/// One bootstrap cycle: propagate with fresh process noise, weight by the
/// likelihood of z_next (angular residuals wrapped), resample
/// systematically, reset weights uniform. Throws divergence_error when all
/// likelihoods vanish.
ParticleSet pf_step(const ParticleSet& ps, const Vector& z_next,
                    const StateSpaceModel& model);

/// Sub-steps, for the harness which records the weighted estimate between
/// weighting and resampling.
void pf_propagate(ParticleSet& ps, const StateSpaceModel& model);
void pf_weight(ParticleSet& ps, const Vector& z, const StateSpaceModel& model);
void pf_resample(ParticleSet& ps);

}  // namespace gridflow
