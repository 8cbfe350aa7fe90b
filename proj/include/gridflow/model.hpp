#pragma once

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "gridflow/common.hpp"

namespace gridflow {

/// Discrete-time nonlinear state-space model with additive Gaussian noises
///   x_{k+1} = f(x_k) + w_k,   w_k ~ N(0, Q)
///   z_k     = h(x_k) + v_k,   v_k ~ N(0, R)
/// The dynamics must be invertible on the working region; the inverse and
/// the Jacobian of f are part of the model contract.
struct StateSpaceModel {
    int state_dim = 0;
    int meas_dim = 0;
    std::function<Vector(const Vector&)> dynamics;
    std::function<Vector(const Vector&)> dynamics_inverse;
    std::function<Matrix(const Vector&)> dynamics_jacobian;
    std::function<Vector(const Vector&)> measurement;
    Matrix process_noise_cov;  // Q, symmetric PSD (may be singular)
    Matrix meas_noise_cov;     // R, symmetric PD
    Vector initial_mean;
    Matrix initial_cov;
    // true where a measurement component is an angle whose residual must be
    // wrapped into (-pi, pi]
    std::vector<bool> angular_meas_mask;
};

/// Model parameter overrides keyed by name; vector-valued entries hold one
/// element per component (e.g. "init_mean" -> n_x values).
using ModelParams = std::map<std::string, std::vector<double>>;

StateSpaceModel henon_model(const ModelParams& params = {});
StateSpaceModel ct5d_model(const ModelParams& params = {});

/// Scalar linear-Gaussian sanity model x' = a x + w, z = x + v.
StateSpaceModel linear1d_model(double a = 0.9, double q = 0.25, double r = 1.0);

/// Model lookup by CLI identifier ("henon", "ct5d", "linear1d").
StateSpaceModel make_model(const std::string& id, const ModelParams& params = {});

/// Central-difference Jacobian, column j = (fn(x+h e_j) - fn(x-h e_j)) / 2h.
Matrix numerical_jacobian(const std::function<Vector(const Vector&)>& fn,
                          const Vector& x, double step = 1e-6);

struct Trajectory {
    std::vector<Vector> states;        // x_0 .. x_steps
    std::vector<Vector> measurements;  // z_0 .. z_steps
};

/// Simulates steps+1 states and measurements from a deterministic stream
/// derived from seed. Singular Q is allowed (zero-variance noise components
/// are exactly zero).
Trajectory simulate_trajectory(const StateSpaceModel& model, int steps,
                               std::uint64_t seed);

}  // namespace gridflow
