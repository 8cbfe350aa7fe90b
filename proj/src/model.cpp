#include "gridflow/model.hpp"

#include <cmath>
#include <stdexcept>

namespace gridflow {

namespace {

double param_scalar(const ModelParams& p, const std::string& key, double def) {
    auto it = p.find(key);
    if (it == p.end()) return def;
    if (it->second.size() != 1)
        throw std::invalid_argument("model parameter '" + key + "' expects one value");
    return it->second.front();
}

Vector param_vector(const ModelParams& p, const std::string& key, const Vector& def) {
    auto it = p.find(key);
    if (it == p.end()) return def;
    if (static_cast<Eigen::Index>(it->second.size()) != def.size())
        throw std::invalid_argument("model parameter '" + key + "' expects " +
                                    std::to_string(def.size()) + " values");
    return Eigen::Map<const Vector>(it->second.data(), def.size());
}

// sin(w)/w and (1-cos(w))/w with a 4-term Taylor fallback near zero,
// continuous past |w| = 1e-6 to better than 1e-12.
double sinc_w(double w) {
    if (std::abs(w) < 1e-6) {
        const double w2 = w * w;
        return 1.0 - w2 / 6.0 + w2 * w2 / 120.0 - w2 * w2 * w2 / 5040.0;
    }
    return std::sin(w) / w;
}

double cosc_w(double w) {
    if (std::abs(w) < 1e-6) {
        const double w2 = w * w;
        return w / 2.0 - w * w2 / 24.0 + w * w2 * w2 / 720.0 - w * w2 * w2 * w2 / 40320.0;
    }
    return (1.0 - std::cos(w)) / w;
}

}  // namespace

StateSpaceModel henon_model(const ModelParams& params) {
    const double a = param_scalar(params, "a", 1.4);
    const double b = param_scalar(params, "b", 0.3);

    StateSpaceModel m;
    m.state_dim = 2;
    m.meas_dim = 1;
    m.dynamics = [a, b](const Vector& x) {
        Vector y(2);
        y[0] = 1.0 - a * x[0] * x[0] + x[1];
        y[1] = b * x[0];
        return y;
    };
    m.dynamics_inverse = [a, b](const Vector& y) {
        Vector x(2);
        x[0] = y[1] / b;
        x[1] = y[0] - 1.0 + a * (y[1] / b) * (y[1] / b);
        return x;
    };
    m.dynamics_jacobian = [a, b](const Vector& x) {
        Matrix j(2, 2);
        j << -2.0 * a * x[0], 1.0, b, 0.0;
        return j;
    };
    m.measurement = [](const Vector& x) {
        Vector z(1);
        z[0] = x[0];
        return z;
    };
    Vector q_diag = param_vector(params, "q_diag", (Vector(2) << 1e-3, 1e-5).finished());
    m.process_noise_cov = q_diag.asDiagonal();
    m.meas_noise_cov = Matrix::Constant(1, 1, param_scalar(params, "r", 0.01));
    m.initial_mean = param_vector(params, "init_mean", Vector::Zero(2));
    Vector c0 = param_vector(params, "init_cov_diag", Vector::Constant(2, 0.01));
    m.initial_cov = c0.asDiagonal();
    m.angular_meas_mask = {false};
    return m;
}

StateSpaceModel ct5d_model(const ModelParams& params) {
    StateSpaceModel m;
    m.state_dim = 5;
    m.meas_dim = 2;
    // state: (p1, v1, p2, v2, omega); sampling period absorbed into the map
    m.dynamics = [](const Vector& x) {
        const double w = x[4];
        const double sw = sinc_w(w), cw = cosc_w(w);
        const double c = std::cos(w), s = std::sin(w);
        Vector y(5);
        y[0] = x[0] + sw * x[1] - cw * x[3];
        y[1] = c * x[1] - s * x[3];
        y[2] = x[2] + cw * x[1] + sw * x[3];
        y[3] = s * x[1] + c * x[3];
        y[4] = w;
        return y;
    };
    m.dynamics_inverse = [](const Vector& y) {
        const double w = y[4];
        const double sw = sinc_w(w), cw = cosc_w(w);
        const double c = std::cos(w), s = std::sin(w);
        const double eta1 = c * y[1] + s * y[3];
        const double eta2 = -s * y[1] + c * y[3];
        Vector x(5);
        x[0] = y[0] - sw * eta1 + cw * eta2;
        x[1] = eta1;
        x[2] = y[2] - cw * eta1 - sw * eta2;
        x[3] = eta2;
        x[4] = w;
        return x;
    };
    // numerical differencing; the analytic omega column is lengthy and the
    // difference matches it to the tolerance the filters need
    m.dynamics_jacobian = [dyn = m.dynamics](const Vector& x) {
        return numerical_jacobian(dyn, x, 1e-7);
    };
    m.measurement = [](const Vector& x) {
        Vector z(2);
        z[0] = std::atan2(x[2], x[0]);
        z[1] = std::sqrt(x[0] * x[0] + x[2] * x[2]);
        return z;
    };

    // nearly-constant-velocity noise blocks with intensity q1 per axis and
    // turn-rate noise q2 (unit sampling period)
    const double q1 = param_scalar(params, "q1", 0.1);
    const double q2 = param_scalar(params, "q2", 1e-6);
    Matrix q = Matrix::Zero(5, 5);
    Matrix cv(2, 2);
    cv << 1.0 / 3.0, 0.5, 0.5, 1.0;
    q.block<2, 2>(0, 0) = q1 * cv;
    q.block<2, 2>(2, 2) = q1 * cv;
    q(4, 4) = q2;
    m.process_noise_cov = q;

    Matrix r = Matrix::Zero(2, 2);
    r(0, 0) = param_scalar(params, "bearing_var", 4e-4);
    r(1, 1) = param_scalar(params, "range_var", 100.0);
    m.meas_noise_cov = r;

    m.initial_mean = param_vector(
        params, "init_mean", (Vector(5) << 1000.0, 30.0, 1000.0, 0.0, 0.1).finished());
    Vector c0 = param_vector(params, "init_cov_diag",
                             (Vector(5) << 100.0, 25.0, 100.0, 25.0, 1e-4).finished());
    m.initial_cov = c0.asDiagonal();
    m.angular_meas_mask = {true, false};
    return m;
}

StateSpaceModel linear1d_model(double a, double q, double r) {
    StateSpaceModel m;
    m.state_dim = 1;
    m.meas_dim = 1;
    m.dynamics = [a](const Vector& x) { return Vector(a * x); };
    m.dynamics_inverse = [a](const Vector& y) { return Vector(y / a); };
    m.dynamics_jacobian = [a](const Vector&) { return Matrix::Constant(1, 1, a); };
    m.measurement = [](const Vector& x) { return x; };
    m.process_noise_cov = Matrix::Constant(1, 1, q);
    m.meas_noise_cov = Matrix::Constant(1, 1, r);
    m.initial_mean = Vector::Zero(1);
    m.initial_cov = Matrix::Constant(1, 1, 1.0);
    m.angular_meas_mask = {false};
    return m;
}

StateSpaceModel make_model(const std::string& id, const ModelParams& params) {
    if (id == "henon") return henon_model(params);
    if (id == "ct5d") return ct5d_model(params);
    if (id == "linear1d") return linear1d_model();
    throw std::invalid_argument("unknown model id '" + id + "'");
}

Matrix numerical_jacobian(const std::function<Vector(const Vector&)>& fn,
                          const Vector& x, double step) {
    if (!(step > 0.0)) throw std::invalid_argument("numerical_jacobian: step must be > 0");
    Vector xp = x, xm = x;
    xp[0] += step;
    const Eigen::Index rows = fn(x).size();
    Matrix j(rows, x.size());
    for (Eigen::Index c = 0; c < x.size(); ++c) {
        xp = x;
        xm = x;
        xp[c] += step;
        xm[c] -= step;
        j.col(c) = (fn(xp) - fn(xm)) / (2.0 * step);
    }
    return j;
}

Trajectory simulate_trajectory(const StateSpaceModel& model, int steps,
                               std::uint64_t seed) {
    if (steps < 1) throw std::invalid_argument("simulate_trajectory: steps must be >= 1");
    std::mt19937_64 rng(mix_seed(seed, 0));
    const Matrix sq_init = psd_sqrt(model.initial_cov);
    const Matrix sq_q = psd_sqrt(model.process_noise_cov);
    const Matrix sq_r = psd_sqrt(model.meas_noise_cov);

    Trajectory t;
    t.states.reserve(steps + 1);
    t.measurements.reserve(steps + 1);
    Vector x = model.initial_mean + gaussian_draw(rng, sq_init);
    t.states.push_back(x);
    t.measurements.push_back(model.measurement(x) + gaussian_draw(rng, sq_r));
    for (int k = 0; k < steps; ++k) {
        x = model.dynamics(x) + gaussian_draw(rng, sq_q);
        t.states.push_back(x);
        t.measurements.push_back(model.measurement(x) + gaussian_draw(rng, sq_r));
    }
    return t;
}

}  // namespace gridflow
