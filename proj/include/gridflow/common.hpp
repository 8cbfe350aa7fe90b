#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>

namespace gridflow {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Thrown when a filter loses all probability mass (degenerate density,
/// measurement incompatible with the prior support, advection losing the
/// grid). The experiment harness catches this and flags the run.
class divergence_error : public std::runtime_error {
public:
    explicit divergence_error(const std::string& what) : std::runtime_error(what) {}
};

// splitmix64, used to derive per-run seeds from a master seed.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
    std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

/// Square-root factor L of a symmetric PSD matrix (L L^T = S), with
/// negative eigenvalues from round-off clamped to zero. Supports
/// degenerate (singular) covariances: those components get zero noise.
inline Matrix psd_sqrt(const Matrix& s) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(s);
    Vector d = es.eigenvalues().cwiseMax(0.0);
    return es.eigenvectors() * d.cwiseSqrt().asDiagonal();
}

/// Draw of a zero-mean Gaussian vector with PSD covariance factor L.
template <class Rng>
Vector gaussian_draw(Rng& rng, const Matrix& sqrt_cov) {
    std::normal_distribution<double> n01(0.0, 1.0);
    Vector z(sqrt_cov.cols());
    for (Eigen::Index i = 0; i < z.size(); ++i) z[i] = n01(rng);
    return sqrt_cov * z;
}

inline double wrap_angle(double a) {
    // wraps into (-pi, pi]
    a = std::remainder(a, 2.0 * M_PI);
    if (a <= -M_PI) a += 2.0 * M_PI;
    return a;
}

}  // namespace gridflow
