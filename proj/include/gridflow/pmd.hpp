#pragma once

#include <cstddef>
#include <iosfwd>
#include <vector>

#include "gridflow/common.hpp"

namespace gridflow {

/// Axis-aligned equidistant lattice. Point counts are odd per dimension so
/// the central lattice point coincides with the grid mean point. Weights
/// attached to a Grid are stored row-major: the last dimension varies
/// fastest in the flat index.
struct Grid {
    Vector origin;            // coordinate of lattice point (0,...,0)
    Vector spacing;           // per-dimension step, > 0
    std::vector<int> counts;  // odd, >= 3

    int dim() const { return static_cast<int>(counts.size()); }

    std::size_t size() const {
        std::size_t n = 1;
        for (int c : counts) n *= static_cast<std::size_t>(c);
        return n;
    }

    double cell_volume() const { return spacing.prod(); }

    void unflatten(std::size_t flat, std::vector<int>& idx) const {
        idx.resize(counts.size());
        for (int d = dim() - 1; d >= 0; --d) {
            idx[d] = static_cast<int>(flat % counts[d]);
            flat /= counts[d];
        }
    }

    std::size_t flatten(const std::vector<int>& idx) const {
        std::size_t flat = 0;
        for (int d = 0; d < dim(); ++d) flat = flat * counts[d] + idx[d];
        return flat;
    }

    Vector point(std::size_t flat) const {
        Vector p(dim());
        for (int d = dim() - 1; d >= 0; --d) {
            p[d] = origin[d] + spacing[d] * static_cast<double>(flat % counts[d]);
            flat /= counts[d];
        }
        return p;
    }

    /// Central lattice point (equals the design mean for odd counts).
    Vector center() const {
        Vector p(dim());
        for (int d = 0; d < dim(); ++d)
            p[d] = origin[d] + spacing[d] * ((counts[d] - 1) / 2);
        return p;
    }
};

/// Piecewise-constant density: weight per lattice point, normalized so that
/// sum(weights) * cell_volume = 1.
struct PointMassDensity {
    Grid grid;
    std::vector<double> weights;  // size grid.size(), row-major
};

struct GaussianMoments {
    Vector mean;
    Matrix cov;
};

/// Moment-based grid design: per dimension i the N_i points equidistantly
/// span [mean_i - kappa*sqrt(cov(i,i)), mean_i + kappa*sqrt(cov(i,i))],
/// endpoints included; the central point equals the mean exactly.
Grid design_grid(const GaussianMoments& moments, double kappa,
                 const std::vector<int>& counts);

/// Mean and covariance of a normalized PMD (midpoint-rule sums). The
/// covariance is symmetrized and eigenvalue-floored at 1e-12*max(1, trace).
GaussianMoments pmd_moments(const PointMassDensity& pmd);

/// Multilinear interpolation of the weight tensor; queries outside the
/// grid's bounding box return exactly 0.
double interpolate_weight(const PointMassDensity& pmd, const Vector& query);
std::vector<double> interpolate_weights(const PointMassDensity& pmd,
                                        const std::vector<Vector>& queries);

/// Zero-mean Gaussian density N(xi - xi_center; 0, cov) evaluated at every
/// lattice point; cov is regularized with eps*I, eps = 1e-12*trace/n, and
/// must be positive definite afterwards.
std::vector<double> gaussian_kernel_on_grid(const Grid& grid, const Matrix& cov);

/// In-place: clamps negative entries (spectral round-off) to zero and
/// rescales so sum * cell_volume = 1. Throws divergence_error when no mass
/// is left.
void normalize(std::vector<double>& weights, double cell_volume);

/// PMD sampled from a Gaussian density on a moment-designed grid
/// (initializes the grid filters from p(x0)).
PointMassDensity gaussian_pmd(const GaussianMoments& moments, double kappa,
                              const std::vector<int>& counts);

/// Text dump: grid header followed by the weight tensor in row-major
/// multi-index order.
void dump_pmd(const PointMassDensity& pmd, std::ostream& out);

}  // namespace gridflow
