#include "gridflow/pmd.hpp"

#include <cmath>
#include <ostream>
#include <stdexcept>

namespace gridflow {

namespace {

void check_counts(const std::vector<int>& counts) {
    if (counts.empty()) throw std::invalid_argument("grid counts empty");
    for (std::size_t d = 0; d < counts.size(); ++d) {
        if (counts[d] < 3 || counts[d] % 2 == 0)
            throw std::invalid_argument("grid count for dimension " + std::to_string(d + 1) +
                                        " must be odd and >= 3, got " +
                                        std::to_string(counts[d]));
    }
}

Matrix floor_eigenvalues(const Matrix& cov, double floor) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(cov);
    Vector d = es.eigenvalues().cwiseMax(floor);
    return es.eigenvectors() * d.asDiagonal() * es.eigenvectors().transpose();
}

}  // namespace

Grid design_grid(const GaussianMoments& moments, double kappa,
                 const std::vector<int>& counts) {
    if (!(kappa > 0.0)) throw std::invalid_argument("design_grid: kappa must be > 0");
    check_counts(counts);
    const int n = static_cast<int>(counts.size());
    if (moments.mean.size() != n)
        throw std::invalid_argument("design_grid: mean/counts dimension mismatch");

    Grid g;
    g.origin.resize(n);
    g.spacing.resize(n);
    g.counts = counts;
    for (int i = 0; i < n; ++i) {
        const double var = moments.cov(i, i);
        if (!(var > 0.0))
            throw std::invalid_argument("design_grid: non-positive variance in dimension " +
                                        std::to_string(i + 1));
        const double half = kappa * std::sqrt(var);
        g.spacing[i] = 2.0 * half / (counts[i] - 1);
        // place the central point at the mean exactly
        g.origin[i] = moments.mean[i] - g.spacing[i] * ((counts[i] - 1) / 2);
    }
    return g;
}

GaussianMoments pmd_moments(const PointMassDensity& pmd) {
    const Grid& g = pmd.grid;
    const int n = g.dim();
    const double delta = g.cell_volume();
    const std::size_t total = g.size();

    Vector mean = Vector::Zero(n);
    std::vector<int> idx(n, 0);
    Vector p(n);
    auto point_at = [&](const std::vector<int>& id, Vector& out) {
        for (int d = 0; d < n; ++d) out[d] = g.origin[d] + g.spacing[d] * id[d];
    };
    for (std::size_t i = 0; i < total; ++i) {
        point_at(idx, p);
        mean += (delta * pmd.weights[i]) * p;
        for (int d = n - 1; d >= 0; --d) {
            if (++idx[d] < g.counts[d]) break;
            idx[d] = 0;
        }
    }

    Matrix cov = Matrix::Zero(n, n);
    std::fill(idx.begin(), idx.end(), 0);
    for (std::size_t i = 0; i < total; ++i) {
        point_at(idx, p);
        const Vector e = p - mean;
        cov.noalias() += (delta * pmd.weights[i]) * (e * e.transpose());
        for (int d = n - 1; d >= 0; --d) {
            if (++idx[d] < g.counts[d]) break;
            idx[d] = 0;
        }
    }
    cov = 0.5 * (cov + cov.transpose()).eval();
    const double floor = 1e-12 * std::max(1.0, cov.trace());
    return {mean, floor_eigenvalues(cov, floor)};
}

double interpolate_weight(const PointMassDensity& pmd, const Vector& query) {
    const Grid& g = pmd.grid;
    const int n = g.dim();

    // cell index and fractional offset per dimension; outside the box -> 0
    std::vector<int> base(n);
    std::vector<double> frac(n);
    for (int d = 0; d < n; ++d) {
        const double t = (query[d] - g.origin[d]) / g.spacing[d];
        if (t < 0.0 || t > static_cast<double>(g.counts[d] - 1)) return 0.0;
        int c = static_cast<int>(std::floor(t));
        if (c > g.counts[d] - 2) c = g.counts[d] - 2;  // upper boundary node
        base[d] = c;
        frac[d] = t - c;
    }

    double acc = 0.0;
    const unsigned corners = 1u << n;
    std::vector<int> idx(n);
    for (unsigned m = 0; m < corners; ++m) {
        double w = 1.0;
        for (int d = 0; d < n; ++d) {
            const bool hi = (m >> d) & 1u;
            idx[d] = base[d] + (hi ? 1 : 0);
            w *= hi ? frac[d] : (1.0 - frac[d]);
        }
        if (w != 0.0) acc += w * pmd.weights[g.flatten(idx)];
    }
    return acc;
}

std::vector<double> interpolate_weights(const PointMassDensity& pmd,
                                        const std::vector<Vector>& queries) {
    std::vector<double> out(queries.size());
    for (std::size_t i = 0; i < queries.size(); ++i)
        out[i] = interpolate_weight(pmd, queries[i]);
    return out;
}

std::vector<double> gaussian_kernel_on_grid(const Grid& grid, const Matrix& cov) {
    const int n = grid.dim();
    const double eps = 1e-12 * cov.trace() / n;
    Matrix c = cov + eps * Matrix::Identity(n, n);
    Eigen::LLT<Matrix> llt(c);
    if (llt.info() != Eigen::Success)
        throw std::invalid_argument("gaussian_kernel_on_grid: covariance is singular");
    const double log_det = 2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
    const double log_norm = -0.5 * (n * std::log(2.0 * M_PI) + log_det);

    const std::size_t total = grid.size();
    std::vector<double> k(total);
    std::vector<int> idx(n, 0);
    Vector offset(n);
    for (std::size_t i = 0; i < total; ++i) {
        for (int d = 0; d < n; ++d)
            offset[d] = grid.spacing[d] * (idx[d] - (grid.counts[d] - 1) / 2);
        const Vector y = llt.matrixL().solve(offset);
        k[i] = std::exp(log_norm - 0.5 * y.squaredNorm());
        for (int d = n - 1; d >= 0; --d) {
            if (++idx[d] < grid.counts[d]) break;
            idx[d] = 0;
        }
    }
    return k;
}

void normalize(std::vector<double>& weights, double cell_volume) {
    double sum = 0.0;
    for (double& w : weights) {
        if (w < 0.0) w = 0.0;
        sum += w;
    }
    if (!(sum > 0.0) || !std::isfinite(sum))
        throw divergence_error("normalize: degenerate density (no probability mass)");
    const double scale = 1.0 / (sum * cell_volume);
    for (double& w : weights) w *= scale;
}

PointMassDensity gaussian_pmd(const GaussianMoments& moments, double kappa,
                              const std::vector<int>& counts) {
    PointMassDensity pmd;
    pmd.grid = design_grid(moments, kappa, counts);
    pmd.weights = gaussian_kernel_on_grid(pmd.grid, moments.cov);
    normalize(pmd.weights, pmd.grid.cell_volume());
    return pmd;
}

void dump_pmd(const PointMassDensity& pmd, std::ostream& out) {
    const Grid& g = pmd.grid;
    out.precision(17);
    out << "dim " << g.dim() << "\n";
    out << "origin";
    for (int d = 0; d < g.dim(); ++d) out << ' ' << g.origin[d];
    out << "\nspacing";
    for (int d = 0; d < g.dim(); ++d) out << ' ' << g.spacing[d];
    out << "\ncounts";
    for (int c : g.counts) out << ' ' << c;
    out << "\nweights\n";
    for (double w : pmd.weights) out << w << "\n";
}

}  // namespace gridflow
