#include "gridflow/lgbf.hpp"

#include <fftw3.h>

#include <cmath>
#include <complex>

namespace gridflow {

namespace {

// smallest M >= n whose prime factors are all in {2, 3, 5, 7}
int good_fft_size(int n) {
    for (int m = n;; ++m) {
        int r = m;
        for (int p : {2, 3, 5, 7})
            while (r % p == 0) r /= p;
        if (r == 1) return m;
    }
}

struct FftwBuffer {
    double* data;
    explicit FftwBuffer(std::size_t n) : data(fftw_alloc_real(n)) {
        std::fill(data, data + n, 0.0);
    }
    ~FftwBuffer() { fftw_free(data); }
    FftwBuffer(const FftwBuffer&) = delete;
    FftwBuffer& operator=(const FftwBuffer&) = delete;
};

struct FftwComplexBuffer {
    fftw_complex* data;
    explicit FftwComplexBuffer(std::size_t n) : data(fftw_alloc_complex(n)) {}
    ~FftwComplexBuffer() { fftw_free(data); }
    FftwComplexBuffer(const FftwComplexBuffer&) = delete;
    FftwComplexBuffer& operator=(const FftwComplexBuffer&) = delete;
};

// Copies an N-shaped row-major tensor into the corner of an M-shaped
// zero-initialized padded tensor.
void embed(const std::vector<double>& src, const std::vector<int>& n_shape,
           double* dst, const std::vector<int>& m_shape) {
    const int nd = static_cast<int>(n_shape.size());
    std::vector<int> idx(nd, 0);
    const std::size_t total = src.size();
    for (std::size_t i = 0; i < total; ++i) {
        std::size_t flat = 0;
        for (int d = 0; d < nd; ++d) flat = flat * m_shape[d] + idx[d];
        dst[flat] = src[i];
        for (int d = nd - 1; d >= 0; --d) {
            if (++idx[d] < n_shape[d]) break;
            idx[d] = 0;
        }
    }
}

}  // namespace

BackPropagatedGrid back_propagate(const Grid& grid_next, const StateSpaceModel& model) {
    const std::size_t total = grid_next.size();
    const double delta_next = grid_next.cell_volume();
    BackPropagatedGrid bp;
    bp.points.resize(total);
    bp.cell_volumes.resize(total);
    for (std::size_t i = 0; i < total; ++i) {
        bp.points[i] = model.dynamics_inverse(grid_next.point(i));
        const double det = std::abs(model.dynamics_jacobian(bp.points[i]).determinant());
        if (det < 1e-300)
            throw divergence_error("back_propagate: singular dynamics Jacobian on grid");
        bp.cell_volumes[i] = delta_next / det;
    }
    return bp;
}

std::vector<double> advect(const PointMassDensity& filt, const BackPropagatedGrid& bp,
                           const Grid& grid_next) {
    const std::size_t total = grid_next.size();
    if (bp.points.size() != total)
        throw std::invalid_argument("advect: back-propagated grid size mismatch");
    const double inv_delta = 1.0 / grid_next.cell_volume();

    std::vector<double> adv(total);
    double sum = 0.0;
    for (std::size_t i = 0; i < total; ++i) {
        adv[i] = interpolate_weight(filt, bp.points[i]) * bp.cell_volumes[i] * inv_delta;
        sum += adv[i];
    }
    if (!(sum > 0.0))
        throw divergence_error("advect: advection lost all mass (grids inconsistent or kappa too small)");
    normalize(adv, grid_next.cell_volume());
    return adv;
}

std::vector<double> diffuse(const std::vector<double>& adv_weights,
                            const Grid& grid_next, const Matrix& process_noise_cov) {
    const int nd = grid_next.dim();
    const std::vector<double> kernel = gaussian_kernel_on_grid(grid_next, process_noise_cov);

    // padded shape for linear convolution, rounded up to fast lengths
    std::vector<int> m_shape(nd);
    std::size_t m_total = 1;
    for (int d = 0; d < nd; ++d) {
        m_shape[d] = good_fft_size(2 * grid_next.counts[d] - 1);
        m_total *= static_cast<std::size_t>(m_shape[d]);
    }
    const std::size_t c_total = m_total / m_shape[nd - 1] * (m_shape[nd - 1] / 2 + 1);

    FftwBuffer a(m_total), b(m_total);
    embed(kernel, grid_next.counts, a.data, m_shape);
    embed(adv_weights, grid_next.counts, b.data, m_shape);

    FftwComplexBuffer fa(c_total), fb(c_total);
    fftw_plan fwd_a = fftw_plan_dft_r2c(nd, m_shape.data(), a.data, fa.data, FFTW_ESTIMATE);
    fftw_plan fwd_b = fftw_plan_dft_r2c(nd, m_shape.data(), b.data, fb.data, FFTW_ESTIMATE);
    fftw_execute(fwd_a);
    fftw_execute(fwd_b);
    fftw_destroy_plan(fwd_a);
    fftw_destroy_plan(fwd_b);

    const double scale = grid_next.cell_volume() / static_cast<double>(m_total);
    for (std::size_t i = 0; i < c_total; ++i) {
        const std::complex<double> pa(fa.data[i][0], fa.data[i][1]);
        const std::complex<double> pb(fb.data[i][0], fb.data[i][1]);
        const std::complex<double> pc = pa * pb * scale;
        fa.data[i][0] = pc.real();
        fa.data[i][1] = pc.imag();
    }

    fftw_plan bwd = fftw_plan_dft_c2r(nd, m_shape.data(), fa.data, a.data, FFTW_ESTIMATE);
    fftw_execute(bwd);
    fftw_destroy_plan(bwd);

    // extract the central block: output index n maps to full-convolution
    // index n + center so the kernel's central point lands on zero offset
    const std::size_t n_total = grid_next.size();
    std::vector<double> out(n_total);
    std::vector<int> idx(nd, 0);
    for (std::size_t i = 0; i < n_total; ++i) {
        std::size_t flat = 0;
        for (int d = 0; d < nd; ++d)
            flat = flat * m_shape[d] + idx[d] + (grid_next.counts[d] - 1) / 2;
        out[i] = a.data[flat];
        for (int d = nd - 1; d >= 0; --d) {
            if (++idx[d] < grid_next.counts[d]) break;
            idx[d] = 0;
        }
    }
    normalize(out, grid_next.cell_volume());
    return out;
}

PointMassDensity lgbf_predict(const PointMassDensity& filt, const StateSpaceModel& model,
                              double kappa, const std::vector<int>& counts) {
    const GaussianMoments fm = pmd_moments(filt);
    const GaussianMoments pm = local_predict_moments(model, fm);
    const Grid grid_next = design_grid(pm, kappa, counts);
    const BackPropagatedGrid bp = back_propagate(grid_next, model);
    const std::vector<double> adv = advect(filt, bp, grid_next);
    PointMassDensity pred;
    pred.grid = grid_next;
    pred.weights = diffuse(adv, grid_next, model.process_noise_cov);
    return pred;
}

GbfStepResult lgbf_step(const PointMassDensity& filt, const Vector& z_next,
                        const StateSpaceModel& model, double kappa,
                        const std::vector<int>& counts) {
    GbfStepResult out;
    out.pred = lgbf_predict(filt, model, kappa, counts);
    out.filt = measurement_update(out.pred, likelihood(model, out.pred.grid, z_next));
    return out;
}

}  // namespace gridflow
