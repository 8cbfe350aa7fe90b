#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "gridflow/pmd.hpp"

using namespace gridflow;

namespace {

GaussianMoments std_normal(int n) {
    return {Vector::Zero(n), Matrix::Identity(n, n)};
}

}  // namespace

TEST_CASE("design_grid pinned examples") {
    Grid g = design_grid(std_normal(2), 5.0, {5, 5});
    for (int d = 0; d < 2; ++d) {
        CHECK(g.spacing[d] == doctest::Approx(2.5).epsilon(1e-15));
        CHECK(g.origin[d] == doctest::Approx(-5.0).epsilon(1e-15));
    }
    CHECK(g.cell_volume() == doctest::Approx(6.25).epsilon(1e-15));
    CHECK(g.center().isApprox(Vector::Zero(2), 1e-15));
    // per-dimension lattice {-5,-2.5,0,2.5,5}
    std::vector<double> expect = {-5, -2.5, 0, 2.5, 5};
    for (int i = 0; i < 5; ++i)
        CHECK(g.point(g.flatten({i, 0}))[0] == doctest::Approx(expect[i]).epsilon(1e-15));

    GaussianMoments m1{(Vector(1) << 3).finished(), (Matrix(1, 1) << 4).finished()};
    Grid g1 = design_grid(m1, 5.0, {3});
    CHECK(g1.point(0)[0] == doctest::Approx(-7.0));
    CHECK(g1.point(1)[0] == doctest::Approx(3.0));
    CHECK(g1.point(2)[0] == doctest::Approx(13.0));
}

TEST_CASE("design_grid rejects degenerate variance and bad counts") {
    GaussianMoments degen{Vector::Zero(1), (Matrix(1, 1) << 1e-12).finished()};
    degen.cov(0, 0) = 0.0;
    CHECK_THROWS_WITH_AS(design_grid(degen, 5.0, {3}),
                         doctest::Contains("dimension 1"), std::invalid_argument);
    CHECK_THROWS_AS(design_grid(std_normal(2), 5.0, {4, 5}), std::invalid_argument);
    CHECK_THROWS_AS(design_grid(std_normal(2), 5.0, {1, 5}), std::invalid_argument);
    CHECK_THROWS_AS(design_grid(std_normal(2), 0.0, {5, 5}), std::invalid_argument);
}

TEST_CASE("grid flatten/unflatten round trip, last dim fastest") {
    Grid g = design_grid(std_normal(3), 2.0, {3, 5, 7});
    CHECK(g.size() == 105);
    CHECK(g.flatten({0, 0, 1}) == 1);  // last dimension varies fastest
    CHECK(g.flatten({0, 1, 0}) == 7);
    CHECK(g.flatten({1, 0, 0}) == 35);
    std::vector<int> idx;
    for (std::size_t f = 0; f < g.size(); ++f) {
        g.unflatten(f, idx);
        CHECK(g.flatten(idx) == f);
    }
}

TEST_CASE("pmd_moments uniform and degenerate densities") {
    Grid g = design_grid(std_normal(2), 5.0, {5, 5});
    PointMassDensity pmd{g, std::vector<double>(g.size(), 1.0)};
    normalize(pmd.weights, g.cell_volume());
    GaussianMoments m = pmd_moments(pmd);
    CHECK((m.mean - g.center()).norm() <= 1e-12);

    // all mass on one lattice point -> mean = that point, cov at the floor
    PointMassDensity delta{g, std::vector<double>(g.size(), 0.0)};
    const std::size_t j = g.flatten({1, 3});
    delta.weights[j] = 1.0 / g.cell_volume();
    GaussianMoments md = pmd_moments(delta);
    CHECK(md.mean.isApprox(g.point(j), 1e-12));
    const double floor = 1e-12 * std::max(1.0, md.cov.trace());
    Eigen::SelfAdjointEigenSolver<Matrix> es(md.cov);
    CHECK(es.eigenvalues().minCoeff() >= 0.99 * floor);
    CHECK(es.eigenvalues().maxCoeff() <= 1e-10);
}

TEST_CASE("pmd_moments Riemann-sum oracle on a dense Gaussian grid") {
    // kappa=6, 101x101: lattice sums of the true N(0,I) density recover the
    // analytic moments within quadrature error
    GaussianMoments truth = std_normal(2);
    PointMassDensity pmd = gaussian_pmd(truth, 6.0, {101, 101});
    GaussianMoments m = pmd_moments(pmd);
    CHECK(m.mean.norm() <= 0.5 * pmd.grid.spacing.minCoeff());
    CHECK((m.cov - truth.cov).cwiseAbs().maxCoeff() <= 0.02);

    GaussianMoments skew{(Vector(2) << 1.0, -2.0).finished(),
                         (Matrix(2, 2) << 2.0, 0.6, 0.6, 0.5).finished()};
    PointMassDensity pmd2 = gaussian_pmd(skew, 6.0, {101, 101});
    GaussianMoments m2 = pmd_moments(pmd2);
    CHECK((m2.mean - skew.mean).norm() <= 0.01);
    CHECK((m2.cov - skew.cov).cwiseAbs().maxCoeff() <= 0.02 * skew.cov.norm());
}

TEST_CASE("interpolation reproduces nodes, midpoints, and support") {
    GaussianMoments m1{(Vector(1) << 0).finished(), (Matrix(1, 1) << 1).finished()};
    Grid g = design_grid(m1, 2.0, {5});
    PointMassDensity pmd{g, {0.1, 0.2, 0.4, 0.3, 0.05}};

    for (std::size_t i = 0; i < g.size(); ++i)
        CHECK(interpolate_weight(pmd, g.point(i)) == doctest::Approx(pmd.weights[i]));

    Vector mid = 0.5 * (g.point(0) + g.point(1));
    CHECK(interpolate_weight(pmd, mid) == doctest::Approx(0.15).epsilon(1e-14));

    Vector outside = g.point(4);
    outside[0] += 0.5 * g.spacing[0];
    CHECK(interpolate_weight(pmd, outside) == 0.0);
    outside[0] = g.origin[0] - 1e-9;
    CHECK(interpolate_weight(pmd, outside) == 0.0);
}

TEST_CASE("multilinear interpolation is exact for affine weight fields") {
    Grid g = design_grid(std_normal(2), 3.0, {7, 9});
    PointMassDensity pmd{g, std::vector<double>(g.size())};
    auto affine = [](const Vector& x) { return 2.0 + 0.7 * x[0] - 1.3 * x[1]; };
    for (std::size_t i = 0; i < g.size(); ++i) pmd.weights[i] = affine(g.point(i));

    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<Vector> queries;
    for (int t = 0; t < 200; ++t) {
        Vector q(2);
        for (int d = 0; d < 2; ++d)
            q[d] = g.origin[d] + u(rng) * g.spacing[d] * (g.counts[d] - 1);
        queries.push_back(q);
    }
    const std::vector<double> vals = interpolate_weights(pmd, queries);
    for (int t = 0; t < 200; ++t)
        CHECK(vals[t] == doctest::Approx(affine(queries[t])).epsilon(1e-12));
}

TEST_CASE("gaussian_kernel_on_grid peak, symmetry, and Riemann sum") {
    Matrix cov = (Matrix(2, 2) << 0.5, 0.1, 0.1, 0.3).finished();
    Grid g = design_grid({Vector::Zero(2), cov}, 6.5, {31, 31});
    std::vector<double> k = gaussian_kernel_on_grid(g, cov);

    const std::size_t c = g.flatten({15, 15});
    const double peak = 1.0 / (2.0 * M_PI * std::sqrt(cov.determinant()));
    CHECK(k[c] == doctest::Approx(peak).epsilon(1e-9));

    // point symmetry about the center: K[m] = K[2c - m]
    std::vector<int> idx;
    for (std::size_t f = 0; f < g.size(); ++f) {
        g.unflatten(f, idx);
        std::vector<int> mirror = {30 - idx[0], 30 - idx[1]};
        CHECK(k[f] == doctest::Approx(k[g.flatten(mirror)]).epsilon(1e-12));
    }

    // grid spans 13 sigma per dimension -> Riemann sum within 1e-6 of 1
    double sum = 0.0;
    for (double v : k) sum += v;
    CHECK(sum * g.cell_volume() == doctest::Approx(1.0).epsilon(1e-6));

    CHECK_THROWS_AS(gaussian_kernel_on_grid(g, Matrix::Zero(2, 2)), std::invalid_argument);
}

TEST_CASE("normalize clamps, rescales, rejects zero mass, idempotent") {
    std::vector<double> w = {1.0, 2.0, 1.0};  // delta = 0.5, sum*delta = 2
    normalize(w, 0.5);
    CHECK(w[0] == doctest::Approx(0.5));
    CHECK(w[1] == doctest::Approx(1.0));

    std::vector<double> neg = {1.0, -1e-17, 1.0};
    normalize(neg, 1.0);
    CHECK(neg[1] == 0.0);
    CHECK(neg[0] + neg[1] + neg[2] == doctest::Approx(1.0).epsilon(1e-15));

    std::vector<double> zeros = {0.0, -1e-18, 0.0};
    CHECK_THROWS_AS(normalize(zeros, 1.0), divergence_error);

    // normalizing twice changes nothing beyond round-off
    std::vector<double> w2 = {0.3, 0.9, 1.8, 0.05};
    normalize(w2, 0.25);
    std::vector<double> w3 = w2;
    normalize(w3, 0.25);
    for (std::size_t i = 0; i < w2.size(); ++i)
        CHECK(w3[i] == doctest::Approx(w2[i]).epsilon(1e-15));
}

TEST_CASE("gaussian_pmd is normalized on its design grid") {
    GaussianMoments m{(Vector(2) << 0.3, 0.1).finished(),
                      (Vector(2) << 0.01, 0.001).finished().asDiagonal()};
    PointMassDensity pmd = gaussian_pmd(m, 5.0, {31, 31});
    double sum = 0.0;
    for (double v : pmd.weights) sum += v;
    CHECK(sum * pmd.grid.cell_volume() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(pmd.grid.center().isApprox(m.mean, 1e-12));
}
