#include <doctest.h>

#include <cmath>
#include <random>

#include "ptcpa/core.hpp"
#include "ptcpa/elements.hpp"

using namespace ptcpa;

namespace {

TransferMatrix random_matrix(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    auto c = [&] { return cplx{u(rng), u(rng)}; };
    return {c(), c(), c(), c()};
}

double rel_dev(const TransferMatrix& a, const TransferMatrix& b) {
    const TransferMatrix d{a.m11 - b.m11, a.m12 - b.m12, a.m21 - b.m21, a.m22 - b.m22};
    return d.norm_max() / std::max(a.norm_max(), b.norm_max());
}

}  // namespace

TEST_CASE("identity is neutral for mat_mul") {
    std::mt19937_64 rng(1);
    const TransferMatrix m = random_matrix(rng);
    const TransferMatrix id = TransferMatrix::identity();
    CHECK(rel_dev(mat_mul(id, m), m) == 0.0);
    CHECK(rel_dev(mat_mul(m, id), m) == 0.0);
}

TEST_CASE("determinant is multiplicative") {
    std::mt19937_64 rng(2);
    for (int i = 0; i < 50; ++i) {
        const TransferMatrix a = random_matrix(rng);
        const TransferMatrix b = random_matrix(rng);
        const cplx lhs = mat_det(mat_mul(a, b));
        const cplx rhs = mat_det(a) * mat_det(b);
        CHECK(std::abs(lhs - rhs) <= 1e-12 * std::max(1.0, std::abs(rhs)));
    }
}

TEST_CASE("mat_mul is associative on well-conditioned inputs") {
    std::mt19937_64 rng(3);
    for (int i = 0; i < 50; ++i) {
        const TransferMatrix a = random_matrix(rng);
        const TransferMatrix b = random_matrix(rng);
        const TransferMatrix c = random_matrix(rng);
        CHECK(rel_dev(mat_mul(mat_mul(a, b), c), mat_mul(a, mat_mul(b, c))) <= 1e-13);
    }
}

TEST_CASE("mirror-gain-mirror product vanishes at the oscillation condition") {
    // m22 of M_M * M_g * M_g vanishes when exp(-2 gl) = r_m^2 and the
    // single-pass phase is a multiple of pi.
    const double r_m = 0.9;
    const double gl = -std::log(r_m * r_m) / 2.0;  // 0.105360516 to 9 digits
    CHECK(gl == doctest::Approx(0.105360516).epsilon(1e-8));
    const TransferMatrix m =
        mat_mul(mirror_matrix(r_m), mat_mul(gain_slab_matrix(gl, M_PI), mirror_matrix(r_m)));
    CHECK(std::abs(m.m22) < 1e-10);
    CHECK(std::abs(mat_det(m) - 1.0) < 1e-12);
}

TEST_CASE("mat_det basic values") {
    CHECK(mat_det(TransferMatrix::identity()) == cplx{1.0});
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> u(-0.99, 0.99);
    for (int i = 0; i < 20; ++i) {
        const double r = u(rng);
        CHECK(std::abs(mat_det(mirror_matrix(r)) - 1.0) <= 1e-14);
    }
    // cosh^2(1) - sinh^2(1) = 1
    CHECK(std::abs(mat_det(dfb_half_matrix(1.0, 0.0, 0.0)) - 1.0) <= 1e-14);
}

TEST_CASE("spectral grid endpoints and validation") {
    const SpectralGrid g{-1.0, 1.0, 5};
    const auto pts = g.points();
    REQUIRE(pts.size() == 5);
    CHECK(pts.front() == -1.0);
    CHECK(pts.back() == 1.0);
    CHECK(pts[2] == doctest::Approx(0.0));
    CHECK_THROWS_AS(SpectralGrid{0.0, 1.0, 1}.validate(), std::invalid_argument);
    CHECK_THROWS_AS(SpectralGrid{1.0, 0.0, 10}.validate(), std::invalid_argument);
}
