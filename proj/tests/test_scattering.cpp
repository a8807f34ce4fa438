#include <doctest.h>

#include <array>
#include <cmath>
#include <random>

#include "ptcpa/elements.hpp"
#include "ptcpa/scattering.hpp"

using namespace ptcpa;

namespace {

// random matrix with det = 1 (the regime where the closed theta forms hold)
TransferMatrix random_unimodular(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    auto c = [&] { return cplx{u(rng), u(rng)}; };
    TransferMatrix m{c(), c(), c(), 0.0};
    while (std::abs(m.m11) < 0.3) m.m11 = c();
    m.m22 = (1.0 + m.m12 * m.m21) / m.m11;
    return m;
}

double theta_via_outputs(const TransferMatrix& m, cplx a, cplx d) {
    const PortOutputs o = outputs(m, a, d);
    return (std::norm(o.b) + std::norm(o.c)) / (std::norm(a) + std::norm(d));
}

}  // namespace

TEST_CASE("s_coefficients: identity and near-threshold values") {
    const auto id = s_coefficients(TransferMatrix::identity());
    CHECK(id.t == cplx{1.0});
    CHECK(id.r_left == cplx{0.0});
    CHECK(id.r_right == cplx{0.0});

    const TransferMatrix m = near_threshold_matrix(3.0, 0.3, 0.02, 1.0, 0.0);
    const auto sc = s_coefficients(m);
    CHECK(std::norm(sc.t) == doctest::Approx(2500.0).epsilon(1e-12));
    // |0.3332 / 0.02|^2
    CHECK(std::norm(sc.r_left) == doctest::Approx(277.5556).epsilon(1e-9));
}

TEST_CASE("s_coefficients: transmission is direction-independent") {
    std::mt19937_64 rng(21);
    for (int i = 0; i < 50; ++i) {
        const TransferMatrix m = random_unimodular(rng);
        // left incidence: a=1, d=0; right incidence: a=0, d=1
        const PortOutputs left = outputs(m, 1.0, 0.0);
        const PortOutputs right = outputs(m, 0.0, 1.0);
        CHECK(std::abs(left.c - right.b) <= 1e-12 * std::max(1.0, std::abs(left.c)));
        const auto sc = s_coefficients(m);
        CHECK(std::abs(sc.t - left.c) <= 1e-12 * std::max(1.0, std::abs(sc.t)));
    }
}

TEST_CASE("fp laser below threshold: transmission resonance is Lorentzian") {
    // 1/|t|^2 of the mirror cavity is A - B cos(2 delta); near the resonance
    // it is quadratic in the detuning to 4th-order corrections, which is what
    // a Lorentzian |t|^2 means. Fit a parabola by least squares and check the
    // residual.
    const double r_m = 0.9;
    const double gl = 0.9 * (-std::log(r_m * r_m) / 2.0);
    const StructureSpec spec = fp_laser(r_m, gl);

    const int n = 41;
    std::array<double, n> xs{}, ys{};
    for (int i = 0; i < n; ++i) {
        const double x = -0.02 + 0.04 * i / (n - 1);
        const TransferMatrix m = build_structure(spec, M_PI + x);
        xs[i] = x;
        ys[i] = 1.0 / std::norm(s_coefficients(m).t);
    }
    // normal equations for y = c0 + c1 x + c2 x^2
    double s0 = 0, s1 = 0, s2 = 0, s3 = 0, s4 = 0, b0 = 0, b1 = 0, b2 = 0;
    for (int i = 0; i < n; ++i) {
        const double x = xs[i], x2 = x * x;
        s0 += 1.0;
        s1 += x;
        s2 += x2;
        s3 += x2 * x;
        s4 += x2 * x2;
        b0 += ys[i];
        b1 += x * ys[i];
        b2 += x2 * ys[i];
    }
    // solve the 3x3 system by Cramer's rule
    const double det = s0 * (s2 * s4 - s3 * s3) - s1 * (s1 * s4 - s2 * s3) +
                       s2 * (s1 * s3 - s2 * s2);
    REQUIRE(std::abs(det) > 0.0);
    const double c0 = (b0 * (s2 * s4 - s3 * s3) - s1 * (b1 * s4 - b2 * s3) +
                       s2 * (b1 * s3 - b2 * s2)) /
                      det;
    const double c1 = (s0 * (b1 * s4 - b2 * s3) - b0 * (s1 * s4 - s2 * s3) +
                       s2 * (s1 * b2 - s2 * b1)) /
                      det;
    const double c2 = (s0 * (s2 * b2 - s3 * b1) - s1 * (s1 * b2 - s3 * b0) +
                       b0 * (s1 * s3 - s2 * s2)) /
                      det;
    double worst = 0.0, scale = 0.0;
    for (int i = 0; i < n; ++i) {
        const double fit = c0 + c1 * xs[i] + c2 * xs[i] * xs[i];
        worst = std::max(worst, std::abs(fit - ys[i]));
        scale = std::max(scale, std::abs(ys[i]));
    }
    CHECK(worst / scale <= 1e-3);
    CHECK(c2 > 0.0);                       // a dip of 1/|t|^2, i.e. a peak of |t|^2
    CHECK(std::abs(c1) <= 1e-3 * c2);      // centered at the resonance
}

TEST_CASE("outputs: identity and exact CPA cancellation") {
    const PortOutputs id = outputs(TransferMatrix::identity(), 1.0, 0.0);
    CHECK(id.b == cplx{0.0});
    CHECK(id.c == cplx{1.0});

    const TransferMatrix m = near_threshold_matrix(3.0, 0.3, 0.02, 1.0, 0.0);
    const PortOutputs cpa = outputs(m, 1.0, m.m21);
    CHECK(std::abs(cpa.b) == 0.0);  // cancels exactly
    CHECK(std::norm(cpa.c) == doctest::Approx(4e-4).epsilon(1e-12));

    const PortOutputs silent = outputs(m, 0.0, 0.0);
    CHECK(silent.b == cplx{0.0});
    CHECK(silent.c == cplx{0.0});
}

TEST_CASE("theta: frozen near-threshold values at the resonance") {
    const TransferMatrix m = near_threshold_matrix(3.0, 0.3, 0.02, 1.0, 0.0);

    CHECK(theta(m, TwoPortInput::single_left()) ==
          doctest::Approx(2777.5556).epsilon(1e-7));

    // CPA input d/a = m21 = 0.3332i
    const double sigma = 0.3332;
    const double phi = M_PI / 2.0;
    CHECK(theta(m, TwoPortInput::coherent(sigma, phi)) ==
          doctest::Approx(3.600287965432627e-4).epsilon(1e-9));

    CHECK(theta(m, TwoPortInput::incoherent(sigma)) ==
          doctest::Approx(4998.20021604608).epsilon(1e-12));
}

TEST_CASE("theta: coherent at sigma = 0 equals single-port exactly") {
    std::mt19937_64 rng(22);
    for (int i = 0; i < 50; ++i) {
        const TransferMatrix m = random_unimodular(rng);
        CHECK(theta(m, TwoPortInput::coherent(0.0, 0.0)) ==
              theta(m, TwoPortInput::single_left()));
    }
}

TEST_CASE("theta: coherent form equals the outputs-based ratio") {
    std::mt19937_64 rng(23);
    std::uniform_real_distribution<double> us(0.0, 3.0);
    std::uniform_real_distribution<double> up(0.0, 2.0 * M_PI);
    for (int i = 0; i < 100; ++i) {
        const TransferMatrix m = random_unimodular(rng);
        const double sigma = us(rng), phi = up(rng);
        const double via_formula = theta(m, TwoPortInput::coherent(sigma, phi));
        const double via_outputs = theta_via_outputs(m, 1.0, sigma * std::exp(iunit * phi));
        CHECK(via_formula == doctest::Approx(via_outputs).epsilon(1e-12));
    }
}

TEST_CASE("theta: incoherent equals the phase average of coherent") {
    std::mt19937_64 rng(24);
    std::uniform_real_distribution<double> us(0.0, 3.0);
    const int n_phi = 10000;
    for (int i = 0; i < 10; ++i) {
        const TransferMatrix m = random_unimodular(rng);
        const double sigma = us(rng);
        double avg = 0.0;
        for (int k = 0; k < n_phi; ++k)
            avg += theta(m, TwoPortInput::coherent(sigma, 2.0 * M_PI * k / n_phi));
        avg /= n_phi;
        const double inc = theta(m, TwoPortInput::incoherent(sigma));
        CHECK(std::abs(avg - inc) <= 1e-6 * std::max(1.0, inc));
    }
}

TEST_CASE("theta: nonnegative and bounded below by the transmission") {
    std::mt19937_64 rng(25);
    for (int i = 0; i < 100; ++i) {
        const TransferMatrix m = random_unimodular(rng);
        const double single = theta(m, TwoPortInput::single_left());
        CHECK(single >= 0.0);
        CHECK(single >= std::norm(s_coefficients(m).t) * (1.0 - 1e-14));
        CHECK(theta(m, TwoPortInput::incoherent(1.3)) >= 0.0);
    }
}

TEST_CASE("cpa_input: returns the m21 ratio") {
    const TransferMatrix m = near_threshold_matrix(3.0, 0.3, 0.02, 1.0, 0.0);
    CHECK(std::abs(cpa_input(m) - iunit * 0.3332) <= 1e-12);
    TransferMatrix diag = TransferMatrix::identity();
    CHECK(cpa_input(diag) == cplx{0.0});  // single-sided input
}

TEST_CASE("operations at a lasing pole raise the dedicated error") {
    const TransferMatrix pole{1.0, 2.0, 3.0, 0.0};
    CHECK_THROWS_AS(s_coefficients(pole), LasingPoleError);
    CHECK_THROWS_AS(outputs(pole, 1.0, 0.0), LasingPoleError);
    CHECK_THROWS_AS(theta(pole, TwoPortInput::single_left()), LasingPoleError);
}

TEST_CASE("theta: invalid sigma rejected") {
    const TransferMatrix m = near_threshold_matrix(3.0, 0.3, 0.02, 1.0, 0.0);
    CHECK_THROWS_AS(theta(m, TwoPortInput::coherent(-1.0, 0.0)), std::invalid_argument);
}
