#include "ptcpa/oracle.hpp"

#include <cmath>

namespace ptcpa::oracle {

void PiecewiseProfile::validate() const {
    if (segments.empty()) throw std::invalid_argument("profile: no segments");
    for (size_t i = 0; i < segments.size(); ++i) {
        if (!(segments[i].x0 < segments[i].x1))
            throw std::invalid_argument("profile: segment with non-positive length");
        if (i > 0 && segments[i].x0 != segments[i - 1].x1)
            throw std::invalid_argument("profile: segments must be contiguous");
        if (!segments[i].eps) throw std::invalid_argument("profile: segment without eps(x)");
    }
}

PiecewiseProfile PiecewiseProfile::uniform(cplx eps, double x0, double x1) {
    return {{{x0, x1, [eps](double) { return eps; }}}};
}

PiecewiseProfile PiecewiseProfile::slab(cplx n, double x0, double x1) {
    const cplx eps = n * n;
    return {{{x0, x1, [eps](double) { return eps; }}}};
}

namespace {

struct FieldState {
    cplx e;   // E
    cplx de;  // dE/dx
};

// One RK4 step of E'' + k^2 eps(x) E = 0 as a first-order system.
FieldState rk4_step(const std::function<cplx(double)>& eps, double k2, double x, double h,
                    FieldState y) {
    auto f = [&](double xx, FieldState s) -> FieldState {
        return {s.de, -k2 * eps(xx) * s.e};
    };
    const FieldState k1 = f(x, y);
    const FieldState k2s = f(x + 0.5 * h, {y.e + 0.5 * h * k1.e, y.de + 0.5 * h * k1.de});
    const FieldState k3 = f(x + 0.5 * h, {y.e + 0.5 * h * k2s.e, y.de + 0.5 * h * k2s.de});
    const FieldState k4 = f(x + h, {y.e + h * k3.e, y.de + h * k3.de});
    return {y.e + h / 6.0 * (k1.e + 2.0 * k2s.e + 2.0 * k3.e + k4.e),
            y.de + h / 6.0 * (k1.de + 2.0 * k2s.de + 2.0 * k3.de + k4.de)};
}

FieldState integrate(const PiecewiseProfile& profile, double k, FieldState y, double step) {
    const double k2 = k * k;
    for (const auto& seg : profile.segments) {
        const double len = seg.x1 - seg.x0;
        const int n = std::max(1, static_cast<int>(std::ceil(len / step)));
        const double h = len / n;
        for (int i = 0; i < n; ++i) y = rk4_step(seg.eps, k2, seg.x0 + i * h, h, y);
    }
    return y;
}

double rel_deviation(const TransferMatrix& a, const TransferMatrix& b) {
    const double scale = std::max(a.norm_max(), b.norm_max());
    if (scale == 0.0) return 0.0;
    const TransferMatrix d{a.m11 - b.m11, a.m12 - b.m12, a.m21 - b.m21, a.m22 - b.m22};
    return d.norm_max() / scale;
}

}  // namespace

TransferMatrix integrate_helmholtz_single(const PiecewiseProfile& profile, double k, double n0,
                                          double step) {
    profile.validate();
    if (!(step > 0.0)) throw std::invalid_argument("integrate_helmholtz: step must be > 0");
    if (!(k > 0.0)) throw std::invalid_argument("integrate_helmholtz: k must be > 0");
    if (!(n0 > 0.0)) throw std::invalid_argument("integrate_helmholtz: n0 must be > 0");

    const cplx ikn0 = iunit * k * n0;
    // Launch pure right-going and pure left-going waves at the left boundary
    // (amplitudes referenced locally, so E = a + b there).
    const FieldState right = integrate(profile, k, {1.0, ikn0}, step);
    const FieldState left = integrate(profile, k, {1.0, -ikn0}, step);

    auto decompose = [&](FieldState s) -> std::pair<cplx, cplx> {
        return {0.5 * (s.e + s.de / ikn0), 0.5 * (s.e - s.de / ikn0)};
    };
    const auto [c1, d1] = decompose(right);  // column for (a, b) = (1, 0)
    const auto [c2, d2] = decompose(left);   // column for (a, b) = (0, 1)
    return {c1, c2, d1, d2};
}

TransferMatrix integrate_helmholtz(const PiecewiseProfile& profile, double k, double n0,
                                   double step) {
    const TransferMatrix coarse = integrate_helmholtz_single(profile, k, n0, step);
    const TransferMatrix fine = integrate_helmholtz_single(profile, k, n0, 0.5 * step);
    if (rel_deviation(coarse, fine) > 1e-6)
        throw std::runtime_error(
            "integrate_helmholtz: step too large (step-halving discrepancy above 1e-6)");
    return fine;
}

TransferMatrix expm_coupled_mode(double q0l, cplx rhol) {
    const TransferMatrix a{-iunit * rhol, -iunit * cplx{q0l}, iunit * cplx{q0l}, iunit * rhol};

    // scale so the Taylor series converges fast, then square back
    int squarings = 0;
    double norm = a.norm_max();
    while (norm > 0.5) {
        norm *= 0.5;
        ++squarings;
    }
    const double scale = std::ldexp(1.0, -squarings);
    const TransferMatrix b{a.m11 * scale, a.m12 * scale, a.m21 * scale, a.m22 * scale};

    TransferMatrix sum = TransferMatrix::identity();
    TransferMatrix term = TransferMatrix::identity();
    for (int kk = 1; kk <= 40; ++kk) {
        term = mat_mul(term, b);
        const double inv_k = 1.0 / kk;
        term.m11 *= inv_k;
        term.m12 *= inv_k;
        term.m21 *= inv_k;
        term.m22 *= inv_k;
        sum.m11 += term.m11;
        sum.m12 += term.m12;
        sum.m21 += term.m21;
        sum.m22 += term.m22;
        if (term.norm_max() < 1e-20 * std::max(1.0, sum.norm_max())) break;
    }
    for (int s = 0; s < squarings; ++s) sum = mat_mul(sum, sum);
    return sum;
}

}  // namespace ptcpa::oracle
