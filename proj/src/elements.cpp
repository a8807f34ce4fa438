#include "ptcpa/elements.hpp"

#include <cmath>

namespace ptcpa {

namespace {

// cosh(sqrt(z)) and sinh(sqrt(z))/sqrt(z). Both are entire in z, so the
// square-root branch cannot matter; near z = 0 the direct form loses
// accuracy and the series takes over.
struct CoshSinhc {
    cplx ch;
    cplx shc;
};

CoshSinhc cosh_sinhc_of_square(cplx z) {
    if (std::abs(z) < 0.25) {
        cplx ch{1.0};
        cplx shc{1.0};
        cplx term_ch{1.0};
        cplx term_shc{1.0};
        for (int k = 1; k <= 24; ++k) {
            const double two_k = 2.0 * k;
            term_ch *= z / (two_k * (two_k - 1.0));
            term_shc *= z / (two_k * (two_k + 1.0));
            ch += term_ch;
            shc += term_shc;
            if (std::abs(term_ch) + std::abs(term_shc) < 1e-20) break;
        }
        return {ch, shc};
    }
    const cplx lam = std::sqrt(z);
    return {std::cosh(lam), std::sinh(lam) / lam};
}

// Interface matrix for amplitudes of exp(+-i k p x) -> exp(+-i k q x) at a
// step from index p to index q (field and derivative continuity).
TransferMatrix interface_matrix(cplx p, cplx q) {
    const cplx s = 1.0 / (2.0 * q);
    return {s * (q + p), s * (q - p), s * (q - p), s * (q + p)};
}

}  // namespace

TransferMatrix slab_matrix(cplx n, double kl, double n0) {
    if (n == cplx{0.0}) throw std::invalid_argument("slab: index n = 0 is degenerate");
    if (!(n0 > 0.0)) throw std::invalid_argument("slab: background index must be positive");
    const cplx psi = (n / n0) * kl;  // internal phase k*n*length
    const cplx e_plus = std::exp(iunit * psi);
    const TransferMatrix prop{e_plus, 0.0, 0.0, 1.0 / e_plus};
    // out-interface * propagation * in-interface
    return mat_mul(interface_matrix(n, cplx{n0}), mat_mul(prop, interface_matrix(cplx{n0}, n)));
}

TransferMatrix mirror_matrix(double r_m) {
    if (!(std::abs(r_m) < 1.0))
        throw std::invalid_argument("mirror: |r_m| >= 1 leaves no transmission channel");
    const cplx t_m = iunit * std::sqrt(1.0 - r_m * r_m);
    return {(t_m * t_m - r_m * r_m) / t_m, r_m / t_m, -r_m / t_m, 1.0 / t_m};
}

TransferMatrix gain_slab_matrix(double gl, cplx delta) {
    const cplx e = std::exp(gl + iunit * delta);
    return {e, 0.0, 0.0, 1.0 / e};
}

TransferMatrix dfb_half_matrix(double q0l, double gl, cplx delta) {
    const cplx rho = delta + iunit * gl;
    const auto [ch, shc] = cosh_sinhc_of_square(q0l * q0l - rho * rho);
    // (rho/lambda)*sinh(lambda) = rho*shc, (q0/lambda)*sinh(lambda) = q0*shc
    return {ch - iunit * rho * shc, -iunit * q0l * shc, iunit * q0l * shc,
            ch + iunit * rho * shc};
}

TransferMatrix near_threshold_matrix(double alpha, double beta, double eps, cplx kappa,
                                     cplx detuning) {
    if (!(eps > 0.0)) throw std::invalid_argument("near-threshold: eps must be > 0");
    if (alpha == 0.0) throw std::invalid_argument("near-threshold: alpha must be nonzero");
    const cplx m12 = iunit * (alpha + beta * detuning);
    if (m12 == cplx{0.0})
        throw std::invalid_argument("near-threshold: singular model, alpha + beta*detuning = 0");
    const cplx m11 = kappa * (detuning - iunit * eps);
    const cplx m22 = std::conj(kappa) * (detuning + iunit * eps);
    const cplx m21 = (m11 * m22 - 1.0) / m12;  // det = 1 by construction
    return {m11, m12, m21, m22};
}

TransferMatrix element_matrix(const StackElement& element, cplx delta, double n0) {
    return std::visit(
        [&](const auto& e) -> TransferMatrix {
            using T = std::decay_t<decltype(e)>;
            if constexpr (std::is_same_v<T, Slab>) {
                return slab_matrix(e.n, e.kl, n0);
            } else if constexpr (std::is_same_v<T, Mirror>) {
                return mirror_matrix(e.r_m);
            } else if constexpr (std::is_same_v<T, GainSlab>) {
                return gain_slab_matrix(e.gl, e.delta0 + delta);
            } else if constexpr (std::is_same_v<T, DfbHalf>) {
                return dfb_half_matrix(e.q0l, e.gl, (delta + e.delta_offset) * e.delta_scale);
            } else if constexpr (std::is_same_v<T, Propagation>) {
                const cplx e_plus = std::exp(iunit * cplx{e.phase});
                return {e_plus, 0.0, 0.0, 1.0 / e_plus};
            } else {
                static_assert(std::is_same_v<T, NearThreshold>);
                return near_threshold_matrix(e.alpha, e.beta, e.eps, e.kappa, delta);
            }
        },
        element);
}

TransferMatrix build_structure(const StructureSpec& spec, cplx delta) {
    if (spec.elements.empty()) throw std::invalid_argument("structure: empty element list");
    TransferMatrix m = element_matrix(spec.elements.front(), delta, spec.n0);
    for (size_t i = 1; i < spec.elements.size(); ++i)
        m = mat_mul(element_matrix(spec.elements[i], delta, spec.n0), m);
    return m;
}

StructureSpec fp_laser(double r_m, double gl) {
    StructureSpec spec;
    spec.elements = {Mirror{r_m}, GainSlab{gl, 0.0}, Mirror{r_m}};
    return spec;
}

StructureSpec pt_dfb(double q0l_total, double gl_total) {
    if (!(q0l_total >= 0.0)) throw std::invalid_argument("pt_dfb: q0l must be >= 0");
    StructureSpec spec;
    // Each half carries half of the full-structure products and sees half of
    // the detuning; gain half leftmost.
    const double q = 0.5 * q0l_total;
    const double g = 0.5 * gl_total;
    spec.elements = {DfbHalf{q, +g, 0.5, 0.0}, DfbHalf{q, -g, 0.5, 0.0}};
    return spec;
}

StructureSpec near_threshold_model(double alpha, double beta, double eps, cplx kappa) {
    StructureSpec spec;
    spec.elements = {NearThreshold{alpha, beta, eps, kappa}};
    return spec;
}

}  // namespace ptcpa
