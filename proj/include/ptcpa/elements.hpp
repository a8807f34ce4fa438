#pragma once

#include <variant>
#include <vector>

#include "ptcpa/core.hpp"

namespace ptcpa {

// ---------------------------------------------------------------------------
// Stack elements.
//
// All element parameters are dimensionless products (phases, q0*L, g*L).
// Frequency enters through the shared detuning coordinate delta; elements
// that respond to it say so below. Amplitudes are referenced at each
// element's local boundaries, so background gaps need explicit Propagation
// entries.
// ---------------------------------------------------------------------------

/// Homogeneous slab of complex index n embedded in background n0.
/// kl is the background optical phase k*n0*length across its extent; the
/// internal phase is (n/n0)*kl. Frequency-independent as parametrized.
struct Slab {
    cplx n{1.0};
    double kl{0.0};
};

/// Lossless thin mirror with real field reflection r_m and transmission
/// t_m = i*sqrt(1 - r_m^2), so |t_m|^2 + |r_m|^2 = 1 by construction.
struct Mirror {
    double r_m{0.0};
};

/// Uniform gain (gl > 0) or loss (gl < 0) medium of single-pass amplitude
/// exponent gl and single-pass phase delta0 + delta at detuning delta.
struct GainSlab {
    double gl{0.0};
    double delta0{0.0};
};

/// One half of a Bragg-grating structure with uniform gain or loss, in
/// coupled-mode form. q0l and gl are the per-element products (coupling and
/// signed gain over this element's own length); the element consumes the
/// detuning as (delta + delta_offset) * delta_scale, where delta_scale is
/// this element's share of the reference length.
struct DfbHalf {
    double q0l{0.0};
    double gl{0.0};
    double delta_scale{1.0};
    double delta_offset{0.0};
};

/// Background propagation over a fixed phase k*n0*length.
struct Propagation {
    double phase{0.0};
};

/// Analytic single-resonance transfer-matrix family, valid near a lasing
/// frequency just below threshold. eps > 0 is the distance from threshold;
/// detuning is measured from the resonance.
struct NearThreshold {
    double alpha{1.0};
    double beta{0.0};
    double eps{1e-2};
    cplx kappa{1.0};
};

using StackElement = std::variant<Slab, Mirror, GainSlab, DfbHalf, Propagation, NearThreshold>;

/// Ordered stack, leftmost physical element first.
struct StructureSpec {
    std::vector<StackElement> elements;
    double n0{1.0};
};

// Element matrix builders -----------------------------------------------------

/// Exact two-interface matrix of a homogeneous slab (index n, background
/// optical phase kl, background index n0). Rejects n = 0.
TransferMatrix slab_matrix(cplx n, double kl, double n0);

/// Mirror matrix (1/t_m) [[t_m^2 - r_m^2, r_m], [-r_m, 1]] with
/// t_m = i*sqrt(1 - r_m^2). Rejects |r_m| >= 1.
TransferMatrix mirror_matrix(double r_m);

/// diag(exp(gl + i*delta), exp(-gl - i*delta)).
TransferMatrix gain_slab_matrix(double gl, cplx delta);

/// Coupled-mode matrix of one grating half: with rho = delta + i*gl and
/// lambda = sqrt(q0l^2 - rho^2),
///   m11 = cosh(lambda) - i*(rho/lambda)*sinh(lambda)
///   m12 = -i*(q0l/lambda)*sinh(lambda),  m21 = -m12
///   m22 = cosh(lambda) + i*(rho/lambda)*sinh(lambda).
/// cosh and sinh(lambda)/lambda are even in lambda, so the result is
/// branch-independent; the lambda -> 0 limit is handled by series.
TransferMatrix dfb_half_matrix(double q0l, double gl, cplx delta);

/// Near-threshold matrix: m11 = kappa*(D - i*eps), m22 = conj(kappa)*(D + i*eps),
/// m12 = i*(alpha + beta*D), and m21 = (m11*m22 - 1)/m12 so that det = 1
/// holds identically. Rejects eps <= 0, alpha = 0 and the singular case
/// alpha + beta*D = 0.
TransferMatrix near_threshold_matrix(double alpha, double beta, double eps, cplx kappa,
                                     cplx detuning);

/// Matrix of a single element at detuning delta.
TransferMatrix element_matrix(const StackElement& element, cplx delta, double n0);

/// Product of element matrices; the rightmost factor is the leftmost
/// physical element. Rejects empty stacks.
TransferMatrix build_structure(const StructureSpec& spec, cplx delta);

// Presets ---------------------------------------------------------------------

/// [Mirror, GainSlab, Mirror]: two equal lossless mirrors filled by a gain
/// medium. Lases at exp(-2*gl) = r_m^2, delta = l*pi.
StructureSpec fp_laser(double r_m, double gl);

/// [DfbHalf(gain), DfbHalf(loss)]: index grating with a gain half followed
/// by an equal loss half (gain leftmost). q0l_total and gl_total are the
/// full-structure products; each stored half carries half of them and
/// consumes half of the detuning.
StructureSpec pt_dfb(double q0l_total, double gl_total);

/// Single NearThreshold element.
StructureSpec near_threshold_model(double alpha, double beta, double eps, cplx kappa);

}  // namespace ptcpa
