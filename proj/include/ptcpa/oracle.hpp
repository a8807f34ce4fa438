#pragma once

#include <functional>
#include <vector>

#include "ptcpa/core.hpp"

namespace ptcpa::oracle {

/// Piecewise-defined epsilon(x) on contiguous segments. Segment boundaries
/// double as integration breakpoints so that interior discontinuities do
/// not spoil the integrator's order.
struct ProfileSegment {
    double x0{0.0};
    double x1{1.0};
    std::function<cplx(double)> eps;
};

struct PiecewiseProfile {
    std::vector<ProfileSegment> segments;

    double x_begin() const { return segments.front().x0; }
    double x_end() const { return segments.back().x1; }
    void validate() const;

    static PiecewiseProfile uniform(cplx eps, double x0, double x1);
    /// Background / slab of index n / background, slab on [x0, x1].
    static PiecewiseProfile slab(cplx n, double x0, double x1);
};

/// Transfer matrix of E'' + k^2 eps(x) E = 0 across the profile, obtained by
/// fixed-step RK4 integration of (E, E') from two independent launches
/// (pure right-going and pure left-going at the left boundary) and
/// plane-wave decomposition at the right boundary. Amplitudes are referenced
/// at the local boundaries against exp(+-i k n0 x). No accuracy check.
TransferMatrix integrate_helmholtz_single(const PiecewiseProfile& profile, double k, double n0,
                                          double step);

/// Same, with a built-in step-halving discrepancy check: if the matrices at
/// step and step/2 differ by more than 1e-6 relative, the step is too large
/// and the call refuses. Returns the half-step result.
TransferMatrix integrate_helmholtz(const PiecewiseProfile& profile, double k, double n0,
                                   double step);

/// Matrix exponential of A = [[-i*rhol, -i*q0l], [i*q0l, i*rhol]] by scaling
/// and squaring with a Taylor core, i.e. without the cosh/sinh closed form;
/// branch-independent cross-check for the coupled-mode half matrix.
TransferMatrix expm_coupled_mode(double q0l, cplx rhol);

}  // namespace ptcpa::oracle
