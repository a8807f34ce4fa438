#pragma once

#include "ptcpa/core.hpp"

namespace ptcpa {

/// Signalled when an operation is evaluated exactly at a lasing pole
/// (M22 = 0), where scattering coefficients diverge. Kept distinct from
/// generic errors so threshold searches can tell poles from overflow.
struct LasingPoleError : std::runtime_error {
    LasingPoleError() : std::runtime_error("transfer matrix is at a lasing pole (M22 = 0)") {}
};

/// t = 1/M22, r_left = -M21/M22, r_right = M12/M22. Transmission is the
/// same for both incidence directions when det M = 1.
struct ScatteringCoefficients {
    cplx t{0.0};
    cplx r_left{0.0};
    cplx r_right{0.0};
};

ScatteringCoefficients s_coefficients(const TransferMatrix& m);

/// Outgoing amplitudes (b, c) for injected amplitudes a (right-going, left
/// port) and d (left-going, right port): b = (d - M21 a)/M22, c = M11 a + M12 b.
struct PortOutputs {
    cplx b{0.0};
    cplx c{0.0};
};

PortOutputs outputs(const TransferMatrix& m, cplx a, cplx d);

enum class Excitation { single_left, single_right, coherent, incoherent };

/// Two-port excitation: amplitude ratio sigma = |d/a| >= 0 and, for the
/// coherent mode, the relative phase phi of d/a.
struct TwoPortInput {
    Excitation mode{Excitation::single_left};
    double sigma{0.0};
    double phi{0.0};

    static TwoPortInput single_left() { return {Excitation::single_left, 0.0, 0.0}; }
    static TwoPortInput single_right() { return {Excitation::single_right, 0.0, 0.0}; }
    static TwoPortInput coherent(double sigma, double phi) {
        return {Excitation::coherent, sigma, phi};
    }
    static TwoPortInput incoherent(double sigma) { return {Excitation::incoherent, sigma, 0.0}; }
};

/// Overall reflection/transmission coefficient: total outgoing intensity
/// over total incoming intensity.
///   single_left:  (1 + |M21|^2) / |M22|^2            (= T + R_left)
///   single_right: (1 + |M12|^2) / |M22|^2            (= T + R_right)
///   coherent:     (|1 + s*M12|^2 + |s - M21|^2) / ((1+sigma^2) |M22|^2),
///                 s = sigma*exp(i*phi)
///   incoherent:   phase average of the coherent form,
///                 (1 + sigma^2 + sigma^2 |M12|^2 + |M21|^2) / ((1+sigma^2) |M22|^2)
/// The single_left value is the coherent form at sigma = 0.
double theta(const TransferMatrix& m, const TwoPortInput& input);

/// Input ratio d/a = M21 that cancels both reflected outputs when
/// additionally M11 = 0; evaluated at or near a CPA frequency.
cplx cpa_input(const TransferMatrix& m);

}  // namespace ptcpa
