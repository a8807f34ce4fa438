#include "ptcpa/scattering.hpp"

#include <cmath>

namespace ptcpa {

namespace {

double abs2(cplx z) { return std::norm(z); }

void require_off_pole(const TransferMatrix& m) {
    if (m.m22 == cplx{0.0}) throw LasingPoleError{};
}

}  // namespace

ScatteringCoefficients s_coefficients(const TransferMatrix& m) {
    require_off_pole(m);
    return {1.0 / m.m22, -m.m21 / m.m22, m.m12 / m.m22};
}

PortOutputs outputs(const TransferMatrix& m, cplx a, cplx d) {
    require_off_pole(m);
    const cplx b = (d - m.m21 * a) / m.m22;
    return {b, m.m11 * a + m.m12 * b};
}

double theta(const TransferMatrix& m, const TwoPortInput& input) {
    require_off_pole(m);
    if (!(input.sigma >= 0.0) || !std::isfinite(input.sigma))
        throw std::invalid_argument("theta: sigma must be finite and >= 0");
    const double m22_2 = abs2(m.m22);
    switch (input.mode) {
        case Excitation::single_right:
            return (1.0 + abs2(m.m12)) / m22_2;
        case Excitation::incoherent: {
            const double s2 = input.sigma * input.sigma;
            return (1.0 + s2 + s2 * abs2(m.m12) + abs2(m.m21)) / ((1.0 + s2) * m22_2);
        }
        case Excitation::single_left:
        case Excitation::coherent: {
            // single_left is the sigma = 0 specialization of the coherent form.
            const double sigma = input.mode == Excitation::single_left ? 0.0 : input.sigma;
            const double phi = input.mode == Excitation::single_left ? 0.0 : input.phi;
            const cplx s = sigma * std::exp(iunit * phi);
            return (abs2(1.0 + s * m.m12) + abs2(s - m.m21)) /
                   ((1.0 + sigma * sigma) * m22_2);
        }
    }
    throw std::logic_error("theta: unknown excitation mode");
}

cplx cpa_input(const TransferMatrix& m) { return m.m21; }

}  // namespace ptcpa
