#pragma once

#include <complex>
#include <stdexcept>
#include <vector>

namespace ptcpa {

using cplx = std::complex<double>;

inline constexpr cplx iunit{0.0, 1.0};

/// 2x2 complex transfer matrix relating wave amplitudes on the left of a
/// structure to those on the right: (c, d) = M (a, b), where a, c are the
/// right-going and b, d the left-going amplitude coefficients.
///
/// For any structure bounded by the same real background index on both
/// sides, det M = 1 up to rounding.
struct TransferMatrix {
    cplx m11{1.0}, m12{0.0}, m21{0.0}, m22{1.0};

    static TransferMatrix identity() { return {}; }

    cplx det() const { return m11 * m22 - m12 * m21; }

    /// Largest entry modulus; the scale used for relative comparisons.
    double norm_max() const;
};

/// Matrix product left*right. The right factor acts first, i.e. it is the
/// matrix of the leftmost physical element in a stack.
TransferMatrix mat_mul(const TransferMatrix& left, const TransferMatrix& right);

inline TransferMatrix operator*(const TransferMatrix& a, const TransferMatrix& b) {
    return mat_mul(a, b);
}

inline cplx mat_det(const TransferMatrix& m) { return m.det(); }

/// Uniform grid of real detuning values, endpoints included.
struct SpectralGrid {
    double start{0.0};
    double stop{1.0};
    int count{2};

    void validate() const {
        if (count < 2) throw std::invalid_argument("grid: count must be >= 2");
        if (!(start < stop)) throw std::invalid_argument("grid: start must be < stop");
    }

    std::vector<double> points() const;
};

}  // namespace ptcpa
