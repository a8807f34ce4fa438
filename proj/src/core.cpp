#include "ptcpa/core.hpp"

#include <algorithm>
#include <cmath>

namespace ptcpa {

double TransferMatrix::norm_max() const {
    return std::max({std::abs(m11), std::abs(m12), std::abs(m21), std::abs(m22)});
}

TransferMatrix mat_mul(const TransferMatrix& left, const TransferMatrix& right) {
    return {
        left.m11 * right.m11 + left.m12 * right.m21,
        left.m11 * right.m12 + left.m12 * right.m22,
        left.m21 * right.m11 + left.m22 * right.m21,
        left.m21 * right.m12 + left.m22 * right.m22,
    };
}

std::vector<double> SpectralGrid::points() const {
    validate();
    std::vector<double> pts(static_cast<size_t>(count));
    const double span = stop - start;
    for (int i = 0; i < count; ++i)
        pts[static_cast<size_t>(i)] = start + span * static_cast<double>(i) / (count - 1);
    return pts;
}

}  // namespace ptcpa
