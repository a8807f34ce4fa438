#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "ptcpa/core.hpp"
#include "ptcpa/elements.hpp"

namespace ptcpa {

struct ThresholdNotBracketed : std::runtime_error {
    explicit ThresholdNotBracketed(const std::string& what) : std::runtime_error(what) {}
};

struct NotCheckable : std::runtime_error {
    explicit NotCheckable(const std::string& what) : std::runtime_error(what) {}
};

enum class MatrixEntry { M11, M22 };

/// A located zero of M11 or M22 in the complex detuning plane.
struct RootResult {
    cplx freq{0.0};
    MatrixEntry target{MatrixEntry::M22};
    double residual{0.0};
    int iterations{0};
};

/// Rectangle in the complex detuning plane with a seed-grid density for the
/// coarse search stage.
struct SearchRegion {
    double re_min{-1.0}, re_max{1.0};
    double im_min{-1.0}, im_max{1.0};
    int seeds_re{40}, seeds_im{40};

    void validate() const {
        if (!(re_min < re_max) || !(im_min < im_max))
            throw std::invalid_argument("search region: degenerate rectangle");
        if (seeds_re < 2 || seeds_im < 2)
            throw std::invalid_argument("search region: seed density must be >= 2");
    }
    bool contains(cplx z, double margin = 0.0) const {
        return z.real() >= re_min - margin && z.real() <= re_max + margin &&
               z.imag() >= im_min - margin && z.imag() <= im_max + margin;
    }
};

/// Seed that failed to converge; kept for diagnostics instead of being
/// silently discarded.
struct DroppedCandidate {
    cplx seed{0.0};
    cplx last{0.0};
    double residual{0.0};
    int iterations{0};
};

struct ZeroSearch {
    std::vector<RootResult> roots;        // sorted by real part, then imaginary
    std::vector<DroppedCandidate> dropped;
};

/// All simple zeros of fn inside the region: seeds are taken at local
/// minima of |fn| on the coarse grid and at cells with nonzero phase
/// winding, then refined by damped Newton with central-difference
/// derivatives (step 1e-6). Results have residual <= tol; duplicates within
/// 10*tol are merged.
ZeroSearch find_zeros(const std::function<cplx(cplx)>& fn, const SearchRegion& region, double tol);

/// Same, for the M11 or M22 entry of a structure.
ZeroSearch find_zeros(const StructureSpec& spec, MatrixEntry target, const SearchRegion& region,
                      double tol);

struct ThresholdResult {
    double g_th{0.0};
    std::vector<double> freqs;      // real crossing frequencies, ascending
    std::vector<double> residuals;  // |M22| at each crossing
    int iterations{0};              // bisection steps
};

/// Gain threshold of a gain-parametrized structure family: bisects the gain
/// on the imaginary part of the M22 zero nearest the real axis and returns
/// the gain at which it crosses, together with the real crossing
/// frequencies. Crossings are detected in either direction (the coupled-mode
/// detuning coordinate orients the complex plane opposite to the mirror
/// cavity one). Throws ThresholdNotBracketed if the imaginary part has the
/// same sign at both ends of g_range.
ThresholdResult lasing_threshold(const std::function<StructureSpec(double)>& family, double g_lo,
                                 double g_hi, const SearchRegion& region, double g_tol = 1e-4,
                                 double root_tol = 1e-8);

/// Per-sample worst deviations from the matrix identities
///   M22(w) = conj(M11(conj w)),
///   M12(w) = -conj(M12(conj w)),  M21(w) = -conj(M21(conj w)),
/// each scaled by the largest entry modulus at that sample.
struct PtMatrixReport {
    bool pass{true};
    double worst_diag{0.0};
    double worst_m12{0.0};
    double worst_m21{0.0};
    cplx worst_freq{0.0};
    int checked{0};

    double worst() const { return std::max({worst_diag, worst_m12, worst_m21}); }
};

PtMatrixReport verify_pt_matrix(const StructureSpec& spec, std::span<const cplx> freq_samples,
                                double tol);

/// True iff the piecewise epsilon(x) profile implied by the element list is
/// complex-conjugate mirror symmetric about the stack midpoint. Throws
/// NotCheckable for stacks containing non-spatial elements (Mirror,
/// NearThreshold).
bool verify_pt_epsilon(const StructureSpec& spec);

/// Check that at gain g each real zero of M22 coincides with a real zero of
/// M11 within tol (the CPA-laser signature).
struct CoincidenceReport {
    struct Pair {
        double m22_freq{0.0};
        double m11_freq{0.0};
        double mismatch{0.0};
    };
    bool pass{false};
    std::vector<Pair> pairs;
    std::vector<double> unmatched_m22;  // real M22 zeros with no M11 partner
    std::vector<double> real_m11;       // all real M11 zeros found
    double worst_mismatch{0.0};
};

CoincidenceReport cpa_lasing_coincidence(const std::function<StructureSpec(double)>& family,
                                         double g, const SearchRegion& region, double tol);

}  // namespace ptcpa
