#include "ptcpa/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace ptcpa {

namespace {

constexpr double kDerivStep = 1e-6;  // central-difference step in detuning
constexpr int kMaxNewton = 80;
constexpr int kMaxDamping = 30;

bool finite(cplx z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

struct NewtonOutcome {
    cplx z{0.0};
    double residual{0.0};
    int iterations{0};
    bool converged{false};
};

NewtonOutcome newton_refine(const std::function<cplx(cplx)>& fn, cplx z0, double tol,
                            double step_cap) {
    NewtonOutcome out;
    cplx z = z0;
    cplx f = fn(z);
    if (!finite(f)) return {z0, std::numeric_limits<double>::infinity(), 0, false};
    for (int it = 1; it <= kMaxNewton; ++it) {
        out.iterations = it;
        const cplx df = (fn(z + kDerivStep) - fn(z - kDerivStep)) / (2.0 * kDerivStep);
        if (df == cplx{0.0} || !finite(df)) break;
        cplx step = f / df;
        const double s_abs = std::abs(step);
        if (s_abs > step_cap) step *= step_cap / s_abs;
        // damp until the residual does not grow
        double lam = 1.0;
        cplx z_next = z - step;
        cplx f_next = fn(z_next);
        for (int d = 0; d < kMaxDamping && (!finite(f_next) || std::abs(f_next) > std::abs(f));
             ++d) {
            lam *= 0.5;
            z_next = z - lam * step;
            f_next = fn(z_next);
        }
        if (!finite(f_next)) break;
        const double moved = std::abs(z_next - z);
        z = z_next;
        f = f_next;
        if (std::abs(f) <= tol && moved <= 1e-12 * std::max(1.0, std::abs(z))) break;
    }
    out.z = z;
    out.residual = std::abs(f);
    out.converged = out.residual <= tol;
    return out;
}

double wrap_angle(double a) {
    while (a > M_PI) a -= 2.0 * M_PI;
    while (a < -M_PI) a += 2.0 * M_PI;
    return a;
}

}  // namespace

ZeroSearch find_zeros(const std::function<cplx(cplx)>& fn, const SearchRegion& region,
                      double tol) {
    region.validate();
    if (!(tol > 0.0)) throw std::invalid_argument("find_zeros: tol must be > 0");

    const int nx = region.seeds_re;
    const int ny = region.seeds_im;
    const double dx = (region.re_max - region.re_min) / (nx - 1);
    const double dy = (region.im_max - region.im_min) / (ny - 1);

    std::vector<double> mag(static_cast<size_t>(nx) * ny);
    std::vector<double> arg(static_cast<size_t>(nx) * ny);
    auto at = [&](int ix, int iy) -> size_t { return static_cast<size_t>(iy) * nx + ix; };
    for (int iy = 0; iy < ny; ++iy) {
        for (int ix = 0; ix < nx; ++ix) {
            const cplx z{region.re_min + ix * dx, region.im_min + iy * dy};
            const cplx f = fn(z);
            mag[at(ix, iy)] = finite(f) ? std::abs(f) : std::numeric_limits<double>::infinity();
            arg[at(ix, iy)] = std::arg(f);
        }
    }

    // Seeds: grid-local minima of |f| plus centers of cells with nonzero
    // phase winding (catches zeros that fall between grid minima).
    std::vector<cplx> seeds;
    for (int iy = 0; iy < ny; ++iy) {
        for (int ix = 0; ix < nx; ++ix) {
            const double v = mag[at(ix, iy)];
            bool is_min = std::isfinite(v);
            for (int jy = std::max(0, iy - 1); is_min && jy <= std::min(ny - 1, iy + 1); ++jy)
                for (int jx = std::max(0, ix - 1); jx <= std::min(nx - 1, ix + 1); ++jx) {
                    if (jx == ix && jy == iy) continue;
                    if (mag[at(jx, jy)] < v) {
                        is_min = false;
                        break;
                    }
                }
            if (is_min)
                seeds.emplace_back(region.re_min + ix * dx, region.im_min + iy * dy);
        }
    }
    for (int iy = 0; iy + 1 < ny; ++iy) {
        for (int ix = 0; ix + 1 < nx; ++ix) {
            const double winding =
                wrap_angle(arg[at(ix + 1, iy)] - arg[at(ix, iy)]) +
                wrap_angle(arg[at(ix + 1, iy + 1)] - arg[at(ix + 1, iy)]) +
                wrap_angle(arg[at(ix, iy + 1)] - arg[at(ix + 1, iy + 1)]) +
                wrap_angle(arg[at(ix, iy)] - arg[at(ix, iy + 1)]);
            if (std::abs(winding) > M_PI)
                seeds.emplace_back(region.re_min + (ix + 0.5) * dx,
                                   region.im_min + (iy + 0.5) * dy);
        }
    }

    const double step_cap =
        0.5 * std::max(region.re_max - region.re_min, region.im_max - region.im_min);
    const double merge_dist = 10.0 * tol;
    const double margin = 1e-9 * std::max(1.0, step_cap);

    ZeroSearch result;
    for (const cplx seed : seeds) {
        const NewtonOutcome n = newton_refine(fn, seed, tol, step_cap);
        if (!n.converged) {
            result.dropped.push_back({seed, n.z, n.residual, n.iterations});
            continue;
        }
        if (!region.contains(n.z, margin)) continue;  // genuine zero, out of scope
        bool duplicate = false;
        for (auto& r : result.roots) {
            if (std::abs(r.freq - n.z) <= merge_dist) {
                duplicate = true;
                if (n.residual < r.residual) {
                    r.freq = n.z;
                    r.residual = n.residual;
                    r.iterations = n.iterations;
                }
                break;
            }
        }
        if (!duplicate)
            result.roots.push_back({n.z, MatrixEntry::M22, n.residual, n.iterations});
    }

    std::sort(result.roots.begin(), result.roots.end(), [](const RootResult& a,
                                                           const RootResult& b) {
        if (a.freq.real() != b.freq.real()) return a.freq.real() < b.freq.real();
        return a.freq.imag() < b.freq.imag();
    });
    return result;
}

ZeroSearch find_zeros(const StructureSpec& spec, MatrixEntry target, const SearchRegion& region,
                      double tol) {
    auto entry = [&spec, target](cplx delta) -> cplx {
        const TransferMatrix m = build_structure(spec, delta);
        return target == MatrixEntry::M22 ? m.m22 : m.m11;
    };
    ZeroSearch zs = find_zeros(entry, region, tol);
    for (auto& r : zs.roots) r.target = target;
    return zs;
}

namespace {

// Imaginary part of the M22 zero nearest the real axis; the quantity whose
// sign change in gain brackets the lasing threshold.
double nearest_zero_im(const std::function<StructureSpec(double)>& family, double g,
                       const SearchRegion& region, double tol) {
    const ZeroSearch zs = find_zeros(family(g), MatrixEntry::M22, region, tol);
    if (zs.roots.empty())
        throw ThresholdNotBracketed("no M22 zeros found in the search region at gain " +
                                    std::to_string(g));
    double best = zs.roots.front().freq.imag();
    for (const auto& r : zs.roots)
        if (std::abs(r.freq.imag()) < std::abs(best)) best = r.freq.imag();
    return best;
}

}  // namespace

ThresholdResult lasing_threshold(const std::function<StructureSpec(double)>& family, double g_lo,
                                 double g_hi, const SearchRegion& region, double g_tol,
                                 double root_tol) {
    if (!(g_lo < g_hi)) throw std::invalid_argument("lasing_threshold: need g_lo < g_hi");
    if (!(g_tol > 0.0) || !(root_tol > 0.0))
        throw std::invalid_argument("lasing_threshold: tolerances must be > 0");

    double e_lo = nearest_zero_im(family, g_lo, region, root_tol);
    double e_hi = nearest_zero_im(family, g_hi, region, root_tol);
    double lo = g_lo, hi = g_hi;
    if (e_lo == 0.0) {
        hi = lo;
    } else if (e_hi == 0.0) {
        lo = hi;
    } else if (std::signbit(e_lo) == std::signbit(e_hi)) {
        throw ThresholdNotBracketed(
            "M22 zero does not cross the real axis in the gain range [" + std::to_string(g_lo) +
            ", " + std::to_string(g_hi) + "]");
    }

    ThresholdResult result;
    while (hi - lo > g_tol) {
        const double mid = 0.5 * (lo + hi);
        const double e_mid = nearest_zero_im(family, mid, region, root_tol);
        ++result.iterations;
        if (e_mid == 0.0) {
            lo = hi = mid;
            break;
        }
        if (std::signbit(e_mid) == std::signbit(e_lo)) {
            lo = mid;
            e_lo = e_mid;
        } else {
            hi = mid;
        }
    }
    result.g_th = 0.5 * (lo + hi);

    const ZeroSearch zs = find_zeros(family(result.g_th), MatrixEntry::M22, region, root_tol);
    double axis_tol = 50.0 * g_tol;
    auto collect = [&](double band) {
        result.freqs.clear();
        result.residuals.clear();
        for (const auto& r : zs.roots) {
            if (std::abs(r.freq.imag()) <= band) {
                result.freqs.push_back(r.freq.real());
                result.residuals.push_back(r.residual);
            }
        }
    };
    collect(axis_tol);
    if (result.freqs.empty() && !zs.roots.empty()) {
        // fall back to the nearest zero so the report is never empty
        double band = 0.0;
        for (const auto& r : zs.roots)
            band = band == 0.0 ? std::abs(r.freq.imag())
                               : std::min(band, std::abs(r.freq.imag()));
        collect(band * (1.0 + 1e-12));
    }
    return result;
}

PtMatrixReport verify_pt_matrix(const StructureSpec& spec, std::span<const cplx> freq_samples,
                                double tol) {
    if (!(tol > 0.0)) throw std::invalid_argument("verify_pt_matrix: tol must be > 0");
    PtMatrixReport report;
    for (const cplx w : freq_samples) {
        const TransferMatrix m = build_structure(spec, w);
        const TransferMatrix mc = build_structure(spec, std::conj(w));
        const double scale = std::max(m.norm_max(), mc.norm_max());
        if (scale == 0.0) continue;
        const double d_diag = std::abs(m.m22 - std::conj(mc.m11)) / scale;
        const double d_m12 = std::abs(m.m12 + std::conj(mc.m12)) / scale;
        const double d_m21 = std::abs(m.m21 + std::conj(mc.m21)) / scale;
        if (std::max({d_diag, d_m12, d_m21}) >
            std::max({report.worst_diag, report.worst_m12, report.worst_m21}))
            report.worst_freq = w;
        report.worst_diag = std::max(report.worst_diag, d_diag);
        report.worst_m12 = std::max(report.worst_m12, d_m12);
        report.worst_m21 = std::max(report.worst_m21, d_m21);
        ++report.checked;
    }
    report.pass = report.worst() <= tol;
    return report;
}

namespace {

bool conjugate_mirror_equal(const StackElement& a, const StackElement& b) {
    // b must equal the complex-conjugated, spatially mirrored a.
    constexpr double rel = 1e-12;
    auto eq = [](double x, double y) {
        return std::abs(x - y) <= rel * std::max({1.0, std::abs(x), std::abs(y)});
    };
    if (a.index() != b.index()) return false;
    if (const auto* sa = std::get_if<Slab>(&a)) {
        const auto& sb = std::get<Slab>(b);
        return eq(sa->n.real(), sb.n.real()) && eq(sa->n.imag(), -sb.n.imag()) &&
               eq(sa->kl, sb.kl);
    }
    if (const auto* ga = std::get_if<GainSlab>(&a)) {
        const auto& gb = std::get<GainSlab>(b);
        return eq(ga->gl, -gb.gl) && eq(ga->delta0, gb.delta0);
    }
    if (const auto* da = std::get_if<DfbHalf>(&a)) {
        const auto& db = std::get<DfbHalf>(b);
        return eq(da->q0l, db.q0l) && eq(da->gl, -db.gl) &&
               eq(da->delta_scale, db.delta_scale) && eq(da->delta_offset, db.delta_offset);
    }
    if (const auto* pa = std::get_if<Propagation>(&a)) {
        const auto& pb = std::get<Propagation>(b);
        return eq(pa->phase, pb.phase);
    }
    return false;
}

}  // namespace

bool verify_pt_epsilon(const StructureSpec& spec) {
    if (spec.elements.empty()) throw std::invalid_argument("structure: empty element list");
    for (const auto& e : spec.elements) {
        if (std::holds_alternative<Mirror>(e) || std::holds_alternative<NearThreshold>(e))
            throw NotCheckable(
                "epsilon profile check requires spatial elements only (no mirror or "
                "near-threshold entries)");
    }
    const size_t n = spec.elements.size();
    for (size_t i = 0; i < n; ++i) {
        if (!conjugate_mirror_equal(spec.elements[i], spec.elements[n - 1 - i])) return false;
    }
    return true;
}

CoincidenceReport cpa_lasing_coincidence(const std::function<StructureSpec(double)>& family,
                                         double g, const SearchRegion& region, double tol) {
    if (!(tol > 0.0)) throw std::invalid_argument("cpa_lasing_coincidence: tol must be > 0");
    const StructureSpec spec = family(g);
    const double root_tol = std::min(1e-9, tol * 1e-3);
    const ZeroSearch z22 = find_zeros(spec, MatrixEntry::M22, region, root_tol);
    const ZeroSearch z11 = find_zeros(spec, MatrixEntry::M11, region, root_tol);

    CoincidenceReport report;
    std::vector<double> real22, real11;
    for (const auto& r : z22.roots)
        if (std::abs(r.freq.imag()) <= tol) real22.push_back(r.freq.real());
    for (const auto& r : z11.roots)
        if (std::abs(r.freq.imag()) <= tol) real11.push_back(r.freq.real());
    report.real_m11 = real11;

    for (const double f22 : real22) {
        double best = std::numeric_limits<double>::infinity();
        double best_f11 = 0.0;
        for (const double f11 : real11) {
            if (std::abs(f11 - f22) < best) {
                best = std::abs(f11 - f22);
                best_f11 = f11;
            }
        }
        if (best <= tol) {
            report.pairs.push_back({f22, best_f11, best});
            report.worst_mismatch = std::max(report.worst_mismatch, best);
        } else {
            report.unmatched_m22.push_back(f22);
        }
    }
    report.pass = !real22.empty() && report.unmatched_m22.empty();
    return report;
}

}  // namespace ptcpa
