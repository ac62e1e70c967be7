#pragma once

#include <array>
#include <cmath>
#include <cstdint>

#include "gscat/quantize.hpp"
#include "gscat/tiles.hpp"

namespace gscat {

// Alpha below this never contributes to a pixel.
inline constexpr double kMinAlpha = 1.0 / 255.0;

/// Per-frame leader-pixel policy. The adaptive modes pick the per-Gaussian
/// sampling from its shape class.
enum class SamplingMode { UniformDense, UniformSparse, SmoothFocused, SpikyFocused };

/// Effective per-Gaussian sampling: Dense tests the 4 corner pixels of every
/// mini-tile, Sparse only the main-diagonal pair.
enum class Sampling { Dense, Sparse };

/// Arithmetic used inside the contribution test. Real is the double-precision
/// reference path; Full16/Full8 round every intermediate to one format; Mixed
/// computes the coordinate deltas in Fp16 and the quadratic accumulation in Fp8.
enum class NumericProfile { Real, Full16, Full8, Mixed };

inline Sampling effective_sampling(SamplingMode mode, bool spiky) {
    switch (mode) {
        case SamplingMode::UniformDense: return Sampling::Dense;
        case SamplingMode::UniformSparse: return Sampling::Sparse;
        case SamplingMode::SmoothFocused: return spiky ? Sampling::Sparse : Sampling::Dense;
        case SamplingMode::SpikyFocused: return spiky ? Sampling::Dense : Sampling::Sparse;
    }
    return Sampling::Dense;
}

/// One bit per mini-tile of a sub-tile. A set bit means at least one of that
/// mini-tile's leader pixels passed the contribution test.
struct MiniTileMask {
    std::uint8_t bits = 0;

    bool test(int minitile) const { return (bits >> minitile) & 1; }
    void set(int minitile) { bits |= std::uint8_t(1u << minitile); }
    bool subset_of(MiniTileMask o) const { return (bits & ~o.bits) == 0; }
    bool any() const { return bits != 0; }
};

struct LeaderSet {
    std::array<std::array<int, 2>, 4> px;  // (x, y) pixel coordinates
    int count = 0;
};

/// Leader pixels of one mini-tile. Dense: the four corners, offsets
/// (0,0),(3,0),(0,3),(3,3) from the mini-tile origin. Sparse: the
/// main-diagonal pair (0,0),(3,3).
inline LeaderSet leader_pixels(const TileCoords& minitile, Sampling sampling) {
    Span2 sp = level_span(minitile, GridLevel::Minitile);
    LeaderSet out;
    if (sampling == Sampling::Dense) {
        out.px = {{{sp.x0, sp.y0}, {sp.x1, sp.y0}, {sp.x0, sp.y1}, {sp.x1, sp.y1}}};
        out.count = 4;
    } else {
        out.px = {{{sp.x0, sp.y0}, {sp.x1, sp.y1}, {0, 0}, {0, 0}}};
        out.count = 2;
    }
    return out;
}

/// Four leader pixels at rectangle corners that share intermediate terms.
/// p_top and p_bot are the main-diagonal corners (p0 and p3); the implied
/// off-diagonal corners are p1 = (p_bot.x, p_top.y) and p2 = (p_top.x, p_bot.y).
/// owner[k] is the mini-tile (0..3 within the sub-tile) the k-th corner tests.
struct PixelRectangle {
    Vec2 p_top, p_bot;
    std::array<int, 4> owner = {0, 0, 0, 0};
};

struct PrSet {
    std::array<PixelRectangle, 4> pr;
    int count = 0;
};

/// Pixel rectangles covering one sub-tile's leader set. Dense sampling forms
/// one PR per mini-tile (4 PRs); Sparse sampling forms two PRs spanning the
/// four mini-tiles, one from the (0,0)-offset leaders and one from the
/// (3,3)-offset leaders.
inline PrSet form_prs(const TileCoords& subtile, Sampling sampling) {
    Span2 sp = level_span(subtile, GridLevel::Subtile);
    PrSet out;
    if (sampling == Sampling::Dense) {
        for (int m = 0; m < 4; ++m) {
            double ox = sp.x0 + (m & 1) * kMinitileSize;
            double oy = sp.y0 + (m >> 1) * kMinitileSize;
            out.pr[m].p_top = {ox, oy};
            out.pr[m].p_bot = {ox + 3, oy + 3};
            out.pr[m].owner = {m, m, m, m};
        }
        out.count = 4;
    } else {
        out.pr[0].p_top = {double(sp.x0), double(sp.y0)};
        out.pr[0].p_bot = {double(sp.x0 + 4), double(sp.y0 + 4)};
        out.pr[0].owner = {0, 1, 2, 3};
        out.pr[1].p_top = {double(sp.x0 + 3), double(sp.y0 + 3)};
        out.pr[1].p_bot = {double(sp.x0 + 7), double(sp.y0 + 7)};
        out.pr[1].owner = {0, 1, 2, 3};
        out.count = 2;
    }
    return out;
}

/// Shared left-hand side of the contribution test, ln(255 * opacity).
/// Computed once per Gaussian; a value <= 0 means opacity <= 1/255 and the
/// Gaussian cannot contribute anywhere.
inline double shared_threshold(double opacity) { return std::log(255.0 * opacity); }

namespace detail {

inline double qident(double x) { return x; }
inline double qmixed_delta(double x) { return quantize_fp8(quantize_fp16(x)); }

struct PrtuRounding {
    double (*coord)(double);  // applied to the line-1 operands (pixel and mean coordinates)
    double (*delta)(double);  // applied to the line-1 subtraction result
    double (*quad)(double);   // applied to every multiply/add in the accumulation
};

// The coordinate subtraction distinguishes the schemes. Full8 quantizes the
// absolute coordinates themselves, which crushes the relative position of
// pixel and mean; Mixed subtracts in Fp16 and narrows only the small delta
// to Fp8 for the accumulation stage.
inline PrtuRounding prtu_rounding(NumericProfile profile) {
    switch (profile) {
        case NumericProfile::Full16: return {&quantize_fp16, &quantize_fp16, &quantize_fp16};
        case NumericProfile::Full8: return {&quantize_fp8, &quantize_fp8, &quantize_fp8};
        case NumericProfile::Mixed: return {&quantize_fp16, &qmixed_delta, &quantize_fp8};
        case NumericProfile::Real: break;
    }
    return {&qident, &qident, &qident};
}

}  // namespace detail

/// Gaussian weight E at the four corners of a pixel rectangle. The two
/// main-diagonal deltas are computed once and the squared/cross terms are
/// recombined for the off-diagonal corners:
///
///   E0 = sx_top + sy_top + t0      E1 = sx_bot + sy_top + t1
///   E2 = sx_top + sy_bot + t2      E3 = sx_bot + sy_bot + t3
///
/// with s = 0.5 * d^2 * conic_diag and t = dx * dy * conic_off. E equals the
/// exponent 0.5 * d^T Conic d of the falloff at each corner. Under a reduced
/// profile every multiply/add result is rounded (fixed left-to-right order);
/// the conic entries and the 0.5 constant are pre-quantized to the
/// accumulation format, the line-1 operands to the delta format.
inline std::array<double, 4> prtu_weights(Vec2 mu, double cxx, double cxy, double cyy,
                                          const PixelRectangle& pr, NumericProfile profile) {
    detail::PrtuRounding q = detail::prtu_rounding(profile);

    double mux = q.coord(mu.x);
    double muy = q.coord(mu.y);
    double dtx = q.delta(q.coord(pr.p_top.x) - mux);
    double dty = q.delta(q.coord(pr.p_top.y) - muy);
    double dbx = q.delta(q.coord(pr.p_bot.x) - mux);
    double dby = q.delta(q.coord(pr.p_bot.y) - muy);

    double half = q.quad(0.5);
    double qxx = q.quad(cxx);
    double qxy = q.quad(cxy);
    double qyy = q.quad(cyy);

    auto sq_term = [&](double d, double c) { return q.quad(q.quad(half * q.quad(d * d)) * c); };
    double sx_top = sq_term(dtx, qxx);
    double sy_top = sq_term(dty, qyy);
    double sx_bot = sq_term(dbx, qxx);
    double sy_bot = sq_term(dby, qyy);

    auto cross_term = [&](double dx, double dy) { return q.quad(q.quad(dx * dy) * qxy); };
    double t0 = cross_term(dtx, dty);
    double t1 = cross_term(dbx, dty);
    double t2 = cross_term(dtx, dby);
    double t3 = cross_term(dbx, dby);

    auto sum3 = [&](double a, double b, double c) { return q.quad(q.quad(a + b) + c); };
    return {sum3(sx_top, sy_top, t0), sum3(sx_bot, sy_top, t1), sum3(sx_top, sy_bot, t2),
            sum3(sx_bot, sy_bot, t3)};
}

namespace detail {

inline double quantize_threshold(double thr, NumericProfile profile) {
    switch (profile) {
        case NumericProfile::Full16:
        case NumericProfile::Mixed: return quantize_fp16(thr);
        case NumericProfile::Full8: return quantize_fp8(thr);
        case NumericProfile::Real: break;
    }
    return thr;
}

}  // namespace detail

/// Mini-tile contribution test for one (splat, sub-tile) pair. A corner
/// contributes when its weight E stays strictly below ln(255 * o); the mask
/// bit of the owning mini-tile is the OR of its contributing corners.
/// Opacity at or below 1/255 clears the whole mask regardless of geometry.
inline MiniTileMask cat_test(const Splat2D& splat, const TileCoords& subtile, SamplingMode mode,
                             NumericProfile profile) {
    MiniTileMask mask;
    double thr = shared_threshold(splat.opacity);
    if (thr <= 0.0) return mask;
    double thr_q = detail::quantize_threshold(thr, profile);

    Sampling sampling = effective_sampling(mode, splat.spiky);
    PrSet prs = form_prs(subtile, sampling);
    for (int i = 0; i < prs.count; ++i) {
        std::array<double, 4> e =
            prtu_weights(splat.mu, splat.cxx, splat.cxy, splat.cyy, prs.pr[i], profile);
        for (int k = 0; k < 4; ++k) {
            if (e[k] < thr_q) mask.set(prs.pr[i].owner[k]);
        }
    }
    return mask;
}

}  // namespace gscat
