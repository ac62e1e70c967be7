#pragma once

#include <algorithm>
#include <cmath>

#include "gscat/types.hpp"

namespace gscat {

// Pixel-block hierarchy: one 16x16 tile = 4 sub-tiles (8x8) = 16 mini-tiles (4x4).
inline constexpr int kTileSize = 16;
inline constexpr int kSubtileSize = 8;
inline constexpr int kMinitileSize = 4;

/// Inclusive pixel bounds, clipped to the frame. `empty` flags a rect that
/// fell entirely outside the frame.
struct PixelRect {
    int x0 = 0, x1 = -1, y0 = 0, y1 = -1;
    bool empty = true;
};

/// Address of a tile plus a sub-tile (0..3) and mini-tile (0..3) within it.
/// Sub-tile and mini-tile indices are row-major: 0 = top-left, 1 = top-right,
/// 2 = bottom-left, 3 = bottom-right.
struct TileCoords {
    int tile_x = 0, tile_y = 0;
    int subtile = 0;
    int minitile = 0;
};

enum class GridLevel { Tile, Subtile, Minitile };

struct Span2 {
    int x0 = 0, y0 = 0, x1 = 0, y1 = 0;  // inclusive pixel bounds
};

inline Span2 level_span(const TileCoords& t, GridLevel level) {
    int x = t.tile_x * kTileSize;
    int y = t.tile_y * kTileSize;
    int size = kTileSize;
    if (level != GridLevel::Tile) {
        x += (t.subtile & 1) * kSubtileSize;
        y += (t.subtile >> 1) * kSubtileSize;
        size = kSubtileSize;
    }
    if (level == GridLevel::Minitile) {
        x += (t.minitile & 1) * kMinitileSize;
        y += (t.minitile >> 1) * kMinitileSize;
        size = kMinitileSize;
    }
    return {x, y, x + size - 1, y + size - 1};
}

/// Marginal std-devs of the splat's dilated covariance, reconstructed from
/// the eigen pair (avoids re-inverting the conic).
inline Vec2 marginal_sigma(const Splat2D& s) {
    double ax2 = s.axis_dir.x * s.axis_dir.x;
    double ay2 = s.axis_dir.y * s.axis_dir.y;
    double vxx = s.lambda1 * ax2 + s.lambda2 * ay2;
    double vyy = s.lambda1 * ay2 + s.lambda2 * ax2;
    return {std::sqrt(std::max(0.0, vxx)), std::sqrt(std::max(0.0, vyy))};
}

/// 3-sigma axis-aligned bounding rect of a splat, floored/ceiled to pixel
/// indices and clipped to the frame.
inline PixelRect aabb_rect(const Splat2D& s, int width, int height) {
    Vec2 sigma = marginal_sigma(s);
    int x0 = static_cast<int>(std::floor(s.mu.x - 3.0 * sigma.x));
    int x1 = static_cast<int>(std::ceil(s.mu.x + 3.0 * sigma.x));
    int y0 = static_cast<int>(std::floor(s.mu.y - 3.0 * sigma.y));
    int y1 = static_cast<int>(std::ceil(s.mu.y + 3.0 * sigma.y));
    PixelRect r;
    r.x0 = std::max(x0, 0);
    r.x1 = std::min(x1, width - 1);
    r.y0 = std::max(y0, 0);
    r.y1 = std::min(y1, height - 1);
    r.empty = r.x0 > r.x1 || r.y0 > r.y1;
    return r;
}

/// Closed-interval overlap between a rect and the pixel span of a tile,
/// sub-tile, or mini-tile.
inline bool rect_hits_tile(const PixelRect& rect, const TileCoords& t, GridLevel level) {
    if (rect.empty) return false;
    Span2 s = level_span(t, level);
    return rect.x0 <= s.x1 && rect.x1 >= s.x0 && rect.y0 <= s.y1 && rect.y1 >= s.y0;
}

namespace detail {

// One separating-axis check. The box interval is widened with floor/ceil
// (pixel-index semantics); the square side is the exact min/max projection
// of its corner pixels, so an axis-aligned oriented box degenerates to
// exactly the pixel-index rect test.
inline bool sat_overlap(double box_center, double box_radius, double other_lo, double other_hi) {
    double lo = std::floor(box_center - box_radius);
    double hi = std::ceil(box_center + box_radius);
    return lo <= other_hi && hi >= other_lo;
}

}  // namespace detail

/// Oriented-box test against a sub-tile's 8x8 pixel square. The box is
/// centered at the splat mean, oriented along the major axis, with
/// 3*sqrt(lambda) half-extents; candidate separating axes are the square's
/// two frame axes and the box's two axes. Intersected with the 3-sigma rect
/// test so the oriented refinement never accepts outside the axis-aligned
/// bound.
inline bool obb_hits_subtile(const Splat2D& s, const TileCoords& t, int width, int height) {
    if (!rect_hits_tile(aabb_rect(s, width, height), t, GridLevel::Subtile)) return false;

    Span2 sq = level_span(t, GridLevel::Subtile);
    Vec2 u = s.axis_dir;
    Vec2 v{-u.y, u.x};
    double e1 = 3.0 * std::sqrt(s.lambda1);
    double e2 = 3.0 * std::sqrt(s.lambda2);

    // Frame axes.
    double rx = e1 * std::abs(u.x) + e2 * std::abs(v.x);
    double ry = e1 * std::abs(u.y) + e2 * std::abs(v.y);
    if (!detail::sat_overlap(s.mu.x, rx, sq.x0, sq.x1)) return false;
    if (!detail::sat_overlap(s.mu.y, ry, sq.y0, sq.y1)) return false;

    // Box axes: project the square's corner pixels exactly.
    const double corners[4][2] = {{double(sq.x0), double(sq.y0)},
                                  {double(sq.x1), double(sq.y0)},
                                  {double(sq.x0), double(sq.y1)},
                                  {double(sq.x1), double(sq.y1)}};
    for (const Vec2* axis : {&u, &v}) {
        double lo = 0.0, hi = 0.0;
        for (int i = 0; i < 4; ++i) {
            double p = corners[i][0] * axis->x + corners[i][1] * axis->y;
            if (i == 0) {
                lo = hi = p;
            } else {
                lo = std::min(lo, p);
                hi = std::max(hi, p);
            }
        }
        double c = s.mu.x * axis->x + s.mu.y * axis->y;
        double e = axis == &u ? e1 : e2;
        if (!detail::sat_overlap(c, e, lo, hi)) return false;
    }
    return true;
}

/// Number of size x size cells a non-empty rect overlaps (binning duplicate count).
inline std::int64_t overlapped_cells(const PixelRect& rect, int cell) {
    if (rect.empty) return 0;
    std::int64_t nx = rect.x1 / cell - rect.x0 / cell + 1;
    std::int64_t ny = rect.y1 / cell - rect.y0 / cell + 1;
    return nx * ny;
}

}  // namespace gscat
