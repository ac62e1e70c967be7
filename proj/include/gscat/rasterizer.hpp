#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <vector>

#include "gscat/cat.hpp"
#include "gscat/image.hpp"
#include "gscat/projection.hpp"
#include "gscat/tiles.hpp"

namespace gscat {

/// Culling strategy for binning and per-tile pixel selection.
///   TileAABB     16x16 rect test, every pixel of a binned tile is processed.
///   SubtileAABB  stage-1 only: pixels of 8x8 sub-tiles passing the rect test.
///   SubtileOBB   pixels of sub-tiles passing the oriented-box test.
///   HierCAT      stage-1 sub-tile rect test, then the mini-tile contribution
///                test; pixels of mini-tiles with a set mask bit.
///   Exhaustive   oracle: like HierCAT but every pixel of a mini-tile acts as
///                a leader, so a mini-tile is skipped only when no pixel of it
///                can pass the alpha threshold.
enum class StrategyKind { TileAABB, SubtileAABB, SubtileOBB, HierCAT, Exhaustive };

struct Strategy {
    StrategyKind kind = StrategyKind::TileAABB;
    SamplingMode sampling = SamplingMode::UniformDense;  // HierCAT only
    NumericProfile profile = NumericProfile::Real;       // HierCAT only
};

inline constexpr double kAlphaClamp = 0.99;
inline constexpr double kTransmittanceFloor = 1e-4;

struct RenderConfig {
    double background[3] = {0.0, 0.0, 0.0};
    bool early_termination = true;
    int sh_degree = 3;
};

struct RenderStats {
    int width = 0, height = 0;
    std::vector<std::uint32_t> per_pixel_gaussians;  // alpha evaluations at alive pixels
    std::int64_t duplicates16 = 0;  // binned copies if binning ran at each granularity
    std::int64_t duplicates8 = 0;
    std::int64_t duplicates4 = 0;
    std::int64_t skipped_early_term = 0;  // evaluations avoided at dead pixels
    std::int64_t degenerate = 0;
    std::int64_t culled = 0;

    double mean_per_pixel() const {
        if (per_pixel_gaussians.empty()) return 0.0;
        double s = 0.0;
        for (auto v : per_pixel_gaussians) s += v;
        return s / double(per_pixel_gaussians.size());
    }
};

struct Binning {
    int tiles_x = 0, tiles_y = 0;
    std::vector<std::vector<std::uint32_t>> tile_lists;  // splat indices, stable input order
    std::int64_t duplicates16 = 0, duplicates8 = 0, duplicates4 = 0;
};

/// Per-tile lists of splats whose stage-1 predicate passes for that tile.
/// Duplicate counters are tallied from the 3-sigma rect at all three
/// granularities regardless of strategy, for reporting.
inline Binning bin_gaussians(const std::vector<Splat2D>& splats, const Camera& cam,
                             const Strategy& strategy) {
    Binning b;
    b.tiles_x = cam.width / kTileSize;
    b.tiles_y = cam.height / kTileSize;
    b.tile_lists.assign(std::size_t(b.tiles_x) * b.tiles_y, {});

    for (std::uint32_t i = 0; i < splats.size(); ++i) {
        const Splat2D& s = splats[i];
        PixelRect rect = aabb_rect(s, cam.width, cam.height);
        b.duplicates16 += overlapped_cells(rect, kTileSize);
        b.duplicates8 += overlapped_cells(rect, kSubtileSize);
        b.duplicates4 += overlapped_cells(rect, kMinitileSize);
        if (rect.empty) continue;

        int tx0 = rect.x0 / kTileSize, tx1 = rect.x1 / kTileSize;
        int ty0 = rect.y0 / kTileSize, ty1 = rect.y1 / kTileSize;
        for (int ty = ty0; ty <= ty1; ++ty) {
            for (int tx = tx0; tx <= tx1; ++tx) {
                TileCoords tc{tx, ty, 0, 0};
                bool hit;
                if (strategy.kind == StrategyKind::SubtileOBB) {
                    hit = false;
                    for (int st = 0; st < 4 && !hit; ++st) {
                        tc.subtile = st;
                        hit = obb_hits_subtile(s, tc, cam.width, cam.height);
                    }
                } else {
                    hit = rect_hits_tile(rect, tc, GridLevel::Tile);
                }
                if (hit) b.tile_lists[std::size_t(ty) * b.tiles_x + tx].push_back(i);
            }
        }
    }
    return b;
}

/// Stable ascending sort by camera-space depth; ties keep input order.
inline void depth_sort(std::vector<std::uint32_t>& list, const std::vector<Splat2D>& splats) {
    std::stable_sort(list.begin(), list.end(), [&](std::uint32_t a, std::uint32_t b) {
        return splats[a].depth < splats[b].depth;
    });
}

/// Hooks for the pipeline-trace builder and consistency checks. `channel` is
/// subtile * 4 + minitile (0..15 within the tile); `list_pos` indexes the
/// depth-sorted tile list.
struct TileObserver {
    std::function<void(int list_pos, int channel)> work_item;      // >= 1 alive pixel seen
    std::function<void(int list_pos, int channel)> minitile_dead;  // all 16 pixels now dead
};

namespace detail {

inline MiniTileMask exhaustive_mask(const Splat2D& s, const TileCoords& subtile) {
    MiniTileMask mask;
    TileCoords tc = subtile;
    for (int m = 0; m < 4; ++m) {
        tc.minitile = m;
        Span2 sp = level_span(tc, GridLevel::Minitile);
        for (int y = sp.y0; y <= sp.y1 && !mask.test(m); ++y) {
            for (int x = sp.x0; x <= sp.x1; ++x) {
                double alpha =
                    std::min(kAlphaClamp, s.opacity * std::exp(-s.falloff_exponent(x, y)));
                if (!(alpha < kMinAlpha)) {
                    mask.set(m);
                    break;
                }
            }
        }
    }
    return mask;
}

// Active mini-tiles of one tile for one splat, as four 4-bit masks.
inline std::array<MiniTileMask, 4> active_minitiles(const Splat2D& s, const TileCoords& tile,
                                                    const Strategy& strategy, const Camera& cam) {
    std::array<MiniTileMask, 4> out{};
    TileCoords tc = tile;
    if (strategy.kind == StrategyKind::TileAABB) {
        for (auto& m : out) m.bits = 0xF;
        return out;
    }
    PixelRect rect;
    if (strategy.kind != StrategyKind::SubtileOBB) rect = aabb_rect(s, cam.width, cam.height);
    for (int st = 0; st < 4; ++st) {
        tc.subtile = st;
        switch (strategy.kind) {
            case StrategyKind::SubtileAABB:
                if (rect_hits_tile(rect, tc, GridLevel::Subtile)) out[st].bits = 0xF;
                break;
            case StrategyKind::SubtileOBB:
                if (obb_hits_subtile(s, tc, cam.width, cam.height)) out[st].bits = 0xF;
                break;
            case StrategyKind::HierCAT:
                if (rect_hits_tile(rect, tc, GridLevel::Subtile))
                    out[st] = cat_test(s, tc, strategy.sampling, strategy.profile);
                break;
            case StrategyKind::Exhaustive:
                if (rect_hits_tile(rect, tc, GridLevel::Subtile)) out[st] = exhaustive_mask(s, tc);
                break;
            case StrategyKind::TileAABB: break;
        }
    }
    return out;
}

}  // namespace detail

/// Front-to-back alpha blending of one tile's depth-sorted list. Active
/// pixels are chosen per strategy; each active alive pixel evaluates alpha in
/// double precision, clamps it to 0.99, skips below 1/255, and otherwise
/// composites. A pixel dies when its transmittance drops under 1e-4; the tile
/// finishes early once every pixel is dead.
inline void render_tile(const TileCoords& tile, const std::vector<std::uint32_t>& sorted_list,
                        const std::vector<Splat2D>& splats, const Strategy& strategy,
                        const RenderConfig& cfg, const Camera& cam, Image& image,
                        RenderStats& stats, const TileObserver* observer = nullptr) {
    Span2 tile_span = level_span(tile, GridLevel::Tile);

    std::array<double, 256> transmittance;
    transmittance.fill(1.0);
    std::array<double, 256 * 3> accum{};
    std::array<bool, 256> alive;
    alive.fill(true);
    std::array<int, 16> minitile_alive;
    minitile_alive.fill(16);
    int tile_alive = 256;

    for (int k = 0; k < int(sorted_list.size()) && tile_alive > 0; ++k) {
        const Splat2D& s = splats[sorted_list[std::size_t(k)]];
        std::array<MiniTileMask, 4> active = detail::active_minitiles(s, tile, strategy, cam);

        for (int st = 0; st < 4; ++st) {
            for (int m = 0; m < 4; ++m) {
                if (!active[st].test(m)) continue;
                int channel = st * 4 + m;
                if (minitile_alive[channel] == 0) continue;  // whole mini-tile dead: skipped work
                if (observer && observer->work_item) observer->work_item(k, channel);

                TileCoords tc = tile;
                tc.subtile = st;
                tc.minitile = m;
                Span2 sp = level_span(tc, GridLevel::Minitile);
                for (int py = sp.y0; py <= sp.y1; ++py) {
                    for (int px = sp.x0; px <= sp.x1; ++px) {
                        int local = (py - tile_span.y0) * kTileSize + (px - tile_span.x0);
                        if (!alive[local]) {
                            stats.skipped_early_term++;
                            continue;
                        }
                        stats.per_pixel_gaussians[std::size_t(py) * cam.width + px]++;
                        double alpha =
                            s.opacity * std::exp(-s.falloff_exponent(double(px), double(py)));
                        if (alpha > kAlphaClamp) alpha = kAlphaClamp;
                        if (alpha < kMinAlpha) continue;
                        double t = transmittance[local];
                        accum[std::size_t(local) * 3 + 0] += t * alpha * s.color[0];
                        accum[std::size_t(local) * 3 + 1] += t * alpha * s.color[1];
                        accum[std::size_t(local) * 3 + 2] += t * alpha * s.color[2];
                        t *= 1.0 - alpha;
                        transmittance[local] = t;
                        if (cfg.early_termination && t < kTransmittanceFloor) {
                            alive[local] = false;
                            minitile_alive[channel]--;
                            tile_alive--;
                            if (minitile_alive[channel] == 0 && observer && observer->minitile_dead)
                                observer->minitile_dead(k, channel);
                        }
                    }
                }
            }
        }
    }

    for (int py = tile_span.y0; py <= tile_span.y1; ++py) {
        for (int px = tile_span.x0; px <= tile_span.x1; ++px) {
            int local = (py - tile_span.y0) * kTileSize + (px - tile_span.x0);
            double t = transmittance[local];
            for (int c = 0; c < 3; ++c)
                image.at(px, py, c) = accum[std::size_t(local) * 3 + c] + t * cfg.background[c];
        }
    }
}

struct FrameResult {
    Image image;
    RenderStats stats;
};

inline std::vector<Splat2D> project_scene(const std::vector<Gaussian3D>& scene, const Camera& cam,
                                          int sh_degree, ProjectStats* pstats = nullptr) {
    std::vector<Splat2D> splats;
    splats.reserve(scene.size());
    for (const Gaussian3D& g : scene) {
        if (auto s = project(g, cam, sh_degree, pstats)) splats.push_back(*s);
    }
    return splats;
}

/// Project, bin, depth-sort, and blend every tile. Deterministic for fixed inputs.
inline FrameResult render_frame(const std::vector<Gaussian3D>& scene, const Camera& cam,
                                const Strategy& strategy, const RenderConfig& cfg) {
    cam.validate();
    ProjectStats pstats;
    std::vector<Splat2D> splats = project_scene(scene, cam, cfg.sh_degree, &pstats);

    FrameResult out;
    out.image = Image(cam.width, cam.height);
    out.stats.width = cam.width;
    out.stats.height = cam.height;
    out.stats.per_pixel_gaussians.assign(std::size_t(cam.width) * cam.height, 0);
    out.stats.degenerate = pstats.degenerate;
    out.stats.culled = pstats.culled;

    Binning bins = bin_gaussians(splats, cam, strategy);
    out.stats.duplicates16 = bins.duplicates16;
    out.stats.duplicates8 = bins.duplicates8;
    out.stats.duplicates4 = bins.duplicates4;

    for (int ty = 0; ty < bins.tiles_y; ++ty) {
        for (int tx = 0; tx < bins.tiles_x; ++tx) {
            auto& list = bins.tile_lists[std::size_t(ty) * bins.tiles_x + tx];
            depth_sort(list, splats);
            TileCoords tile{tx, ty, 0, 0};
            render_tile(tile, list, splats, strategy, cfg, cam, out.image, out.stats);
        }
    }
    return out;
}

/// Peak signal-to-noise ratio in dB over [0,1]-clamped channels.
/// Identical images return +infinity.
inline double psnr(const Image& a, const Image& b) {
    if (a.width != b.width || a.height != b.height)
        throw ConfigError("psnr: image dimensions differ");
    double mse = 0.0;
    for (std::size_t i = 0; i < a.data.size(); ++i) {
        double d = std::clamp(a.data[i], 0.0, 1.0) - std::clamp(b.data[i], 0.0, 1.0);
        mse += d * d;
    }
    mse /= double(a.data.size());
    if (mse == 0.0) return std::numeric_limits<double>::infinity();
    return 10.0 * std::log10(1.0 / mse);
}

inline double mse(const Image& a, const Image& b) {
    if (a.width != b.width || a.height != b.height)
        throw ConfigError("mse: image dimensions differ");
    double m = 0.0;
    for (std::size_t i = 0; i < a.data.size(); ++i) {
        double d = std::clamp(a.data[i], 0.0, 1.0) - std::clamp(b.data[i], 0.0, 1.0);
        m += d * d;
    }
    return m / double(a.data.size());
}

}  // namespace gscat
