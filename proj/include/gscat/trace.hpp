#pragma once

#include <array>
#include <cstdint>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "gscat/rasterizer.hpp"

namespace gscat {

/// One Gaussian's entry in a tile's depth-ordered work stream.
struct TraceItem {
    std::uint32_t gauss = 0;                     // splat index, frame-wide
    std::uint8_t stage1 = 0;                     // 4-bit sub-tile rect mask
    std::array<std::uint8_t, 4> mini{};          // per-sub-tile mini-tile masks
    bool dense = false;                          // effective sampling for this Gaussian
};

/// Per-tile work stream plus imported early-termination state: kill_*[ch] is
/// the list position whose blend killed channel ch's last pixel (-1 = never),
/// recorded separately for the contribution-tested work set and for the
/// stage-1-only work set (the no-CTU baseline).
struct TileTrace {
    int tile_x = 0, tile_y = 0;
    std::vector<TraceItem> items;
    std::array<std::int32_t, 16> kill_cat;
    std::array<std::int32_t, 16> kill_stage1;

    TileTrace() {
        kill_cat.fill(-1);
        kill_stage1.fill(-1);
    }
};

struct FrameTrace {
    int width = 0, height = 0;
    std::vector<TileTrace> tiles;
};

/// Build the simulator input from the functional pipeline so the simulator
/// and the renderer agree on the work set: stage-1 masks and mini-tile masks
/// come from the same predicates the renderer uses, and per-channel kill
/// positions are replayed with the renderer's own blending.
inline FrameTrace build_trace(const std::vector<Splat2D>& splats, const Camera& cam,
                              SamplingMode sampling, NumericProfile profile,
                              const RenderConfig& cfg) {
    FrameTrace trace;
    trace.width = cam.width;
    trace.height = cam.height;

    Strategy cat_strategy{StrategyKind::HierCAT, sampling, profile};
    Strategy stage1_strategy{StrategyKind::SubtileAABB, sampling, profile};
    Binning bins = bin_gaussians(splats, cam, cat_strategy);

    Image scratch(cam.width, cam.height);
    RenderStats scratch_stats;
    scratch_stats.per_pixel_gaussians.assign(std::size_t(cam.width) * cam.height, 0);

    for (int ty = 0; ty < bins.tiles_y; ++ty) {
        for (int tx = 0; tx < bins.tiles_x; ++tx) {
            auto& list = bins.tile_lists[std::size_t(ty) * bins.tiles_x + tx];
            if (list.empty()) continue;
            depth_sort(list, splats);

            TileTrace tt;
            tt.tile_x = tx;
            tt.tile_y = ty;
            TileCoords tile{tx, ty, 0, 0};
            for (std::uint32_t idx : list) {
                const Splat2D& s = splats[idx];
                TraceItem item;
                item.gauss = idx;
                item.dense = effective_sampling(sampling, s.spiky) == Sampling::Dense;
                PixelRect rect = aabb_rect(s, cam.width, cam.height);
                TileCoords tc = tile;
                for (int st = 0; st < 4; ++st) {
                    tc.subtile = st;
                    if (rect_hits_tile(rect, tc, GridLevel::Subtile)) {
                        item.stage1 |= std::uint8_t(1u << st);
                        item.mini[st] = cat_test(s, tc, sampling, profile).bits;
                    }
                }
                tt.items.push_back(item);
            }

            TileObserver obs;
            obs.minitile_dead = [&tt](int pos, int ch) { tt.kill_cat[std::size_t(ch)] = pos; };
            render_tile(tile, list, splats, cat_strategy, cfg, cam, scratch, scratch_stats, &obs);
            obs.minitile_dead = [&tt](int pos, int ch) { tt.kill_stage1[std::size_t(ch)] = pos; };
            render_tile(tile, list, splats, stage1_strategy, cfg, cam, scratch, scratch_stats, &obs);

            trace.tiles.push_back(std::move(tt));
        }
    }
    return trace;
}

inline constexpr int kTraceFormatVersion = 1;

inline nlohmann::json trace_to_json(const FrameTrace& trace) {
    nlohmann::json root;
    root["version"] = kTraceFormatVersion;
    root["width"] = trace.width;
    root["height"] = trace.height;
    nlohmann::json tiles = nlohmann::json::array();
    for (const TileTrace& tt : trace.tiles) {
        nlohmann::json jt;
        jt["tile"] = {tt.tile_x, tt.tile_y};
        nlohmann::json items = nlohmann::json::array();
        for (const TraceItem& it : tt.items) {
            items.push_back({{"g", it.gauss},
                             {"s1", it.stage1},
                             {"m", {it.mini[0], it.mini[1], it.mini[2], it.mini[3]}},
                             {"d", it.dense}});
        }
        jt["items"] = std::move(items);
        jt["kill_cat"] = tt.kill_cat;
        jt["kill_stage1"] = tt.kill_stage1;
        tiles.push_back(std::move(jt));
    }
    root["tiles"] = std::move(tiles);
    return root;
}

inline FrameTrace trace_from_json(const nlohmann::json& root) {
    if (!root.contains("version") || root["version"].get<int>() != kTraceFormatVersion)
        throw IoError("trace: unsupported format version");
    FrameTrace trace;
    trace.width = root.at("width").get<int>();
    trace.height = root.at("height").get<int>();
    for (const auto& jt : root.at("tiles")) {
        TileTrace tt;
        tt.tile_x = jt.at("tile")[0].get<int>();
        tt.tile_y = jt.at("tile")[1].get<int>();
        for (const auto& ji : jt.at("items")) {
            TraceItem it;
            it.gauss = ji.at("g").get<std::uint32_t>();
            it.stage1 = std::uint8_t(ji.at("s1").get<int>());
            for (int k = 0; k < 4; ++k) it.mini[std::size_t(k)] = std::uint8_t(ji.at("m")[std::size_t(k)].get<int>());
            it.dense = ji.at("d").get<bool>();
            tt.items.push_back(it);
        }
        for (int k = 0; k < 16; ++k) {
            tt.kill_cat[std::size_t(k)] = jt.at("kill_cat")[std::size_t(k)].get<std::int32_t>();
            tt.kill_stage1[std::size_t(k)] = jt.at("kill_stage1")[std::size_t(k)].get<std::int32_t>();
        }
        trace.tiles.push_back(std::move(tt));
    }
    return trace;
}

inline void write_trace(const FrameTrace& trace, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("trace: cannot write " + path);
    out << trace_to_json(trace).dump() << "\n";
    if (!out) throw IoError("trace: write failed: " + path);
}

inline FrameTrace read_trace(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("trace: cannot open " + path);
    nlohmann::json root;
    try {
        in >> root;
    } catch (const nlohmann::json::exception& e) {
        throw IoError(std::string("trace: parse error: ") + e.what());
    }
    return trace_from_json(root);
}

}  // namespace gscat
