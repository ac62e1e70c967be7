#pragma once

#include <array>
#include <cstdint>
#include <deque>
#include <vector>

#include "gscat/cat.hpp"
#include "gscat/trace.hpp"
#include "gscat/types.hpp"

namespace gscat {

/// Rendering-stage hardware model. One contribution-test unit (CTU) per
/// sub-tile; each CTU feeds four per-mini-tile FIFOs; each FIFO drives a
/// channel whose VRU pair renders the mini-tile's 16 pixels. Four channels
/// per core, four cores per tile.
struct PipeConfig {
    int rendering_cores = 4;    // one per sub-tile
    int channels_per_core = 4;  // one per mini-tile
    int vrus_per_channel = 2;
    int fifo_depth = 16;
    int ctu_fifo_depth = 8;  // built-in FIFO holding completed masks during stalls
    int prtus_per_ctu = 2;   // pixel rectangles tested per cycle
    int ctu_latency = 3;     // intake-to-mask latency, cycles
    // VRU throughput in pixels per cycle. 1 models a pixel-pipelined unit
    // (a channel then occupies 16 / (vrus * rate) cycles per Gaussian);
    // 8 collapses a channel to one Gaussian per cycle.
    int vru_pixels_per_cycle = 1;
    SamplingMode sampling = SamplingMode::SmoothFocused;
    bool ctu_enabled = true;  // false: stage-1 masks feed the FIFOs directly

    int channel_count() const { return rendering_cores * channels_per_core; }

    int service_cycles() const { return 16 / (vrus_per_channel * vru_pixels_per_cycle); }

    void validate() const {
        if (rendering_cores != 4)
            throw ConfigError("pipe: rendering_cores must be 4 (one core per sub-tile)");
        if (channels_per_core != 4)
            throw ConfigError("pipe: channels_per_core must be 4 (one channel per mini-tile)");
        if (vrus_per_channel < 1 || vru_pixels_per_cycle < 1 ||
            16 % (vrus_per_channel * vru_pixels_per_cycle) != 0)
            throw ConfigError("pipe: vrus_per_channel * vru_pixels_per_cycle must divide 16");
        if (fifo_depth < 1) throw ConfigError("pipe: fifo_depth must be >= 1");
        if (ctu_fifo_depth < 1) throw ConfigError("pipe: ctu_fifo_depth must be >= 1");
        if (prtus_per_ctu < 1) throw ConfigError("pipe: prtus_per_ctu must be >= 1");
        if (ctu_latency < 1) throw ConfigError("pipe: ctu_latency must be >= 1");
    }
};

struct PipeStats {
    std::uint64_t cycles = 0;
    std::uint64_t ctu_stall_cycles = 0;
    std::uint64_t ctu_active_cycles = 0;
    double stall_rate = 0.0;
    std::array<std::uint64_t, 16> processed_per_channel{};
    std::array<std::uint64_t, 16> busy_cycles{};
    std::array<double, 16> vru_busy{};
    // Conservation counters: pushes == pops + discards on every run.
    std::uint64_t pushes = 0, pops = 0, discards = 0;
};

/// Optional event log for consistency checks against the functional renderer.
struct SimLog {
    std::array<std::vector<std::int32_t>, 16> rendered;   // list positions, pop order
    std::array<std::vector<std::int32_t>, 16> discarded;  // list positions dropped after kill
};

namespace detail {

struct SimChannel {
    std::deque<std::int32_t> fifo;  // list positions
    int busy = 0;
    bool dead = false;
    std::int32_t kill_pos = -1;
};

struct SimCtu {
    std::vector<std::int32_t> stream;  // list positions whose stage-1 mask includes this sub-tile
    std::size_t next = 0;
    int issue_remaining = 0;
    // in-flight masks: (ready_cycle, list position, mini-tile mask)
    std::deque<std::array<std::int64_t, 3>> in_flight;
    std::deque<std::array<std::int64_t, 2>> parked;  // (list position, mask)

    bool pending() const {
        return next < stream.size() || issue_remaining > 0 || !in_flight.empty() ||
               !parked.empty();
    }
};

}  // namespace detail

/// Cycle-approximate simulation of one tile's rendering stage.
///
/// Per cycle: (1) idle channels pop one entry and occupy the VRU pair for
/// service_cycles; popping the entry that killed the mini-tile flushes and
/// discards the rest of that FIFO; (2) each CTU moves masks whose latency
/// elapsed into its built-in FIFO and drains the oldest one when every live
/// target FIFO has space; (3) a CTU with an undrained mask stalls (no new
/// intake); otherwise it starts the next Gaussian, occupying the issue stage
/// for ceil(PRs / prtus_per_ctu) cycles (Dense forms 4 PRs, Sparse 2).
/// With ctu_enabled=false the stage-1 mask feeds the FIFOs directly at one
/// Gaussian per cycle.
inline PipeStats simulate_tile(const TileTrace& trace, const PipeConfig& cfg,
                               SimLog* log = nullptr) {
    cfg.validate();
    PipeStats stats;

    const int service = cfg.service_cycles();
    const auto& kill = cfg.ctu_enabled ? trace.kill_cat : trace.kill_stage1;

    std::array<detail::SimChannel, 16> channels;
    for (int ch = 0; ch < 16; ++ch) channels[std::size_t(ch)].kill_pos = kill[std::size_t(ch)];

    std::array<detail::SimCtu, 4> ctus;
    for (std::int32_t pos = 0; pos < std::int32_t(trace.items.size()); ++pos) {
        const TraceItem& it = trace.items[std::size_t(pos)];
        for (int st = 0; st < 4; ++st)
            if ((it.stage1 >> st) & 1) ctus[std::size_t(st)].stream.push_back(pos);
    }

    auto target_mask = [&](int subtile, std::int32_t pos) -> std::uint8_t {
        const TraceItem& it = trace.items[std::size_t(pos)];
        return cfg.ctu_enabled ? it.mini[std::size_t(subtile)] : std::uint8_t(0xF);
    };

    std::uint64_t cycle = 0;
    const std::uint64_t cycle_limit =
        (std::uint64_t(trace.items.size()) * 16 + 64) * std::uint64_t(service) * 8 + 1024;

    auto done = [&]() {
        for (const auto& c : ctus)
            if (c.pending()) return false;
        for (const auto& ch : channels)
            if (ch.busy > 0 || !ch.fifo.empty()) return false;
        return true;
    };

    while (!done()) {
        ++cycle;
        if (cycle > cycle_limit) throw std::logic_error("pipesim: cycle limit exceeded");

        // Channels.
        for (int chi = 0; chi < 16; ++chi) {
            detail::SimChannel& ch = channels[std::size_t(chi)];
            if (ch.busy == 0 && !ch.dead && !ch.fifo.empty()) {
                std::int32_t pos = ch.fifo.front();
                ch.fifo.pop_front();
                stats.pops++;
                stats.processed_per_channel[std::size_t(chi)]++;
                if (log) log->rendered[std::size_t(chi)].push_back(pos);
                ch.busy = service;
                if (pos == ch.kill_pos) {
                    ch.dead = true;
                    stats.discards += ch.fifo.size();
                    if (log)
                        for (std::int32_t d : ch.fifo) log->discarded[std::size_t(chi)].push_back(d);
                    ch.fifo.clear();
                }
            }
            if (ch.busy > 0) {
                stats.busy_cycles[std::size_t(chi)]++;
                ch.busy--;
            }
        }

        // CTUs.
        for (int st = 0; st < 4; ++st) {
            detail::SimCtu& ctu = ctus[std::size_t(st)];

            while (!ctu.in_flight.empty() && ctu.in_flight.front()[0] <= std::int64_t(cycle)) {
                ctu.parked.push_back({ctu.in_flight.front()[1], ctu.in_flight.front()[2]});
                ctu.in_flight.pop_front();
            }

            if (!ctu.parked.empty()) {
                std::int32_t pos = std::int32_t(ctu.parked.front()[0]);
                std::uint8_t mask = std::uint8_t(ctu.parked.front()[1]);
                bool can_push = true;
                for (int m = 0; m < 4; ++m) {
                    if (!((mask >> m) & 1)) continue;
                    detail::SimChannel& ch = channels[std::size_t(st * 4 + m)];
                    if (!ch.dead && int(ch.fifo.size()) >= cfg.fifo_depth) {
                        can_push = false;
                        break;
                    }
                }
                if (can_push) {
                    for (int m = 0; m < 4; ++m) {
                        if (!((mask >> m) & 1)) continue;
                        detail::SimChannel& ch = channels[std::size_t(st * 4 + m)];
                        stats.pushes++;
                        if (ch.dead) {
                            stats.discards++;
                            if (log) log->discarded[std::size_t(st * 4 + m)].push_back(pos);
                        } else {
                            ch.fifo.push_back(pos);
                        }
                    }
                    ctu.parked.pop_front();
                }
            }

            // Issue stage. Active cycles are issue work plus backpressure
            // stalls, so the stall rate is stalls / (work + stalls).
            if (ctu.issue_remaining > 0) {
                ctu.issue_remaining--;
                stats.ctu_active_cycles++;
            } else if (ctu.next < ctu.stream.size()) {
                bool backpressure =
                    !ctu.parked.empty() ||
                    int(ctu.in_flight.size() + ctu.parked.size()) >= cfg.ctu_fifo_depth;
                if (backpressure) {
                    stats.ctu_stall_cycles++;
                    stats.ctu_active_cycles++;
                } else {
                    std::int32_t pos = ctu.stream[ctu.next++];
                    const TraceItem& it = trace.items[std::size_t(pos)];
                    int cost = 1;
                    int latency = 1;
                    if (cfg.ctu_enabled) {
                        int prs = it.dense ? 4 : 2;
                        cost = (prs + cfg.prtus_per_ctu - 1) / cfg.prtus_per_ctu;
                        latency = cfg.ctu_latency;
                    }
                    ctu.issue_remaining = cost - 1;
                    ctu.in_flight.push_back({std::int64_t(cycle) + cost + latency - 2,
                                             std::int64_t(pos), std::int64_t(target_mask(st, pos))});
                    stats.ctu_active_cycles++;
                }
            }
        }
    }

    stats.cycles = cycle;
    stats.stall_rate = stats.ctu_active_cycles > 0
                           ? double(stats.ctu_stall_cycles) / double(stats.ctu_active_cycles)
                           : 0.0;
    for (int chi = 0; chi < 16; ++chi)
        stats.vru_busy[std::size_t(chi)] =
            cycle > 0 ? double(stats.busy_cycles[std::size_t(chi)]) / double(cycle) : 0.0;
    return stats;
}

/// Tiles run back-to-back on the same cores; frame stats are the per-tile sums.
inline PipeStats simulate_frame(const FrameTrace& trace, const PipeConfig& cfg,
                                SimLog* log = nullptr) {
    PipeStats total;
    for (const TileTrace& tt : trace.tiles) {
        SimLog tile_log;
        PipeStats s = simulate_tile(tt, cfg, log ? &tile_log : nullptr);
        total.cycles += s.cycles;
        total.ctu_stall_cycles += s.ctu_stall_cycles;
        total.ctu_active_cycles += s.ctu_active_cycles;
        total.pushes += s.pushes;
        total.pops += s.pops;
        total.discards += s.discards;
        for (int ch = 0; ch < 16; ++ch) {
            total.processed_per_channel[std::size_t(ch)] += s.processed_per_channel[std::size_t(ch)];
            total.busy_cycles[std::size_t(ch)] += s.busy_cycles[std::size_t(ch)];
        }
        if (log)
            for (int ch = 0; ch < 16; ++ch) {
                auto& r = tile_log.rendered[std::size_t(ch)];
                auto& d = tile_log.discarded[std::size_t(ch)];
                log->rendered[std::size_t(ch)].insert(log->rendered[std::size_t(ch)].end(), r.begin(), r.end());
                log->discarded[std::size_t(ch)].insert(log->discarded[std::size_t(ch)].end(), d.begin(), d.end());
            }
    }
    total.stall_rate = total.ctu_active_cycles > 0
                           ? double(total.ctu_stall_cycles) / double(total.ctu_active_cycles)
                           : 0.0;
    for (int ch = 0; ch < 16; ++ch)
        total.vru_busy[std::size_t(ch)] =
            total.cycles > 0 ? double(total.busy_cycles[std::size_t(ch)]) / double(total.cycles) : 0.0;
    return total;
}

/// base.cycles / test.cycles.
inline double speedup(const PipeStats& base, const PipeStats& test) {
    if (test.cycles == 0) throw ConfigError("speedup: zero-cycle divisor");
    return double(base.cycles) / double(test.cycles);
}

struct SweepRow {
    int depth = 0;
    std::uint64_t cycles = 0;
    double stall_rate = 0.0;
    double speedup = 0.0;  // vs the first depth in the sweep
};

/// One simulation per FIFO depth, all other config fixed.
inline std::vector<SweepRow> sweep_fifo_depth(const FrameTrace& trace, const PipeConfig& cfg,
                                              const std::vector<int>& depths) {
    if (depths.empty()) throw ConfigError("sweep: depths must be nonempty");
    for (std::size_t i = 1; i < depths.size(); ++i)
        if (depths[i] <= depths[i - 1])
            throw ConfigError("sweep: depths must be strictly increasing");

    std::vector<SweepRow> rows;
    std::uint64_t base_cycles = 0;
    for (int d : depths) {
        PipeConfig c = cfg;
        c.fifo_depth = d;
        PipeStats s = simulate_frame(trace, c);
        if (rows.empty()) base_cycles = s.cycles;
        SweepRow row;
        row.depth = d;
        row.cycles = s.cycles;
        row.stall_rate = s.stall_rate;
        row.speedup = s.cycles > 0 ? double(base_cycles) / double(s.cycles) : 1.0;
        rows.push_back(row);
    }
    return rows;
}

}  // namespace gscat
