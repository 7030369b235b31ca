#pragma once

// Recomputes per-cell counts and occupancy integrals from an engine event
// trace, independently of the engine's own bookkeeping. Count fields must
// reproduce exactly; time integrals to floating tolerance (trace timestamps
// carry 12 significant digits).

#include <algorithm>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "gcsim/engine.hpp"
#include "gcsim/model.hpp"

namespace gcsim::testsupport {

struct ReplayedRun {
    std::vector<gcsim::CellCounts> cells;
};

inline ReplayedRun replay_trace(const std::string& trace_text, const gcsim::Scenario& sc) {
    struct TrackedCall {
        int cell = 0;
        int home_cell = 0;
        bool measured = false;
    };
    struct CellState {
        int busy = 0;
        int guard = 0;
        double last = 0.0;
        gcsim::CellCounts counts;
    };

    const double warmup = sc.warmup;
    const double end = sc.sim_duration;

    std::vector<CellState> cells(static_cast<std::size_t>(sc.topology.cell_count));
    for (auto& c : cells) c.guard = sc.policy.initial_guard;

    auto accrue = [&](CellState& c, double now) {
        double lo = std::max(c.last, warmup);
        double hi = std::min(now, end);
        if (hi > lo) {
            double span = hi - lo;
            c.counts.busy_time += static_cast<double>(c.busy) * span;
            int excess = std::max(c.busy - (sc.policy.total_channels - c.guard), 0);
            c.counts.guard_busy_time += static_cast<double>(excess) * span;
            c.counts.guard_count_time += static_cast<double>(c.guard) * span;
        }
        c.last = now;
    };

    std::map<std::uint64_t, TrackedCall> live;

    std::istringstream lines(trace_text);
    std::string line;
    while (std::getline(lines, line)) {
        if (line.empty()) continue;
        std::istringstream f(line);
        std::string time_s, seq_s, kind, cell_s, id_s, decision;
        if (!std::getline(f, time_s, '\t') || !std::getline(f, seq_s, '\t') ||
            !std::getline(f, kind, '\t') || !std::getline(f, cell_s, '\t') ||
            !std::getline(f, id_s, '\t') || !std::getline(f, decision))
            throw std::runtime_error("replay: malformed trace line: " + line);

        const double t = std::stod(time_s);
        const int cell = std::stoi(cell_s);
        const std::uint64_t id = id_s == "-" ? 0 : std::stoull(id_s);
        const bool measured = t >= warmup;
        CellState& c = cells.at(static_cast<std::size_t>(cell));

        if (kind == "NewArrival" || kind == "ExogenousHandoffArrival") {
            const bool is_new = kind == "NewArrival";
            if (measured) ++(is_new ? c.counts.new_attempts : c.counts.handoff_attempts);
            if (decision == "Blocked") {
                if (measured) ++(is_new ? c.counts.new_blocks : c.counts.handoff_blocks);
            } else {
                accrue(c, t);
                ++c.busy;
                if (is_new && measured) ++c.counts.admitted_new;
                live[id] = {cell, cell, measured};
            }
        } else if (kind == "OutboundHandoff") {
            // The trace reports the admission target; the source is wherever
            // the call was last seen.
            TrackedCall call = live.at(id);
            CellState& src = cells.at(static_cast<std::size_t>(call.cell));
            accrue(src, t);
            --src.busy;
            if (measured) ++c.counts.handoff_attempts;
            if (decision == "Blocked") {
                if (measured) {
                    ++c.counts.handoff_blocks;
                    if (call.measured)
                        ++cells.at(static_cast<std::size_t>(call.home_cell)).counts.drops;
                }
                live.erase(id);
            } else {
                accrue(c, t);
                ++c.busy;
                call.cell = cell;
                live[id] = call;
            }
        } else if (kind == "Completion") {
            accrue(c, t);
            --c.busy;
            if (measured) ++c.counts.completions;
            live.erase(id);
        } else if (kind == "AdjustTick") {
            accrue(c, t);
            c.guard = std::stoi(decision);
        } else {
            throw std::runtime_error("replay: unknown event kind: " + kind);
        }
    }

    ReplayedRun out;
    for (auto& c : cells) {
        accrue(c, end);
        out.cells.push_back(c.counts);
    }
    return out;
}

} // namespace gcsim::testsupport
