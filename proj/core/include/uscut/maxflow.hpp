#pragma once

#include <cstdint>
#include <vector>

#include "uscut/flow_network.hpp"

namespace uscut {

struct CutResult {
    /// Total flow pushed from s to t. Infinite arcs count at the network's
    /// sentinel capacity, so an infeasible network reports a value at or
    /// above the sentinel.
    double max_flow_value = 0.0;
    /// Capacity of the arcs leaving the source side (+inf if an infinite arc
    /// crosses the cut).
    double cut_value = 0.0;
    /// One flag per interior node: reachable from s in the residual graph.
    std::vector<std::uint8_t> source_side;

    bool finite() const noexcept { return cut_value != FlowNetwork::kInfinity; }
};

/// Exact max-flow / min-cut using the Boykov-Kolmogorov search-tree
/// algorithm. The returned source side is the minimal one (residual
/// reachability from s), which makes the result deterministic under ties.
CutResult max_flow_min_cut(const FlowNetwork& net);

} // namespace uscut
