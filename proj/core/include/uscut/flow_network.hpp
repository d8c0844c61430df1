#pragma once

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <span>
#include <vector>

namespace uscut {

using NodeId = std::int32_t;

enum class ArcKind : std::uint8_t { intra, inter, terminal, helper, generic };

struct Arc {
    NodeId tail = 0;
    NodeId head = 0;
    double capacity = 0.0;
    ArcKind kind = ArcKind::generic;

    bool infinite() const noexcept { return capacity == std::numeric_limits<double>::infinity(); }
};

/// Capacitated directed graph with `interior_count()` ordinary nodes plus a
/// source and a sink. Infinite capacities are stored as +inf and replaced by
/// a finite sentinel only inside the solver.
class FlowNetwork {
public:
    static constexpr double kInfinity = std::numeric_limits<double>::infinity();

    explicit FlowNetwork(int interior_nodes);

    int interior_count() const noexcept { return interior_; }
    int node_count() const noexcept { return interior_ + 2; }
    NodeId source() const noexcept { return interior_; }
    NodeId sink() const noexcept { return interior_ + 1; }

    /// capacity must be >= 0 or kInfinity.
    void add_arc(NodeId tail, NodeId head, double capacity, ArcKind kind = ArcKind::generic);

    std::span<const Arc> arcs() const noexcept { return arcs_; }
    std::size_t count(ArcKind kind) const noexcept;

    /// Sum of all finite capacities.
    double finite_capacity_total() const noexcept;

    /// Stand-in for infinite arcs: 2 * (finite total + 1), strictly above
    /// finite total + 1, so no minimum cut can ever pay it while a finite
    /// cut exists.
    double infinity_sentinel() const noexcept;

    /// Plain-text arc list, one "tail head capacity" line per arc. Terminals
    /// print as `s` / `t`, infinite capacities as `inf`.
    void write_arc_list(std::ostream& os) const;

private:
    int interior_;
    std::vector<Arc> arcs_;
};

} // namespace uscut
