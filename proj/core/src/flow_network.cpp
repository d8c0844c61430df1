#include "uscut/flow_network.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <string>

#include "uscut/error.hpp"

namespace uscut {

FlowNetwork::FlowNetwork(int interior_nodes) : interior_(interior_nodes) {
    if (interior_nodes < 0) {
        throw InvalidArgument("negative node count");
    }
}

void FlowNetwork::add_arc(NodeId tail, NodeId head, double capacity, ArcKind kind) {
    if (tail < 0 || head < 0 || tail >= node_count() || head >= node_count()) {
        throw InvalidArgument("arc endpoint out of range");
    }
    if (std::isnan(capacity) || capacity < 0.0) {
        throw InvalidArgument("arc capacity must be non-negative");
    }
    arcs_.push_back(Arc{tail, head, capacity, kind});
}

std::size_t FlowNetwork::count(ArcKind kind) const noexcept {
    return static_cast<std::size_t>(
        std::count_if(arcs_.begin(), arcs_.end(), [kind](const Arc& a) { return a.kind == kind; }));
}

double FlowNetwork::finite_capacity_total() const noexcept {
    double total = 0.0;
    for (const auto& a : arcs_) {
        if (!a.infinite()) {
            total += a.capacity;
        }
    }
    return total;
}

double FlowNetwork::infinity_sentinel() const noexcept {
    return 2.0 * (finite_capacity_total() + 1.0);
}

void FlowNetwork::write_arc_list(std::ostream& os) const {
    auto name = [this](NodeId n) {
        if (n == source()) {
            return std::string("s");
        }
        if (n == sink()) {
            return std::string("t");
        }
        return std::to_string(n);
    };
    char buf[64];
    for (const auto& a : arcs_) {
        os << name(a.tail) << ' ' << name(a.head) << ' ';
        if (a.infinite()) {
            os << "inf";
        } else {
            std::snprintf(buf, sizeof(buf), "%.17g", a.capacity);
            os << buf;
        }
        os << '\n';
    }
}

} // namespace uscut
