#include "uscut/radial_graph.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "uscut/error.hpp"

namespace uscut {

void TemplateParams::validate() const {
    if (rays < 3) {
        throw InvalidArgument("template needs at least 3 rays, got " + std::to_string(rays));
    }
    if (nodes_per_ray < 2) {
        throw InvalidArgument("template needs at least 2 nodes per ray, got " +
                              std::to_string(nodes_per_ray));
    }
    if (!(max_radius > 0.0) || !std::isfinite(max_radius)) {
        throw InvalidArgument("template radius must be > 0");
    }
    if (delta < 0) {
        throw InvalidArgument("delta must be >= 0");
    }
    if (!(seed_region_radius > 0.0) || !std::isfinite(seed_region_radius)) {
        throw InvalidArgument("seed region radius must be > 0");
    }
}

RayNodeGrid RayNodeGrid::from_costs(int rays, int nodes_per_ray, std::vector<double> costs) {
    if (rays < 1 || nodes_per_ray < 1 ||
        costs.size() != static_cast<std::size_t>(rays) * static_cast<std::size_t>(nodes_per_ray)) {
        throw InvalidArgument("cost grid does not match rays x nodes");
    }
    RayNodeGrid g;
    g.rays = rays;
    g.nodes_per_ray = nodes_per_ray;
    g.positions.assign(costs.size(), Point2{});
    g.gray.assign(costs.size(), 0.0);
    g.cost = std::move(costs);
    return g;
}

RayNodeGrid sample_ray_nodes(const GrayImage& img, SeedPoint seed, const TemplateParams& params) {
    // Sampling accepts a single node per ray; the network needs two.
    TemplateParams check = params;
    if (params.nodes_per_ray == 1) {
        check.nodes_per_ray = 2;
    }
    check.validate();
    if (!img.contains(seed)) {
        throw InvalidArgument("seed point lies outside the image");
    }

    const DiskStats region = gray_disk_stats(img, seed, params.seed_region_radius);

    RayNodeGrid g;
    g.rays = params.rays;
    g.nodes_per_ray = params.nodes_per_ray;
    g.seed = seed;
    g.avg = region.mean();

    const auto total = static_cast<std::size_t>(params.rays) * static_cast<std::size_t>(params.nodes_per_ray);
    g.positions.reserve(total);
    g.gray.reserve(total);
    g.cost.reserve(total);

    const double step = params.max_radius / params.nodes_per_ray;
    for (int r = 0; r < params.rays; ++r) {
        const double theta = 2.0 * std::numbers::pi * r / params.rays;
        const double cx = std::cos(theta);
        const double sy = std::sin(theta);
        for (int i = 0; i < params.nodes_per_ray; ++i) {
            const double d = (i + 1) * step;
            const Point2 p{seed.x + d * cx, seed.y + d * sy};
            const BilinearSample s = sample_bilinear_parts(img, p.x, p.y);
            // avg - gray, with the integer parts cancelled before any rounding:
            // the cost is then bitwise invariant to gray shifts.
            const double anchored_avg =
                static_cast<double>(region.sum - region.count * s.anchor) / static_cast<double>(region.count);
            g.positions.push_back(p);
            g.gray.push_back(s.value());
            g.cost.push_back(std::abs(anchored_avg - s.offset));
        }
    }
    return g;
}

std::vector<TerminalArc> terminal_arcs_for_ray(std::span<const double> costs) {
    const auto n = costs.size();
    if (n < 2) {
        throw InvalidArgument("a ray needs at least two nodes");
    }
    std::vector<TerminalArc> arcs;
    arcs.reserve(n);
    auto emit = [&arcs](std::size_t node, TerminalSide side, double cap) {
        if (cap > 0.0) {
            arcs.push_back(TerminalArc{static_cast<int>(node), side, cap});
        }
    };
    emit(0, TerminalSide::source, costs[0]);
    for (std::size_t i = 1; i + 1 < n; ++i) {
        const double w = costs[i] - costs[i - 1];
        if (w >= 0.0) {
            emit(i, TerminalSide::sink, w);
        } else {
            emit(i, TerminalSide::source, -w);
        }
    }
    emit(n - 1, TerminalSide::sink, costs[n - 1]);
    return arcs;
}

FlowNetwork build_flow_network(const RayNodeGrid& grid, int delta) {
    if (delta < 0) {
        throw InvalidArgument("delta must be >= 0");
    }
    if (grid.rays < 1 || grid.nodes_per_ray < 2) {
        throw InvalidArgument("grid too small for a flow network");
    }
    const int R = grid.rays;
    const int N = grid.nodes_per_ray;
    FlowNetwork net(R * N);

    for (int r = 0; r < R; ++r) {
        for (int i = 1; i < N; ++i) {
            net.add_arc(grid.node_id(r, i), grid.node_id(r, i - 1), FlowNetwork::kInfinity, ArcKind::intra);
        }
    }
    for (int r = 0; r < R; ++r) {
        const int prev = (r + R - 1) % R;
        const int next = (r + 1) % R;
        for (int i = 0; i < N; ++i) {
            const int target = std::max(0, i - delta);
            net.add_arc(grid.node_id(r, i), grid.node_id(prev, target), FlowNetwork::kInfinity, ArcKind::inter);
            net.add_arc(grid.node_id(r, i), grid.node_id(next, target), FlowNetwork::kInfinity, ArcKind::inter);
        }
    }
    for (int r = 0; r < R; ++r) {
        for (const auto& t : terminal_arcs_for_ray(grid.ray_costs(r))) {
            const NodeId node = grid.node_id(r, t.node);
            if (t.side == TerminalSide::source) {
                net.add_arc(net.source(), node, t.capacity, ArcKind::terminal);
            } else {
                net.add_arc(node, net.sink(), t.capacity, ArcKind::terminal);
            }
        }
    }
    return net;
}

} // namespace uscut
