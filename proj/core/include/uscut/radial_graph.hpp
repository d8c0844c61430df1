#pragma once

#include <span>
#include <vector>

#include "uscut/flow_network.hpp"
#include "uscut/image.hpp"

namespace uscut {

/// Circular template: R rays, N nodes per ray out to max_radius, and the
/// maximum boundary-index jump `delta` between neighbouring rays.
struct TemplateParams {
    int rays = 60;
    int nodes_per_ray = 40;
    double max_radius = 120.0;
    int delta = 2;
    double seed_region_radius = 5.0;

    /// Throws InvalidArgument when R < 3, N < 2, radius <= 0, delta < 0 or
    /// seed_region_radius <= 0.
    void validate() const;

    friend bool operator==(const TemplateParams&, const TemplateParams&) = default;
};

/// Node positions and costs of one radial template placement.
///
/// Ray r points at angle 2*pi*r/R, which runs clockwise on screen because
/// y grows downward. Node i of a ray sits at distance (i+1)*max_radius/N
/// from the seed. Costs are |avg - gray|, with avg the mean gray value of
/// the seed region.
struct RayNodeGrid {
    int rays = 0;
    int nodes_per_ray = 0;
    Point2 seed;
    double avg = 0.0;
    std::vector<Point2> positions;
    std::vector<double> gray;
    std::vector<double> cost;

    NodeId node_id(int ray, int index) const noexcept { return ray * nodes_per_ray + index; }
    Point2 position(int ray, int index) const noexcept { return positions[static_cast<std::size_t>(node_id(ray, index))]; }
    std::span<const double> ray_costs(int ray) const noexcept {
        return std::span<const double>(cost).subspan(static_cast<std::size_t>(ray) * nodes_per_ray,
                                                      static_cast<std::size_t>(nodes_per_ray));
    }

    /// Grid with given costs and geometry left at the origin; used to drive
    /// the cut stage directly.
    static RayNodeGrid from_costs(int rays, int nodes_per_ray, std::vector<double> costs);
};

RayNodeGrid sample_ray_nodes(const GrayImage& img, SeedPoint seed, const TemplateParams& params);

enum class TerminalSide : std::uint8_t { source, sink };

struct TerminalArc {
    int node = 0;
    TerminalSide side = TerminalSide::source;
    double capacity = 0.0;

    friend bool operator==(const TerminalArc&, const TerminalArc&) = default;
};

/// Source/sink bindings for one ray: the innermost node hangs off the source
/// with its cost, the outermost node goes to the sink with its cost, and every
/// node in between is bound by the signed difference to its inner neighbour
/// (non-negative to the sink, negative to the source). Zero capacities are
/// omitted. Throws InvalidArgument for fewer than two costs.
std::vector<TerminalArc> terminal_arcs_for_ray(std::span<const double> costs);

/// Full s-t network: infinite intra-arcs pointing inward along each ray,
/// infinite inter-arcs from (r, i) to (r +- 1, max(0, i - delta)), and the
/// terminal arcs of every ray.
FlowNetwork build_flow_network(const RayNodeGrid& grid, int delta);

} // namespace uscut
