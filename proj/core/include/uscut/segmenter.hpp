#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "uscut/image.hpp"
#include "uscut/maxflow.hpp"
#include "uscut/radial_graph.hpp"

namespace uscut {

enum class HelperKind : std::uint8_t { inside, outside };

/// Extra user constraint: the template node nearest to (x, y) is forced into
/// (inside) or out of (outside) the segmentation.
struct HelperSeed {
    double x = 0.0;
    double y = 0.0;
    HelperKind kind = HelperKind::inside;

    friend bool operator==(const HelperSeed&, const HelperSeed&) = default;
};

struct SegmentationResult {
    /// b_r: number of foreground nodes on ray r, in [0, N].
    std::vector<int> boundary;
    /// One vertex per ray: the outermost foreground node, or the seed when
    /// the ray has none.
    std::vector<Point2> contour;
    BinaryMask mask;
    double cut_cost = 0.0;
    std::int64_t elapsed_us = 0;
    bool collapsed = false;
};

/// Everything the pipeline produced along the way, for debugging and checks.
struct SegmentationTrace {
    RayNodeGrid grid;
    FlowNetwork network{0};
    CutResult cut;
    SegmentationResult result;
};

/// Index of the template node closest to (x, y); ties go to the lowest id.
NodeId nearest_node(const RayNodeGrid& grid, double x, double y);

/// Adds infinite terminal arcs for each helper. Throws InfeasibleConstraints
/// when an inside and an outside helper on the same ray cannot both hold.
FlowNetwork apply_helper_seeds(FlowNetwork net, const RayNodeGrid& grid,
                               std::span<const HelperSeed> helpers);

/// Even-odd scanline fill. A pixel is set when its center lies inside the
/// polygon or on its boundary. A contour whose vertices all coincide gives
/// an empty mask.
BinaryMask rasterize_mask(std::span<const Point2> contour, int width, int height);

/// True when |b_r - b_{r+1 mod R}| <= delta for every ray pair.
bool satisfies_delta(std::span<const int> boundary, int delta) noexcept;

/// Cut stage on an already sampled grid: build, constrain, solve, extract.
SegmentationTrace segment_grid(const RayNodeGrid& grid, int delta, std::span<const HelperSeed> helpers,
                               int width, int height);

SegmentationTrace segment_traced(const GrayImage& img, SeedPoint seed, const TemplateParams& params,
                                 std::span<const HelperSeed> helpers = {});

/// Full segmentation for one seed placement.
SegmentationResult segment(const GrayImage& img, SeedPoint seed, const TemplateParams& params,
                           std::span<const HelperSeed> helpers = {});

/// "x y" per line, fixed 4 decimals.
void write_contour(std::ostream& os, std::span<const Point2> contour);

} // namespace uscut
