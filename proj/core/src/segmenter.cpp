#include "uscut/segmenter.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <string>

#include "uscut/error.hpp"

namespace uscut {

NodeId nearest_node(const RayNodeGrid& grid, double x, double y) {
    NodeId best = 0;
    double best_d2 = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < grid.positions.size(); ++k) {
        const double dx = grid.positions[k].x - x;
        const double dy = grid.positions[k].y - y;
        const double d2 = dx * dx + dy * dy;
        if (d2 < best_d2) {
            best_d2 = d2;
            best = static_cast<NodeId>(k);
        }
    }
    return best;
}

FlowNetwork apply_helper_seeds(FlowNetwork net, const RayNodeGrid& grid,
                               std::span<const HelperSeed> helpers) {
    if (helpers.empty()) {
        return net;
    }
    const int N = grid.nodes_per_ray;
    // Per ray: highest forced-inside index and lowest forced-outside index.
    std::vector<int> max_inside(static_cast<std::size_t>(grid.rays), -1);
    std::vector<int> min_outside(static_cast<std::size_t>(grid.rays), N);

    for (const auto& h : helpers) {
        const NodeId node = nearest_node(grid, h.x, h.y);
        const int ray = node / N;
        const int index = node % N;
        if (h.kind == HelperKind::inside) {
            net.add_arc(net.source(), node, FlowNetwork::kInfinity, ArcKind::helper);
            max_inside[static_cast<std::size_t>(ray)] = std::max(max_inside[static_cast<std::size_t>(ray)], index);
        } else {
            net.add_arc(node, net.sink(), FlowNetwork::kInfinity, ArcKind::helper);
            min_outside[static_cast<std::size_t>(ray)] = std::min(min_outside[static_cast<std::size_t>(ray)], index);
        }
    }
    for (int r = 0; r < grid.rays; ++r) {
        if (max_inside[static_cast<std::size_t>(r)] >= min_outside[static_cast<std::size_t>(r)]) {
            throw InfeasibleConstraints("helper seeds contradict each other on ray " + std::to_string(r) +
                                        ": inside at node " + std::to_string(max_inside[static_cast<std::size_t>(r)]) +
                                        ", outside at node " + std::to_string(min_outside[static_cast<std::size_t>(r)]));
        }
    }
    return net;
}

BinaryMask rasterize_mask(std::span<const Point2> contour, int width, int height) {
    if (contour.size() < 3) {
        throw InvalidArgument("contour needs at least 3 vertices");
    }
    BinaryMask mask(width, height);
    const bool degenerate = std::all_of(contour.begin(), contour.end(),
                                        [&](const Point2& p) { return p == contour.front(); });
    if (degenerate) {
        return mask;
    }

    const std::size_t n = contour.size();
    double min_y = contour[0].y;
    double max_y = contour[0].y;
    for (const auto& p : contour) {
        min_y = std::min(min_y, p.y);
        max_y = std::max(max_y, p.y);
    }

    auto fill_span = [&](int y, double xa, double xb) {
        const int lo = std::max(0, static_cast<int>(std::ceil(xa)));
        const int hi = std::min(width - 1, static_cast<int>(std::floor(xb)));
        for (int x = lo; x <= hi; ++x) {
            mask.set(x, y);
        }
    };

    const int row_lo = std::max(0, static_cast<int>(std::ceil(min_y)));
    const int row_hi = std::min(height - 1, static_cast<int>(std::floor(max_y)));
    std::vector<double> xs;
    xs.reserve(n);
    for (int y = row_lo; y <= row_hi; ++y) {
        xs.clear();
        for (std::size_t k = 0; k < n; ++k) {
            const Point2& p = contour[k];
            const Point2& q = contour[(k + 1) % n];
            // half-open in y so shared vertices are counted once
            if ((p.y <= y && y < q.y) || (q.y <= y && y < p.y)) {
                xs.push_back(p.x + (y - p.y) * (q.x - p.x) / (q.y - p.y));
            }
        }
        std::sort(xs.begin(), xs.end());
        for (std::size_t k = 0; k + 1 < xs.size(); k += 2) {
            fill_span(y, xs[k], xs[k + 1]);
        }
    }

    // Pixel centers exactly on an edge count as inside.
    for (std::size_t k = 0; k < n; ++k) {
        const Point2& p = contour[k];
        const Point2& q = contour[(k + 1) % n];
        if (p.y == q.y) {
            if (p.y == std::floor(p.y) && p.y >= 0 && p.y <= height - 1) {
                fill_span(static_cast<int>(p.y), std::min(p.x, q.x), std::max(p.x, q.x));
            }
            continue;
        }
        const int lo = std::max(0, static_cast<int>(std::ceil(std::min(p.y, q.y))));
        const int hi = std::min(height - 1, static_cast<int>(std::floor(std::max(p.y, q.y))));
        for (int y = lo; y <= hi; ++y) {
            const double x = p.x + (y - p.y) * (q.x - p.x) / (q.y - p.y);
            if (x == std::floor(x) && x >= 0 && x <= width - 1) {
                mask.set(static_cast<int>(x), y);
            }
        }
    }
    return mask;
}

bool satisfies_delta(std::span<const int> boundary, int delta) noexcept {
    const std::size_t R = boundary.size();
    for (std::size_t r = 0; r < R; ++r) {
        if (std::abs(boundary[r] - boundary[(r + 1) % R]) > delta) {
            return false;
        }
    }
    return true;
}

SegmentationTrace segment_grid(const RayNodeGrid& grid, int delta, std::span<const HelperSeed> helpers,
                               int width, int height) {
    for (const auto& h : helpers) {
        if (!(h.x >= 0.0 && h.y >= 0.0 && h.x < width && h.y < height)) {
            throw InvalidArgument("helper seed lies outside the image");
        }
    }

    SegmentationTrace tr;
    tr.grid = grid;
    tr.network = apply_helper_seeds(build_flow_network(grid, delta), grid, helpers);
    tr.cut = max_flow_min_cut(tr.network);
    if (!tr.cut.finite()) {
        throw InfeasibleConstraints("helper seeds cannot be satisfied together with delta=" +
                                    std::to_string(delta));
    }

    const int R = grid.rays;
    const int N = grid.nodes_per_ray;
    auto& res = tr.result;
    res.boundary.assign(static_cast<std::size_t>(R), 0);
    res.contour.reserve(static_cast<std::size_t>(R));
    for (int r = 0; r < R; ++r) {
        int b = 0;
        while (b < N && tr.cut.source_side[static_cast<std::size_t>(grid.node_id(r, b))]) {
            ++b;
        }
        for (int i = b; i < N; ++i) {
            if (tr.cut.source_side[static_cast<std::size_t>(grid.node_id(r, i))]) {
                throw std::logic_error("finite cut with a non-prefix source side on ray " + std::to_string(r));
            }
        }
        res.boundary[static_cast<std::size_t>(r)] = b;
        res.contour.push_back(b == 0 ? grid.seed : grid.position(r, b - 1));
    }
    res.cut_cost = tr.cut.cut_value;
    res.collapsed = std::all_of(res.boundary.begin(), res.boundary.end(), [](int b) { return b == 0; });
    res.mask = res.collapsed ? BinaryMask(width, height) : rasterize_mask(res.contour, width, height);
    return tr;
}

SegmentationTrace segment_traced(const GrayImage& img, SeedPoint seed, const TemplateParams& params,
                                 std::span<const HelperSeed> helpers) {
    const auto start = std::chrono::steady_clock::now();
    params.validate();
    if (!img.contains(seed)) {
        throw InvalidArgument("seed point lies outside the image");
    }
    SegmentationTrace tr = segment_grid(sample_ray_nodes(img, seed, params), params.delta, helpers,
                                        img.width(), img.height());
    tr.result.elapsed_us = std::chrono::duration_cast<std::chrono::microseconds>(
                               std::chrono::steady_clock::now() - start)
                               .count();
    return tr;
}

SegmentationResult segment(const GrayImage& img, SeedPoint seed, const TemplateParams& params,
                           std::span<const HelperSeed> helpers) {
    return segment_traced(img, seed, params, helpers).result;
}

void write_contour(std::ostream& os, std::span<const Point2> contour) {
    char buf[96];
    for (const auto& p : contour) {
        std::snprintf(buf, sizeof(buf), "%.4f %.4f\n", p.x, p.y);
        os << buf;
    }
}

} // namespace uscut
