#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "oracles/boundary_oracle.hpp"
#include "oracles/raster_oracle.hpp"
#include "support/test_support.hpp"
#include "uscut/error.hpp"
#include "uscut/metrics.hpp"
#include "uscut/phantom.hpp"
#include "uscut/segmenter.hpp"

using namespace uscut;
using testing_support::expect_star_shaped;

namespace {

std::vector<double> random_costs(std::mt19937& rng, int n, int max_cost) {
    std::uniform_int_distribution<int> d(0, max_cost);
    std::vector<double> c(n);
    for (auto& v : c) v = d(rng);
    return c;
}

Phantom speckled_hypo(std::uint64_t seed) {
    PhantomSpec s;
    s.speckle_sigma = 0.08;
    s.rng_seed = seed;
    return generate_phantom(s);
}

} // namespace

TEST(Segmenter, UniformImageCollapses) {
    const auto img = GrayImage::filled(128, 128, 90);
    const auto t = segment_traced(img, {64, 64}, TemplateParams{});
    EXPECT_TRUE(t.result.collapsed);
    EXPECT_EQ(t.result.cut_cost, 0.0);
    EXPECT_EQ(t.result.mask.count(), 0u);
    for (const auto& v : t.result.contour) EXPECT_EQ(v, (Point2{64, 64}));
    expect_star_shaped(t, 2);
}

TEST(Segmenter, DeltaZeroGivesConstantBoundary) {
    for (std::uint64_t s = 0; s < 5; ++s) {
        const auto ph = speckled_hypo(s);
        TemplateParams p;
        p.delta = 0;
        const auto t = segment_traced(ph.image, {128, 128}, p);
        const auto [lo, hi] = std::minmax_element(t.result.boundary.begin(), t.result.boundary.end());
        EXPECT_EQ(*lo, *hi);
        expect_star_shaped(t, 0);
    }
}

TEST(Segmenter, CutCostMatchesBoundaryEnumeration) {
    std::mt19937 rng(1234);
    for (int iter = 0; iter < 300; ++iter) {
        const int R = std::uniform_int_distribution<int>(3, 5)(rng);
        const int N = std::uniform_int_distribution<int>(2, 4)(rng);
        const int delta = std::uniform_int_distribution<int>(0, 2)(rng);
        auto costs = random_costs(rng, R * N, 20);
        const auto grid = RayNodeGrid::from_costs(R, N, costs);
        const auto t = segment_grid(grid, delta, {}, 8, 8);
        const auto want = oracle::min_over_boundaries(R, N, costs, delta);
        ASSERT_EQ(t.result.cut_cost, want.value) << "iter " << iter;
        expect_star_shaped(t, delta);
    }
}

TEST(Segmenter, BoundaryIsAnEnumeratedMinimiser) {
    std::mt19937 rng(99);
    for (int iter = 0; iter < 100; ++iter) {
        const int R = 4, N = 3;
        const int delta = iter % 3;
        auto costs = random_costs(rng, R * N, 20);
        const auto t = segment_grid(RayNodeGrid::from_costs(R, N, costs), delta, {}, 8, 8);
        const auto want = oracle::min_over_boundaries(R, N, costs, delta);
        EXPECT_NE(std::find(want.argmins.begin(), want.argmins.end(), t.result.boundary), want.argmins.end());
    }
}

TEST(Segmenter, NoHelpersLeavesNetworkUnchanged) {
    std::mt19937 rng(5);
    const auto grid = RayNodeGrid::from_costs(4, 3, random_costs(rng, 12, 20));
    const auto base = build_flow_network(grid, 1);
    const auto with = apply_helper_seeds(base, grid, {});
    ASSERT_EQ(base.arcs().size(), with.arcs().size());
    EXPECT_EQ(with.count(ArcKind::helper), 0u);
}

TEST(Segmenter, InsideHelperForcesPrefix) {
    // 6 rays x 8 nodes on a real geometry so the helper maps onto node (3, 5).
    const auto img = GrayImage::filled(200, 200, 100);
    TemplateParams p;
    p.rays = 6;
    p.nodes_per_ray = 8;
    p.max_radius = 80;
    p.delta = 1;
    auto grid = sample_ray_nodes(img, {100, 100}, p);
    std::mt19937 rng(77);
    grid.cost = random_costs(rng, 48, 20);
    const Point2 at = grid.position(3, 5);
    ASSERT_EQ(nearest_node(grid, at.x, at.y), grid.node_id(3, 5));

    const std::vector<HelperSeed> helpers{{at.x, at.y, HelperKind::inside}};
    const auto t = segment_grid(grid, 1, helpers, 200, 200);
    EXPECT_GE(t.result.boundary[3], 6);
    expect_star_shaped(t, 1);

    std::vector<oracle::RayBounds> bounds(6);
    bounds[3].lo = 6;
    const auto want = oracle::min_over_boundaries(6, 8, grid.cost, 1, bounds, true);
    EXPECT_EQ(t.result.cut_cost, want.value);
    for (const auto& b : want.argmins) EXPECT_GE(b[3], 6);
}

TEST(Segmenter, OutsideHelperBoundsPrefix) {
    const auto img = GrayImage::filled(200, 200, 100);
    TemplateParams p;
    p.rays = 6;
    p.nodes_per_ray = 8;
    p.max_radius = 80;
    auto grid = sample_ray_nodes(img, {100, 100}, p);
    std::mt19937 rng(78);
    grid.cost = random_costs(rng, 48, 20);
    const Point2 at = grid.position(3, 2);
    const std::vector<HelperSeed> helpers{{at.x, at.y, HelperKind::outside}};
    const auto t = segment_grid(grid, 2, helpers, 200, 200);
    EXPECT_LE(t.result.boundary[3], 2);

    std::vector<oracle::RayBounds> bounds(6);
    bounds[3].hi = 2;
    EXPECT_EQ(t.result.cut_cost, oracle::min_over_boundaries(6, 8, grid.cost, 2, bounds, true).value);
}

TEST(Segmenter, RandomHelpersMatchConstrainedEnumeration) {
    const auto img = GrayImage::filled(100, 100, 100);
    TemplateParams p;
    p.rays = 5;
    p.nodes_per_ray = 4;
    p.max_radius = 40;
    std::mt19937 rng(2024);
    int feasible = 0;
    for (int iter = 0; iter < 200; ++iter) {
        auto grid = sample_ray_nodes(img, {50, 50}, p);
        grid.cost = random_costs(rng, 20, 20);
        const int delta = iter % 3;
        std::vector<HelperSeed> helpers;
        std::vector<oracle::RayBounds> bounds(5);
        const int count = std::uniform_int_distribution<int>(1, 3)(rng);
        for (int k = 0; k < count; ++k) {
            const int r = std::uniform_int_distribution<int>(0, 4)(rng);
            const int i = std::uniform_int_distribution<int>(0, 3)(rng);
            const bool inside = std::bernoulli_distribution(0.5)(rng);
            const Point2 at = grid.position(r, i);
            helpers.push_back({at.x, at.y, inside ? HelperKind::inside : HelperKind::outside});
            if (inside) {
                bounds[r].lo = std::max(bounds[r].lo, i + 1);
            } else {
                bounds[r].hi = std::min(bounds[r].hi, i);
            }
        }
        const auto want = oracle::min_over_boundaries(5, 4, grid.cost, delta, bounds, true);
        bool contradictory = false;
        for (const auto& b : bounds) contradictory |= b.lo > b.hi;
        if (want.feasible == 0) {
            EXPECT_THROW(segment_grid(grid, delta, helpers, 100, 100), InfeasibleConstraints)
                << "iter " << iter << (contradictory ? " (same ray)" : "");
            continue;
        }
        const auto t = segment_grid(grid, delta, helpers, 100, 100);
        EXPECT_EQ(t.result.cut_cost, want.value) << "iter " << iter;
        expect_star_shaped(t, delta);
        ++feasible;
    }
    EXPECT_GT(feasible, 50);
}

TEST(Segmenter, ContradictoryHelpersOnOneRayThrow) {
    const auto img = GrayImage::filled(100, 100, 100);
    TemplateParams p;
    p.rays = 8;
    p.nodes_per_ray = 5;
    p.max_radius = 40;
    const auto grid = sample_ray_nodes(img, {50, 50}, p);
    const Point2 in = grid.position(2, 4);
    const Point2 out = grid.position(2, 1);
    const std::vector<HelperSeed> helpers{{in.x, in.y, HelperKind::inside}, {out.x, out.y, HelperKind::outside}};
    EXPECT_THROW(segment(img, {50, 50}, p, helpers), InfeasibleConstraints);
}

TEST(Segmenter, HelpersConflictingThroughDeltaThrow) {
    const auto img = GrayImage::filled(100, 100, 100);
    TemplateParams p;
    p.rays = 8;
    p.nodes_per_ray = 5;
    p.max_radius = 40;
    p.delta = 0;
    const auto grid = sample_ray_nodes(img, {50, 50}, p);
    const Point2 in = grid.position(2, 4);
    const Point2 out = grid.position(3, 0);
    const std::vector<HelperSeed> helpers{{in.x, in.y, HelperKind::inside}, {out.x, out.y, HelperKind::outside}};
    EXPECT_THROW(segment(img, {50, 50}, p, helpers), InfeasibleConstraints);
}

TEST(Segmenter, HelperOutsideImageRejected) {
    const auto img = GrayImage::filled(100, 100, 100);
    const std::vector<HelperSeed> helpers{{150, 50, HelperKind::inside}};
    EXPECT_THROW(segment(img, {50, 50}, TemplateParams{}, helpers), InvalidArgument);
}

TEST(Segmenter, SeedOutsideImageRejected) {
    const auto img = GrayImage::filled(100, 100, 100);
    EXPECT_THROW(segment(img, {-1, 50}, TemplateParams{}), InvalidArgument);
    EXPECT_THROW(segment(img, {50, 100}, TemplateParams{}), InvalidArgument);
}

TEST(Segmenter, InvalidParamsRejected) {
    const auto img = GrayImage::filled(100, 100, 100);
    TemplateParams p;
    p.rays = 2;
    EXPECT_THROW(segment(img, {50, 50}, p), InvalidArgument);
    p = {};
    p.nodes_per_ray = 1;
    EXPECT_THROW(segment(img, {50, 50}, p), InvalidArgument);
    p = {};
    p.delta = -1;
    EXPECT_THROW(segment(img, {50, 50}, p), InvalidArgument);
}

TEST(Segmenter, ContourVertexRule) {
    const auto ph = speckled_hypo(3);
    const auto t = segment_traced(ph.image, {128, 128}, TemplateParams{});
    ASSERT_EQ(t.result.contour.size(), 60u);
    for (int r = 0; r < 60; ++r) {
        const int b = t.result.boundary[r];
        const Point2 want = b == 0 ? Point2{128, 128} : t.grid.position(r, b - 1);
        EXPECT_EQ(t.result.contour[r], want);
    }
}

TEST(Segmenter, MaskIsRasterizedContour) {
    for (std::uint64_t s = 0; s < 4; ++s) {
        const auto ph = speckled_hypo(s);
        const auto res = segment(ph.image, {128, 128}, TemplateParams{});
        ASSERT_FALSE(res.collapsed);
        std::vector<oracle::V2> poly;
        for (const auto& v : res.contour) poly.push_back({v.x, v.y});
        const auto want = oracle::rasterize(poly, 256, 256);
        EXPECT_TRUE(std::equal(want.begin(), want.end(), res.mask.bits().begin())) << "phantom " << s;
    }
}

TEST(Segmenter, InnerCouplingOnlyBindsUnderHelpers) {
    // Without helpers b = 1 never costs more than b = 0 on a ray, so the
    // coupling from clamped inter-arcs cannot change the optimum.
    std::mt19937 rng(4321);
    for (int iter = 0; iter < 300; ++iter) {
        const int R = 4, N = 3;
        const int delta = iter % 3;
        const auto costs = random_costs(rng, R * N, 20);
        EXPECT_EQ(oracle::min_over_boundaries(R, N, costs, delta).value,
                  oracle::min_over_boundaries(R, N, costs, delta, {}, true).value);
    }
}

TEST(Segmenter, OutsideHelperAtInnermostNodeEmptiesAllRays) {
    const auto img = GrayImage::filled(100, 100, 100);
    TemplateParams p;
    p.rays = 6;
    p.nodes_per_ray = 4;
    p.max_radius = 40;
    p.delta = 2;
    auto grid = sample_ray_nodes(img, {50, 50}, p);
    std::mt19937 rng(3);
    grid.cost = random_costs(rng, 24, 20);
    const Point2 at = grid.position(0, 0);
    const std::vector<HelperSeed> helpers{{at.x, at.y, HelperKind::outside}};
    const auto t = segment_grid(grid, 2, helpers, 100, 100);
    EXPECT_TRUE(t.result.collapsed);
}

TEST(Segmenter, SeedStabilityOnCenteredDisk) {
    const auto ph = speckled_hypo(2024);
    const double base = dice(segment(ph.image, {128, 128}, TemplateParams{}).mask, ph.ground_truth);
    double worst = 0.0;
    for (int dy = -3; dy <= 3; ++dy) {
        for (int dx = -3; dx <= 3; ++dx) {
            if (dx * dx + dy * dy > 9) continue;
            const auto res = segment(ph.image, {128.0 + dx, 128.0 + dy}, TemplateParams{});
            const double d = res.mask.empty() ? 0.0 : dice(res.mask, ph.ground_truth);
            worst = std::max(worst, std::abs(d - base));
        }
    }
    EXPECT_LE(worst, 0.03) << "base DSC " << base;
}

TEST(Segmenter, CutCostNonIncreasingInDelta) {
    for (std::uint64_t s = 0; s < 5; ++s) {
        const auto ph = speckled_hypo(100 + s);
        double prev = std::numeric_limits<double>::infinity();
        for (int d = 0; d <= 5; ++d) {
            TemplateParams p;
            p.delta = d;
            const auto t = segment_traced(ph.image, {128, 128}, p);
            EXPECT_LE(t.result.cut_cost, prev) << "delta " << d;
            prev = t.result.cut_cost;
            expect_star_shaped(t, d);
        }
    }
}

TEST(Segmenter, DeterministicAcrossRuns) {
    const auto ph = speckled_hypo(8);
    const auto a = segment(ph.image, {128, 128}, TemplateParams{});
    const auto b = segment(ph.image, {128, 128}, TemplateParams{});
    EXPECT_EQ(a.boundary, b.boundary);
    EXPECT_EQ(a.contour, b.contour);
    EXPECT_EQ(a.mask, b.mask);
    EXPECT_EQ(a.cut_cost, b.cut_cost);
}

TEST(Segmenter, NearestNodeTieGoesToLowestId) {
    auto grid = RayNodeGrid::from_costs(3, 2, std::vector<double>(6, 0.0));
    grid.positions = {{1, 0}, {2, 0}, {0, 1}, {0, 2}, {-1, 0}, {-2, 0}};
    EXPECT_EQ(nearest_node(grid, 0, 0), 0);
    EXPECT_EQ(nearest_node(grid, 0, 2.1), 3);
}

TEST(Rasterize, AxisAlignedSquareMatchesOracle) {
    const std::vector<Point2> sq{{10, 10}, {20, 10}, {20, 20}, {10, 20}};
    const auto m = rasterize_mask(sq, 32, 32);
    EXPECT_EQ(m.count(), 121u);
    const auto want = oracle::rasterize({{10, 10}, {20, 10}, {20, 20}, {10, 20}}, 32, 32);
    EXPECT_TRUE(std::equal(want.begin(), want.end(), m.bits().begin()));
}

TEST(Rasterize, DegenerateContourIsEmpty) {
    const std::vector<Point2> pts(5, Point2{7.5, 3.25});
    EXPECT_EQ(rasterize_mask(pts, 16, 16).count(), 0u);
}

TEST(Rasterize, TooFewVerticesRejected) {
    const std::vector<Point2> pts{{1, 1}, {2, 2}};
    EXPECT_THROW(rasterize_mask(pts, 8, 8), InvalidArgument);
}

TEST(Rasterize, RandomIntegerStarPolygonsMatchOracle) {
    std::mt19937 rng(31);
    for (int iter = 0; iter < 200; ++iter) {
        const int n = std::uniform_int_distribution<int>(3, 12)(rng);
        std::vector<Point2> poly;
        std::vector<oracle::V2> ref;
        for (int k = 0; k < n; ++k) {
            const double th = 2 * 3.141592653589793 * k / n;
            const double rad = std::uniform_int_distribution<int>(1, 14)(rng);
            const double x = std::round(20 + rad * std::cos(th));
            const double y = std::round(20 + rad * std::sin(th));
            poly.push_back({x, y});
            ref.push_back({x, y});
        }
        if (std::all_of(poly.begin(), poly.end(), [&](const Point2& p) { return p == poly[0]; })) continue;
        const auto m = rasterize_mask(poly, 40, 40);
        const auto want = oracle::rasterize(ref, 40, 40);
        for (int y = 0; y < 40; ++y) {
            for (int x = 0; x < 40; ++x) {
                ASSERT_EQ(m.get(x, y), want[y * 40 + x] != 0) << "iter " << iter << " at " << x << "," << y;
            }
        }
    }
}

TEST(Rasterize, MaskInsideContourBoundingBox) {
    const auto ph = speckled_hypo(12);
    const auto res = segment(ph.image, {128, 128}, TemplateParams{});
    ASSERT_FALSE(res.collapsed);
    double x0 = 1e9, x1 = -1e9, y0 = 1e9, y1 = -1e9;
    for (const auto& v : res.contour) {
        x0 = std::min(x0, v.x);
        x1 = std::max(x1, v.x);
        y0 = std::min(y0, v.y);
        y1 = std::max(y1, v.y);
    }
    for (int y = 0; y < 256; ++y) {
        for (int x = 0; x < 256; ++x) {
            if (res.mask.get(x, y)) {
                EXPECT_TRUE(x >= x0 && x <= x1 && y >= y0 && y <= y1);
            }
        }
    }
}

TEST(Segmenter, WriteContourFormat) {
    std::ostringstream os;
    const std::vector<Point2> c{{1, 2.5}, {-0.125, 3}};
    write_contour(os, c);
    EXPECT_EQ(os.str(), "1.0000 2.5000\n-0.1250 3.0000\n");
}
