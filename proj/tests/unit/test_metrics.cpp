#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "oracles/mask_oracle.hpp"
#include "support/test_support.hpp"
#include "uscut/error.hpp"
#include "uscut/metrics.hpp"
#include "uscut/segmenter.hpp"

using namespace uscut;
using testing_support::random_mask;
using testing_support::to_grid;

namespace {

BinaryMask mask_from_pixels(int w, int h, std::initializer_list<std::pair<int, int>> px) {
    BinaryMask m(w, h);
    for (auto [x, y] : px) m.set(x, y);
    return m;
}

BinaryMask disk(int w, int h, double cx, double cy, double r) {
    BinaryMask m(w, h);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            if ((x - cx) * (x - cx) + (y - cy) * (y - cy) <= r * r) m.set(x, y);
        }
    }
    return m;
}

BinaryMask shifted(const BinaryMask& m, int dx, int dy, int w, int h) {
    BinaryMask out(w, h);
    for (int y = 0; y < m.height(); ++y) {
        for (int x = 0; x < m.width(); ++x) {
            if (m.get(x, y)) out.set(x + dx, y + dy);
        }
    }
    return out;
}

} // namespace

TEST(Dice, WorkedExample) {
    // |A| = 9, |R| = 6, |A n R| = 6.
    BinaryMask a(3, 3), r(3, 3);
    for (int y = 0; y < 3; ++y) {
        for (int x = 0; x < 3; ++x) {
            a.set(x, y);
            if (y < 2) r.set(x, y);
        }
    }
    EXPECT_DOUBLE_EQ(dice(a, r), 0.8);
}

TEST(Dice, IdentityAndDisjoint) {
    std::mt19937 rng(1);
    const auto a = random_mask(rng, 10, 10, 0.5);
    EXPECT_EQ(dice(a, a), 1.0);
    const auto l = mask_from_pixels(4, 1, {{0, 0}, {1, 0}});
    const auto r = mask_from_pixels(4, 1, {{2, 0}, {3, 0}});
    EXPECT_EQ(dice(l, r), 0.0);
}

TEST(Dice, Errors) {
    EXPECT_THROW(dice(BinaryMask(3, 3), BinaryMask(3, 3)), InvalidArgument);
    EXPECT_THROW(dice(BinaryMask(3, 3), BinaryMask(3, 4)), InvalidArgument);
}

TEST(Hausdorff, PixelExamples) {
    const auto a = mask_from_pixels(8, 8, {{0, 0}});
    const auto b = mask_from_pixels(8, 8, {{3, 4}});
    EXPECT_EQ(hausdorff(a, b), 5.0);
    EXPECT_EQ(hausdorff(a, a), 0.0);
}

TEST(Hausdorff, Errors) {
    const auto a = mask_from_pixels(4, 4, {{1, 1}});
    EXPECT_THROW(hausdorff(a, BinaryMask(4, 4)), InvalidArgument);
    EXPECT_THROW(hausdorff(a, BinaryMask(5, 4)), InvalidArgument);
}

TEST(Metrics, RandomPairsMatchBruteForce) {
    std::mt19937 rng(50);
    int checked = 0;
    while (checked < 50) {
        const int w = std::uniform_int_distribution<int>(1, 32)(rng);
        const int h = std::uniform_int_distribution<int>(1, 32)(rng);
        const double pa = std::uniform_real_distribution<double>(0.05, 0.9)(rng);
        const double pb = std::uniform_real_distribution<double>(0.05, 0.9)(rng);
        const auto a = random_mask(rng, w, h, pa);
        const auto b = random_mask(rng, w, h, pb);
        if (a.empty() || b.empty()) continue;
        ++checked;
        EXPECT_EQ(dice(a, b), oracle::dice(to_grid(a), to_grid(b)));
        EXPECT_EQ(hausdorff(a, b), oracle::hausdorff(to_grid(a), to_grid(b)));
        EXPECT_EQ(dice(a, b), dice(b, a));
        EXPECT_EQ(hausdorff(a, b), hausdorff(b, a));
    }
}

TEST(Metrics, BlobPairsMatchBruteForce) {
    std::mt19937 rng(51);
    for (int k = 0; k < 30; ++k) {
        std::uniform_real_distribution<double> c(4, 28), r(1, 12);
        const auto a = disk(32, 32, c(rng), c(rng), r(rng));
        const auto b = disk(32, 32, c(rng), c(rng), r(rng));
        if (a.empty() || b.empty()) continue;
        EXPECT_EQ(hausdorff(a, b), oracle::hausdorff(to_grid(a), to_grid(b)));
        EXPECT_EQ(max_diameter(a), oracle::diameter(to_grid(a)));
    }
}

TEST(Metrics, BoundaryPixelsMatchOracle) {
    std::mt19937 rng(52);
    const auto m = random_mask(rng, 20, 13, 0.6);
    const auto got = boundary_pixels(m);
    const auto want = oracle::boundary(to_grid(m));
    ASSERT_EQ(got.size(), want.size());
    for (std::size_t i = 0; i < got.size(); ++i) {
        EXPECT_EQ(got[i].x, want[i].first);
        EXPECT_EQ(got[i].y, want[i].second);
    }
}

TEST(Metrics, TranslationInvariant) {
    std::mt19937 rng(53);
    const auto a = disk(20, 20, 8, 9, 5);
    const auto b = random_mask(rng, 20, 20, 0.3);
    const auto a2 = shifted(a, 7, 5, 40, 40);
    const auto b2 = shifted(b, 7, 5, 40, 40);
    EXPECT_EQ(dice(a, b), dice(a2, b2));
    // Boundary pixels on the old image edge stop being boundary once moved
    // inside, so compare two masks clear of the edge.
    const auto c = disk(20, 20, 10, 10, 6);
    const auto d = disk(20, 20, 11, 8, 4);
    EXPECT_EQ(hausdorff(c, d), hausdorff(shifted(c, 7, 5, 40, 40), shifted(d, 7, 5, 40, 40)));
}

TEST(MaxDiameter, Examples) {
    EXPECT_EQ(max_diameter(mask_from_pixels(4, 4, {{2, 2}})), 0.0);
    EXPECT_DOUBLE_EQ(max_diameter(mask_from_pixels(20, 20, {{1, 2}, {6, 14}}), 0.2), 2.6);
    EXPECT_THROW(max_diameter(BinaryMask(3, 3)), InvalidArgument);
}

TEST(MaxDiameter, RasterizedDisk) {
    std::vector<Point2> poly;
    for (int k = 0; k < 360; ++k) {
        const double th = 2 * 3.141592653589793 * k / 360;
        poly.push_back({64 + 30 * std::cos(th), 64 + 30 * std::sin(th)});
    }
    const auto m = rasterize_mask(poly, 128, 128);
    const double d = max_diameter(m);
    EXPECT_EQ(d, oracle::diameter(to_grid(m)));
    EXPECT_GE(d, 58.0);
    EXPECT_LE(d, 62.0);
}

TEST(Summarize, TwoValues) {
    const std::vector<double> v{1, 3};
    const auto s = summarize_values("x", v);
    EXPECT_EQ(s.mean, 2.0);
    ASSERT_TRUE(s.stddev.has_value());
    EXPECT_DOUBLE_EQ(*s.stddev, std::sqrt(2.0));
    EXPECT_EQ(s.min, 1.0);
    EXPECT_EQ(s.max, 3.0);
}

TEST(Summarize, IdenticalValuesHaveZeroSpread) {
    const std::vector<double> v(5, 0.7);
    EXPECT_EQ(*summarize_values("x", v).stddev, 0.0);
    const std::vector<double> one{4};
    EXPECT_FALSE(summarize_values("x", one).stddev.has_value());
    EXPECT_THROW(summarize_values("x", {}), InvalidArgument);
}

TEST(Summarize, FortySyntheticCasesMatchSecondImplementation) {
    std::mt19937 rng(40);
    std::uniform_real_distribution<double> u(0, 1);
    std::vector<CaseMetrics> cases;
    for (int k = 0; k < 40; ++k) {
        CaseMetrics c;
        c.max_diameter_algo = 5 + 40 * u(rng);
        c.max_diameter_ref = 5 + 40 * u(rng);
        c.area_algo = 100 + 900 * u(rng);
        c.area_ref = 100 + 900 * u(rng);
        c.pixels_algo = static_cast<std::size_t>(1000 + 9000 * u(rng));
        c.pixels_ref = static_cast<std::size_t>(1000 + 9000 * u(rng));
        c.dsc = 0.7 + 0.25 * u(rng);
        c.hd = 3 + 20 * u(rng);
        c.helper_seed_count = static_cast<int>(4 * u(rng));
        cases.push_back(c);
    }
    const auto s = summarize(cases);
    auto column = [&](auto get) {
        std::vector<double> v;
        for (const auto& c : cases) v.push_back(get(c));
        return oracle::stats(v);
    };
    auto check = [&](const char* name, oracle::Stats want) {
        const auto* m = s.find(name);
        ASSERT_NE(m, nullptr) << name;
        EXPECT_EQ(m->count, 40u);
        EXPECT_EQ(m->min, want.min) << name;
        EXPECT_EQ(m->max, want.max) << name;
        EXPECT_NEAR(m->mean, want.mean, 1e-9 * std::abs(want.mean)) << name;
        EXPECT_NEAR(*m->stddev, want.sd, 1e-9 * std::abs(want.sd)) << name;
        EXPECT_LE(m->min, m->mean);
        EXPECT_LE(m->mean, m->max);
    };
    check("dsc", column([](const CaseMetrics& c) { return *c.dsc; }));
    check("hd", column([](const CaseMetrics& c) { return *c.hd; }));
    check("max_diameter_algo", column([](const CaseMetrics& c) { return c.max_diameter_algo; }));
    check("max_diameter_ref", column([](const CaseMetrics& c) { return *c.max_diameter_ref; }));
    check("area_algo", column([](const CaseMetrics& c) { return c.area_algo; }));
    check("area_ref", column([](const CaseMetrics& c) { return *c.area_ref; }));
    check("pixels_algo", column([](const CaseMetrics& c) { return double(c.pixels_algo); }));
    check("pixels_ref", column([](const CaseMetrics& c) { return double(*c.pixels_ref); }));
    check("helper_seeds", column([](const CaseMetrics& c) { return double(c.helper_seed_count); }));
}

TEST(Summarize, MissingReferenceColumnsSkipped) {
    std::vector<CaseMetrics> cases(3);
    cases[0].area_algo = 1;
    cases[1].area_algo = 2;
    cases[2].area_algo = 6;
    cases[1].dsc = 0.5;
    const auto s = summarize(cases);
    EXPECT_EQ(s.find("area_algo")->mean, 3.0);
    ASSERT_NE(s.find("dsc"), nullptr);
    EXPECT_EQ(s.find("dsc")->count, 1u);
    EXPECT_EQ(s.find("hd"), nullptr);
    EXPECT_THROW(summarize({}), InvalidArgument);
}

TEST(EvaluateCase, UsesSpacingForLengthsAndAreas) {
    const auto ref = disk(64, 64, 32, 32, 10);
    const auto algo = disk(64, 64, 33, 32, 9);
    const auto c = evaluate_case(algo, &ref, 0.5, 2);
    EXPECT_EQ(c.pixels_algo, algo.count());
    EXPECT_EQ(*c.pixels_ref, ref.count());
    EXPECT_DOUBLE_EQ(c.area_algo, algo.count() * 0.25);
    EXPECT_DOUBLE_EQ(*c.area_ref, ref.count() * 0.25);
    EXPECT_DOUBLE_EQ(c.max_diameter_algo, max_diameter(algo) * 0.5);
    EXPECT_EQ(*c.dsc, dice(algo, ref));
    EXPECT_EQ(*c.hd, hausdorff(algo, ref));
    EXPECT_EQ(c.helper_seed_count, 2);
}

TEST(EvaluateCase, WithoutReference) {
    const auto algo = disk(32, 32, 16, 16, 5);
    const auto c = evaluate_case(algo, nullptr, std::nullopt, 0);
    EXPECT_FALSE(c.dsc.has_value());
    EXPECT_FALSE(c.hd.has_value());
    EXPECT_FALSE(c.max_diameter_ref.has_value());
    EXPECT_EQ(c.area_algo, double(algo.count()));
}
