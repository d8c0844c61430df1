#include "uscut/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "uscut/error.hpp"

namespace uscut {
namespace {

void require_same_shape(const BinaryMask& a, const BinaryMask& r) {
    if (!a.same_shape(r)) {
        throw InvalidArgument("mask dimensions differ (" + std::to_string(a.width()) + "x" +
                              std::to_string(a.height()) + " vs " + std::to_string(r.width()) + "x" +
                              std::to_string(r.height()) + ")");
    }
}

long long squared_distance(PixelCoord p, PixelCoord q) noexcept {
    const long long dx = p.x - q.x;
    const long long dy = p.y - q.y;
    return dx * dx + dy * dy;
}

// max over a of min over b, squared. Breaks out of the inner scan as soon as
// the running minimum cannot raise the current maximum.
long long directed_hausdorff_sq(std::span<const PixelCoord> a, std::span<const PixelCoord> b) {
    long long cmax = 0;
    for (const auto& p : a) {
        long long cmin = std::numeric_limits<long long>::max();
        for (const auto& q : b) {
            const long long d = squared_distance(p, q);
            if (d < cmin) {
                cmin = d;
                if (cmin <= cmax) {
                    break;
                }
            }
        }
        cmax = std::max(cmax, cmin);
    }
    return cmax;
}

} // namespace

std::vector<PixelCoord> boundary_pixels(const BinaryMask& mask) {
    std::vector<PixelCoord> out;
    const int w = mask.width();
    const int h = mask.height();
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            if (!mask.get(x, y)) {
                continue;
            }
            const bool edge = x == 0 || y == 0 || x == w - 1 || y == h - 1;
            if (edge || !mask.get(x - 1, y) || !mask.get(x + 1, y) || !mask.get(x, y - 1) ||
                !mask.get(x, y + 1)) {
                out.push_back(PixelCoord{x, y});
            }
        }
    }
    return out;
}

double dice(const BinaryMask& a, const BinaryMask& r) {
    require_same_shape(a, r);
    std::size_t na = 0;
    std::size_t nr = 0;
    std::size_t both = 0;
    const auto ba = a.bits();
    const auto br = r.bits();
    for (std::size_t k = 0; k < ba.size(); ++k) {
        na += ba[k];
        nr += br[k];
        both += ba[k] & br[k];
    }
    if (na + nr == 0) {
        throw InvalidArgument("dice is undefined for two empty masks");
    }
    return 2.0 * static_cast<double>(both) / static_cast<double>(na + nr);
}

double hausdorff(const BinaryMask& a, const BinaryMask& r) {
    require_same_shape(a, r);
    const auto ea = boundary_pixels(a);
    const auto er = boundary_pixels(r);
    if (ea.empty() || er.empty()) {
        throw InvalidArgument("hausdorff distance needs two non-empty masks");
    }
    const long long d2 = std::max(directed_hausdorff_sq(ea, er), directed_hausdorff_sq(er, ea));
    return std::sqrt(static_cast<double>(d2));
}

double max_diameter(const BinaryMask& mask, double spacing) {
    const auto pts = boundary_pixels(mask);
    if (pts.empty()) {
        throw InvalidArgument("maximal diameter needs a non-empty mask");
    }
    long long best = 0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        for (std::size_t j = i + 1; j < pts.size(); ++j) {
            best = std::max(best, squared_distance(pts[i], pts[j]));
        }
    }
    return std::sqrt(static_cast<double>(best)) * spacing;
}

CaseMetrics evaluate_case(const BinaryMask& algo, const BinaryMask* reference,
                          std::optional<double> spacing_mm, int helper_seed_count) {
    const double spacing = spacing_mm.value_or(1.0);
    CaseMetrics m;
    m.helper_seed_count = helper_seed_count;
    m.pixels_algo = algo.count();
    m.area_algo = static_cast<double>(m.pixels_algo) * spacing * spacing;
    m.max_diameter_algo = m.pixels_algo > 0 ? max_diameter(algo, spacing) : 0.0;
    if (reference != nullptr) {
        require_same_shape(algo, *reference);
        m.pixels_ref = reference->count();
        m.area_ref = static_cast<double>(*m.pixels_ref) * spacing * spacing;
        m.max_diameter_ref = *m.pixels_ref > 0 ? max_diameter(*reference, spacing) : 0.0;
        if (m.pixels_algo + *m.pixels_ref > 0) {
            m.dsc = dice(algo, *reference);
        }
        if (m.pixels_algo > 0 && *m.pixels_ref > 0) {
            m.hd = hausdorff(algo, *reference);
        }
    }
    return m;
}

const MetricSummary* SummaryStats::find(std::string_view name) const noexcept {
    for (const auto& m : metrics) {
        if (m.name == name) {
            return &m;
        }
    }
    return nullptr;
}

MetricSummary summarize_values(std::string name, std::span<const double> values) {
    MetricSummary s;
    s.name = std::move(name);
    s.count = values.size();
    if (values.empty()) {
        throw InvalidArgument("cannot summarize an empty series '" + s.name + "'");
    }
    const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
    s.min = *lo;
    s.max = *hi;
    s.mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
    if (values.size() >= 2) {
        double ss = 0.0;
        for (const double v : values) {
            ss += (v - s.mean) * (v - s.mean);
        }
        s.stddev = std::sqrt(ss / static_cast<double>(values.size() - 1));
    }
    return s;
}

SummaryStats summarize(std::span<const CaseMetrics> cases) {
    if (cases.empty()) {
        throw InvalidArgument("cannot summarize an empty case list");
    }
    struct Column {
        const char* name;
        std::optional<double> (*get)(const CaseMetrics&);
    };
    static constexpr Column kColumns[] = {
        {"max_diameter_algo", [](const CaseMetrics& c) -> std::optional<double> { return c.max_diameter_algo; }},
        {"max_diameter_ref", [](const CaseMetrics& c) { return c.max_diameter_ref; }},
        {"area_algo", [](const CaseMetrics& c) -> std::optional<double> { return c.area_algo; }},
        {"area_ref", [](const CaseMetrics& c) { return c.area_ref; }},
        {"pixels_algo", [](const CaseMetrics& c) -> std::optional<double> { return static_cast<double>(c.pixels_algo); }},
        {"pixels_ref",
         [](const CaseMetrics& c) -> std::optional<double> {
             return c.pixels_ref ? std::optional<double>(static_cast<double>(*c.pixels_ref)) : std::nullopt;
         }},
        {"dsc", [](const CaseMetrics& c) { return c.dsc; }},
        {"hd", [](const CaseMetrics& c) { return c.hd; }},
        {"helper_seeds", [](const CaseMetrics& c) -> std::optional<double> { return c.helper_seed_count; }},
    };

    SummaryStats out;
    std::vector<double> values;
    for (const auto& col : kColumns) {
        values.clear();
        for (const auto& c : cases) {
            if (auto v = col.get(c)) {
                values.push_back(*v);
            }
        }
        if (!values.empty()) {
            out.metrics.push_back(summarize_values(col.name, values));
        }
    }
    return out;
}

} // namespace uscut
