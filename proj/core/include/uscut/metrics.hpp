#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "uscut/image.hpp"

namespace uscut {

/// Pixel coordinates of the mask boundary: set pixels with an unset
/// 4-neighbour or lying on the image edge. Raster order.
struct PixelCoord {
    int x = 0;
    int y = 0;

    friend bool operator==(const PixelCoord&, const PixelCoord&) = default;
};

std::vector<PixelCoord> boundary_pixels(const BinaryMask& mask);

/// Dice similarity 2|A n R| / (|A| + |R|). Throws InvalidArgument on shape
/// mismatch or when both masks are empty.
double dice(const BinaryMask& a, const BinaryMask& r);

/// Symmetric Hausdorff distance in pixels between the boundary pixel
/// centers of both masks. Both masks must be non-empty.
double hausdorff(const BinaryMask& a, const BinaryMask& r);

/// Largest distance between two boundary pixel centers, times spacing.
double max_diameter(const BinaryMask& mask, double spacing = 1.0);

/// One row of a Table-1 style report. Reference-dependent fields are empty
/// when no ground truth is available.
struct CaseMetrics {
    double max_diameter_algo = 0.0;
    std::optional<double> max_diameter_ref;
    double area_algo = 0.0;
    std::optional<double> area_ref;
    std::size_t pixels_algo = 0;
    std::optional<std::size_t> pixels_ref;
    std::optional<double> dsc;
    std::optional<double> hd;
    int helper_seed_count = 0;
};

/// Computes the row for an algorithm mask and an optional reference. Lengths
/// and areas use `spacing_mm` when given, pixels otherwise; HD stays in
/// pixels. An empty algorithm mask gets zero diameter and area.
CaseMetrics evaluate_case(const BinaryMask& algo, const BinaryMask* reference,
                          std::optional<double> spacing_mm, int helper_seed_count);

struct MetricSummary {
    std::string name;
    std::size_t count = 0;
    double min = 0.0;
    double max = 0.0;
    double mean = 0.0;
    /// Sample (n-1) standard deviation; empty below two values.
    std::optional<double> stddev;
};

struct SummaryStats {
    std::vector<MetricSummary> metrics;

    const MetricSummary* find(std::string_view name) const noexcept;
};

/// Per-metric min/max/mean/sample-sd. Metrics missing from some rows are
/// summarised over the rows that have them and left out when no row has
/// them. Throws on an empty list.
SummaryStats summarize(std::span<const CaseMetrics> cases);

/// Summary of one plain series, same conventions. Throws on an empty series.
MetricSummary summarize_values(std::string name, std::span<const double> values);

} // namespace uscut
