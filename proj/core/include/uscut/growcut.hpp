#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "uscut/image.hpp"
#include "uscut/metrics.hpp"

namespace uscut {

enum class CellLabel : std::uint8_t { unlabeled = 0, foreground = 1, background = 2 };

struct CellState {
    CellLabel label = CellLabel::unlabeled;
    double strength = 0.0;
};

struct GrowCutResult {
    BinaryMask foreground;
    /// Final automaton state, row-major.
    std::vector<CellState> cells;
    /// Iterations that changed at least one cell.
    int iterations = 0;
    bool converged = false;
};

/// Seeded cellular automaton (Vezhnevets & Konouchine). Cells are attacked
/// by their 8 neighbours with force g(|C_p - C_q|) * theta_q, g(x) = 1 - x/255;
/// an attack wins when it beats the cell's own strength. Updates are
/// synchronous; among equally strong winning attacks the foreground label
/// wins, then the first neighbour in raster order.
///
/// Needs at least one seed of each label unless the seeds already cover
/// every pixel. Throws InvalidArgument for out-of-image or conflicting seeds.
GrowCutResult grow_cut(const GrayImage& img, std::span<const PixelCoord> fg_seeds,
                       std::span<const PixelCoord> bg_seeds, int max_iters = 500);

/// Seeds from a label image: 0 none, 1 foreground, 2 background.
GrowCutResult grow_cut(const GrayImage& img, const GrayImage& labels, int max_iters = 500);

} // namespace uscut
