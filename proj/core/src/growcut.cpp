#include "uscut/growcut.hpp"

#include <cmath>
#include <string>

#include "uscut/error.hpp"

namespace uscut {
namespace {

constexpr int kDx[8] = {-1, 0, 1, -1, 1, -1, 0, 1};
constexpr int kDy[8] = {-1, -1, -1, 0, 0, 1, 1, 1};

double attack_gain(int gp, int gq) noexcept {
    return 1.0 - std::abs(gp - gq) / 255.0;
}

GrowCutResult run_automaton(const GrayImage& img, std::vector<CellState> cells, int max_iters) {
    const int w = img.width();
    const int h = img.height();
    std::vector<CellState> next = cells;

    GrowCutResult res;
    res.converged = false;
    for (int iter = 0; iter < max_iters; ++iter) {
        bool changed = false;
        for (int y = 0; y < h; ++y) {
            for (int x = 0; x < w; ++x) {
                const std::size_t p = static_cast<std::size_t>(y) * w + x;
                const CellState self = cells[p];
                CellState best = self;
                bool won = false;
                for (int k = 0; k < 8; ++k) {
                    const int qx = x + kDx[k];
                    const int qy = y + kDy[k];
                    if (qx < 0 || qy < 0 || qx >= w || qy >= h) {
                        continue;
                    }
                    const CellState& q = cells[static_cast<std::size_t>(qy) * w + qx];
                    if (q.label == CellLabel::unlabeled) {
                        continue;
                    }
                    const double force = attack_gain(img.at(x, y), img.at(qx, qy)) * q.strength;
                    if (!(force > self.strength)) {
                        continue;
                    }
                    if (!won || force > best.strength ||
                        (force == best.strength && q.label == CellLabel::foreground &&
                         best.label == CellLabel::background)) {
                        best = CellState{q.label, force};
                        won = true;
                    }
                }
                next[p] = best;
                if (won && (best.label != self.label || best.strength != self.strength)) {
                    changed = true;
                }
            }
        }
        cells.swap(next);
        if (!changed) {
            res.converged = true;
            break;
        }
        ++res.iterations;
    }

    res.foreground = BinaryMask(w, h);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            if (cells[static_cast<std::size_t>(y) * w + x].label == CellLabel::foreground) {
                res.foreground.set(x, y);
            }
        }
    }
    res.cells = std::move(cells);
    return res;
}

void check_seed_counts(std::size_t fg, std::size_t bg, std::size_t seeded, std::size_t total) {
    if ((fg == 0 || bg == 0) && seeded < total) {
        throw InvalidArgument(std::string("grow_cut needs at least one ") +
                              (fg == 0 ? "foreground" : "background") + " seed");
    }
}

} // namespace

GrowCutResult grow_cut(const GrayImage& img, std::span<const PixelCoord> fg_seeds,
                       std::span<const PixelCoord> bg_seeds, int max_iters) {
    const int w = img.width();
    const int h = img.height();
    std::vector<CellState> cells(static_cast<std::size_t>(w) * h);
    std::size_t seeded = 0;
    auto place = [&](const PixelCoord& s, CellLabel label) {
        if (s.x < 0 || s.y < 0 || s.x >= w || s.y >= h) {
            throw InvalidArgument("grow_cut seed outside the image");
        }
        auto& c = cells[static_cast<std::size_t>(s.y) * w + s.x];
        if (c.label != CellLabel::unlabeled && c.label != label) {
            throw InvalidArgument("pixel (" + std::to_string(s.x) + "," + std::to_string(s.y) +
                                  ") seeded as both foreground and background");
        }
        if (c.label == CellLabel::unlabeled) {
            ++seeded;
        }
        c = CellState{label, 1.0};
    };
    for (const auto& s : fg_seeds) {
        place(s, CellLabel::foreground);
    }
    for (const auto& s : bg_seeds) {
        place(s, CellLabel::background);
    }
    check_seed_counts(fg_seeds.size(), bg_seeds.size(), seeded, cells.size());
    return run_automaton(img, std::move(cells), max_iters);
}

GrowCutResult grow_cut(const GrayImage& img, const GrayImage& labels, int max_iters) {
    if (labels.width() != img.width() || labels.height() != img.height()) {
        throw InvalidArgument("label image dimensions differ from the image");
    }
    std::vector<PixelCoord> fg;
    std::vector<PixelCoord> bg;
    for (int y = 0; y < labels.height(); ++y) {
        for (int x = 0; x < labels.width(); ++x) {
            switch (labels.at(x, y)) {
            case 0:
                break;
            case 1:
                fg.push_back({x, y});
                break;
            case 2:
                bg.push_back({x, y});
                break;
            default:
                throw InvalidArgument("label image values must be 0, 1 or 2");
            }
        }
    }
    return grow_cut(img, fg, bg, max_iters);
}

} // namespace uscut
