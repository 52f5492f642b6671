#ifndef SELFAFFINE_COVERING_HPP
#define SELFAFFINE_COVERING_HPP

#include "selfaffine/affine.hpp"

#include <cstddef>
#include <span>
#include <vector>

namespace selfaffine {

// Closed axis-parallel rectangle prod [c_i - a_i, c_i + a_i].
struct AxisRectangle {
    std::vector<double> center;
    std::vector<double> semi;

    int dim() const { return static_cast<int>(center.size()); }
    double norm() const; // max semi-axis
    AxisRectangle inflate(double factor) const;
    bool intersects(const AxisRectangle& other) const; // closed, exact
    bool contains(const AxisRectangle& other) const;
    bool contains_point(std::span<const double> x) const;
};

// Greedy selection of disjoint subfamilies whose M-inflations cover the
// whole family, per dominant-axis class. Within a class, candidates are
// visited in decreasing minor-axis size (dyadic bands in size order), ties
// broken by lexicographic center order; every rejected rectangle records the
// selected one that blocked it.
struct SelectionResult {
    std::vector<int> class_of;                      // 0 or 1 per input
    std::vector<std::vector<std::size_t>> selected; // per class, in selection order
    std::vector<long> remover;                      // -1 for selected inputs
    double inflation = 0.0;                         // M = 3 sup|R| / inf|R|
};

SelectionResult partition_and_select(std::span<const AxisRectangle> rects);

struct CoveringCertificate {
    bool disjoint_ok = false;
    bool covering_ok = false;
    std::size_t points_checked = 0;
    std::vector<std::size_t> failures; // input indices with uncovered samples
};

// Exact pairwise disjointness of each selected subfamily, plus covering of
// every input rectangle by the inflated selection of its class: exact
// interval unions in d = 1, a per-rectangle sample lattice in d = 2.
CoveringCertificate certify_selection(std::span<const AxisRectangle> rects,
                                      const SelectionResult& sel, int lattice_per_axis = 9);

// Maximal disjoint subfamily of the images (T + b_j)(C) of a common cube,
// with the intersection-implies-containment certificate: a blocked image is
// contained in the blocker's image of the concentrically tripled cube.
struct TranslateSelection {
    std::vector<std::size_t> selected;
    std::vector<long> remover;
    double inflation = 3.0;
};

TranslateSelection select_translates(std::span<const LinearMap> linear_parts,
                                     std::span<const std::vector<double>> offsets,
                                     std::span<const double> cube_center, double cube_half);

struct TranslateCertificate {
    bool disjoint_ok = false;
    bool covering_ok = false;
    std::size_t points_checked = 0;
};

TranslateCertificate certify_translates(std::span<const LinearMap> linear_parts,
                                        std::span<const std::vector<double>> offsets,
                                        std::span<const double> cube_center, double cube_half,
                                        const TranslateSelection& sel,
                                        int lattice_per_axis = 5);

} // namespace selfaffine

#endif
