#include "selfaffine/covering.hpp"

#include "selfaffine/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace selfaffine {

double AxisRectangle::norm() const {
    double n = 0.0;
    for (double a : semi) n = std::max(n, a);
    return n;
}

AxisRectangle AxisRectangle::inflate(double factor) const {
    AxisRectangle out = *this;
    for (double& a : out.semi) a *= factor;
    return out;
}

bool AxisRectangle::intersects(const AxisRectangle& other) const {
    for (int j = 0; j < dim(); ++j)
        if (std::abs(center[j] - other.center[j]) > semi[j] + other.semi[j]) return false;
    return true;
}

bool AxisRectangle::contains(const AxisRectangle& other) const {
    for (int j = 0; j < dim(); ++j) {
        if (other.center[j] - other.semi[j] < center[j] - semi[j]) return false;
        if (other.center[j] + other.semi[j] > center[j] + semi[j]) return false;
    }
    return true;
}

bool AxisRectangle::contains_point(std::span<const double> x) const {
    for (int j = 0; j < dim(); ++j)
        if (std::abs(x[j] - center[j]) > semi[j]) return false;
    return true;
}

SelectionResult partition_and_select(std::span<const AxisRectangle> rects) {
    if (rects.empty()) throw ValidationError("selection: empty family");
    int d = rects[0].dim();
    if (d < 1 || d > 2)
        throw ValidationError("selection: only d = 1 and d = 2 are supported");

    double sup_norm = 0.0, inf_norm = 1e300;
    for (const auto& r : rects) {
        if (r.dim() != d) throw ValidationError("selection: mixed dimensions");
        for (double a : r.semi)
            if (!(a > 0.0)) throw ValidationError("selection: semi-axes must be positive");
        sup_norm = std::max(sup_norm, r.norm());
        inf_norm = std::min(inf_norm, r.norm());
    }

    SelectionResult out;
    out.inflation = 3.0 * sup_norm / inf_norm;
    out.class_of.resize(rects.size());
    out.selected.assign(2, {});
    out.remover.assign(rects.size(), -1);

    for (std::size_t i = 0; i < rects.size(); ++i)
        out.class_of[i] = (d == 1 || rects[i].semi[0] == rects[i].norm()) ? 0 : 1;

    for (int cls = 0; cls < 2; ++cls) {
        int band_axis = d == 1 ? 0 : (cls == 0 ? 1 : 0);
        std::vector<std::size_t> members;
        for (std::size_t i = 0; i < rects.size(); ++i)
            if (out.class_of[i] == cls) members.push_back(i);
        std::sort(members.begin(), members.end(), [&](std::size_t a, std::size_t b) {
            if (rects[a].semi[band_axis] != rects[b].semi[band_axis])
                return rects[a].semi[band_axis] > rects[b].semi[band_axis];
            return rects[a].center < rects[b].center;
        });
        for (std::size_t i : members) {
            long blocker = -1;
            for (std::size_t s : out.selected[cls]) {
                if (rects[i].intersects(rects[s])) {
                    blocker = static_cast<long>(s);
                    break;
                }
            }
            if (blocker < 0)
                out.selected[cls].push_back(i);
            else
                out.remover[i] = blocker;
        }
    }
    return out;
}

CoveringCertificate certify_selection(std::span<const AxisRectangle> rects,
                                      const SelectionResult& sel, int lattice_per_axis) {
    CoveringCertificate cert;
    cert.disjoint_ok = true;
    int d = rects[0].dim();

    for (const auto& cls : sel.selected)
        for (std::size_t a = 0; a < cls.size(); ++a)
            for (std::size_t b = a + 1; b < cls.size(); ++b)
                if (rects[cls[a]].intersects(rects[cls[b]])) cert.disjoint_ok = false;

    // blocked rectangles must sit inside their blocker's inflation (exact)
    bool covering = true;
    for (std::size_t i = 0; i < rects.size(); ++i) {
        if (sel.remover[i] < 0) continue;
        const auto& blocker = rects[static_cast<std::size_t>(sel.remover[i])];
        if (!blocker.inflate(sel.inflation).contains(rects[i])) {
            covering = false;
            cert.failures.push_back(i);
        }
    }

    if (d == 1) {
        // exact interval-union check per class
        for (int cls = 0; cls < 2; ++cls) {
            std::vector<std::pair<double, double>> ivals;
            for (std::size_t s : sel.selected[cls]) {
                auto big = rects[s].inflate(sel.inflation);
                ivals.emplace_back(big.center[0] - big.semi[0], big.center[0] + big.semi[0]);
            }
            std::sort(ivals.begin(), ivals.end());
            std::vector<std::pair<double, double>> merged;
            for (auto& iv : ivals) {
                if (!merged.empty() && iv.first <= merged.back().second)
                    merged.back().second = std::max(merged.back().second, iv.second);
                else
                    merged.push_back(iv);
            }
            for (std::size_t i = 0; i < rects.size(); ++i) {
                if (sel.class_of[i] != cls) continue;
                double lo = rects[i].center[0] - rects[i].semi[0];
                double hi = rects[i].center[0] + rects[i].semi[0];
                bool inside = false;
                for (auto& iv : merged)
                    if (iv.first <= lo && hi <= iv.second) inside = true;
                if (!inside) {
                    covering = false;
                    cert.failures.push_back(i);
                }
                ++cert.points_checked;
            }
        }
    } else {
        // sample lattice inside each input rectangle against the inflated
        // selection of its class
        std::vector<std::vector<AxisRectangle>> inflated(2);
        for (int cls = 0; cls < 2; ++cls)
            for (std::size_t s : sel.selected[cls])
                inflated[cls].push_back(rects[s].inflate(sel.inflation));

        int k = std::max(lattice_per_axis, 2);
        std::vector<double> pt(d);
        for (std::size_t i = 0; i < rects.size(); ++i) {
            const auto& covers = inflated[sel.class_of[i]];
            bool ok = true;
            for (int u = 0; u < k && ok; ++u) {
                for (int v = 0; v < k && ok; ++v) {
                    pt[0] = rects[i].center[0] + rects[i].semi[0] * (2.0 * u / (k - 1) - 1.0);
                    pt[1] = rects[i].center[1] + rects[i].semi[1] * (2.0 * v / (k - 1) - 1.0);
                    ++cert.points_checked;
                    bool hit = false;
                    for (const auto& big : covers)
                        if (big.contains_point(pt)) {
                            hit = true;
                            break;
                        }
                    if (!hit) ok = false;
                }
            }
            if (!ok) {
                covering = false;
                cert.failures.push_back(i);
            }
        }
    }
    cert.covering_ok = covering;
    return cert;
}

namespace {

// |T^{-1} w|_inf for the shared linear part
double preimage_inf_norm(const LinearMap& t, std::span<const double> w) {
    auto x = t.solve(w);
    double n = 0.0;
    for (double v : x) n = std::max(n, std::abs(v));
    return n;
}

} // namespace

TranslateSelection select_translates(std::span<const LinearMap> linear_parts,
                                     std::span<const std::vector<double>> offsets,
                                     std::span<const double> cube_center, double cube_half) {
    if (linear_parts.empty()) throw ValidationError("translates: empty family");
    if (linear_parts.size() != offsets.size())
        throw ValidationError("translates: offsets do not match maps");
    if (!(cube_half > 0.0)) throw ValidationError("translates: cube half-width must be positive");
    const LinearMap& t = linear_parts[0];
    int d = t.dim();
    if (static_cast<int>(cube_center.size()) != d)
        throw ValidationError("translates: cube dimension mismatch");
    for (const auto& m : linear_parts)
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j)
                if (m.at(i, j) != t.at(i, j))
                    throw ValidationError("translates: maps must share one linear part");

    // deterministic order: lexicographic offsets
    std::vector<std::size_t> order(offsets.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return offsets[a] < offsets[b]; });

    TranslateSelection out;
    out.remover.assign(offsets.size(), -1);
    std::vector<double> w(d);
    for (std::size_t i : order) {
        long blocker = -1;
        for (std::size_t s : out.selected) {
            for (int j = 0; j < d; ++j) w[j] = offsets[i][j] - offsets[s][j];
            // images touch iff the preimage offset fits in the doubled cube
            if (preimage_inf_norm(t, w) <= 2.0 * cube_half) {
                blocker = static_cast<long>(s);
                break;
            }
        }
        if (blocker < 0)
            out.selected.push_back(i);
        else
            out.remover[i] = blocker;
    }
    return out;
}

TranslateCertificate certify_translates(std::span<const LinearMap> linear_parts,
                                        std::span<const std::vector<double>> offsets,
                                        std::span<const double> cube_center, double cube_half,
                                        const TranslateSelection& sel, int lattice_per_axis) {
    TranslateCertificate cert;
    const LinearMap& t = linear_parts[0];
    int d = t.dim();

    cert.disjoint_ok = true;
    std::vector<double> w(d);
    for (std::size_t a = 0; a < sel.selected.size(); ++a)
        for (std::size_t b = a + 1; b < sel.selected.size(); ++b) {
            for (int j = 0; j < d; ++j)
                w[j] = offsets[sel.selected[a]][j] - offsets[sel.selected[b]][j];
            // open-interior overlap would need strict inequality
            if (preimage_inf_norm(t, w) < 2.0 * cube_half) cert.disjoint_ok = false;
        }

    // covering: lattice points of each blocked image must land inside the
    // blocker's image of the concentrically tripled cube
    cert.covering_ok = true;
    int k = std::max(lattice_per_axis, 2);
    std::vector<int> idx(d, 0);
    std::vector<double> corner(d), img(d), rel(d);
    for (std::size_t i = 0; i < offsets.size(); ++i) {
        if (sel.remover[i] < 0) continue;
        std::size_t s = static_cast<std::size_t>(sel.remover[i]);
        std::fill(idx.begin(), idx.end(), 0);
        while (true) {
            for (int j = 0; j < d; ++j)
                corner[j] = cube_center[j] + cube_half * (2.0 * idx[j] / (k - 1) - 1.0);
            t.apply(corner, img);
            for (int j = 0; j < d; ++j) img[j] += offsets[i][j];
            ++cert.points_checked;
            // membership in (T + b_s)(3C): pull back and compare to the cube
            for (int j = 0; j < d; ++j) rel[j] = img[j] - offsets[s][j];
            auto pre = t.solve(rel);
            for (int j = 0; j < d; ++j)
                if (std::abs(pre[j] - cube_center[j]) > 3.0 * cube_half + 1e-12)
                    cert.covering_ok = false;
            int axis = 0;
            while (axis < d && ++idx[axis] == k) idx[axis++] = 0;
            if (axis == d) break;
        }
    }
    return cert;
}

} // namespace selfaffine
