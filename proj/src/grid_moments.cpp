#include "selfaffine/grid_moments.hpp"

#include "selfaffine/errors.hpp"
#include "selfaffine/rng.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <unordered_map>

namespace selfaffine {

namespace {

// cell index packed 16 bits per axis, biased to stay positive
std::uint64_t pack_cell(const double* x, const double* origin, double side, int d) {
    std::uint64_t key = 0;
    for (int j = 0; j < d; ++j) {
        double idx = std::floor((x[j] - origin[j]) / side);
        if (idx < -30000.0 || idx > 30000.0)
            throw ValidationError("grid: cell index out of packable range (radius too small)");
        key = (key << 16) | static_cast<std::uint64_t>(static_cast<std::int64_t>(idx) + 32768);
    }
    return key;
}

using CellCounts = std::unordered_map<std::uint64_t, std::uint32_t>;

CellCounts bin_points(const SampledMeasure& sample, const double* origin, double side) {
    CellCounts counts;
    counts.reserve(1024);
    for (std::size_t i = 0; i < sample.count; ++i)
        ++counts[pack_cell(sample.point(i), origin, side, sample.dim)];
    return counts;
}

std::vector<std::vector<double>> draw_origins(const SampledMeasure& sample, int shifts) {
    Philox rng(sample.seed, 0x6772696464ull); // grid-origin stream
    std::vector<std::vector<double>> origins(shifts, std::vector<double>(sample.dim, 0.0));
    for (int s = 0; s < shifts; ++s)
        for (int j = 0; j < sample.dim; ++j)
            origins[s][j] = rng.next_double(); // scaled by the cell side at use
    if (shifts > 0)
        std::fill(origins[0].begin(), origins[0].end(), 0.0); // first shift is the plain grid
    return origins;
}

} // namespace

const GridMomentRow& GridMoments::at(double r, double q) const {
    for (const auto& row : rows)
        if (row.r == r && row.q == q) return row;
    throw ValidationError("grid moments: no row for requested (r, q)");
}

GridMoments grid_moments(const SampledMeasure& sample, std::span<const double> radii,
                         std::span<const double> qs, const GridOptions& opt) {
    if (sample.count == 0) throw ValidationError("grid_moments: empty sample");
    if (radii.empty()) throw ValidationError("grid_moments: no radii");
    if (opt.origin_shifts < 1) throw ValidationError("grid_moments: need at least one origin");

    std::vector<double> sorted(radii.begin(), radii.end());
    std::sort(sorted.begin(), sorted.end(), std::greater<double>());

    GridMoments out;
    out.qs.assign(qs.begin(), qs.end());
    out.origin_shifts = opt.origin_shifts;

    auto origins = draw_origins(sample, opt.origin_shifts);
    std::vector<double> origin(sample.dim);

    for (double r : sorted) {
        if (!(r > 0.0)) throw ValidationError("grid_moments: radii must be positive");
        double side = 2.0 * r;

        std::vector<double> moment_mean(qs.size(), 0.0);
        double occupied_mean = 0.0;
        for (int s = 0; s < opt.origin_shifts; ++s) {
            for (int j = 0; j < sample.dim; ++j) origin[j] = origins[s][j] * side;
            CellCounts counts = bin_points(sample, origin.data(), side);
            occupied_mean += static_cast<double>(counts.size());
            for (std::size_t k = 0; k < qs.size(); ++k) {
                double q = qs[k];
                double mom = 0.0;
                for (const auto& [key, c] : counts) {
                    (void)key;
                    mom += std::pow(static_cast<double>(c) / sample.count, q);
                }
                moment_mean[k] += mom;
            }
        }
        occupied_mean /= opt.origin_shifts;
        for (auto& v : moment_mean) v /= opt.origin_shifts;

        if (sample.count / occupied_mean < opt.min_points_per_cell) {
            out.excluded_radii.push_back(r);
            std::ostringstream msg;
            msg << "radius " << r << " excluded: " << (sample.count / occupied_mean)
                << " points per occupied cell is under the floor " << opt.min_points_per_cell;
            out.notices.push_back(msg.str());
            continue;
        }
        out.radii.push_back(r);
        for (std::size_t k = 0; k < qs.size(); ++k) {
            GridMomentRow row;
            row.r = r;
            row.q = qs[k];
            row.log_moment = qs[k] == 1.0 ? 0.0 : std::log(moment_mean[k]);
            row.cells_occupied = occupied_mean;
            out.rows.push_back(row);
        }
    }
    return out;
}

TauFit empirical_tau(const GridMoments& moments, double q, double curvature_threshold) {
    std::vector<double> xs, ys;
    for (const auto& row : moments.rows) {
        if (row.q != q) continue;
        xs.push_back(std::log(row.r));
        ys.push_back(row.log_moment);
    }
    int n = static_cast<int>(xs.size());
    if (n < 4) throw ValidationError("empirical_tau: need at least 4 admissible radii");

    double xbar = 0.0, ybar = 0.0;
    for (int i = 0; i < n; ++i) {
        xbar += xs[i];
        ybar += ys[i];
    }
    xbar /= n;
    ybar /= n;
    double sxx = 0.0, sxy = 0.0;
    for (int i = 0; i < n; ++i) {
        sxx += (xs[i] - xbar) * (xs[i] - xbar);
        sxy += (xs[i] - xbar) * (ys[i] - ybar);
    }
    if (sxx <= 0.0) throw ValidationError("empirical_tau: degenerate radii");

    TauFit fit;
    fit.radii_used = n;
    fit.slope = sxy / sxx;
    double intercept = ybar - fit.slope * xbar;
    double rss = 0.0;
    for (int i = 0; i < n; ++i) {
        double resid = ys[i] - (intercept + fit.slope * xs[i]);
        rss += resid * resid;
    }
    fit.se = n > 2 ? std::sqrt(rss / (n - 2) / sxx) : 0.0;

    // quadratic term in centered log r as the curvature diagnostic
    double s2 = 0.0, s3 = 0.0, s4 = 0.0, s2y = 0.0;
    for (int i = 0; i < n; ++i) {
        double u = xs[i] - xbar;
        double v = ys[i] - ybar;
        s2 += u * u;
        s3 += u * u * u;
        s4 += u * u * u * u;
        s2y += u * u * v;
    }
    double denom = s4 - s3 * s3 / s2 - s2 * s2 / n;
    if (std::abs(denom) > 1e-12) {
        double c2 = (s2y - (s3 / s2) * sxy - 0.0) / denom;
        fit.curvature = c2;
        fit.curved = std::abs(c2) > curvature_threshold;
    }
    return fit;
}

LocalDimensionData local_dimension_histogram(const SampledMeasure& sample,
                                             std::span<const double> radii,
                                             const GridOptions& opt) {
    if (sample.count == 0) throw ValidationError("local dimensions: empty sample");
    std::vector<double> sorted(radii.begin(), radii.end());
    std::sort(sorted.begin(), sorted.end(), std::greater<double>());

    const double bin_width = 0.05;
    const double alpha_cap = 4.0 * sample.dim + 2.0;
    auto bin_of = [&](double alpha) {
        double a = std::clamp(alpha, 0.0, alpha_cap);
        return static_cast<std::size_t>(a / bin_width);
    };
    std::size_t n_bins = bin_of(alpha_cap) + 1;

    LocalDimensionData out;
    std::vector<double> origin(sample.dim, 0.0); // plain grid for per-point masses

    // per-point regression accumulators over admissible radii
    std::vector<double> sum_y(sample.count, 0.0), sum_xy(sample.count, 0.0);
    std::vector<double> used_x;

    double finest = 0.0;
    CellCounts finest_counts;

    for (double r : sorted) {
        double side = 2.0 * r;
        CellCounts counts = bin_points(sample, origin.data(), side);
        double occupied = static_cast<double>(counts.size());
        if (sample.count / occupied < opt.min_points_per_cell) continue;

        LocalDimensionData::RadiusHistogram hist;
        hist.r = r;
        hist.counts.assign(n_bins, 0);
        double logr = std::log(r);
        for (std::size_t i = 0; i < sample.count; ++i) {
            auto it = counts.find(pack_cell(sample.point(i), origin.data(), side, sample.dim));
            double mass = static_cast<double>(it->second) / sample.count;
            double y = std::log(mass);
            ++hist.counts[bin_of(y / logr)];
            sum_y[i] += y;
            sum_xy[i] += y * logr;
        }
        hist.bin_lo.resize(n_bins);
        for (std::size_t b = 0; b < n_bins; ++b) hist.bin_lo[b] = b * bin_width;
        out.per_radius.push_back(std::move(hist));
        used_x.push_back(logr);

        finest = r;
        finest_counts = std::move(counts);
    }
    if (used_x.empty())
        throw ValidationError("local dimensions: all radii fell below the noise floor");

    // per-point slopes
    double xbar = 0.0;
    for (double x : used_x) xbar += x;
    xbar /= used_x.size();
    double sxx = 0.0;
    for (double x : used_x) sxx += (x - xbar) * (x - xbar);

    out.alpha_counts.assign(n_bins, 0);
    out.alpha_bin_lo.resize(n_bins);
    for (std::size_t b = 0; b < n_bins; ++b) out.alpha_bin_lo[b] = b * bin_width;

    std::vector<double> alphas;
    if (used_x.size() >= 2 && sxx > 0.0) {
        alphas.resize(sample.count);
        for (std::size_t i = 0; i < sample.count; ++i) {
            double slope = (sum_xy[i] - xbar * sum_y[i]) / sxx;
            alphas[i] = slope;
            ++out.alpha_counts[bin_of(slope)];
        }
        std::nth_element(alphas.begin(), alphas.begin() + alphas.size() / 2, alphas.end());
        out.alpha_median = alphas[alphas.size() / 2];
    }

    // coarse spectrum at the finest admissible radius
    if (finest > 0.0) {
        double logr = std::log(finest);
        std::vector<std::size_t> cell_bins(n_bins, 0);
        for (const auto& [key, c] : finest_counts) {
            (void)key;
            double alpha = std::log(static_cast<double>(c) / sample.count) / logr;
            ++cell_bins[bin_of(alpha)];
        }
        for (std::size_t b = 0; b < n_bins; ++b) {
            if (cell_bins[b] == 0) continue;
            LocalDimensionData::CoarsePoint pt;
            pt.alpha = (b + 0.5) * bin_width;
            pt.f = std::log(static_cast<double>(cell_bins[b])) / (-logr);
            out.coarse.push_back(pt);
        }
    }
    return out;
}

} // namespace selfaffine
