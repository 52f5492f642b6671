#ifndef SELFAFFINE_GRID_MOMENTS_HPP
#define SELFAFFINE_GRID_MOMENTS_HPP

#include "selfaffine/sampling.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace selfaffine {

struct GridMomentRow {
    double r = 0.0;
    double q = 0.0;
    double log_moment = 0.0;     // log of sum of cell-mass^q, averaged over origins
    double cells_occupied = 0.0; // mean over origin shifts
};

struct GridMoments {
    std::vector<double> radii; // admissible radii, descending
    std::vector<double> qs;
    std::vector<GridMomentRow> rows;
    std::vector<double> excluded_radii; // below the sampling-noise floor
    std::vector<std::string> notices;
    int origin_shifts = 0;

    const GridMomentRow& at(double r, double q) const;
};

struct GridOptions {
    int origin_shifts = 4;              // moments averaged over this many origins
    double min_points_per_cell = 20.0;  // noise floor: N / occupied >= this
};

// Bins the sample into axis-aligned cells of side 2r and forms the moment
// sums sum_c mass(c)^q per radius. Grid origins are randomized from the
// sample's seed and averaged to blunt alignment artifacts.
GridMoments grid_moments(const SampledMeasure& sample, std::span<const double> radii,
                         std::span<const double> qs, const GridOptions& opt = {});

struct TauFit {
    double slope = 0.0;
    double se = 0.0;
    double curvature = 0.0; // quadratic coefficient in log r
    bool curved = false;
    int radii_used = 0;
};

// Least-squares slope of log moment against log r; the empirical spectrum
// estimate at one q.
TauFit empirical_tau(const GridMoments& moments, double q, double curvature_threshold = 0.05);

struct LocalDimensionData {
    struct RadiusHistogram {
        double r = 0.0;
        std::vector<double> bin_lo;      // alpha bin left edges, fixed width
        std::vector<std::size_t> counts; // points per bin
    };
    std::vector<RadiusHistogram> per_radius; // ratios log mass / log r per point

    // per-point regression slope of log mass against log r
    std::vector<double> alpha_bin_lo;
    std::vector<std::size_t> alpha_counts;
    double alpha_median = 0.0;

    struct CoarsePoint {
        double alpha = 0.0;
        double f = 0.0; // log cell-count / -log r at the finest admissible radius
    };
    std::vector<CoarsePoint> coarse;
};

LocalDimensionData local_dimension_histogram(const SampledMeasure& sample,
                                             std::span<const double> radii,
                                             const GridOptions& opt = {});

} // namespace selfaffine

#endif
