#ifndef SELFAFFINE_SAMPLING_HPP
#define SELFAFFINE_SAMPLING_HPP

#include "selfaffine/ifs.hpp"

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace selfaffine {

// Weighted point cloud from the random-iteration orbit. Points are stored
// row-major (count x dim); last_map[i] is the map applied to produce point i
// (used by the push-forward consistency checks).
struct SampledMeasure {
    std::vector<double> points;
    std::vector<std::uint8_t> last_map;
    int dim = 0;
    std::size_t count = 0;
    std::uint64_t seed = 0;
    std::size_t burn_in = 0;
    double bounding_radius = 0.0;
    IFSSpec spec;

    const double* point(std::size_t i) const { return &points[i * dim]; }
};

struct ChaosGameOptions {
    std::size_t count = 1'000'000;
    std::size_t burn_in = 1'000;
    std::uint64_t seed = 0;
    std::size_t budget = 200'000'000;
};

// One uniform draw from the ball of radius rho in R^{m d}, split into m
// translation vectors. Deterministic under seed.
std::vector<std::vector<double>> random_translations(int m, int d, double rho,
                                                     std::uint64_t seed);

// Random-iteration orbit z <- S_i(z), i ~ p, started at the origin. Every
// retained point stays inside B(0, bounding_radius).
SampledMeasure chaos_game(const IFSSpec& spec, const ChaosGameOptions& opt = {});

// Mean and standard error of f over the orbit, with the error taken from
// contiguous batch means so orbit autocorrelation is priced in.
struct BatchStat {
    double mean = 0.0;
    double se = 0.0;
    std::size_t used = 0; // points entering the batches
};

BatchStat orbit_stat(const SampledMeasure& sample,
                     const std::function<double(const double*)>& f, int batches = 100);

// Axis-aligned test box.
struct Box {
    std::vector<double> lo, hi;
    bool contains(const double* x, int dim) const {
        for (int j = 0; j < dim; ++j)
            if (x[j] < lo[j] || x[j] > hi[j]) return false;
        return true;
    }
};

enum class CheckStatus { Pass, Inconclusive, Violation };

struct InequalityCheck {
    std::string kind; // "pushforward-box" or "cylinder-ball"
    std::vector<int> word;
    double log_p_word = 0.0;
    double lhs = 0.0, rhs = 0.0;
    double sigma = 0.0; // standard error of lhs - rhs
    CheckStatus status = CheckStatus::Pass;
};

// Statistical checks of the self-affine mass inequalities on the sample:
// box masses against push-forwards under random words, and ball masses at
// coded points against cylinder probabilities. A violation is declared only
// beyond 3 standard errors.
std::vector<InequalityCheck> check_measure_inequalities(const SampledMeasure& sample,
                                                        std::span<const std::vector<int>> words,
                                                        std::uint64_t seed);

// Random words with letters drawn from the spec's probability vector.
std::vector<std::vector<int>> random_words(const IFSSpec& spec, int count, int max_length,
                                           std::uint64_t seed);

// Planar system of m copies of diag(t1, t2) with translations placing the
// images disjointly inside the unit square (rectangular open set condition).
IFSSpec make_rosc_spec(int m, double t1, double t2, std::vector<double> probabilities);

} // namespace selfaffine

#endif
