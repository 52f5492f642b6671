#ifndef SELFAFFINE_LYAPUNOV_HPP
#define SELFAFFINE_LYAPUNOV_HPP

#include "selfaffine/ifs.hpp"

#include <cstdint>
#include <vector>

namespace selfaffine {

// Bernoulli product measure on the shift, given by its letter weights.
struct BernoulliMeasure {
    std::vector<double> weights;
};

BernoulliMeasure make_bernoulli(std::vector<double> weights);
BernoulliMeasure uniform_bernoulli(int m);

// Lyapunov exponents lambda_1 >= ... >= lambda_d of the matrix cocycle under
// a Bernoulli measure, plus the entropy. phi_star(s) is the integrated
// singular value function: piecewise linear with slope lambda_{k+1} on
// [k, k+1] and slope (sum lambda)/d beyond d.
struct LyapunovData {
    std::vector<double> lambdas;
    std::vector<double> stderrs; // empty on the exact path
    double entropy = 0.0;
    bool exact = false;

    double phi_star(double s) const;
};

struct MonteCarloOptions {
    int word_length = 400;
    int trials = 10'000;
    std::uint64_t seed = 0;
    std::uint64_t budget = 100'000'000; // word_length * trials cap
};

// Exact path: per-coordinate expected log rates, sorted. Diagonal specs only.
LyapunovData lyapunov_exponents_exact(const IFSSpec& spec, const BernoulliMeasure& eta);

// Sampled path: averages of log alpha_i(T_{x|n})/n over random words, with
// standard errors. Products are tracked through compound matrices with
// running rescaling, so small singular values of long products stay in range.
LyapunovData lyapunov_exponents_mc(const IFSSpec& spec, const BernoulliMeasure& eta,
                                   const MonteCarloOptions& opt);

// The root s of entropy + phi_star(s) = 0.
double lyapunov_dimension(const LyapunovData& data);

} // namespace selfaffine

#endif
