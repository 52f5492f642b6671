#include "selfaffine/lyapunov.hpp"

#include "selfaffine/errors.hpp"
#include "selfaffine/rng.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <sstream>

namespace selfaffine {

// Zero entries are admitted (point masses make valid test measures); the
// entropy convention 0 log 0 = 0 covers them.
BernoulliMeasure make_bernoulli(std::vector<double> weights) {
    double sum = 0.0;
    for (double w : weights) {
        if (!(w >= 0.0)) throw ValidationError("bernoulli: weights must be non-negative");
        sum += w;
    }
    if (std::abs(sum - 1.0) > 1e-12) {
        std::ostringstream msg;
        msg << "bernoulli: weights sum to " << sum << ", expected 1";
        throw ValidationError(msg.str());
    }
    return BernoulliMeasure{std::move(weights)};
}

BernoulliMeasure uniform_bernoulli(int m) {
    return BernoulliMeasure{std::vector<double>(m, 1.0 / m)};
}

double LyapunovData::phi_star(double s) const {
    if (s < 0.0) throw ValidationError("phi_star: s must be >= 0");
    int d = static_cast<int>(lambdas.size());
    double total = 0.0;
    for (double l : lambdas) total += l;
    if (s >= static_cast<double>(d)) return total * (s / d);
    int k = static_cast<int>(std::floor(s)); // s in [k, k+1)
    double v = 0.0;
    for (int l = 0; l < k; ++l) v += lambdas[l];
    v += (s - k) * lambdas[k];
    return v;
}

LyapunovData lyapunov_exponents_exact(const IFSSpec& spec, const BernoulliMeasure& eta) {
    if (!spec.diagonal)
        throw ValidationError("lyapunov: exact path requires diagonal linear parts");
    if (static_cast<int>(eta.weights.size()) != spec.map_count())
        throw ValidationError("lyapunov: measure size does not match map count");

    LyapunovData out;
    out.exact = true;
    out.entropy = entropy(eta.weights);
    out.lambdas.assign(spec.dim, 0.0);
    for (int l = 0; l < spec.dim; ++l)
        for (int i = 0; i < spec.map_count(); ++i)
            out.lambdas[l] += eta.weights[i] * std::log(std::abs(spec.maps[i].at(l, l)));
    std::sort(out.lambdas.begin(), out.lambdas.end(), std::greater<double>());
    return out;
}

namespace {

int sample_letter(const std::vector<double>& cdf, double u) {
    int lo = 0, hi = static_cast<int>(cdf.size()) - 1;
    while (lo < hi) {
        int mid = (lo + hi) / 2;
        if (u < cdf[mid]) hi = mid; else lo = mid + 1;
    }
    return lo;
}

// One word's log alpha_i(T_{x|n}) for all i, through compound products with
// per-step rescaling.
void word_log_alphas(const IFSSpec& spec, const std::vector<int>& word,
                     std::vector<double>& log_alpha) {
    int d = spec.dim;
    std::vector<std::vector<LinearMap>> comp(d); // comp[k-1][i] = compound_k(T_i)
    for (int k = 1; k <= d; ++k) {
        comp[k - 1].reserve(spec.map_count());
        for (int i = 0; i < spec.map_count(); ++i)
            comp[k - 1].push_back(compound(spec.maps[i], k));
    }
    log_alpha.assign(d, 0.0);
    double prev = 0.0;
    for (int k = 1; k <= d; ++k) {
        LinearMap prod = LinearMap::identity(binomial(d, k));
        double log_scale = 0.0;
        for (int letter : word) {
            prod = comp[k - 1][letter] * prod;
            double mx = 0.0;
            for (double v : prod.data()) mx = std::max(mx, std::abs(v));
            if (mx > 0.0 && (mx < 1e-120 || mx > 1e120)) {
                double inv = 1.0 / mx;
                LinearMap scaled(prod.dim());
                for (int i = 0; i < prod.dim(); ++i)
                    for (int j = 0; j < prod.dim(); ++j) scaled.at(i, j) = prod.at(i, j) * inv;
                prod = scaled;
                log_scale += std::log(mx);
            }
        }
        double log_prod_k = std::log(singular_values(prod).norm()) + log_scale;
        log_alpha[k - 1] = log_prod_k - prev;
        prev = log_prod_k;
    }
}

} // namespace

LyapunovData lyapunov_exponents_mc(const IFSSpec& spec, const BernoulliMeasure& eta,
                                   const MonteCarloOptions& opt) {
    if (static_cast<int>(eta.weights.size()) != spec.map_count())
        throw ValidationError("lyapunov: measure size does not match map count");
    if (opt.word_length < 1 || opt.trials < 1)
        throw ValidationError("lyapunov: word length and trials must be positive");
    std::uint64_t work = static_cast<std::uint64_t>(opt.word_length) * opt.trials;
    if (work > opt.budget) {
        std::ostringstream msg;
        msg << "lyapunov: word_length*trials = " << work << " exceeds budget " << opt.budget;
        throw BudgetError(msg.str());
    }

    int d = spec.dim;
    std::vector<double> cdf(eta.weights.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < eta.weights.size(); ++i) {
        acc += eta.weights[i];
        cdf[i] = acc;
    }
    cdf.back() = 1.0;

    std::vector<double> mean(d, 0.0), m2(d, 0.0);
    std::vector<int> word(opt.word_length);
    std::vector<double> coord(d), log_alpha(d);

    for (int t = 0; t < opt.trials; ++t) {
        Philox rng(opt.seed, static_cast<std::uint64_t>(t) + 1);
        for (int j = 0; j < opt.word_length; ++j)
            word[j] = sample_letter(cdf, rng.next_double());

        if (spec.diagonal) {
            std::fill(coord.begin(), coord.end(), 0.0);
            for (int letter : word)
                for (int l = 0; l < d; ++l)
                    coord[l] += std::log(std::abs(spec.maps[letter].at(l, l)));
            std::sort(coord.begin(), coord.end(), std::greater<double>());
            for (int l = 0; l < d; ++l) log_alpha[l] = coord[l];
        } else {
            word_log_alphas(spec, word, log_alpha);
        }

        for (int l = 0; l < d; ++l) {
            double x = log_alpha[l] / opt.word_length;
            double delta = x - mean[l];
            mean[l] += delta / (t + 1);
            m2[l] += delta * (x - mean[l]);
        }
    }

    LyapunovData out;
    out.exact = false;
    out.entropy = entropy(eta.weights);
    out.lambdas = mean;
    out.stderrs.resize(d);
    for (int l = 0; l < d; ++l)
        out.stderrs[l] =
            opt.trials > 1 ? std::sqrt(m2[l] / (opt.trials - 1) / opt.trials) : 0.0;
    return out;
}

double lyapunov_dimension(const LyapunovData& data) {
    if (data.lambdas.empty()) throw ValidationError("lyapunov_dimension: empty data");
    if (!(data.lambdas.front() < 0.0))
        throw ValidationError("lyapunov_dimension: top exponent must be negative");
    double h = data.entropy;
    if (h <= 0.0) return 0.0;
    int d = static_cast<int>(data.lambdas.size());
    double target = -h;
    double phik = 0.0;
    for (int k = 0; k < d; ++k) {
        double next = phik + data.lambdas[k];
        if (target >= next) // root inside [k, k+1]
            return k + (target - phik) / data.lambdas[k];
        phik = next;
    }
    // h + phi_star(d) > 0: the s >= d branch, slope (sum lambda)/d
    return d * h / (-phik);
}

} // namespace selfaffine
