#include "selfaffine/sampling.hpp"

#include "selfaffine/errors.hpp"
#include "selfaffine/rng.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace selfaffine {

std::vector<std::vector<double>> random_translations(int m, int d, double rho,
                                                     std::uint64_t seed) {
    if (m < 1 || d < 1) throw ValidationError("random_translations: m and d must be >= 1");
    if (rho < 0.0) throw ValidationError("random_translations: rho must be >= 0");

    Philox rng(seed, 0x7261646975730000ull); // fixed stream for translation draws
    int n = m * d;
    std::vector<double> g(n);
    double norm2 = 0.0;
    for (int i = 0; i < n; ++i) {
        g[i] = rng.next_gaussian();
        norm2 += g[i] * g[i];
    }
    double radius = rho * std::pow(rng.next_double(), 1.0 / n);
    double scale = norm2 > 0.0 ? radius / std::sqrt(norm2) : 0.0;

    std::vector<std::vector<double>> out(m, std::vector<double>(d));
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < d; ++j) out[i][j] = g[i * d + j] * scale;
    return out;
}

SampledMeasure chaos_game(const IFSSpec& spec, const ChaosGameOptions& opt) {
    if (!spec.has_translations())
        throw ValidationError("chaos_game: spec carries no translations");
    if (opt.count + opt.burn_in > opt.budget) {
        std::ostringstream msg;
        msg << "chaos_game: count + burn_in = " << (opt.count + opt.burn_in)
            << " exceeds budget " << opt.budget;
        throw BudgetError(msg.str());
    }

    SampledMeasure out;
    out.dim = spec.dim;
    out.count = opt.count;
    out.seed = opt.seed;
    out.burn_in = opt.burn_in;
    out.bounding_radius = spec.bounding_radius();
    out.spec = spec;
    out.points.resize(opt.count * static_cast<std::size_t>(spec.dim));
    out.last_map.resize(opt.count);

    std::vector<double> cdf(spec.map_count());
    double acc = 0.0;
    for (int i = 0; i < spec.map_count(); ++i) {
        acc += spec.probabilities[i];
        cdf[i] = acc;
    }
    cdf.back() = 1.0;

    Philox rng(opt.seed, 0x6f72626974ull); // orbit stream
    std::vector<double> z(spec.dim, 0.0), next(spec.dim);
    auto step = [&]() {
        double u = rng.next_double();
        int lo = 0, hi = spec.map_count() - 1;
        while (lo < hi) {
            int mid = (lo + hi) / 2;
            if (u < cdf[mid]) hi = mid; else lo = mid + 1;
        }
        spec.maps[lo].apply(z, next);
        for (int j = 0; j < spec.dim; ++j) z[j] = next[j] + spec.translations[lo][j];
        return lo;
    };

    for (std::size_t k = 0; k < opt.burn_in; ++k) step();
    for (std::size_t k = 0; k < opt.count; ++k) {
        int i = step();
        out.last_map[k] = static_cast<std::uint8_t>(i);
        for (int j = 0; j < spec.dim; ++j) out.points[k * spec.dim + j] = z[j];
    }
    return out;
}

BatchStat orbit_stat(const SampledMeasure& sample,
                     const std::function<double(const double*)>& f, int batches) {
    if (sample.count == 0) throw ValidationError("orbit_stat: empty sample");
    batches = std::min<int>(batches, static_cast<int>(sample.count));
    std::size_t per = sample.count / batches;

    double total = 0.0;
    std::vector<double> batch_mean(batches, 0.0);
    for (int b = 0; b < batches; ++b) {
        double s = 0.0;
        for (std::size_t k = b * per; k < (b + 1) * per; ++k) s += f(sample.point(k));
        batch_mean[b] = s / per;
        total += s;
    }
    BatchStat st;
    st.used = static_cast<std::size_t>(batches) * per;
    st.mean = total / st.used;
    if (batches < 2) return st; // no spread estimate from one batch
    double var = 0.0;
    for (double v : batch_mean) var += (v - st.mean) * (v - st.mean);
    var /= (batches - 1);
    st.se = std::sqrt(var / batches);
    return st;
}

std::vector<std::vector<int>> random_words(const IFSSpec& spec, int count, int max_length,
                                           std::uint64_t seed) {
    if (max_length < 1) throw ValidationError("random_words: max_length must be >= 1");
    Philox rng(seed, 0x776f726473ull);
    std::vector<double> cdf(spec.map_count());
    double acc = 0.0;
    for (int i = 0; i < spec.map_count(); ++i) {
        acc += spec.probabilities[i];
        cdf[i] = acc;
    }
    cdf.back() = 1.0;
    auto letter = [&]() {
        double u = rng.next_double();
        int lo = 0, hi = spec.map_count() - 1;
        while (lo < hi) {
            int mid = (lo + hi) / 2;
            if (u < cdf[mid]) hi = mid; else lo = mid + 1;
        }
        return lo;
    };
    std::vector<std::vector<int>> words(count);
    for (auto& w : words) {
        int len = 1 + static_cast<int>(rng.next_below(static_cast<std::uint32_t>(max_length)));
        w.resize(len);
        for (int& c : w) c = letter();
    }
    return words;
}

namespace {

// z -> S_I(z) in word order (S_{i_1} applied last)
void apply_word(const IFSSpec& spec, std::span<const int> word, std::vector<double>& z,
                std::vector<double>& scratch) {
    for (auto it = word.rbegin(); it != word.rend(); ++it) {
        spec.maps[*it].apply(z, scratch);
        for (int j = 0; j < spec.dim; ++j) z[j] = scratch[j] + spec.translations[*it][j];
    }
}

} // namespace

std::vector<InequalityCheck> check_measure_inequalities(const SampledMeasure& sample,
                                                        std::span<const std::vector<int>> words,
                                                        std::uint64_t seed) {
    if (sample.count < 10'000)
        throw ValidationError("measure inequalities: need at least 10^4 sample points");
    const IFSSpec& spec = sample.spec;
    const int d = sample.dim;
    const double R = sample.bounding_radius;
    Philox rng(seed, 0x696e6571ull);

    std::vector<InequalityCheck> out;
    out.reserve(words.size() * 2);

    std::vector<double> z(d), scratch(d);
    for (const auto& word : words) {
        double log_p = 0.0;
        for (int c : word) log_p += std::log(spec.probabilities[c]);
        double p_word = std::exp(log_p);

        // push-forward inequality on a random box:
        // mu(A) >= p_I mu(S_I^{-1} A)
        Box box;
        box.lo.resize(d);
        box.hi.resize(d);
        for (int j = 0; j < d; ++j) {
            double c = (2.0 * rng.next_double() - 1.0) * R;
            double h = (0.05 + 0.45 * rng.next_double()) * R;
            box.lo[j] = c - h;
            box.hi[j] = c + h;
        }
        InequalityCheck chk;
        chk.kind = "pushforward-box";
        chk.word = word;
        chk.log_p_word = log_p;
        std::size_t hits_a = 0, hits_pre = 0;
        {
            auto g = [&](const double* x) {
                bool in_a = box.contains(x, d);
                std::copy(x, x + d, z.begin());
                apply_word(spec, word, z, scratch);
                bool in_pre = box.contains(z.data(), d);
                if (in_a) ++hits_a;
                if (in_pre) ++hits_pre;
                return (in_a ? 1.0 : 0.0) - p_word * (in_pre ? 1.0 : 0.0);
            };
            BatchStat st = orbit_stat(sample, g);
            chk.sigma = st.se;
            chk.lhs = static_cast<double>(hits_a) / st.used;
            chk.rhs = p_word * static_cast<double>(hits_pre) / st.used;
            if (hits_a + hits_pre < 50)
                chk.status = CheckStatus::Inconclusive;
            else
                chk.status = st.mean >= -3.0 * st.se ? CheckStatus::Pass
                                                     : CheckStatus::Violation;
        }
        out.push_back(chk);

        // ball mass at a coded point: mu(B(pi(x), 2R |T_{x|n}|)) >= p_{x|n}
        InequalityCheck ball;
        ball.kind = "cylinder-ball";
        ball.word = word;
        ball.log_p_word = log_p;
        {
            // approximate pi(x) for a tail extending the word
            std::vector<int> extended = word;
            for (int k = 0; k < 60; ++k)
                extended.push_back(static_cast<int>(rng.next_below(static_cast<std::uint32_t>(spec.map_count()))));
            std::fill(z.begin(), z.end(), 0.0);
            apply_word(spec, extended, z, scratch);
            std::vector<double> center = z;

            double norm = singular_values(word_matrix(spec.maps, word)).norm();
            double radius = 2.0 * R * norm;
            auto g = [&](const double* x) {
                double s = 0.0;
                for (int j = 0; j < d; ++j) s += (x[j] - center[j]) * (x[j] - center[j]);
                return s <= radius * radius ? 1.0 : 0.0;
            };
            BatchStat st = orbit_stat(sample, g);
            ball.lhs = st.mean;
            ball.rhs = p_word;
            ball.sigma = st.se;
            if (st.mean * static_cast<double>(sample.count) < 25.0)
                ball.status = CheckStatus::Inconclusive;
            else
                ball.status = st.mean >= p_word - 3.0 * st.se ? CheckStatus::Pass
                                                              : CheckStatus::Violation;
        }
        out.push_back(ball);
    }
    return out;
}

IFSSpec make_rosc_spec(int m, double t1, double t2, std::vector<double> probabilities) {
    if (m < 2) throw ValidationError("rosc spec: need at least two maps");
    if (!(t2 > 0.0) || !(t1 > t2) || !(t1 < 0.5))
        throw ValidationError("rosc spec: need 1/2 > t1 > t2 > 0");
    if (m * t1 > 1.0)
        throw ValidationError("rosc spec: m copies of width t1 do not fit in the unit square");

    std::vector<LinearMap> maps(m, LinearMap::diagonal(std::vector<double>{t1, t2}));
    std::vector<std::vector<double>> translations(m, std::vector<double>(2, 0.0));
    for (int i = 0; i < m; ++i) {
        translations[i][0] = i * (1.0 - t1) / (m - 1);
        translations[i][1] = i * (1.0 - t2) / (m - 1);
    }
    return make_ifs(2, std::move(maps), std::move(translations), std::move(probabilities));
}

} // namespace selfaffine
