#ifndef SELFAFFINE_WORDS_HPP
#define SELFAFFINE_WORDS_HPP

#include "selfaffine/affine.hpp"
#include "selfaffine/errors.hpp"
#include "selfaffine/ifs.hpp"
#include "selfaffine/logsum.hpp"

#include <cmath>
#include <cstddef>
#include <span>
#include <sstream>
#include <vector>

namespace selfaffine {

inline constexpr std::size_t kDefaultWordBudget = 20'000'000;

// A word over {1..m} (stored zero-based) together with its cylinder
// probability and the singular profile of the matrix product T_I.
struct WordWeight {
    std::vector<int> word;
    double log_p = 0.0;
    SingularProfile profile;
};

// m^n, or a BudgetError naming the budget.
std::size_t checked_word_count(int m, int n, std::size_t budget);

// Depth-first visit of all m^n length-n words. The product matrix grows one
// letter at a time (memory O(n), not O(m^n)); the profile buffer is reused
// across calls, so visitors must copy what they keep.
//   visit(std::span<const int> word, double log_p, const SingularProfile&)
template <class Visitor>
void enumerate_words(const IFSSpec& spec, int n, Visitor&& visit,
                     std::size_t budget = kDefaultWordBudget) {
    if (n < 1) throw ValidationError("enumerate_words: level must be >= 1");
    const int m = spec.map_count();
    checked_word_count(m, n, budget);

    std::vector<double> log_p(m);
    for (int i = 0; i < m; ++i) log_p[i] = std::log(spec.probabilities[i]);

    std::vector<LinearMap> prod(static_cast<std::size_t>(n) + 1);
    prod[0] = LinearMap::identity(spec.dim);
    std::vector<double> lp(static_cast<std::size_t>(n) + 1, 0.0);
    std::vector<int> letters(n, -1);
    SingularProfile scratch;

    int pos = 0;
    while (pos >= 0) {
        if (++letters[pos] == m) {
            letters[pos] = -1;
            --pos;
            continue;
        }
        prod[pos + 1] = prod[pos] * spec.maps[letters[pos]];
        lp[pos + 1] = lp[pos] + log_p[letters[pos]];
        if (pos + 1 == n) {
            singular_values_into(prod[n], scratch);
            visit(std::span<const int>(letters.data(), static_cast<std::size_t>(n)), lp[n],
                  scratch);
        } else {
            ++pos;
        }
    }
}

// log S_1(sigma, q) = log sum_i phi^sigma(T_i)^{1-q} p_i^q.
double log_letter_moment(const IFSSpec& spec, double sigma, double q);

// log S_n(sigma, q), S_n = sum_{I in Sigma_n} phi^sigma(T_I)^{1-q} p_I^q.
// Exact via S_n = S_1^n when the spec factorizes (aligned diagonal or
// similitude maps); otherwise a log-sum-exp over the word stream.
double log_moment_sum(const IFSSpec& spec, int n, double sigma, double q,
                      std::size_t budget = kDefaultWordBudget);

} // namespace selfaffine

#endif
