#include "selfaffine/words.hpp"

namespace selfaffine {

std::size_t checked_word_count(int m, int n, std::size_t budget) {
    std::size_t count = 1;
    for (int i = 0; i < n; ++i) {
        if (count > budget / static_cast<std::size_t>(m)) {
            std::ostringstream msg;
            msg << "word budget exceeded: " << m << "^" << n << " words > budget " << budget;
            throw BudgetError(msg.str());
        }
        count *= static_cast<std::size_t>(m);
    }
    return count;
}

double log_letter_moment(const IFSSpec& spec, double sigma, double q) {
    if (sigma < 0.0) throw ValidationError("moment_sum: sigma must be >= 0");
    LogSumExp acc;
    for (int i = 0; i < spec.map_count(); ++i)
        acc.add((1.0 - q) * spec.profiles[i].log_phi(sigma) +
                q * std::log(spec.probabilities[i]));
    return acc.value();
}

double log_moment_sum(const IFSSpec& spec, int n, double sigma, double q, std::size_t budget) {
    if (sigma < 0.0) throw ValidationError("moment_sum: sigma must be >= 0");
    if (n < 1) throw ValidationError("moment_sum: level must be >= 1");
    if (spec.exact_pressure) return n * log_letter_moment(spec, sigma, q);

    LogSumExp acc;
    enumerate_words(
        spec, n,
        [&](std::span<const int>, double log_p, const SingularProfile& profile) {
            acc.add((1.0 - q) * profile.log_phi(sigma) + q * log_p);
        },
        budget);
    return acc.value();
}

} // namespace selfaffine
