#include "selfaffine/pressure.hpp"

#include "selfaffine/errors.hpp"
#include "selfaffine/logsum.hpp"
#include "selfaffine/words.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <sstream>

namespace selfaffine {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// log sum_i exp(phi_power * log phi^[exponent](T_i) + q log p_i)
double letter_pressure(const IFSSpec& spec, double exponent, double phi_power, double q) {
    LogSumExp acc;
    for (int i = 0; i < spec.map_count(); ++i)
        acc.add(phi_power * spec.profiles[i].log_phi(exponent) +
                q * std::log(spec.probabilities[i]));
    return acc.value();
}

double level_pressure(const IFSSpec& spec, int n, double exponent, double phi_power, double q,
                      std::size_t budget) {
    if (spec.exact_pressure) return letter_pressure(spec, exponent, phi_power, q);
    LogSumExp acc;
    enumerate_words(
        spec, n,
        [&](std::span<const int>, double log_p, const SingularProfile& profile) {
            acc.add(phi_power * profile.log_phi(exponent) + q * log_p);
        },
        budget);
    return acc.value() / n;
}

// Largest level n with m^n within the budget.
int pick_level(int m, std::size_t budget) {
    int n = 0;
    std::size_t count = 1;
    while (count <= budget / static_cast<std::size_t>(m)) {
        count *= static_cast<std::size_t>(m);
        ++n;
    }
    return std::max(n, 1);
}

// Monotone bisection for the root of P(param) = 0 on param >= 0, with the
// bracket grown geometrically from param = 1. sign_at_zero fixes which side
// of zero P starts on.
double bisect_root(const std::function<double(double)>& P, double p0, double cap,
                   double width_tol, int max_iter) {
    if (p0 == 0.0) return 0.0;
    double lo = 0.0, hi = 1.0;
    double p_hi = P(hi);
    while (p_hi * p0 > 0.0) {
        lo = hi;
        hi *= 2.0;
        if (hi > cap) {
            std::ostringstream msg;
            msg << "pressure root: no sign change for exponent <= cap " << cap;
            throw ConvergenceError(msg.str());
        }
        p_hi = P(hi);
    }
    if (p_hi == 0.0) return hi;
    for (int it = 0; it < max_iter && (hi - lo) > width_tol; ++it) {
        double mid = 0.5 * (lo + hi);
        double pm = P(mid);
        if (pm == 0.0) return mid;
        if (pm * p0 > 0.0) lo = mid; else hi = mid;
    }
    return 0.5 * (lo + hi);
}

struct RootSetup {
    std::function<double(double)> P;
    bool exact;
    int level;      // level used when not exact
    int alt_level;  // level for the drift re-solve (0 = skip)
};

RootSetup make_pressure_fn(const IFSSpec& spec, double phi_power_of_param_q, double q,
                           const std::function<double(double)>& exponent_of_param,
                           const SolveOptions& opt) {
    RootSetup s;
    s.exact = spec.exact_pressure;
    if (s.exact) {
        s.level = 0;
        s.alt_level = 0;
        s.P = [&spec, phi_power_of_param_q, q, exponent_of_param](double param) {
            return letter_pressure(spec, exponent_of_param(param), phi_power_of_param_q, q);
        };
    } else {
        s.level = pick_level(spec.map_count(), opt.solve_budget);
        s.alt_level = s.level > 2 ? s.level - 2 : 0;
        int n = s.level;
        std::size_t budget = opt.moment_budget;
        s.P = [&spec, phi_power_of_param_q, q, exponent_of_param, n, budget](double param) {
            return level_pressure(spec, n, exponent_of_param(param), phi_power_of_param_q, q,
                                  budget);
        };
    }
    return s;
}

} // namespace

PressureProbe pressure(const IFSSpec& spec, double sigma, double q,
                       std::span<const int> schedule, const BernoulliMeasure* eta,
                       const SolveOptions& opt) {
    if (sigma < 0.0) throw ValidationError("pressure: sigma must be >= 0");

    PressureProbe probe;
    probe.sigma = sigma;
    probe.q = q;
    probe.exact = spec.exact_pressure;

    if (probe.exact) {
        probe.value = letter_pressure(spec, sigma, 1.0 - q, q);
        probe.lower = probe.upper = probe.value;
        for (int n : schedule) probe.estimates.emplace_back(n, probe.value);
    } else {
        if (schedule.empty())
            throw ValidationError("pressure: a non-empty level schedule is required");
        double best_min = kInf, best_max = -kInf;
        for (int n : schedule) {
            double pn = level_pressure(spec, n, sigma, 1.0 - q, q, opt.moment_budget);
            probe.estimates.emplace_back(n, pn);
            best_min = std::min(best_min, pn);
            best_max = std::max(best_max, pn);
        }
        probe.value = probe.estimates.back().second;
        if (q < 1.0) { // sub-additive log-moments: limit = inf_n P_n
            probe.upper = best_min;
            probe.lower = -kInf;
        } else if (q > 1.0) { // super-additive: limit = sup_n P_n
            probe.lower = best_max;
            probe.upper = kInf;
        } else {
            probe.value = probe.lower = probe.upper = 0.0;
        }
    }

    if (eta != nullptr) {
        VariationalBound vb = variational_lower_bound(spec, sigma, q, *eta, 8, opt);
        probe.has_variational = true;
        probe.variational = vb.value;
        probe.variational_certified = vb.certified;
        if (vb.certified) probe.lower = std::max(probe.lower, vb.value);
    }
    return probe;
}

PressureRoot solve_D(const IFSSpec& spec, double q, const SolveOptions& opt) {
    if (!(q > 0.0)) throw ValidationError("solve_D: q must be > 0");

    PressureRoot root;
    if (q == 1.0) {
        root.method = RootMethod::Exact;
        return root; // D(1) = 0 by definition
    }
    if (std::abs(q - 1.0) < opt.q_guard) {
        std::ostringstream msg;
        msg << "solve_D: q = " << q << " lies inside the guard band (1 +- " << opt.q_guard
            << "); use D(1) = 0 and interpolate";
        throw ValidationError(msg.str());
    }

    auto ident = [](double s) { return s; };
    RootSetup setup = make_pressure_fn(spec, 1.0 - q, q, ident, opt);

    double p0 = setup.P(0.0); // log sum p_i^q: > 0 for q < 1, < 0 for q > 1
    double cap = opt.sigma_cap_factor * spec.dim;
    double width = setup.exact ? 1e-13 : 1e-7;
    double sigma = bisect_root(setup.P, p0, cap, width, 200);

    root.sigma = sigma;
    root.value = (q - 1.0) * sigma;
    root.pressure_at_root = setup.P(sigma);
    root.method = setup.exact ? RootMethod::Exact : RootMethod::FiniteLevel;
    root.level = setup.level;
    root.heuristic = (q > 1.0) && !setup.exact;
    double nearest = std::round(sigma);
    root.knot = nearest >= 1.0 && nearest <= spec.dim &&
                std::abs(sigma - nearest) <= opt.knot_tol * std::max(1.0, sigma);

    if (!setup.exact && setup.alt_level > 0) {
        int n2 = setup.alt_level;
        auto P2 = [&](double s) {
            return level_pressure(spec, n2, s, 1.0 - q, q, opt.moment_budget);
        };
        double sigma2 = bisect_root(P2, P2(0.0), cap, width, 200);
        root.drift = std::abs(q - 1.0) * std::abs(sigma - sigma2);
    }
    return root;
}

TauValue solve_tau(const IFSSpec& spec, double q, const SolveOptions& opt) {
    if (!(q > 0.0)) throw ValidationError("solve_tau: q must be > 0");
    TauValue out;
    if (q == 1.0) return out;
    out.root = solve_D(spec, q, opt);
    double sigma = out.root.sigma;
    if (sigma > spec.dim) {
        out.clamped = true;
        out.tau = (q - 1.0) * spec.dim;
    } else {
        out.tau = out.root.value;
    }
    return out;
}

PressureRoot solve_u(const IFSSpec& spec, double q, const SolveOptions& opt) {
    if (!(q > 2.0)) throw ValidationError("solve_u: q must be > 2");

    auto exponent = [q](double s) { return s * (q - 1.0); };
    RootSetup setup = make_pressure_fn(spec, -1.0, q, exponent, opt);

    double p0 = setup.P(0.0); // log sum p_i^q < 0 for q > 1
    double cap = opt.sigma_cap_factor * spec.dim;
    double width = setup.exact ? 1e-13 : 1e-7;
    double s = bisect_root(setup.P, p0, cap, width, 200);

    PressureRoot root;
    root.sigma = s;
    root.value = s; // u(q) itself
    root.pressure_at_root = setup.P(s);
    root.method = setup.exact ? RootMethod::Exact : RootMethod::FiniteLevel;
    root.level = setup.level;
    root.heuristic = !setup.exact;
    double se = s * (q - 1.0);
    double nearest = std::round(se);
    root.knot = nearest >= 1.0 && nearest <= spec.dim &&
                std::abs(se - nearest) <= opt.knot_tol * std::max(1.0, se);

    if (!setup.exact && setup.alt_level > 0) {
        int n2 = setup.alt_level;
        auto P2 = [&](double v) {
            return level_pressure(spec, n2, exponent(v), -1.0, q, opt.moment_budget);
        };
        double s2 = bisect_root(P2, P2(0.0), cap, width, 200);
        root.drift = std::abs(s - s2);
    }
    return root;
}

std::vector<double> equilibrium_weights(const IFSSpec& spec, double q, const SolveOptions& opt) {
    if (!spec.diagonal_ordered)
        throw ValidationError(
            "equilibrium_weights: requires diagonal linear parts with strictly decreasing "
            "positive entries");
    if (!(q > 0.0) || q == 1.0)
        throw ValidationError("equilibrium_weights: q must be positive and != 1");

    PressureRoot root = solve_D(spec, q, opt);
    std::vector<double> w(spec.map_count());
    for (int i = 0; i < spec.map_count(); ++i)
        w[i] = std::exp((1.0 - q) * spec.profiles[i].log_phi(root.sigma) +
                        q * std::log(spec.probabilities[i]));
    return w;
}

VariationalBound variational_lower_bound(const IFSSpec& spec, double sigma, double q,
                                         const BernoulliMeasure& eta, int level,
                                         const SolveOptions& opt) {
    if (sigma < 0.0) throw ValidationError("variational bound: sigma must be >= 0");
    if (static_cast<int>(eta.weights.size()) != spec.map_count())
        throw ValidationError("variational bound: measure size does not match map count");

    double f_int = 0.0; // integral of f(x) = log p_{x_1}
    for (int i = 0; i < spec.map_count(); ++i)
        f_int += eta.weights[i] * std::log(spec.probabilities[i]);

    VariationalBound out;
    double phi_star;
    if (spec.diagonal) {
        LyapunovData data = lyapunov_exponents_exact(spec, eta);
        phi_star = data.phi_star(sigma);
        out.certified = true;
    } else if (spec.similitude) {
        double rate = 0.0;
        for (int i = 0; i < spec.map_count(); ++i)
            rate += eta.weights[i] * std::log(spec.profiles[i].norm());
        phi_star = sigma * rate;
        out.certified = true;
    } else {
        // finite-level average of log phi^sigma under eta; an upper estimate
        // of phi^sigma_*, so the bound is reported uncertified
        std::vector<double> log_eta(spec.map_count());
        for (int i = 0; i < spec.map_count(); ++i) log_eta[i] = std::log(eta.weights[i]);
        double total = 0.0;
        enumerate_words(
            spec, level,
            [&](std::span<const int> word, double, const SingularProfile& profile) {
                double le = 0.0;
                for (int letter : word) le += log_eta[letter];
                total += std::exp(le) * profile.log_phi(sigma);
            },
            opt.moment_budget);
        phi_star = total / level;
        out.certified = false;
    }
    out.value = entropy(eta.weights) + (1.0 - q) * phi_star + q * f_int;
    return out;
}

} // namespace selfaffine
