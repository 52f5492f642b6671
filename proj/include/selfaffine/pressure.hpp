#ifndef SELFAFFINE_PRESSURE_HPP
#define SELFAFFINE_PRESSURE_HPP

#include "selfaffine/ifs.hpp"
#include "selfaffine/lyapunov.hpp"

#include <cstddef>
#include <span>
#include <vector>

namespace selfaffine {

struct SolveOptions {
    double sigma_cap_factor = 4.0; // bracket cap at factor * dim
    double q_guard = 1e-3;         // D is not solved inside (1-guard, 1+guard) \ {1}
    double knot_tol = 1e-9;        // distance to an integer sigma that flags a knot
    double tol_exact = 1e-9;       // |pressure| certificate, exact path
    double tol_finite = 1e-4;      // |pressure| certificate, finite-level path
    std::size_t solve_budget = 200'000;      // words per pressure evaluation when solving
    std::size_t moment_budget = 20'000'000;  // hard per-call word cap
};

// Finite-level pressure estimates P_n = (1/n) log S_n at one (sigma, q).
// Sub-additivity (0<q<1) certifies min P_n as an upper bracket; the mirrored
// super-additivity (q>1) certifies max P_n as a lower bracket. Factorizing
// specs get a zero-width bracket from P_1.
struct PressureProbe {
    double sigma = 0.0;
    double q = 1.0;
    std::vector<std::pair<int, double>> estimates; // (n, P_n)
    double value = 0.0;                            // exact value, or last P_n
    double lower = 0.0, upper = 0.0;               // certified bracket (may be +-inf)
    bool exact = false;
    // variational lower bound h_eta + (G_q)_*(eta) when a measure was supplied
    bool has_variational = false;
    double variational = 0.0;
    bool variational_certified = false;
};

PressureProbe pressure(const IFSSpec& spec, double sigma, double q,
                       std::span<const int> schedule = {},
                       const BernoulliMeasure* eta = nullptr, const SolveOptions& opt = {});

enum class RootMethod { Exact, FiniteLevel };

struct PressureRoot {
    double value = 0.0;  // D(q), or u(q) for solve_u
    double sigma = 0.0;  // root of the pressure in the exponent variable
    double pressure_at_root = 0.0;
    RootMethod method = RootMethod::Exact;
    bool knot = false;      // sigma within knot_tol of an integer branch point
    bool heuristic = false; // q>1 on a non-factorizing spec: assumption (3.2)-style
                            // sub-additivity is not certified, treat as estimate
    int level = 0;          // finite level used (0 on the exact path)
    double drift = 0.0;     // |root(n) - root(n-2)| in D units, finite path only
};

// D(q) = (q-1) sigma*, where sigma* is the pressure root of the weight
// phi^sigma(T_I)^{1-q} p_I^q. D(1) = 0 without solving.
PressureRoot solve_D(const IFSSpec& spec, double q, const SolveOptions& opt = {});

struct TauValue {
    double tau = 0.0;
    bool clamped = false; // D(q)/(q-1) exceeded d
    PressureRoot root;
};

// tau(q) = (q-1) min{ D(q)/(q-1), d }.
TauValue solve_tau(const IFSSpec& spec, double q, const SolveOptions& opt = {});

// u(q) for q > 2: root in s of the pressure of phi^{s(q-1)}(T_I)^{-1} p_I^q.
PressureRoot solve_u(const IFSSpec& spec, double q, const SolveOptions& opt = {});

// Bernoulli equilibrium weights w_i = phi^{sigma*}(T_i)^{1-q} p_i^q of the
// additive potential at the solved root. Requires strictly decreasing
// positive diagonal entries. Returned unnormalized: summing to 1 within
// solver tolerance is part of the contract.
std::vector<double> equilibrium_weights(const IFSSpec& spec, double q,
                                        const SolveOptions& opt = {});

struct VariationalBound {
    double value = 0.0;
    bool certified = false; // exact phi^s_* (diagonal or similitude spec)
};

// h_eta + (1-q) phi^sigma_*(eta) + q sum eta_i log p_i for a Bernoulli eta.
VariationalBound variational_lower_bound(const IFSSpec& spec, double sigma, double q,
                                         const BernoulliMeasure& eta, int level = 8,
                                         const SolveOptions& opt = {});

} // namespace selfaffine

#endif
