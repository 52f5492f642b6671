#ifndef SELFAFFINE_SPECTRUM_HPP
#define SELFAFFINE_SPECTRUM_HPP

#include "selfaffine/ifs.hpp"
#include "selfaffine/pressure.hpp"

#include <span>
#include <string>
#include <vector>

namespace selfaffine {

enum class PointMethod {
    ExactRoot,         // factorized pressure, certified root
    FiniteLevel,       // finite-level estimate
    Definition,        // q = 1, no solve
    GuardInterpolated, // inside the q-guard band, linear through (1, 0)
};

const char* to_string(PointMethod m);

struct SpectrumPoint {
    double q = 0.0;
    double D = 0.0;
    double tau = 0.0;
    double sigma = 0.0; // D/(q-1); 0 at q = 1 by convention
    double d_prime = 0.0;
    double d_prime_left = 0.0, d_prime_right = 0.0;
    PointMethod method = PointMethod::Definition;
    bool clamped = false;
    bool knot = false;
    bool heuristic = false;
    double drift = 0.0; // finite-level root drift, 0 on exact paths
};

struct SpectrumTable {
    int dim = 0;
    std::vector<SpectrumPoint> points; // ascending q
};

struct SpectrumOptions {
    SolveOptions solve;
    double fd_step = 1e-4;
    bool derivatives = true;
};

// Solves D, tau and derivative estimates over a q grid. Grid points falling
// inside the guard band around q = 1 are interpolated through (1, 0) and
// flagged as such.
SpectrumTable solve_spectrum(const IFSSpec& spec, std::span<const double> q_grid,
                             const SpectrumOptions& opt = {});

enum class DerivativeMode { Formula, FiniteDifference };

struct DerivativeResult {
    double value = 0.0;
    double left = 0.0, right = 0.0; // one-sided estimates (equal in formula mode)
    bool at_knot = false;
    double alpha_q_minus_D = 0.0; // diagnostic: alpha q - D(q)
    double residual = 0.0;        // -D(q) lambda_{k+1} + qA + B (formula mode)
    DerivativeMode mode = DerivativeMode::FiniteDifference;
};

// Formula mode evaluates the equilibrium-weight derivative expression
// (requires strictly-decreasing diagonal parts and a root strictly between
// integer branch points); finite-difference mode differentiates solve_D.
DerivativeResult D_prime(const IFSSpec& spec, double q, DerivativeMode mode,
                         double h = 1e-4, const SolveOptions& opt = {});

struct LegendrePoint {
    double alpha = 0.0;
    double f = 0.0;
    double q_at_min = 0.0;
    bool boundary = false;        // infimum attained at the grid edge: unreliable
    bool empty_level_set = false; // f < 0: the level set is predicted empty
};

// Discrete Legendre transform f(alpha) = inf_q (alpha q - tau(q)) over the
// solved grid only.
std::vector<LegendrePoint> legendre_spectrum(const SpectrumTable& table,
                                             std::span<const double> alpha_grid);

struct AuditInterval {
    int k = 0; // D(q)/(q-1) in (k, k+1); k = dim means beyond d
    bool above_one = false;
    double q_lo = 0.0, q_hi = 0.0;
    int points = 0;
    double worst_second_difference = 0.0; // max slope increase (should be <= tol)
};

struct AuditBoundary {
    double q = 0.0;
    int k_left = 0, k_right = 0;
    bool above_one = false;
    double slope_jump = 0.0; // right slope minus left slope across the boundary
};

struct AuditReport {
    int dim = 0;
    std::vector<AuditInterval> intervals;
    std::vector<AuditBoundary> boundaries;
    double tau_worst_second_difference = 0.0; // on (1, inf)
    double sigma_worst_increase = 0.0;        // D/(q-1) must not increase on (1, inf)
    std::vector<std::string> notices;

    // Boundary slope-jump signs are enforced only between branches strictly
    // below d; crossings into the beyond-d branch are reported but carry no
    // sign guarantee for D (tau stays concave there through the clamp).
    bool pass(double tol) const;
};

// Shape checks over a solved table: concavity of D inside each branch
// interval, concavity of tau above 1, monotone D/(q-1) above 1, and the
// signs of slope jumps at branch boundaries.
AuditReport concavity_audit(const SpectrumTable& table, double tol = 1e-10);

struct ClauseReport {
    int clause = 0;             // 1 = small-q clause, 2 = diagonal (1,2) clause,
                                // 3 = the q >= 2 extension, 0 = none applies
    int k = -1;                 // branch index for clause 2
    bool lower_level_set = false;
    double D = 0.0, tau = 0.0, sigma = 0.0;
    double alpha_left = 0.0, alpha_right = 0.0;
    bool applies_left = false, applies_right = false;
    double predicted_dim_left = 0.0, predicted_dim_right = 0.0;
};

// Evaluates which level-set dimension clause applies at q and the predicted
// dim_H = alpha q - tau(q).
ClauseReport level_set_clauses(const IFSSpec& spec, double q, const SolveOptions& opt = {});

} // namespace selfaffine

#endif
