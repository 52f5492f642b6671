#ifndef SELFAFFINE_CLOSED_FORMS_HPP
#define SELFAFFINE_CLOSED_FORMS_HPP

#include "selfaffine/ifs.hpp"
#include "selfaffine/pressure.hpp"

#include <functional>
#include <span>
#include <vector>

namespace selfaffine {

// Closed form for systems where every map is the same diagonal contraction
// with strictly decreasing ratios t_1 > ... > t_d. The active branch is
// selected by comparing A(q) = (sum p_i^q)^{1/(q-1)} against the partial
// products t_1...t_k.
struct EqualMapsValue {
    double tau = 0.0;
    double D = 0.0;
    double A = 0.0;
    int regime = 0; // 0: A >= t_1; k: t_1..t_{k+1} <= A < t_1..t_k; d: A below all
};

EqualMapsValue equal_maps_closed_form(std::span<const double> t, std::span<const double> p,
                                      double q);
EqualMapsValue equal_maps_closed_form(const IFSSpec& spec, double q);

// tau'(q+) - tau'(q-) at the branch crossing A(q) = t_1...t_k inside (0, 1),
// located by root-finding. Positive for non-uniform p; zero when p is
// uniform (and the crossing is degenerate).
struct SlopeJump {
    double q_cross = 0.0;
    double jump = 0.0;
    int k = 0;
};

SlopeJump slope_jump_at_crossing(std::span<const double> t, std::span<const double> p, int k);

// Planar ROSC closed form: combines the one-dimensional spectrum of the
// first-coordinate system with the column weight term,
//   tau(q) = tau_nu(q) (1 - log t1 / log t2) + log sum p_i^q / log t2.
// When tau_nu is not supplied, the almost-sure one-dimensional formula is
// substituted.
double rosc_planar_tau(double t1, double t2, std::span<const double> p, double q);
double rosc_planar_tau(double t1, double t2, std::span<const double> p, double q,
                       const std::function<double(double)>& tau_nu);

// D(q) for similitude systems: the root t of sum_i p_i^q |T_i|^{-t} = 1
// (safeguarded Newton), and its exact implicit derivative.
double similitude_D(const IFSSpec& spec, double q);
double similitude_D_prime(const IFSSpec& spec, double q);

struct TauBranch {
    double q_lo = 0.0, q_hi = 0.0;
    int kind = 0;       // 0: d(q-1), 1: slope*q - d, 2: D(q)
    double slope = 0.0; // kind 1 only
};

struct RegimeReport {
    int clause = 0;             // 2: D'(1) >= d, 3: D'(1) < d
    bool lebesgue_like = false; // clause 2 with inf D(q)/(q-1) >= d on (1, 2]
    double D_prime_1 = 0.0;
    double s_inf = 0.0;                      // inf of D(q)/(q-1) over (1, 2]
    double q_min = 0.0, q_max = 0.0, q_tilde_min = 0.0; // NaN where not applicable
    std::vector<TauBranch> branches;         // piecewise tau over [0, q_max]
    double interval_lo = 2.0, interval_hi = 0.0; // validity interval for the
    bool interval_nonempty = false;              // extension beyond q = 2
    double alpha_lo = 0.0, alpha_hi = 0.0;       // formalism range endpoints
};

// Classifies a similitude system (norms < 1/2) into the almost-sure spectrum
// regimes, solves the thresholds, and emits the piecewise curve.
RegimeReport regime_report(const IFSSpec& spec, const SolveOptions& opt = {});

// Evaluates the piecewise tau emitted by regime_report.
double regime_tau(const RegimeReport& rep, const IFSSpec& spec, double q);

} // namespace selfaffine

#endif
