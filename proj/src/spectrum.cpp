#include "selfaffine/spectrum.hpp"

#include "selfaffine/errors.hpp"
#include "selfaffine/lyapunov.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace selfaffine {

namespace {
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
}

const char* to_string(PointMethod m) {
    switch (m) {
        case PointMethod::ExactRoot: return "exact-root";
        case PointMethod::FiniteLevel: return "finite-level";
        case PointMethod::Definition: return "definition";
        case PointMethod::GuardInterpolated: return "guard-interpolated";
    }
    return "unknown";
}

SpectrumTable solve_spectrum(const IFSSpec& spec, std::span<const double> q_grid,
                             const SpectrumOptions& opt) {
    if (q_grid.empty()) throw ValidationError("solve_spectrum: empty q grid");
    for (std::size_t i = 1; i < q_grid.size(); ++i)
        if (!(q_grid[i] > q_grid[i - 1]))
            throw ValidationError("solve_spectrum: q grid must be strictly increasing");

    SpectrumTable table;
    table.dim = spec.dim;
    double guard = opt.solve.q_guard;
    double guard_edge = guard * (1.0 + 1e-9); // strictly outside the band

    // anchor roots just outside the guard band for interpolation through (1,0)
    double sigma_left = kNaN, sigma_right = kNaN;
    auto anchor = [&](double side) {
        auto root = solve_D(spec, side, opt.solve);
        return root.sigma;
    };

    for (double q : q_grid) {
        SpectrumPoint pt;
        pt.q = q;
        if (q == 1.0) {
            pt.method = PointMethod::Definition;
        } else if (std::abs(q - 1.0) < guard) {
            // sigma = D/(q-1) extends continuously through q = 1; interpolate it
            double sigma;
            if (q < 1.0) {
                if (std::isnan(sigma_left)) sigma_left = anchor(1.0 - guard_edge);
                sigma = sigma_left;
            } else {
                if (std::isnan(sigma_right)) sigma_right = anchor(1.0 + guard_edge);
                sigma = sigma_right;
            }
            pt.sigma = sigma;
            pt.D = (q - 1.0) * sigma;
            pt.tau = (q - 1.0) * std::min(sigma, static_cast<double>(spec.dim));
            pt.clamped = sigma > spec.dim;
            pt.method = PointMethod::GuardInterpolated;
        } else {
            TauValue tv = solve_tau(spec, q, opt.solve);
            pt.D = tv.root.value;
            pt.tau = tv.tau;
            pt.sigma = tv.root.sigma;
            pt.clamped = tv.clamped;
            pt.knot = tv.root.knot;
            pt.heuristic = tv.root.heuristic;
            pt.drift = tv.root.drift;
            pt.method = tv.root.method == RootMethod::Exact ? PointMethod::ExactRoot
                                                            : PointMethod::FiniteLevel;
        }
        table.points.push_back(pt);
    }

    if (opt.derivatives) {
        for (auto& pt : table.points) {
            if (pt.method == PointMethod::Definition ||
                pt.method == PointMethod::GuardInterpolated) {
                // secant through the guard anchors
                if (std::isnan(sigma_left)) sigma_left = anchor(1.0 - guard_edge);
                if (std::isnan(sigma_right)) sigma_right = anchor(1.0 + guard_edge);
                double dl = -guard * sigma_left, dr = guard * sigma_right;
                pt.d_prime = (dr - dl) / (2.0 * guard);
                pt.d_prime_left = pt.d_prime_right = pt.d_prime;
                continue;
            }
            DerivativeMode mode = DerivativeMode::FiniteDifference;
            if (spec.diagonal_ordered && !pt.knot && pt.sigma < spec.dim &&
                std::abs(pt.sigma - std::round(pt.sigma)) > 1e-6)
                mode = DerivativeMode::Formula;
            bool done = false;
            try {
                auto der = D_prime(spec, pt.q, mode, opt.fd_step, opt.solve);
                pt.d_prime = der.value;
                pt.d_prime_left = der.left;
                pt.d_prime_right = der.right;
                done = true;
            } catch (const ValidationError&) {
            }
            if (!done && mode == DerivativeMode::Formula) {
                try {
                    auto der = D_prime(spec, pt.q, DerivativeMode::FiniteDifference, opt.fd_step,
                                       opt.solve);
                    pt.d_prime = der.value;
                    pt.d_prime_left = der.left;
                    pt.d_prime_right = der.right;
                    done = true;
                } catch (const ValidationError&) {
                }
            }
            if (!done) {
                // stencil would cross the guard band: use the anchor secant
                if (std::isnan(sigma_left)) sigma_left = anchor(1.0 - guard_edge);
                if (std::isnan(sigma_right)) sigma_right = anchor(1.0 + guard_edge);
                double sigma = pt.q < 1.0 ? sigma_left : sigma_right;
                double other = pt.q < 1.0 ? sigma_right : sigma_left;
                pt.d_prime = 0.5 * (sigma + other);
                pt.d_prime_left = pt.d_prime_right = pt.d_prime;
            }
        }
    }
    return table;
}

DerivativeResult D_prime(const IFSSpec& spec, double q, DerivativeMode mode, double h,
                         const SolveOptions& opt) {
    if (!(q > 0.0) || q == 1.0)
        throw ValidationError("D_prime: q must be positive and != 1");

    DerivativeResult out;
    out.mode = mode;

    if (mode == DerivativeMode::Formula) {
        if (!spec.diagonal_ordered)
            throw ValidationError(
                "D_prime: formula mode needs strictly decreasing positive diagonal parts");
        PressureRoot root = solve_D(spec, q, opt);
        double sigma = root.sigma;
        int k = static_cast<int>(std::floor(sigma));
        if (root.knot || k >= spec.dim || sigma <= 0.0 ||
            std::abs(sigma - std::round(sigma)) <= opt.knot_tol * std::max(1.0, sigma))
            throw ValidationError(
                "D_prime: root sits on an integer branch point; use one-sided finite "
                "differences");

        std::vector<double> w = equilibrium_weights(spec, q, opt);
        double wsum = 0.0;
        for (double v : w) wsum += v;
        for (double& v : w) v /= wsum;

        double f_int = 0.0;
        for (int i = 0; i < spec.map_count(); ++i)
            f_int += w[i] * std::log(spec.probabilities[i]);

        LyapunovData lyap = lyapunov_exponents_exact(spec, BernoulliMeasure{w});
        double phi_k = lyap.phi_star(static_cast<double>(k));
        double lam = lyap.lambdas[k]; // lambda_{k+1}, zero-based index k

        double alpha = (f_int - phi_k) / lam + k;
        out.value = out.left = out.right = alpha;
        out.alpha_q_minus_D = alpha * q - root.value;

        double a_term = f_int - phi_k + k * lam;
        double b_term = lyap.entropy + phi_k - k * lam;
        out.residual = -root.value * lam + q * a_term + b_term;
        return out;
    }

    // finite differences of the solver
    double guard = opt.q_guard;
    auto D_at = [&](double qq) { return solve_D(spec, qq, opt).value; };

    double q_lo = q - h, q_hi = q + h;
    if (q_lo <= 0.0) throw ValidationError("D_prime: step crosses q = 0");
    bool lo_guarded = std::abs(q_lo - 1.0) < guard;
    bool hi_guarded = std::abs(q_hi - 1.0) < guard;
    if (lo_guarded || hi_guarded) {
        std::ostringstream msg;
        msg << "D_prime: finite-difference stencil at q = " << q
            << " would enter the guard band around 1";
        throw ValidationError(msg.str());
    }

    double d0 = D_at(q), dl = D_at(q_lo), dh = D_at(q_hi);
    out.left = (d0 - dl) / h;
    out.right = (dh - d0) / h;
    out.value = (dh - dl) / (2.0 * h);
    out.at_knot = std::abs(out.right - out.left) > std::max(50.0 * h, 1e-6);
    out.alpha_q_minus_D = out.value * q - d0;
    out.residual = kNaN;
    return out;
}

std::vector<LegendrePoint> legendre_spectrum(const SpectrumTable& table,
                                             std::span<const double> alpha_grid) {
    if (table.points.empty()) throw ValidationError("legendre_spectrum: empty table");
    for (std::size_t i = 1; i < alpha_grid.size(); ++i)
        if (!(alpha_grid[i] > alpha_grid[i - 1]))
            throw ValidationError("legendre_spectrum: alpha grid must be strictly increasing");

    std::vector<LegendrePoint> out;
    out.reserve(alpha_grid.size());
    for (double alpha : alpha_grid) {
        LegendrePoint pt;
        pt.alpha = alpha;
        double best = std::numeric_limits<double>::infinity();
        std::size_t arg = 0;
        for (std::size_t i = 0; i < table.points.size(); ++i) {
            double v = alpha * table.points[i].q - table.points[i].tau;
            if (v < best) {
                best = v;
                arg = i;
            }
        }
        pt.f = best;
        pt.q_at_min = table.points[arg].q;
        pt.boundary = (arg == 0 || arg + 1 == table.points.size());
        pt.empty_level_set = best < 0.0;
        out.push_back(pt);
    }
    return out;
}

bool AuditReport::pass(double tol) const {
    for (const auto& iv : intervals)
        if (iv.worst_second_difference > tol) return false;
    if (tau_worst_second_difference > tol) return false;
    if (sigma_worst_increase > tol) return false;
    for (const auto& b : boundaries) {
        if (b.k_left >= dim || b.k_right >= dim) continue; // no sign guarantee beyond d
        if (!b.above_one && b.slope_jump < -tol) return false; // below 1: jumps up
        if (b.above_one && b.slope_jump > tol) return false;   // above 1: concave kinks only
    }
    return true;
}

AuditReport concavity_audit(const SpectrumTable& table, double /*tol*/) {
    const auto& pts = table.points;
    if (pts.size() < 3) throw ValidationError("concavity_audit: need at least 3 grid points");

    AuditReport report;
    report.dim = table.dim;

    auto branch_index = [&](const SpectrumPoint& p) {
        if (p.q == 1.0) return -1; // boundary marker, belongs to neither side
        double sigma = p.sigma;
        if (sigma >= table.dim) return table.dim;
        return static_cast<int>(std::floor(sigma));
    };
    auto side = [](const SpectrumPoint& p) { return p.q > 1.0; };

    // split the grid into maximal runs with constant branch index and side
    std::size_t i = 0;
    while (i < pts.size()) {
        if (pts[i].q == 1.0) {
            ++i;
            continue;
        }
        std::size_t j = i;
        while (j + 1 < pts.size() && pts[j + 1].q != 1.0 &&
               branch_index(pts[j + 1]) == branch_index(pts[i]) &&
               side(pts[j + 1]) == side(pts[i]))
            ++j;

        AuditInterval iv;
        iv.k = branch_index(pts[i]);
        iv.above_one = side(pts[i]);
        iv.q_lo = pts[i].q;
        iv.q_hi = pts[j].q;
        iv.points = static_cast<int>(j - i + 1);
        if (iv.points < 3) {
            std::ostringstream msg;
            msg << "interval k=" << iv.k << " at q in [" << iv.q_lo << ", " << iv.q_hi
                << "] has fewer than 3 grid points; concavity not checked";
            report.notices.push_back(msg.str());
        } else {
            double worst = -std::numeric_limits<double>::infinity();
            for (std::size_t t = i + 1; t + 1 <= j; ++t) {
                double s_prev = (pts[t].D - pts[t - 1].D) / (pts[t].q - pts[t - 1].q);
                double s_next = (pts[t + 1].D - pts[t].D) / (pts[t + 1].q - pts[t].q);
                worst = std::max(worst, s_next - s_prev);
            }
            iv.worst_second_difference = worst;
        }
        report.intervals.push_back(iv);

        if (j + 1 < pts.size() && pts[j + 1].q != 1.0 && side(pts[j + 1]) == side(pts[i])) {
            AuditBoundary b;
            b.q = 0.5 * (pts[j].q + pts[j + 1].q);
            b.k_left = branch_index(pts[j]);
            b.k_right = branch_index(pts[j + 1]);
            b.above_one = side(pts[j]);
            double s_left = j >= 1 ? (pts[j].D - pts[j - 1].D) / (pts[j].q - pts[j - 1].q) : 0.0;
            double s_right = j + 2 < pts.size()
                                 ? (pts[j + 2].D - pts[j + 1].D) / (pts[j + 2].q - pts[j + 1].q)
                                 : 0.0;
            b.slope_jump = s_right - s_left;
            report.boundaries.push_back(b);
        }
        i = j + 1;
    }

    // tau concavity and sigma monotonicity above q = 1
    double worst_tau = -std::numeric_limits<double>::infinity();
    double worst_sigma = -std::numeric_limits<double>::infinity();
    bool any_above = false;
    for (std::size_t t = 0; t < pts.size(); ++t) {
        if (!(pts[t].q > 1.0)) continue;
        any_above = true;
        if (t >= 1 && pts[t - 1].q > 1.0) {
            worst_sigma = std::max(worst_sigma, pts[t].sigma - pts[t - 1].sigma);
            if (t + 1 < pts.size() && pts[t + 1].q > 1.0) {
                double s_prev = (pts[t].tau - pts[t - 1].tau) / (pts[t].q - pts[t - 1].q);
                double s_next = (pts[t + 1].tau - pts[t].tau) / (pts[t + 1].q - pts[t].q);
                worst_tau = std::max(worst_tau, s_next - s_prev);
            }
        }
    }
    report.tau_worst_second_difference = any_above && std::isfinite(worst_tau) ? worst_tau : 0.0;
    report.sigma_worst_increase = any_above && std::isfinite(worst_sigma) ? worst_sigma : 0.0;
    return report;
}

ClauseReport level_set_clauses(const IFSSpec& spec, double q, const SolveOptions& opt) {
    if (!(q > 0.0)) throw ValidationError("level_set_clauses: q must be > 0");
    if (q == 1.0 || std::abs(q - 1.0) < opt.q_guard)
        throw ValidationError("level_set_clauses: q = 1 is excluded");

    ClauseReport rep;
    TauValue tv = solve_tau(spec, q, opt);
    rep.D = tv.root.value;
    rep.tau = tv.tau;
    rep.sigma = tv.root.sigma;

    DerivativeResult der;
    bool formula_ok = spec.diagonal_ordered && !tv.root.knot && rep.sigma < spec.dim &&
                      rep.sigma > 0.0;
    if (formula_ok) {
        try {
            der = D_prime(spec, q, DerivativeMode::Formula, 1e-4, opt);
        } catch (const ValidationError&) {
            formula_ok = false;
        }
    }
    if (!formula_ok) der = D_prime(spec, q, DerivativeMode::FiniteDifference, 1e-4, opt);

    rep.alpha_left = der.left;
    rep.alpha_right = der.right;
    rep.predicted_dim_left = der.left * q - rep.tau;
    rep.predicted_dim_right = der.right * q - rep.tau;

    auto check_side = [&](double alpha) {
        if (q < 1.0) {
            // small-q clause: sigma < 1 and alpha q - D <= 1
            return rep.sigma < 1.0 && alpha * q - rep.D <= 1.0;
        }
        if (q < 2.0) {
            if (!spec.diagonal_ordered || !spec.strict_half) return false;
            double sigma = rep.sigma;
            int k = static_cast<int>(std::floor(sigma));
            if (k > spec.dim - 1 || sigma == std::floor(sigma)) return false;
            double gap = alpha * q - rep.D;
            if (!(gap > k && gap < k + 1)) return false;
            rep.k = k;
            rep.lower_level_set = k > 0;
            return true;
        }
        // q >= 2 extension: D(q) < q - 1 and tau(q) < 1
        return rep.D < q - 1.0 && rep.tau < 1.0;
    };

    rep.applies_left = check_side(der.left);
    rep.applies_right = check_side(der.right);
    if (rep.applies_left || rep.applies_right)
        rep.clause = q < 1.0 ? 1 : (q < 2.0 ? 2 : 3);
    return rep;
}

} // namespace selfaffine
