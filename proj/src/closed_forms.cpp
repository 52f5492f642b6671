#include "selfaffine/closed_forms.hpp"

#include "selfaffine/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace selfaffine {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double log_sum_pq(std::span<const double> p, double q) {
    double s = 0.0;
    for (double v : p) s += std::pow(v, q);
    return std::log(s);
}

// d/dq log sum p_i^q = sum p_i^q log p_i / sum p_i^q
double dlog_sum_pq(std::span<const double> p, double q) {
    double s = 0.0, ds = 0.0;
    for (double v : p) {
        double t = std::pow(v, q);
        s += t;
        ds += t * std::log(v);
    }
    return ds / s;
}

void check_probabilities(std::span<const double> p) {
    double sum = 0.0;
    for (double v : p) {
        if (!(v > 0.0)) throw ValidationError("closed form: probabilities must be positive");
        sum += v;
    }
    if (std::abs(sum - 1.0) > 1e-12) {
        std::ostringstream msg;
        msg << "closed form: probabilities sum to " << sum;
        throw ValidationError(msg.str());
    }
}

bool is_uniform(std::span<const double> p) {
    double mn = p[0], mx = p[0];
    for (double v : p) {
        mn = std::min(mn, v);
        mx = std::max(mx, v);
    }
    return mx - mn < 1e-14;
}

} // namespace

EqualMapsValue equal_maps_closed_form(std::span<const double> t, std::span<const double> p,
                                      double q) {
    int d = static_cast<int>(t.size());
    if (d < 1) throw ValidationError("closed form: empty ratio list");
    for (int i = 0; i < d; ++i) {
        if (!(t[i] > 0.0) || !(t[i] < 1.0))
            throw ValidationError("closed form: ratios must lie in (0, 1)");
        if (i > 0 && !(t[i] < t[i - 1]))
            throw ValidationError("closed form: ratios must be strictly decreasing");
    }
    check_probabilities(p);
    if (!(q > 0.0) || q == 1.0)
        throw ValidationError("closed form: q must be positive and != 1");

    double log_sum = log_sum_pq(p, q);
    double log_A = log_sum / (q - 1.0);

    std::vector<double> cum(d + 1, 0.0); // cum[k] = log(t_1...t_k)
    for (int k = 1; k <= d; ++k) cum[k] = cum[k - 1] + std::log(t[k - 1]);

    EqualMapsValue out;
    out.A = std::exp(log_A);
    if (log_A >= std::log(t[0])) {
        out.regime = 0;
        out.D = log_sum / std::log(t[0]);
        out.tau = out.D;
        return out;
    }
    for (int k = 1; k <= d - 1; ++k) {
        if (cum[k + 1] <= log_A && log_A < cum[k]) {
            out.regime = k;
            double lt = std::log(t[k]); // log t_{k+1}, zero-based index k
            out.D = log_sum / lt + (q - 1.0) * (k - cum[k] / lt);
            out.tau = out.D;
            return out;
        }
    }
    out.regime = d;
    out.D = d * log_sum / cum[d];
    out.tau = d * (q - 1.0);
    return out;
}

EqualMapsValue equal_maps_closed_form(const IFSSpec& spec, double q) {
    if (!spec.diagonal_ordered)
        throw ValidationError("closed form: spec must have strictly decreasing diagonal parts");
    for (int i = 1; i < spec.map_count(); ++i)
        for (int j = 0; j < spec.dim; ++j)
            if (spec.maps[i].at(j, j) != spec.maps[0].at(j, j))
                throw ValidationError("closed form: all linear parts must be equal");
    std::vector<double> t(spec.dim);
    for (int j = 0; j < spec.dim; ++j) t[j] = spec.maps[0].at(j, j);
    return equal_maps_closed_form(t, spec.probabilities, q);
}

SlopeJump slope_jump_at_crossing(std::span<const double> t, std::span<const double> p, int k) {
    int d = static_cast<int>(t.size());
    if (k < 1 || k > d - 1)
        throw ValidationError("slope jump: k must lie in [1, d-1]");
    check_probabilities(p);
    for (int i = 1; i < d; ++i)
        if (!(t[i] < t[i - 1]) || !(t[i] > 0.0))
            throw ValidationError("slope jump: ratios must be strictly decreasing and positive");

    double target = 0.0;
    for (int i = 0; i < k; ++i) target += std::log(t[i]);

    auto log_A = [&](double q) { return log_sum_pq(p, q) / (q - 1.0); };

    SlopeJump out;
    out.k = k;
    const double lo = 1e-9, hi = 1.0 - 1e-9;
    if (is_uniform(p)) {
        double c = log_A(0.5); // constant in q
        if (std::abs(c - target) > 1e-10) {
            std::ostringstream msg;
            msg << "slope jump: no crossing; A(q) is constant " << std::exp(c)
                << " for uniform p";
            throw ConvergenceError(msg.str());
        }
        out.q_cross = 0.5;
    } else {
        double f_lo = log_A(lo) - target, f_hi = log_A(hi) - target;
        if (f_lo * f_hi > 0.0) {
            std::ostringstream msg;
            msg << "slope jump: no crossing in (0,1); A ranges over (" << std::exp(log_A(lo))
                << ", " << std::exp(log_A(hi)) << ")";
            throw ConvergenceError(msg.str());
        }
        double a = lo, b = hi;
        for (int it = 0; it < 200 && b - a > 1e-14; ++it) {
            double mid = 0.5 * (a + b);
            double fm = log_A(mid) - target;
            if (fm == 0.0) { a = b = mid; break; }
            if (fm * f_lo > 0.0) a = mid; else b = mid;
        }
        out.q_cross = 0.5 * (a + b);
    }

    double q = out.q_cross;
    double first = log_sum_pq(p, q) / (q - 1.0) - dlog_sum_pq(p, q);
    double second = 1.0 / std::log(t[k]) - 1.0 / std::log(t[k - 1]);
    out.jump = first * second;

    if (!is_uniform(p) && !(out.jump > 0.0))
        throw ConvergenceError("slope jump: expected a strictly positive jump");
    return out;
}

namespace {

// almost-sure one-dimensional spectrum of the first-coordinate system
double as_line_tau(double t1, std::span<const double> p, double q, double q_max) {
    auto B = [&](double qq) { return log_sum_pq(p, qq) / std::log(t1); };
    auto Bp = [&](double qq) { return dlog_sum_pq(p, qq) / std::log(t1); };

    if (q == 1.0) return 0.0;
    if (q > 1.0) {
        (void)q_max;
        return std::min(B(q), q - 1.0);
    }
    // q in [0, 1)
    if (Bp(1.0) >= 1.0) return q - 1.0;
    auto g = [&](double qq) { return Bp(qq) * qq - B(qq); }; // non-increasing
    double q0 = 0.0;
    if (g(1e-9) > 1.0) {
        double a = 1e-9, b = 1.0;
        for (int it = 0; it < 200 && b - a > 1e-12; ++it) {
            double mid = 0.5 * (a + b);
            if (g(mid) > 1.0) a = mid; else b = mid;
        }
        q0 = 0.5 * (a + b);
    }
    if (q <= q0) return Bp(q0) * q - 1.0;
    return B(q);
}

} // namespace

double rosc_planar_tau(double t1, double t2, std::span<const double> p, double q,
                       const std::function<double(double)>& tau_nu) {
    if (!(t2 > 0.0) || !(t1 > t2) || !(t1 < 0.5))
        throw ValidationError("rosc closed form: need 1/2 > t1 > t2 > 0");
    check_probabilities(p);
    if (q < 0.0) throw ValidationError("rosc closed form: q must be >= 0");

    // validity cap: largest of 2 and the root of B(q) = 1
    auto B = [&](double qq) { return log_sum_pq(p, qq) / std::log(t1); };
    double hi = 2.0;
    while (B(hi) < 1.0 && hi < 1e6) hi *= 2.0;
    double a = 1.0, b = hi;
    for (int it = 0; it < 200 && b - a > 1e-12; ++it) {
        double mid = 0.5 * (a + b);
        if (B(mid) < 1.0) a = mid; else b = mid;
    }
    double q_max = std::max(2.0, 0.5 * (a + b));
    if (q > q_max + 1e-12) {
        std::ostringstream msg;
        msg << "rosc closed form: q = " << q << " beyond validity range [0, " << q_max << "]";
        throw ValidationError(msg.str());
    }

    double line = tau_nu ? tau_nu(q) : as_line_tau(t1, p, q, q_max);
    return line * (1.0 - std::log(t1) / std::log(t2)) + log_sum_pq(p, q) / std::log(t2);
}

double rosc_planar_tau(double t1, double t2, std::span<const double> p, double q) {
    return rosc_planar_tau(t1, t2, p, q, nullptr);
}

double similitude_D(const IFSSpec& spec, double q) {
    if (!spec.similitude) throw ValidationError("similitude solve: spec is not a similitude system");
    if (!(q > 0.0)) throw ValidationError("similitude solve: q must be > 0");
    if (q == 1.0) return 0.0;

    // F(t) = sum p_i^q r_i^{-t} - 1 is increasing and convex; Newton lands on
    // the convex side after one step and then descends monotonically
    double t = 0.0;
    for (int it = 0; it < 200; ++it) {
        double f = -1.0, fp = 0.0;
        for (int i = 0; i < spec.map_count(); ++i) {
            double r = spec.profiles[i].norm();
            double term = std::pow(spec.probabilities[i], q) * std::pow(r, -t);
            f += term;
            fp += term * (-std::log(r));
        }
        double step = f / fp;
        t -= step;
        if (std::abs(step) < 1e-15 * std::max(1.0, std::abs(t))) break;
    }
    return t;
}

double similitude_D_prime(const IFSSpec& spec, double q) {
    double t = similitude_D(spec, q);
    double num = 0.0, den = 0.0;
    for (int i = 0; i < spec.map_count(); ++i) {
        double r = spec.profiles[i].norm();
        double term = std::pow(spec.probabilities[i], q) * std::pow(r, -t);
        num += term * std::log(spec.probabilities[i]);
        den += term * (-std::log(r));
    }
    return -num / den;
}

namespace {

double similitude_tau(const IFSSpec& spec, double q) {
    if (q == 1.0) return 0.0;
    double d_val = similitude_D(spec, q);
    if (q > 1.0) return std::min(d_val, spec.dim * (q - 1.0));
    return std::max(d_val, spec.dim * (q - 1.0));
}

// largest q > 1 with tau(q) <= bound (tau is increasing there)
double solve_tau_le(const IFSSpec& spec, double bound) {
    double hi = 2.0;
    while (similitude_tau(spec, hi) <= bound && hi < 1e9) hi *= 2.0;
    double lo = 1.0 + 1e-9;
    for (int it = 0; it < 200 && hi - lo > 1e-12; ++it) {
        double mid = 0.5 * (lo + hi);
        if (similitude_tau(spec, mid) <= bound) lo = mid; else hi = mid;
    }
    return lo;
}

} // namespace

RegimeReport regime_report(const IFSSpec& spec, const SolveOptions& /*opt*/) {
    if (!spec.similitude)
        throw ValidationError("regime report: all linear parts must be similitudes");
    if (!spec.strict_half)
        throw ValidationError("regime report: similitude norms must be < 1/2");

    RegimeReport rep;
    double d = spec.dim;

    double h = entropy(spec.probabilities);
    double chi = 0.0; // sum p_i log(1/r_i)
    for (int i = 0; i < spec.map_count(); ++i)
        chi += spec.probabilities[i] * std::log(1.0 / spec.profiles[i].norm());
    rep.D_prime_1 = h / chi;

    rep.q_max = solve_tau_le(spec, d);
    rep.q_min = kNaN;
    rep.q_tilde_min = kNaN;

    if (rep.D_prime_1 >= d) {
        rep.clause = 2;
        rep.s_inf = similitude_D(spec, 2.0); // D(q)/(q-1) non-increasing: inf at q = 2
        if (rep.s_inf >= d) {
            rep.lebesgue_like = true;
            rep.q_max = 2.0;
            rep.branches.push_back({0.0, rep.q_max, 0, 0.0});
        } else {
            // sigma(q) = D/(q-1) crosses d inside (1, 2]
            double lo = 1.0 + 1e-9, hi = 2.0;
            for (int it = 0; it < 200 && hi - lo > 1e-12; ++it) {
                double mid = 0.5 * (lo + hi);
                double sigma = similitude_D(spec, mid) / (mid - 1.0);
                if (sigma >= d) lo = mid; else hi = mid;
            }
            rep.q_min = 0.5 * (lo + hi);
            rep.branches.push_back({0.0, rep.q_min, 0, 0.0});
            rep.branches.push_back({rep.q_min, rep.q_max, 2, 0.0});
            rep.alpha_lo = similitude_D_prime(spec, rep.q_max);
            rep.alpha_hi = similitude_D_prime(spec, rep.q_min);
        }
    } else {
        rep.clause = 3;
        rep.s_inf = similitude_D(spec, 2.0);
        auto g = [&](double q) {
            return similitude_D_prime(spec, q) * q - similitude_D(spec, q);
        }; // non-increasing
        double qt = 0.0;
        if (g(1e-9) > d) {
            double lo2 = 1e-9, hi2 = 1.0;
            for (int it = 0; it < 200 && hi2 - lo2 > 1e-12; ++it) {
                double mid = 0.5 * (lo2 + hi2);
                if (g(mid) > d) lo2 = mid; else hi2 = mid;
            }
            qt = 0.5 * (lo2 + hi2);
        }
        rep.q_tilde_min = qt;
        if (qt > 0.0) {
            double slope = (d + similitude_D(spec, qt)) / qt;
            rep.branches.push_back({0.0, qt, 1, slope});
        }
        rep.branches.push_back({qt, rep.q_max, 2, 0.0});
        rep.alpha_lo = similitude_D_prime(spec, rep.q_max);
        rep.alpha_hi = similitude_D_prime(spec, qt > 0.0 ? qt : 1e-9);
    }

    // validity interval of the extension beyond q = 2:
    // [2, sup{t : D(t)/(t-1) <= 1 and tau(t) <= 1}]
    double t_tau = solve_tau_le(spec, 1.0);
    double sigma_there = similitude_D(spec, t_tau) / (t_tau - 1.0);
    if (sigma_there <= 1.0 + 1e-12) {
        rep.interval_hi = t_tau;
        rep.interval_nonempty = t_tau >= 2.0;
    } else {
        rep.interval_hi = kNaN;
        rep.interval_nonempty = false;
    }
    return rep;
}

double regime_tau(const RegimeReport& rep, const IFSSpec& spec, double q) {
    if (q < 0.0 || q > rep.q_max + 1e-12)
        throw ValidationError("regime tau: q outside [0, q_max]");
    for (const auto& b : rep.branches) {
        if (q < b.q_lo - 1e-12 || q > b.q_hi + 1e-12) continue;
        switch (b.kind) {
            case 0: return spec.dim * (q - 1.0);
            case 1: return b.slope * q - spec.dim;
            default: return q == 1.0 ? 0.0 : similitude_D(spec, q);
        }
    }
    throw ValidationError("regime tau: no branch covers q");
}

} // namespace selfaffine
