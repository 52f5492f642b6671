#include "selfaffine/affine.hpp"

#include "selfaffine/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace selfaffine {

LinearMap LinearMap::identity(int dim) {
    LinearMap m(dim);
    for (int i = 0; i < dim; ++i) m.at(i, i) = 1.0;
    return m;
}

LinearMap LinearMap::diagonal(std::span<const double> entries) {
    LinearMap m(static_cast<int>(entries.size()));
    for (int i = 0; i < m.dim(); ++i) m.at(i, i) = entries[i];
    return m;
}

bool LinearMap::is_diagonal(double eps) const {
    for (int i = 0; i < dim_; ++i)
        for (int j = 0; j < dim_; ++j)
            if (i != j && std::abs(at(i, j)) > eps) return false;
    return true;
}

bool LinearMap::is_finite() const {
    for (double v : a_)
        if (!std::isfinite(v)) return false;
    return true;
}

LinearMap LinearMap::operator*(const LinearMap& rhs) const {
    LinearMap out(dim_);
    for (int i = 0; i < dim_; ++i)
        for (int k = 0; k < dim_; ++k) {
            double aik = at(i, k);
            if (aik == 0.0) continue;
            for (int j = 0; j < dim_; ++j) out.at(i, j) += aik * rhs.at(k, j);
        }
    return out;
}

void LinearMap::apply(std::span<const double> x, std::span<double> y) const {
    for (int i = 0; i < dim_; ++i) {
        double s = 0.0;
        for (int j = 0; j < dim_; ++j) s += at(i, j) * x[j];
        y[i] = s;
    }
}

std::vector<double> LinearMap::solve(std::span<const double> b) const {
    int n = dim_;
    std::vector<double> a(a_);
    std::vector<double> x(b.begin(), b.end());
    for (int col = 0; col < n; ++col) {
        int piv = col;
        for (int r = col + 1; r < n; ++r)
            if (std::abs(a[r * n + col]) > std::abs(a[piv * n + col])) piv = r;
        if (a[piv * n + col] == 0.0) throw ValidationError("solve: singular matrix");
        if (piv != col) {
            for (int j = 0; j < n; ++j) std::swap(a[col * n + j], a[piv * n + j]);
            std::swap(x[col], x[piv]);
        }
        double inv = 1.0 / a[col * n + col];
        for (int r = col + 1; r < n; ++r) {
            double f = a[r * n + col] * inv;
            if (f == 0.0) continue;
            for (int j = col; j < n; ++j) a[r * n + j] -= f * a[col * n + j];
            x[r] -= f * x[col];
        }
    }
    for (int col = n - 1; col >= 0; --col) {
        double s = x[col];
        for (int j = col + 1; j < n; ++j) s -= a[col * n + j] * x[j];
        x[col] = s / a[col * n + col];
    }
    return x;
}

double LinearMap::determinant() const {
    int n = dim_;
    std::vector<double> a(a_);
    double det = 1.0;
    for (int col = 0; col < n; ++col) {
        int piv = col;
        for (int r = col + 1; r < n; ++r)
            if (std::abs(a[r * n + col]) > std::abs(a[piv * n + col])) piv = r;
        if (a[piv * n + col] == 0.0) return 0.0;
        if (piv != col) {
            for (int j = 0; j < n; ++j) std::swap(a[col * n + j], a[piv * n + j]);
            det = -det;
        }
        det *= a[col * n + col];
        double inv = 1.0 / a[col * n + col];
        for (int r = col + 1; r < n; ++r) {
            double f = a[r * n + col] * inv;
            if (f == 0.0) continue;
            for (int j = col; j < n; ++j) a[r * n + j] -= f * a[col * n + j];
        }
    }
    return det;
}

std::vector<double> symmetric_eigenvalues(const LinearMap& s) {
    int n = s.dim();
    std::vector<double> a(s.data().begin(), s.data().end());
    auto off = [&]() {
        double t = 0.0;
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) t += a[i * n + j] * a[i * n + j];
        return t;
    };
    double scale = 0.0;
    for (double v : a) scale = std::max(scale, std::abs(v));
    if (scale == 0.0) return std::vector<double>(n, 0.0);
    const double tol = 1e-30 * scale * scale;
    for (int sweep = 0; sweep < 64 && off() > tol; ++sweep) {
        for (int p = 0; p < n - 1; ++p) {
            for (int q = p + 1; q < n; ++q) {
                double apq = a[p * n + q];
                if (apq == 0.0) continue;
                double theta = (a[q * n + q] - a[p * n + p]) / (2.0 * apq);
                double t = (theta >= 0 ? 1.0 : -1.0) /
                           (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                double c = 1.0 / std::sqrt(t * t + 1.0);
                double sn = t * c;
                for (int k = 0; k < n; ++k) {
                    double akp = a[k * n + p], akq = a[k * n + q];
                    a[k * n + p] = c * akp - sn * akq;
                    a[k * n + q] = sn * akp + c * akq;
                }
                for (int k = 0; k < n; ++k) {
                    double apk = a[p * n + k], aqk = a[q * n + k];
                    a[p * n + k] = c * apk - sn * aqk;
                    a[q * n + k] = sn * apk + c * aqk;
                }
            }
        }
    }
    std::vector<double> eig(n);
    for (int i = 0; i < n; ++i) eig[i] = a[i * n + i];
    return eig;
}

void singular_values_into(const LinearMap& m, SingularProfile& p) {
    if (m.dim() < 1) throw ValidationError("singular_values: empty matrix");
    if (!m.is_finite()) throw ValidationError("singular_values: matrix has non-finite entries");

    p.values.resize(m.dim());
    if (m.dim() == 1) {
        p.values[0] = std::abs(m.at(0, 0));
    } else if (m.is_diagonal()) {
        for (int i = 0; i < m.dim(); ++i) p.values[i] = std::abs(m.at(i, i));
        std::sort(p.values.begin(), p.values.end(), std::greater<double>());
    } else {
        LinearMap mtm(m.dim());
        for (int i = 0; i < m.dim(); ++i)
            for (int j = 0; j < m.dim(); ++j) {
                double s = 0.0;
                for (int k = 0; k < m.dim(); ++k) s += m.at(k, i) * m.at(k, j);
                mtm.at(i, j) = s;
            }
        std::vector<double> eig = symmetric_eigenvalues(mtm);
        std::sort(eig.begin(), eig.end(), std::greater<double>());
        for (int i = 0; i < m.dim(); ++i) p.values[i] = std::sqrt(std::max(eig[i], 0.0));
        // the Gram route loses relative accuracy on the smallest value;
        // |det M| = prod of singular values recovers it
        double head = 1.0;
        for (int i = 0; i + 1 < m.dim(); ++i) head *= p.values[i];
        if (head > 0.0) {
            double corrected = std::abs(m.determinant()) / head;
            p.values.back() = std::min(corrected, p.values[m.dim() - 2]);
        }
    }
    if (p.values.back() <= 0.0) {
        std::ostringstream msg;
        msg << "singular_values: matrix is singular (smallest singular value "
            << p.values.back() << ")";
        throw ValidationError(msg.str());
    }
}

SingularProfile singular_values(const LinearMap& m) {
    SingularProfile p;
    singular_values_into(m, p);
    return p;
}

double SingularProfile::log_phi(double s) const {
    if (s < 0.0) throw ValidationError("phi_s: exponent s must be >= 0");
    if (s == 0.0) return 0.0;
    int d = dim();
    if (s >= static_cast<double>(d)) {
        double sum = 0.0;
        for (double a : values) sum += std::log(a);
        return sum * (s / d);
    }
    int k = static_cast<int>(std::ceil(s)); // s in (k-1, k]
    double lg = 0.0;
    for (int i = 0; i + 1 < k; ++i) lg += std::log(values[i]);
    lg += (s - k + 1) * std::log(values[k - 1]);
    return lg;
}

double phi_s(const LinearMap& m, double s) {
    return std::exp(singular_values(m).log_phi(s));
}

LinearMap word_matrix(std::span<const LinearMap> maps, std::span<const int> word) {
    if (maps.empty()) throw ValidationError("word_matrix: no maps");
    int d = maps[0].dim();
    LinearMap out = LinearMap::identity(d);
    for (int letter : word) {
        if (letter < 0 || letter >= static_cast<int>(maps.size())) {
            std::ostringstream msg;
            msg << "word_matrix: letter " << letter << " out of range [0, " << maps.size() << ")";
            throw ValidationError(msg.str());
        }
        out = out * maps[letter];
    }
    return out;
}

int binomial(int d, int k) {
    if (k < 0 || k > d) return 0;
    long r = 1;
    for (int i = 0; i < k; ++i) r = r * (d - i) / (i + 1);
    return static_cast<int>(r);
}

namespace {

// Lexicographic k-subsets of {0..d-1}.
std::vector<std::vector<int>> subsets(int d, int k) {
    std::vector<std::vector<int>> out;
    std::vector<int> cur(k);
    for (int i = 0; i < k; ++i) cur[i] = i;
    while (true) {
        out.push_back(cur);
        int i = k - 1;
        while (i >= 0 && cur[i] == d - k + i) --i;
        if (i < 0) break;
        ++cur[i];
        for (int j = i + 1; j < k; ++j) cur[j] = cur[j - 1] + 1;
    }
    return out;
}

double minor_det(const LinearMap& m, const std::vector<int>& rows, const std::vector<int>& cols) {
    int k = static_cast<int>(rows.size());
    LinearMap sub(k);
    for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j) sub.at(i, j) = m.at(rows[i], cols[j]);
    return sub.determinant();
}

} // namespace

LinearMap compound(const LinearMap& m, int k) {
    int d = m.dim();
    if (k < 1 || k > d) throw ValidationError("compound: order out of range");
    auto idx = subsets(d, k);
    int n = static_cast<int>(idx.size());
    LinearMap out(n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) out.at(i, j) = minor_det(m, idx[i], idx[j]);
    return out;
}

} // namespace selfaffine
