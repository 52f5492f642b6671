#ifndef SELFAFFINE_AFFINE_HPP
#define SELFAFFINE_AFFINE_HPP

#include <span>
#include <vector>

namespace selfaffine {

// Dense d x d real matrix, row-major. Sizes stay desk-scale (d <= 4 in
// practice), so everything is direct: no blocking, no iterative kernels.
class LinearMap {
public:
    LinearMap() = default;
    explicit LinearMap(int dim) : dim_(dim), a_(static_cast<std::size_t>(dim) * dim, 0.0) {}

    static LinearMap identity(int dim);
    static LinearMap diagonal(std::span<const double> entries);

    int dim() const { return dim_; }
    double& at(int i, int j) { return a_[static_cast<std::size_t>(i) * dim_ + j]; }
    double at(int i, int j) const { return a_[static_cast<std::size_t>(i) * dim_ + j]; }
    std::span<const double> data() const { return a_; }

    bool is_diagonal(double eps = 0.0) const;
    bool is_finite() const;

    LinearMap operator*(const LinearMap& rhs) const;

    // y = A x
    void apply(std::span<const double> x, std::span<double> y) const;

    // Solves A x = b by Gaussian elimination with partial pivoting.
    std::vector<double> solve(std::span<const double> b) const;

    double determinant() const;

private:
    int dim_ = 0;
    std::vector<double> a_;
};

// Singular values sorted non-increasing, all strictly positive.
struct SingularProfile {
    std::vector<double> values;

    double norm() const { return values.front(); }            // operator norm
    double min() const { return values.back(); }
    int dim() const { return static_cast<int>(values.size()); }

    // log of the singular value function:
    //   s in (k-1, k], k <= d :  a_1 ... a_{k-1} a_k^{s-k+1}
    //   s >= d                :  (a_1 ... a_d)^{s/d}
    //   s = 0                 :  1
    double log_phi(double s) const;
};

// Eigenvalues of a symmetric matrix by cyclic Jacobi rotations, unsorted.
std::vector<double> symmetric_eigenvalues(const LinearMap& s);

// Singular values from the eigen-decomposition of M^T M. Throws
// ValidationError when M is singular or contains non-finite entries.
SingularProfile singular_values(const LinearMap& m);

// Same, reusing the caller's buffer (hot enumeration paths).
void singular_values_into(const LinearMap& m, SingularProfile& out);

double phi_s(const LinearMap& m, double s);

// T_I = T_{i_1} ∘ ... ∘ T_{i_k}; the empty word gives the identity.
// Letters are zero-based indices into maps.
LinearMap word_matrix(std::span<const LinearMap> maps, std::span<const int> word);

// k-th compound matrix (k x k minors, row/column subsets in lexicographic
// order). Its top singular value is the product of the k largest singular
// values of the original matrix, and compounds multiply like the originals,
// which gives an underflow-free route to log(a_1...a_k) of long products.
LinearMap compound(const LinearMap& m, int k);

// Number of k-subsets of {0..d-1}; the compound dimension.
int binomial(int d, int k);

} // namespace selfaffine

#endif
