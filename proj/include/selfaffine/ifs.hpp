#ifndef SELFAFFINE_IFS_HPP
#define SELFAFFINE_IFS_HPP

#include "selfaffine/affine.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace selfaffine {

// An affine iterated function system S_i = T_i + a_i with a probability
// vector. Construct through make_ifs(), which validates invariants and
// precomputes the structural flags the solvers dispatch on.
struct IFSSpec {
    int dim = 0;
    std::vector<LinearMap> maps;
    std::vector<std::vector<double>> translations; // empty, or one vector per map
    std::vector<double> probabilities;

    // derived
    std::vector<SingularProfile> profiles;
    bool strict_half = false;      // all operator norms < 1/2
    bool diagonal = false;         // every T_i diagonal
    bool diagonal_ordered = false; // diagonal, entries strictly decreasing and positive
    bool diagonal_aligned = false; // diagonal, |entries| non-increasing in a common order
    bool similitude = false;       // all singular values equal per map
    bool exact_pressure = false;   // per-letter factorization of phi^s holds exactly

    int map_count() const { return static_cast<int>(maps.size()); }
    bool has_translations() const { return !translations.empty(); }

    // Radius R with attractor ⊂ B(0, R): max|a_i| / (1 - max norm).
    double bounding_radius() const;

    double max_norm() const;

    // FNV-1a over a canonical serialization; identifies the spec in metadata.
    std::uint64_t hash() const;

    std::string hash_hex() const;
};

IFSSpec make_ifs(int dim, std::vector<LinearMap> maps,
                 std::vector<std::vector<double>> translations,
                 std::vector<double> probabilities);

// Convenience: equal diagonal linear parts from per-coordinate ratios.
IFSSpec make_homogeneous_diagonal(std::vector<double> ratios,
                                  std::vector<std::vector<double>> translations,
                                  std::vector<double> probabilities);

// Shannon entropy -sum w_i log w_i of a probability vector (nats).
double entropy(const std::vector<double>& w);

} // namespace selfaffine

#endif
