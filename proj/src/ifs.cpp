#include "selfaffine/ifs.hpp"

#include "selfaffine/errors.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

namespace selfaffine {

double IFSSpec::max_norm() const {
    double n = 0.0;
    for (const auto& p : profiles) n = std::max(n, p.norm());
    return n;
}

double IFSSpec::bounding_radius() const {
    if (!has_translations()) return 0.0;
    double amax = 0.0;
    for (const auto& a : translations) {
        double s = 0.0;
        for (double v : a) s += v * v;
        amax = std::max(amax, std::sqrt(s));
    }
    return amax / (1.0 - max_norm());
}

std::uint64_t IFSSpec::hash() const {
    std::ostringstream os;
    os << dim << '|' << map_count() << '|';
    char buf[64];
    auto put = [&](double v) {
        std::snprintf(buf, sizeof buf, "%.17g,", v);
        os << buf;
    };
    for (const auto& m : maps)
        for (int i = 0; i < dim; ++i)
            for (int j = 0; j < dim; ++j) put(m.at(i, j));
    os << '|';
    for (const auto& a : translations)
        for (double v : a) put(v);
    os << '|';
    for (double p : probabilities) put(p);
    std::uint64_t h = 1469598103934665603ull;
    for (char c : os.str()) {
        h ^= static_cast<unsigned char>(c);
        h *= 1099511628211ull;
    }
    return h;
}

std::string IFSSpec::hash_hex() const {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(hash()));
    return buf;
}

IFSSpec make_ifs(int dim, std::vector<LinearMap> maps,
                 std::vector<std::vector<double>> translations,
                 std::vector<double> probabilities) {
    if (dim < 1) throw ValidationError("ifs: dimension must be >= 1");
    if (maps.empty()) throw ValidationError("ifs: at least one map required");
    if (probabilities.size() != maps.size())
        throw ValidationError("ifs: probability count does not match map count");

    double sum = 0.0;
    for (std::size_t i = 0; i < probabilities.size(); ++i) {
        if (!(probabilities[i] > 0.0)) {
            std::ostringstream msg;
            msg << "ifs: probability of map " << (i + 1) << " is not strictly positive ("
                << probabilities[i] << ")";
            throw ValidationError(msg.str());
        }
        sum += probabilities[i];
    }
    if (std::abs(sum - 1.0) > 1e-12) {
        std::ostringstream msg;
        msg << "ifs: probabilities sum to " << sum << ", expected 1";
        throw ValidationError(msg.str());
    }

    IFSSpec spec;
    spec.dim = dim;
    spec.maps = std::move(maps);
    spec.translations = std::move(translations);
    spec.probabilities = std::move(probabilities);

    if (!spec.translations.empty()) {
        if (spec.translations.size() != spec.maps.size())
            throw ValidationError("ifs: translation count does not match map count");
        for (const auto& a : spec.translations)
            if (static_cast<int>(a.size()) != dim)
                throw ValidationError("ifs: translation dimension mismatch");
    }

    spec.profiles.reserve(spec.maps.size());
    for (std::size_t i = 0; i < spec.maps.size(); ++i) {
        const auto& m = spec.maps[i];
        if (m.dim() != dim) throw ValidationError("ifs: matrix dimension mismatch");
        SingularProfile p = singular_values(m);
        if (!(p.norm() < 1.0)) {
            std::ostringstream msg;
            msg << "ifs: map " << (i + 1) << " is not contractive (top singular value "
                << p.norm() << ")";
            throw ValidationError(msg.str());
        }
        spec.profiles.push_back(std::move(p));
    }

    spec.strict_half = true;
    for (const auto& p : spec.profiles)
        if (!(p.norm() < 0.5)) spec.strict_half = false;

    spec.diagonal = true;
    for (const auto& m : spec.maps)
        if (!m.is_diagonal()) spec.diagonal = false;

    spec.diagonal_ordered = spec.diagonal;
    spec.diagonal_aligned = spec.diagonal;
    if (spec.diagonal) {
        for (const auto& m : spec.maps) {
            for (int j = 0; j < dim; ++j) {
                double cur = m.at(j, j);
                if (!(cur > 0.0)) spec.diagonal_ordered = false;
                if (j > 0) {
                    if (!(m.at(j - 1, j - 1) > cur)) spec.diagonal_ordered = false;
                    if (std::abs(m.at(j - 1, j - 1)) < std::abs(cur)) spec.diagonal_aligned = false;
                }
            }
        }
    }

    spec.similitude = true;
    for (const auto& p : spec.profiles)
        if (p.norm() - p.min() > 1e-12 * p.norm()) spec.similitude = false;

    spec.exact_pressure = spec.diagonal_aligned || spec.similitude;
    return spec;
}

IFSSpec make_homogeneous_diagonal(std::vector<double> ratios,
                                  std::vector<std::vector<double>> translations,
                                  std::vector<double> probabilities) {
    int m = static_cast<int>(probabilities.size());
    std::vector<LinearMap> maps(m, LinearMap::diagonal(ratios));
    return make_ifs(static_cast<int>(ratios.size()), std::move(maps), std::move(translations),
                    std::move(probabilities));
}

double entropy(const std::vector<double>& w) {
    double h = 0.0;
    for (double v : w)
        if (v > 0.0) h -= v * std::log(v);
    return h;
}

} // namespace selfaffine
