#include "selfaffine/config.hpp"

#include "selfaffine/errors.hpp"

#include <cctype>
#include <fstream>
#include <set>
#include <sstream>

namespace selfaffine {

using nlohmann::json;

namespace {

const std::set<std::string> kTasks{"dq",      "tau",    "spectrum",      "lyapunov",
                                   "closed-form", "regimes", "sample",   "empirical-tau",
                                   "verify",  "covering"};

LinearMap parse_matrix(const json& jm, int dim, int map_index) {
    std::ostringstream where;
    where << "maps[" << map_index << "].matrix";
    if (jm.is_number()) {
        if (dim != 1)
            throw ValidationError(where.str() + ": scalar matrix requires dimension 1");
        LinearMap m(1);
        m.at(0, 0) = jm.get<double>();
        return m;
    }
    if (!jm.is_array() || jm.empty())
        throw ValidationError(where.str() + ": expected a number, a diagonal, or a full matrix");
    if (jm[0].is_number()) {
        if (static_cast<int>(jm.size()) != dim)
            throw ValidationError(where.str() + ": diagonal length does not match dimension");
        LinearMap m(dim);
        for (int i = 0; i < dim; ++i) m.at(i, i) = jm[i].get<double>();
        return m;
    }
    if (static_cast<int>(jm.size()) != dim)
        throw ValidationError(where.str() + ": row count does not match dimension");
    LinearMap m(dim);
    for (int i = 0; i < dim; ++i) {
        const json& row = jm[i];
        if (!row.is_array() || static_cast<int>(row.size()) != dim)
            throw ValidationError(where.str() + ": ragged rows");
        for (int j = 0; j < dim; ++j) m.at(i, j) = row[j].get<double>();
    }
    return m;
}

} // namespace

RunConfig parse_config(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ValidationError(std::string("config: ") + e.what());
    }
    if (!doc.is_object()) throw ValidationError("config: top level must be an object");

    RunConfig cfg;
    if (!doc.contains("task") || !doc["task"].is_string())
        throw ValidationError("config: missing string field 'task'");
    cfg.task = doc["task"].get<std::string>();
    if (kTasks.find(cfg.task) == kTasks.end())
        throw ValidationError("config: unknown task '" + cfg.task + "'");

    if (doc.contains("params")) {
        if (!doc["params"].is_object())
            throw ValidationError("config: 'params' must be an object");
        cfg.params = doc["params"];
    }
    if (doc.contains("out_dir")) cfg.out_dir = doc["out_dir"].get<std::string>();

    if (doc.contains("maps")) {
        if (!doc.contains("dimension") || !doc["dimension"].is_number_integer())
            throw ValidationError("config: 'dimension' (integer) is required with 'maps'");
        cfg.dimension = doc["dimension"].get<int>();
        const json& jmaps = doc["maps"];
        if (!jmaps.is_array() || jmaps.empty())
            throw ValidationError("config: 'maps' must be a non-empty array");

        std::vector<LinearMap> maps;
        std::vector<std::vector<double>> translations;
        std::vector<double> probabilities;
        bool any_translation = false, all_translation = true;
        for (std::size_t i = 0; i < jmaps.size(); ++i) {
            const json& jm = jmaps[i];
            std::ostringstream where;
            where << "maps[" << i << "]";
            if (!jm.is_object()) throw ValidationError("config: " + where.str() + " must be an object");
            if (!jm.contains("matrix"))
                throw ValidationError("config: " + where.str() + " is missing 'matrix'");
            maps.push_back(parse_matrix(jm["matrix"], cfg.dimension, static_cast<int>(i)));
            if (!jm.contains("probability") || !jm["probability"].is_number())
                throw ValidationError("config: " + where.str() + " is missing numeric 'probability'");
            probabilities.push_back(jm["probability"].get<double>());
            if (jm.contains("translation")) {
                any_translation = true;
                const json& jt = jm["translation"];
                if (!jt.is_array() || static_cast<int>(jt.size()) != cfg.dimension)
                    throw ValidationError("config: " + where.str() +
                                          ".translation must have 'dimension' entries");
                std::vector<double> a(cfg.dimension);
                for (int j = 0; j < cfg.dimension; ++j) a[j] = jt[j].get<double>();
                translations.push_back(std::move(a));
            } else {
                all_translation = false;
            }
        }
        if (any_translation && !all_translation)
            throw ValidationError("config: either all maps carry translations or none do");
        if (!any_translation) translations.clear();

        cfg.spec = make_ifs(cfg.dimension, std::move(maps), std::move(translations),
                            std::move(probabilities));
        cfg.has_spec = true;
    } else if (cfg.task != "covering") {
        throw ValidationError("config: task '" + cfg.task + "' requires 'maps'");
    }
    return cfg;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("config: cannot open '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

std::string emit_config(const RunConfig& cfg) {
    json doc;
    doc["task"] = cfg.task;
    doc["params"] = cfg.params;
    doc["out_dir"] = cfg.out_dir;
    if (cfg.has_spec) {
        doc["dimension"] = cfg.dimension;
        json jmaps = json::array();
        for (int i = 0; i < cfg.spec.map_count(); ++i) {
            json jm;
            json rows = json::array();
            for (int r = 0; r < cfg.dimension; ++r) {
                json row = json::array();
                for (int c = 0; c < cfg.dimension; ++c) row.push_back(cfg.spec.maps[i].at(r, c));
                rows.push_back(row);
            }
            jm["matrix"] = rows;
            jm["probability"] = cfg.spec.probabilities[i];
            if (cfg.spec.has_translations()) jm["translation"] = cfg.spec.translations[i];
            jmaps.push_back(jm);
        }
        doc["maps"] = jmaps;
    }
    return doc.dump(2);
}

void apply_override(RunConfig& cfg, const std::string& key_value) {
    auto eq = key_value.find('=');
    if (eq == std::string::npos || eq == 0)
        throw ValidationError("override: expected key=value, got '" + key_value + "'");
    std::string key = key_value.substr(0, eq);
    std::string value = key_value.substr(eq + 1);

    if (key == "task") {
        if (kTasks.find(value) == kTasks.end())
            throw ValidationError("override: unknown task '" + value + "'");
        cfg.task = value;
        return;
    }
    if (key == "out_dir") {
        cfg.out_dir = value;
        return;
    }
    // scalar param: number, boolean, or string
    if (value == "true" || value == "false") {
        cfg.params[key] = (value == "true");
        return;
    }
    try {
        std::size_t used = 0;
        double num = std::stod(value, &used);
        if (used == value.size()) {
            if (num == static_cast<long long>(num) && value.find_first_of(".eE") == std::string::npos)
                cfg.params[key] = static_cast<long long>(num);
            else
                cfg.params[key] = num;
            return;
        }
    } catch (const std::exception&) {
    }
    cfg.params[key] = value;
}

} // namespace selfaffine
