#include "numprep/config.hpp"

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <functional>
#include <sstream>
#include <vector>

#include "numprep/errors.hpp"

namespace numprep {

namespace {

std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

long long parse_ll(const std::string& key, const std::string& v) {
    try {
        std::size_t used = 0;
        long long x = std::stoll(v, &used);
        if (used != v.size()) throw std::invalid_argument("");
        return x;
    } catch (...) {
        throw ConfigError("bad integer for " + key + ": '" + v + "'");
    }
}

int parse_int(const std::string& key, const std::string& v) {
    long long x = parse_ll(key, v);
    if (x < INT32_MIN || x > INT32_MAX)
        throw ConfigError("integer out of range for " + key);
    return (int)x;
}

std::uint64_t parse_u64(const std::string& key, const std::string& v) {
    try {
        std::size_t used = 0;
        unsigned long long x = std::stoull(v, &used);
        if (used != v.size() || v[0] == '-') throw std::invalid_argument("");
        return x;
    } catch (...) {
        throw ConfigError("bad unsigned integer for " + key + ": '" + v + "'");
    }
}

double parse_double(const std::string& key, const std::string& v) {
    try {
        std::size_t used = 0;
        double x = std::stod(v, &used);
        if (used != v.size()) throw std::invalid_argument("");
        return x;
    } catch (...) {
        throw ConfigError("bad number for " + key + ": '" + v + "'");
    }
}

bool parse_bool(const std::string& key, const std::string& v) {
    if (v == "true" || v == "1") return true;
    if (v == "false" || v == "0") return false;
    throw ConfigError("bad boolean for " + key + ": '" + v + "'");
}

std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

struct Key {
    std::string name;
    std::function<void(ToolConfig&, const std::string&)> set;
    std::function<std::string(const ToolConfig&)> get;
};

const std::vector<Key>& key_table() {
    static const std::vector<Key> keys = [] {
        std::vector<Key> k;
        auto add = [&](const char* name, auto setter, auto getter) {
            k.push_back({name,
                         [setter, name](ToolConfig& c, const std::string& v) {
                             setter(c, name, v);
                         },
                         getter});
        };

#define INT_KEY(NAME, FIELD)                                                  \
    add(                                                                      \
        NAME,                                                                 \
        [](ToolConfig& c, const char* n, const std::string& v) {              \
            c.FIELD = parse_int(n, v);                                        \
        },                                                                    \
        [](const ToolConfig& c) { return std::to_string(c.FIELD); })
#define DBL_KEY(NAME, FIELD)                                                  \
    add(                                                                      \
        NAME,                                                                 \
        [](ToolConfig& c, const char* n, const std::string& v) {              \
            c.FIELD = parse_double(n, v);                                     \
        },                                                                    \
        [](const ToolConfig& c) { return fmt_double(c.FIELD); })
#define BOOL_KEY(NAME, FIELD)                                                 \
    add(                                                                      \
        NAME,                                                                 \
        [](ToolConfig& c, const char* n, const std::string& v) {              \
            c.FIELD = parse_bool(n, v);                                       \
        },                                                                    \
        [](const ToolConfig& c) { return c.FIELD ? "true" : "false"; })
#define STR_KEY(NAME, FIELD)                                                  \
    add(                                                                      \
        NAME,                                                                 \
        [](ToolConfig& c, const char*, const std::string& v) { c.FIELD = v; },\
        [](const ToolConfig& c) { return c.FIELD; })

        INT_KEY("pipeline.target_size", pipeline.target_size);
        INT_KEY("pipeline.median_k", pipeline.median_k);
        add(
            "pipeline.threshold_mode",
            [](ToolConfig& c, const char* n, const std::string& v) {
                if (v == "fixed")
                    c.pipeline.threshold_mode = ThresholdMode::fixed_level;
                else if (v == "otsu")
                    c.pipeline.threshold_mode = ThresholdMode::otsu;
                else
                    throw ConfigError(std::string(n) + " must be fixed or otsu");
            },
            [](const ToolConfig& c) {
                return c.pipeline.threshold_mode == ThresholdMode::otsu
                           ? "otsu"
                           : "fixed";
            });
        INT_KEY("pipeline.fixed_level", pipeline.fixed_level);
        BOOL_KEY("pipeline.spot_removal", pipeline.spot_removal_enabled);
        INT_KEY("pipeline.crop_margin", pipeline.crop_margin);

        INT_KEY("spot.min_vertices", pipeline.spot_criteria.min_vertices);
        INT_KEY("spot.max_vertices", pipeline.spot_criteria.max_vertices);
        DBL_KEY("spot.min_solidity", pipeline.spot_criteria.min_solidity);
        DBL_KEY("spot.min_area_frac", pipeline.spot_criteria.min_area_frac);
        DBL_KEY("spot.max_area_frac", pipeline.spot_criteria.max_area_frac);
        DBL_KEY("spot.dp_epsilon_frac", pipeline.spot_criteria.dp_epsilon_frac);

        DBL_KEY("split.train_frac", split.train_frac);

        INT_KEY("synth.count", synth.count);
        add(
            "synth.seed",
            [](ToolConfig& c, const char* n, const std::string& v) {
                c.synth.seed = parse_u64(n, v);
            },
            [](const ToolConfig& c) { return std::to_string(c.synth.seed); });
        DBL_KEY("synth.salt_pepper_rate", synth.salt_pepper_rate);
        DBL_KEY("synth.spot_probability", synth.spot_probability);
        DBL_KEY("synth.invert_probability", synth.invert_probability);
        DBL_KEY("synth.jitter_translate", synth.jitter_translate);
        DBL_KEY("synth.jitter_scale", synth.jitter_scale);
        DBL_KEY("synth.grid_lines_probability", synth.grid_lines_probability);
        DBL_KEY("synth.glyph_scale", synth.glyph_scale);
        BOOL_KEY("synth.spot_avoid_glyph", synth.spot_avoid_glyph);

        INT_KEY("knn.k", learners.knn_k);
        INT_KEY("pca.components", learners.pca_components);
        INT_KEY("logreg.epochs", learners.logreg.epochs);
        DBL_KEY("logreg.lr", learners.logreg.lr);
        DBL_KEY("logreg.l2", learners.logreg.l2);
        INT_KEY("tree.max_depth", learners.tree.max_depth);
        INT_KEY("tree.min_leaf", learners.tree.min_leaf);

        STR_KEY("dataset.filename_column", csv.filename);
        STR_KEY("dataset.digit_column", csv.digit);

#undef INT_KEY
#undef DBL_KEY
#undef BOOL_KEY
#undef STR_KEY
        return k;
    }();
    return keys;
}

}  // namespace

void ToolConfig::validate() const {
    pipeline.validate();
    split.validate();
    synth.validate();
    if (learners.knn_k < 1) throw ConfigError("knn.k must be >= 1");
    if (learners.pca_components < 1)
        throw ConfigError("pca.components must be >= 1");
    if (learners.logreg.epochs < 0 || learners.logreg.lr <= 0 ||
        learners.logreg.l2 < 0)
        throw ConfigError("bad logreg configuration");
    if (learners.tree.max_depth < 0 || learners.tree.min_leaf < 1)
        throw ConfigError("bad tree configuration");
    if (csv.filename.empty() || csv.digit.empty())
        throw ConfigError("CSV column names must be non-empty");
}

void config_set(ToolConfig& cfg, const std::string& key, const std::string& value) {
    for (const Key& k : key_table()) {
        if (k.name == key) {
            k.set(cfg, value);
            return;
        }
    }
    throw ConfigError("unknown config key: '" + key + "'");
}

void load_config_file(ToolConfig& cfg, const std::string& path) {
    std::ifstream in(path);
    if (!in) throw FileNotFound("cannot open config: " + path);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        auto eq = t.find('=');
        if (eq == std::string::npos)
            throw ConfigError(path + ":" + std::to_string(lineno) +
                              ": expected key=value");
        config_set(cfg, trim(t.substr(0, eq)), trim(t.substr(eq + 1)));
    }
}

std::string canonical_dump(const ToolConfig& cfg) {
    // the key table is already sorted by construction order; sort on name to
    // stay stable if entries are ever reordered
    std::vector<const Key*> keys;
    for (const Key& k : key_table()) keys.push_back(&k);
    std::sort(keys.begin(), keys.end(),
              [](const Key* a, const Key* b) { return a->name < b->name; });
    std::ostringstream out;
    for (const Key* k : keys) out << k->name << "=" << k->get(cfg) << "\n";
    return out.str();
}

std::string fnv1a_hex(const std::string& text) {
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char c : text) {
        h ^= c;
        h *= 1099511628211ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", (unsigned long long)h);
    return buf;
}

std::string config_hash(const ToolConfig& cfg) {
    return fnv1a_hex(canonical_dump(cfg));
}

}  // namespace numprep
