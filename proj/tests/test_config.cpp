#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <unistd.h>

#include <filesystem>
#include <fstream>
#include <string>

#include "numprep/config.hpp"
#include "numprep/errors.hpp"

using namespace numprep;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        static int n = 0;
        path = fs::temp_directory_path() /
               ("numprep_cfg_" + std::to_string(::getpid()) + "_" +
                std::to_string(n++));
        fs::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path, ec);
    }
    std::string file(const std::string& name) const {
        return (path / name).string();
    }
};

bool contains(const std::string& hay, const std::string& needle) {
    return hay.find(needle) != std::string::npos;
}

}  // namespace

TEST_CASE("canonical dump lists defaults in sorted order") {
    ToolConfig cfg;
    std::string dump = canonical_dump(cfg);
    CHECK(contains(dump, "pipeline.median_k=3"));
    CHECK(contains(dump, "pipeline.target_size=28"));
    CHECK(contains(dump, "knn.k=5"));
    CHECK(contains(dump, "spot.min_solidity=0.9"));
    CHECK(contains(dump, "pipeline.threshold_mode=fixed"));
    // sorted: every line's key is >= the previous line's key
    std::string prev;
    std::size_t pos = 0;
    while (pos < dump.size()) {
        std::size_t eol = dump.find('\n', pos);
        if (eol == std::string::npos) eol = dump.size();
        std::string line = dump.substr(pos, eol - pos);
        std::string key = line.substr(0, line.find('='));
        CHECK(prev <= key);
        prev = key;
        pos = eol + 1;
    }
    CHECK(canonical_dump(cfg) == dump);  // stable
}

TEST_CASE("config_set reaches every subsystem") {
    ToolConfig cfg;
    config_set(cfg, "pipeline.median_k", "5");
    CHECK(cfg.pipeline.median_k == 5);
    config_set(cfg, "pipeline.threshold_mode", "otsu");
    CHECK(cfg.pipeline.threshold_mode == ThresholdMode::otsu);
    config_set(cfg, "pipeline.spot_removal", "false");
    CHECK_FALSE(cfg.pipeline.spot_removal_enabled);
    config_set(cfg, "spot.min_solidity", "0.8");
    CHECK(cfg.pipeline.spot_criteria.min_solidity == doctest::Approx(0.8));
    config_set(cfg, "synth.glyph_scale", "0.6");
    CHECK(cfg.synth.glyph_scale == doctest::Approx(0.6));
    config_set(cfg, "synth.spot_avoid_glyph", "true");
    CHECK(cfg.synth.spot_avoid_glyph);
    config_set(cfg, "knn.k", "3");
    CHECK(cfg.learners.knn_k == 3);
    config_set(cfg, "pca.components", "12");
    CHECK(cfg.learners.pca_components == 12);
    config_set(cfg, "logreg.epochs", "50");
    CHECK(cfg.learners.logreg.epochs == 50);
    config_set(cfg, "tree.max_depth", "4");
    CHECK(cfg.learners.tree.max_depth == 4);
    config_set(cfg, "dataset.filename_column", "path");
    CHECK(cfg.csv.filename == "path");
    config_set(cfg, "split.train_frac", "0.7");
    CHECK(cfg.split.train_frac == doctest::Approx(0.7));
}

TEST_CASE("config_set rejects unknown keys and bad values") {
    ToolConfig cfg;
    CHECK_THROWS_AS(config_set(cfg, "pipeline.medain_k", "3"), ConfigError);
    CHECK_THROWS_AS(config_set(cfg, "", "3"), ConfigError);
    CHECK_THROWS_AS(config_set(cfg, "pipeline.median_k", "three"), ConfigError);
    CHECK_THROWS_AS(config_set(cfg, "pipeline.median_k", ""), ConfigError);
    CHECK_THROWS_AS(config_set(cfg, "split.train_frac", "0.5extra"), ConfigError);
    CHECK_THROWS_AS(config_set(cfg, "pipeline.threshold_mode", "magic"),
                    ConfigError);
    CHECK_THROWS_AS(config_set(cfg, "synth.spot_avoid_glyph", "yes"), ConfigError);
    // the failed assignments left the config untouched
    CHECK(cfg.pipeline.median_k == 3);
    CHECK(cfg.split.train_frac == doctest::Approx(0.85));
}

TEST_CASE("config files skip comments and let later lines win") {
    TempDir dir;
    std::string p = dir.file("run.cfg");
    {
        std::ofstream out(p);
        out << "# an experiment\n"
            << "\n"
            << "pipeline.median_k=5\n"
            << "  knn.k = 7  \n"
            << "pipeline.median_k=9\n";
    }
    ToolConfig cfg;
    load_config_file(cfg, p);
    CHECK(cfg.pipeline.median_k == 9);
    CHECK(cfg.learners.knn_k == 7);

    CHECK_THROWS_AS(load_config_file(cfg, dir.file("absent.cfg")), FileNotFound);

    std::string bad = dir.file("bad.cfg");
    {
        std::ofstream out(bad);
        out << "pipeline.median_k\n";
    }
    CHECK_THROWS_AS(load_config_file(cfg, bad), ConfigError);
}

TEST_CASE("config hash tracks content, not object identity") {
    ToolConfig a, b;
    CHECK(config_hash(a) == config_hash(b));
    CHECK(config_hash(a).size() == 16);
    config_set(b, "knn.k", "6");
    CHECK(config_hash(a) != config_hash(b));
    config_set(b, "knn.k", "5");
    CHECK(config_hash(a) == config_hash(b));
}

TEST_CASE("fnv1a matches the published test vectors") {
    CHECK(fnv1a_hex("") == "cbf29ce484222325");
    CHECK(fnv1a_hex("a") == "af63dc4c8601ec8c");
    CHECK(fnv1a_hex("foobar") == "85944171f73967e8");
}

TEST_CASE("validate propagates to subsystem checks") {
    ToolConfig cfg;
    CHECK_NOTHROW(cfg.validate());
    config_set(cfg, "pipeline.median_k", "4");  // parses, but invalid
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
}
