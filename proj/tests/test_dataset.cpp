#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <unistd.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <string>

#include "numprep/dataset.hpp"
#include "numprep/errors.hpp"
#include "numprep/raster.hpp"
#include "support/oracles.hpp"

using namespace numprep;
namespace fs = std::filesystem;

namespace {

/// Self-cleaning scratch directory for corpus fixtures.
struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() /
               ("numprep_ds_" + std::to_string(::getpid()) + "_" +
                std::to_string(counter()++));
        fs::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path, ec);
    }
    static int& counter() {
        static int n = 0;
        return n;
    }
    std::string file(const std::string& name) const {
        return (path / name).string();
    }
};

void put_text(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    out << text;
}

void put_image(const std::string& path, std::uint8_t fill = 128) {
    write_pgm(GrayImage(8, 8, fill), path);
}

}  // namespace

TEST_CASE("pgm round trip is byte-exact") {
    TempDir dir;
    rng::SplitMix r(1);
    GrayImage img = oracles::random_gray(r, 19, 7);
    std::string p = dir.file("img.pgm");
    write_pgm(img, p);
    CHECK(read_pgm(p) == img);
}

TEST_CASE("pgm reader rejects missing, foreign, and truncated files") {
    TempDir dir;
    CHECK_THROWS_AS(read_pgm(dir.file("absent.pgm")), FileNotFound);
    put_text(dir.file("ascii.pgm"), "P2\n2 2\n255\n0 0 0 0\n");
    CHECK_THROWS_AS(read_pgm(dir.file("ascii.pgm")), UnsupportedFormat);
    put_text(dir.file("short.pgm"), "P5\n4 4\n255\nab");
    CHECK_THROWS_AS(read_pgm(dir.file("short.pgm")), Truncated);
    CHECK_THROWS_AS(write_pgm(GrayImage(2, 2, std::uint8_t{0}),
                              dir.file("no/such/dir/x.pgm")),
                    FileNotFound);
}

TEST_CASE("csv loader reads plain and quoted rows") {
    TempDir dir;
    put_image(dir.file("a.pgm"));
    put_image(dir.file("b,c.pgm"));
    put_image(dir.file("q.pgm"));
    put_text(dir.file("labels.csv"),
             "filename,digit\r\n"
             "a.pgm,3\r\n"
             "\"b,c.pgm\",7\n"
             "\"q.pgm\",\"5\"\n");
    LoadResult r = load_labeled(dir.file("labels.csv"), dir.path.string());
    CHECK(r.errors.empty());
    REQUIRE(r.dataset.size() == 3);
    CHECK(r.dataset.items[0].filename == "a.pgm");
    CHECK(r.dataset.items[0].label == 3);
    CHECK(r.dataset.items[1].filename == "b,c.pgm");
    CHECK(r.dataset.items[1].label == 7);
    CHECK(r.dataset.items[2].label == 5);
}

TEST_CASE("csv loader handles escaped quotes") {
    TempDir dir;
    put_image(dir.file("he said \"hi\".pgm"));
    put_text(dir.file("labels.csv"),
             "filename,digit\n"
             "\"he said \"\"hi\"\".pgm\",9\n");
    LoadResult r = load_labeled(dir.file("labels.csv"), dir.path.string());
    CHECK(r.errors.empty());
    REQUIRE(r.dataset.size() == 1);
    CHECK(r.dataset.items[0].filename == "he said \"hi\".pgm");
}

TEST_CASE("row problems are reported with 1-based line numbers") {
    TempDir dir;
    put_image(dir.file("ok.pgm"));
    put_image(dir.file("dup.pgm"));
    put_text(dir.file("labels.csv"),
             "filename,digit\n"
             "ok.pgm,1\n"
             "gone.pgm,2\n"        // missing image file
             "dup.pgm,3\n"
             "dup.pgm,4\n"         // duplicate filename
             "ok2.pgm,eleven\n"    // non-numeric digit
             "ok.pgm\n");          // wrong field count (also duplicate)
    LoadResult r = load_labeled(dir.file("labels.csv"), dir.path.string());
    CHECK(r.dataset.size() == 2);
    REQUIRE(r.errors.size() == 4);
    std::set<int> lines;
    for (const auto& e : r.errors) lines.insert(e.line);
    CHECK(lines == std::set<int>{3, 5, 6, 7});
}

TEST_CASE("out-of-range digits are row errors") {
    TempDir dir;
    put_image(dir.file("a.pgm"));
    put_image(dir.file("b.pgm"));
    put_text(dir.file("labels.csv"),
             "filename,digit\na.pgm,10\nb.pgm,-1\n");
    LoadResult r = load_labeled(dir.file("labels.csv"), dir.path.string());
    CHECK(r.dataset.size() == 0);
    CHECK(r.errors.size() == 2);
}

TEST_CASE("structural csv problems abort the load") {
    TempDir dir;
    CHECK_THROWS_AS(load_labeled(dir.file("none.csv"), dir.path.string()),
                    FileNotFound);
    put_text(dir.file("nohdr.csv"), "filename,number\na.pgm,1\n");
    CHECK_THROWS_AS(load_labeled(dir.file("nohdr.csv"), dir.path.string()),
                    MissingColumn);
    put_text(dir.file("bad.csv"), "filename,digit\n\"unterminated,3\n");
    CHECK_THROWS_AS(load_labeled(dir.file("bad.csv"), dir.path.string()),
                    MalformedCsv);
}

TEST_CASE("column names can be overridden") {
    TempDir dir;
    put_image(dir.file("x.pgm"));
    put_text(dir.file("labels.csv"), "path,klass,extra\nx.pgm,4,zz\n");
    CsvColumns cols;
    cols.filename = "path";
    cols.digit = "klass";
    LoadResult r = load_labeled(dir.file("labels.csv"), dir.path.string(), cols);
    CHECK(r.errors.empty());
    REQUIRE(r.dataset.size() == 1);
    CHECK(r.dataset.items[0].label == 4);
}

TEST_CASE("split sizes follow ceil and the parts partition the input") {
    LabeledDataset ds;
    for (int i = 0; i < 10; ++i) {
        DatasetItem it;
        it.image = GrayImage(2, 2, std::uint8_t(i));
        it.label = i % 10;
        it.filename = "f" + std::to_string(i);
        ds.items.push_back(std::move(it));
    }
    SplitSpec spec;
    spec.train_frac = 0.66;
    spec.seed = 5;
    auto [train, test] = split(ds, spec);
    CHECK(train.size() == 7);  // ceil(6.6)
    CHECK(test.size() == 3);
    std::set<std::string> names;
    for (const auto& it : train.items) names.insert(it.filename);
    for (const auto& it : test.items) names.insert(it.filename);
    CHECK(names.size() == 10);

    // deterministic for a fixed seed, different for another seed
    auto [train2, test2] = split(ds, spec);
    REQUIRE(train2.size() == train.size());
    for (std::size_t i = 0; i < train.size(); ++i)
        CHECK(train.items[i].filename == train2.items[i].filename);
    spec.seed = 6;
    auto [train3, test3] = split(ds, spec);
    bool same_order = true;
    for (std::size_t i = 0; i < train.size(); ++i)
        same_order &= train.items[i].filename == train3.items[i].filename;
    CHECK_FALSE(same_order);

    SplitSpec bad;
    bad.train_frac = 0.0;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad.train_frac = 1.5;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("synthetic generation is deterministic and labeled round-robin") {
    SynthConfig cfg;
    cfg.count = 23;
    cfg.seed = 99;
    LabeledDataset a = generate_synthetic(cfg);
    LabeledDataset b = generate_synthetic(cfg);
    REQUIRE(a.size() == 23);
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a.items[i].label == (int)(i % 10));
        CHECK(std::get<GrayImage>(a.items[i].image) ==
              std::get<GrayImage>(b.items[i].image));
    }
}

TEST_CASE("synthetic filenames follow the zero-padded pattern") {
    SynthConfig cfg;
    cfg.count = 12;
    LabeledDataset ds = generate_synthetic(cfg);
    CHECK(ds.items[0].filename == "synth_00000.pgm");
    CHECK(ds.items[11].filename == "synth_00011.pgm");
}

TEST_CASE("clean synthetic palette stays within the generator values") {
    SynthConfig cfg;
    cfg.count = 30;
    cfg.seed = 7;
    cfg.salt_pepper_rate = 0.0;
    LabeledDataset ds = generate_synthetic(cfg);
    std::set<int> allowed = {0, 38, 217, 255};
    for (const auto& it : ds.items) {
        const GrayImage& g = std::get<GrayImage>(it.image);
        CHECK(g.width == kSynthCanvas);
        for (auto v : g.data) CHECK(allowed.count(v));
    }
}

TEST_CASE("source tags round-trip the spot geometry") {
    SynthConfig cfg;
    cfg.count = 40;
    cfg.seed = 3;
    cfg.spot_probability = 1.0;
    LabeledDataset ds = generate_synthetic(cfg);
    for (const auto& it : ds.items) {
        auto quad = spot_from_tag(it.source_tag);
        REQUIRE(quad.has_value());
        // Corners may run slightly off-canvas (the stamp clips); the tag
        // still has to stay near the canvas and keep its center inside.
        double cx = 0, cy = 0;
        for (int i = 0; i < 4; ++i) {
            CHECK((*quad)[2 * i] > -20.0);
            CHECK((*quad)[2 * i] < kSynthCanvas + 20.0);
            CHECK((*quad)[2 * i + 1] > -20.0);
            CHECK((*quad)[2 * i + 1] < kSynthCanvas + 20.0);
            cx += (*quad)[2 * i] / 4;
            cy += (*quad)[2 * i + 1] / 4;
        }
        CHECK(cx >= 0);
        CHECK(cx < kSynthCanvas);
        CHECK(cy >= 0);
        CHECK(cy < kSynthCanvas);
    }
    CHECK_FALSE(spot_from_tag("spot=none").has_value());
    CHECK_FALSE(spot_from_tag("").has_value());
}

TEST_CASE("channel independence keeps images pairable across configs") {
    SynthConfig base;
    base.count = 20;
    base.seed = 11;
    base.spot_probability = 0.0;
    SynthConfig spotted = base;
    spotted.spot_probability = 1.0;
    spotted.spot_avoid_glyph = true;
    LabeledDataset a = generate_synthetic(base);
    LabeledDataset b = generate_synthetic(spotted);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        auto quad = spot_from_tag(b.items[i].source_tag);
        REQUIRE(quad.has_value());
        const GrayImage& ga = std::get<GrayImage>(a.items[i].image);
        const GrayImage& gb = std::get<GrayImage>(b.items[i].image);
        // outside the stamped quad the two corpora agree pixel for pixel
        for (int y = 0; y < ga.height; ++y)
            for (int x = 0; x < ga.width; ++x)
                if (!point_in_quad(*quad, x, y))
                    CHECK(ga.at(x, y) == gb.at(x, y));
    }
}

TEST_CASE("point_in_quad matches the stamped region") {
    GrayImage img(20, 20, std::uint8_t{255});
    std::array<double, 8> quad{3.5, 2.5, 14.5, 4.5, 12.5, 15.5, 2.5, 12.5};
    stamp_quad(img, quad, 0);
    for (int y = 0; y < 20; ++y)
        for (int x = 0; x < 20; ++x)
            CHECK((img.at(x, y) == 0) == point_in_quad(quad, x, y));
}

TEST_CASE("synth config validation") {
    SynthConfig cfg;
    cfg.count = 0;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg = {};
    cfg.salt_pepper_rate = 1.5;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg = {};
    cfg.glyph_scale = 0.0;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg = {};
    CHECK_NOTHROW(cfg.validate());
}
