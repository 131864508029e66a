#include "numprep/commands.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

#include "numprep/dataset.hpp"
#include "numprep/errors.hpp"
#include "numprep/learners.hpp"
#include "numprep/model_io.hpp"
#include "numprep/pipeline.hpp"
#include "numprep/rng.hpp"

namespace fs = std::filesystem;

namespace numprep {

namespace {

// ------------------------------------------------------------- small utils

GrayImage gray_of(const ImageVariant& v) {
    if (const auto* g = std::get_if<GrayImage>(&v)) return *g;
    return to_grayscale(std::get<RGBImage>(v));
}

std::string stem_of(const std::string& filename) {
    return fs::path(filename).stem().string();
}

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

int line_of_tag(const std::string& tag) {
    auto pos = tag.find("line=");
    if (pos == std::string::npos) return 0;
    return std::atoi(tag.c_str() + pos + 5);
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.6f", v);
    return buf;
}

bool load_tool_config(const std::string& path, ToolConfig& cfg, std::ostream& err) {
    try {
        if (!path.empty()) load_config_file(cfg, path);
        cfg.validate();
        return true;
    } catch (const Error& e) {
        err << "config error: " << e.what() << "\n";
        return false;
    } catch (const std::invalid_argument& e) {
        err << "config error: " << e.what() << "\n";
        return false;
    }
}

LoadResult load_corpus(const std::string& in_dir, const std::string& csv_path,
                       const CsvColumns& cols) {
    std::string csv = csv_path.empty()
                          ? (fs::path(in_dir) / "labels.csv").string()
                          : csv_path;
    return load_labeled(csv, (fs::path(in_dir) / "images").string(), cols);
}

void write_labels_csv(const std::string& path,
                      const std::vector<std::pair<std::string, int>>& rows) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw FileNotFound("cannot write: " + path);
    out << "filename,digit\n";
    for (const auto& [name, digit] : rows)
        out << csv_field(name) << "," << digit << "\n";
}

// features + labels for a uniformly-sized corpus
std::pair<FeatureMatrix, std::vector<int>> corpus_features(const LabeledDataset& ds) {
    std::vector<GrayImage> imgs;
    std::vector<int> labels;
    imgs.reserve(ds.items.size());
    for (const DatasetItem& it : ds.items) {
        imgs.push_back(gray_of(it.image));
        labels.push_back(it.label);
    }
    return {features_of(imgs), std::move(labels)};
}

// ----------------------------------------------------------------- tracing

void write_trace(const fs::path& dir, const PreprocessResult& res) {
    fs::create_directories(dir);
    auto dump = [&](const char* name, const std::optional<GrayImage>& img) {
        if (img) write_pgm(*img, (dir / name).string());
    };
    dump("01_resize.pgm", res.trace.post_resize);
    dump("02_gray.pgm", res.trace.post_gray);
    dump("03_blur.pgm", res.trace.post_blur);
    dump("04_spot_removal.pgm", res.trace.post_spot_removal);
    dump("05_binarize.pgm", res.trace.post_binarize);
    write_pgm(res.image.gray(), (dir / "06_final.pgm").string());

    std::ofstream meta(dir / "meta.txt");
    meta << "threshold_level=" << res.trace.threshold_level << "\n"
         << "crop_rect=" << res.trace.crop_rect.x << " " << res.trace.crop_rect.y
         << " " << res.trace.crop_rect.w << " " << res.trace.crop_rect.h << "\n"
         << "square_side=" << res.trace.square_side << "\n"
         << "pad=" << res.trace.pad_left << " " << res.trace.pad_top << "\n"
         << "spots=" << res.trace.spots.size() << "\n";
    for (const Contour& c : res.trace.spots) {
        meta << "spot:";
        for (const Point& p : c.points) meta << " " << p.x << "," << p.y;
        meta << "\n";
    }
}

}  // namespace

// -------------------------------------------------------------------- prep

int cmd_prep(const PrepOptions& opt, std::ostream& out, std::ostream& err) {
    ToolConfig cfg;
    if (!load_tool_config(opt.config_path, cfg, err)) return kExitUsage;

    LoadResult loaded;
    try {
        loaded = load_corpus(opt.in_dir, opt.csv_path, cfg.csv);
    } catch (const Error& e) {
        err << "cannot load corpus: " << e.what() << "\n";
        return kExitUsage;
    }

    fs::create_directories(fs::path(opt.out_dir) / "images");

    struct ManifestRow {
        int line;
        std::string filename;
        std::string label;
        std::string status;
        std::string message;
    };
    std::vector<ManifestRow> manifest;
    std::vector<std::pair<std::string, int>> ok_labels;
    int n_ok = 0, n_skipped = 0;

    for (const RowError& e : loaded.errors)
        manifest.push_back({e.line, e.filename, "", "error", e.message});

    for (const DatasetItem& item : loaded.dataset.items) {
        int line = line_of_tag(item.source_tag);
        std::string out_name = stem_of(item.filename) + ".pgm";
        try {
            if (opt.raw) {
                GrayImage baseline = raw_baseline(item.image, cfg.pipeline);
                write_pgm(baseline,
                          (fs::path(opt.out_dir) / "images" / out_name).string());
            } else {
                PreprocessResult res = preprocess(item.image, cfg.pipeline, opt.trace);
                write_pgm(res.image.gray(),
                          (fs::path(opt.out_dir) / "images" / out_name).string());
                if (opt.trace)
                    write_trace(fs::path(opt.out_dir) / "trace" / stem_of(item.filename),
                                res);
            }
            ok_labels.emplace_back(out_name, item.label);
            manifest.push_back(
                {line, item.filename, std::to_string(item.label), "ok", ""});
            ++n_ok;
        } catch (const BlankImage& e) {
            manifest.push_back(
                {line, item.filename, std::to_string(item.label), "skipped", e.what()});
            ++n_skipped;
        }
    }

    std::stable_sort(manifest.begin(), manifest.end(),
                     [](const ManifestRow& a, const ManifestRow& b) {
                         return a.line < b.line;
                     });

    try {
        write_labels_csv((fs::path(opt.out_dir) / "labels.csv").string(), ok_labels);
        std::ofstream mf(fs::path(opt.out_dir) / "manifest.csv", std::ios::binary);
        if (!mf) throw FileNotFound("cannot write manifest");
        mf << "filename,label,status,message\n";
        for (const ManifestRow& r : manifest)
            mf << csv_field(r.filename) << "," << r.label << "," << r.status << ","
               << csv_field(r.message) << "\n";
    } catch (const Error& e) {
        err << "cannot write outputs: " << e.what() << "\n";
        return kExitUsage;
    }

    int n_error = (int)loaded.errors.size();
    out << "prep: " << n_ok << " ok, " << n_skipped << " skipped, " << n_error
        << " errors -> " << opt.out_dir << "\n";
    if (n_skipped == 0 && n_error == 0) return kExitOk;
    return kExitPartial;
}

// ------------------------------------------------------------------- synth

int cmd_synth(const SynthOptions& opt, std::ostream& out, std::ostream& err) {
    ToolConfig cfg;
    if (!load_tool_config(opt.config_path, cfg, err)) return kExitUsage;
    if (opt.count >= 0) cfg.synth.count = opt.count;
    if (opt.seed >= 0) cfg.synth.seed = (std::uint64_t)opt.seed;

    LabeledDataset ds;
    try {
        cfg.synth.validate();
        ds = generate_synthetic(cfg.synth);
    } catch (const std::invalid_argument& e) {
        err << "synth error: " << e.what() << "\n";
        return kExitUsage;
    }

    try {
        fs::create_directories(fs::path(opt.out_dir) / "images");
        std::ofstream labels(fs::path(opt.out_dir) / "labels.csv", std::ios::binary);
        if (!labels) throw FileNotFound("cannot write labels.csv");
        labels << "filename,digit,spot\n";
        for (const DatasetItem& item : ds.items) {
            write_pgm(std::get<GrayImage>(item.image),
                      (fs::path(opt.out_dir) / "images" / item.filename).string());
            auto pos = item.source_tag.find("spot=");
            std::string spot =
                pos == std::string::npos ? "none" : item.source_tag.substr(pos + 5);
            labels << csv_field(item.filename) << "," << item.label << ","
                   << csv_field(spot) << "\n";
        }
    } catch (const Error& e) {
        err << "cannot write corpus: " << e.what() << "\n";
        return kExitUsage;
    }

    out << "synth: " << ds.items.size() << " images -> " << opt.out_dir << "\n";
    return kExitOk;
}

// ------------------------------------------------------------------- split

int cmd_split(const SplitOptions& opt, std::ostream& out, std::ostream& err) {
    ToolConfig cfg;
    if (!load_tool_config(opt.config_path, cfg, err)) return kExitUsage;

    LoadResult loaded;
    try {
        loaded = load_corpus(opt.in_dir, opt.csv_path, cfg.csv);
    } catch (const Error& e) {
        err << "cannot load corpus: " << e.what() << "\n";
        return kExitUsage;
    }

    SplitSpec spec = cfg.split;
    spec.seed = (std::uint64_t)opt.seed;
    auto [train, test] = split(loaded.dataset, spec);

    try {
        for (const auto* part : {&train, &test}) {
            const char* name = part == &train ? "train" : "test";
            std::vector<std::pair<std::string, int>> rows;
            for (const DatasetItem& item : part->items) {
                std::string rel =
                    std::to_string(item.label) + "/" + stem_of(item.filename) + ".pgm";
                fs::path target = fs::path(opt.out_dir) / name / "images" / rel;
                fs::create_directories(target.parent_path());
                write_pgm(gray_of(item.image), target.string());
                rows.emplace_back(rel, item.label);
            }
            fs::create_directories(fs::path(opt.out_dir) / name);
            write_labels_csv((fs::path(opt.out_dir) / name / "labels.csv").string(),
                             rows);
        }
    } catch (const Error& e) {
        err << "cannot write split: " << e.what() << "\n";
        return kExitUsage;
    }

    out << "split: " << train.items.size() << " train / " << test.items.size()
        << " test -> " << opt.out_dir << "\n";
    return loaded.errors.empty() ? kExitOk : kExitPartial;
}

// ------------------------------------------------------------------- train

int cmd_train(const TrainOptions& opt, std::ostream& out, std::ostream& err) {
    ToolConfig cfg;
    if (!load_tool_config(opt.config_path, cfg, err)) return kExitUsage;

    ModelKind kind;
    try {
        kind = model_kind_from_name(opt.model);
    } catch (const std::invalid_argument& e) {
        err << e.what() << "\n";
        return kExitUsage;
    }

    try {
        LoadResult loaded = load_corpus(opt.in_dir, opt.csv_path, cfg.csv);
        for (const RowError& e : loaded.errors)
            err << "warning: line " << e.line << ": " << e.message << "\n";
        auto [X, y] = corpus_features(loaded.dataset);
        Model model = fit_model(kind, X, y, cfg.learners);
        save_model(model, opt.out_path);
        out << "train: " << opt.model << " on " << X.n_samples << " samples, fit "
            << fmt(model.fit_seconds) << "s -> " << opt.out_path << "\n";
        return kExitOk;
    } catch (const Error& e) {
        err << "train failed: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::invalid_argument& e) {
        err << "train failed: " << e.what() << "\n";
        return kExitUsage;
    }
}

// -------------------------------------------------------------------- eval

int cmd_eval(const EvalOptions& opt, std::ostream& out, std::ostream& err) {
    try {
        Model model = load_model(opt.model_path);
        LoadResult loaded = load_corpus(opt.in_dir, opt.csv_path, CsvColumns{});
        for (const RowError& e : loaded.errors)
            err << "warning: line " << e.line << ": " << e.message << "\n";
        auto [X, y] = corpus_features(loaded.dataset);
        Metrics m = evaluate(model, X, y);

        out << "model: " << model_kind_name(model.kind) << "\n"
            << "samples: " << X.n_samples << "\n"
            << "accuracy: " << fmt(m.accuracy) << "\n"
            << "predict_seconds: " << fmt(m.predict_seconds) << "\n"
            << "confusion (rows = actual 0..9):\n";
        for (int a = 0; a < 10; ++a) {
            for (int p = 0; p < 10; ++p) out << m.confusion[a][p] << (p == 9 ? "" : " ");
            out << "\n";
        }
        return kExitOk;
    } catch (const Error& e) {
        err << "eval failed: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::invalid_argument& e) {
        err << "eval failed: " << e.what() << "\n";
        return kExitUsage;
    }
}

// ------------------------------------------------------------------- bench

namespace {

const char* kUnimplemented[] = {"svm", "svm_pca", "cnn", "capsnet"};

struct Corpus {
    std::vector<std::string> filenames;  // sorted
    std::vector<int> labels;
    std::vector<GrayImage> images;
};

Corpus sorted_corpus(const LabeledDataset& ds) {
    std::vector<const DatasetItem*> items;
    for (const DatasetItem& it : ds.items) items.push_back(&it);
    std::sort(items.begin(), items.end(),
              [](const DatasetItem* a, const DatasetItem* b) {
                  return a->filename < b->filename;
              });
    Corpus c;
    for (const DatasetItem* it : items) {
        c.filenames.push_back(it->filename);
        c.labels.push_back(it->label);
        c.images.push_back(gray_of(it->image));
    }
    return c;
}

}  // namespace

int cmd_bench(const BenchOptions& opt, std::ostream& out, std::ostream& err) {
    ToolConfig cfg;
    if (!load_tool_config(opt.config_path, cfg, err)) return kExitUsage;

    // parse the model list
    std::vector<ModelKind> kinds;
    {
        std::stringstream ss(opt.models);
        std::string name;
        while (std::getline(ss, name, ',')) {
            if (name.empty()) continue;
            for (const char* u : kUnimplemented)
                if (name == u) {
                    err << "model " << name << " is not implemented\n";
                    return kExitUsage;
                }
            try {
                kinds.push_back(model_kind_from_name(name));
            } catch (const std::invalid_argument& e) {
                err << e.what() << "\n";
                return kExitUsage;
            }
        }
        if (kinds.empty()) {
            err << "no models requested\n";
            return kExitUsage;
        }
    }

    LoadResult raw_loaded, prep_loaded;
    try {
        raw_loaded = load_corpus(opt.raw_dir, "", cfg.csv);
        prep_loaded = load_corpus(opt.prep_dir, "", cfg.csv);
    } catch (const Error& e) {
        err << "cannot load corpus: " << e.what() << "\n";
        return kExitUsage;
    }
    for (const auto* lr : {&raw_loaded, &prep_loaded})
        if (!lr->errors.empty()) {
            err << "corpus has " << lr->errors.size()
                << " unreadable rows; bench needs clean corpora\n";
            return kExitUsage;
        }

    Corpus raw = sorted_corpus(raw_loaded.dataset);
    Corpus prep = sorted_corpus(prep_loaded.dataset);
    if (raw.filenames != prep.filenames) {
        err << "pathway corpora disagree on filenames (raw " << raw.filenames.size()
            << " vs preprocessed " << prep.filenames.size() << ")\n";
        return kExitUsage;
    }
    if (raw.labels != prep.labels) {
        err << "pathway corpora disagree on labels\n";
        return kExitUsage;
    }

    // one shared partition over the sorted filenames
    const std::size_t n = raw.filenames.size();
    std::vector<std::size_t> idx(n);
    for (std::size_t i = 0; i < n; ++i) idx[i] = i;
    SplitSpec spec = cfg.split;
    spec.seed = (std::uint64_t)opt.seed;
    spec.validate();
    {
        rng::SplitMix shuffle_rng(spec.seed);
        for (std::size_t i = n; i > 1; --i)
            std::swap(idx[i - 1], idx[shuffle_rng.next_below(i)]);
    }
    auto n_train = (std::size_t)std::clamp(
        std::ceil(spec.train_frac * (double)n - 1e-9), 0.0, (double)n);
    if (n_train == 0 || n_train == n) {
        err << "split leaves an empty train or test side (n=" << n << ")\n";
        return kExitUsage;
    }

    auto take = [&](const Corpus& c, bool train_side) {
        std::vector<GrayImage> imgs;
        std::vector<int> labels;
        for (std::size_t i = train_side ? 0 : n_train; i < (train_side ? n_train : n);
             ++i) {
            imgs.push_back(c.images[idx[i]]);
            labels.push_back(c.labels[idx[i]]);
        }
        return std::make_pair(features_of(imgs), std::move(labels));
    };

    BenchReport report;
    report.config_hash = config_hash(cfg);
    {
        std::vector<std::string> test_names;
        for (std::size_t i = n_train; i < n; ++i)
            test_names.push_back(raw.filenames[idx[i]]);
        std::sort(test_names.begin(), test_names.end());
        std::string joined;
        for (const std::string& s : test_names) joined += s + "\n";
        report.test_set_hash = fnv1a_hex(joined);
    }

    try {
        for (ModelKind kind : kinds) {
            for (const char* pathway : {"raw", "preprocessed"}) {
                const Corpus& c = std::string(pathway) == "raw" ? raw : prep;
                auto [Xtr, ytr] = take(c, true);
                auto [Xte, yte] = take(c, false);
                Model model = fit_model(kind, Xtr, ytr, cfg.learners);
                Metrics m = evaluate(model, Xte, yte);
                report.rows.push_back({model_kind_name(kind), pathway, m.accuracy,
                                       m.fit_seconds, m.predict_seconds,
                                       (int)n_train, (int)(n - n_train)});
            }
        }
    } catch (const Error& e) {
        err << "bench failed: " << e.what() << "\n";
        return kExitUsage;
    }

    try {
        fs::create_directories(opt.out_dir);
        std::ofstream csv(fs::path(opt.out_dir) / "report.csv", std::ios::binary);
        std::ofstream txt(fs::path(opt.out_dir) / "report.txt", std::ios::binary);
        if (!csv || !txt) throw FileNotFound("cannot write report files");
        csv << bench_csv(report);
        txt << bench_table(report);
    } catch (const Error& e) {
        err << "cannot write report: " << e.what() << "\n";
        return kExitUsage;
    }

    out << bench_table(report);
    return kExitOk;
}

std::string bench_csv(const BenchReport& report) {
    std::ostringstream out;
    out << "# schema=1\n"
        << "# config_hash=" << report.config_hash << "\n"
        << "# test_set_hash=" << report.test_set_hash << "\n"
        << "model,pathway,accuracy,fit_seconds,predict_seconds,n_train,n_test,"
           "config_hash\n";
    for (const BenchRow& r : report.rows)
        out << r.model << "," << r.pathway << "," << fmt(r.accuracy) << ","
            << fmt(r.fit_seconds) << "," << fmt(r.predict_seconds) << ","
            << r.n_train << "," << r.n_test << "," << report.config_hash << "\n";
    return out.str();
}

std::string bench_table(const BenchReport& report) {
    auto find_row = [&](const std::string& model,
                        const char* pathway) -> const BenchRow* {
        for (const BenchRow& r : report.rows)
            if (r.model == model && r.pathway == pathway) return &r;
        return nullptr;
    };
    std::vector<std::string> order = {"knn", "knn_pca", "logreg", "logreg_pca",
                                      "tree"};
    std::ostringstream out;
    char line[160];

    out << "Accuracy by pathway\n";
    std::snprintf(line, sizeof line, "  %-12s %12s %14s\n", "model", "raw",
                  "preprocessed");
    out << line;
    for (const std::string& m : order) {
        const BenchRow* r = find_row(m, "raw");
        const BenchRow* p = find_row(m, "preprocessed");
        if (!r && !p) continue;
        std::snprintf(line, sizeof line, "  %-12s %12s %14s\n", m.c_str(),
                      r ? fmt(r->accuracy).c_str() : "-",
                      p ? fmt(p->accuracy).c_str() : "-");
        out << line;
    }
    for (const char* m : kUnimplemented) {
        std::snprintf(line, sizeof line, "  %-12s %27s\n", m, "not implemented");
        out << line;
    }

    out << "\nComputational cost (seconds)\n";
    std::snprintf(line, sizeof line, "  %-12s %12s %12s %12s %12s\n", "model",
                  "fit raw", "fit prep", "pred raw", "pred prep");
    out << line;
    for (const std::string& m : order) {
        const BenchRow* r = find_row(m, "raw");
        const BenchRow* p = find_row(m, "preprocessed");
        if (!r && !p) continue;
        std::snprintf(line, sizeof line, "  %-12s %12s %12s %12s %12s\n", m.c_str(),
                      r ? fmt(r->fit_seconds).c_str() : "-",
                      p ? fmt(p->fit_seconds).c_str() : "-",
                      r ? fmt(r->predict_seconds).c_str() : "-",
                      p ? fmt(p->predict_seconds).c_str() : "-");
        out << line;
    }
    for (const char* m : kUnimplemented) {
        std::snprintf(line, sizeof line, "  %-12s %51s\n", m, "not implemented");
        out << line;
    }

    if (!report.rows.empty()) {
        const BenchRow& r0 = report.rows.front();
        out << "\n" << r0.n_train << " train / " << r0.n_test
            << " test, config " << report.config_hash << ", test set "
            << report.test_set_hash << "\n";
    }
    return out.str();
}

}  // namespace numprep
