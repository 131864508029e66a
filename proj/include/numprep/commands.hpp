#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "numprep/config.hpp"

namespace numprep {

// Exit codes shared by every command.
inline constexpr int kExitOk = 0;       // everything succeeded
inline constexpr int kExitPartial = 1;  // ran, but some items were skipped/failed
inline constexpr int kExitUsage = 2;    // bad flags, config, or inputs

struct PrepOptions {
    std::string in_dir;        // corpus root: labels.csv + images/
    std::string csv_path;      // defaults to <in_dir>/labels.csv
    std::string out_dir;
    std::string config_path;   // optional
    bool trace = false;        // dump per-stage snapshots
    bool raw = false;          // resize+grayscale baseline instead of cleaning
};

struct SynthOptions {
    std::string out_dir;
    std::string config_path;
    int count = -1;            // <0: take from config
    long long seed = -1;       // <0: take from config
};

struct SplitOptions {
    std::string in_dir;
    std::string csv_path;
    std::string out_dir;
    std::string config_path;
    long long seed = 0;
};

struct TrainOptions {
    std::string model;         // knn | logreg | tree | knn_pca | logreg_pca
    std::string in_dir;
    std::string csv_path;
    std::string out_path;      // model file
    std::string config_path;
};

struct EvalOptions {
    std::string model_path;
    std::string in_dir;
    std::string csv_path;
};

struct BenchOptions {
    std::string raw_dir;       // raw-pathway corpus root
    std::string prep_dir;      // preprocessed-pathway corpus root
    std::string out_dir;
    std::string config_path;
    std::string models = "knn,logreg,tree,knn_pca,logreg_pca";
    long long seed = 0;
};

struct BenchRow {
    std::string model;
    std::string pathway;  // "raw" or "preprocessed"
    double accuracy = 0;
    double fit_seconds = 0;
    double predict_seconds = 0;
    int n_train = 0;
    int n_test = 0;
};

struct BenchReport {
    std::vector<BenchRow> rows;
    std::string config_hash;
    std::string test_set_hash;  // hash of the sorted test filenames
};

int cmd_prep(const PrepOptions& opt, std::ostream& out, std::ostream& err);
int cmd_synth(const SynthOptions& opt, std::ostream& out, std::ostream& err);
int cmd_split(const SplitOptions& opt, std::ostream& out, std::ostream& err);
int cmd_train(const TrainOptions& opt, std::ostream& out, std::ostream& err);
int cmd_eval(const EvalOptions& opt, std::ostream& out, std::ostream& err);
int cmd_bench(const BenchOptions& opt, std::ostream& out, std::ostream& err);

/// Renders the human-readable comparison table: an accuracy section and a
/// timing section, one line per model including the out-of-scope ones
/// marked "not implemented".
std::string bench_table(const BenchReport& report);

/// Serializes the report in the frozen CSV schema (schema=1).
std::string bench_csv(const BenchReport& report);

}  // namespace numprep
