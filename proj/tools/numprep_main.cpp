// numprep — command line front end for the digit pre-processing toolkit.
//
// Subcommands:
//   prep    clean a labeled corpus through the full pipeline
//   synth   generate a synthetic corrupted corpus
//   split   shuffle a corpus into train/test directories
//   train   fit a classifier on a corpus and save it
//   eval    evaluate a saved model on a corpus
//   bench   fit every requested model on raw and preprocessed corpora

#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "numprep/commands.hpp"

int main(int argc, char** argv) {
    CLI::App app{"handwritten digit pre-processing and classification toolkit",
                 "numprep"};
    app.require_subcommand(1);

    numprep::PrepOptions prep;
    numprep::SynthOptions synth;
    numprep::SplitOptions split;
    numprep::TrainOptions train;
    numprep::EvalOptions eval;
    numprep::BenchOptions bench;

    CLI::App* c_prep = app.add_subcommand("prep", "preprocess a labeled corpus");
    c_prep->add_option("--in", prep.in_dir, "input corpus directory")->required();
    c_prep->add_option("--csv", prep.csv_path, "labels csv (default <in>/labels.csv)");
    c_prep->add_option("--out", prep.out_dir, "output directory")->required();
    c_prep->add_option("--config", prep.config_path, "key=value config file");
    c_prep->add_flag("--trace", prep.trace, "dump per-stage images for each input");
    c_prep->add_flag("--raw", prep.raw,
                     "baseline pathway: resize and grayscale only");

    CLI::App* c_synth = app.add_subcommand("synth", "generate a synthetic corpus");
    c_synth->add_option("--out", synth.out_dir, "output directory")->required();
    c_synth->add_option("--config", synth.config_path, "key=value config file");
    c_synth->add_option("--count", synth.count, "number of images (overrides config)");
    c_synth->add_option("--seed", synth.seed, "generator seed (overrides config)");

    CLI::App* c_split = app.add_subcommand("split", "split a corpus into train/test");
    c_split->add_option("--in", split.in_dir, "input corpus directory")->required();
    c_split->add_option("--csv", split.csv_path, "labels csv (default <in>/labels.csv)");
    c_split->add_option("--out", split.out_dir, "output directory")->required();
    c_split->add_option("--config", split.config_path, "key=value config file");
    c_split->add_option("--seed", split.seed, "shuffle seed");

    CLI::App* c_train = app.add_subcommand("train", "fit a model and save it");
    c_train->add_option("--model", train.model,
                        "knn | logreg | tree | knn_pca | logreg_pca")
        ->required();
    c_train->add_option("--in", train.in_dir, "training corpus directory")->required();
    c_train->add_option("--csv", train.csv_path, "labels csv (default <in>/labels.csv)");
    c_train->add_option("--out", train.out_path, "model file to write")->required();
    c_train->add_option("--config", train.config_path, "key=value config file");

    CLI::App* c_eval = app.add_subcommand("eval", "evaluate a saved model");
    c_eval->add_option("--model-file", eval.model_path, "saved model file")->required();
    c_eval->add_option("--in", eval.in_dir, "evaluation corpus directory")->required();
    c_eval->add_option("--csv", eval.csv_path, "labels csv (default <in>/labels.csv)");

    CLI::App* c_bench = app.add_subcommand(
        "bench", "compare models across raw and preprocessed pathways");
    c_bench->add_option("--raw", bench.raw_dir, "raw corpus directory")->required();
    c_bench->add_option("--prep", bench.prep_dir, "preprocessed corpus directory")
        ->required();
    c_bench->add_option("--out", bench.out_dir, "report output directory")->required();
    c_bench->add_option("--config", bench.config_path, "key=value config file");
    c_bench->add_option("--models", bench.models, "comma separated model list");
    c_bench->add_option("--seed", bench.seed, "partition shuffle seed");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        // --help and friends exit 0 through CLI11; any real parse failure maps
        // onto the usage exit code.
        int code = app.exit(e);
        return code == 0 ? numprep::kExitOk : numprep::kExitUsage;
    }

    if (c_prep->parsed()) return numprep::cmd_prep(prep, std::cout, std::cerr);
    if (c_synth->parsed()) return numprep::cmd_synth(synth, std::cout, std::cerr);
    if (c_split->parsed()) return numprep::cmd_split(split, std::cout, std::cerr);
    if (c_train->parsed()) return numprep::cmd_train(train, std::cout, std::cerr);
    if (c_eval->parsed()) return numprep::cmd_eval(eval, std::cout, std::cerr);
    if (c_bench->parsed()) return numprep::cmd_bench(bench, std::cout, std::cerr);
    return numprep::kExitUsage;
}
