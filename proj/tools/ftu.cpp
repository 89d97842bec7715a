#include <CLI11.hpp>

#include <iostream>
#include <optional>
#include <string>

#include "ftu/pipeline/commands.hpp"

namespace {

int run(int argc, char** argv) {
    CLI::App app{"Functional tissue unit segmentation pipeline"};
    app.require_subcommand(1);

    std::string config_path;
    std::size_t threads = 1;
    std::optional<std::uint64_t> seed;
    auto common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "Pipeline JSON config")->required()->check(CLI::ExistingFile);
        sub->add_option("--threads", threads, "Worker threads (results do not depend on it)")
            ->check(CLI::PositiveNumber);
        sub->add_option("--seed", seed, "Override the config seed");
    };

    std::string manifest, out, predictions, truth, folds_in;
    std::size_t k = 5;
    int round = 1;

    auto* prepare = app.add_subcommand("prepare", "Rescale (and histogram-match) a labeled dataset");
    common(prepare);
    prepare->add_option("--manifest", manifest, "Input manifest CSV")->required();
    prepare->add_option("--out", out, "Output directory")->required();

    auto* infer = app.add_subcommand("infer", "Ensemble inference with sliding windows and TTA");
    common(infer);
    infer->add_option("--manifest", manifest, "Input manifest CSV")->required();
    infer->add_option("--out", out, "Output directory")->required();

    auto* pseudo = app.add_subcommand("pseudo-label", "Label an unlabeled pool with the configured ensemble");
    common(pseudo);
    pseudo->add_option("--manifest", manifest, "Pool manifest CSV")->required();
    pseudo->add_option("--out", out, "Output directory")->required();
    pseudo->add_option("--round", round, "Pseudo-labeling round index");

    auto* evaluate = app.add_subcommand("evaluate", "Mean Dice per organ");
    common(evaluate);
    evaluate->add_option("--predictions", predictions, "Submission CSV (id,rle)")->required();
    evaluate->add_option("--truth", truth, "Ground-truth manifest CSV")->required();
    evaluate->add_option("--folds", folds_in, "Optional folds CSV (id,fold)");
    evaluate->add_option("--out", out, "Report CSV")->required();

    auto* folds = app.add_subcommand("folds", "Organ-stratified k-fold assignment");
    common(folds);
    folds->add_option("--manifest", manifest, "Manifest CSV")->required();
    folds->add_option("-k,--k", k, "Number of folds");
    folds->add_option("--out", out, "Folds CSV")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    ftu::pipeline::PipelineConfig cfg = ftu::pipeline::load_config(config_path);
    if (seed) cfg.seed = *seed;
    const ftu::pipeline::CommandOptions opt{threads};

    if (prepare->parsed()) {
        ftu::pipeline::cmd_prepare(cfg, manifest, out, opt);
    } else if (infer->parsed()) {
        ftu::pipeline::cmd_infer(cfg, manifest, out, opt);
    } else if (pseudo->parsed()) {
        ftu::pipeline::cmd_pseudo_label(cfg, manifest, out, round, opt);
    } else if (evaluate->parsed()) {
        std::optional<std::filesystem::path> f;
        if (!folds_in.empty()) f = folds_in;
        ftu::pipeline::cmd_evaluate(cfg, predictions, truth, f, out);
    } else if (folds->parsed()) {
        ftu::pipeline::cmd_folds(cfg, manifest, k, out);
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const ftu::Error& e) {
        std::cerr << "ftu: " << e.what() << '\n';
        return e.exit_code();
    } catch (const std::filesystem::filesystem_error& e) {
        std::cerr << "ftu: " << e.what() << '\n';
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "ftu: " << e.what() << '\n';
        return 1;
    }
}
