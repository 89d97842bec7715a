#pragma once

#include <unistd.h>

#include <algorithm>
#include <filesystem>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include "ftu/color.hpp"
#include "ftu/core/png_io.hpp"
#include "ftu/core/probmap_io.hpp"
#include "ftu/core/rle.hpp"
#include "ftu/eval/folds.hpp"
#include "ftu/eval/metrics.hpp"
#include "ftu/infer/external.hpp"
#include "ftu/infer/pseudo.hpp"
#include "ftu/infer/stack.hpp"
#include "ftu/pipeline/config.hpp"
#include "ftu/pipeline/csv.hpp"
#include "ftu/pipeline/manifest.hpp"
#include "ftu/post.hpp"
#include "ftu/scale.hpp"

namespace ftu::pipeline {

namespace fs = std::filesystem;

/// Files are written to a hidden sibling directory and moved into the real
/// output directory only by commit(); an abandoned stage is deleted, so a
/// failed command leaves the destination as it was.
class StagedOutput {
public:
    explicit StagedOutput(fs::path destination) : destination_(std::move(destination)) {
        const fs::path parent = destination_.has_parent_path() ? destination_.parent_path() : fs::path(".");
        staging_ = parent / ("." + destination_.filename().string() + ".staging-" + std::to_string(::getpid()));
        fs::remove_all(staging_);
        fs::create_directories(staging_);
    }
    ~StagedOutput() {
        std::error_code ec;
        if (!committed_) fs::remove_all(staging_, ec);
    }
    StagedOutput(const StagedOutput&) = delete;
    StagedOutput& operator=(const StagedOutput&) = delete;

    fs::path path(const std::string& name) const { return staging_ / name; }

    void commit() {
        fs::create_directories(destination_);
        for (const auto& entry : fs::directory_iterator(staging_)) {
            fs::rename(entry.path(), destination_ / entry.path().filename());
        }
        fs::remove_all(staging_);
        committed_ = true;
    }

private:
    fs::path destination_;
    fs::path staging_;
    bool committed_ = false;
};

/// Single output file written via a temporary sibling and renamed into place.
inline void write_file_atomically(const fs::path& path, const std::string& text) {
    const fs::path tmp = path.string() + ".tmp-" + std::to_string(::getpid());
    write_text(tmp, text);
    fs::rename(tmp, path);
}

inline std::vector<infer::Member> build_members(const InferenceConfig& cfg) {
    std::vector<infer::Member> members;
    for (const MemberConfig& m : cfg.members) {
        infer::PredictorPtr p = m.predictor.empty()
                                    ? std::make_shared<infer::ExternalPredictor>(m.command, m.id)
                                    : infer::make_reference_predictor(m.predictor);
        members.push_back({m.id, std::move(p), m.weight});
    }
    return members;
}

inline infer::WindowSettings window_settings(const InferenceConfig& cfg) {
    infer::WindowSettings s;
    s.window = cfg.window;
    s.overlap = cfg.overlap;
    s.tta = cfg.tta;
    s.stitch.batch = cfg.batch;
    s.stitch.threads = 1;
    return s;
}

inline ReferencePool load_reference_pool(const fs::path& dir) {
    ReferencePool pool;
    if (dir.empty()) return pool;
    if (!fs::is_directory(dir)) throw ConfigError("color.reference_dir is not a directory: " + dir.string());
    std::vector<fs::path> files;
    for (const auto& e : fs::directory_iterator(dir))
        if (e.is_regular_file() && e.path().extension() == ".png") files.push_back(e.path());
    std::sort(files.begin(), files.end());
    for (const auto& f : files) pool.add(f.stem().string(), read_png(f));
    return pool;
}

struct PredictionResult {
    ProbMap prob;       // working resolution
    BinaryMask mask;    // native resolution
    double factor = 1.0;
};

/// Inference-time scaling, ensemble prediction, post-processing, and mask
/// resampling back to the native frame.
inline PredictionResult predict_sample(const ByteImage& image, const SampleMeta& meta,
                                       const std::vector<infer::Member>& members, const PipelineConfig& cfg) {
    PredictionResult r;
    r.factor = effective_scale(meta.organ, meta.source, cfg.scale);
    const ByteImage work = resize_image(image, r.factor);
    r.prob = infer::predict_ensemble(work, members, window_settings(cfg.inference));
    r.mask = resize_nearest(postprocess(r.prob, meta.organ, cfg.post), image.width(), image.height());
    return r;
}

struct CommandOptions {
    std::size_t threads = 1;
};

// --- prepare ---------------------------------------------------------------

/// Rescales every manifest sample to training resolution and optionally adds a
/// histogram-matched variant. Writes `<id>.png`, `<id>_mask.png`,
/// `<id>_matched.png` and `manifest.csv` into `out_dir`.
inline void cmd_prepare(const PipelineConfig& cfg, const fs::path& manifest_path, const fs::path& out_dir,
                        const CommandOptions& opt) {
    const Manifest manifest = read_manifest(manifest_path);
    const ReferencePool pool = load_reference_pool(cfg.color.reference_dir);
    StagedOutput out(out_dir);
    const SeededRng root(cfg.seed);

    std::vector<std::vector<std::string>> rows(manifest.entries.size());
    infer::parallel_for(manifest.entries.size(), opt.threads, [&](std::size_t i) {
        const augment::SampleEntry& e = manifest.entries[i];
        const ByteImage image = load_image(manifest, e);
        const BinaryMask mask = load_mask(manifest, e);
        const PreparedSample p = prepare_sample(image, mask, e.meta, cfg.scale);
        write_png(p.image, out.path(e.meta.id + ".png"));
        write_mask_png(p.mask, out.path(e.meta.id + "_mask.png"));

        std::string matched_path, reference_id;
        if (!pool.empty()) {
            SeededRng rng = root.split(e.meta.id).split("histogram-match");
            MatchResult m = maybe_histogram_match(p.image, pool, cfg.color.match_probability, rng);
            if (m.reference_id) {
                matched_path = e.meta.id + "_matched.png";
                reference_id = *m.reference_id;
                write_png(m.image, out.path(matched_path));
            }
        }
        rows[i] = {e.meta.id,
                   std::string(to_string(e.meta.source)),
                   std::string(to_string(e.meta.organ)),
                   format_number(e.meta.pixel_size * p.factor),
                   std::to_string(p.image.width()),
                   std::to_string(p.image.height()),
                   e.meta.id + ".png",
                   e.meta.id + "_mask.png",
                   format_number(p.factor),
                   matched_path,
                   reference_id};
    });

    CsvTable t;
    t.header = {"id", "source", "organ", "pixel_size", "width", "height", "image_path", "mask",
                "scale_factor", "matched_image_path", "reference_id"};
    t.rows = std::move(rows);
    write_text(out.path("manifest.csv"), format_csv(t));
    out.commit();
}

// --- infer -----------------------------------------------------------------

/// Writes `<id>.pmap`, `<id>.png` (mask) and `submission.csv` into `out_dir`.
inline void cmd_infer(const PipelineConfig& cfg, const fs::path& manifest_path, const fs::path& out_dir,
                      const CommandOptions& opt) {
    if (cfg.inference.members.empty()) throw ConfigError("inference.members: at least one member is required");
    const Manifest manifest = read_manifest(manifest_path);
    const std::vector<infer::Member> members = build_members(cfg.inference);
    StagedOutput out(out_dir);

    std::vector<std::string> lines(manifest.entries.size());
    infer::parallel_for(manifest.entries.size(), opt.threads, [&](std::size_t i) {
        const augment::SampleEntry& e = manifest.entries[i];
        const ByteImage image = load_image(manifest, e);
        PredictionResult r;
        try {
            r = predict_sample(image, e.meta, members, cfg);
        } catch (const PredictorError& err) {
            throw PredictorError("sample " + e.meta.id + ": " + err.what());
        }
        if (cfg.io.write_probmaps) write_probmap(r.prob, out.path(e.meta.id + ".pmap"));
        if (cfg.io.write_png) write_mask_png(r.mask, out.path(e.meta.id + ".png"));
        lines[i] = rle_line(e.meta.id, rle_encode(r.mask));
    });

    std::string submission = "id,rle\n";
    for (const auto& l : lines) submission += l + "\n";
    write_text(out.path("submission.csv"), submission);
    out.commit();
}

// --- pseudo-label ----------------------------------------------------------

/// Labels an unlabeled pool; writes `<id>_pseudo.png` and
/// `pseudo_manifest.csv` (manifest columns plus `round` and `empty`).
inline void cmd_pseudo_label(const PipelineConfig& cfg, const fs::path& manifest_path, const fs::path& out_dir,
                             int round, const CommandOptions& opt) {
    if (cfg.inference.members.empty()) throw ConfigError("inference.members: at least one member is required");
    const Manifest manifest = read_manifest(manifest_path);
    const std::vector<infer::Member> members = build_members(cfg.inference);
    StagedOutput out(out_dir);

    const infer::SamplePredictFn predict = [&](const ByteImage& img, const SampleMeta& meta) {
        const double f = effective_scale(meta.organ, meta.source, cfg.scale);
        return infer::predict_ensemble(resize_image(img, f), members, window_settings(cfg.inference));
    };

    std::vector<std::vector<std::string>> rows(manifest.entries.size());
    infer::parallel_for(manifest.entries.size(), opt.threads, [&](std::size_t i) {
        const augment::SampleEntry& e = manifest.entries[i];
        std::vector<infer::PoolSample> one{{e.meta, load_image(manifest, e)}};
        const auto labeled = infer::pseudo_label(one, predict, cfg.post, round);
        const infer::PseudoLabeled& p = labeled.front();
        const std::string mask_name = e.meta.id + "_pseudo.png";
        write_mask_png(p.mask, out.path(mask_name));
        rows[i] = {e.meta.id,
                   std::string(to_string(e.meta.source)),
                   std::string(to_string(e.meta.organ)),
                   format_number(e.meta.pixel_size),
                   std::to_string(p.mask.width()),
                   std::to_string(p.mask.height()),
                   manifest.resolve(e.image_path).string(),
                   mask_name,
                   std::to_string(p.round),
                   p.empty ? "1" : "0"};
    });

    CsvTable t;
    t.header = {"id", "source", "organ", "pixel_size", "width", "height", "image_path", "mask", "round", "empty"};
    t.rows = std::move(rows);
    write_text(out.path("pseudo_manifest.csv"), format_csv(t));
    out.commit();
}

// --- folds -----------------------------------------------------------------

inline std::string folds_csv(const eval::FoldAssignment& f) {
    std::string s = "id,fold\n";
    for (std::size_t i = 0; i < f.ids.size(); ++i) s += f.ids[i] + "," + std::to_string(f.folds[i]) + "\n";
    return s;
}

inline void cmd_folds(const PipelineConfig& cfg, const fs::path& manifest_path, std::size_t k,
                      const fs::path& out_path) {
    const Manifest manifest = read_manifest(manifest_path);
    std::vector<SampleMeta> metas;
    for (const auto& e : manifest.entries) metas.push_back(e.meta);
    write_file_atomically(out_path, folds_csv(eval::stratified_kfold(metas, k, cfg.seed)));
}

// --- evaluate --------------------------------------------------------------

struct EvaluationInput {
    std::vector<std::string> ids;
    std::vector<Organ> organs;
    std::vector<double> scores;
};

/// Per-organ and overall mean Dice as CSV `organ,n_samples,mean_dice`. With a
/// folds table, rows `fold:<k>` follow.
inline std::string evaluation_report(const EvaluationInput& in, const std::map<std::string, std::size_t>* folds) {
    std::string s = "organ,n_samples,mean_dice\n";
    for (const auto& row : eval::organ_report(in.organs, in.scores)) {
        s += row.group + "," + std::to_string(row.n_samples) + "," + format_number(row.mean_dice) + "\n";
    }
    if (folds) {
        std::map<std::size_t, std::vector<double>> by_fold;
        for (std::size_t i = 0; i < in.ids.size(); ++i) by_fold[folds->at(in.ids[i])].push_back(in.scores[i]);
        for (const auto& [fold, scores] : by_fold) {
            s += "fold:" + std::to_string(fold) + "," + std::to_string(scores.size()) + "," +
                 format_number(eval::mean_of(scores)) + "\n";
        }
    }
    return s;
}

inline void cmd_evaluate(const PipelineConfig&, const fs::path& predictions_path, const fs::path& truth_path,
                         const std::optional<fs::path>& folds_path, const fs::path& out_path) {
    const CsvTable preds = read_csv(predictions_path);
    preds.require({"id", "rle"}, predictions_path.string());
    const Manifest truth = read_manifest(truth_path);

    std::map<std::string, std::string> pred_rle;
    for (const auto& row : preds.rows) {
        if (!pred_rle.emplace(row[preds.column("id")], row[preds.column("rle")]).second) {
            throw DataError("duplicate prediction id '" + row[preds.column("id")] + "'");
        }
    }
    std::set<std::string> truth_ids;
    for (const auto& e : truth.entries) truth_ids.insert(e.meta.id);
    std::string missing, extra;
    for (const auto& id : truth_ids)
        if (!pred_rle.contains(id)) missing += " " + id;
    for (const auto& [id, _] : pred_rle)
        if (!truth_ids.contains(id)) extra += " " + id;
    if (!missing.empty() || !extra.empty()) {
        throw DataError("id mismatch; without prediction:" + (missing.empty() ? std::string(" none") : missing) +
                        "; without truth:" + (extra.empty() ? std::string(" none") : extra));
    }

    std::optional<std::map<std::string, std::size_t>> folds;
    if (folds_path) {
        const CsvTable ft = read_csv(*folds_path);
        ft.require({"id", "fold"}, folds_path->string());
        folds.emplace();
        for (const auto& row : ft.rows) {
            (*folds)[row[ft.column("id")]] = parse_size(row[ft.column("fold")], folds_path->string());
        }
        for (const auto& id : truth_ids)
            if (!folds->contains(id)) throw DataError("no fold for id '" + id + "'");
    }

    EvaluationInput in;
    for (const auto& e : truth.entries) {
        const BinaryMask t = load_mask(truth, e);
        BinaryMask p;
        try {
            p = rle_decode(rle_from_text(pred_rle.at(e.meta.id)), t.width(), t.height());
        } catch (const FormatError& err) {
            throw FormatError("prediction " + e.meta.id + ": " + err.what());
        }
        in.ids.push_back(e.meta.id);
        in.organs.push_back(e.meta.organ);
        in.scores.push_back(eval::dice(p, t));
    }
    write_file_atomically(out_path, evaluation_report(in, folds ? &*folds : nullptr));
}

} // namespace ftu::pipeline
