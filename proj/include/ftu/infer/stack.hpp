#pragma once

#include <string>
#include <vector>

#include "ftu/infer/ensemble.hpp"
#include "ftu/infer/predictor.hpp"
#include "ftu/infer/stitch.hpp"
#include "ftu/infer/tiles.hpp"
#include "ftu/infer/tta.hpp"

namespace ftu::infer {

struct WindowSettings {
    std::size_t window = 1024;  // 0: whole image in a single predictor call
    double overlap = 0.75;
    bool tta = true;
    StitchOptions stitch;
};

struct Member {
    std::string id;
    PredictorPtr predictor;
    double weight = 1.0;
};

/// One member's map: sliding window (or whole image), optionally under flip TTA.
inline ProbMap predict_member(const ByteImage& image, const Predictor& predictor, const WindowSettings& s) {
    const PredictFn plain = [&](const ByteImage& img) -> ProbMap {
        if (s.window == 0) {
            ProbMap p = predictor.predict(img);
            if (!p.same_shape(img)) throw ContractError(predictor.name() + ": output dims differ from input");
            return p;
        }
        return predict_sliding(img, predictor, plan_tiles(img.width(), img.height(), s.window, s.overlap),
                               s.stitch);
    };
    return s.tta ? tta_predict(image, plain) : plain(image);
}

/// TTA is averaged per member first, then members are ensembled.
inline ProbMap predict_ensemble(const ByteImage& image, const std::vector<Member>& members,
                                const WindowSettings& s) {
    if (members.empty()) throw ConfigError("no ensemble members configured");
    std::vector<ProbMap> maps;
    std::vector<double> weights;
    maps.reserve(members.size());
    for (const Member& m : members) {
        try {
            maps.push_back(predict_member(image, *m.predictor, s));
        } catch (const PredictorError& e) {
            throw PredictorError("member '" + m.id + "': " + e.what());
        }
        weights.push_back(m.weight);
    }
    return ensemble(maps, weights);
}

} // namespace ftu::infer
