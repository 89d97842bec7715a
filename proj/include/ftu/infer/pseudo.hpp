#pragma once

#include <functional>
#include <string>
#include <vector>

#include "ftu/core/errors.hpp"
#include "ftu/core/meta.hpp"
#include "ftu/core/raster.hpp"
#include "ftu/post.hpp"
#include "ftu/scale.hpp"

namespace ftu::infer {

struct PoolSample {
    SampleMeta meta;
    ByteImage image;
};

struct PseudoLabeled {
    SampleMeta meta;
    BinaryMask mask;
    int round = 0;
    bool empty = true;
};

/// Full prediction stack for one sample (scaling, windows, TTA, ensemble).
/// May return a map at a working resolution other than the image's.
using SamplePredictFn = std::function<ProbMap(const ByteImage&, const SampleMeta&)>;

/// Labels every pool image with postprocess(predict(image)), brought back to
/// the image's own dimensions with nearest sampling. `round` is
/// recorded so repeated labeling passes can be told apart.
inline std::vector<PseudoLabeled> pseudo_label(const std::vector<PoolSample>& pool, const SamplePredictFn& predict,
                                               const OrganPostConfig& post, int round) {
    std::vector<PseudoLabeled> out;
    out.reserve(pool.size());
    for (const PoolSample& s : pool) {
        ProbMap prob;
        try {
            prob = predict(s.image, s.meta);
        } catch (const PredictorError& e) {
            throw PredictorError("sample " + s.meta.id + ": " + e.what());
        } catch (const Error& e) {
            throw DataError("sample " + s.meta.id + ": " + e.what());
        }
        BinaryMask mask = resize_nearest(postprocess(prob, s.meta.organ, post), s.image.width(),
                                         s.image.height());
        const bool empty = foreground_count(mask) == 0;
        out.push_back({s.meta, std::move(mask), round, empty});
    }
    return out;
}

} // namespace ftu::infer
