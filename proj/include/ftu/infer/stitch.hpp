#pragma once

#include <algorithm>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

#include "ftu/core/geometry.hpp"
#include "ftu/infer/predictor.hpp"
#include "ftu/infer/tiles.hpp"

namespace ftu::infer {

struct StitchOptions {
    std::size_t threads = 1;
    std::size_t batch = 4;  // tiles per predictor call
};

/// Runs `fn(i)` for i in [0, n) on up to `threads` workers; rethrows the first
/// exception (lowest index) after all workers finish.
template <typename F>
void parallel_for(std::size_t n, std::size_t threads, F&& fn) {
    threads = std::max<std::size_t>(1, std::min(threads, n));
    if (threads == 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::vector<std::exception_ptr> errors(n);
    {
        std::vector<std::jthread> pool;
        pool.reserve(threads);
        for (std::size_t t = 0; t < threads; ++t) {
            pool.emplace_back([&, t] {
                for (std::size_t i = t; i < n; i += threads) {
                    try {
                        fn(i);
                    } catch (...) {
                        errors[i] = std::current_exception();
                    }
                }
            });
        }
    }
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

/// Sliding-window prediction. Each canvas pixel is the mean of the window
/// predictions covering it. Tiles are predicted in waves (concurrently when
/// threads > 1) but always accumulated in canonical grid order into a 64-bit
/// buffer, so the result does not depend on the thread count.
inline ProbMap predict_sliding(const ByteImage& image, const Predictor& predictor, const TileGrid& grid,
                               const StitchOptions& options = {}) {
    if (!image.same_shape(grid.image_width, grid.image_height)) {
        throw ContractError("tile grid was planned for a different image size");
    }
    const ByteImage canvas =
        grid.padded() ? pad_reflect(image, grid.padded_width, grid.padded_height) : image;
    const std::size_t cw = grid.padded_width;
    const std::vector<TileOffset> offsets = grid.offsets();
    std::vector<double> sum(cw * grid.padded_height, 0.0);

    const std::size_t batch = std::max<std::size_t>(1, options.batch);
    const std::size_t workers = std::max<std::size_t>(1, options.threads);
    const std::size_t wave = batch * workers;

    for (std::size_t begin = 0; begin < offsets.size(); begin += wave) {
        const std::size_t end = std::min(offsets.size(), begin + wave);
        std::vector<ByteImage> tiles;
        tiles.reserve(end - begin);
        for (std::size_t i = begin; i < end; ++i) {
            tiles.push_back(crop(canvas, offsets[i].x, offsets[i].y, grid.window, grid.window));
        }
        std::vector<ProbMap> preds(tiles.size());
        const std::size_t chunks = (tiles.size() + batch - 1) / batch;
        parallel_for(chunks, workers, [&](std::size_t c) {
            const std::size_t lo = c * batch;
            const std::size_t hi = std::min(tiles.size(), lo + batch);
            auto out = predictor.predict_batch(std::span<const ByteImage>(tiles.data() + lo, hi - lo));
            if (out.size() != hi - lo) throw ContractError(predictor.name() + ": wrong batch size returned");
            for (std::size_t k = 0; k < out.size(); ++k) preds[lo + k] = std::move(out[k]);
        });
        for (std::size_t k = 0; k < preds.size(); ++k) {
            const ProbMap& p = preds[k];
            if (!p.same_shape(grid.window, grid.window)) {
                throw ContractError(predictor.name() + ": predicted " + std::to_string(p.width()) + "x" +
                                    std::to_string(p.height()) + " for a " + std::to_string(grid.window) +
                                    " window");
            }
            const TileOffset o = offsets[begin + k];
            for (std::size_t y = 0; y < grid.window; ++y) {
                double* row = sum.data() + (o.y + y) * cw + o.x;
                for (std::size_t x = 0; x < grid.window; ++x) row[x] += p(x, y);
            }
        }
    }

    const std::vector<std::uint32_t> counts = cover_counts(grid);
    std::vector<float> out(grid.image_width * grid.image_height);
    for (std::size_t y = 0; y < grid.image_height; ++y)
        for (std::size_t x = 0; x < grid.image_width; ++x) {
            const std::size_t i = y * cw + x;
            out[y * grid.image_width + x] = static_cast<float>(sum[i] / counts[i]);
        }
    return ProbMap(grid.image_width, grid.image_height, 1, std::move(out));
}

} // namespace ftu::infer
