#pragma once

#include "ftu/core/errors.hpp"
#include "ftu/core/geometry.hpp"
#include "ftu/core/meta.hpp"
#include "ftu/core/png_io.hpp"
#include "ftu/core/probmap_io.hpp"
#include "ftu/core/raster.hpp"
#include "ftu/core/rle.hpp"
#include "ftu/core/rng.hpp"

#include "ftu/color.hpp"
#include "ftu/post.hpp"
#include "ftu/scale.hpp"

#include "ftu/augment/cutmix.hpp"
#include "ftu/augment/dataset.hpp"
#include "ftu/augment/geometric.hpp"
#include "ftu/augment/pipeline.hpp"
#include "ftu/augment/tile.hpp"

#include "ftu/infer/ensemble.hpp"
#include "ftu/infer/external.hpp"
#include "ftu/infer/params.hpp"
#include "ftu/infer/predictor.hpp"
#include "ftu/infer/protocol.hpp"
#include "ftu/infer/pseudo.hpp"
#include "ftu/infer/stack.hpp"
#include "ftu/infer/stitch.hpp"
#include "ftu/infer/tiles.hpp"
#include "ftu/infer/tta.hpp"

#include "ftu/eval/folds.hpp"
#include "ftu/eval/losses.hpp"
#include "ftu/eval/lr_plateau.hpp"
#include "ftu/eval/metrics.hpp"
