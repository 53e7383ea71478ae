#pragma once

#include "convnade/data/dataset.hpp"
#include "convnade/data/image.hpp"
#include "convnade/data/loaders.hpp"
#include "convnade/data/source.hpp"
#include "convnade/data/transforms.hpp"
#include "convnade/io/checkpoint.hpp"
#include "convnade/io/raster.hpp"
#include "convnade/lowdisc/patch.hpp"
#include "convnade/lowdisc/patch_io.hpp"
#include "convnade/lowdisc/sobol.hpp"
#include "convnade/models/any_model.hpp"
#include "convnade/models/reconstruct.hpp"
#include "convnade/numerics/conv.hpp"
#include "convnade/numerics/dropout.hpp"
#include "convnade/numerics/ops.hpp"
#include "convnade/numerics/special.hpp"
#include "convnade/training/adam.hpp"
#include "convnade/training/losses.hpp"
#include "convnade/training/trainer.hpp"
