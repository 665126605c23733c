#pragma once

#include "misc/aggregate.hpp"
#include "misc/benchmark.hpp"
#include "misc/corrupt.hpp"
#include "misc/dataset.hpp"
#include "misc/errors.hpp"
#include "misc/labels.hpp"
#include "misc/linalg.hpp"
#include "misc/pipeline.hpp"
#include "misc/rng.hpp"
#include "misc/tensor.hpp"
#include "misc/tucker.hpp"
