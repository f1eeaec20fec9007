#pragma once

#include "levyexit/config.hpp"
#include "levyexit/domain.hpp"
#include "levyexit/experiment.hpp"
#include "levyexit/noise.hpp"
#include "levyexit/potential.hpp"
#include "levyexit/rng.hpp"
#include "levyexit/sde.hpp"
#include "levyexit/split.hpp"
#include "levyexit/stats.hpp"
#include "levyexit/theory.hpp"
