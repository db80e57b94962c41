#pragma once

#include "dgc/baselines.hpp"
#include "dgc/energy.hpp"
#include "dgc/error.hpp"
#include "dgc/experiment.hpp"
#include "dgc/grid.hpp"
#include "dgc/mrass.hpp"
#include "dgc/optimizer.hpp"
#include "dgc/raster_io.hpp"
#include "dgc/rng.hpp"
#include "dgc/synth.hpp"
#include "dgc/validation.hpp"
