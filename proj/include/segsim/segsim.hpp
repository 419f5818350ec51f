#pragma once

// Umbrella header for the segsim library.

#include "segsim/analytics.hpp"
#include "segsim/cli.hpp"
#include "segsim/csv.hpp"
#include "segsim/errors.hpp"
#include "segsim/harness.hpp"
#include "segsim/metrics.hpp"
#include "segsim/model.hpp"
#include "segsim/rng.hpp"
#include "segsim/svg.hpp"
