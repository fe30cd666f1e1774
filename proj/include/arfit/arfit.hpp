#pragma once

// Umbrella header for the arfit library: stationarity-constrained AR(p)
// estimation by gradient descent in an unconstrained space, a conditional
// maximum likelihood baseline, uniform stationary-process sampling, and the
// benchmark harness comparing the estimators.

#include "arfit/acf.hpp"
#include "arfit/bench.hpp"
#include "arfit/csv.hpp"
#include "arfit/durbin_levinson.hpp"
#include "arfit/estimators.hpp"
#include "arfit/metrics.hpp"
#include "arfit/objectives.hpp"
#include "arfit/optimize.hpp"
#include "arfit/rng.hpp"
#include "arfit/roots.hpp"
#include "arfit/simulate.hpp"
#include "arfit/spectrum.hpp"
#include "arfit/transform.hpp"
#include "arfit/types.hpp"
