#pragma once

// Robustness-curve estimation for uncertain systems: sample-reuse Monte Carlo
// with run-length compressed state, grid planning to a prescribed
// interpolation tolerance, and confidence bands with per-interval coverage.

#include "robcurve/analysis.hpp"
#include "robcurve/engine.hpp"
#include "robcurve/errors.hpp"
#include "robcurve/grid.hpp"
#include "robcurve/io.hpp"
#include "robcurve/rng.hpp"
#include "robcurve/systems.hpp"
#include "robcurve/uncertainty.hpp"
