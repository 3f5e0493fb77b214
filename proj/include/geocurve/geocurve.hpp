#pragma once

#include "geocurve/error.hpp"
#include "geocurve/preshape.hpp"
#include "geocurve/geodesic.hpp"
#include "geocurve/losses.hpp"
#include "geocurve/graddescent.hpp"
#include "geocurve/rng.hpp"
#include "geocurve/dataset.hpp"
#include "geocurve/fitting.hpp"
#include "geocurve/augment.hpp"
#include "geocurve/classify.hpp"
#include "geocurve/evaluate.hpp"
#include "geocurve/synth.hpp"
#include "geocurve/oracles.hpp"
#include "geocurve/selfcheck.hpp"
#include "geocurve/bench.hpp"
#include "geocurve/io.hpp"
