#pragma once

// skglass: exact thermodynamics of SK / p-spin models under arbitrary
// normalized disorder, with universality-bound comparison experiments.

#include "skglass/coupling.hpp"
#include "skglass/environment.hpp"
#include "skglass/errors.hpp"
#include "skglass/estimators.hpp"
#include "skglass/exact_engine.hpp"
#include "skglass/parallel.hpp"
#include "skglass/quadrature.hpp"
#include "skglass/rng.hpp"
#include "skglass/serialization.hpp"
#include "skglass/spin_model.hpp"
#include "skglass/test_functions.hpp"
#include "skglass/universality.hpp"
