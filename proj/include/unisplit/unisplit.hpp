#pragma once

#include "catalog.hpp"
#include "diagnostics.hpp"
#include "error.hpp"
#include "experiment.hpp"
#include "fft.hpp"
#include "linalg.hpp"
#include "matrix_experiments.hpp"
#include "propagator.hpp"
#include "rng.hpp"
#include "scheme.hpp"
#include "schrodinger.hpp"
#include "version.hpp"
