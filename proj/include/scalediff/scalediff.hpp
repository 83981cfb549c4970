#pragma once

#include "scalediff/coordinates.hpp"
#include "scalediff/eigen.hpp"
#include "scalediff/errors.hpp"
#include "scalediff/harness.hpp"
#include "scalediff/invariants.hpp"
#include "scalediff/io.hpp"
#include "scalediff/kernel.hpp"
#include "scalediff/martingale.hpp"
#include "scalediff/models.hpp"
#include "scalediff/parallel.hpp"
#include "scalediff/processes.hpp"
#include "scalediff/quadrature.hpp"
#include "scalediff/random.hpp"
#include "scalediff/specfun.hpp"
#include "scalediff/stats.hpp"
#include "scalediff/transform.hpp"
