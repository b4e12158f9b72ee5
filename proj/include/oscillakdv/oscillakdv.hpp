#pragma once

// Pseudospectral simulator for the generalized KdV equation with a
// time-oscillating nonlinearity coefficient:
//
//   u_t + u_xxx + g(omega (t + t0)) d_x(u^{k+1}) = 0
//
// on a periodic box, with exact-propagator time steppers (integrating-factor
// RK4 and ETDRK4), conserved-quantity diagnostics, mixed space-time norms,
// and experiment harnesses for the high-frequency averaging limit and the
// slow/fast oscillation dichotomy.

#include "oscillakdv/config.hpp"
#include "oscillakdv/csv.hpp"
#include "oscillakdv/diagnostics.hpp"
#include "oscillakdv/errors.hpp"
#include "oscillakdv/experiments.hpp"
#include "oscillakdv/field.hpp"
#include "oscillakdv/forcing.hpp"
#include "oscillakdv/grid.hpp"
#include "oscillakdv/runner.hpp"
#include "oscillakdv/snapshot_io.hpp"
#include "oscillakdv/solver.hpp"
#include "oscillakdv/spectral_ops.hpp"
#include "oscillakdv/trajectory.hpp"
