#pragma once

#include "pastegen/raster.hpp"

namespace pastegen {

struct PoissonResult {
  PlaneD f;
  int iterations = 0;
  bool converged = true;
};

struct PoissonOptions {
  double tolerance = 1e-3;  // max per-pixel update, in gray levels
  int max_iterations = 10000;
};

// Gauss-Seidel solve of the discrete Poisson equation on a rectangular
// region:
//
//   4 f(p) - sum_{q in N4(p)} f(q) = -div_v(p)   for interior p,
//
// with the region border held fixed (Dirichlet) at the values already in
// `initial`. `div_v` is the divergence of the guidance gradient field at
// interior pixels. Iteration sweeps row-major until the largest update falls
// below `tolerance` or the iteration cap is hit; the result is returned
// either way with `converged` reporting which.
PoissonResult poisson_solve(const PlaneD& initial, const PlaneD& div_v,
                            const PoissonOptions& opts = {});

}  // namespace pastegen
