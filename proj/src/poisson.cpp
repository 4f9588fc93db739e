#include "pastegen/poisson.hpp"

#include <cmath>

#include "pastegen/errors.hpp"

namespace pastegen {

PoissonResult poisson_solve(const PlaneD& initial, const PlaneD& div_v,
                            const PoissonOptions& opts) {
  if (initial.w != div_v.w || initial.h != div_v.h) {
    throw ValidationError("poisson_solve: plane dimensions differ");
  }
  PoissonResult res;
  res.f = initial;
  const int w = initial.w;
  const int h = initial.h;
  if (w < 3 || h < 3) return res;  // no interior

  PlaneD& f = res.f;
  for (int it = 0; it < opts.max_iterations; ++it) {
    double max_update = 0.0;
    for (int y = 1; y < h - 1; ++y) {
      for (int x = 1; x < w - 1; ++x) {
        double next = (f.at(x - 1, y) + f.at(x + 1, y) + f.at(x, y - 1) +
                       f.at(x, y + 1) - div_v.at(x, y)) * 0.25;
        double delta = std::abs(next - f.at(x, y));
        if (delta > max_update) max_update = delta;
        f.at(x, y) = next;
      }
    }
    res.iterations = it + 1;
    if (max_update < opts.tolerance) return res;
  }
  res.converged = false;
  return res;
}

}  // namespace pastegen
