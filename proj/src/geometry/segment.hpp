#pragma once

#include <algorithm>
#include <cmath>

#include "codim2/grid.hpp"

namespace codim2::detail {

struct SegmentHit {
  double distance;
  Point offset;  // x - nearest point, in the image frame of x
};

// Nearest point of the segment a + s v, s in [0, 1], to the point a + w.
inline SegmentHit segment_nearest(const Point& w, const Point& v, int dim) {
  double vv = 0.0, wv = 0.0;
  for (int i = 0; i < dim; ++i) {
    vv += v[i] * v[i];
    wv += w[i] * v[i];
  }
  const double s = vv > 0.0 ? std::clamp(wv / vv, 0.0, 1.0) : 0.0;
  SegmentHit hit{0.0, {0.0, 0.0, 0.0}};
  double d2 = 0.0;
  for (int i = 0; i < dim; ++i) {
    hit.offset[i] = w[i] - s * v[i];
    d2 += hit.offset[i] * hit.offset[i];
  }
  hit.distance = std::sqrt(d2);
  return hit;
}

inline double wrap(double x, double period) { return x - period * std::floor(x / period + 0.5); }

}  // namespace codim2::detail
