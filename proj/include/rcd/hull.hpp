#pragma once

#include <Eigen/Dense>
#include <vector>

namespace rcd::hull {

struct HullResult {
  double volume = 0.0;
  bool degenerate = false;  // input affinely spans fewer than d dimensions
  int facet_count = 0;
};

// Exact Euclidean d-volume of conv(points) via incremental facet enumeration
// (quickhull) followed by a simplex fan from the vertex centroid. Points are
// normalized to their bounding box internally, so axes with wildly different
// scales are handled; an axis extent below 1e-12 of the largest collapses the
// set to lower rank and yields volume 0 with the degenerate flag set.
// The result is invariant to the ordering of the input list: every selection
// in the construction breaks ties on coordinate values, never on indices.
HullResult convex_hull_volume(const std::vector<Eigen::VectorXd>& points);

}  // namespace rcd::hull
