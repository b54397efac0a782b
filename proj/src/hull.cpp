#include "rcd/hull.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <vector>

#include "rcd/errors.hpp"

namespace rcd::hull {
namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

constexpr double kOutsideEps = 1e-10;   // in normalized coordinates
constexpr double kDegenerateTol = 1e-12;

bool lex_less(const VectorXd& a, const VectorXd& b) {
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    if (a[i] < b[i]) return true;
    if (a[i] > b[i]) return false;
  }
  return false;
}

struct Facet {
  std::vector<int> vertices;   // d point ids, sorted by coordinate value
  std::vector<int> neighbors;  // d facet ids, one across each ridge
  VectorXd normal;             // unit outward normal
  double offset = 0.0;         // normal . x = offset on the hyperplane
  std::vector<int> outside;    // candidate ids strictly outside this facet
  bool alive = true;
};

// Precondition: pts is lexicographically sorted and duplicate-free, so index
// order equals coordinate order and every index comparison below is a
// value-based tie-break. That makes the whole construction a function of the
// point multiset alone.
class QuickHull {
 public:
  QuickHull(const std::vector<VectorXd>& pts, int dim) : pts_(pts), d_(dim) {}

  // Returns false when the point set is rank deficient.
  bool build() {
    if (!initial_simplex()) return false;
    assign_all_outside();
    for (;;) {
      const auto [fid, pid] = best_candidate();
      if (fid < 0) break;
      insert_point(fid, pid);
    }
    return true;
  }

  double fan_volume() const {
    VectorXd centroid = VectorXd::Zero(d_);
    std::vector<char> used(pts_.size(), 0);
    int count = 0;
    for (const auto& f : facets_)
      if (f.alive)
        for (int v : f.vertices)
          if (!used[static_cast<std::size_t>(v)]) {
            used[static_cast<std::size_t>(v)] = 1;
            centroid += pts_[static_cast<std::size_t>(v)];
            ++count;
          }
    centroid /= count;

    double factorial = 1.0;
    for (int i = 2; i <= d_; ++i) factorial *= i;
    MatrixXd edges(d_, d_);
    double volume = 0.0;
    for (const auto& f : facets_) {
      if (!f.alive) continue;
      for (int i = 0; i < d_; ++i)
        edges.col(i) = pts_[static_cast<std::size_t>(f.vertices[static_cast<std::size_t>(i)])] -
                       centroid;
      volume += std::abs(edges.determinant()) / factorial;
    }
    return volume;
  }

  int alive_facets() const {
    int n = 0;
    for (const auto& f : facets_)
      if (f.alive) ++n;
    return n;
  }

 private:
  double dist(const Facet& f, int pid) const {
    return f.normal.dot(pts_[static_cast<std::size_t>(pid)]) - f.offset;
  }

  // Unit normal of the hyperplane through the facet's vertices, oriented away
  // from the interior point.
  void set_plane(Facet& f) const {
    MatrixXd edges(d_, d_ - 1);
    const VectorXd& p0 = pts_[static_cast<std::size_t>(f.vertices[0])];
    for (int i = 1; i < d_; ++i)
      edges.col(i - 1) =
          pts_[static_cast<std::size_t>(f.vertices[static_cast<std::size_t>(i)])] - p0;
    // null direction of edges^T = last column of Q in a full QR of edges
    Eigen::HouseholderQR<MatrixXd> qr(edges);
    const MatrixXd q = qr.householderQ();
    f.normal = q.col(d_ - 1);
    f.offset = f.normal.dot(p0);
    const double side = f.normal.dot(interior_) - f.offset;
    if (std::abs(side) < 1e-14)
      throw SolverError("convex_hull_volume: interior point degenerated onto a facet");
    if (side > 0.0) {
      f.normal = -f.normal;
      f.offset = -f.offset;
    }
  }

  bool initial_simplex() {
    const int n = static_cast<int>(pts_.size());
    if (n < d_ + 1) return false;

    // greedy farthest-point selection, ties broken on coordinate values
    std::vector<int> chosen;
    int first = 0;
    for (int i = 1; i < n; ++i)
      if (lex_less(pts_[static_cast<std::size_t>(i)], pts_[static_cast<std::size_t>(first)]))
        first = i;
    chosen.push_back(first);

    MatrixXd basis(d_, d_);  // orthonormal columns spanning the affine hull so far
    int rank = 0;
    while (static_cast<int>(chosen.size()) < d_ + 1) {
      int best = -1;
      double best_dist = kDegenerateTol;
      const VectorXd& origin = pts_[static_cast<std::size_t>(chosen[0])];
      for (int i = 0; i < n; ++i) {
        VectorXd r = pts_[static_cast<std::size_t>(i)] - origin;
        for (int j = 0; j < rank; ++j) r -= basis.col(j).dot(r) * basis.col(j);
        const double dist_i = r.norm();
        if (dist_i > best_dist + 1e-15 ||
            (best >= 0 && dist_i > best_dist - 1e-15 && i < best)) {
          best = i;
          best_dist = dist_i;
        }
      }
      if (best < 0) return false;  // rank < d
      chosen.push_back(best);
      VectorXd r = pts_[static_cast<std::size_t>(best)] - origin;
      for (int j = 0; j < rank; ++j) r -= basis.col(j).dot(r) * basis.col(j);
      basis.col(rank++) = r / r.norm();
    }

    interior_ = VectorXd::Zero(d_);
    for (int id : chosen) interior_ += pts_[static_cast<std::size_t>(id)];
    interior_ /= (d_ + 1);

    // one facet per omitted simplex vertex; neighbors are the other facets
    for (int omit = 0; omit <= d_; ++omit) {
      Facet f;
      for (int i = 0; i <= d_; ++i)
        if (i != omit) f.vertices.push_back(chosen[static_cast<std::size_t>(i)]);
      std::sort(f.vertices.begin(), f.vertices.end());
      set_plane(f);
      for (int other = 0; other <= d_; ++other)
        if (other != omit) f.neighbors.push_back(other);
      facets_.push_back(std::move(f));
    }
    return true;
  }

  void assign_all_outside() {
    const int n = static_cast<int>(pts_.size());
    for (int i = 0; i < n; ++i) assign_point(i, facets_);
  }

  template <typename FacetRange>
  void assign_point(int pid, FacetRange& candidates) {
    int best = -1;
    double best_dist = kOutsideEps;
    for (std::size_t fi = 0; fi < candidates.size(); ++fi) {
      Facet& f = facet_of(candidates, fi);
      if (!f.alive) continue;
      const double dist_i = dist(f, pid);
      if (dist_i > best_dist) {
        best_dist = dist_i;
        best = facet_id(candidates, fi);
      }
    }
    if (best >= 0) facets_[static_cast<std::size_t>(best)].outside.push_back(pid);
  }

  Facet& facet_of(std::vector<Facet>& v, std::size_t i) { return v[i]; }
  Facet& facet_of(std::vector<int>& ids, std::size_t i) {
    return facets_[static_cast<std::size_t>(ids[i])];
  }
  int facet_id(const std::vector<Facet>&, std::size_t i) const { return static_cast<int>(i); }
  int facet_id(const std::vector<int>& ids, std::size_t i) const { return ids[i]; }

  // Globally deepest candidate; ties broken on coordinate values so the
  // construction never depends on input order.
  std::pair<int, int> best_candidate() const {
    int best_f = -1;
    int best_p = -1;
    double best_dist = 0.0;
    for (std::size_t fi = 0; fi < facets_.size(); ++fi) {
      const Facet& f = facets_[fi];
      if (!f.alive) continue;
      for (int pid : f.outside) {
        const double dist_i = dist(f, pid);
        if (dist_i > best_dist + 1e-15 ||
            (best_p >= 0 && dist_i > best_dist - 1e-15 && pid < best_p)) {
          best_dist = dist_i;
          best_f = static_cast<int>(fi);
          best_p = pid;
        }
      }
    }
    return {best_f, best_p};
  }

  void insert_point(int start_facet, int apex) {
    // visible region: connected set of facets the apex lies strictly above
    std::vector<int> visible;
    std::vector<char> seen(facets_.size(), 0);
    std::vector<int> stack{start_facet};
    seen[static_cast<std::size_t>(start_facet)] = 1;
    while (!stack.empty()) {
      const int fid = stack.back();
      stack.pop_back();
      visible.push_back(fid);
      for (int nb : facets_[static_cast<std::size_t>(fid)].neighbors) {
        if (seen[static_cast<std::size_t>(nb)] || !facets_[static_cast<std::size_t>(nb)].alive)
          continue;
        if (dist(facets_[static_cast<std::size_t>(nb)], apex) > kOutsideEps) {
          seen[static_cast<std::size_t>(nb)] = 1;
          stack.push_back(nb);
        }
      }
    }

    // horizon ridges: (visible facet, hidden neighbor, shared d-1 vertices)
    struct Ridge {
      std::vector<int> verts;
      int hidden;
    };
    std::vector<Ridge> horizon;
    for (int fid : visible) {
      const Facet& fv = facets_[static_cast<std::size_t>(fid)];
      for (int nb : fv.neighbors) {
        const Facet& fn = facets_[static_cast<std::size_t>(nb)];
        if (!fn.alive || seen[static_cast<std::size_t>(nb)]) continue;
        Ridge r;
        r.hidden = nb;
        std::set_intersection(fv.vertices.begin(), fv.vertices.end(), fn.vertices.begin(),
                              fn.vertices.end(), std::back_inserter(r.verts));
        if (static_cast<int>(r.verts.size()) != d_ - 1)
          throw SolverError("convex_hull_volume: malformed horizon ridge");
        horizon.push_back(std::move(r));
      }
    }

    // gather orphaned candidates before killing the visible facets
    std::vector<int> orphans;
    for (int fid : visible) {
      Facet& fv = facets_[static_cast<std::size_t>(fid)];
      for (int pid : fv.outside)
        if (pid != apex) orphans.push_back(pid);
      fv.outside.clear();
      fv.alive = false;
    }

    // one new facet per horizon ridge
    std::vector<int> fresh;
    for (const Ridge& r : horizon) {
      Facet f;
      f.vertices = r.verts;
      f.vertices.push_back(apex);
      std::sort(f.vertices.begin(), f.vertices.end());
      set_plane(f);
      f.neighbors.push_back(r.hidden);
      const int fid = static_cast<int>(facets_.size());
      // swap the dead facet out of the hidden neighbor's adjacency
      for (int& nb : facets_[static_cast<std::size_t>(r.hidden)].neighbors)
        if (!facets_[static_cast<std::size_t>(nb)].alive) {
          // only the ridge-sharing dead neighbor is replaced
          const Facet& fn = facets_[static_cast<std::size_t>(nb)];
          std::vector<int> shared;
          std::set_intersection(fn.vertices.begin(), fn.vertices.end(), r.verts.begin(),
                                r.verts.end(), std::back_inserter(shared));
          if (static_cast<int>(shared.size()) == d_ - 1) {
            nb = fid;
            break;
          }
        }
      fresh.push_back(fid);
      facets_.push_back(std::move(f));
    }

    // adjacency among the new facets: two share a ridge when their vertex
    // sets overlap in the apex plus d-2 ridge vertices
    std::map<std::vector<int>, int> open_ridges;
    for (int fid : fresh) {
      Facet& f = facets_[static_cast<std::size_t>(fid)];
      for (int omit : f.vertices) {
        if (omit == apex) continue;
        std::vector<int> key;
        for (int v : f.vertices)
          if (v != omit) key.push_back(v);
        std::sort(key.begin(), key.end());
        auto [it, inserted] = open_ridges.try_emplace(key, fid);
        if (!inserted) {
          facets_[static_cast<std::size_t>(fid)].neighbors.push_back(it->second);
          facets_[static_cast<std::size_t>(it->second)].neighbors.push_back(fid);
        }
      }
    }
    for (int fid : fresh)
      if (static_cast<int>(facets_[static_cast<std::size_t>(fid)].neighbors.size()) != d_)
        throw SolverError("convex_hull_volume: inconsistent facet adjacency");

    assign_orphans(orphans, fresh);
  }

  void assign_orphans(const std::vector<int>& orphans, std::vector<int>& fresh) {
    for (int pid : orphans) assign_point(pid, fresh);
  }

  const std::vector<VectorXd>& pts_;
  const int d_;
  VectorXd interior_;
  std::vector<Facet> facets_;
};

}  // namespace

HullResult convex_hull_volume(const std::vector<Eigen::VectorXd>& points) {
  HullResult result;
  if (points.size() < 2) {
    result.degenerate = true;
    return result;
  }
  const int d = static_cast<int>(points.front().size());
  for (const auto& p : points)
    if (p.size() != d || !p.allFinite())
      throw ValidationError("convex_hull_volume: points must be finite and of equal dimension");

  // normalize to the bounding box; collapsed axes mean rank < d
  VectorXd lo = points.front();
  VectorXd hi = points.front();
  for (const auto& p : points) {
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  }
  const VectorXd extent = hi - lo;
  const double max_extent = extent.maxCoeff();
  if (max_extent <= 0.0) {
    result.degenerate = true;
    return result;
  }
  double scale_product = 1.0;
  for (int i = 0; i < d; ++i) {
    if (extent[i] <= kDegenerateTol * max_extent) {
      result.degenerate = true;
      return result;
    }
    scale_product *= extent[i];
  }

  std::vector<VectorXd> normalized;
  normalized.reserve(points.size());
  for (const auto& p : points)
    normalized.push_back((p - lo).cwiseQuotient(extent));

  // exact duplicates add nothing to the hull and would stall the insertion
  std::sort(normalized.begin(), normalized.end(),
            [](const VectorXd& a, const VectorXd& b) { return lex_less(a, b); });
  normalized.erase(std::unique(normalized.begin(), normalized.end(),
                               [](const VectorXd& a, const VectorXd& b) { return a == b; }),
                   normalized.end());
  if (static_cast<int>(normalized.size()) < d + 1) {
    result.degenerate = true;
    return result;
  }

  QuickHull qh(normalized, d);
  if (!qh.build()) {
    result.degenerate = true;
    return result;
  }
  result.volume = qh.fan_volume() * scale_product;
  result.facet_count = qh.alive_facets();
  return result;
}

}  // namespace rcd::hull
