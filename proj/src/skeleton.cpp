#include "sweep/skeleton.hpp"

#include "sweep/errors.hpp"
#include "sweep/log.hpp"
#include "sweep/random.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>

namespace sweep {

namespace {

constexpr std::int64_t kInf = std::numeric_limits<std::int64_t>::max() / 4;

// Lower envelope of parabolas (Felzenszwalb and Huttenlocher) over one
// line; infinite samples are not sources.
void edt_line(std::vector<std::int64_t>& f, std::vector<std::int64_t>& out, std::vector<int>& v,
              std::vector<double>& z) {
  const int n = static_cast<int>(f.size());
  int k = -1;
  for (int q = 0; q < n; ++q) {
    if (f[q] >= kInf) continue;
    const double fq = static_cast<double>(f[q]) + static_cast<double>(q) * q;
    while (k >= 0) {
      const int p = v[k];
      const double s = (fq - (static_cast<double>(f[p]) + static_cast<double>(p) * p)) / (2.0 * (q - p));
      if (s > z[k]) break;
      --k;
    }
    ++k;
    v[k] = q;
    z[k] = k == 0 ? -std::numeric_limits<double>::infinity()
                  : (fq - (static_cast<double>(f[v[k - 1]]) + static_cast<double>(v[k - 1]) * v[k - 1])) /
                        (2.0 * (q - v[k - 1]));
  }
  if (k < 0) {
    std::fill(out.begin(), out.end(), kInf);
    return;
  }
  int j = 0;
  for (int q = 0; q < n; ++q) {
    while (j < k && z[j + 1] < q) ++j;
    const std::int64_t d = q - v[j];
    out[q] = f[v[j]] + d * d;
  }
}

}  // namespace

std::vector<std::int64_t> squared_distance_cells(const VoxelGrid& grid) {
  const int r = grid.resolution();
  const int p = r + 2;  // one unoccupied layer on every side
  auto pid = [p](int i, int j, int k) {
    return static_cast<std::size_t>(i) + static_cast<std::size_t>(p) * (static_cast<std::size_t>(j) + static_cast<std::size_t>(p) * static_cast<std::size_t>(k));
  };
  std::vector<std::int64_t> field(static_cast<std::size_t>(p) * p * p, 0);
  for (int k = 0; k < r; ++k) {
    for (int j = 0; j < r; ++j) {
      for (int i = 0; i < r; ++i) field[pid(i + 1, j + 1, k + 1)] = grid.at(i, j, k) ? kInf : 0;
    }
  }
  std::vector<std::int64_t> line(p), out(p);
  std::vector<int> v(p);
  std::vector<double> z(p + 1);
  for (int axis = 0; axis < 3; ++axis) {
    for (int b = 0; b < p; ++b) {
      for (int a = 0; a < p; ++a) {
        auto at = [&](int t) -> std::int64_t& {
          if (axis == 0) return field[pid(t, a, b)];
          if (axis == 1) return field[pid(a, t, b)];
          return field[pid(a, b, t)];
        };
        for (int t = 0; t < p; ++t) line[t] = at(t);
        edt_line(line, out, v, z);
        for (int t = 0; t < p; ++t) at(t) = out[t];
      }
    }
  }
  std::vector<std::int64_t> result(grid.size());
  for (int k = 0; k < r; ++k) {
    for (int j = 0; j < r; ++j) {
      for (int i = 0; i < r; ++i) result[grid.index(i, j, k)] = field[pid(i + 1, j + 1, k + 1)];
    }
  }
  return result;
}

std::vector<double> distance_transform(const VoxelGrid& grid) {
  const auto sq = squared_distance_cells(grid);
  std::vector<double> out(sq.size());
  const double h = grid.spacing();
  for (std::size_t i = 0; i < sq.size(); ++i) out[i] = std::sqrt(static_cast<double>(sq[i])) * h;
  return out;
}

SkeletonPoints extract_medial_axis(const VoxelGrid& grid, double prune_ratio, std::size_t max_points) {
  if (!(prune_ratio >= 0.0 && prune_ratio < 1.0)) {
    throw DomainError("prune ratio must lie in [0, 1), got " + std::to_string(prune_ratio));
  }
  if (grid.count() == 0) throw DomainError("cannot extract a medial axis from an empty shape");
  const auto sq = squared_distance_cells(grid);
  const int r = grid.resolution();
  const std::int64_t top = *std::max_element(sq.begin(), sq.end());
  // prune on squared integers: d >= ratio * max  <=>  d^2 >= ratio^2 * max^2
  const double floor_sq = prune_ratio * prune_ratio * static_cast<double>(top);
  std::vector<std::size_t> keep;
  for (int k = 0; k < r; ++k) {
    for (int j = 0; j < r; ++j) {
      for (int i = 0; i < r; ++i) {
        const std::int64_t d = sq[grid.index(i, j, k)];
        if (d == 0 || static_cast<double>(d) < floor_sq) continue;
        bool peak = true;
        for (int dk = -1; dk <= 1 && peak; ++dk) {
          for (int dj = -1; dj <= 1 && peak; ++dj) {
            for (int di = -1; di <= 1; ++di) {
              if (!grid.in_range(i + di, j + dj, k + dk)) continue;
              if (sq[grid.index(i + di, j + dj, k + dk)] > d) {
                peak = false;
                break;
              }
            }
          }
        }
        if (peak) keep.push_back(grid.index(i, j, k));
      }
    }
  }
  std::size_t stride = 1;
  if (max_points > 0 && keep.size() > max_points) stride = (keep.size() + max_points - 1) / max_points;
  SkeletonPoints out;
  for (std::size_t s = 0; s < keep.size(); s += stride) {
    out.points.push_back(grid.center(keep[s]));
    out.radii.push_back(std::sqrt(static_cast<double>(sq[keep[s]])) * grid.spacing());
  }
  return out;
}

namespace {

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

Vec3 clamp_cube(const Vec3& p) {
  return p.cwiseMax(Vec3::Constant(bounds::control_point.lo)).cwiseMin(Vec3::Constant(bounds::control_point.hi));
}

SweepPrimitive segment_primitive(const PointList& pts, const std::vector<double>& radii, int n, int k) {
  Vec3 mean = Vec3::Zero();
  for (const Vec3& p : pts) mean += p;
  mean /= static_cast<double>(pts.size());
  Mat3 cov = Mat3::Zero();
  for (const Vec3& p : pts) cov += (p - mean) * (p - mean).transpose();
  Vec3 dir = Vec3::UnitZ();
  if (pts.size() > 1 && cov.trace() > 0.0) {
    Eigen::SelfAdjointEigenSolver<Mat3> eig(cov);
    dir = eig.eigenvectors().col(2);
  }
  // Fix the eigenvector sign so the result does not depend on the solver.
  int lead = 0;
  dir.cwiseAbs().maxCoeff(&lead);
  if (dir[lead] < 0.0) dir = -dir;
  double lo = 0.0, hi = 0.0;
  for (const Vec3& p : pts) {
    const double t = (p - mean).dot(dir);
    lo = std::min(lo, t);
    hi = std::max(hi, t);
  }
  const double radius = std::clamp(median(radii), bounds::semi_axis.lo, bounds::semi_axis.hi);
  lo -= radius;
  hi += radius;
  const double min_half = std::max(radius, 0.02);
  if (hi - lo < 2.0 * min_half) {
    const double mid = 0.5 * (lo + hi);
    lo = mid - min_half;
    hi = mid + min_half;
  }
  std::vector<Vec3> ctrl(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const double t = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
    ctrl[i] = clamp_cube(mean + t * dir);
  }
  SweepPrimitive prim;
  prim.axis = SweepAxis(std::move(ctrl));
  prim.profile = {radius, radius, 2.0};
  prim.scaling.coeffs.assign(static_cast<std::size_t>(k), 0.0);
  return prim;
}

}  // namespace

Assembly initialize_primitives(const SkeletonPoints& skeleton, int K, std::uint64_t seed, int n, int k) {
  if (K < 1) throw DomainError("need at least one primitive, got K = " + std::to_string(K));
  if (n < 3 || k < 0) throw DimensionError("invalid primitive shape n = " + std::to_string(n));
  const auto& pts = skeleton.points;
  if (pts.empty()) throw DomainError("cannot initialize primitives from an empty skeleton");
  if (skeleton.radii.size() != pts.size()) throw DimensionError("skeleton points and radii differ in count");
  Rng rng(seed);
  const std::size_t N = pts.size();
  const int clusters = static_cast<int>(std::min<std::size_t>(N, static_cast<std::size_t>(K)));
  if (clusters < K) {
    warn("skeleton has " + std::to_string(N) + " points for " + std::to_string(K) +
         " primitives; duplicating clusters with jitter");
  }
  std::vector<std::size_t> centres{static_cast<std::size_t>(rng.index(N))};
  std::vector<double> nearest(N, std::numeric_limits<double>::infinity());
  while (static_cast<int>(centres.size()) < clusters) {
    const Vec3& c = pts[centres.back()];
    std::size_t far = 0;
    for (std::size_t i = 0; i < N; ++i) {
      nearest[i] = std::min(nearest[i], (pts[i] - c).squaredNorm());
      if (nearest[i] > nearest[far]) far = i;
    }
    centres.push_back(far);
  }
  std::vector<PointList> members(static_cast<std::size_t>(clusters));
  std::vector<std::vector<double>> member_radii(static_cast<std::size_t>(clusters));
  for (std::size_t i = 0; i < N; ++i) {
    int best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (int c = 0; c < clusters; ++c) {
      const double d = (pts[i] - pts[centres[c]]).squaredNorm();
      if (d < best_d) {
        best_d = d;
        best = c;
      }
    }
    members[best].push_back(pts[i]);
    member_radii[best].push_back(skeleton.radii[i]);
  }
  Assembly out;
  for (int c = 0; c < clusters; ++c) out.primitives.push_back(segment_primitive(members[c], member_radii[c], n, k));
  for (int c = clusters; c < K; ++c) {
    SweepPrimitive copy = out.primitives[static_cast<std::size_t>(c % clusters)];
    for (Vec3& p : copy.axis.mutable_control_points()) {
      for (int a = 0; a < 3; ++a) p[a] += rng.uniform(-0.01, 0.01);
      p = clamp_cube(p);
    }
    copy.axis = SweepAxis(copy.axis.control_points());
    out.primitives.push_back(std::move(copy));
  }
  out.gates.assign(static_cast<std::size_t>(K), 0.5);
  return out;
}

}  // namespace sweep
