#include "sweep/mesh.hpp"

#include "sweep/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>
#include <utility>

namespace sweep {

namespace {

// Slices i and i+1 must lie strictly on the forward side of each other's plane.
bool consecutive_slices_cross(const std::vector<Frame>& frames, const std::vector<PointList>& rings) {
  for (std::size_t i = 0; i + 1 < frames.size(); ++i) {
    for (std::size_t j = 0; j < rings[i].size(); ++j) {
      if ((rings[i + 1][j] - frames[i].origin).dot(frames[i].tangent) <= 0.0) return true;
      if ((rings[i][j] - frames[i + 1].origin).dot(frames[i + 1].tangent) >= 0.0) return true;
    }
  }
  return false;
}

}  // namespace

TriMesh sweep_mesh(const SweepPrimitive& primitive, int frames, int contour) {
  if (frames < 2) throw DomainError("sweep mesh needs at least 2 frames, got " + std::to_string(frames));
  if (contour < 3) throw DomainError("sweep mesh needs at least 3 contour points, got " + std::to_string(contour));
  const auto fr = parallel_transport_frames(primitive.axis, frames);
  std::vector<PointList> rings(static_cast<std::size_t>(frames));
  TriMesh mesh;
  mesh.vertices.reserve(static_cast<std::size_t>(frames * contour + 2));
  for (int i = 0; i < frames; ++i) {
    const double t = static_cast<double>(i) / static_cast<double>(frames - 1);
    rings[i] = profile_slice(primitive, fr[i], t, contour);
    mesh.vertices.insert(mesh.vertices.end(), rings[i].begin(), rings[i].end());
  }
  const int start = frames * contour;
  const int end = start + 1;
  mesh.vertices.push_back(fr.front().origin);
  mesh.vertices.push_back(fr.back().origin);

  auto vid = [contour](int i, int j) { return i * contour + (j % contour); };
  mesh.triangles.reserve(static_cast<std::size_t>(2 * contour * frames));
  for (int i = 0; i + 1 < frames; ++i) {
    for (int j = 0; j < contour; ++j) {
      mesh.triangles.push_back({vid(i, j), vid(i, j + 1), vid(i + 1, j + 1)});
      mesh.triangles.push_back({vid(i, j), vid(i + 1, j + 1), vid(i + 1, j)});
    }
  }
  for (int j = 0; j < contour; ++j) mesh.triangles.push_back({start, vid(0, j + 1), vid(0, j)});
  for (int j = 0; j < contour; ++j) mesh.triangles.push_back({end, vid(frames - 1, j), vid(frames - 1, j + 1)});
  mesh.folded = consecutive_slices_cross(fr, rings);
  return mesh;
}

CellMesh sweep_cells(const SweepPrimitive& primitive, int frames, int contour) {
  CellMesh out;
  TriMesh& mesh = out.mesh;
  mesh = sweep_mesh(primitive, frames, contour);
  out.cell_count = frames - 1;
  const int side = 2 * contour * (frames - 1);
  out.cells.reserve(mesh.triangles.size() + static_cast<std::size_t>(contour * (frames - 2)));
  for (int t = 0; t < side; ++t) out.cells.push_back({t / (2 * contour), -1});
  for (int j = 0; j < contour; ++j) out.cells.push_back({0, -1});
  for (int j = 0; j < contour; ++j) out.cells.push_back({frames - 2, -1});
  const auto fr = parallel_transport_frames(primitive.axis, frames);
  for (int i = 1; i + 1 < frames; ++i) {
    const int centre = static_cast<int>(mesh.vertices.size());
    mesh.vertices.push_back(fr[i].origin);
    for (int j = 0; j < contour; ++j) {
      mesh.triangles.push_back({centre, i * contour + j, i * contour + (j + 1) % contour});
      out.cells.push_back({i - 1, i});
    }
  }
  return out;
}

TriMesh merge_meshes(const std::vector<TriMesh>& meshes) {
  TriMesh out;
  for (const TriMesh& m : meshes) {
    const int base = static_cast<int>(out.vertices.size());
    out.vertices.insert(out.vertices.end(), m.vertices.begin(), m.vertices.end());
    for (const auto& t : m.triangles) out.triangles.push_back({t[0] + base, t[1] + base, t[2] + base});
    out.folded = out.folded || m.folded;
  }
  return out;
}

long euler_characteristic(const TriMesh& mesh) {
  std::vector<std::pair<int, int>> edges;
  edges.reserve(mesh.triangles.size() * 3);
  for (const auto& t : mesh.triangles) {
    for (int e = 0; e < 3; ++e) {
      const int a = t[e], b = t[(e + 1) % 3];
      edges.emplace_back(std::min(a, b), std::max(a, b));
    }
  }
  std::sort(edges.begin(), edges.end());
  const auto unique_edges = std::unique(edges.begin(), edges.end()) - edges.begin();
  return static_cast<long>(mesh.vertices.size()) - static_cast<long>(unique_edges) +
         static_cast<long>(mesh.triangles.size());
}

bool is_closed(const TriMesh& mesh) {
  std::map<std::pair<int, int>, int> directed;
  for (const auto& t : mesh.triangles) {
    for (int e = 0; e < 3; ++e) ++directed[{t[e], t[(e + 1) % 3]}];
  }
  for (const auto& [edge, count] : directed) {
    if (count != 1) return false;
    const auto twin = directed.find({edge.second, edge.first});
    if (twin == directed.end() || twin->second != 1) return false;
  }
  return !mesh.triangles.empty();
}

double triangle_area(const TriMesh& mesh, std::size_t index) {
  const auto& t = mesh.triangles[index];
  const Vec3& a = mesh.vertices[t[0]];
  return 0.5 * (mesh.vertices[t[1]] - a).cross(mesh.vertices[t[2]] - a).norm();
}

double surface_area(const TriMesh& mesh) {
  double total = 0.0;
  for (std::size_t i = 0; i < mesh.triangles.size(); ++i) total += triangle_area(mesh, i);
  return total;
}

PointList sample_surface(const TriMesh& mesh, std::size_t count, Rng& rng) {
  if (mesh.triangles.empty()) throw DomainError("cannot sample an empty mesh");
  std::vector<double> cumulative(mesh.triangles.size());
  double total = 0.0;
  for (std::size_t i = 0; i < mesh.triangles.size(); ++i) {
    total += triangle_area(mesh, i);
    cumulative[i] = total;
  }
  if (!(total > 0.0)) throw DomainError("cannot sample a mesh of zero area");
  PointList out;
  out.reserve(count);
  for (std::size_t s = 0; s < count; ++s) {
    const double pick = rng.uniform() * total;
    const std::size_t tri = std::min<std::size_t>(
        static_cast<std::size_t>(std::upper_bound(cumulative.begin(), cumulative.end(), pick) - cumulative.begin()),
        cumulative.size() - 1);
    double r1 = rng.uniform(), r2 = rng.uniform();
    if (r1 + r2 > 1.0) {
      r1 = 1.0 - r1;
      r2 = 1.0 - r2;
    }
    const auto& t = mesh.triangles[tri];
    const Vec3& a = mesh.vertices[t[0]];
    out.push_back(a + r1 * (mesh.vertices[t[1]] - a) + r2 * (mesh.vertices[t[2]] - a));
  }
  return out;
}

namespace {

void write_vertices_faces(std::ostream& out, const TriMesh& mesh, int base) {
  char line[128];
  for (const Vec3& v : mesh.vertices) {
    std::snprintf(line, sizeof line, "v %.9g %.9g %.9g\n", v.x(), v.y(), v.z());
    out << line;
  }
  for (const auto& t : mesh.triangles) {
    out << "f " << t[0] + base << ' ' << t[1] + base << ' ' << t[2] + base << '\n';
  }
}

}  // namespace

void write_obj(std::ostream& out, const TriMesh& mesh) { write_vertices_faces(out, mesh, 1); }

void write_obj(std::ostream& out, const std::vector<TriMesh>& meshes, const std::vector<std::string>& names) {
  if (names.size() != meshes.size()) throw DimensionError("one group name per mesh required");
  int base = 1;
  for (std::size_t i = 0; i < meshes.size(); ++i) {
    out << "g " << names[i] << '\n';
    write_vertices_faces(out, meshes[i], base);
    base += static_cast<int>(meshes[i].vertices.size());
  }
}

void write_obj_file(const std::string& path, const std::vector<TriMesh>& meshes,
                    const std::vector<std::string>& names) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot write " + path);
  write_obj(out, meshes, names);
  if (!out) throw FormatError("failed writing " + path);
}

TriMesh read_obj(std::istream& in) {
  TriMesh mesh;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::istringstream ss(line);
    std::string tag;
    if (!(ss >> tag) || tag[0] == '#') continue;
    if (tag == "v") {
      Vec3 v;
      if (!(ss >> v.x() >> v.y() >> v.z())) throw FormatError("bad vertex on OBJ line " + std::to_string(lineno));
      mesh.vertices.push_back(v);
    } else if (tag == "f") {
      std::vector<int> ids;
      std::string tok;
      while (ss >> tok) {
        const int id = std::atoi(tok.substr(0, tok.find('/')).c_str());
        const int resolved = id < 0 ? static_cast<int>(mesh.vertices.size()) + id : id - 1;
        if (id == 0 || resolved < 0 || resolved >= static_cast<int>(mesh.vertices.size())) {
          throw FormatError("bad face index on OBJ line " + std::to_string(lineno));
        }
        ids.push_back(resolved);
      }
      if (ids.size() < 3) throw FormatError("face with fewer than 3 vertices on OBJ line " + std::to_string(lineno));
      for (std::size_t j = 1; j + 1 < ids.size(); ++j) mesh.triangles.push_back({ids[0], ids[j], ids[j + 1]});
    }
  }
  return mesh;
}

TriMesh read_obj_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open " + path);
  return read_obj(in);
}

Vec3 closest_point_on_triangle(const Vec3& p, const Vec3& a, const Vec3& b, const Vec3& c) {
  const Vec3 ab = b - a, ac = c - a, ap = p - a;
  const double d1 = ab.dot(ap), d2 = ac.dot(ap);
  if (d1 <= 0.0 && d2 <= 0.0) return a;
  const Vec3 bp = p - b;
  const double d3 = ab.dot(bp), d4 = ac.dot(bp);
  if (d3 >= 0.0 && d4 <= d3) return b;
  const double vc = d1 * d4 - d3 * d2;
  if (vc <= 0.0 && d1 >= 0.0 && d3 <= 0.0) return a + (d1 / (d1 - d3)) * ab;
  const Vec3 cp = p - c;
  const double d5 = ab.dot(cp), d6 = ac.dot(cp);
  if (d6 >= 0.0 && d5 <= d6) return c;
  const double vb = d5 * d2 - d1 * d6;
  if (vb <= 0.0 && d2 >= 0.0 && d6 <= 0.0) return a + (d2 / (d2 - d6)) * ac;
  const double va = d3 * d6 - d5 * d4;
  if (va <= 0.0 && (d4 - d3) >= 0.0 && (d5 - d6) >= 0.0) {
    return b + ((d4 - d3) / ((d4 - d3) + (d5 - d6))) * (c - b);
  }
  const double denom = 1.0 / (va + vb + vc);
  return a + ab * (vb * denom) + ac * (vc * denom);
}

TriangleBVH::TriangleBVH(const TriMesh& mesh) : mesh_(&mesh) {
  if (mesh.triangles.empty()) throw DomainError("BVH over an empty mesh");
  const std::size_t n = mesh.triangles.size();
  order_.resize(n);
  boxes_.resize(n);
  centers_.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    order_[i] = static_cast<int>(i);
    boxes_[i].setEmpty();
    for (int v : mesh.triangles[i]) boxes_[i].extend(mesh.vertices[v]);
    centers_[i] = boxes_[i].center();
  }
  nodes_.reserve(2 * n);
  build(0, static_cast<int>(n), 0);
}

int TriangleBVH::build(int first, int count, int depth) {
  const int index = static_cast<int>(nodes_.size());
  nodes_.emplace_back();
  Eigen::AlignedBox3d box, centroid_box;
  box.setEmpty();
  centroid_box.setEmpty();
  for (int i = first; i < first + count; ++i) {
    box.extend(boxes_[order_[i]]);
    centroid_box.extend(centers_[order_[i]]);
  }
  nodes_[index].box = box;
  if (count <= 4 || depth > 60) {
    nodes_[index].first = first;
    nodes_[index].count = count;
    return index;
  }
  int axis = 0;
  centroid_box.sizes().maxCoeff(&axis);
  const int mid = first + count / 2;
  std::nth_element(order_.begin() + first, order_.begin() + mid, order_.begin() + first + count,
                   [&](int l, int r) { return centers_[l][axis] < centers_[r][axis]; });
  const int left = build(first, mid - first, depth + 1);
  const int right = build(mid, first + count - mid, depth + 1);
  nodes_[index].left = left;
  nodes_[index].right = right;
  return index;
}

double TriangleBVH::distance(const Vec3& p) const {
  double best = std::numeric_limits<double>::infinity();
  std::vector<int> stack{0};
  while (!stack.empty()) {
    const Node& node = nodes_[stack.back()];
    stack.pop_back();
    if (node.box.squaredExteriorDistance(p) >= best) continue;
    if (node.left < 0) {
      for (int i = node.first; i < node.first + node.count; ++i) {
        const auto& t = mesh_->triangles[order_[i]];
        const Vec3 c = closest_point_on_triangle(p, mesh_->vertices[t[0]], mesh_->vertices[t[1]], mesh_->vertices[t[2]]);
        best = std::min(best, (c - p).squaredNorm());
      }
      continue;
    }
    const double dl = nodes_[node.left].box.squaredExteriorDistance(p);
    const double dr = nodes_[node.right].box.squaredExteriorDistance(p);
    if (dl < dr) {
      stack.push_back(node.right);
      stack.push_back(node.left);
    } else {
      stack.push_back(node.left);
      stack.push_back(node.right);
    }
  }
  return std::sqrt(best);
}

template <class Visit>
void TriangleBVH::trace(const Vec3& p, Visit&& visit) const {
  // Skewed off the coordinate axes so rays do not graze the regular
  // vertex lattices of swept and voxel meshes.
  static const Vec3 dir = Vec3(1.0, 1.2345e-4, 2.3456e-4).normalized();
  static const Vec3 inv = dir.cwiseInverse();
  std::vector<int> stack{0};
  while (!stack.empty()) {
    const Node& node = nodes_[stack.back()];
    stack.pop_back();
    double tmin = 0.0, tmax = std::numeric_limits<double>::infinity();
    bool hit = true;
    for (int a = 0; a < 3 && hit; ++a) {
      double t0 = (node.box.min()[a] - p[a]) * inv[a];
      double t1 = (node.box.max()[a] - p[a]) * inv[a];
      if (t0 > t1) std::swap(t0, t1);
      tmin = std::max(tmin, t0);
      tmax = std::min(tmax, t1);
      hit = tmin <= tmax;
    }
    if (!hit) continue;
    if (node.left >= 0) {
      stack.push_back(node.left);
      stack.push_back(node.right);
      continue;
    }
    for (int i = node.first; i < node.first + node.count; ++i) {
      const auto& t = mesh_->triangles[order_[i]];
      const Vec3& v0 = mesh_->vertices[t[0]];
      const Vec3 e1 = mesh_->vertices[t[1]] - v0;
      const Vec3 e2 = mesh_->vertices[t[2]] - v0;
      const Vec3 h = dir.cross(e2);
      const double det = e1.dot(h);
      if (det == 0.0) continue;
      const double f = 1.0 / det;
      const Vec3 s = p - v0;
      const double u = f * s.dot(h);
      if (u < 0.0 || u > 1.0) continue;
      const Vec3 q = s.cross(e1);
      const double v = f * dir.dot(q);
      if (v < 0.0 || u + v > 1.0) continue;
      if (f * e2.dot(q) <= 0.0) continue;
      visit(order_[i], det < 0.0 ? 1 : -1);
    }
  }
}

TriangleBVH::Crossings TriangleBVH::ray_crossings(const Vec3& p) const {
  Crossings out;
  trace(p, [&](int, int sign) {
    ++out.count;
    out.winding += sign;
  });
  return out;
}

std::vector<int> TriangleBVH::ray_hits(const Vec3& p) const {
  std::vector<int> out;
  trace(p, [&](int tri, int) { out.push_back(tri); });
  return out;
}

bool inside_cells(const CellMesh& cells, const TriangleBVH& bvh, const Vec3& p) {
  std::vector<int> crossed;
  for (int tri : bvh.ray_hits(p)) {
    for (int c : cells.cells[tri]) {
      if (c >= 0) crossed.push_back(c);
    }
  }
  std::sort(crossed.begin(), crossed.end());
  for (std::size_t i = 0; i < crossed.size();) {
    std::size_t j = i;
    while (j < crossed.size() && crossed[j] == crossed[i]) ++j;
    if ((j - i) % 2 == 1) return true;
    i = j;
  }
  return false;
}

double mesh_hausdorff(const TriMesh& a, const TriMesh& b, std::size_t samples, Rng& rng) {
  const TriangleBVH ba(a), bb(b);
  auto one_sided = [&](const TriMesh& from, const TriangleBVH& to) {
    PointList pts = sample_surface(from, samples, rng);
    pts.insert(pts.end(), from.vertices.begin(), from.vertices.end());
    double worst = 0.0;
    for (const Vec3& p : pts) worst = std::max(worst, to.distance(p));
    return worst;
  };
  const double ab = one_sided(a, bb);
  const double ba_ = one_sided(b, ba);
  return std::max(ab, ba_);
}

}  // namespace sweep
