#pragma once

#include "sweep/frames.hpp"
#include "sweep/random.hpp"

#include <Eigen/Geometry>

#include <array>
#include <iosfwd>
#include <string>
#include <vector>

namespace sweep {

struct TriMesh {
  std::vector<Vec3> vertices;
  std::vector<std::array<int, 3>> triangles;
  /// Set by sweep_mesh when consecutive slices cross each other; such a
  /// mesh is a valid soup but not a two-manifold boundary.
  bool folded = false;
};

/// Side surface stitching m slices of c contour points plus two fan caps
/// around the end-frame origins. V = m c + 2, F = 2 c (m - 1) + 2 c.
TriMesh sweep_mesh(const SweepPrimitive& primitive, int frames, int contour);

/// The sweep cut into m - 1 closed segment cells: the side quads of segment
/// i plus the slice polygons fanned around the frame origins. Each triangle
/// records the one or two cells it bounds (second entry -1 when one).
/// Folding or self-overlapping sweeps break global parity but each cell
/// stays closed, so the union of cells is well defined.
struct CellMesh {
  TriMesh mesh;
  std::vector<std::array<int, 2>> cells;
  int cell_count = 0;
};

CellMesh sweep_cells(const SweepPrimitive& primitive, int frames, int contour);

/// Concatenation with reindexed triangles.
TriMesh merge_meshes(const std::vector<TriMesh>& meshes);

/// V - E + F over undirected edges.
long euler_characteristic(const TriMesh& mesh);

/// Every undirected edge is used by exactly two triangles with opposite
/// orientation.
bool is_closed(const TriMesh& mesh);

double triangle_area(const TriMesh& mesh, std::size_t index);
double surface_area(const TriMesh& mesh);

/// Area-uniform surface samples.
PointList sample_surface(const TriMesh& mesh, std::size_t count, Rng& rng);

/// OBJ text: "v x y z" lines, then "f i j k" (1-based), %.9g. With names,
/// each mesh becomes a group "g <name>" with its vertices and faces.
void write_obj(std::ostream& out, const TriMesh& mesh);
void write_obj(std::ostream& out, const std::vector<TriMesh>& meshes, const std::vector<std::string>& names);
void write_obj_file(const std::string& path, const std::vector<TriMesh>& meshes,
                    const std::vector<std::string>& names);
/// Reads v/f records (groups merged; polygon faces fanned). Throws FormatError.
TriMesh read_obj(std::istream& in);
TriMesh read_obj_file(const std::string& path);

/// Bounding volume hierarchy over the triangles of a mesh.
class TriangleBVH {
 public:
  explicit TriangleBVH(const TriMesh& mesh);

  /// Unsigned distance from p to the surface.
  double distance(const Vec3& p) const;

  /// Number of ray crossings and signed crossing sum (winding number)
  /// along a fixed slightly skewed +x ray from p.
  struct Crossings {
    int count = 0;
    int winding = 0;
  };
  Crossings ray_crossings(const Vec3& p) const;

  /// Indices of the triangles hit by the same ray.
  std::vector<int> ray_hits(const Vec3& p) const;

  /// Odd number of crossings.
  bool inside_parity(const Vec3& p) const { return (ray_crossings(p).count & 1) != 0; }
  /// Nonzero winding number.
  bool inside_winding(const Vec3& p) const { return ray_crossings(p).winding != 0; }

  const Eigen::AlignedBox3d& bounds() const { return nodes_.front().box; }

 private:
  template <class Visit>
  void trace(const Vec3& p, Visit&& visit) const;

  struct Node {
    Eigen::AlignedBox3d box;
    int left = -1, right = -1;
    int first = 0, count = 0;
  };
  int build(int first, int count, int depth);

  const TriMesh* mesh_;
  std::vector<int> order_;
  std::vector<Eigen::AlignedBox3d> boxes_;
  std::vector<Vec3> centers_;
  std::vector<Node> nodes_;
};

/// Inside the union of cells: some cell is crossed an odd number of times.
bool inside_cells(const CellMesh& cells, const TriangleBVH& bvh, const Vec3& p);

/// Symmetric Hausdorff distance estimated from the vertices plus `samples`
/// area samples of each mesh, measured against the other surface exactly.
double mesh_hausdorff(const TriMesh& a, const TriMesh& b, std::size_t samples, Rng& rng);

/// Closest point on triangle (a, b, c) to p.
Vec3 closest_point_on_triangle(const Vec3& p, const Vec3& a, const Vec3& b, const Vec3& c);

}  // namespace sweep
