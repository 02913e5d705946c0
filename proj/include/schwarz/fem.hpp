#pragma once

#include <array>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <vector>

#include "schwarz/linalg.hpp"

namespace schwarz::fem {

struct Point {
  double x = 0.0;
  double y = 0.0;
};

using Triangle = std::array<std::size_t, 3>;

/// Conforming P1 triangulation with a per-vertex Dirichlet marker.
struct Mesh {
  std::vector<Point> vertices;
  std::vector<Triangle> triangles;
  std::vector<bool> dirichlet;

  std::size_t num_vertices() const { return vertices.size(); }
  std::size_t num_triangles() const { return triangles.size(); }
  double signed_area(std::size_t t) const;
  Point barycenter(std::size_t t) const;

  /// Throws std::invalid_argument on bad indices, non-positive areas or
  /// edges shared by more than two triangles.
  void validate() const;
};

/// Splits each triangle into four through its edge midpoints.  Parent
/// vertices keep their indices; new vertices are appended in order of first
/// appearance, and the children of triangle t occupy slots 4t..4t+3.
Mesh uniform_refine(const Mesh& coarse);

class NotNestedError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Linear interpolation from `coarse` to `fine = uniform_refine(coarse)`:
/// 1 on retained vertices, 1/2 and 1/2 on edge midpoints.
SparseMatrix build_prolongation(const Mesh& coarse, const Mesh& fine);

/// Interpolation compatible with symmetric Dirichlet elimination: couplings
/// between Dirichlet and free vertices are dropped and Dirichlet fine
/// vertices receive plain injection.  With this transfer the Galerkin
/// product of an eliminated fine matrix is again an eliminated matrix.
SparseMatrix dirichlet_prolongation(const SparseMatrix& interpolation, const Mesh& coarse, const Mesh& fine);

struct PointSource {
  Point location;
  double charge = 1.0;
};

/// -div(diffusion grad u) + reaction u = sum_i charge_i delta(x - x_i),
/// u = dirichlet on marked vertices.
struct ProblemSpec {
  std::function<double(Point)> diffusion = [](Point) { return 1.0; };
  std::function<double(Point)> reaction = [](Point) { return 0.0; };
  std::function<double(Point)> dirichlet = [](Point) { return 0.0; };
  std::vector<PointSource> sources;
};

struct AssembledSystem {
  SparseMatrix matrix;  ///< after symmetric Dirichlet elimination
  Vector rhs;
  SparseMatrix unconstrained;  ///< stiffness + mass before elimination
  Vector unconstrained_rhs;
};

class SourceOutsideDomainError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// One-point (barycenter) quadrature P1 assembly.  Dirichlet rows and
/// columns are replaced by the identity and the rhs is corrected.
AssembledSystem assemble(const Mesh& mesh, const ProblemSpec& problem);

/// Element stiffness and one-point mass contributions for a single triangle.
std::array<std::array<double, 3>, 3> element_matrix(const Mesh& mesh, std::size_t t, const ProblemSpec& problem);

/// c * P^T A P
SparseMatrix galerkin_coarsen(const SparseMatrix& fine, const SparseMatrix& prolongation, double c = 1.0);

enum class CoarseMode { galerkin, discretized };

struct Level {
  Mesh mesh;
  SparseMatrix a;
  SparseMatrix prolongation;  ///< from the next coarser level (empty on level 0)
  SparseMatrix restriction;   ///< to the next coarser level, c * prolongation^T
  double scaling = 1.0;       ///< c
};

/// Nested levels, coarsest first.
struct Hierarchy {
  std::vector<Level> levels;
  Vector rhs;
  CoarseMode mode = CoarseMode::galerkin;

  std::size_t depth() const { return levels.size(); }
  const Level& finest() const { return levels.back(); }
  const SparseMatrix& fine_matrix() const { return levels.back().a; }
  std::size_t size() const { return levels.back().a.rows(); }
};

/// Vertex numbering on every level: the order produced by refinement
/// (parents first), or sorted by (y, x), which fixes the Gauss-Seidel order.
enum class Ordering { refinement, lexicographic };

/// Refines `base` levels-1 times; the finest operator is assembled, coarser
/// ones are Galerkin products or re-assembled per `mode`.
Hierarchy build_hierarchy(const ProblemSpec& problem, const Mesh& base, std::size_t levels, CoarseMode mode,
                          Ordering ordering = Ordering::refinement);

/// Renumbers the vertices of every level by (y, x), permuting meshes,
/// operators, transfers and the rhs consistently.
void renumber_lexicographic(Hierarchy& h);

/// Composite prolongation from level `from` to the finest level.
SparseMatrix composite_prolongation(const Hierarchy& h, std::size_t from);

/// Returns the index of the lowest-numbered triangle containing p, or
/// throws SourceOutsideDomainError.
std::size_t locate(const Mesh& mesh, Point p);
std::array<double, 3> barycentric(const Mesh& mesh, std::size_t t, Point p);

// Mesh text format: vertex count, "x y flag" lines, triangle count, "i j k" lines.
Mesh read_mesh(std::istream& in);
Mesh read_mesh(const std::filesystem::path& path);
void write_mesh(std::ostream& out, const Mesh& mesh);
void write_mesh(const std::filesystem::path& path, const Mesh& mesh);

/// Writes level_<k>.mtx, prolongation_<k>.mtx, mesh_<k>.txt and manifest.json.
void export_hierarchy(const Hierarchy& h, const std::filesystem::path& directory);

}  // namespace schwarz::fem
