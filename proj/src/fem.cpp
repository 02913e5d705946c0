#include "schwarz/fem.hpp"

#include <algorithm>
#include <numeric>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>
#include <string>
#include <utility>

#include "json.hpp"

#include "schwarz/io.hpp"

namespace schwarz::fem {

namespace {

using Edge = std::pair<std::size_t, std::size_t>;

Edge make_edge(std::size_t a, std::size_t b) { return a < b ? Edge{a, b} : Edge{b, a}; }

std::map<Edge, std::size_t> edge_counts(const Mesh& m) {
  std::map<Edge, std::size_t> count;
  for (const auto& t : m.triangles)
    for (int e = 0; e < 3; ++e) ++count[make_edge(t[e], t[(e + 1) % 3])];
  return count;
}

Point midpoint(Point a, Point b) { return {0.5 * (a.x + b.x), 0.5 * (a.y + b.y)}; }

}  // namespace

double Mesh::signed_area(std::size_t t) const {
  const auto& [a, b, c] = triangles[t];
  const Point& p = vertices[a];
  const Point& q = vertices[b];
  const Point& r = vertices[c];
  return 0.5 * ((q.x - p.x) * (r.y - p.y) - (r.x - p.x) * (q.y - p.y));
}

Point Mesh::barycenter(std::size_t t) const {
  const auto& [a, b, c] = triangles[t];
  return {(vertices[a].x + vertices[b].x + vertices[c].x) / 3.0,
          (vertices[a].y + vertices[b].y + vertices[c].y) / 3.0};
}

void Mesh::validate() const {
  if (dirichlet.size() != vertices.size())
    throw std::invalid_argument("mesh: dirichlet marker count differs from vertex count");
  for (std::size_t t = 0; t < triangles.size(); ++t) {
    for (auto v : triangles[t])
      if (v >= vertices.size()) throw std::invalid_argument("mesh: triangle " + std::to_string(t) + " has bad vertex index");
    if (!(signed_area(t) > 0.0))
      throw std::invalid_argument("mesh: triangle " + std::to_string(t) + " has non-positive area");
  }
  for (const auto& [edge, n] : edge_counts(*this))
    if (n > 2)
      throw std::invalid_argument("mesh: edge (" + std::to_string(edge.first) + "," + std::to_string(edge.second) +
                                  ") shared by more than two triangles");
}

Mesh uniform_refine(const Mesh& coarse) {
  const auto counts = edge_counts(coarse);
  Mesh fine;
  fine.vertices = coarse.vertices;
  fine.dirichlet = coarse.dirichlet;
  fine.triangles.reserve(4 * coarse.num_triangles());
  std::map<Edge, std::size_t> mid;
  auto midpoint_of = [&](std::size_t a, std::size_t b) {
    auto e = make_edge(a, b);
    auto it = mid.find(e);
    if (it != mid.end()) return it->second;
    std::size_t idx = fine.vertices.size();
    fine.vertices.push_back(midpoint(coarse.vertices[e.first], coarse.vertices[e.second]));
    bool boundary_edge = counts.at(e) == 1;
    fine.dirichlet.push_back(boundary_edge && coarse.dirichlet[a] && coarse.dirichlet[b]);
    mid.emplace(e, idx);
    return idx;
  };
  for (const auto& [a, b, c] : coarse.triangles) {
    std::size_t ab = midpoint_of(a, b);
    std::size_t bc = midpoint_of(b, c);
    std::size_t ca = midpoint_of(c, a);
    fine.triangles.push_back({a, ab, ca});
    fine.triangles.push_back({ab, b, bc});
    fine.triangles.push_back({ca, bc, c});
    fine.triangles.push_back({ab, bc, ca});
  }
  return fine;
}

SparseMatrix build_prolongation(const Mesh& coarse, const Mesh& fine) {
  const std::size_t nc = coarse.num_vertices();
  if (fine.num_vertices() < nc || fine.num_triangles() != 4 * coarse.num_triangles())
    throw NotNestedError("prolongation: fine mesh is not a uniform refinement of the coarse mesh");
  for (std::size_t i = 0; i < nc; ++i)
    if (fine.vertices[i].x != coarse.vertices[i].x || fine.vertices[i].y != coarse.vertices[i].y)
      throw NotNestedError("prolongation: coarse vertex " + std::to_string(i) + " not retained");

  std::vector<Triplet> t;
  for (std::size_t i = 0; i < nc; ++i) t.push_back({i, i, 1.0});
  std::map<Edge, std::size_t> mid;
  std::size_t next = nc;
  for (const auto& [a, b, c] : coarse.triangles) {
    for (auto [p, q] : {Edge{a, b}, Edge{b, c}, Edge{c, a}}) {
      auto e = make_edge(p, q);
      if (mid.contains(e)) continue;
      if (next >= fine.num_vertices())
        throw NotNestedError("prolongation: fine mesh has too few vertices");
      Point m = midpoint(coarse.vertices[e.first], coarse.vertices[e.second]);
      if (fine.vertices[next].x != m.x || fine.vertices[next].y != m.y)
        throw NotNestedError("prolongation: fine vertex " + std::to_string(next) + " is not the expected edge midpoint");
      mid.emplace(e, next);
      t.push_back({next, e.first, 0.5});
      t.push_back({next, e.second, 0.5});
      ++next;
    }
  }
  if (next != fine.num_vertices()) throw NotNestedError("prolongation: fine mesh has extra vertices");
  return SparseMatrix(fine.num_vertices(), nc, std::move(t));
}

SparseMatrix dirichlet_prolongation(const SparseMatrix& interpolation, const Mesh& coarse, const Mesh& fine) {
  std::vector<Triplet> kept;
  for (const auto& e : interpolation.triplets()) {
    const bool fd = fine.dirichlet[e.row];
    const bool cd = coarse.dirichlet[e.col];
    if (!fd && !cd) kept.push_back(e);
    else if (fd && cd && e.row == e.col) kept.push_back({e.row, e.col, 1.0});
  }
  return SparseMatrix(interpolation.rows(), interpolation.cols(), std::move(kept));
}

std::array<double, 3> barycentric(const Mesh& mesh, std::size_t t, Point p) {
  const auto& [a, b, c] = mesh.triangles[t];
  const Point& p0 = mesh.vertices[a];
  const Point& p1 = mesh.vertices[b];
  const Point& p2 = mesh.vertices[c];
  const double det = (p1.x - p0.x) * (p2.y - p0.y) - (p2.x - p0.x) * (p1.y - p0.y);
  const double l1 = ((p.x - p0.x) * (p2.y - p0.y) - (p2.x - p0.x) * (p.y - p0.y)) / det;
  const double l2 = ((p1.x - p0.x) * (p.y - p0.y) - (p.x - p0.x) * (p1.y - p0.y)) / det;
  return {1.0 - l1 - l2, l1, l2};
}

std::size_t locate(const Mesh& mesh, Point p) {
  constexpr double tol = 1e-12;
  for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
    auto l = barycentric(mesh, t, p);
    if (l[0] >= -tol && l[1] >= -tol && l[2] >= -tol) return t;
  }
  std::ostringstream msg;
  msg << "point (" << p.x << ", " << p.y << ") lies outside the mesh";
  throw SourceOutsideDomainError(msg.str());
}

std::array<std::array<double, 3>, 3> element_matrix(const Mesh& mesh, std::size_t t, const ProblemSpec& problem) {
  const auto& tri = mesh.triangles[t];
  const double area = mesh.signed_area(t);
  const Point centre = mesh.barycenter(t);
  const double eps = problem.diffusion(centre);
  const double kappa2 = problem.reaction(centre);
  std::array<double, 3> gx{}, gy{};
  for (int i = 0; i < 3; ++i) {
    const Point& q = mesh.vertices[tri[(i + 1) % 3]];
    const Point& r = mesh.vertices[tri[(i + 2) % 3]];
    gx[i] = (q.y - r.y) / (2.0 * area);
    gy[i] = (r.x - q.x) / (2.0 * area);
  }
  std::array<std::array<double, 3>, 3> k{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) k[i][j] = eps * area * (gx[i] * gx[j] + gy[i] * gy[j]) + kappa2 * area / 9.0;
  return k;
}

AssembledSystem assemble(const Mesh& mesh, const ProblemSpec& problem) {
  const std::size_t n = mesh.num_vertices();
  std::vector<Triplet> t;
  t.reserve(9 * mesh.num_triangles());
  for (std::size_t e = 0; e < mesh.num_triangles(); ++e) {
    auto k = element_matrix(mesh, e, problem);
    const auto& tri = mesh.triangles[e];
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) t.push_back({tri[i], tri[j], k[i][j]});
  }
  AssembledSystem sys;
  sys.unconstrained = SparseMatrix(n, n, t);
  sys.unconstrained_rhs.assign(n, 0.0);
  for (const auto& s : problem.sources) {
    std::size_t e = locate(mesh, s.location);
    auto l = barycentric(mesh, e, s.location);
    for (int i = 0; i < 3; ++i) sys.unconstrained_rhs[mesh.triangles[e][i]] += s.charge * l[i];
  }

  Vector g(n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    if (mesh.dirichlet[i]) g[i] = problem.dirichlet(mesh.vertices[i]);
  sys.rhs = sys.unconstrained_rhs;
  std::vector<Triplet> reduced;
  reduced.reserve(t.size());
  for (const auto& e : sys.unconstrained.triplets()) {
    const bool rd = mesh.dirichlet[e.row];
    const bool cd = mesh.dirichlet[e.col];
    if (!rd && !cd) reduced.push_back(e);
    else if (!rd && cd) sys.rhs[e.row] -= e.value * g[e.col];
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (mesh.dirichlet[i]) {
      reduced.push_back({i, i, 1.0});
      sys.rhs[i] = g[i];
    }
  }
  sys.matrix = SparseMatrix(n, n, std::move(reduced));
  return sys;
}

SparseMatrix galerkin_coarsen(const SparseMatrix& fine, const SparseMatrix& prolongation, double c) {
  if (!(c > 0.0)) throw std::invalid_argument("galerkin_coarsen: scaling must be positive");
  if (fine.cols() != prolongation.rows() || fine.rows() != prolongation.rows())
    throw DimensionError("galerkin_coarsen: prolongation rows must match the fine operator");
  return multiply(prolongation.transpose(), multiply(fine, prolongation)).scaled(c);
}

Hierarchy build_hierarchy(const ProblemSpec& problem, const Mesh& base, std::size_t levels, CoarseMode mode,
                          Ordering ordering) {
  if (levels < 2) throw std::invalid_argument("build_hierarchy: need at least two levels");
  base.validate();
  Hierarchy h;
  h.mode = mode;
  h.levels.resize(levels);
  h.levels[0].mesh = base;
  for (std::size_t k = 1; k < levels; ++k) h.levels[k].mesh = uniform_refine(h.levels[k - 1].mesh);
  for (std::size_t k = 1; k < levels; ++k) {
    auto& lv = h.levels[k];
    lv.prolongation = dirichlet_prolongation(build_prolongation(h.levels[k - 1].mesh, lv.mesh), h.levels[k - 1].mesh, lv.mesh);
    lv.scaling = 1.0;
    lv.restriction = lv.prolongation.transpose().scaled(lv.scaling);
  }
  auto fine = assemble(h.levels.back().mesh, problem);
  h.levels.back().a = std::move(fine.matrix);
  h.rhs = std::move(fine.rhs);
  for (std::size_t k = levels - 1; k-- > 0;) {
    if (mode == CoarseMode::galerkin) {
      const auto& up = h.levels[k + 1];
      h.levels[k].a = galerkin_coarsen(up.a, up.prolongation, up.scaling);
    } else {
      h.levels[k].a = assemble(h.levels[k].mesh, problem).matrix;
    }
  }
  if (ordering == Ordering::lexicographic) renumber_lexicographic(h);
  return h;
}

namespace {

/// new_index[old] for a (y, x) sort of the vertices.
std::vector<std::size_t> lexicographic_order(const Mesh& m) {
  std::vector<std::size_t> old_of(m.num_vertices());
  std::iota(old_of.begin(), old_of.end(), std::size_t{0});
  std::stable_sort(old_of.begin(), old_of.end(), [&](std::size_t i, std::size_t j) {
    const auto& a = m.vertices[i];
    const auto& b = m.vertices[j];
    return a.y != b.y ? a.y < b.y : a.x < b.x;
  });
  std::vector<std::size_t> new_of(old_of.size());
  for (std::size_t k = 0; k < old_of.size(); ++k) new_of[old_of[k]] = k;
  return new_of;
}

SparseMatrix permute(const SparseMatrix& a, const std::vector<std::size_t>& rows, const std::vector<std::size_t>& cols) {
  auto t = a.triplets();
  for (auto& e : t) {
    e.row = rows[e.row];
    e.col = cols[e.col];
  }
  return SparseMatrix(a.rows(), a.cols(), std::move(t));
}

}  // namespace

void renumber_lexicographic(Hierarchy& h) {
  std::vector<std::vector<std::size_t>> maps;
  for (auto& lv : h.levels) {
    auto new_of = lexicographic_order(lv.mesh);
    Mesh m = lv.mesh;
    for (std::size_t i = 0; i < new_of.size(); ++i) {
      m.vertices[new_of[i]] = lv.mesh.vertices[i];
      m.dirichlet[new_of[i]] = lv.mesh.dirichlet[i];
    }
    for (auto& t : m.triangles)
      for (auto& v : t) v = new_of[v];
    lv.mesh = std::move(m);
    lv.a = permute(lv.a, new_of, new_of);
    maps.push_back(std::move(new_of));
  }
  for (std::size_t k = 1; k < h.depth(); ++k) {
    auto& lv = h.levels[k];
    lv.prolongation = permute(lv.prolongation, maps[k], maps[k - 1]);
    lv.restriction = permute(lv.restriction, maps[k - 1], maps[k]);
  }
  if (!h.rhs.empty()) {
    Vector r(h.rhs.size());
    for (std::size_t i = 0; i < r.size(); ++i) r[maps.back()[i]] = h.rhs[i];
    h.rhs = std::move(r);
  }
}

SparseMatrix composite_prolongation(const Hierarchy& h, std::size_t from) {
  if (from >= h.depth()) throw std::out_of_range("composite_prolongation: level out of range");
  SparseMatrix p = SparseMatrix::identity(h.levels[from].a.rows());
  for (std::size_t k = from + 1; k < h.depth(); ++k) p = multiply(h.levels[k].prolongation, p);
  return p;
}

Mesh read_mesh(std::istream& in) {
  Mesh m;
  std::size_t nv = 0, nt = 0;
  if (!(in >> nv)) throw io::FormatError("mesh: missing vertex count");
  m.vertices.resize(nv);
  m.dirichlet.resize(nv);
  for (std::size_t i = 0; i < nv; ++i) {
    int flag = 0;
    if (!(in >> m.vertices[i].x >> m.vertices[i].y >> flag)) throw io::FormatError("mesh: malformed vertex line");
    m.dirichlet[i] = flag != 0;
  }
  if (!(in >> nt)) throw io::FormatError("mesh: missing triangle count");
  m.triangles.resize(nt);
  for (auto& t : m.triangles)
    if (!(in >> t[0] >> t[1] >> t[2])) throw io::FormatError("mesh: malformed triangle line");
  m.validate();
  return m;
}

Mesh read_mesh(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return read_mesh(in);
}

void write_mesh(std::ostream& out, const Mesh& mesh) {
  out << std::setprecision(17) << mesh.num_vertices() << '\n';
  for (std::size_t i = 0; i < mesh.num_vertices(); ++i)
    out << mesh.vertices[i].x << ' ' << mesh.vertices[i].y << ' ' << (mesh.dirichlet[i] ? 1 : 0) << '\n';
  out << mesh.num_triangles() << '\n';
  for (const auto& t : mesh.triangles) out << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
}

void write_mesh(const std::filesystem::path& path, const Mesh& mesh) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  write_mesh(out, mesh);
}

void export_hierarchy(const Hierarchy& h, const std::filesystem::path& directory) {
  std::filesystem::create_directories(directory);
  nlohmann::json manifest;
  manifest["coarse_mode"] = h.mode == CoarseMode::galerkin ? "galerkin" : "discretized";
  manifest["levels"] = nlohmann::json::array();
  for (std::size_t k = 0; k < h.depth(); ++k) {
    const auto& lv = h.levels[k];
    const std::string tag = std::to_string(k);
    io::write_matrix_market(directory / ("level_" + tag + ".mtx"), lv.a, true);
    write_mesh(directory / ("mesh_" + tag + ".txt"), lv.mesh);
    nlohmann::json entry{{"level", k},
                         {"dimension", lv.a.rows()},
                         {"nonzeros", lv.a.nnz()},
                         {"elements", lv.mesh.num_triangles()},
                         {"matrix", "level_" + tag + ".mtx"},
                         {"mesh", "mesh_" + tag + ".txt"}};
    if (k > 0) {
      io::write_matrix_market(directory / ("prolongation_" + tag + ".mtx"), lv.prolongation);
      entry["prolongation"] = "prolongation_" + tag + ".mtx";
      entry["c"] = lv.scaling;
    }
    manifest["levels"].push_back(entry);
  }
  io::write_vector(directory / "rhs.txt", h.rhs);
  manifest["rhs"] = "rhs.txt";
  std::ofstream out(directory / "manifest.json");
  out << manifest.dump(2) << '\n';
}

}  // namespace schwarz::fem
