#include "schwarz/problems.hpp"

#include <cmath>
#include <numbers>

namespace schwarz::problems {

using fem::Mesh;
using fem::Point;

fem::Mesh unit_square_mesh(std::size_t cells) {
  if (cells == 0) throw std::invalid_argument("unit_square_mesh: need at least one cell");
  Mesh m;
  const std::size_t side = cells + 1;
  for (std::size_t j = 0; j < side; ++j)
    for (std::size_t i = 0; i < side; ++i) {
      m.vertices.push_back({static_cast<double>(i) / cells, static_cast<double>(j) / cells});
      m.dirichlet.push_back(i == 0 || j == 0 || i == cells || j == cells);
    }
  for (std::size_t j = 0; j < cells; ++j)
    for (std::size_t i = 0; i < cells; ++i) {
      std::size_t v = j * side + i;
      m.triangles.push_back({v, v + 1, v + side + 1});
      m.triangles.push_back({v, v + side + 1, v + side});
    }
  return m;
}

fem::ProblemSpec laplace_problem() { return {}; }

fem::Mesh lshape_mesh() {
  Mesh m;
  m.vertices = {{-1, -1}, {0, -1}, {0, 0}, {1, 0}, {1, 1}, {-1, 1},
                {0, 1}, {-1, 0}, {-0.5, -1}, {0, -0.5}, {0.5, 0}, {1, 0.5},
                {-0.598, -0.116}, {0.116, 0.598}, {-0.293, -0.185}, {0.185, 0.293}, {-0.327, -0.658}, {0.658, 0.327},
                {-0.512, 0.168}, {-0.168, 0.512}, {-0.592, -0.54}, {0.54, 0.592}, {-0.583, 0.583}, {-0.361, 0.361},
                {-0.179, 0.179}};
  m.dirichlet.assign(m.vertices.size(), false);
  for (std::size_t i = 0; i < 12; ++i) m.dirichlet[i] = true;
  m.triangles = {{6, 21, 4}, {7, 22, 5}, {8, 16, 20}, {8, 20, 0}, {9, 16, 1}, {10, 15, 2},
                 {11, 17, 3}, {11, 21, 17}, {12, 18, 7}, {13, 21, 6}, {14, 9, 2}, {14, 12, 20},
                 {14, 16, 9}, {15, 10, 17}, {15, 21, 13}, {15, 24, 2}, {16, 8, 1}, {16, 14, 20},
                 {17, 10, 3}, {18, 12, 14}, {18, 22, 7}, {18, 23, 22}, {18, 24, 23}, {19, 13, 6},
                 {19, 15, 13}, {19, 24, 15}, {20, 7, 0}, {20, 12, 7}, {21, 11, 4}, {21, 15, 17},
                 {22, 6, 5}, {22, 19, 6}, {23, 19, 22}, {24, 14, 2}, {24, 18, 14}, {24, 19, 23}};
  return m;
}

double lshape_exact(fem::Point p) {
  const double r = std::hypot(p.x, p.y);
  double theta = std::atan2(p.y, p.x);
  if (theta < 0.0) theta += 2.0 * std::numbers::pi;
  return std::sqrt(r) * std::sin(0.5 * theta);
}

fem::ProblemSpec lshape_problem() {
  fem::ProblemSpec p;
  p.dirichlet = lshape_exact;
  return p;
}

fem::Mesh pbe_mesh() {
  Mesh m;
  m.vertices = {{0, 0}, {0.5, 0}, {1, 0}, {1, 1}, {0.5, 1}, {0, 1}, {0.25, 0.5}, {0.5, 0.5}, {0.75, 0.5}};
  m.dirichlet = {true, true, true, true, true, true, false, false, false};
  m.triangles = {{0, 1, 6}, {1, 7, 6}, {1, 8, 7}, {1, 2, 8}, {2, 3, 8},
                 {8, 3, 4}, {7, 8, 4}, {6, 7, 4}, {6, 4, 5}, {0, 6, 5}};
  return m;
}

bool Molecule::contains(fem::Point p) const {
  for (const auto& a : atoms) {
    bool inside = true;
    for (std::size_t k = 0; k < a.sides && inside; ++k) {
      const double t0 = 2.0 * std::numbers::pi * k / a.sides;
      const double t1 = 2.0 * std::numbers::pi * (k + 1) / a.sides;
      const Point v0{a.centre.x + a.radius * std::cos(t0), a.centre.y + a.radius * std::sin(t0)};
      const Point v1{a.centre.x + a.radius * std::cos(t1), a.centre.y + a.radius * std::sin(t1)};
      inside = (v1.x - v0.x) * (p.y - v0.y) - (v1.y - v0.y) * (p.x - v0.x) >= 0.0;
    }
    if (inside) return true;
  }
  return false;
}

Molecule default_molecule() {
  Molecule m;
  m.atoms = {{{0.4167, 0.1667}, 0.12, 12}, {{0.5833, 0.6667}, 0.12, 12}, {{0.25, 0.8333}, 0.12, 12}};
  return m;
}

fem::ProblemSpec pbe_problem(const Molecule& molecule) {
  fem::ProblemSpec p;
  p.diffusion = [molecule](Point x) { return molecule.contains(x) ? molecule.eps_inside : molecule.eps_outside; };
  p.reaction = [molecule](Point x) {
    return molecule.contains(x) ? molecule.kappa2_inside : molecule.kappa2_outside;
  };
  for (const auto& a : molecule.atoms) p.sources.push_back({a.centre, 1.0});
  const double eps = molecule.eps_outside;
  const double screening = std::sqrt(molecule.kappa2_outside / eps);
  auto sources = p.sources;
  p.dirichlet = [sources, eps, screening](Point x) {
    double u = 0.0;
    for (const auto& s : sources) {
      const double r = std::hypot(x.x - s.location.x, x.y - s.location.y);
      const double g = screening > 0.0 ? std::cyl_bessel_k(0.0, screening * r) : -std::log(r);
      u += s.charge * g / (2.0 * std::numbers::pi * eps);
    }
    return u;
  };
  return p;
}

}  // namespace schwarz::problems
