#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "schwarz/fem.hpp"

namespace schwarz::problems {

/// [0,1]^2 split into cells x cells squares, each cut along its rising
/// diagonal.  Every boundary vertex is Dirichlet.
fem::Mesh unit_square_mesh(std::size_t cells);

/// -Laplace u = 0 with zero boundary data.
fem::ProblemSpec laplace_problem();

/// [-1,1]^2 minus [0,1]x[-1,0]: 36 triangles, 25 vertices, graded toward
/// the re-entrant corner at the origin.
fem::Mesh lshape_mesh();

/// Laplace with boundary data sqrt(r) sin(theta/2), theta in [0, 2pi).
fem::ProblemSpec lshape_problem();
double lshape_exact(fem::Point p);

/// Unit square, 10 triangles, 9 vertices.
fem::Mesh pbe_mesh();

/// Disc of the polygonal molecule: a regular polygon.
struct Atom {
  fem::Point centre;
  double radius = 0.0;
  std::size_t sides = 12;
};

struct Molecule {
  std::vector<Atom> atoms;
  double eps_inside = 1.0;
  double eps_outside = 80.0;
  double kappa2_inside = 0.0;
  double kappa2_outside = 1.0;

  bool contains(fem::Point p) const;
};

Molecule default_molecule();

/// Linearized Poisson-Boltzmann model with a unit charge at each atom centre
/// and screened-Coulomb boundary data.
fem::ProblemSpec pbe_problem(const Molecule& molecule = default_molecule());

}  // namespace schwarz::problems
