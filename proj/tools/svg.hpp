#pragma once

#include <string>
#include <vector>

#include "gffi/lattice.hpp"

namespace gffi::svg {

// Lozenge snapshot: white triangles joined to their black partner, coloured
// by type; particles (type I) drawn as diamonds.
std::string tiling(const ParticleConfiguration& cfg);

struct BoundaryCurve {
  double tau = 1.0;
  std::vector<double> eta, q1, q2;
};

// q1 and q2 against eta, one pair of curves per tau.
std::string frozen_boundary(const std::vector<BoundaryCurve>& curves);

}  // namespace gffi::svg
