#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "matspec/types.hpp"

namespace matspec {

// Lagrangian pair (Y, Z) at real lambda with a balancing scale c supplied by the
// scan: Y*Z Hermitian, eigenvalues are the lambda where Z is singular. The scan
// works on the unitary U = (Y - iZ)(Y + iZ)^{-1}, whose eigenphases cross 0
// exactly at eigenvalues. For fixed c the pencil must satisfy
// Y*Z' - Z*Y' < 0 in lambda, so that all eigenphases increase.
using Pencil = std::function<void(double lambda, double c, CMat& Y, CMat& Z)>;

// The same planes along x in [0, pi] at fixed lambda, handed to visit in order
// from x = 0. Consecutive planes must be close (eigenphase moves well below 1).
using PlaneVisit = std::function<void(const CMat& Y, const CMat& Z)>;
using PathPencil = std::function<void(double lambda, const PlaneVisit& visit)>;

// Oscillation index: eigenphases tracked continuously along the path, summed
// floor(theta / 2 pi) at x = pi. The number of eigenvalues in (a, b] equals
// path_index(b) - path_index(a) for a, b off the spectrum.
int path_index(const PathPencil& path, double lambda);

struct ScanOptions {
  double ds = 0.1;         // mesh step in s, lambda = s|s|
  double offset = 0.0371;  // keeps integers and half-integers off the mesh
  double s_low = -1;       // scan start, below every eigenvalue
  double s_stop = 0;       // scan at least up to here
  double s_cap = 0;        // give up beyond here
  std::size_t target = 0;  // stop once this many roots are found past s_stop
};

struct ScanResult {
  std::vector<double> lambda;  // sorted, with multiplicity
  double s_end = 0;            // every root below s_end is included
};

// Sorted eigenphases in (-pi, pi].
std::vector<double> eigenphases(const CMat& Y, const CMat& Z);

// With a path pencil the scanned roots are checked against the oscillation
// index and any interval where they disagree is redone by bisection on it.
ScanResult scan_eigenvalues(const Pencil& pencil, const ScanOptions& opt,
                            const PathPencil& path = {});

inline double s_to_lambda(double s) { return s * std::abs(s); }
double lambda_to_s(double lambda);

}  // namespace matspec
