#pragma once

#include <functional>
#include <utility>

#include "numerics.hpp"

namespace ncs3 {

/// Lattice data (omega, eta) for the lattice Z + Z*omega, Im(omega) > 0.
struct LatticeParams {
  cplx omega;
  cplx eta;
};

/// Projective triple (alpha : beta : gamma); equality is up to a common scale.
struct ResolventTriple {
  cplx alpha, beta, gamma;

  Vec3c vec() const { return Vec3c(alpha, beta, gamma); }
  static ResolventTriple from(const Vec3c& v) { return {v[0], v[1], v[2]}; }
  bool proj_equals(const ResolventTriple& o, double tol = proj_tol) const {
    return proj_equal(vec(), o.vec(), tol);
  }
};

// Jacobi theta functions theta_k (k = 1..4) for the lattice Z + Z*omega,
// nome q = exp(i*pi*omega).  Arguments are reduced into the fundamental cell
// using quasi-periodicity before summing the q-series.
cplx theta(int k, cplx z, cplx omega);
cplx theta_deriv(int k, cplx z, cplx omega);

// Decompose z = a + b*omega with real a, b.
std::pair<double, double> lattice_coords(cplx z, cplx omega);
// Representative of z mod Z + Z*omega with cell coordinates in [0,1).
cplx reduce_mod_lattice(cplx z, cplx omega);

// (theta2(0)^2/theta2(eta)^2, theta3(0)^2/theta3(eta)^2, theta4(0)^2/theta4(eta)^2)
ResolventTriple resolvent_from_lattice(const LatticeParams& p);

// Inverse of resolvent_from_lattice up to the (sign of eta, lattice) ambiguity;
// returns the fundamental-domain representative.  Coarse grid seeding followed
// by Newton iteration on two holomorphic coordinate ratios.
LatticeParams lattice_from_resolvent(const ResolventTriple& r);

// j-invariant of the quartic curve cut out by the pencil of quadrics attached
// to a resolvent triple, via the cross-ratio of the four degenerate pencil
// members.
cplx j_from_pencil(const ResolventTriple& r);

// j-invariant of C/(Z + Z*omega) through the theta-constant modular lambda.
cplx j_from_omega(cplx omega);

struct quad_result {
  cplx value;
  double error_estimate;
};

// Composite Gauss-Legendre quadrature of f over [a, b] with roughly n nodes.
// The error estimate compares against a half-resolution pass.  Integrand
// values beyond 1e12 in modulus raise a singular-integrand error.
quad_result path_integral(const std::function<cplx(double)>& f, double a, double b, int n);

// Nodes and weights of the n-point Gauss-Legendre rule on [-1, 1].
const std::pair<std::vector<double>, std::vector<double>>& gauss_legendre(int n);

}  // namespace ncs3
