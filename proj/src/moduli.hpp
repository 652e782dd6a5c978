#pragma once

#include <array>
#include <vector>

#include "numerics.hpp"

namespace ncs3 {

/// Torus angles (phi_1, phi_2, phi_3), each taken modulo pi, stored in [0, pi).
struct PhiAngles {
  std::array<double, 3> v;

  static PhiAngles reduced(double a, double b, double c) {
    return {{wrap_angle(a, pi), wrap_angle(b, pi), wrap_angle(c, pi)}};
  }
};

/// Coordinates (psi_1, psi_2, psi_3) modulo the lattice {psi_i +- psi_j in pi Z}.
struct PsiCoords {
  std::array<double, 3> v;
};

PsiCoords phi_to_psi(const PhiAngles& p);
PhiAngles psi_to_phi(const PsiCoords& s);

// Difference lies in the lattice: all entries near multiples of pi/2 with a
// common parity.
bool psi_equal_mod_lattice(const PsiCoords& a, const PsiCoords& b, double tol = 1e-12);

// Weyl action in the phi chart: a permutation of the four homogeneous angles
// (0, phi_1, phi_2, phi_3) followed by renormalizing the 0th slot.
PhiAngles weyl_act_phi(const std::array<int, 4>& perm, const PhiAngles& p);

// The three transpositions printed for the phi chart.
enum class transposition { t01, t12, t23 };
PhiAngles weyl_act_phi(transposition t, const PhiAngles& p);

/// Signed permutation with sign product +1 (the psi-chart Weyl group).
struct SignedPerm {
  std::array<int, 3> perm;  // images: psi'_k = sign[k] * psi[perm[k]]
  std::array<int, 3> sign;
};
PsiCoords weyl_act_psi(const SignedPerm& w, const PsiCoords& s);

// Fiber invariants (J_12, J_23, J_31), tan form on the torus chart and the
// rational form on homogeneous complex coordinates.
std::array<double, 3> invariants_J(const PhiAngles& p);
Vec3c invariants_J(const Vec4c& u);

double scaling_H0(const PsiCoords& s);
std::array<double, 3> scaling_field_psi(const PsiCoords& s);
std::array<double, 3> scaling_field_phi(const PhiAngles& p);

struct FlowSample {
  double t;
  PsiCoords psi;
  double H0;
  std::array<double, 3> J;
};

// Fixed-step RK4 integration of the scaling field, with a per-step guard on
// the change of H0.
std::vector<FlowSample> flow_integrate(const PsiCoords& start, double t_final, double dt);

// Super-trace of the block rotation with the given angles acting on the
// 20-dimensional third exterior power, split by the Hodge-star eigenvalue.
double signature_character(const std::array<double, 3>& theta);
std::array<double, 3> signature_character_grad(const std::array<double, 3>& theta,
                                               double h = 1e-6);

}  // namespace ncs3
