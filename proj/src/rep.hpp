#pragma once

#include <functional>

#include "algebra.hpp"
#include "fiber.hpp"

namespace ncs3 {

/// Window of a sigma orbit on an even fiber, with the conjugate points and the
/// values of the sphere form along it.
struct OrbitData {
  const FiberCurve* fiber = nullptr;
  int N = 0;  // sites n in [-N, N]
  RealInvolution ju;
  Mat4c Q;                    // sphere quadratic form in the curve coordinates
  TorusLine orbit_line;       // K(v) = v + C_u in the psi gauge
  std::vector<cplx> z;        // tracked parameters
  std::vector<Vec4c> Z;       // orbit points (psi-gauge lifts)
  std::vector<Vec4c> Zj;      // conjugates j(Z_n)
  std::vector<double> Qval;   // Q(Z_n, j(Z_n)) > 0

  const Vec4c& at(int n) const { return Z[n + N]; }
  double qval(int n) const { return Qval[n + N]; }
};

// Sphere quadratic form of the torus modulus in the adapted generator basis.
Mat4c sphere_form(const ModulusPoint& m);

// Iterate sigma from v with Newton re-polishing onto the fiber every ten
// steps; requires an even generic torus modulus and v on the torus-real or
// real component through the base points.
OrbitData build_orbit(const FiberCurve& f, const CurvePoint& v, int N);

/// Truncated weighted-shift model of the cross-product along the orbit.
struct ShiftRep {
  const OrbitData* orbit = nullptr;
  Vec4c L;                  // gauge linear form
  Eigen::VectorXd w;        // w[n+N] = W_{n,n+1}, n in [-N, N-1]

  int size() const { return 2 * orbit->N + 1; }
  Eigen::MatrixXcd shift_W() const;
  Eigen::MatrixXcd diag(const std::function<cplx(const Vec4c&)>& f) const;
  // sqrt(2) theta(Y) = Y W + W* adj(Y): tridiagonal with zero diagonal.
  Eigen::MatrixXcd theta(const Vec4c& Y) const;
};

ShiftRep build_theta_rep(const OrbitData& o, const Vec4c& L);

// Max interior residual of the six quadratic relations under theta.
double relation_residual(const ShiftRep& rep, const AlgebraPresentation& a, int margin = 2);
// Interior residual of theta(Q) - 1.
double sphere_residual(const ShiftRep& rep, int margin = 2);

struct NormBounds {
  double sup_metric;   // Sup_K |Y| in the bundle metric
  double theta_norm;   // operator norm of the truncated theta(Y)
  bool lower_ok;       // Sup <= sqrt(2) |theta| (with slack)
  bool upper_ok;       // sqrt(2) |theta| <= 2 Sup (with slack)
};
NormBounds norm_bounds_check(const ShiftRep& rep, const Vec4c& Y, double slack = 0.05,
                             int metric_samples = 1000);

// Invariant trace: monomials xi W^k with k != 0 are annihilated; functions are
// averaged over the orbit window.
cplx trace_functional(const OrbitData& o, int power, const std::function<cplx(const Vec4c&)>& f);

// Winding number of g around the boundary of the fundamental cell.
int winding_number(const FiberCurve& f, const std::function<cplx(cplx)>& g);
// Degree of the restricted line bundle: winding of z -> L(psi_raw(z)).
int bundle_degree(const FiberCurve& f, const Vec4c& L);

/// Rational form of the cross-product data along K(v): the conjugation
/// r(v, .) expressed through the group law, the gauge pair (L, L'), and the
/// rational weight gamma.
struct RationalCrossProduct {
  const FiberCurve* fiber = nullptr;
  RealInvolution ju;
  Mat4c Q;
  Vec4c L, Lp;
  cplx zv;          // parameter of the base point
  cplx tau;         // half-period of the flipped coordinate involution
  bool pole_flagged = false;  // Q(Z, r(Z)) vanishes somewhere on K(v)

  // j_u(Z) = I_mu(Z - v) - I(v) through the group law, as a parameter map.
  cplx r_param(cplx zZ) const;
  Vec4c r_of(const Vec4c& Z) const;
  cplx gamma(const Vec4c& Z) const;
};

RationalCrossProduct rational_crossproduct_data(const FiberCurve& f, const CurvePoint& v);

}  // namespace ncs3
