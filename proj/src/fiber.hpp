#pragma once

#include <array>
#include <mutex>
#include <optional>
#include <vector>

#include "elliptic.hpp"
#include "numerics.hpp"

namespace ncs3 {

// The symmetric involution M relating curve coordinates Z and moduli
// coordinates u by Z = M.u (M^2 = 1 exactly).
const Mat4d& coordinate_involution();

/// Point of the moduli space P3(C), optionally carrying its torus angles.
struct ModulusPoint {
  Vec4c u;
  std::optional<std::array<double, 3>> phi;

  static ModulusPoint from_phi(const std::array<double, 3>& phi);
  static ModulusPoint from_u(const Vec4c& u);
};

/// Projective point in curve coordinates Z.
struct CurvePoint {
  Vec4c Z;

  Vec4c u() const;
  static CurvePoint from_u(const Vec4c& u);
};

// Lagrange resolvent ((u0+u1)(u2+u3), (u0+u2)(u3+u1), (u0+u3)(u1+u2)).
// Throws at the eight common base points, where all entries vanish.
ResolventTriple resolvent_map(const ModulusPoint& m);

// The eight base points p0..p3, q0..q3 in u-coordinates.
const std::array<Vec4c, 8>& base_points_u();
// Unit vector e_nu in Z-coordinates.
Vec4c unit_Z(int nu);

// The 6x4 matrix of linearized relations; its rank drops to 3 exactly on the
// characteristic variety.
Eigen::Matrix<cplx, 6, 4> characteristic_matrix(const ResolventTriple& r, const Vec4c& Z);
// sigma_4 / sigma_3 of the singular values; below rank_ratio_threshold the
// point is classified as rank-deficient.
double rank_ratio(const Eigen::Matrix<cplx, 6, 4>& N);
inline constexpr double rank_ratio_threshold = 1e-9;

// The birational translation automorphism, cubic and defined over Q.
Vec4c sigma_map(const Vec4c& Z);
// Exact integer evaluation; returns false on the indeterminacy locus.
bool sigma_exact(const std::array<long long, 4>& Z, std::array<long long, 4>& out);
Vec4c sigma_inverse(const Vec4c& Z);

// u_mu -> prod_{nu != mu} u_nu, the cubic form of coordinate inversion.
Vec4c u_inversion(const Vec4c& u);
Vec4c involution_I(const Vec4c& Z);   // inversion conjugated into Z-coordinates
Vec4c involution_I0(const Vec4c& Z);  // flips Z_0
Vec4c involution_Imu(int mu, const Vec4c& Z);
// Klein group element h in {0..3}: identity, (01)(23), (02)(13), (03)(12).
Vec4c klein_u(int h, const Vec4c& u);
Vec4c klein_Z(int h, const Vec4c& Z);

/// Antilinear involution of the curve attached to a torus modulus:
/// Z -> eps * I_k(conj Z), with k and eps read off the sign pattern of
/// lambda_k = cos(phi_l) cos(phi_m) sin(phi_l - phi_m).
struct RealInvolution {
  int k = 0;       // flipped coordinate
  double eps = 1;  // sign, relevant on linear forms only

  Vec4c apply(const Vec4c& Z) const;
  // transpose action on linear forms: (jL)(Z) = conj(L(j(Z)))
  Vec4c apply_form(const Vec4c& L) const;
};
RealInvolution curve_involution(const std::array<double, 3>& phi);

/// Closed geodesic circle on C/L: z(t) = base + t*dir with dir a lattice
/// vector, so t has period one.
struct TorusLine {
  cplx base;
  cplx dir;

  cplx at(double t) const { return base + t * dir; }
};

class FiberCurve {
public:
  explicit FiberCurve(const ModulusPoint& m);

  const ModulusPoint& modulus() const { return m_; }
  const ResolventTriple& resolvent() const { return r_; }
  const LatticeParams& lattice() const;

  // psi-gauge embedding: components theta_k(2z - eta)/theta_k(eta).  The raw
  // form is analytic in z but overflows far from the fundamental cell; psi()
  // reduces the parameter first, which is projectively the same point.
  Vec4c embed_raw(cplx z) const;
  Vec4c embed_raw_deriv(cplx z) const;
  CurvePoint psi(cplx z) const;
  CurvePoint phi_embed(cplx z) const;

  // Max modulus of the two cross-differences of the quadric equations.
  double membership(const CurvePoint& p) const;

  // Parameter of a curve point in the psi gauge (cell representative).
  cplx invert_param(const CurvePoint& p) const;
  cplx invert_param_near(const CurvePoint& p, cplx seed) const;

  // p0..p3, q0..q3 as exact Z-coordinate vectors.
  const std::array<CurvePoint, 8>& special_points() const;

  // Antiholomorphic structure conj(psi(z)) = psi(a conj(z) + b); only
  // available when the fiber is stable under complex conjugation.
  void conj_structure(cplx& a, cplx& b) const;
  // Fixed lines of z -> alpha conj(z) + beta on the torus.
  std::vector<TorusLine> fixed_lines(cplx alpha, cplx beta) const;
  std::vector<TorusLine> real_locus_lines() const;   // psi(z) projectively real
  std::vector<TorusLine> torus_locus_lines() const;  // I(v) = conj(v)
  std::vector<TorusLine> imag0_locus_lines() const;  // I0(Z) = conj(Z)
  double line_distance(cplx z, const TorusLine& line) const;
  TorusLine line_through(const std::vector<TorusLine>& lines, cplx z,
                         double tol = 1e-6) const;

  // Chord-plane group law through q0: x + y = I0(w), w the fourth
  // intersection of the plane (q0, x, y) with the curve.
  CurvePoint group_add(const CurvePoint& x, const CurvePoint& y) const;

  // Newton projection onto the fiber; sigma iteration is transversally
  // unstable, so orbits must be re-polished periodically.
  Vec4c polish(const Vec4c& Z, int iterations = 3) const;

private:
  ModulusPoint m_;
  ResolventTriple r_;
  mutable std::once_flag lattice_once_;
  mutable std::optional<LatticeParams> lattice_;
  mutable std::array<cplx, 4> theta_eta_{};
  mutable std::once_flag conj_once_;
  mutable cplx conj_a_{}, conj_b_{};
  mutable bool conj_ok_ = false;
  mutable std::optional<std::array<CurvePoint, 8>> specials_;
};

struct RealStructure {
  bool even = false;
  std::array<double, 3> s{};  // torus resolvent (s_1, s_2, s_3)
  TorusLine C_u;              // real-locus component through p0
  TorusLine FT0;              // torus-locus component through q0
  std::vector<TorusLine> real_lines;
  std::vector<TorusLine> torus_lines;
};

// Classification and component data for a torus modulus (|u_mu| = 1).
RealStructure real_structure(const FiberCurve& f);

std::vector<CurvePoint> sample_line(const FiberCurve& f, const TorusLine& line, int n);

}  // namespace ncs3
