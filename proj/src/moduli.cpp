#include "moduli.hpp"

#include <algorithm>
#include <cmath>

namespace ncs3 {

PsiCoords phi_to_psi(const PhiAngles& p) {
  const auto& f = p.v;
  return {{0.5 * (f[1] + f[2] - f[0]), 0.5 * (f[2] + f[0] - f[1]), 0.5 * (f[0] + f[1] - f[2])}};
}

PhiAngles psi_to_phi(const PsiCoords& s) {
  const auto& q = s.v;
  return PhiAngles::reduced(q[1] + q[2], q[2] + q[0], q[0] + q[1]);
}

bool psi_equal_mod_lattice(const PsiCoords& a, const PsiCoords& b, double tol) {
  int parity = -1;
  for (int i = 0; i < 3; ++i) {
    const double d = a.v[i] - b.v[i];
    const double n = std::round(d / (pi / 2.0));
    if (std::fabs(d - n * pi / 2.0) > tol) return false;
    const int par = static_cast<int>(std::fabs(std::fmod(n, 2.0)) > 0.5);
    if (parity < 0)
      parity = par;
    else if (parity != par)
      return false;
  }
  return true;
}

PhiAngles weyl_act_phi(const std::array<int, 4>& perm, const PhiAngles& p) {
  std::array<int, 4> inv{};
  for (int i = 0; i < 4; ++i) inv[perm[i]] = i;
  const std::array<double, 4> a{0.0, p.v[0], p.v[1], p.v[2]};
  return PhiAngles::reduced(a[inv[1]] - a[inv[0]], a[inv[2]] - a[inv[0]], a[inv[3]] - a[inv[0]]);
}

PhiAngles weyl_act_phi(transposition t, const PhiAngles& p) {
  switch (t) {
    case transposition::t01:
      return weyl_act_phi({1, 0, 2, 3}, p);
    case transposition::t12:
      return weyl_act_phi({0, 2, 1, 3}, p);
    case transposition::t23:
      return weyl_act_phi({0, 1, 3, 2}, p);
  }
  fail(errc::invalid_input, "unknown transposition");
}

PsiCoords weyl_act_psi(const SignedPerm& w, const PsiCoords& s) {
  if (w.sign[0] * w.sign[1] * w.sign[2] != 1)
    fail(errc::invalid_input, "weyl_act_psi: sign product must be +1");
  std::array<int, 3> seen{0, 0, 0};
  for (int i : w.perm) {
    if (i < 0 || i > 2 || seen[i]++) fail(errc::invalid_input, "weyl_act_psi: not a permutation");
  }
  PsiCoords out;
  for (int k = 0; k < 3; ++k) out.v[k] = w.sign[k] * s.v[w.perm[k]];
  return out;
}

std::array<double, 3> invariants_J(const PhiAngles& p) {
  const auto& f = p.v;
  // J_lm = -tan(phi_k) tan(phi_l - phi_m) for (k,l,m) cyclic.
  return {-std::tan(f[2]) * std::tan(f[0] - f[1]),   // J_12
          -std::tan(f[0]) * std::tan(f[1] - f[2]),   // J_23
          -std::tan(f[1]) * std::tan(f[2] - f[0])};  // J_31
}

Vec3c invariants_J(const Vec4c& u) {
  const cplx alpha = (u[0] + u[1]) * (u[2] + u[3]);
  const cplx beta = (u[0] + u[2]) * (u[3] + u[1]);
  const cplx gamma = (u[0] + u[3]) * (u[1] + u[2]);
  const double scale = std::abs(alpha) + std::abs(beta) + std::abs(gamma);
  if (std::abs(alpha) < 1e-12 * scale || std::abs(beta) < 1e-12 * scale ||
      std::abs(gamma) < 1e-12 * scale)
    fail(errc::degenerate, "invariants_J: vanishing resolvent denominator");
  return Vec3c((alpha - beta) / gamma, (beta - gamma) / alpha, (gamma - alpha) / beta);
}

double scaling_H0(const PsiCoords& s) {
  return std::sin(2.0 * s.v[0]) * std::sin(2.0 * s.v[1]) * std::sin(2.0 * s.v[2]);
}

std::array<double, 3> scaling_field_psi(const PsiCoords& s) {
  std::array<double, 3> z;
  for (int k = 0; k < 3; ++k) {
    const int l = (k + 1) % 3, m = (k + 2) % 3;
    z[k] = 0.5 * std::cos(2.0 * s.v[k]) * std::sin(2.0 * s.v[l]) * std::sin(2.0 * s.v[m]);
  }
  return z;
}

std::array<double, 3> scaling_field_phi(const PhiAngles& p) {
  std::array<double, 3> z;
  for (int k = 0; k < 3; ++k) {
    const int l = (k + 1) % 3, m = (k + 2) % 3;
    z[k] = std::sin(2.0 * p.v[k]) * std::sin(p.v[l] + p.v[m] - p.v[k]);
  }
  return z;
}

std::vector<FlowSample> flow_integrate(const PsiCoords& start, double t_final, double dt) {
  if (!(dt > 0.0)) fail(errc::invalid_input, "flow_integrate: dt must be positive");
  const int nsteps = static_cast<int>(std::ceil(t_final / dt - 1e-12));
  auto deriv = [](const PsiCoords& s) { return scaling_field_psi(s); };
  auto add = [](const PsiCoords& s, const std::array<double, 3>& d, double h) {
    PsiCoords out = s;
    for (int i = 0; i < 3; ++i) out.v[i] += h * d[i];
    return out;
  };

  std::vector<FlowSample> traj;
  traj.reserve(nsteps + 1);
  PsiCoords s = start;
  double t = 0.0;
  auto record = [&](double tt, const PsiCoords& ss) {
    traj.push_back({tt, ss, scaling_H0(ss), invariants_J(psi_to_phi(ss))});
  };
  record(0.0, s);
  for (int i = 0; i < nsteps; ++i) {
    const double h = std::min(dt, t_final - t);
    const auto k1 = deriv(s);
    const auto k2 = deriv(add(s, k1, 0.5 * h));
    const auto k3 = deriv(add(s, k2, 0.5 * h));
    const auto k4 = deriv(add(s, k3, h));
    PsiCoords next = s;
    for (int j = 0; j < 3; ++j)
      next.v[j] += h / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);
    if (std::fabs(scaling_H0(next) - scaling_H0(s)) > 0.1)
      fail(errc::numerical, "flow_integrate: step rejected, H0 jumped beyond the guard");
    s = next;
    t += h;
    record(t, s);
  }
  return traj;
}

namespace {

// Lexicographic triples i<j<k from {0..5}.
const std::array<std::array<int, 3>, 20>& wedge_basis() {
  static const auto basis = [] {
    std::array<std::array<int, 3>, 20> b{};
    int n = 0;
    for (int i = 0; i < 6; ++i)
      for (int j = i + 1; j < 6; ++j)
        for (int k = j + 1; k < 6; ++k) b[n++] = {i, j, k};
    return b;
  }();
  return basis;
}

// Hodge star on the third exterior power for the Euclidean metric and the
// standard orientation: star(e_I) = sgn(I, I^c) e_{I^c}.
const Eigen::Matrix<double, 20, 20>& star_matrix() {
  static const auto star = [] {
    Eigen::Matrix<double, 20, 20> s = Eigen::Matrix<double, 20, 20>::Zero();
    const auto& basis = wedge_basis();
    for (int a = 0; a < 20; ++a) {
      const auto& I = basis[a];
      std::array<int, 3> c{};
      int n = 0;
      for (int x = 0; x < 6; ++x)
        if (x != I[0] && x != I[1] && x != I[2]) c[n++] = x;
      // parity of the permutation (I, I^c) of (0..5)
      std::array<int, 6> p{I[0], I[1], I[2], c[0], c[1], c[2]};
      int sign = 1;
      for (int x = 0; x < 6; ++x)
        for (int y = x + 1; y < 6; ++y)
          if (p[x] > p[y]) sign = -sign;
      int b = 0;
      for (; b < 20; ++b)
        if (basis[b] == c) break;
      s(b, a) = sign;
    }
    return s;
  }();
  return star;
}

}  // namespace

double signature_character(const std::array<double, 3>& theta) {
  Eigen::Matrix<double, 6, 6> R = Eigen::Matrix<double, 6, 6>::Zero();
  for (int k = 0; k < 3; ++k) {
    const double c = std::cos(theta[k]), s = std::sin(theta[k]);
    R(2 * k, 2 * k) = c;
    R(2 * k, 2 * k + 1) = s;
    R(2 * k + 1, 2 * k) = -s;
    R(2 * k + 1, 2 * k + 1) = c;
  }
  const auto& basis = wedge_basis();
  Eigen::Matrix<double, 20, 20> W;
  for (int a = 0; a < 20; ++a)
    for (int b = 0; b < 20; ++b) {
      Eigen::Matrix3d m;
      for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c) m(r, c) = R(basis[a][r], basis[b][c]);
      W(a, b) = m.determinant();
    }
  // With P_± the projections on the ±i eigenspaces of the star operator,
  // tr_+ - tr_- = tr(W (P_+ - P_-)) = -i tr(W S), purely imaginary for real W.
  const double val = (W * star_matrix()).trace();
  return -val;
}

std::array<double, 3> signature_character_grad(const std::array<double, 3>& theta, double h) {
  std::array<double, 3> g;
  for (int k = 0; k < 3; ++k) {
    auto tp = theta, tm = theta;
    tp[k] += h;
    tm[k] -= h;
    g[k] = (signature_character(tp) - signature_character(tm)) / (2.0 * h);
  }
  return g;
}

}  // namespace ncs3
