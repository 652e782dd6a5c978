#include "fiber.hpp"

#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <numeric>

namespace ncs3 {

const Mat4d& coordinate_involution() {
  static const Mat4d M = [] {
    Mat4d m;
    m << 1, 1, 1, 1,
         1, 1, -1, -1,
         1, -1, 1, -1,
         1, -1, -1, 1;
    return Mat4d(0.5 * m);
  }();
  return M;
}

ModulusPoint ModulusPoint::from_phi(const std::array<double, 3>& phi) {
  ModulusPoint m;
  m.u = Vec4c(1.0, std::exp(2.0 * iu * phi[0]), std::exp(2.0 * iu * phi[1]),
              std::exp(2.0 * iu * phi[2]));
  m.phi = {wrap_angle(phi[0], pi), wrap_angle(phi[1], pi), wrap_angle(phi[2], pi)};
  return m;
}

ModulusPoint ModulusPoint::from_u(const Vec4c& u) {
  if (u.norm() == 0.0) fail(errc::invalid_input, "modulus point must be nonzero");
  ModulusPoint m;
  m.u = u;
  return m;
}

Vec4c CurvePoint::u() const { return coordinate_involution().cast<cplx>() * Z; }

CurvePoint CurvePoint::from_u(const Vec4c& u) {
  return {coordinate_involution().cast<cplx>() * u};
}

ResolventTriple resolvent_map(const ModulusPoint& m) {
  const Vec4c& u = m.u;
  const cplx a = (u[0] + u[1]) * (u[2] + u[3]);
  const cplx b = (u[0] + u[2]) * (u[3] + u[1]);
  const cplx g = (u[0] + u[3]) * (u[1] + u[2]);
  const double scale = u.cwiseAbs().maxCoeff();
  if (std::abs(a) + std::abs(b) + std::abs(g) < 1e-12 * scale * scale)
    fail(errc::degenerate, "resolvent_map: modulus is one of the eight base points");
  return {a, b, g};
}

const std::array<Vec4c, 8>& base_points_u() {
  static const std::array<Vec4c, 8> pts = {
      Vec4c(1, 0, 0, 0),  Vec4c(0, 1, 0, 0),  Vec4c(0, 0, 1, 0),  Vec4c(0, 0, 0, 1),
      Vec4c(-1, 1, 1, 1), Vec4c(1, -1, 1, 1), Vec4c(1, 1, -1, 1), Vec4c(1, 1, 1, -1)};
  return pts;
}

Vec4c unit_Z(int nu) {
  if (nu < 0 || nu > 3) fail(errc::invalid_input, "unit_Z: index out of range");
  Vec4c e = Vec4c::Zero();
  e[nu] = 1.0;
  return e;
}

Eigen::Matrix<cplx, 6, 4> characteristic_matrix(const ResolventTriple& r, const Vec4c& Zin) {
  const Vec3c rv = r.vec() / r.vec().norm();
  const cplx a = rv[0], b = rv[1], g = rv[2];
  const Vec4c Z = Zin / Zin.norm();
  Eigen::Matrix<cplx, 6, 4> N;
  N << Z[1], -Z[0], Z[3], Z[2],
       Z[2], Z[3], -Z[0], Z[1],
       Z[3], Z[2], Z[1], -Z[0],
       (b - g) * Z[1], (b - g) * Z[0], -a * Z[3], a * Z[2],
       (g - a) * Z[2], b * Z[3], (g - a) * Z[0], -b * Z[1],
       (a - b) * Z[3], -g * Z[2], g * Z[1], (a - b) * Z[0];
  return N;
}

double rank_ratio(const Eigen::Matrix<cplx, 6, 4>& N) {
  Eigen::JacobiSVD<Eigen::Matrix<cplx, 6, 4>> svd(N);
  const auto& s = svd.singularValues();
  if (s[2] < 1e-300) return 1.0;
  return s[3] / s[2];
}

Vec4c sigma_map(const Vec4c& Zin) {
  const Vec4c Z = Zin / Zin.cwiseAbs().maxCoeff();
  const cplx sum2 = Z[0] * Z[0] + Z[1] * Z[1] + Z[2] * Z[2] + Z[3] * Z[3];
  const cplx prod = Z[0] * Z[1] * Z[2] * Z[3];
  Vec4c out;
  for (int mu = 0; mu < 4; ++mu) {
    const double sgn = (mu == 0) ? 1.0 : -1.0;
    // 2 * prod_{lambda != mu} Z_lambda, written through the full product when
    // the coordinate is nonzero and expanded otherwise.
    cplx pmu;
    if (std::abs(Z[mu]) > 1e-150) {
      pmu = prod / Z[mu];
    } else {
      pmu = 1.0;
      for (int l = 0; l < 4; ++l)
        if (l != mu) pmu *= Z[l];
    }
    out[mu] = sgn * (Z[mu] * Z[mu] * Z[mu] - Z[mu] * (sum2 - Z[mu] * Z[mu]) - 2.0 * pmu);
  }
  if (out.cwiseAbs().maxCoeff() < 1e-13)
    fail(errc::degenerate, "sigma_map: point lies on the indeterminacy locus");
  return proj_normalize(out);
}

bool sigma_exact(const std::array<long long, 4>& Z, std::array<long long, 4>& out) {
  using bigint = __int128;
  bigint sum2 = 0;
  for (int i = 0; i < 4; ++i) sum2 += static_cast<bigint>(Z[i]) * Z[i];
  std::array<bigint, 4> val{};
  for (int mu = 0; mu < 4; ++mu) {
    bigint pmu = 2;
    for (int l = 0; l < 4; ++l)
      if (l != mu) pmu *= Z[l];
    const bigint zm = Z[mu];
    bigint v = zm * zm * zm - zm * (sum2 - zm * zm) - pmu;
    if (mu != 0) v = -v;
    val[mu] = v;
  }
  bigint g = 0;
  for (auto v : val) g = std::gcd(static_cast<long long>(v < 0 ? -v : v), static_cast<long long>(g));
  if (g == 0) return false;
  // Canonical sign: first nonzero entry positive.
  bigint lead = 0;
  for (auto v : val)
    if (v != 0) {
      lead = v;
      break;
    }
  if (lead < 0) g = -g;
  for (int i = 0; i < 4; ++i) out[i] = static_cast<long long>(val[i] / g);
  return true;
}

Vec4c u_inversion(const Vec4c& u) {
  Vec4c out;
  for (int mu = 0; mu < 4; ++mu) {
    cplx p = 1.0;
    for (int l = 0; l < 4; ++l)
      if (l != mu) p *= u[l];
    out[mu] = p;
  }
  if (out.cwiseAbs().maxCoeff() < 1e-13 * std::pow(u.cwiseAbs().maxCoeff(), 3))
    fail(errc::degenerate, "u_inversion: at least two coordinates vanish");
  return out;
}

Vec4c involution_I(const Vec4c& Z) {
  const auto M = coordinate_involution().cast<cplx>();
  return Vec4c(M * u_inversion(M * Z));
}

Vec4c involution_I0(const Vec4c& Z) { return Vec4c(-Z[0], Z[1], Z[2], Z[3]); }

Vec4c involution_Imu(int mu, const Vec4c& Z) {
  if (mu < 0 || mu > 3) fail(errc::invalid_input, "involution_Imu: index out of range");
  Vec4c out = Z;
  out[mu] = -out[mu];
  return out;
}

Vec4c klein_u(int h, const Vec4c& u) {
  switch (h) {
    case 0:
      return u;
    case 1:
      return Vec4c(u[1], u[0], u[3], u[2]);
    case 2:
      return Vec4c(u[2], u[3], u[0], u[1]);
    case 3:
      return Vec4c(u[3], u[2], u[1], u[0]);
  }
  fail(errc::invalid_input, "klein_u: element out of range");
}

Vec4c klein_Z(int h, const Vec4c& Z) {
  const auto M = coordinate_involution().cast<cplx>();
  return Vec4c(M * klein_u(h, M * Z));
}

Vec4c RealInvolution::apply(const Vec4c& Z) const {
  Vec4c out = Z.conjugate();
  out[k] = -out[k];
  return eps * out;
}

Vec4c RealInvolution::apply_form(const Vec4c& L) const {
  Vec4c out = L.conjugate();
  out[k] = -out[k];
  return eps * out;
}

RealInvolution curve_involution(const std::array<double, 3>& phi) {
  std::array<double, 3> lambda{};
  for (int k = 0; k < 3; ++k) {
    const int l = (k + 1) % 3, m = (k + 2) % 3;
    lambda[k] = std::cos(phi[l]) * std::cos(phi[m]) * std::sin(phi[l] - phi[m]);
  }
  const double scale = std::max({std::fabs(lambda[0]), std::fabs(lambda[1]), std::fabs(lambda[2])});
  for (double l : lambda)
    if (std::fabs(l) < 1e-12 * scale)
      fail(errc::degenerate, "curve_involution: sign pattern is on the excluded boundary");
  const int nplus = (lambda[0] > 0) + (lambda[1] > 0) + (lambda[2] > 0);
  const double majority = (nplus >= 2) ? 1.0 : -1.0;
  int minority = 0;
  for (int k = 0; k < 3; ++k)
    if ((lambda[k] > 0 ? 1.0 : -1.0) != majority) minority = k;
  // lambda index k in {1,2,3} labels the flipped Z coordinate.
  return RealInvolution{minority + 1, majority};
}

FiberCurve::FiberCurve(const ModulusPoint& m) : m_(m), r_(resolvent_map(m)) {}

const LatticeParams& FiberCurve::lattice() const {
  std::call_once(lattice_once_, [this] {
    lattice_ = lattice_from_resolvent(r_);
    for (int k = 1; k <= 4; ++k) theta_eta_[k - 1] = theta(k, lattice_->eta, lattice_->omega);
  });
  return *lattice_;
}

Vec4c FiberCurve::embed_raw(cplx z) const {
  const LatticeParams& lp = lattice();
  const cplx w = 2.0 * z - lp.eta;
  Vec4c out;
  for (int k = 1; k <= 4; ++k) out[k - 1] = theta(k, w, lp.omega) / theta_eta_[k - 1];
  return out;
}

Vec4c FiberCurve::embed_raw_deriv(cplx z) const {
  const LatticeParams& lp = lattice();
  const cplx w = 2.0 * z - lp.eta;
  Vec4c out;
  for (int k = 1; k <= 4; ++k) out[k - 1] = 2.0 * theta_deriv(k, w, lp.omega) / theta_eta_[k - 1];
  return out;
}

CurvePoint FiberCurve::psi(cplx z) const {
  return {embed_raw(reduce_mod_lattice(z, lattice().omega))};
}

CurvePoint FiberCurve::phi_embed(cplx z) const { return psi(z + lattice().eta / 2.0); }

double FiberCurve::membership(const CurvePoint& p) const {
  const Vec4c Z = p.Z / p.Z.norm();
  const Vec3c rv = r_.vec() / r_.vec().norm();
  const cplx d1 = Z[0] * Z[0] - Z[1] * Z[1];
  const cplx d2 = Z[0] * Z[0] - Z[2] * Z[2];
  const cplx d3 = Z[0] * Z[0] - Z[3] * Z[3];
  return std::max(std::abs(d1 * rv[1] - d2 * rv[0]), std::abs(d2 * rv[2] - d3 * rv[1]));
}

const std::array<CurvePoint, 8>& FiberCurve::special_points() const {
  if (!specials_) {
    std::array<CurvePoint, 8> s;
    for (int i = 0; i < 8; ++i) s[i] = CurvePoint::from_u(base_points_u()[i]);
    specials_ = s;
  }
  return *specials_;
}

cplx FiberCurve::invert_param_near(const CurvePoint& p, cplx seed) const {
  lattice();
  const Vec4c P = p.Z / p.Z.norm();
  int i = 0, j = 1;
  {
    std::array<int, 4> idx{0, 1, 2, 3};
    std::sort(idx.begin(), idx.end(),
              [&](int a, int b) { return std::abs(P[a]) > std::abs(P[b]); });
    i = idx[0];
    j = idx[1];
  }
  cplx z = seed;
  for (int it = 0; it < 60; ++it) {
    const Vec4c E = embed_raw(z);
    const Vec4c D = embed_raw_deriv(z);
    const cplx g = E[i] * P[j] - E[j] * P[i];
    const cplx dg = D[i] * P[j] - D[j] * P[i];
    if (std::abs(dg) < 1e-300) break;
    const cplx step = g / dg;
    z -= step;
    if (std::abs(step) < 1e-14) break;
  }
  if (proj_distance(embed_raw(z), P) > 1e-7)
    fail(errc::numerical, "invert_param: Newton did not land on the point");
  return reduce_mod_lattice(z, lattice().omega);
}

cplx FiberCurve::invert_param(const CurvePoint& p) const {
  const LatticeParams& lp = lattice();
  const Vec4c P = p.Z / p.Z.norm();
  int i = 0, j = 1;
  {
    std::array<int, 4> idx{0, 1, 2, 3};
    std::sort(idx.begin(), idx.end(),
              [&](int a, int b) { return std::abs(P[a]) > std::abs(P[b]); });
    i = idx[0];
    j = idx[1];
  }
  const int n = 24;
  std::vector<std::pair<double, cplx>> cand;
  cand.reserve(n * n);
  for (int ia = 0; ia < n; ++ia)
    for (int ib = 0; ib < n; ++ib) {
      const cplx z = (ia + 0.5) / n + (ib + 0.5) / n * lp.omega;
      const Vec4c E = embed_raw(z);
      cand.emplace_back(std::abs(E[i] * P[j] - E[j] * P[i]) / E.norm(), z);
    }
  std::sort(cand.begin(), cand.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  for (size_t c = 0; c < std::min<size_t>(cand.size(), 48); ++c) {
    try {
      return invert_param_near(p, cand[c].second);
    } catch (const error&) {
      continue;
    }
  }
  fail(errc::numerical, "invert_param: no preimage found on the fundamental cell");
}

void FiberCurve::conj_structure(cplx& a, cplx& b) const {
  std::call_once(conj_once_, [this] {
    const LatticeParams& lp = lattice();
    const cplx z1 = 0.1375 + 0.2193 * lp.omega;
    const CurvePoint P1{embed_raw(z1).conjugate()};
    if (membership(P1) > 1e-8) {
      conj_ok_ = false;
      return;
    }
    try {
      const cplx w1 = invert_param(P1);
      const double d = 0.017;
      const CurvePoint P2{embed_raw(z1 + d).conjugate()};
      const cplx w2 = invert_param_near(P2, w1 + d);  // |a| = 1; seed within O(d)
      cplx am = (w2 - w1) / d;
      // a is a unit lattice vector; snap when a clean candidate is close.
      for (cplx candv : {cplx(1, 0), cplx(-1, 0), lp.omega, -lp.omega, 1.0 + lp.omega,
                         -1.0 - lp.omega, 1.0 - lp.omega, lp.omega - 1.0}) {
        if (std::abs(am - candv) < 1e-4) {
          am = candv;
          break;
        }
      }
      const cplx bm = w1 - am * std::conj(z1);
      // Validate on independent samples.
      for (cplx zt : {0.31 + 0.11 * lp.omega, 0.57 + 0.83 * lp.omega}) {
        if (proj_distance(Vec4c(embed_raw(zt).conjugate()), embed_raw(am * std::conj(zt) + bm)) >
            1e-6) {
          conj_ok_ = false;
          return;
        }
      }
      conj_a_ = am;
      conj_b_ = bm;
      conj_ok_ = true;
    } catch (const error&) {
      conj_ok_ = false;
    }
  });
  if (!conj_ok_)
    fail(errc::degenerate, "conj_structure: fiber is not stable under complex conjugation");
  a = conj_a_;
  b = conj_b_;
}

std::vector<TorusLine> FiberCurve::fixed_lines(cplx alpha, cplx beta) const {
  const LatticeParams& lp = lattice();
  if (std::fabs(std::abs(alpha) - 1.0) > 1e-6)
    fail(errc::invalid_input, "fixed_lines: multiplier must be unimodular");
  const double a1 = alpha.real(), a2 = alpha.imag();
  Eigen::Vector2d v(a2, 1.0 - a1);
  if (v.norm() < 1e-8) v = Eigen::Vector2d(1.0 + a1, -a2);
  v.normalize();
  const Eigen::Vector2d nrm(-v[1], v[0]);  // eigenvector with eigenvalue 2

  // Primitive lattice vector parallel to the null direction.
  const cplx dir(v[0], v[1]);
  cplx D = 0;
  double bestnorm = 1e300;
  for (int mm = -6; mm <= 6; ++mm)
    for (int nn = -6; nn <= 6; ++nn) {
      if (mm == 0 && nn == 0) continue;
      const cplx L = static_cast<double>(mm) + static_cast<double>(nn) * lp.omega;
      if (std::abs(std::imag(L * std::conj(dir))) < 1e-8 * std::abs(L) && std::abs(L) < bestnorm) {
        bestnorm = std::abs(L);
        D = L;
      }
    }
  if (D == 0.0) fail(errc::numerical, "fixed_lines: fixed direction is not a lattice direction");

  std::vector<TorusLine> lines;
  for (int mm = -2; mm <= 2; ++mm)
    for (int nn = -2; nn <= 2; ++nn) {
      const cplx rhs_c = beta + static_cast<double>(mm) + static_cast<double>(nn) * lp.omega;
      const Eigen::Vector2d rhs(rhs_c.real(), rhs_c.imag());
      if (std::fabs(rhs.dot(v)) > 1e-7 * (1.0 + rhs.norm())) continue;
      const Eigen::Vector2d xp = 0.5 * rhs.dot(nrm) * nrm;
      const cplx zp = reduce_mod_lattice(cplx(xp[0], xp[1]), lp.omega);
      TorusLine line{zp, D};
      bool dup = false;
      for (const auto& l : lines)
        if (line_distance(zp, l) < 1e-8) dup = true;
      if (!dup) lines.push_back(line);
    }
  // Deterministic order by cell coordinates of the base point.
  std::sort(lines.begin(), lines.end(), [&](const TorusLine& x, const TorusLine& y) {
    auto [xa, xb] = lattice_coords(x.base, lp.omega);
    auto [ya, yb] = lattice_coords(y.base, lp.omega);
    return (std::fabs(xb - yb) > 1e-9) ? xb < yb : xa < ya;
  });
  return lines;
}

std::vector<TorusLine> FiberCurve::real_locus_lines() const {
  cplx a, b;
  conj_structure(a, b);
  return fixed_lines(a, b);
}

std::vector<TorusLine> FiberCurve::torus_locus_lines() const {
  cplx a, b;
  conj_structure(a, b);
  return fixed_lines(-a, -b);
}

std::vector<TorusLine> FiberCurve::imag0_locus_lines() const {
  cplx a, b;
  conj_structure(a, b);
  return fixed_lines(-a, lattice().eta - b);
}

double FiberCurve::line_distance(cplx z, const TorusLine& line) const {
  const LatticeParams& lp = lattice();
  const double nd = std::abs(line.dir);
  double best = 1e300;
  for (int mm = -2; mm <= 2; ++mm)
    for (int nn = -2; nn <= 2; ++nn) {
      const cplx o = z - line.base + static_cast<double>(mm) + static_cast<double>(nn) * lp.omega;
      best = std::min(best, std::fabs(std::imag(o * std::conj(line.dir))) / nd);
    }
  return best;
}

TorusLine FiberCurve::line_through(const std::vector<TorusLine>& lines, cplx z, double tol) const {
  for (const auto& l : lines)
    if (line_distance(z, l) < tol) return l;
  fail(errc::numerical, "line_through: no component passes through the given parameter");
}

CurvePoint FiberCurve::group_add(const CurvePoint& x, const CurvePoint& y) const {
  const LatticeParams& lp = lattice();
  const Vec4c q0 = special_points()[4].Z;  // psi(0)

  Eigen::Matrix<cplx, 3, 4> rows;
  rows.row(0) = q0 / q0.norm();
  rows.row(1) = x.Z / x.Z.norm();
  rows.row(2) = y.Z / y.Z.norm();
  Eigen::JacobiSVD<Eigen::Matrix<cplx, 3, 4>> svd(rows, Eigen::ComputeFullV);
  if (svd.singularValues()[2] < 1e-10 * svd.singularValues()[0])
    fail(errc::degenerate, "group_add: the chord plane through q0, x, y is degenerate");

  // Cofactor vector: h(w) = <cof, psi_raw(w)> vanishes exactly on the plane.
  Vec4c cof;
  for (int mu = 0; mu < 4; ++mu) {
    Eigen::Matrix3cd minor;
    int cc = 0;
    for (int c = 0; c < 4; ++c) {
      if (c == mu) continue;
      for (int rr = 0; rr < 3; ++rr) minor(rr, cc) = rows(rr, c);
      ++cc;
    }
    cof[mu] = ((mu % 2) ? -1.0 : 1.0) * minor.determinant();
  }

  const cplx wx = invert_param(x);
  const cplx wy = invert_param(y);

  auto hval = [&](cplx w) {
    const Vec4c E = embed_raw(w);
    return cof[0] * E[0] + cof[1] * E[1] + cof[2] * E[2] + cof[3] * E[3];
  };
  auto hder = [&](cplx w) {
    const Vec4c D = embed_raw_deriv(w);
    return cof[0] * D[0] + cof[1] * D[1] + cof[2] * D[2] + cof[3] * D[3];
  };

  // Seeds are the local minima of |h| on a torus grid; sorting by |h| alone
  // drowns the steep zeros under points crowding the flat ones.
  const int n = 48;
  std::vector<double> grid(n * n);
  for (int ia = 0; ia < n; ++ia)
    for (int ib = 0; ib < n; ++ib)
      grid[ia * n + ib] = std::abs(hval((ia + 0.5) / n + (ib + 0.5) / n * lp.omega));
  double scale = *std::max_element(grid.begin(), grid.end());
  std::vector<std::pair<double, cplx>> cand;
  for (int ia = 0; ia < n; ++ia)
    for (int ib = 0; ib < n; ++ib) {
      const double v = grid[ia * n + ib];
      bool minimal = true;
      for (int da = -1; da <= 1 && minimal; ++da)
        for (int db = -1; db <= 1 && minimal; ++db) {
          if (da == 0 && db == 0) continue;
          if (grid[((ia + da + n) % n) * n + (ib + db + n) % n] < v) minimal = false;
        }
      if (minimal) cand.emplace_back(v, (ia + 0.5) / n + (ib + 0.5) / n * lp.omega);
    }
  std::sort(cand.begin(), cand.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });

  auto mod_dist = [&](cplx u, cplx v) {
    double best = 1e300;
    for (int mm = -1; mm <= 1; ++mm)
      for (int nn = -1; nn <= 1; ++nn)
        best = std::min(best,
                        std::abs(u - v + static_cast<double>(mm) + static_cast<double>(nn) * lp.omega));
    return best;
  };

  std::vector<cplx> roots;
  for (size_t c = 0; c < cand.size() && roots.size() < 4 && c < 120; ++c) {
    cplx w = cand[c].second;
    bool ok = false;
    for (int it = 0; it < 50; ++it) {
      const cplx g = hval(w);
      const cplx dg = hder(w);
      if (std::abs(dg) < 1e-300) break;
      const cplx step = g / dg;
      w -= step;
      if (std::abs(step) < 1e-13) {
        ok = std::abs(hval(w)) < 1e-9 * scale;
        break;
      }
    }
    if (!ok) continue;
    w = reduce_mod_lattice(w, lp.omega);
    bool dup = false;
    for (const auto& r : roots)
      if (mod_dist(w, r) < 2e-5) dup = true;
    if (!dup) roots.push_back(w);
  }
  if (roots.size() != 4)
    fail(errc::numerical, "group_add: intersection solver did not isolate four points");

  // Remove the parameters of q0 (w = 0), x and y; the leftover is the fourth point.
  std::vector<cplx> known{0.0, wx, wy};
  std::vector<cplx> leftover;
  std::vector<bool> used(known.size(), false);
  for (const auto& r : roots) {
    bool matched = false;
    for (size_t k = 0; k < known.size(); ++k) {
      if (!used[k] && mod_dist(r, known[k]) < 1e-5) {
        used[k] = true;
        matched = true;
        break;
      }
    }
    if (!matched) leftover.push_back(r);
  }
  if (leftover.size() != 1)
    fail(errc::numerical, "group_add: could not separate the fourth intersection point");

  // x + y = I0(w4) and I0 acts as w -> eta - w in the psi gauge.
  return psi(lp.eta - leftover[0]);
}

Vec4c sigma_inverse(const Vec4c& Z) { return involution_I0(involution_I(Z)); }

Vec4c FiberCurve::polish(const Vec4c& Zin, int iterations) const {
  const Vec3c rv = r_.vec() / r_.vec().norm();
  const cplx ra = rv[0], rb = rv[1], rg = rv[2];
  Vec4c Z = Zin / Zin.norm();
  for (int it = 0; it < iterations; ++it) {
    Eigen::Vector2cd F;
    F[0] = (Z[0] * Z[0] - Z[1] * Z[1]) * rb - (Z[0] * Z[0] - Z[2] * Z[2]) * ra;
    F[1] = (Z[0] * Z[0] - Z[2] * Z[2]) * rg - (Z[0] * Z[0] - Z[3] * Z[3]) * rb;
    if (F.norm() < 1e-16) break;
    Eigen::Matrix<cplx, 2, 4> J = Eigen::Matrix<cplx, 2, 4>::Zero();
    J(0, 0) = 2.0 * Z[0] * (rb - ra);
    J(0, 1) = -2.0 * Z[1] * rb;
    J(0, 2) = 2.0 * Z[2] * ra;
    J(1, 0) = 2.0 * Z[0] * (rg - rb);
    J(1, 2) = -2.0 * Z[2] * rg;
    J(1, 3) = 2.0 * Z[3] * rb;
    Eigen::JacobiSVD<Eigen::Matrix<cplx, 2, 4>> svd(J, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const Vec4c step = svd.solve(F);
    Z -= step;
    Z /= Z.norm();
  }
  return Z;
}

RealStructure real_structure(const FiberCurve& f) {
  RealStructure rs;
  const ModulusPoint& m = f.modulus();

  if (m.phi) {
    const auto& p = *m.phi;
    const std::array<double, 3> t{std::tan(p[0]), std::tan(p[1]), std::tan(p[2])};
    for (int k = 0; k < 3; ++k) rs.s[k] = 1.0 + t[(k + 1) % 3] * t[(k + 2) % 3];
  } else {
    // The torus resolvent is projectively real; strip the common phase.
    const Vec3c rv = proj_normalize(f.resolvent().vec());
    for (int k = 0; k < 3; ++k) {
      if (std::fabs(rv[k].imag()) > 1e-8)
        fail(errc::invalid_input, "real_structure: modulus is not on the real torus");
      rs.s[k] = rv[k].real();
    }
  }
  const double scale = std::max({std::fabs(rs.s[0]), std::fabs(rs.s[1]), std::fabs(rs.s[2])});
  for (double sk : rs.s)
    if (std::fabs(sk) < 1e-10 * scale)
      fail(errc::degenerate, "real_structure: vanishing s_k, modulus is non-generic");
  rs.even = (rs.s[0] > 0) == (rs.s[1] > 0) && (rs.s[1] > 0) == (rs.s[2] > 0);

  rs.real_lines = f.real_locus_lines();
  rs.torus_lines = f.torus_locus_lines();
  if (rs.real_lines.size() != 2 || rs.torus_lines.size() != 2)
    fail(errc::numerical, "real_structure: expected two components per real form");
  rs.C_u = f.line_through(rs.real_lines, f.lattice().eta);
  rs.FT0 = f.line_through(rs.torus_lines, 0.0);
  return rs;
}

std::vector<CurvePoint> sample_line(const FiberCurve& f, const TorusLine& line, int n) {
  std::vector<CurvePoint> pts;
  pts.reserve(n);
  for (int i = 0; i < n; ++i) pts.push_back(f.psi(line.at(static_cast<double>(i) / n)));
  return pts;
}

}  // namespace ncs3
