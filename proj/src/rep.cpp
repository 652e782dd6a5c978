#include "rep.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>

namespace ncs3 {

Mat4c sphere_form(const ModulusPoint& m) {
  if (!m.phi) fail(errc::invalid_input, "sphere_form: torus angles required");
  const Vec4c c = change_scalars_torus(*m.phi);
  const Vec4c u = proj_normalize(m.u);
  Mat4c S = Mat4c::Zero();
  for (int mu = 0; mu < 4; ++mu) S(mu, mu) = u[mu] * c[mu] * c[mu];
  return S;
}

namespace {

cplx bilinear(const Mat4c& Q, const Vec4c& a, const Vec4c& b) {
  return (a.transpose() * Q * b).value();
}

double positive_value(const Mat4c& Q, const Vec4c& Z, const Vec4c& Zj, const char* who) {
  const cplx q = bilinear(Q, Z, Zj);
  if (std::abs(q.imag()) > 1e-8 * std::abs(q) || q.real() <= 0.0)
    fail(errc::invalid_input,
         std::string(who) + ": sphere form is not positive along the orbit, invalid component");
  return q.real();
}

}  // namespace

OrbitData build_orbit(const FiberCurve& f, const CurvePoint& v, int N) {
  const ModulusPoint& m = f.modulus();
  if (!m.phi) fail(errc::invalid_input, "build_orbit: torus modulus required");
  const RealStructure rs = real_structure(f);
  if (!rs.even) fail(errc::invalid_input, "build_orbit: modulus is odd, no invariant component");

  OrbitData o;
  o.fiber = &f;
  o.N = N;
  o.ju = curve_involution(*m.phi);
  o.Q = sphere_form(m);

  const cplx zv = f.invert_param(v);
  const double d_t = f.line_distance(zv, rs.FT0);
  const double d_c = f.line_distance(zv, rs.C_u);
  if (std::min(d_t, d_c) > 1e-6)
    fail(errc::invalid_input, "build_orbit: base point is on neither invariant component");
  o.orbit_line = TorusLine{zv, rs.C_u.dir};

  const cplx eta = f.lattice().eta;
  const int size = 2 * N + 1;
  o.z.resize(size);
  o.Z.resize(size);
  o.Zj.resize(size);
  o.Qval.resize(size);

  auto store = [&](int idx, cplx z, const Vec4c& Zraw) {
    Vec4c Z = Zraw / Zraw.norm();
    o.z[idx] = z;
    o.Z[idx] = Z;
    o.Zj[idx] = o.ju.apply(Z);
    o.Qval[idx] = positive_value(o.Q, Z, o.Zj[idx], "build_orbit");
  };

  store(N, zv, v.Z);
  Vec4c fwd = o.Z[N], bwd = o.Z[N];
  cplx zf = zv, zb = zv;
  for (int n = 1; n <= N; ++n) {
    fwd = sigma_map(fwd);
    if (n % 10 == 0) fwd = f.polish(fwd);
    zf = f.invert_param_near(CurvePoint{fwd}, zf - eta);  // nearest-image parameter
    store(N + n, zf, fwd);

    bwd = sigma_inverse(bwd);
    if (n % 10 == 0) bwd = f.polish(bwd);
    zb = f.invert_param_near(CurvePoint{bwd}, zb + eta);
    store(N - n, zb, bwd);
  }
  return o;
}

ShiftRep build_theta_rep(const OrbitData& o, const Vec4c& L) {
  ShiftRep rep;
  rep.orbit = &o;
  rep.L = L;
  const int size = 2 * o.N + 1;
  for (int i = 0; i < size; ++i) {
    if (std::abs((L.transpose() * o.Z[i]).value()) < 1e-10 * L.norm())
      fail(errc::invalid_input, "build_theta_rep: gauge form vanishes on the orbit window");
  }
  rep.w.resize(size - 1);
  for (int i = 0; i + 1 < size; ++i) {
    const double num = std::norm((L.transpose() * o.Z[i]).value());
    rep.w[i] = std::sqrt(num / o.Qval[i]);
  }
  return rep;
}

Eigen::MatrixXcd ShiftRep::shift_W() const {
  const int s = size();
  Eigen::MatrixXcd W = Eigen::MatrixXcd::Zero(s, s);
  for (int i = 0; i + 1 < s; ++i) W(i, i + 1) = w[i];
  return W;
}

Eigen::MatrixXcd ShiftRep::diag(const std::function<cplx(const Vec4c&)>& f) const {
  const int s = size();
  Eigen::MatrixXcd D = Eigen::MatrixXcd::Zero(s, s);
  for (int i = 0; i < s; ++i) D(i, i) = f(orbit->Z[i]);
  return D;
}

Eigen::MatrixXcd ShiftRep::theta(const Vec4c& Y) const {
  const int s = size();
  Eigen::MatrixXcd T = Eigen::MatrixXcd::Zero(s, s);
  const double inv_rt2 = 1.0 / std::sqrt(2.0);
  for (int i = 0; i + 1 < s; ++i) {
    const cplx num = (Y.transpose() * orbit->Z[i]).value();
    const cplx den = (L.transpose() * orbit->Z[i]).value();
    T(i, i + 1) = inv_rt2 * num / den * w[i];
  }
  for (int i = 1; i < s; ++i) {
    const cplx num = (Y.transpose() * orbit->Zj[i - 1]).value();
    const cplx den = std::conj((L.transpose() * orbit->Z[i - 1]).value());
    T(i, i - 1) = inv_rt2 * w[i - 1] * num / den;
  }
  return T;
}

double relation_residual(const ShiftRep& rep, const AlgebraPresentation& a, int margin) {
  const int s = rep.size();
  std::array<Eigen::MatrixXcd, 4> th;
  for (int mu = 0; mu < 4; ++mu) th[mu] = rep.theta(unit_Z(mu));
  double worst = 0.0;
  for (int row = 0; row < 6; ++row) {
    Eigen::MatrixXcd R = Eigen::MatrixXcd::Zero(s, s);
    double rn = a.relations.row(row).norm();
    for (int mu = 0; mu < 4; ++mu)
      for (int nu = 0; nu < 4; ++nu) {
        const cplx c = a.relations(row, 4 * mu + nu);
        if (c != cplx(0)) R += (c / rn) * th[mu] * th[nu];
      }
    const int in = s - 2 * margin;
    worst = std::max(worst, R.block(margin, margin, in, in).norm());
  }
  return worst;
}

double sphere_residual(const ShiftRep& rep, int margin) {
  const int s = rep.size();
  std::array<Eigen::MatrixXcd, 4> th;
  for (int mu = 0; mu < 4; ++mu) th[mu] = rep.theta(unit_Z(mu));
  Eigen::MatrixXcd R = Eigen::MatrixXcd::Zero(s, s);
  const Mat4c& Q = rep.orbit->Q;
  for (int mu = 0; mu < 4; ++mu)
    for (int nu = 0; nu < 4; ++nu)
      if (Q(mu, nu) != cplx(0)) R += Q(mu, nu) * th[mu] * th[nu];
  R -= Eigen::MatrixXcd::Identity(s, s);
  const int in = s - 2 * margin;
  return R.block(margin, margin, in, in).norm();
}

NormBounds norm_bounds_check(const ShiftRep& rep, const Vec4c& Y, double slack,
                             int metric_samples) {
  const OrbitData& o = *rep.orbit;
  const FiberCurve& f = *o.fiber;
  double sup = 0.0;
  for (int i = 0; i < metric_samples; ++i) {
    const cplx z = o.orbit_line.at(static_cast<double>(i) / metric_samples);
    Vec4c Z = f.psi(z).Z;
    Z /= Z.norm();
    const Vec4c Zj = o.ju.apply(Z);
    const double q = positive_value(o.Q, Z, Zj, "norm_bounds_check");
    sup = std::max(sup, std::abs((Y.transpose() * Z).value()) / std::sqrt(q));
  }
  const Eigen::MatrixXcd T = rep.theta(Y);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(T.adjoint() * T, Eigen::EigenvaluesOnly);
  const double tn = std::sqrt(std::max(0.0, es.eigenvalues().maxCoeff()));
  NormBounds nb;
  nb.sup_metric = sup;
  nb.theta_norm = tn;
  nb.lower_ok = sup <= std::sqrt(2.0) * tn * (1.0 + slack);
  nb.upper_ok = std::sqrt(2.0) * tn <= 2.0 * sup * (1.0 + slack);
  return nb;
}

cplx trace_functional(const OrbitData& o, int power,
                      const std::function<cplx(const Vec4c&)>& f) {
  if (power != 0) return 0.0;
  cplx acc = 0.0;
  for (const Vec4c& Z : o.Z) acc += f(Z);
  return acc / static_cast<double>(o.Z.size());
}

int winding_number(const FiberCurve& f, const std::function<cplx(cplx)>& g) {
  const cplx omega = f.lattice().omega;
  for (int attempt = 0; attempt < 3; ++attempt) {
    const cplx base = (0.0131 + 0.0217 * attempt) + (0.0077 + 0.0119 * attempt) * omega;
    const int per_edge = 1600;
    const std::array<cplx, 4> corners{base, base + 1.0, base + 1.0 + omega, base + omega};
    double total = 0.0;
    bool ok = true;
    double gmin = 1e300, gmax = 0.0;
    cplx prev = g(corners[0]);
    for (int e = 0; e < 4 && ok; ++e) {
      const cplx from = corners[e], to = corners[(e + 1) % 4];
      for (int i = 1; i <= per_edge && ok; ++i) {
        const cplx zz = from + (to - from) * (static_cast<double>(i) / per_edge);
        const cplx cur = g(zz);
        const double a = std::abs(cur);
        gmin = std::min(gmin, a);
        gmax = std::max(gmax, a);
        if (a == 0.0) {
          ok = false;
          break;
        }
        const double dphi = std::arg(cur / prev);
        if (std::fabs(dphi) > 1.5) {
          ok = false;  // phase step too coarse or near a zero, retry shifted
          break;
        }
        total += dphi;
        prev = cur;
      }
    }
    if (!ok || gmin < 1e-9 * gmax) continue;
    const double turns = total / (2.0 * pi);
    const long nearest = std::lround(turns);
    if (std::fabs(turns - nearest) < 0.05) return static_cast<int>(nearest);
  }
  fail(errc::numerical, "winding_number: could not isolate the contour from zeros");
}

int bundle_degree(const FiberCurve& f, const Vec4c& L) {
  if (L.norm() == 0.0) fail(errc::invalid_input, "bundle_degree: zero form");
  return winding_number(
      f, [&](cplx z) { return (L.transpose() * f.embed_raw(z)).value(); });
}

cplx RationalCrossProduct::r_param(cplx zZ) const {
  return -zZ + 2.0 * zv - tau + fiber->lattice().eta;
}

Vec4c RationalCrossProduct::r_of(const Vec4c& Z) const {
  const cplx zZ = fiber->invert_param(CurvePoint{Z});
  return fiber->psi(r_param(zZ)).Z;
}

cplx RationalCrossProduct::gamma(const Vec4c& Zin) const {
  const Vec4c Z = Zin / Zin.norm();
  Vec4c R = r_of(Z);
  R /= R.norm();
  const cplx num = (L.transpose() * Z).value() * (Lp.transpose() * R).value();
  const cplx den = (Z.transpose() * Q * R).value();
  if (std::abs(den) < 1e-12)
    fail(errc::degenerate, "gamma: pole of the rational weight on the orbit closure");
  return num / den;
}

RationalCrossProduct rational_crossproduct_data(const FiberCurve& f, const CurvePoint& v) {
  const ModulusPoint& m = f.modulus();
  if (!m.phi) fail(errc::invalid_input, "rational_crossproduct_data: torus modulus required");
  const RealStructure rs = real_structure(f);
  if (!rs.even)
    fail(errc::invalid_input, "rational_crossproduct_data: modulus is odd");

  RationalCrossProduct rc;
  rc.fiber = &f;
  rc.ju = curve_involution(*m.phi);
  rc.Q = sphere_form(m);
  rc.zv = f.invert_param(v);
  const cplx omega = f.lattice().omega;
  switch (rc.ju.k) {
    case 1: rc.tau = 0.5; break;
    case 2: rc.tau = 0.5 + omega / 2.0; break;
    case 3: rc.tau = omega / 2.0; break;
    default: fail(errc::numerical, "rational_crossproduct_data: bad involution index");
  }

  // Deterministic real gauge form avoiding zeros on K(v).
  const std::array<Vec4c, 4> candidates{
      Vec4c(1.0, 0.3, -0.2, 0.1), Vec4c(0.7, -0.4, 0.5, 0.2), Vec4c(0.2, 1.0, 0.4, -0.3),
      Vec4c(1.0, 0.0, 0.0, 0.0)};
  const TorusLine kline{rc.zv, rs.C_u.dir};
  bool found = false;
  for (const Vec4c& L : candidates) {
    double lmin = 1e300, lmax = 0.0;
    for (int i = 0; i < 400; ++i) {
      Vec4c Z = f.psi(kline.at(i / 400.0)).Z;
      Z /= Z.norm();
      const double a = std::abs((L.transpose() * Z).value());
      lmin = std::min(lmin, a);
      lmax = std::max(lmax, a);
    }
    if (lmin > 0.05 * lmax && lmin > 1e-4) {
      rc.L = L;
      found = true;
      break;
    }
  }
  if (!found)
    fail(errc::numerical, "rational_crossproduct_data: no admissible real gauge form found");
  rc.Lp = rc.ju.eps * involution_Imu(rc.ju.k, rc.L);

  // Pole census of gamma's denominator along K(v).
  rc.pole_flagged = false;
  for (int i = 0; i < 400; ++i) {
    Vec4c Z = f.psi(kline.at(i / 400.0)).Z;
    Z /= Z.norm();
    Vec4c R = f.psi(rc.r_param(kline.at(i / 400.0))).Z;
    R /= R.norm();
    if (std::abs((Z.transpose() * rc.Q * R).value()) < 1e-6) {
      rc.pole_flagged = true;
      break;
    }
  }
  return rc;
}

}  // namespace ncs3
