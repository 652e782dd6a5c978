#include "elliptic.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <vector>

namespace ncs3 {

namespace {

constexpr int kMaxTerms = 200;
constexpr double kMinImOmega = 1e-3;

struct theta_eval {
  cplx value;
  cplx deriv;
};

cplx reduce_omega(cplx omega) {
  if (!(omega.imag() > 0)) fail(errc::invalid_input, "theta: Im(omega) must be positive");
  // The nome has period 2 in omega.
  double shift = 2.0 * std::round(omega.real() / 2.0);
  omega -= shift;
  if (omega.imag() < kMinImOmega)
    fail(errc::invalid_input, "theta: Im(omega) too small for the q-series to converge");
  return omega;
}

// Raw q-series on a reduced argument, |Re z| <= 1/2, |Im z| <= Im(omega)/2 + eps.
theta_eval theta_series(int k, cplx z, cplx omega) {
  const cplx q = std::exp(iu * pi * omega);
  cplx sum = 0, dsum = 0;
  int small_run = 0;
  if (k == 3 || k == 4) {
    sum = 1.0;
    for (int n = 1; n <= kMaxTerms; ++n) {
      const double sign = (k == 4 && (n & 1)) ? -1.0 : 1.0;
      const cplx qn = std::pow(q, static_cast<double>(n) * n);
      const cplx arg = 2.0 * n * pi * z;
      const cplx term = 2.0 * sign * qn * std::cos(arg);
      const cplx dterm = -2.0 * sign * qn * (2.0 * n * pi) * std::sin(arg);
      sum += term;
      dsum += dterm;
      if (std::abs(term) < 1e-16 * (std::abs(sum) + 1e-300)) {
        if (++small_run >= 2) break;
      } else {
        small_run = 0;
      }
    }
  } else {
    for (int n = 0; n <= kMaxTerms; ++n) {
      const double sign = (k == 1 && (n & 1)) ? -1.0 : 1.0;
      const double half = n + 0.5;
      const cplx qn = std::pow(q, half * half);
      const cplx arg = (2.0 * n + 1.0) * pi * z;
      cplx term, dterm;
      if (k == 1) {
        term = 2.0 * sign * qn * std::sin(arg);
        dterm = 2.0 * sign * qn * (2.0 * n + 1.0) * pi * std::cos(arg);
      } else {
        term = 2.0 * sign * qn * std::cos(arg);
        dterm = -2.0 * sign * qn * (2.0 * n + 1.0) * pi * std::sin(arg);
      }
      sum += term;
      dsum += dterm;
      // theta1 vanishes at z = 0; gauge smallness against the leading q power.
      const double scale = std::abs(sum) + std::abs(q) + 1e-300;
      if (std::abs(term) < 1e-16 * scale && n >= 1) {
        if (++small_run >= 2) break;
      } else {
        small_run = 0;
      }
    }
  }
  return {sum, dsum};
}

theta_eval theta_full(int k, cplx z, cplx omega) {
  if (k < 1 || k > 4) fail(errc::invalid_input, "theta: index must be 1..4");
  omega = reduce_omega(omega);

  // z = z'' + n + m*omega with |Re z''| <= 1/2, |b - m| <= 1/2.
  auto [a, b] = lattice_coords(z, omega);
  const double m = std::round(b);
  cplx zr = z - m * omega;
  const double n = std::round(zr.real());
  zr -= n;

  // Quasi-periodicity: theta(z'' + n + m*omega) = s * q^{-m^2} e^{-2 pi i m z''} theta(z'').
  double s = 1.0;
  const bool modd = std::fmod(std::fabs(m), 2.0) > 0.5;
  const bool nodd = std::fmod(std::fabs(n), 2.0) > 0.5;
  if (k == 1 && (modd ^ nodd)) s = -1.0;
  if (k == 2 && nodd) s = -1.0;
  if (k == 4 && modd) s = -1.0;

  const cplx q = std::exp(iu * pi * omega);
  const cplx factor = s * std::pow(q, -m * m) * std::exp(-2.0 * pi * iu * m * zr);

  const theta_eval base = theta_series(k, zr, omega);
  theta_eval out;
  out.value = factor * base.value;
  out.deriv = factor * (base.deriv - 2.0 * pi * iu * m * base.value);
  return out;
}

}  // namespace

cplx theta(int k, cplx z, cplx omega) { return theta_full(k, z, omega).value; }
cplx theta_deriv(int k, cplx z, cplx omega) { return theta_full(k, z, omega).deriv; }

std::pair<double, double> lattice_coords(cplx z, cplx omega) {
  if (!(omega.imag() > 0)) fail(errc::invalid_input, "lattice_coords: Im(omega) must be positive");
  const double b = z.imag() / omega.imag();
  const double a = z.real() - b * omega.real();
  return {a, b};
}

cplx reduce_mod_lattice(cplx z, cplx omega) {
  auto [a, b] = lattice_coords(z, omega);
  a -= std::floor(a);
  b -= std::floor(b);
  if (a > 1.0 - 1e-13) a = 0.0;
  if (b > 1.0 - 1e-13) b = 0.0;
  return a + b * omega;
}

ResolventTriple resolvent_from_lattice(const LatticeParams& p) {
  if (!(p.omega.imag() > 0))
    fail(errc::invalid_input, "resolvent_from_lattice: Im(omega) must be positive");
  Vec3c num, den;
  for (int k = 2; k <= 4; ++k) {
    num[k - 2] = theta(k, 0.0, p.omega);
    den[k - 2] = theta(k, p.eta, p.omega);
  }
  const double floor_den = 1e-10 * (std::abs(num[0]) + std::abs(num[1]) + std::abs(num[2]));
  for (int i = 0; i < 3; ++i) {
    if (std::abs(den[i]) < floor_den)
      fail(errc::degenerate, "resolvent_from_lattice: eta is a zero of theta_" +
                                 std::to_string(i + 2));
  }
  return {num[0] * num[0] / (den[0] * den[0]), num[1] * num[1] / (den[1] * den[1]),
          num[2] * num[2] / (den[2] * den[2])};
}

namespace {

// Holomorphic coordinates of a projective triple in the chart of its pivot.
struct triple_chart {
  int pivot;
  int a, b;
};

triple_chart chart_for(const Vec3c& t) {
  int p = 0;
  for (int i = 1; i < 3; ++i)
    if (std::abs(t[i]) > std::abs(t[p])) p = i;
  triple_chart c;
  c.pivot = p;
  c.a = (p + 1) % 3;
  c.b = (p + 2) % 3;
  return c;
}

Eigen::Vector2cd chart_residual(const triple_chart& c, const Vec3c& target, const LatticeParams& p) {
  const Vec3c r = resolvent_from_lattice(p).vec();
  if (std::abs(r[c.pivot]) < 1e-14 * r.norm())
    fail(errc::numerical, "lattice inversion: pivot coordinate vanished");
  Eigen::Vector2cd f;
  f[0] = r[c.a] / r[c.pivot] - target[c.a] / target[c.pivot];
  f[1] = r[c.b] / r[c.pivot] - target[c.b] / target[c.pivot];
  return f;
}

// The triple is invariant under the Gamma(2) action
// (omega, eta) -> ((a*omega+b)/(c*omega+d), eta/(c*omega+d)), under eta -> -eta
// and under lattice shifts of eta.  Reduce omega into the standard Gamma(2)
// fundamental domain |Re| <= 1, |2*omega +- 1| >= 1 so a canonical
// representative is returned.
void reduce_gamma2(cplx& omega, cplx& eta) {
  for (int it = 0; it < 64; ++it) {
    omega -= 2.0 * std::round(omega.real() / 2.0);
    if (std::abs(2.0 * omega + 1.0) < 1.0 - 1e-12) {
      eta /= 2.0 * omega + 1.0;
      omega = omega / (2.0 * omega + 1.0);
    } else if (std::abs(2.0 * omega - 1.0) < 1.0 - 1e-12) {
      eta /= 1.0 - 2.0 * omega;
      omega = omega / (1.0 - 2.0 * omega);
    } else {
      break;
    }
  }
}

// Reduce eta into the cell [0,1)x[0,1) and pick the representative of {eta, -eta}
// with the smaller cell coordinates.
cplx canonical_eta(cplx eta, cplx omega) {
  const cplx e1 = reduce_mod_lattice(eta, omega);
  const cplx e2 = reduce_mod_lattice(-eta, omega);
  auto [a1, b1] = lattice_coords(e1, omega);
  auto [a2, b2] = lattice_coords(e2, omega);
  if (b2 < b1 - 1e-12 || (std::abs(b2 - b1) <= 1e-12 && a2 < a1 - 1e-12)) return e2;
  return e1;
}

}  // namespace

LatticeParams lattice_from_resolvent(const ResolventTriple& r) {
  const Vec3c target = proj_normalize(r.vec());
  // A projectively constant triple forces eta = 0 (all theta ratios equal 1).
  const double scale =
      std::max({std::abs(target[0]), std::abs(target[1]), std::abs(target[2])});
  if (std::abs(target[0] - target[1]) < 1e-12 * scale &&
      std::abs(target[1] - target[2]) < 1e-12 * scale)
    fail(errc::degenerate, "lattice_from_resolvent: triple is projectively (1,1,1)");
  if (std::abs(target[0] - target[1]) < 1e-14 * scale ||
      std::abs(target[1] - target[2]) < 1e-14 * scale ||
      std::abs(target[0] - target[2]) < 1e-14 * scale)
    fail(errc::degenerate, "lattice_from_resolvent: triple has coinciding entries");

  const triple_chart chart = chart_for(target);

  auto newton = [&](LatticeParams p) -> std::pair<LatticeParams, double> {
    double res = 1e300;
    for (int it = 0; it < 60; ++it) {
      Eigen::Vector2cd f;
      try {
        f = chart_residual(chart, target, p);
      } catch (const error&) {
        return {p, 1e300};
      }
      res = f.norm();
      if (res < 1e-13) break;
      const double h = 1e-6;
      Eigen::Matrix2cd J;
      try {
        const auto fo1 = chart_residual(chart, target, {p.omega + h, p.eta});
        const auto fo2 = chart_residual(chart, target, {p.omega - h, p.eta});
        const auto fe1 = chart_residual(chart, target, {p.omega, p.eta + h});
        const auto fe2 = chart_residual(chart, target, {p.omega, p.eta - h});
        J.col(0) = (fo1 - fo2) / (2.0 * h);
        J.col(1) = (fe1 - fe2) / (2.0 * h);
      } catch (const error&) {
        return {p, 1e300};
      }
      Eigen::Vector2cd step = J.fullPivLu().solve(f);
      if (!step.allFinite()) return {p, 1e300};
      // Damped update.
      double lam = 1.0;
      bool moved = false;
      for (int half = 0; half < 8; ++half) {
        LatticeParams trial{p.omega - lam * step[0], p.eta - lam * step[1]};
        if (trial.omega.imag() > kMinImOmega && trial.omega.imag() < 60.0) {
          try {
            const double rnew = chart_residual(chart, target, trial).norm();
            if (rnew < res) {
              p = trial;
              res = rnew;
              moved = true;
              break;
            }
          } catch (const error&) {
          }
        }
        lam *= 0.5;
      }
      if (!moved) break;
    }
    return {p, res};
  };

  // 16 x 16 seeding: Im(omega) log-spaced over [0.3, 3], eta over the cell.
  for (int i = 0; i < 16; ++i) {
    const double im = 0.3 * std::pow(10.0, i / 15.0);
    const cplx omega0(0.0, im);
    for (int ja = 0; ja < 4; ++ja) {
      for (int jb = 0; jb < 4; ++jb) {
        const cplx eta0 = (ja + 0.5) / 4.0 + (jb + 0.5) / 4.0 * omega0;
        auto [p, res] = newton({omega0, eta0});
        if (res < 1e-11) {
          reduce_gamma2(p.omega, p.eta);
          p.eta = canonical_eta(p.eta, p.omega);
          // Confirm the canonical representative still matches.
          if (resolvent_from_lattice(p).proj_equals(r, 1e-9)) return p;
        }
      }
    }
  }
  fail(errc::numerical, "lattice_from_resolvent: no convergence within the seed budget");
}

cplx j_from_pencil(const ResolventTriple& r) {
  const Vec3c v = proj_normalize(r.vec());
  const cplx a = v[0], b = v[1], g = v[2];
  const double scale = std::max({std::abs(a), std::abs(b), std::abs(g)});
  if (std::abs(a) < 1e-12 * scale || std::abs(b) < 1e-12 * scale ||
      std::abs(g) < 1e-12 * scale || std::abs(a - b) < 1e-12 * scale ||
      std::abs(b - g) < 1e-12 * scale || std::abs(g - a) < 1e-12 * scale)
    fail(errc::degenerate, "j_from_pencil: pencil quartic has repeated roots");
  // Degenerate members of the pencil sit at t = 0, 1, infinity and
  // t4 = alpha(beta-gamma)/(gamma(beta-alpha)); lambda is their cross-ratio.
  const cplx lambda = g * (b - a) / (a * (b - g));
  const cplx l2 = lambda * lambda;
  return 256.0 * std::pow(l2 - lambda + 1.0, 3) / (l2 * (1.0 - lambda) * (1.0 - lambda));
}

cplx j_from_omega(cplx omega) {
  const cplx t2 = theta(2, 0.0, omega);
  const cplx t3 = theta(3, 0.0, omega);
  const cplx lambda = std::pow(t2 / t3, 4);
  const cplx l2 = lambda * lambda;
  return 256.0 * std::pow(l2 - lambda + 1.0, 3) / (l2 * (1.0 - lambda) * (1.0 - lambda));
}

const std::pair<std::vector<double>, std::vector<double>>& gauss_legendre(int n) {
  static std::mutex mu;
  static std::map<int, std::pair<std::vector<double>, std::vector<double>>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;

  std::vector<double> x(n), w(n);
  for (int i = 0; i < n; ++i) {
    double xi = std::cos(pi * (i + 0.75) / (n + 0.5));
    for (int it2 = 0; it2 < 100; ++it2) {
      double p0 = 1.0, p1 = xi;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * xi * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      const double dp = n * (xi * p1 - p0) / (xi * xi - 1.0);
      const double dx = p1 / dp;
      xi -= dx;
      if (std::fabs(dx) < 1e-15) break;
    }
    double p0 = 1.0, p1 = xi;
    for (int k = 2; k <= n; ++k) {
      const double p2 = ((2.0 * k - 1.0) * xi * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    const double dp = n * (xi * p1 - p0) / (xi * xi - 1.0);
    x[i] = -xi;  // ascending order
    w[i] = 2.0 / ((1.0 - xi * xi) * dp * dp);
  }
  return cache.emplace(n, std::make_pair(std::move(x), std::move(w))).first->second;
}

namespace {

cplx gl_composite(const std::function<cplx(double)>& f, double a, double b, int panels,
                  int order) {
  const auto& [xs, ws] = gauss_legendre(order);
  const double hp = (b - a) / panels;
  cplx total = 0;
  for (int p = 0; p < panels; ++p) {
    const double lo = a + p * hp;
    cplx acc = 0;
    for (size_t i = 0; i < xs.size(); ++i) {
      const double t = lo + 0.5 * hp * (xs[i] + 1.0);
      const cplx v = f(t);
      if (!std::isfinite(v.real()) || !std::isfinite(v.imag()) || std::abs(v) > 1e12)
        fail(errc::degenerate, "path_integral: singular integrand on the path");
      acc += ws[i] * v;
    }
    total += 0.5 * hp * acc;
  }
  return total;
}

}  // namespace

quad_result path_integral(const std::function<cplx(double)>& f, double a, double b, int n) {
  if (n < 1) fail(errc::invalid_input, "path_integral: need at least one node");
  const int panels = std::max(1, (n + 15) / 16);
  const cplx fine = gl_composite(f, a, b, panels, 16);
  // Half-resolution comparison pass: fewer panels, or a lower order when a
  // single panel is in play.
  const cplx coarse = (panels > 1) ? gl_composite(f, a, b, panels / 2, 16)
                                   : gl_composite(f, a, b, 1, 8);
  return {fine, std::abs(fine - coarse)};
}

}  // namespace ncs3
