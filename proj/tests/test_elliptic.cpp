#include <doctest.h>

#include <cmath>
#include <complex>
#include <vector>

#include "elliptic.hpp"

using namespace ncs3;

namespace {

// Independent plain-loop q-series for the theta constants and theta values,
// kept deliberately separate from the library implementation.
cplx oracle_theta(int k, cplx z, cplx omega) {
  const cplx q = std::exp(iu * pi * omega);
  cplx s = (k == 3 || k == 4) ? cplx(1.0) : cplx(0.0);
  for (int n = (k <= 2 ? 0 : 1); n <= 120; ++n) {
    switch (k) {
      case 1:
        s += 2.0 * ((n & 1) ? -1.0 : 1.0) * std::pow(q, (n + 0.5) * (n + 0.5)) *
             std::sin((2.0 * n + 1.0) * pi * z);
        break;
      case 2:
        s += 2.0 * std::pow(q, (n + 0.5) * (n + 0.5)) * std::cos((2.0 * n + 1.0) * pi * z);
        break;
      case 3:
        s += 2.0 * std::pow(q, static_cast<double>(n) * n) * std::cos(2.0 * n * pi * z);
        break;
      case 4:
        s += 2.0 * ((n & 1) ? -1.0 : 1.0) * std::pow(q, static_cast<double>(n) * n) *
             std::cos(2.0 * n * pi * z);
        break;
    }
  }
  return s;
}

// Distance between eta values modulo the lattice and the eta -> -eta symmetry.
double eta_class_distance(cplx e1, cplx e2, cplx omega) {
  double best = 1e300;
  for (double s : {1.0, -1.0}) {
    cplx d = e1 - s * e2;
    auto [a, b] = lattice_coords(d, omega);
    a -= std::round(a);
    b -= std::round(b);
    best = std::min(best, std::abs(a + b * omega));
  }
  return best;
}

}  // namespace

TEST_CASE("theta1 is odd and vanishes at the origin") {
  for (cplx omega : {cplx(0.0, 0.8), cplx(0.3, 1.4), cplx(-0.7, 2.2)}) {
    CHECK(std::abs(theta(1, 0.0, omega)) < 1e-14);
    const cplx z(0.17, 0.05);
    CHECK(std::abs(theta(1, z, omega) + theta(1, -z, omega)) < 1e-13);
  }
}

TEST_CASE("theta values match the independent series") {
  rng r(11);
  for (int i = 0; i < 50; ++i) {
    const cplx omega(r.uniform(-0.9, 0.9), r.uniform(0.5, 2.0));
    const cplx z(r.uniform(-0.45, 0.45), r.uniform(-0.3, 0.3));
    for (int k = 1; k <= 4; ++k) {
      const cplx a = theta(k, z, omega);
      const cplx b = oracle_theta(k, z, omega);
      CHECK(std::abs(a - b) < 1e-12 * (1.0 + std::abs(b)));
    }
  }
}

TEST_CASE("Jacobi identity for theta constants at omega = 1.1i") {
  const cplx omega(0.0, 1.1);
  const cplx t2 = oracle_theta(2, 0.0, omega);
  const cplx t3 = oracle_theta(3, 0.0, omega);
  const cplx t4 = oracle_theta(4, 0.0, omega);
  // Oracle consistency with the implementation.
  CHECK(std::abs(t2 - theta(2, 0.0, omega)) < 1e-14);
  const cplx res = std::pow(t2, 4) + std::pow(t4, 4) - std::pow(t3, 4);
  CHECK(std::abs(res) < 1e-12);
  const cplx res_impl = std::pow(theta(2, 0.0, omega), 4) + std::pow(theta(4, 0.0, omega), 4) -
                        std::pow(theta(3, 0.0, omega), 4);
  CHECK(std::abs(res_impl) < 1e-12);
}

TEST_CASE("square identities hold at random arguments") {
  rng r(12);
  for (int i = 0; i < 200; ++i) {
    const cplx omega(r.uniform(-0.9, 0.9), r.uniform(0.5, 2.0));
    const cplx z(r.uniform(-0.5, 0.5), r.uniform(-0.25, 0.25));
    const cplx t1 = theta(1, z, omega), t2 = theta(2, z, omega);
    const cplx t3 = theta(3, z, omega), t4 = theta(4, z, omega);
    const cplx c2 = theta(2, 0.0, omega), c3 = theta(3, 0.0, omega), c4 = theta(4, 0.0, omega);
    const cplx id1 = c2 * c2 * t3 * t3 - t2 * t2 * c3 * c3 - c4 * c4 * t1 * t1;
    const cplx id2 = t4 * t4 * c3 * c3 - t1 * t1 * c2 * c2 - t3 * t3 * c4 * c4;
    CHECK(std::abs(id1) < 1e-12);
    CHECK(std::abs(id2) < 1e-12);
  }
}

TEST_CASE("quasi-periodicity with the standard factors") {
  rng r(13);
  for (int i = 0; i < 100; ++i) {
    const cplx omega(r.uniform(-0.9, 0.9), r.uniform(0.5, 2.0));
    const cplx z(r.uniform(-1.5, 1.5), r.uniform(-0.5, 0.5));
    const cplx q = std::exp(iu * pi * omega);
    const cplx M = std::exp(-2.0 * pi * iu * z) / q;
    const double sgn1[5] = {0, -1, -1, 1, 1};   // z -> z + 1
    const double sgnw[5] = {0, -1, 1, 1, -1};   // z -> z + omega
    for (int k = 1; k <= 4; ++k) {
      const cplx base = theta(k, z, omega);
      const cplx shift1 = theta(k, z + 1.0, omega);
      const cplx shiftw = theta(k, z + omega, omega);
      CHECK(std::abs(shift1 - sgn1[k] * base) < 1e-12 * (1.0 + std::abs(base)));
      CHECK(std::abs(shiftw - sgnw[k] * M * base) < 1e-12 * (1.0 + std::abs(M * base)));
    }
  }
}

TEST_CASE("theta rejects non-convergent omega") {
  CHECK_THROWS_AS(theta(3, 0.1, cplx(0.5, -1.0)), error);
  CHECK_THROWS_AS(theta(3, 0.1, cplx(0.5, 1e-5)), error);
}

TEST_CASE("theta derivative matches finite differences") {
  rng r(14);
  for (int i = 0; i < 20; ++i) {
    const cplx omega(r.uniform(-0.5, 0.5), r.uniform(0.7, 1.8));
    const cplx z(r.uniform(-0.4, 0.4), r.uniform(-0.2, 0.2));
    const double h = 1e-5;
    for (int k = 1; k <= 4; ++k) {
      const cplx fd = (theta(k, z + h, omega) - theta(k, z - h, omega)) / (2.0 * h);
      CHECK(std::abs(theta_deriv(k, z, omega) - fd) < 1e-8 * (1.0 + std::abs(fd)));
    }
  }
}

TEST_CASE("resolvent at eta = 0 is projectively (1,1,1)") {
  const ResolventTriple t = resolvent_from_lattice({cplx(0.2, 1.1), 0.0});
  CHECK(t.proj_equals({1.0, 1.0, 1.0}, 1e-12));
}

TEST_CASE("resolvent rejects eta at a zero of theta_2") {
  // theta2 vanishes at 1/2.
  CHECK_THROWS_AS(resolvent_from_lattice({cplx(0.0, 1.0), 0.5}), error);
}

TEST_CASE("resolvent is invariant under full lattice shifts of eta") {
  const LatticeParams p{cplx(0.1, 1.2), cplx(0.23, 0.41)};
  const ResolventTriple t0 = resolvent_from_lattice(p);
  for (cplx shift : {cplx(1.0, 0.0), p.omega, 2.0 * p.omega - 3.0}) {
    const ResolventTriple t1 = resolvent_from_lattice({p.omega, p.eta + shift});
    CHECK(t0.proj_equals(t1, 1e-10));
  }
}

TEST_CASE("lattice inversion roundtrip at the pinned sample") {
  const LatticeParams p{cplx(0.0, 1.3), cplx(0.21, 0.07)};
  const ResolventTriple t = resolvent_from_lattice(p);
  const LatticeParams q = lattice_from_resolvent(t);
  const ResolventTriple t2 = resolvent_from_lattice(q);
  CHECK(t.proj_equals(t2, 1e-10));
  CHECK(std::abs(q.omega - p.omega) < 1e-8);
  CHECK(eta_class_distance(q.eta, p.eta, p.omega) < 1e-8);
}

TEST_CASE("lattice inversion roundtrip on random samples") {
  rng r(15);
  int done = 0;
  for (int i = 0; done < 20 && i < 40; ++i) {
    const cplx omega(r.uniform(-0.8, 0.8), r.uniform(0.6, 2.2));
    const cplx eta = r.uniform(0.08, 0.92) + r.uniform(0.08, 0.92) * omega;
    LatticeParams p{omega, eta};
    ResolventTriple t;
    try {
      t = resolvent_from_lattice(p);
    } catch (const error&) {
      continue;  // eta landed on a theta zero
    }
    const LatticeParams q = lattice_from_resolvent(t);
    const ResolventTriple t2 = resolvent_from_lattice(q);
    const double err = proj_distance(t.vec(), t2.vec());
    CHECK(err < 1e-8);
    CHECK(std::abs(q.omega - p.omega) < 1e-8 * (1.0 + std::abs(p.omega)));
    CHECK(eta_class_distance(q.eta, p.eta, p.omega) < 1e-8);
    ++done;
  }
  CHECK(done == 20);
}

TEST_CASE("constant triple is rejected as degenerate") {
  CHECK_THROWS_AS(lattice_from_resolvent({1.0, 1.0, 1.0}), error);
  CHECK_THROWS_AS(lattice_from_resolvent({cplx(2.0, 1.0), cplx(2.0, 1.0), cplx(2.0, 1.0)}), error);
}

// Permutations of the triple correspond to changes of lattice basis, not to
// 2-torsion shifts of eta: swapping the last two entries is omega -> omega + 1
// and reversing the triple is (omega, eta) -> (-1/omega, eta/omega).
TEST_CASE("triple permutations realize modular changes of basis") {
  const LatticeParams p{cplx(0.15, 1.05), cplx(0.31, 0.22)};
  const Vec3c t = resolvent_from_lattice(p).vec();

  const Vec3c swap_bc = resolvent_from_lattice({p.omega + 1.0, p.eta}).vec();
  CHECK(proj_equal(swap_bc, Vec3c(t[0], t[2], t[1]), 1e-10));

  const Vec3c rev = resolvent_from_lattice({-1.0 / p.omega, p.eta / p.omega}).vec();
  CHECK(proj_equal(rev, Vec3c(t[2], t[1], t[0]), 1e-10));

  // Inverting a permuted triple lands on the same curve: j agrees.
  const LatticeParams q = lattice_from_resolvent(ResolventTriple::from(Vec3c(t[1], t[0], t[2])));
  const cplx j1 = j_from_omega(p.omega);
  const cplx j2 = j_from_omega(q.omega);
  CHECK(std::abs(j1 - j2) < 1e-6 * (1.0 + std::abs(j1)));
}

TEST_CASE("j from the pencil: degenerate and harmonic cases") {
  CHECK_THROWS_AS(j_from_pencil({1.0, 1.0, 1.0}), error);
  CHECK_THROWS_AS(j_from_pencil({2.0, 2.0, 5.0}), error);
  CHECK_THROWS_AS(j_from_pencil({0.0, 2.0, 5.0}), error);
  // lambda = -1 (harmonic): gamma = alpha*beta/(2*alpha - beta).
  const cplx a = 1.0, b = 3.0, g = a * b / (2.0 * a - b);
  const cplx j = j_from_pencil({a, b, g});
  CHECK(std::abs(j - 1728.0) < 1e-9);
}

TEST_CASE("j from the pencil equals j from the inverted lattice") {
  rng r(16);
  int done = 0;
  for (int i = 0; done < 8 && i < 20; ++i) {
    const cplx omega(r.uniform(-0.6, 0.6), r.uniform(0.7, 1.7));
    const cplx eta = r.uniform(0.1, 0.9) + r.uniform(0.1, 0.9) * omega;
    ResolventTriple t;
    try {
      t = resolvent_from_lattice({omega, eta});
      const cplx jp = j_from_pencil(t);
      const cplx jo = j_from_omega(lattice_from_resolvent(t).omega);
      CHECK(std::abs(jp - jo) < 1e-6 * (1.0 + std::abs(jp)));
      ++done;
    } catch (const error&) {
      continue;
    }
  }
  CHECK(done == 8);
}

// q-expansion of the modular j function, used as a third, series-based route.
TEST_CASE("j matches the classical q-expansion") {
  const double c[] = {744.0, 196884.0, 21493760.0, 864299970.0, 20245856256.0,
                      333202640600.0, 4252023300096.0, 44656994071935.0,
                      401490886656000.0, 3176440229784420.0, 22567393309593600.0,
                      146211911499519294.0, 874313719685775360.0,
                      4872010111798142520.0, 25497827389410525184.0,
                      126142916465781843075.0};
  for (cplx omega : {cplx(0.0, 1.2), cplx(0.3, 0.9), cplx(-0.4, 1.6)}) {
    const cplx qj = std::exp(2.0 * pi * iu * omega);
    cplx jq = 1.0 / qj;
    cplx qn = 1.0;
    for (int n = 0; n < 16; ++n) {
      jq += c[n] * qn;
      qn *= qj;
    }
    const cplx jt = j_from_omega(omega);
    CHECK(std::abs(jq - jt) < 1e-6 * (1.0 + std::abs(jt)));
  }
}

TEST_CASE("path integral: residue of dz/z over the unit circle") {
  auto f = [](double t) {
    const cplx z = std::exp(iu * t);
    const cplx dz = iu * std::exp(iu * t);
    return dz / z;
  };
  const quad_result q = path_integral(f, 0.0, 2.0 * pi, 64);
  CHECK(std::abs(q.value - 2.0 * pi * iu) < 1e-12);
}

TEST_CASE("path integral: exact differential over a closed cycle vanishes") {
  auto f = [](double t) { return std::cos(t) * std::exp(std::sin(t)) * cplx(1.0, 0.5); };
  const quad_result q = path_integral(f, 0.0, 2.0 * pi, 128);
  CHECK(std::abs(q.value) < 1e-10);
  CHECK(q.error_estimate < 1e-8);
}

TEST_CASE("path integral converges at the Gauss-Legendre rate") {
  auto f = [](double t) { return std::exp(std::sin(3.0 * pi * t)) * cplx(1.0, -2.0); };
  const cplx ref = path_integral(f, 0.0, 1.0, 2048).value;
  const double e64 = std::abs(path_integral(f, 0.0, 1.0, 64).value - ref);
  const double e128 = std::abs(path_integral(f, 0.0, 1.0, 128).value - ref);
  CHECK(e128 < std::max(e64 / 4.0, 1e-14));
}

TEST_CASE("path integral refuses poles on the path") {
  auto f = [](double t) { return std::pow(cplx(t - 0.5, 0.0), -8.0); };
  CHECK_THROWS_AS(path_integral(f, 0.0, 1.0, 64), error);
}
