#include <doctest.h>

#include <cmath>

#include "algebra.hpp"

using namespace ncs3;

namespace {

const std::array<double, 3> kPhi{0.3, 0.4, 0.5};

Vec4c random_vec(rng& r) {
  return Vec4c(r.complex_box(-1, 1), r.complex_box(-1, 1), r.complex_box(-1, 1),
               r.complex_box(-1, 1));
}

// Sklyanin-style span built directly from the printed bracket relations with
// given constants J_lm.
Eigen::Matrix<cplx, 6, 16> sklyanin_span(const std::array<double, 3>& J) {
  Eigen::Matrix<cplx, 6, 16> rel;
  rel.setZero();
  const std::array<std::array<int, 3>, 3> cyc{{{1, 2, 3}, {2, 3, 1}, {3, 1, 2}}};
  const std::array<double, 3> Jlm{J[1], J[2], J[0]};  // rows k=1,2,3 use J_23, J_31, J_12
  for (int row = 0; row < 3; ++row) {
    const int k = cyc[row][0], l = cyc[row][1], m = cyc[row][2];
    rel(2 * row, 4 * 0 + k) += 1.0;
    rel(2 * row, 4 * k + 0) -= 1.0;
    rel(2 * row, 4 * l + m) -= iu * Jlm[row];
    rel(2 * row, 4 * m + l) -= iu * Jlm[row];
    rel(2 * row + 1, 4 * l + m) += 1.0;
    rel(2 * row + 1, 4 * m + l) -= 1.0;
    rel(2 * row + 1, 4 * 0 + k) -= iu;
    rel(2 * row + 1, 4 * k + 0) -= iu;
  }
  return rel;
}

}  // namespace

TEST_CASE("commutator form of the relations at the symmetric modulus") {
  // At u = (1,1,1,1) the relations collapse to [y_k,y_0] + [y_l,y_m] = 0 and
  // the partner family.
  const AlgebraPresentation a = presentation_y(ModulusPoint::from_u(Vec4c(1, 1, 1, 1)));
  Eigen::Matrix<cplx, 6, 16> expect;
  expect.setZero();
  const std::array<std::array<int, 3>, 3> cyc{{{1, 2, 3}, {2, 3, 1}, {3, 1, 2}}};
  for (int row = 0; row < 3; ++row) {
    const int k = cyc[row][0], l = cyc[row][1], m = cyc[row][2];
    expect(2 * row, 4 * k + 0) = 1;
    expect(2 * row, 4 * 0 + k) = -1;
    expect(2 * row, 4 * l + m) = 1;
    expect(2 * row, 4 * m + l) = -1;
    expect(2 * row + 1, 4 * 0 + k) = 1;
    expect(2 * row + 1, 4 * k + 0) = -1;
    expect(2 * row + 1, 4 * l + m) = 1;
    expect(2 * row + 1, 4 * m + l) = -1;
  }
  CHECK((a.relations - expect).norm() < 1e-14);
}

TEST_CASE("relation space has dimension six and polynomial graded dimensions") {
  const AlgebraPresentation a = presentation_y(ModulusPoint::from_phi(kPhi));
  Eigen::ColPivHouseholderQR<Eigen::MatrixXcd> qr(Eigen::MatrixXcd(a.relations.transpose()));
  qr.setThreshold(1e-10);
  CHECK(qr.rank() == 6);
  CHECK(graded_dimension(a, 0) == 1);
  CHECK(graded_dimension(a, 1) == 4);
  CHECK(graded_dimension(a, 2) == 10);
  CHECK(graded_dimension(a, 3) == 20);
  CHECK(graded_dimension(a, 4) == 35);
}

TEST_CASE("presentations are rejected at base points and non-generic moduli") {
  CHECK_THROWS_AS(presentation_y(ModulusPoint::from_u(Vec4c(1, 0, 0, 0))), error);
  // u_1 = u_2 makes a change-of-generators radicand vanish.
  CHECK_THROWS_AS(change_scalars(Vec4c(1.0, cplx(0.5, 0.2), cplx(0.5, 0.2), cplx(-0.3, 0.8))),
                  error);
}

TEST_CASE("generator substitution carries the x relations onto the y relations") {
  const ModulusPoint m = ModulusPoint::from_phi(kPhi);
  const AlgebraPresentation ay = presentation_y(m);
  const AlgebraPresentation ax = presentation_x(kPhi);
  Vec4c c;
  const Vec4c u = proj_normalize(m.u);
  const std::array<double, 4> f{0.0, kPhi[0], kPhi[1], kPhi[2]};
  for (int mu = 0; mu < 4; ++mu) c[mu] = std::exp(iu * f[mu]) / u[mu];
  CHECK(subspace_distance(rescale_relations(ay.relations, c), Eigen::MatrixXcd(ax.relations)) <
        1e-10);
}

TEST_CASE("the change of generators maps the y span onto the Y span") {
  rng r(51);
  for (int i = 0; i < 6; ++i) {
    Vec4c u = random_vec(r);
    u[0] = 1.0;
    ModulusPoint m = ModulusPoint::from_u(u);
    AlgebraPresentation ay, aY;
    Vec4c c;
    try {
      ay = presentation_y(m);
      aY = presentation_Y(m);
      c = change_scalars(u);
    } catch (const error&) {
      continue;
    }
    CHECK(subspace_distance(rescale_relations(ay.relations, c), Eigen::MatrixXcd(aY.relations)) <
          1e-10);
  }
  // and for the torus modulus with the rescaled torus scalars
  const ModulusPoint mt = ModulusPoint::from_phi(kPhi);
  CHECK(subspace_distance(
            rescale_relations(presentation_y(mt).relations, change_scalars_torus(kPhi)),
            Eigen::MatrixXcd(presentation_Y(mt).relations)) < 1e-10);
}

TEST_CASE("J invariants of the Y presentation satisfy the Sklyanin constraint") {
  rng r(52);
  for (int i = 0; i < 20; ++i) {
    Vec4c u = random_vec(r);
    u[0] = 1.0;
    Vec3c J;
    try {
      J = invariants_J(u);
    } catch (const error&) {
      continue;
    }
    CHECK(std::abs(J[0] + J[1] + J[2] + J[0] * J[1] * J[2]) < 1e-12);
  }
}

TEST_CASE("rescaled selfadjoint generators reproduce the bracket form") {
  const auto J = invariants_J(PhiAngles{{kPhi[0], kPhi[1], kPhi[2]}});
  const AlgebraPresentation ax = presentation_x(kPhi);
  // ratio constants A_k = -sin(phi_k)/cos(phi_l - phi_m)
  std::array<cplx, 3> A;
  for (int k = 0; k < 3; ++k) {
    const int l = (k + 1) % 3, m = (k + 2) % 3;
    A[k] = -std::sin(kPhi[k]) / std::cos(kPhi[l] - kPhi[m]);
  }
  const Vec4c s_base(1.0, 1.0 / std::sqrt(A[1] * A[2]), 1.0 / std::sqrt(A[2] * A[0]),
                     1.0 / std::sqrt(A[0] * A[1]));
  const Eigen::MatrixXcd target = sklyanin_span({J[0], J[1], J[2]});
  // Branch signs are fixed by the span comparison; one of the eight classes
  // must land on the printed bracket relations.
  double best = 1e300;
  for (int mask = 0; mask < 8; ++mask) {
    Vec4c s = s_base;
    for (int k = 0; k < 3; ++k)
      if (mask & (1 << k)) s[k + 1] = -s[k + 1];
    // S_mu = s^mu x^mu, so the x-relations transform by the inverse scalars.
    Vec4c cinv;
    for (int mu = 0; mu < 4; ++mu) cinv[mu] = 1.0 / s[mu];
    best = std::min(best, subspace_distance(rescale_relations(ax.relations, cinv), target));
  }
  CHECK(best < 1e-10);
}

TEST_CASE("involution compatibility of the selfadjoint presentation") {
  const AlgebraPresentation ax = presentation_x(kPhi);
  const Eigen::MatrixXcd R = ax.relations;
  Eigen::MatrixXcd Rt(6, 16);
  for (int row = 0; row < 6; ++row)
    for (int mu = 0; mu < 4; ++mu)
      for (int nu = 0; nu < 4; ++nu) Rt(row, 4 * mu + nu) = R(row, 4 * nu + mu);
  CHECK(subspace_distance(Eigen::MatrixXcd(R.conjugate()), Rt) < 1e-10);
}

TEST_CASE("normal form is an idempotent projection killing the ideal") {
  const AlgebraPresentation a = presentation_y(ModulusPoint::from_phi(kPhi));
  const NormalForm nf(a, true);
  rng r(53);
  // relation elements reduce to zero
  for (int row = 0; row < 6; ++row) {
    FreeElement e;
    e.comp[2] = a.relations.row(row).transpose();
    CHECK(nf.reduce(e).norm() < 1e-12);
    // also inside products: x * r * y
    FreeElement xr = mul(FreeElement::generator(row % 4), e);
    CHECK(nf.reduce(xr).norm() < 1e-12);
  }
  // sphere relation: s - 1 reduces to zero
  {
    FreeElement e;
    e.comp[2] = a.sphere->transpose();
    e.comp[0][0] = -1.0;
    CHECK(nf.reduce(e).norm() < 1e-12);
  }
  // idempotency and linearity on random filtered elements
  for (int i = 0; i < 5; ++i) {
    FreeElement v;
    for (int d = 0; d <= 4; ++d)
      for (int j = 0; j < v.comp[d].size(); ++j) v.comp[d][j] = r.complex_box(-1, 1);
    const FreeElement once = nf.reduce(v);
    const FreeElement twice = nf.reduce(once);
    double diff = 0;
    for (int d = 0; d <= 4; ++d) diff += (once.comp[d] - twice.comp[d]).squaredNorm();
    CHECK(std::sqrt(diff) < 1e-11 * (1.0 + once.norm()));
  }
  // reduction is consistent with the graded dimension counts
  CHECK(nf.reduced_dim(4) == 55);     // 1 + 4 + 9 + 16 + 25 with the sphere identified
  const NormalForm nfh(a, false);
  CHECK(nfh.reduced_dim(4) == 70);    // 1 + 4 + 10 + 20 + 35 in the graded algebra
}

TEST_CASE("multiplication respects the degree cap") {
  FreeElement quad;
  quad.comp[2] = Eigen::VectorXcd::Ones(16);
  FreeElement cubic;
  cubic.comp[3] = Eigen::VectorXcd::Ones(64);
  CHECK_THROWS_AS(mul(quad, cubic), error);
}

TEST_CASE("the central quadratic forms pass the in-algebra test") {
  const ModulusPoint m = ModulusPoint::from_phi(kPhi);
  const AlgebraPresentation aY = presentation_Y(m);
  for (const QuadraticForm& Q : central_forms(m)) {
    const CentralityReport rep = is_central_in_algebra(aY, Q);
    CHECK(rep.central);
    CHECK(rep.max_residual < 1e-10);
  }
  // r^2 is central in the selfadjoint presentation
  QuadraticForm r2;
  r2.S = Mat4c::Identity();
  CHECK(is_central_in_algebra(presentation_x(kPhi), r2).central);
  // a random symmetric form is not
  QuadraticForm q;
  q.S = Mat4c::Zero();
  q.S(0, 1) = q.S(1, 0) = 0.7;
  q.S(2, 2) = 1.3;
  q.S(0, 3) = q.S(3, 0) = -0.4;
  const CentralityReport rep = is_central_in_algebra(presentation_Y(m), q);
  CHECK_FALSE(rep.central);
  CHECK(rep.max_residual > 1e-4);
}

TEST_CASE("the three central forms span a two-dimensional space") {
  const auto Qs = central_forms(ModulusPoint::from_phi(kPhi));
  Eigen::MatrixXcd span(3, 16);
  for (int i = 0; i < 3; ++i) span.row(i) = Qs[i].tensor().transpose();
  Eigen::ColPivHouseholderQR<Eigen::MatrixXcd> qr(span.transpose());
  qr.setThreshold(1e-10);
  CHECK(qr.rank() == 2);
}

TEST_CASE("component centrality holds on the fiber square and fails off it") {
  const ModulusPoint m = ModulusPoint::from_phi(kPhi);
  FiberCurve f(m);
  const AlgebraPresentation aY = presentation_Y(m);
  const auto Qs = central_forms(m);
  rng r(54);
  std::vector<EEPair> ff, fe;
  for (int i = 0; i < 10; ++i) {
    const cplx z1 = r.uniform(0, 1) + r.uniform(0, 1) * f.lattice().omega;
    const cplx z2 = r.uniform(0, 1) + r.uniform(0, 1) * f.lattice().omega;
    ff.push_back({f.psi(z1).Z, f.psi(z2).Z});
    fe.push_back({f.psi(z1).Z, unit_Z(i % 4)});
  }
  for (const QuadraticForm& Q : Qs) {
    CHECK(central_on_component(aY, f.resolvent(), Q, ff) < 1e-9);
    CHECK(central_on_component(aY, f.resolvent(), Q, fe) > 1e-3);
  }
  // the zero form is trivially central everywhere
  QuadraticForm zero;
  zero.S = Mat4c::Zero();
  CHECK(central_on_component(aY, f.resolvent(), zero, ff) == 0.0);
  CHECK(central_on_component(aY, f.resolvent(), zero, fe) == 0.0);
  // off-variety samples are rejected
  CHECK_THROWS_AS(central_on_component(aY, f.resolvent(), Qs[0], {{Vec4c(1, 2, 3, 4), unit_Z(0)}}),
                  error);
}

TEST_CASE("the half Chern character vanishes on the nose") {
  const auto T = chern_tensor(ModulusPoint::from_phi(kPhi), 1, GeneratorBasis::z);
  CHECK(T.norm() == 0.0);
  const auto Tx = chern_tensor(ModulusPoint::from_phi(kPhi), 1, GeneratorBasis::x);
  CHECK(Tx.norm() == 0.0);
}

TEST_CASE("the volume Chern character matches the closed torus form") {
  for (const auto& phi : {kPhi, std::array<double, 3>{0.25, 0.85, 1.3}}) {
    const ModulusPoint m = ModulusPoint::from_phi(phi);
    const auto T = chern_tensor(m, 3, GeneratorBasis::x);
    const auto ref = chern_reference_x(phi);
    CHECK((T - ref).norm() < 1e-12 * ref.norm());
  }
}

TEST_CASE("the volume Chern character matches the fiber form in Y generators") {
  const ModulusPoint m = ModulusPoint::from_phi(kPhi);
  const auto T = chern_tensor(m, 3, GeneratorBasis::Y);
  const auto ref = chern_reference_Y(kPhi);
  CHECK((T - ref).norm() < 1e-9 * (1.0 + ref.norm()));
}

TEST_CASE("the Y-form table depends only on the fiber, projectively") {
  const ModulusPoint m = ModulusPoint::from_u(ModulusPoint::from_phi(kPhi).u);
  FiberCurve f(m);
  const auto T1 = chern_tensor(m, 3, GeneratorBasis::Y);
  // another modulus on the same fiber
  const Vec4c v = f.psi(cplx(0.27, 0.08)).u();
  const auto T2 = chern_tensor(ModulusPoint::from_u(v), 3, GeneratorBasis::Y);
  CHECK(proj_distance(T1, T2) < 1e-9);
}

TEST_CASE("the volume character is a Hochschild cycle") {
  const ModulusPoint m = ModulusPoint::from_phi(kPhi);
  const NormalForm nf(presentation_x(kPhi), true);
  const auto T = chern_tensor(m, 3, GeneratorBasis::x);
  const Chain bch = hochschild_b(nf, chain_from_tensor(T, 4));
  CHECK(chain_dense(nf, bch, 2).norm() < 1e-9 * T.norm());
}

TEST_CASE("Hochschild boundary basics") {
  const NormalForm nf(presentation_x(kPhi), true);
  rng r(55);
  // b(a (x) b) = ab - ba
  const FreeElement a = FreeElement::linear(random_vec(r));
  const FreeElement b = FreeElement::linear(random_vec(r));
  Chain c2;
  c2.arity = 2;
  c2.terms.push_back({1.0, {a, b}});
  FreeElement expect = nf.reduce_product(a, b);
  const FreeElement ba = nf.reduce_product(b, a);
  for (int d = 0; d <= 4; ++d) expect.comp[d] -= ba.comp[d];
  CHECK((chain_dense(nf, hochschild_b(nf, c2), 2) - nf.coords(expect, 2)).norm() < 1e-12);

  // b o b = 0 on random chains with linear slots
  Chain c3;
  c3.arity = 3;
  for (int t = 0; t < 5; ++t)
    c3.terms.push_back({r.complex_box(-1, 1),
                        {FreeElement::linear(random_vec(r)), FreeElement::linear(random_vec(r)),
                         FreeElement::linear(random_vec(r))}});
  CHECK(chain_dense(nf, hochschild_b(nf, hochschild_b(nf, c3)), 3).norm() < 1e-12);

  // degree overflow in a slot product is reported
  Chain deep;
  deep.arity = 2;
  FreeElement cubic;
  cubic.comp[3] = Eigen::VectorXcd::Ones(64);
  deep.terms.push_back({1.0, {cubic, cubic}});
  CHECK_THROWS_AS(hochschild_b(nf, deep), error);
}
