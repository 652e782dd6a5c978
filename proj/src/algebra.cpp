#include "algebra.hpp"

#include <Eigen/SVD>
#include <algorithm>
#include <cmath>

namespace ncs3 {

namespace {

constexpr std::array<std::array<int, 3>, 3> kCyclic{{{1, 2, 3}, {2, 3, 1}, {3, 1, 2}}};

// Orthonormal basis of the column space via column-pivoted QR; the rank gaps
// in play are many orders of magnitude, so QR thresholds are ample.
Eigen::MatrixXcd column_space_basis(const Eigen::MatrixXcd& A, int* rank_out = nullptr,
                                    double rel_tol = 1e-10) {
  if (A.cols() == 0) {
    if (rank_out) *rank_out = 0;
    return Eigen::MatrixXcd(A.rows(), 0);
  }
  Eigen::ColPivHouseholderQR<Eigen::MatrixXcd> qr(A);
  qr.setThreshold(rel_tol);
  const int r = static_cast<int>(qr.rank());
  if (rank_out) *rank_out = r;
  Eigen::MatrixXcd Q = qr.householderQ() * Eigen::MatrixXcd::Identity(A.rows(), r);
  return Q;
}

// Orthonormal basis of the orthogonal complement of the column space.
Eigen::MatrixXcd complement_basis(const Eigen::MatrixXcd& A, double rel_tol = 1e-10) {
  const int n = static_cast<int>(A.rows());
  if (A.cols() == 0) return Eigen::MatrixXcd::Identity(n, n);
  Eigen::ColPivHouseholderQR<Eigen::MatrixXcd> qr(A);
  qr.setThreshold(rel_tol);
  const int r = static_cast<int>(qr.rank());
  Eigen::MatrixXcd full = qr.householderQ() * Eigen::MatrixXcd::Identity(n, n);
  return full.rightCols(n - r);
}

Eigen::MatrixXcd pseudo_inverse(const Eigen::MatrixXcd& A, double rel_tol = 1e-10) {
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& s = svd.singularValues();
  Eigen::VectorXd inv = Eigen::VectorXd::Zero(s.size());
  for (int i = 0; i < s.size(); ++i)
    if (s[i] > rel_tol * s[0]) inv[i] = 1.0 / s[i];
  return svd.matrixV() * inv.asDiagonal() * svd.matrixU().adjoint();
}

// Quadratic relation embedded at a fixed word position: pre (x) w (x) post.
Eigen::VectorXcd pad_relation(const Eigen::Matrix<cplx, 1, 16>& w, int pre, int dpre, int post,
                              int dpost) {
  const int npost = word_dim(dpost);
  Eigen::VectorXcd out = Eigen::VectorXcd::Zero(word_dim(dpre + 2 + dpost));
  for (int wi = 0; wi < 16; ++wi)
    if (w[wi] != cplx(0)) out[(pre * 16 + wi) * npost + post] += w[wi];
  return out;
}

}  // namespace

FreeElement mul(const FreeElement& a, const FreeElement& b) {
  const int da = a.max_degree(), db = b.max_degree();
  if (da + db > 4)
    fail(errc::unsupported, "mul: product degree exceeds the filtered cap of 4");
  FreeElement out;
  for (int i = 0; i <= da; ++i) {
    if (a.comp[i].norm() == 0) continue;
    for (int j = 0; j <= db; ++j) {
      if (b.comp[j].norm() == 0) continue;
      const int nj = word_dim(j);
      for (int ia = 0; ia < a.comp[i].size(); ++ia) {
        const cplx ca = a.comp[i][ia];
        if (ca == cplx(0)) continue;
        for (int ib = 0; ib < nj; ++ib)
          out.comp[i + j][ia * nj + ib] += ca * b.comp[j][ib];
      }
    }
  }
  return out;
}

AlgebraPresentation presentation_y(const ModulusPoint& m) {
  resolvent_map(m);  // rejects the eight base points
  const Vec4c u = proj_normalize(m.u);
  AlgebraPresentation a;
  a.generators = {"y0", "y1", "y2", "y3"};
  a.relations.setZero();
  for (int row = 0; row < 3; ++row) {
    const int k = kCyclic[row][0], l = kCyclic[row][1], mm = kCyclic[row][2];
    auto& r1 = a.relations;
    r1(2 * row, 4 * k + 0) += u[k];
    r1(2 * row, 4 * 0 + k) -= u[0];
    r1(2 * row, 4 * l + mm) += u[l];
    r1(2 * row, 4 * mm + l) -= u[mm];
    r1(2 * row + 1, 4 * 0 + k) += u[k];
    r1(2 * row + 1, 4 * k + 0) -= u[0];
    r1(2 * row + 1, 4 * l + mm) += u[mm];
    r1(2 * row + 1, 4 * mm + l) -= u[l];
  }
  Eigen::Matrix<cplx, 1, 16> s;
  s.setZero();
  for (int mu = 0; mu < 4; ++mu) s[4 * mu + mu] = u[mu];
  a.sphere = s;
  bool torus = true;
  for (int mu = 0; mu < 4; ++mu)
    if (std::fabs(std::abs(u[mu]) - std::abs(u[0])) > 1e-12) torus = false;
  if (torus) a.involution = Mat4c(u.asDiagonal());
  return a;
}

AlgebraPresentation presentation_x(const std::array<double, 3>& phi) {
  AlgebraPresentation a;
  a.generators = {"x0", "x1", "x2", "x3"};
  a.relations.setZero();
  const std::array<double, 4> f{0.0, phi[0], phi[1], phi[2]};
  for (int row = 0; row < 3; ++row) {
    const int k = kCyclic[row][0], l = kCyclic[row][1], mm = kCyclic[row][2];
    auto& r = a.relations;
    r(2 * row, 4 * 0 + k) += std::cos(f[k]);
    r(2 * row, 4 * k + 0) -= std::cos(f[k]);
    r(2 * row, 4 * l + mm) -= iu * std::sin(f[l] - f[mm]);
    r(2 * row, 4 * mm + l) -= iu * std::sin(f[l] - f[mm]);
    r(2 * row + 1, 4 * l + mm) += std::cos(f[l] - f[mm]);
    r(2 * row + 1, 4 * mm + l) -= std::cos(f[l] - f[mm]);
    r(2 * row + 1, 4 * 0 + k) += iu * std::sin(f[k]);
    r(2 * row + 1, 4 * k + 0) += iu * std::sin(f[k]);
  }
  Eigen::Matrix<cplx, 1, 16> s;
  s.setZero();
  for (int mu = 0; mu < 4; ++mu) s[4 * mu + mu] = 1.0;
  a.sphere = s;
  a.involution = Mat4c(Mat4c::Identity());  // selfadjoint generators
  return a;
}

Vec4c change_scalars(const Vec4c& uin) {
  const Vec4c u = proj_normalize(uin);
  const double scale = u.cwiseAbs().maxCoeff();
  const std::array<cplx, 3> diff{u[1] - u[2], u[2] - u[3], u[3] - u[1]};
  const std::array<cplx, 3> sum{u[0] + u[1], u[0] + u[2], u[0] + u[3]};
  for (const cplx& d : diff)
    if (std::abs(d) < 1e-8 * scale)
      fail(errc::degenerate, "change_scalars: vanishing difference radicand, non-generic modulus");
  for (const cplx& d : sum)
    if (std::abs(d) < 1e-8 * scale)
      fail(errc::degenerate, "change_scalars: vanishing sum radicand, non-generic modulus");
  auto rt = [](cplx v) { return std::sqrt(v); };
  Vec4c c;
  c[0] = rt(u[1] - u[2]) * rt(u[2] - u[3]) * rt(u[3] - u[1]);
  c[1] = rt(u[0] + u[2]) * rt(u[2] - u[3]) * rt(u[0] + u[3]);
  c[2] = rt(u[0] + u[3]) * rt(u[3] - u[1]) * rt(u[0] + u[1]);
  c[3] = rt(u[0] + u[1]) * rt(u[1] - u[2]) * rt(u[0] + u[2]);
  return c;
}

Vec4c change_scalars_torus(const std::array<double, 3>& phi) {
  const ModulusPoint m = ModulusPoint::from_phi(phi);
  const cplx g =
      std::exp(iu * (pi / 4.0 - phi[0] - phi[1] - phi[2])) / (2.0 * std::sqrt(2.0));
  return Vec4c(g * change_scalars(m.u));
}

Eigen::Matrix<cplx, 6, 16> rescale_relations(const Eigen::Matrix<cplx, 6, 16>& rel,
                                             const Vec4c& c) {
  Eigen::Matrix<cplx, 6, 16> out;
  for (int row = 0; row < 6; ++row)
    for (int mu = 0; mu < 4; ++mu)
      for (int nu = 0; nu < 4; ++nu) out(row, 4 * mu + nu) = rel(row, 4 * mu + nu) * c[mu] * c[nu];
  return out;
}

AlgebraPresentation presentation_Y(const ModulusPoint& m) {
  const Vec3c J = invariants_J(m.u);
  AlgebraPresentation a;
  a.generators = {"Y0", "Y1", "Y2", "Y3"};
  a.relations.setZero();
  // J entries indexed as (J_12, J_23, J_31); row k uses J_{l m}.
  const std::array<cplx, 3> Jlm{J[1], J[2], J[0]};  // k=1 -> J_23, k=2 -> J_31, k=3 -> J_12
  for (int row = 0; row < 3; ++row) {
    const int k = kCyclic[row][0], l = kCyclic[row][1], mm = kCyclic[row][2];
    auto& r = a.relations;
    r(2 * row, 4 * 0 + k) += 1.0;
    r(2 * row, 4 * k + 0) -= 1.0;
    r(2 * row, 4 * l + mm) -= 1.0;
    r(2 * row, 4 * mm + l) -= 1.0;
    r(2 * row + 1, 4 * l + mm) += 1.0;
    r(2 * row + 1, 4 * mm + l) -= 1.0;
    r(2 * row + 1, 4 * 0 + k) += Jlm[row];
    r(2 * row + 1, 4 * k + 0) += Jlm[row];
  }
  const Vec4c c = m.phi ? change_scalars_torus(*m.phi) : change_scalars(m.u);
  const Vec4c u = proj_normalize(m.u);
  Eigen::Matrix<cplx, 1, 16> s;
  s.setZero();
  for (int mu = 0; mu < 4; ++mu) s[4 * mu + mu] = u[mu] * c[mu] * c[mu];
  a.sphere = s;
  return a;
}

double subspace_distance(const Eigen::MatrixXcd& A, const Eigen::MatrixXcd& B) {
  int ra = 0, rb = 0;
  const Eigen::MatrixXcd Qa = column_space_basis(A.transpose(), &ra);
  const Eigen::MatrixXcd Qb = column_space_basis(B.transpose(), &rb);
  if (ra != rb) return 1.0;
  const Eigen::MatrixXcd Ea = Qb - Qa * (Qa.adjoint() * Qb);
  const Eigen::MatrixXcd Eb = Qa - Qb * (Qb.adjoint() * Qa);
  return std::max(Ea.jacobiSvd().singularValues()[0], Eb.jacobiSvd().singularValues()[0]);
}

NormalForm::NormalForm(const AlgebraPresentation& a, bool use_sphere) : sphere_(use_sphere) {
  if (use_sphere && !a.sphere)
    fail(errc::invalid_input, "NormalForm: presentation carries no sphere relation");

  rank_[0] = rank_[1] = 0;
  ideal_basis_[0] = Eigen::MatrixXcd(1, 0);
  ideal_basis_[1] = Eigen::MatrixXcd(4, 0);
  for (int d = 2; d <= 4; ++d) {
    std::vector<Eigen::VectorXcd> cols;
    for (int dpre = 0; dpre + 2 <= d; ++dpre) {
      const int dpost = d - 2 - dpre;
      for (int pre = 0; pre < word_dim(dpre); ++pre)
        for (int post = 0; post < word_dim(dpost); ++post)
          for (int row = 0; row < 6; ++row)
            cols.push_back(pad_relation(a.relations.row(row), pre, dpre, post, dpost));
    }
    Eigen::MatrixXcd span(word_dim(d), cols.size());
    for (size_t i = 0; i < cols.size(); ++i) span.col(i) = cols[i];
    ideal_basis_[d] = column_space_basis(span, &rank_[d]);
  }

  if (sphere_) {
    const Eigen::Matrix<cplx, 1, 16> s = *a.sphere;
    for (int d = 2; d <= 4; ++d) {
      std::vector<Eigen::VectorXcd> lifts;
      std::vector<Eigen::VectorXcd> downs;
      for (int dpre = 0; dpre + 2 <= d; ++dpre) {
        const int dpost = d - 2 - dpre;
        const int npre = word_dim(dpre), npost = word_dim(dpost);
        for (int pre = 0; pre < npre; ++pre)
          for (int post = 0; post < npost; ++post) {
            Eigen::VectorXcd lift = Eigen::VectorXcd::Zero(word_dim(d));
            for (int wi = 0; wi < 16; ++wi)
              if (s[wi] != cplx(0)) lift[(pre * 16 + wi) * npost + post] += s[wi];
            lifts.push_back(project_ideal(d, lift));
            Eigen::VectorXcd down = Eigen::VectorXcd::Zero(word_dim(d - 2));
            down[pre * npost + post] = 1.0;
            downs.push_back(down);
          }
      }
      SphereBlock blk;
      blk.lift.resize(word_dim(d), lifts.size());
      blk.down.resize(word_dim(d - 2), downs.size());
      for (size_t i = 0; i < lifts.size(); ++i) {
        blk.lift.col(i) = lifts[i];
        blk.down.col(i) = downs[i];
      }
      blk.pinv = pseudo_inverse(blk.lift);
      blk.basis = column_space_basis(blk.lift);
      sphere_block_[d] = std::move(blk);
    }
  }

  for (int d = 0; d <= 4; ++d) {
    const int n = word_dim(d);
    Eigen::MatrixXcd killed(n, 0);
    if (d >= 2) {
      const int extra = sphere_ ? sphere_block_[d]->basis.cols() : 0;
      killed.resize(n, ideal_basis_[d].cols() + extra);
      killed.leftCols(ideal_basis_[d].cols()) = ideal_basis_[d];
      if (extra) killed.rightCols(extra) = sphere_block_[d]->basis;
    }
    comp_basis_[d] = complement_basis(killed);
  }
}

Eigen::VectorXcd NormalForm::project_ideal(int d, const Eigen::VectorXcd& v) const {
  if (d < 2 || ideal_basis_[d].cols() == 0) return v;
  return v - ideal_basis_[d] * (ideal_basis_[d].adjoint() * v);
}

FreeElement NormalForm::reduce(const FreeElement& v) const {
  FreeElement w = v;
  for (int d = 4; d >= 2; --d) {
    w.comp[d] = project_ideal(d, w.comp[d]);
    if (sphere_ && w.comp[d].norm() > 0) {
      const auto& blk = *sphere_block_[d];
      const Eigen::VectorXcd c = blk.pinv * w.comp[d];
      if (c.norm() > 0) {
        w.comp[d] -= blk.lift * c;
        w.comp[d - 2] += blk.down * c;
      }
    }
  }
  return w;
}

FreeElement NormalForm::reduce_product(const FreeElement& a, const FreeElement& b) const {
  return reduce(mul(a, b));
}

int NormalForm::reduced_dim(int max_degree) const {
  int n = 0;
  for (int d = 0; d <= max_degree; ++d) n += static_cast<int>(comp_basis_[d].cols());
  return n;
}

Eigen::VectorXcd NormalForm::coords(const FreeElement& v, int max_degree) const {
  const FreeElement w = reduce(v);
  for (int d = max_degree + 1; d <= 4; ++d)
    if (w.comp[d].norm() > 1e-12 * (1.0 + w.norm()))
      fail(errc::unsupported, "coords: element exceeds the requested slot degree");
  Eigen::VectorXcd out(reduced_dim(max_degree));
  int at = 0;
  for (int d = 0; d <= max_degree; ++d) {
    const int nd = static_cast<int>(comp_basis_[d].cols());
    out.segment(at, nd) = comp_basis_[d].adjoint() * w.comp[d];
    at += nd;
  }
  return out;
}

int graded_dimension(const AlgebraPresentation& a, int d) {
  if (d < 0 || d > 4) fail(errc::unsupported, "graded_dimension: degree must be 0..4");
  if (d <= 1) return d == 0 ? 1 : 4;
  const NormalForm nf(a, false);
  return word_dim(d) - nf.homogeneous_rank(d);
}

Eigen::VectorXcd QuadraticForm::tensor() const {
  Eigen::VectorXcd t = Eigen::VectorXcd::Zero(16);
  for (int mu = 0; mu < 4; ++mu)
    for (int nu = 0; nu < 4; ++nu) t[4 * mu + nu] = 0.5 * (S(mu, nu) + S(nu, mu));
  return t;
}

std::array<QuadraticForm, 3> central_forms(const ModulusPoint& m) {
  const Vec3c J = invariants_J(m.u);  // (J_12, J_23, J_31)
  std::array<QuadraticForm, 3> out;
  for (int idx = 0; idx < 3; ++idx) {
    const int mm = idx + 1;                    // Q_m for m = 1,2,3
    const int k = kCyclic[(mm + 0) % 3][0];    // cyclic (k,l,m) ending at m
    const int l = kCyclic[(mm + 0) % 3][1];
    const cplx Jkl = (mm == 1) ? J[1] : (mm == 2 ? J[2] : J[0]);
    Mat4c S = Mat4c::Zero();
    S(0, 0) = Jkl;
    S(mm, mm) = Jkl;
    S(k, k) = 1.0;
    S(l, l) = -1.0;
    out[idx].S = S;
  }
  return out;
}

CentralityReport is_central_in_algebra(const AlgebraPresentation& a, const QuadraticForm& Q,
                                       double tol) {
  const NormalForm nf(a, false);
  const Eigen::VectorXcd q = Q.tensor();
  double worst = 0.0;
  for (int mu = 0; mu < 4; ++mu) {
    FreeElement qa, aq;
    qa.comp[3].setZero();
    Eigen::VectorXcd c = Eigen::VectorXcd::Zero(64);
    for (int w = 0; w < 16; ++w) {
      if (q[w] == cplx(0)) continue;
      c[w * 4 + mu] += q[w];   // q (x) e_mu
      c[mu * 16 + w] -= q[w];  // e_mu (x) q
    }
    const double cn = c.norm();
    if (cn == 0.0) continue;
    FreeElement e;
    e.comp[3] = c;
    const FreeElement red = nf.reduce(e);
    worst = std::max(worst, red.comp[3].norm() / cn);
  }
  return {worst < tol, worst};
}

double central_on_component(const AlgebraPresentation& a, const ResolventTriple& r,
                            const QuadraticForm& Q, const std::vector<EEPair>& samples) {
  Mat4c Qn = Q.S;
  Qn /= Qn.norm();
  double worst = 0.0;
  for (const auto& s : samples) {
    if (rank_ratio(characteristic_matrix(r, s.Z)) > rank_ratio_threshold ||
        rank_ratio(characteristic_matrix(r, s.Zp)) > rank_ratio_threshold)
      fail(errc::invalid_input,
           "central_on_component: sample is off the characteristic variety");
    const Vec4c Z = s.Z / s.Z.norm();
    const Vec4c Zp = s.Zp / s.Zp.norm();
    Vec4c sZp = sigma_map(s.Zp);
    sZp /= sZp.norm();
    Vec4c siZ = sigma_inverse(s.Z);
    siZ /= siZ.norm();
    for (int row = 0; row < 6; ++row) {
      Mat4c W;
      for (int mu = 0; mu < 4; ++mu)
        for (int nu = 0; nu < 4; ++nu) W(mu, nu) = a.relations(row, 4 * mu + nu);
      W /= W.norm();
      const cplx val = (Z.transpose() * W * Zp).value() * (sZp.transpose() * Qn * siZ).value() +
                       (Z.transpose() * Qn * Zp).value() * (sZp.transpose() * W * siZ).value();
      worst = std::max(worst, std::abs(val));
    }
  }
  return worst;
}

namespace {

std::array<Eigen::Matrix2cd, 4> pauli_B() {
  std::array<Eigen::Matrix2cd, 4> B;
  B[0] = Eigen::Matrix2cd::Identity();
  B[1] << 0, iu, iu, 0;
  B[2] << 0, 1, -1, 0;   // i * sigma_2
  B[3] << iu, 0, 0, -iu;
  return B;
}

std::array<Eigen::Matrix2cd, 4> pauli_C() {
  auto B = pauli_B();
  std::array<Eigen::Matrix2cd, 4> C;
  C[0] = B[0];
  for (int k = 1; k < 4; ++k) C[k] = -B[k];
  return C;
}

int perm_sign(const std::array<int, 4>& p) {
  int sign = 1;
  for (int i = 0; i < 4; ++i)
    for (int j = i + 1; j < 4; ++j)
      if (p[i] > p[j]) sign = -sign;
  return sign;
}

void for_all_permutations(const std::function<void(const std::array<int, 4>&, int)>& fn) {
  std::array<int, 4> p{0, 1, 2, 3};
  do {
    fn(p, perm_sign(p));
  } while (std::next_permutation(p.begin(), p.end()));
}

}  // namespace

Eigen::VectorXcd chern_tensor(const ModulusPoint& m, int half_degree, GeneratorBasis basis) {
  if (half_degree != 1 && half_degree != 3)
    fail(errc::unsupported, "chern_tensor: half degree must be 1 or 3");
  Vec4c u = m.u;
  if (std::abs(u[0]) < 1e-12 * u.cwiseAbs().maxCoeff())
    fail(errc::degenerate, "chern_tensor: u0 vanishes, no affine normalization");
  u /= u[0];

  const auto B = pauli_B();
  const auto C = pauli_C();
  std::array<Eigen::Matrix2cd, 4> D;
  for (int nu = 0; nu < 4; ++nu) D[nu] = C[nu] / u[nu];

  // Slot scale factors from the z basis to the requested one.
  Vec4c scale(1.0, 1.0, 1.0, 1.0);
  switch (basis) {
    case GeneratorBasis::z:
      break;
    case GeneratorBasis::y:
      for (int mu = 0; mu < 4; ++mu) scale[mu] = u[mu];
      break;
    case GeneratorBasis::x: {
      if (!m.phi) fail(errc::invalid_input, "chern_tensor: x basis needs torus angles");
      const auto& f = *m.phi;
      for (int k = 0; k < 3; ++k) scale[k + 1] = std::exp(iu * f[k]);
      break;
    }
    case GeneratorBasis::Y: {
      const Vec4c c = m.phi ? change_scalars_torus(*m.phi) : change_scalars(m.u);
      for (int mu = 0; mu < 4; ++mu) scale[mu] = u[mu] * c[mu];
      break;
    }
  }

  // The raw index contraction carries a factor -4 against the closed-form
  // displays; normalize once here so all three routes agree on the nose.
  const cplx norm3 = -0.25;

  if (half_degree == 1) {
    Eigen::VectorXcd T = Eigen::VectorXcd::Zero(16);
    for (int mu = 0; mu < 4; ++mu)
      for (int nu = 0; nu < 4; ++nu)
        T[4 * mu + nu] = ((B[mu] * D[nu]).trace() - (D[mu] * B[nu]).trace()) * scale[mu] * scale[nu];
    return T;
  }

  Eigen::VectorXcd T = Eigen::VectorXcd::Zero(256);
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b)
      for (int c = 0; c < 4; ++c)
        for (int d = 0; d < 4; ++d) {
          const cplx t1 = (B[a] * D[b] * B[c] * D[d]).trace();
          const cplx t2 = (D[a] * B[b] * D[c] * B[d]).trace();
          T[((a * 4 + b) * 4 + c) * 4 + d] =
              norm3 * (t1 - t2) * scale[a] * scale[b] * scale[c] * scale[d];
        }
  return T;
}

Eigen::VectorXcd chern_reference_x(const std::array<double, 3>& phi) {
  const std::array<double, 4> f{0.0, phi[0], phi[1], phi[2]};
  Eigen::VectorXcd T = Eigen::VectorXcd::Zero(256);
  for_all_permutations([&](const std::array<int, 4>& p, int sign) {
    const double arg = f[p[0]] - f[p[1]] + f[p[2]] - f[p[3]];
    T[((p[0] * 4 + p[1]) * 4 + p[2]) * 4 + p[3]] -= sign * std::cos(arg);
  });
  for (int mu = 0; mu < 4; ++mu)
    for (int nu = 0; nu < 4; ++nu) {
      if (mu == nu) continue;
      T[((mu * 4 + nu) * 4 + mu) * 4 + nu] += iu * std::sin(2.0 * (f[mu] - f[nu]));
    }
  return T;
}

Eigen::VectorXcd chern_reference_Y(const std::array<double, 3>& phi) {
  const std::array<double, 4> f{0.0, phi[0], phi[1], phi[2]};
  const std::array<double, 4> n{0.0, 1.0, 1.0, 1.0};
  std::array<double, 4> s{0.0, 0.0, 0.0, 0.0};
  for (int k = 1; k <= 3; ++k) {
    const int l = (k % 3) + 1, mm = ((k + 1) % 3) + 1;
    s[k] = 1.0 + std::tan(f[l]) * std::tan(f[mm]);
  }
  cplx lambda = -iu;
  for (int k = 1; k <= 3; ++k) {
    const int l = (k % 3) + 1, mm = ((k + 1) % 3) + 1;
    lambda *= std::cos(f[k]) * std::cos(f[k]) * std::sin(f[l] - f[mm]);
  }
  Eigen::VectorXcd T = Eigen::VectorXcd::Zero(256);
  for_all_permutations([&](const std::array<int, 4>& p, int sign) {
    const double delta = sign * (n[p[0]] - n[p[1]] + n[p[2]] - n[p[3]]);
    T[((p[0] * 4 + p[1]) * 4 + p[2]) * 4 + p[3]] +=
        lambda * delta * (s[p[0]] - s[p[1]] + s[p[2]] - s[p[3]]);
    T[((p[2] * 4 + p[3]) * 4 + p[2]) * 4 + p[3]] +=
        lambda * static_cast<double>(sign) * (s[p[0]] - s[p[1]]);
  });
  return T;
}

Chain chain_from_tensor(const Eigen::VectorXcd& tensor, int arity) {
  Chain c;
  c.arity = arity;
  const int expect = 1 << (2 * arity);
  if (tensor.size() != expect) fail(errc::invalid_input, "chain_from_tensor: size mismatch");
  for (int idx = 0; idx < expect; ++idx) {
    if (std::abs(tensor[idx]) < 1e-15) continue;
    Chain::Term t;
    t.coeff = tensor[idx];
    int rest = idx;
    std::vector<int> word(arity);
    for (int s = arity - 1; s >= 0; --s) {
      word[s] = rest & 3;
      rest >>= 2;
    }
    for (int s = 0; s < arity; ++s) t.slots.push_back(FreeElement::generator(word[s]));
    c.terms.push_back(std::move(t));
  }
  return c;
}

Chain hochschild_b(const NormalForm& nf, const Chain& c) {
  if (c.arity < 2) fail(errc::invalid_input, "hochschild_b: need at least two slots");
  Chain out;
  out.arity = c.arity - 1;
  const int n = c.arity - 1;  // chain a_0 (x) ... (x) a_n
  for (const auto& t : c.terms) {
    for (int i = 0; i < n; ++i) {
      Chain::Term nt;
      nt.coeff = t.coeff * ((i % 2) ? -1.0 : 1.0);
      for (int s = 0; s < c.arity; ++s) {
        if (s == i) {
          nt.slots.push_back(nf.reduce_product(t.slots[i], t.slots[i + 1]));
          ++s;
        } else {
          nt.slots.push_back(t.slots[s]);
        }
      }
      out.terms.push_back(std::move(nt));
    }
    Chain::Term last;
    last.coeff = t.coeff * ((n % 2) ? -1.0 : 1.0);
    last.slots.push_back(nf.reduce_product(t.slots[n], t.slots[0]));
    for (int s = 1; s < n; ++s) last.slots.push_back(t.slots[s]);
    out.terms.push_back(std::move(last));
  }
  return out;
}

Eigen::VectorXcd chain_dense(const NormalForm& nf, const Chain& c, int slot_degree) {
  const int rdim = nf.reduced_dim(slot_degree);
  long total = 1;
  for (int s = 0; s < c.arity; ++s) total *= rdim;
  Eigen::VectorXcd out = Eigen::VectorXcd::Zero(total);
  for (const auto& t : c.terms) {
    Eigen::VectorXcd acc = Eigen::VectorXcd::Ones(1) * t.coeff;
    for (const auto& slot : t.slots) {
      const Eigen::VectorXcd sc = nf.coords(slot, slot_degree);
      Eigen::VectorXcd next(acc.size() * sc.size());
      for (int i = 0; i < acc.size(); ++i) next.segment(i * sc.size(), sc.size()) = acc[i] * sc;
      acc = std::move(next);
    }
    out += acc;
  }
  return out;
}

}  // namespace ncs3
