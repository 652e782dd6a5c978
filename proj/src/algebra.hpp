#pragma once

#include <optional>
#include <string>
#include <vector>

#include "fiber.hpp"
#include "moduli.hpp"
#include "numerics.hpp"

namespace ncs3 {

// Words over the four generators index tensor components in row-major base-4
// order, first letter most significant.
inline int word_dim(int degree) { return 1 << (2 * degree); }

/// Filtered free-tensor element with homogeneous components of degree 0..4.
struct FreeElement {
  std::array<Eigen::VectorXcd, 5> comp;

  FreeElement() {
    for (int d = 0; d <= 4; ++d) comp[d] = Eigen::VectorXcd::Zero(word_dim(d));
  }
  static FreeElement scalar(cplx c) {
    FreeElement e;
    e.comp[0][0] = c;
    return e;
  }
  static FreeElement generator(int mu, cplx c = 1.0) {
    FreeElement e;
    e.comp[1][mu] = c;
    return e;
  }
  static FreeElement linear(const Vec4c& a) {
    FreeElement e;
    for (int mu = 0; mu < 4; ++mu) e.comp[1][mu] = a[mu];
    return e;
  }
  int max_degree() const {
    for (int d = 4; d >= 0; --d)
      if (comp[d].norm() > 0) return d;
    return 0;
  }
  double norm() const {
    double s = 0;
    for (const auto& c : comp) s += c.squaredNorm();
    return std::sqrt(s);
  }
  FreeElement& operator+=(const FreeElement& o) {
    for (int d = 0; d <= 4; ++d) comp[d] += o.comp[d];
    return *this;
  }
  FreeElement& operator*=(cplx c) {
    for (int d = 0; d <= 4; ++d) comp[d] *= c;
    return *this;
  }
};

// Concatenation product; degree overflow past 4 raises an unsupported error.
FreeElement mul(const FreeElement& a, const FreeElement& b);

/// Quadratic algebra presentation on four generators: a 6-dimensional space of
/// quadratic relations, optional antilinear involution on generators, optional
/// inhomogeneous sphere relation (quadratic part s with the relation s = 1).
struct AlgebraPresentation {
  std::array<std::string, 4> generators;
  Eigen::Matrix<cplx, 6, 16> relations;
  std::optional<Mat4c> involution;  // j(v) = involution * conj(v)
  std::optional<Eigen::Matrix<cplx, 1, 16>> sphere;
};

// Homogeneous relations of the complex moduli presentation.
AlgebraPresentation presentation_y(const ModulusPoint& m);
// Torus presentation on selfadjoint generators.
AlgebraPresentation presentation_x(const std::array<double, 3>& phi);
// Presentation adapted to the characteristic variety, with the fiber
// invariants as structure constants.
AlgebraPresentation presentation_Y(const ModulusPoint& m);

// Diagonal change-of-generators scalars y_mu = c_mu Y_mu, principal branches
// in the printed factor order.  Throws for non-generic moduli.
Vec4c change_scalars(const Vec4c& u);
// Scalars rescaled by the global factor exp(i(pi/4 - phi1 - phi2 - phi3)) / 2^{3/2}
// used by the torus-normalized generators.
Vec4c change_scalars_torus(const std::array<double, 3>& phi);

// Transform a relation row through a diagonal generator substitution
// g_mu = c_mu h_mu.
Eigen::Matrix<cplx, 6, 16> rescale_relations(const Eigen::Matrix<cplx, 6, 16>& rel,
                                             const Vec4c& c);

// Largest principal angle (as a stable sine) between the row spans.
double subspace_distance(const Eigen::MatrixXcd& A, const Eigen::MatrixXcd& B);

/// Degree-by-degree reduction onto a fixed complement of the relation ideal,
/// optionally modulo the inhomogeneous sphere relation.
class NormalForm {
public:
  NormalForm(const AlgebraPresentation& a, bool use_sphere);

  FreeElement reduce(const FreeElement& v) const;
  FreeElement reduce_product(const FreeElement& a, const FreeElement& b) const;
  // Coordinates in the fixed per-degree complement bases, degrees 0..max_degree.
  Eigen::VectorXcd coords(const FreeElement& v, int max_degree = 4) const;
  int reduced_dim(int max_degree = 4) const;
  int homogeneous_rank(int d) const { return rank_[d]; }

private:
  bool sphere_;
  // orthonormal bases of the homogeneous ideal components, degrees 2..4
  std::array<Eigen::MatrixXcd, 5> ideal_basis_;
  std::array<int, 5> rank_{};
  // sphere-multiple data per degree d: columns P_d(x s y), pseudo-inverse, and
  // the down-shift images x y.
  struct SphereBlock {
    Eigen::MatrixXcd lift;      // n_d x k, projected x (x)s(x) y columns
    Eigen::MatrixXcd pinv;      // k x n_d
    Eigen::MatrixXcd down;      // n_{d-2} x k
    Eigen::MatrixXcd basis;     // orthonormal basis of span(lift)
  };
  std::array<std::optional<SphereBlock>, 5> sphere_block_;
  // orthonormal complement bases per degree (reduced coordinates)
  std::array<Eigen::MatrixXcd, 5> comp_basis_;

  Eigen::VectorXcd project_ideal(int d, const Eigen::VectorXcd& v) const;
};

int graded_dimension(const AlgebraPresentation& a, int d);

/// Symmetric bilinear form on the generator space.
struct QuadraticForm {
  Mat4c S;  // symmetric

  cplx eval(const Vec4c& Z, const Vec4c& Zp) const { return Z.transpose() * S * Zp; }
  Eigen::VectorXcd tensor() const;  // flattened element of V (x) V
};

// The three central quadratic combinations attached to the fiber invariants.
std::array<QuadraticForm, 3> central_forms(const ModulusPoint& m);

struct CentralityReport {
  bool central;
  double max_residual;
};
// Membership of [Q, generator] in R(x)V + V(x)R, by least-squares residual.
CentralityReport is_central_in_algebra(const AlgebraPresentation& a, const QuadraticForm& Q,
                                       double tol = 1e-10);

struct EEPair {
  Vec4c Z, Zp;
};
// Max residual of the component-centrality identity over relations and sample
// pairs; samples must lie on the characteristic variety.
double central_on_component(const AlgebraPresentation& a, const ResolventTriple& r,
                            const QuadraticForm& Q, const std::vector<EEPair>& samples);

enum class GeneratorBasis { z, x, y, Y };

// Coefficient tensor of the odd Chern character component in the chosen
// generator system: a 16-vector for half degree 1, a 256-vector (4 slots,
// row-major) for half degree 3.
Eigen::VectorXcd chern_tensor(const ModulusPoint& m, int half_degree, GeneratorBasis basis);

// Reference tensor from the closed-form torus expression (x generators).
Eigen::VectorXcd chern_reference_x(const std::array<double, 3>& phi);
// Reference tensor in Y generators with the printed normalization.
Eigen::VectorXcd chern_reference_Y(const std::array<double, 3>& phi);

/// Hochschild chain: sum of decomposable tensors with filtered slots.
struct Chain {
  struct Term {
    cplx coeff;
    std::vector<FreeElement> slots;
  };
  int arity = 0;
  std::vector<Term> terms;
};

Chain chain_from_tensor(const Eigen::VectorXcd& tensor, int arity);
Chain hochschild_b(const NormalForm& nf, const Chain& c);
// Dense coordinates of a chain in the tensor power of reduced slot spaces,
// each slot truncated at the given filtered degree.
Eigen::VectorXcd chain_dense(const NormalForm& nf, const Chain& c, int slot_degree);

}  // namespace ncs3
