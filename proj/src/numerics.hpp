#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>

namespace ncs3 {

using cplx = std::complex<double>;
using Vec3c = Eigen::Vector3cd;
using Vec4c = Eigen::Vector4cd;
using Vec3d = Eigen::Vector3d;
using Mat4c = Eigen::Matrix4cd;
using Mat4d = Eigen::Matrix4d;

inline constexpr double pi = 3.14159265358979323846;
inline constexpr cplx iu{0.0, 1.0};

// Default projective comparison tolerance used across all modules.
inline constexpr double proj_tol = 1e-9;

enum class errc {
  invalid_input,  // caller-supplied data outside the operation's domain
  degenerate,     // the configuration is singular (base point, repeated roots, ...)
  numerical,      // an iteration or quadrature failed to converge
  unsupported,    // outside the implemented range (degree caps, odd case, ...)
};

class error : public std::runtime_error {
public:
  error(errc c, const std::string& msg) : std::runtime_error(msg), code_(c) {}
  errc code() const { return code_; }

private:
  errc code_;
};

[[noreturn]] inline void fail(errc c, const std::string& msg) { throw error(c, msg); }

// Scales a projective vector so its largest-modulus entry becomes 1.
// The pivot is the first entry within a 1e-12 relative tie of the maximum,
// which keeps the gauge stable under tiny perturbations.
template <typename Derived>
auto proj_normalize(const Eigen::MatrixBase<Derived>& v) {
  using Vec = typename Derived::PlainObject;
  Vec out = v;
  double m = 0.0;
  for (int i = 0; i < out.size(); ++i) m = std::max(m, std::abs(out[i]));
  if (m == 0.0) fail(errc::degenerate, "projective vector is zero");
  int pivot = 0;
  for (int i = 0; i < out.size(); ++i) {
    if (std::abs(out[i]) >= m * (1.0 - 1e-12)) {
      pivot = i;
      break;
    }
  }
  out /= out[pivot];
  return out;
}

// Phase-aligned distance between projective points:
// min over phases of |a/|a| - e^{i t} b/|b||.  Computed as an explicit residual
// vector so that distances down to machine precision are measurable.
template <typename D1, typename D2>
double proj_distance(const Eigen::MatrixBase<D1>& a, const Eigen::MatrixBase<D2>& b) {
  using Vec = typename D1::PlainObject;
  double na = a.norm(), nb = b.norm();
  if (na == 0.0 || nb == 0.0) fail(errc::degenerate, "projective vector is zero");
  Vec ah = a / na;
  Vec bh = b / nb;
  const auto ip = (bh.adjoint() * ah)(0, 0);
  const double m = std::abs(ip);
  if (m < 1e-300) return std::sqrt(2.0);
  bh *= ip / m;
  return (ah - bh).norm();
}

template <typename D1, typename D2>
bool proj_equal(const Eigen::MatrixBase<D1>& a, const Eigen::MatrixBase<D2>& b,
                double tol = proj_tol) {
  return proj_distance(a, b) < tol;
}

// Deterministic RNG with an implementation-independent uniform, so that a
// fixed seed produces identical streams everywhere.
class rng {
public:
  explicit rng(std::uint64_t seed) : gen_(seed) {}

  double uniform(double lo, double hi) {
    const double u = static_cast<double>(gen_() >> 11) * 0x1.0p-53;
    return lo + (hi - lo) * u;
  }
  cplx complex_box(double lo, double hi) { return {uniform(lo, hi), uniform(lo, hi)}; }
  std::uint64_t bits() { return gen_(); }

private:
  std::mt19937_64 gen_;
};

inline double wrap_angle(double x, double period) {
  double y = std::fmod(x, period);
  if (y < 0) y += period;
  // Snap values that are a whole period within rounding.
  if (period - y < 1e-15 * period) y = 0.0;
  return y;
}

}  // namespace ncs3
