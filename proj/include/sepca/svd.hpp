#ifndef SEPCA_SVD_HPP
#define SEPCA_SVD_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <random>
#include <stdexcept>

#include "sepca/matrix.hpp"
#include "sepca/rng.hpp"

namespace sepca {

/// Leading singular triple. When the input is the zero matrix, `sigma1` is 0,
/// `degenerate` is set and the vectors are the first canonical basis vectors.
struct Rank1SVD {
  Vector u_hat;
  Vector v_hat;
  double sigma1 = 0.0;
  int iterations = 0;
  bool converged = false;
  bool degenerate = false;
};

struct PowerIterationOptions {
  double tolerance = 1e-10;  // relative change of the Rayleigh quotient
  int max_iterations = 1000;
  std::uint64_t restart_seed = 0x5e9ca5eedULL;
};

namespace detail {

// out = M v
inline void multiply(const DataMatrix& m, std::span<const double> v, Vector& out) {
  out.assign(m.rows(), 0.0);
  for (std::size_t i = 0; i < m.rows(); ++i) out[i] = dot(m.row(i), v);
}

// out = M^T u
inline void multiply_transposed(const DataMatrix& m, std::span<const double> u, Vector& out) {
  out.assign(m.cols(), 0.0);
  const std::size_t n = m.cols();
  for (std::size_t i = 0; i < m.rows(); ++i) {
    const double a = u[i];
    if (a == 0.0) continue;
    const double* r = m.row(i).data();
    double* o = out.data();
    for (std::size_t k = 0; k < n; ++k) o[k] += a * r[k];
  }
}

inline void normalize(Vector& x, double norm) {
  const double inv = 1.0 / norm;
  for (double& e : x) e *= inv;
}

}  // namespace detail

/// Rank-1 SVD by alternating power iteration (equivalently, power iteration on
/// M^T M applied through M without forming the Gram matrix). Starts from the
/// all-ones right vector; if that start is annihilated by M it restarts from a
/// fixed-seed random vector. On return M v_hat = sigma1 u_hat up to rounding and
/// the largest-magnitude entry of u_hat is positive.
inline Rank1SVD rank1_svd(const DataMatrix& m, const PowerIterationOptions& opts = {}) {
  if (m.empty()) throw std::invalid_argument("rank1_svd: matrix is empty");
  const std::size_t rows = m.rows(), cols = m.cols();
  Rank1SVD out;

  bool all_zero = std::all_of(m.values().begin(), m.values().end(), [](double x) { return x == 0.0; });
  if (all_zero) {
    out.u_hat.assign(rows, 0.0);
    out.v_hat.assign(cols, 0.0);
    out.u_hat[0] = 1.0;
    out.v_hat[0] = 1.0;
    out.degenerate = true;
    out.converged = true;
    return out;
  }

  Vector v(cols, 1.0 / std::sqrt(static_cast<double>(cols)));
  Vector u, w;
  detail::multiply(m, v, u);
  double s = norm2(u);
  Rng rng = make_rng(opts.restart_seed);
  std::normal_distribution<double> gauss;
  for (int attempt = 0; s == 0.0 && attempt < 16; ++attempt) {
    for (double& x : v) x = gauss(rng);
    detail::normalize(v, norm2(v));
    detail::multiply(m, v, u);
    s = norm2(u);
  }
  if (s == 0.0) throw std::runtime_error("rank1_svd: could not find a start vector outside the null space");
  detail::normalize(u, s);

  double rq_prev = 0.0;
  for (int it = 1; it <= opts.max_iterations; ++it) {
    detail::multiply_transposed(m, u, w);
    const double t = norm2(w);
    v.swap(w);
    detail::normalize(v, t);
    detail::multiply(m, v, u);
    s = norm2(u);
    detail::normalize(u, s);
    out.iterations = it;
    const double rq = s * s;
    if (it > 1 && std::abs(rq - rq_prev) <= opts.tolerance * rq) {
      out.converged = true;
      break;
    }
    rq_prev = rq;
  }

  std::size_t imax = 0;
  for (std::size_t i = 1; i < rows; ++i)
    if (std::abs(u[i]) > std::abs(u[imax])) imax = i;
  if (u[imax] < 0) {
    for (double& x : u) x = -x;
    for (double& x : v) x = -x;
  }
  out.u_hat = std::move(u);
  out.v_hat = std::move(v);
  out.sigma1 = s;
  return out;
}

}  // namespace sepca

#endif  // SEPCA_SVD_HPP
