// Shared aliases, error types and small utilities used across the library.
#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <exception>
#include <functional>
#include <mutex>
#include <random>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace polynodal {

using Eigen::Matrix2d;
using Eigen::MatrixXd;
using Eigen::Vector2d;
using Eigen::VectorXd;

using PointList = Eigen::Matrix<double, Eigen::Dynamic, 2>;

using ScalarField = std::function<double(const Vector2d &)>;
using VectorField = std::function<Vector2d(const Vector2d &)>;

/// Input stream or file does not parse.
struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Parsed or constructed data violates a structural invariant.
struct ValidationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A local solve or factorization is numerically degenerate.
struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Dimension of the space of bivariate polynomials of total degree <= deg,
/// with the convention that degree -1 gives the zero space.
inline int poly_dim(int deg) { return deg < 0 ? 0 : (deg + 1) * (deg + 2) / 2; }

/// Dimension of univariate polynomials of degree <= deg (zero space at -1).
inline int edge_poly_dim(int deg) { return deg < 0 ? 0 : deg + 1; }

/// Uniform draw in [-1, 1] built from the raw 64-bit stream, so that sampled
/// regression values do not depend on the standard library's distribution.
inline double unit_real(std::mt19937_64 &rng) {
  return 2.0 * ((rng() >> 11) * (1.0 / 9007199254740992.0)) - 1.0;
}

/// Strided parallel loop over [0, n); falls back to a plain loop for one
/// thread. The first exception raised by a worker is rethrown on the caller.
inline void parallel_for(int n, int threads, const std::function<void(int)> &body) {
  if (threads <= 1 || n < 2) {
    for (int i = 0; i < n; i++) body(i);
    return;
  }
  int nw = std::min<int>(threads, n);
  std::vector<std::thread> pool;
  pool.reserve(nw);
  std::exception_ptr firstError;
  std::mutex errorLock;
  for (int w = 0; w < nw; w++) {
    pool.emplace_back([&, w]() {
      try {
        for (int i = w; i < n; i += nw) body(i);
      } catch (...) {
        std::lock_guard<std::mutex> guard(errorLock);
        if (!firstError) firstError = std::current_exception();
      }
    });
  }
  for (auto &t : pool) t.join();
  if (firstError) std::rethrow_exception(firstError);
}

}  // namespace polynodal
