#pragma once

// Thin wrappers over the LAPACK banded and tridiagonal solvers.

#include <lapacke.h>

#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace netflow::linalg {

/// Square band matrix with `kl` sub- and `ku` super-diagonals, stored in
/// the LAPACK general-band layout with room for the LU fill-in.
class BandMatrix {
 public:
  BandMatrix(int n, int kl, int ku) : n_(n), kl_(kl), ku_(ku), ldab_(2 * kl + ku + 1) {
    ab_.assign(static_cast<std::size_t>(ldab_) * n_, 0.0);
  }

  int size() const { return n_; }

  /// Adds `v` to entry (row, col); the entry must lie inside the band.
  void add(int row, int col, double v) {
    if (col - row > ku_ || row - col > kl_) {
      throw std::out_of_range("band entry (" + std::to_string(row) + "," + std::to_string(col) +
                              ") outside bandwidth");
    }
    ab_[static_cast<std::size_t>(col) * ldab_ + (kl_ + ku_ + row - col)] += v;
  }

  /// Solves A x = rhs in place. The matrix is consumed by the factorisation.
  void solve(std::span<double> rhs) {
    std::vector<lapack_int> ipiv(n_);
    const lapack_int info = LAPACKE_dgbsv(LAPACK_COL_MAJOR, n_, kl_, ku_, 1, ab_.data(), ldab_,
                                          ipiv.data(), rhs.data(), n_);
    if (info != 0) throw std::runtime_error("dgbsv failed, info=" + std::to_string(info));
  }

 private:
  int n_, kl_, ku_, ldab_;
  std::vector<double> ab_;
};

/// Solves the tridiagonal system (sub, diag, super) x = rhs in place.
/// `sub` and `super` have n-1 entries; all inputs are overwritten.
inline void solve_tridiagonal(std::vector<double> sub, std::vector<double> diag,
                              std::vector<double> super, std::span<double> rhs) {
  const auto n = static_cast<lapack_int>(diag.size());
  const lapack_int info =
      LAPACKE_dgtsv(LAPACK_COL_MAJOR, n, 1, sub.data(), diag.data(), super.data(), rhs.data(), n);
  if (info != 0) throw std::runtime_error("dgtsv failed, info=" + std::to_string(info));
}

/// Periodic tridiagonal system: row i couples x[i-1], x[i], x[i+1] with
/// indices taken mod n (lower[i], diag[i], upper[i]). Solved with the
/// Sherman–Morrison correction on top of dgtsv. Needs n >= 3.
inline std::vector<double> solve_cyclic_tridiagonal(const std::vector<double>& lower,
                                                    const std::vector<double>& diag,
                                                    const std::vector<double>& upper,
                                                    const std::vector<double>& rhs) {
  const std::size_t n = diag.size();
  // A = T + u v^T with u = (gamma, 0, ..., 0, upper[n-1]) and
  // v = (1, 0, ..., 0, lower[0] / gamma).
  const double gamma = -diag[0];
  std::vector<double> d = diag;
  d[0] -= gamma;
  d[n - 1] -= upper[n - 1] * lower[0] / gamma;
  std::vector<double> sub(lower.begin() + 1, lower.end());
  std::vector<double> sup(upper.begin(), upper.end() - 1);

  std::vector<double> x = rhs;
  solve_tridiagonal(sub, d, sup, x);
  std::vector<double> z(n, 0.0);
  z[0] = gamma;
  z[n - 1] = upper[n - 1];
  solve_tridiagonal(sub, d, sup, z);

  const double vx = x[0] + lower[0] / gamma * x[n - 1];
  const double vz = z[0] + lower[0] / gamma * z[n - 1];
  const double f = vx / (1.0 + vz);
  for (std::size_t i = 0; i < n; ++i) x[i] -= f * z[i];
  return x;
}

}  // namespace netflow::linalg
