// Copyright The riesz-osc Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "riesz_osc/common.hpp"

namespace riesz_osc::linalg {

/// Dense row-major complex matrix.
class ComplexMatrix {
 public:
  ComplexMatrix() = default;
  ComplexMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}
  explicit ComplexMatrix(std::size_t n) : ComplexMatrix(n, n) {}

  static ComplexMatrix identity(std::size_t n);
  static ComplexMatrix diagonal(std::span<const cplx> d);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool square() const { return rows_ == cols_; }

  cplx& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  const cplx& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  std::span<cplx> row(std::size_t i) { return {data_.data() + i * cols_, cols_}; }
  std::span<const cplx> row(std::size_t i) const { return {data_.data() + i * cols_, cols_}; }
  std::vector<cplx> column(std::size_t j) const;

  cplx* data() { return data_.data(); }
  const cplx* data() const { return data_.data(); }

  ComplexMatrix adjoint() const;
  ComplexMatrix transpose() const;
  /// Leading principal block of size k.
  ComplexMatrix leading(std::size_t k) const;

  ComplexMatrix& operator+=(const ComplexMatrix& other);
  ComplexMatrix& operator-=(const ComplexMatrix& other);
  ComplexMatrix& operator*=(cplx s);

  bool all_finite() const;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<cplx> data_;
};

ComplexMatrix operator+(ComplexMatrix a, const ComplexMatrix& b);
ComplexMatrix operator-(ComplexMatrix a, const ComplexMatrix& b);
ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b);
ComplexMatrix operator*(cplx s, ComplexMatrix a);

std::vector<cplx> multiply(const ComplexMatrix& a, std::span<const cplx> x);
/// y = A^* x
std::vector<cplx> multiply_adjoint(const ComplexMatrix& a, std::span<const cplx> x);

/// x^* y
cplx dot(std::span<const cplx> x, std::span<const cplx> y);
double norm2(std::span<const cplx> x);

double frobenius_norm(const ComplexMatrix& a);
/// Maximum absolute column sum.
double one_norm(const ComplexMatrix& a);
cplx trace(const ComplexMatrix& a);

/// x y^*
ComplexMatrix outer(std::span<const cplx> x, std::span<const cplx> y);

// ---------------------------------------------------------------------------
// LU with partial pivoting

class LuFactorization {
 public:
  /// Pivots with magnitude below `pivot_threshold * one_norm(A)` raise SingularMatrixError.
  explicit LuFactorization(ComplexMatrix a, double pivot_threshold = 1e-14);

  std::size_t size() const { return lu_.rows(); }
  std::vector<cplx> solve(std::span<const cplx> b) const;
  /// Solves A^* x = b.
  std::vector<cplx> solve_adjoint(std::span<const cplx> b) const;
  ComplexMatrix inverse() const;
  /// det(A) as mantissa * 2^exponent to dodge overflow.
  void determinant(cplx& mantissa, long& exponent) const;
  double smallest_pivot() const { return smallest_pivot_; }

 private:
  ComplexMatrix lu_;
  std::vector<std::size_t> perm_;
  int sign_ = 1;
  double smallest_pivot_ = 0.0;
};

std::vector<cplx> solve(const ComplexMatrix& a, std::span<const cplx> b);

// ---------------------------------------------------------------------------
// Norms

struct NormOptions {
  double rel_tol = 1e-10;
  int max_iterations = 20000;
  int restarts = 3;
  std::uint64_t seed = 0x5eed;
};

/// Largest singular value by power iteration on A^*A.
double operator_norm(const ComplexMatrix& a, const NormOptions& opts = {});

/// Singular values, descending, by one-sided Jacobi.
std::vector<double> singular_values(const ComplexMatrix& a);

/// Number of singular values above `rel_tol * sigma_max`.
std::size_t numerical_rank(const ComplexMatrix& a, double rel_tol = 1e-6);

// ---------------------------------------------------------------------------
// Non-Hermitian eigensolver

struct EigenOptions {
  bool balance = true;
  bool compute_vectors = true;
  /// QR sweeps allowed per eigenvalue before giving up.
  int iterations_per_eigenvalue = 40;
};

struct EigenDecomposition {
  std::vector<cplx> values;
  /// Columns are right eigenvectors, unit 2-norm.
  ComplexMatrix right;
  /// Columns are left eigenvectors scaled so that left_n^* right_n = 1.
  ComplexMatrix left;
  /// ||A v_n - lambda_n v_n|| with ||v_n|| = 1.
  std::vector<double> residuals;
  /// ||left_n|| * ||right_n||, the eigenvalue condition number (inf when not biorthogonal).
  std::vector<double> condition;
  /// false where the pair failed the biorthogonality test (defective or clustered).
  std::vector<bool> biorthogonal;
};

/// Balancing, Householder Hessenberg reduction, and implicit single-shift complex
/// QR with Wilkinson shifts; eigenvectors by back substitution on the Schur form.
EigenDecomposition eigendecompose(const ComplexMatrix& a, const EigenOptions& opts = {});

std::vector<cplx> eigenvalues(const ComplexMatrix& a, bool balance = true);

}  // namespace riesz_osc::linalg
