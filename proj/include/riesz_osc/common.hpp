// Copyright The riesz-osc Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace riesz_osc {

using cplx = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846;

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A dense solve hit a pivot below the singularity threshold.
class SingularMatrixError : public Error {
 public:
  SingularMatrixError(const std::string& what, double pivot) : Error(what), pivot_(pivot) {}
  double pivot() const { return pivot_; }

 private:
  double pivot_;
};

/// The QR iteration did not converge; carries the unconverged block.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, std::vector<std::size_t> indices)
      : Error(what), indices_(std::move(indices)) {}
  const std::vector<std::size_t>& indices() const { return indices_; }

 private:
  std::vector<std::size_t> indices_;
};

/// The perturbation does not admit a local-subordination envelope.
class EnvelopeError : public Error {
 public:
  EnvelopeError(const std::string& what, double growth) : Error(what), growth_(growth) {}
  /// Relative growth of the fitted M_b across the last grid doubling.
  double growth() const { return growth_; }

 private:
  double growth_;
};

class QuadratureError : public Error {
 public:
  QuadratureError(const std::string& what, double residual) : Error(what), residual_(residual) {}
  double residual() const { return residual_; }

 private:
  double residual_;
};

/// Omitted lattice points of a multi-delta form exceed the tolerance.
class TailBoundError : public Error {
 public:
  TailBoundError(const std::string& what, double required_radius)
      : Error(what), required_radius_(required_radius) {}
  double required_radius() const { return required_radius_; }

 private:
  double required_radius_;
};

/// A bounded search (N, h) hit its cap.
class SearchLimitError : public Error {
 public:
  using Error::Error;
};

/// Evaluation at an unperturbed eigenvalue or on an eigenvalue of T_K.
class PoleError : public Error {
 public:
  PoleError(const std::string& what, cplx where) : Error(what), where_(where) {}
  cplx where() const { return where_; }

 private:
  cplx where_;
};

/// Trusted eigenvalues that should be simple are clustered.
class ClusterError : public Error {
 public:
  using Error::Error;
};

/// Operation requires trusted indices that are not trusted.
class UntrustedIndexError : public Error {
 public:
  UntrustedIndexError(const std::string& what, std::vector<std::size_t> indices)
      : Error(what), indices_(std::move(indices)) {}
  const std::vector<std::size_t>& indices() const { return indices_; }

 private:
  std::vector<std::size_t> indices_;
};

}  // namespace riesz_osc
