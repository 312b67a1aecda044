#pragma once

#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "levelfit/box.hpp"
#include "levelfit/polybasis.hpp"

namespace levelfit {

/// Raised when a moment matrix cannot be factored in working precision.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Integral of x^alpha over the box.
double box_monomial_moment(const BoxDomain& box, const MultiIndex& alpha);

/// Integral over the box of prod_i T_{alpha_i}(t_i), t the affine image of x
/// onto [-1,1]^n.
double chebyshev_moment(const BoxDomain& box, const MultiIndex& alpha);

/// y_alpha = integral over B of the basis element alpha; the LP objective.
struct MomentVector {
  PolyBasis basis;
  Eigen::VectorXd values;

  /// Integral of p over B (p must live in `basis`).
  double integrate(const Polynomial& p) const;
};

MomentVector moment_vector(const PolyBasis& basis, const BoxDomain& box);

/// M = integral over B of pi_delta pi_delta^T.
struct MomentMatrix {
  PolyBasis basis;
  Eigen::MatrixXd entries;

  /// 2-norm condition number from the symmetric eigenvalues.
  double condition_number() const;
};

MomentMatrix moment_matrix(const PolyBasis& basis_half, const BoxDomain& box);

/// Moment matrices beyond this condition number trigger a recommendation to
/// switch to the Chebyshev basis.
inline constexpr double kMomentConditionWarning = 1e12;

/// Cholesky factor M = L L^T. The basis L^{-1} pi is orthonormal for the
/// Lebesgue measure on B.
class Orthonormalizer {
 public:
  const Eigen::MatrixXd& lower() const { return lower_; }

  /// Row k holds the coefficients of the k-th orthonormal element in the
  /// original basis (rows of L^{-1}).
  Eigen::MatrixXd orthonormal_coefficients() const;

  /// L^{-1} pi(x) given pi(x).
  Eigen::VectorXd to_orthonormal(const Eigen::VectorXd& basis_values) const;

  /// L^{-1} A L^{-T}; the identity when A is the moment matrix.
  Eigen::MatrixXd transform_moments(const Eigen::MatrixXd& moments) const;

  /// Gram matrix in the orthonormal basis, L^T P L. Its trace equals trace(P M).
  Eigen::MatrixXd transform_gram(const Eigen::MatrixXd& gram) const;

 private:
  friend Orthonormalizer orthonormalize(const MomentMatrix& moments);
  explicit Orthonormalizer(Eigen::MatrixXd lower) : lower_(std::move(lower)) {}
  Eigen::MatrixXd lower_;
};

/// Throws NumericalError when M is not numerically positive definite.
Orthonormalizer orthonormalize(const MomentMatrix& moments);

/// CSV export, one "(a1;a2;...),value" row per basis element.
void write_moments_csv(std::ostream& out, const MomentVector& moments);

}  // namespace levelfit
