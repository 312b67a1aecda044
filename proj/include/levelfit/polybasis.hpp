#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>
#include "json.hpp"

#include "levelfit/box.hpp"

namespace levelfit {

/// Exponent tuple alpha of a monomial x^alpha (or of a tensor Chebyshev
/// product T_alpha).
class MultiIndex {
 public:
  MultiIndex() = default;
  explicit MultiIndex(std::vector<int> exponents);

  int dimension() const { return static_cast<int>(exponents_.size()); }
  int total_degree() const { return total_degree_; }
  int operator[](int axis) const { return exponents_[axis]; }
  const std::vector<int>& exponents() const { return exponents_; }

  MultiIndex operator+(const MultiIndex& other) const;

  auto operator<=>(const MultiIndex& other) const { return exponents_ <=> other.exponents_; }
  bool operator==(const MultiIndex& other) const { return exponents_ == other.exponents_; }

  std::string to_string() const;

 private:
  std::vector<int> exponents_;
  int total_degree_ = 0;
};

/// All multi-indices with |alpha| <= degree in graded lexicographic order:
/// ascending total degree, then descending lexicographic order of the
/// exponent tuple within a degree (x1 before x2, x1^2 before x1 x2).
std::vector<MultiIndex> enumerate_indices(int dimension, int degree);

/// binomial(n + d, d), the size of the degree-d basis in n variables.
std::size_t basis_size(int dimension, int degree);

enum class BasisKind { kMonomial, kChebyshev };

std::string_view to_string(BasisKind kind);
BasisKind basis_kind_from_string(std::string_view name);

/// Ordered finite basis of P_d. The Chebyshev kind evaluates tensor products
/// of T_k on the affine image of `box` onto [-1,1]^n.
class PolyBasis {
 public:
  static PolyBasis monomial(int dimension, int degree);
  static PolyBasis chebyshev(int dimension, int degree, const BoxDomain& box);

  int dimension() const { return dimension_; }
  int degree() const { return degree_; }
  BasisKind kind() const { return kind_; }
  std::size_t size() const { return indices_.size(); }
  const std::vector<MultiIndex>& indices() const { return indices_; }
  const MultiIndex& operator[](std::size_t k) const { return indices_[k]; }
  /// Box of the affine map; present only for the Chebyshev kind.
  const std::optional<BoxDomain>& chebyshev_box() const { return box_; }

  /// Position of `alpha` in the ordering, or nullopt if |alpha| > degree.
  std::optional<std::size_t> position(const MultiIndex& alpha) const;

  /// Same kind (and box) with a different degree.
  PolyBasis with_degree(int degree) const;

  /// Writes pi(x) into `out` (length size()).
  void evaluate(std::span<const double> x, std::span<double> out) const;
  Eigen::VectorXd evaluate(std::span<const double> x) const;

  bool operator==(const PolyBasis& other) const;

 private:
  PolyBasis(int dimension, int degree, BasisKind kind, std::optional<BoxDomain> box);

  int dimension_;
  int degree_;
  BasisKind kind_;
  std::optional<BoxDomain> box_;
  std::vector<MultiIndex> indices_;
  std::map<MultiIndex, std::size_t> lookup_;
};

Eigen::VectorXd eval_basis(const PolyBasis& basis, std::span<const double> x);

/// p(x) = coeffs . pi(x).
class Polynomial {
 public:
  Polynomial(PolyBasis basis, Eigen::VectorXd coeffs);

  static Polynomial zero(PolyBasis basis);
  static Polynomial constant(PolyBasis basis, double value);

  const PolyBasis& basis() const { return basis_; }
  const Eigen::VectorXd& coeffs() const { return coeffs_; }
  int dimension() const { return basis_.dimension(); }
  int degree() const { return basis_.degree(); }

  double operator()(std::span<const double> x) const;
  double operator()(double x) const { return (*this)(std::span<const double>(&x, 1)); }

  /// Re-expresses the same polynomial over a larger basis of the same kind.
  Polynomial promoted(int degree) const;

 private:
  PolyBasis basis_;
  Eigen::VectorXd coeffs_;
};

double eval_poly(const Polynomial& p, std::span<const double> x);

/// T with (monomial coefficients) = T * (Chebyshev coefficients) for a
/// Chebyshev-kind basis; column j expands element j in monomials of the same
/// degree. Entries are computed in extended precision.
Eigen::MatrixXd chebyshev_to_monomial(const PolyBasis& chebyshev);

/// The same polynomial in the monomial basis of equal degree. Monomial input
/// is returned unchanged.
Polynomial to_monomial(const Polynomial& p);

/// Symmetric P with p = pi_delta^T P pi_delta (monomial basis of degree delta).
struct GramMatrix {
  PolyBasis basis;  // pi_delta
  Eigen::MatrixXd entries;
};

/// delta = ceil(d / 2).
inline int half_degree(int degree) { return (degree + 1) / 2; }

/// Expands pi_delta^T P pi_delta into the degree-2*delta monomial basis.
Polynomial gram_to_poly(const GramMatrix& gram);

/// Canonical Gram representative: each coefficient p_gamma is split equally
/// over all pairs (alpha, beta) with alpha + beta = gamma. `delta` defaults to
/// ceil(deg p / 2).
GramMatrix poly_to_gram(const Polynomial& p, std::optional<int> delta = std::nullopt);

/// {dimension, degree, kind, coeffs[, box]}; coefficients in basis order.
nlohmann::json to_json(const Polynomial& p);
Polynomial polynomial_from_json(const nlohmann::json& j);

}  // namespace levelfit
