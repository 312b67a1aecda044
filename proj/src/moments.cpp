#include "levelfit/moments.hpp"

#include <cmath>
#include <limits>

#include "levelfit/format.hpp"

namespace levelfit {
namespace {

void check_dimension(const BoxDomain& box, int dimension) {
  if (box.dimension() != dimension) {
    throw std::invalid_argument("box has dimension " + std::to_string(box.dimension()) + ", expected " +
                                std::to_string(dimension));
  }
}

// Integral of T_k over [-1,1].
double reference_chebyshev_integral(int k) {
  if (k % 2 == 1) return 0.0;
  return 2.0 / (1.0 - static_cast<double>(k) * k);
}

}  // namespace

double box_monomial_moment(const BoxDomain& box, const MultiIndex& alpha) {
  check_dimension(box, alpha.dimension());
  double value = 1.0;
  for (int i = 0; i < alpha.dimension(); ++i) {
    const int k = alpha[i] + 1;
    value *= (std::pow(box.upper(i), k) - std::pow(box.lower(i), k)) / k;
  }
  return value;
}

double chebyshev_moment(const BoxDomain& box, const MultiIndex& alpha) {
  check_dimension(box, alpha.dimension());
  double value = 1.0;
  for (int i = 0; i < alpha.dimension(); ++i) {
    value *= 0.5 * box.width(i) * reference_chebyshev_integral(alpha[i]);
  }
  return value;
}

double MomentVector::integrate(const Polynomial& p) const {
  if (!(p.basis() == basis)) throw std::invalid_argument("integrate: polynomial basis differs from moment basis");
  // High-degree monomial fits carry large cancelling coefficients.
  long double sum = 0.0L;
  for (Eigen::Index k = 0; k < values.size(); ++k) sum += static_cast<long double>(values[k]) * p.coeffs()[k];
  return static_cast<double>(sum);
}

MomentVector moment_vector(const PolyBasis& basis, const BoxDomain& box) {
  check_dimension(box, basis.dimension());
  if (basis.kind() == BasisKind::kChebyshev && !(*basis.chebyshev_box() == box))
    throw std::invalid_argument("moment_vector: chebyshev basis box differs from integration box");
  Eigen::VectorXd values(static_cast<Eigen::Index>(basis.size()));
  for (std::size_t k = 0; k < basis.size(); ++k) {
    values[static_cast<Eigen::Index>(k)] = basis.kind() == BasisKind::kMonomial ? box_monomial_moment(box, basis[k])
                                                                                : chebyshev_moment(box, basis[k]);
  }
  return MomentVector{basis, std::move(values)};
}

double MomentMatrix::condition_number() const {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(entries, Eigen::EigenvaluesOnly);
  const double lo = eig.eigenvalues().minCoeff();
  const double hi = eig.eigenvalues().maxCoeff();
  if (lo <= 0.0) return std::numeric_limits<double>::infinity();
  return hi / lo;
}

MomentMatrix moment_matrix(const PolyBasis& basis_half, const BoxDomain& box) {
  check_dimension(box, basis_half.dimension());
  const auto s = static_cast<Eigen::Index>(basis_half.size());
  Eigen::MatrixXd m(s, s);
  if (basis_half.kind() == BasisKind::kMonomial) {
    for (Eigen::Index a = 0; a < s; ++a) {
      for (Eigen::Index b = a; b < s; ++b) {
        m(a, b) = m(b, a) = box_monomial_moment(box, basis_half[a] + basis_half[b]);
      }
    }
  } else {
    if (!(*basis_half.chebyshev_box() == box))
      throw std::invalid_argument("moment_matrix: chebyshev basis box differs from integration box");
    // T_i T_j = (T_{i+j} + T_{|i-j|}) / 2, axis by axis.
    for (Eigen::Index a = 0; a < s; ++a) {
      for (Eigen::Index b = a; b < s; ++b) {
        double v = 1.0;
        for (int i = 0; i < box.dimension(); ++i) {
          const int p = basis_half[a][i];
          const int q = basis_half[b][i];
          v *= 0.25 * box.width(i) *
               (reference_chebyshev_integral(p + q) + reference_chebyshev_integral(std::abs(p - q)));
        }
        m(a, b) = m(b, a) = v;
      }
    }
  }
  return MomentMatrix{basis_half, std::move(m)};
}

Orthonormalizer orthonormalize(const MomentMatrix& moments) {
  Eigen::LLT<Eigen::MatrixXd> llt(moments.entries);
  if (llt.info() != Eigen::Success) {
    throw NumericalError("moment matrix is not numerically positive definite (degree " +
                         std::to_string(moments.basis.degree()) +
                         "); use a lower degree or the chebyshev basis");
  }
  Eigen::MatrixXd lower = llt.matrixL();
  if (!lower.allFinite() || lower.diagonal().minCoeff() <= 0.0)
    throw NumericalError("cholesky factor of the moment matrix is degenerate");
  return Orthonormalizer(std::move(lower));
}

Eigen::MatrixXd Orthonormalizer::orthonormal_coefficients() const {
  const auto s = lower_.rows();
  return lower_.triangularView<Eigen::Lower>().solve(Eigen::MatrixXd::Identity(s, s));
}

Eigen::VectorXd Orthonormalizer::to_orthonormal(const Eigen::VectorXd& basis_values) const {
  return lower_.triangularView<Eigen::Lower>().solve(basis_values);
}

Eigen::MatrixXd Orthonormalizer::transform_moments(const Eigen::MatrixXd& moments) const {
  Eigen::MatrixXd left = lower_.triangularView<Eigen::Lower>().solve(moments);
  return lower_.triangularView<Eigen::Lower>().solve(left.transpose()).transpose();
}

Eigen::MatrixXd Orthonormalizer::transform_gram(const Eigen::MatrixXd& gram) const {
  return lower_.transpose() * gram * lower_;
}

void write_moments_csv(std::ostream& out, const MomentVector& moments) {
  out << "# basis=" << to_string(moments.basis.kind()) << " dimension=" << moments.basis.dimension()
      << " degree=" << moments.basis.degree() << "\n";
  out << "index,value\n";
  for (std::size_t k = 0; k < moments.basis.size(); ++k) {
    std::string idx = moments.basis[k].to_string();
    for (char& ch : idx) {
      if (ch == ',') ch = ';';
    }
    out << idx << "," << format_double(moments.values[static_cast<Eigen::Index>(k)]) << "\n";
  }
}

}  // namespace levelfit
