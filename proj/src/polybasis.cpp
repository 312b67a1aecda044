#include "levelfit/polybasis.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace levelfit {

MultiIndex::MultiIndex(std::vector<int> exponents) : exponents_(std::move(exponents)) {
  for (int e : exponents_) {
    if (e < 0) throw std::invalid_argument("multi-index exponents must be nonnegative");
  }
  total_degree_ = std::accumulate(exponents_.begin(), exponents_.end(), 0);
}

MultiIndex MultiIndex::operator+(const MultiIndex& other) const {
  if (dimension() != other.dimension()) throw std::invalid_argument("multi-index dimension mismatch");
  std::vector<int> sum(exponents_);
  for (int i = 0; i < dimension(); ++i) sum[i] += other.exponents_[i];
  return MultiIndex(std::move(sum));
}

std::string MultiIndex::to_string() const {
  std::string s = "(";
  for (int i = 0; i < dimension(); ++i) {
    if (i) s += ",";
    s += std::to_string(exponents_[i]);
  }
  return s + ")";
}

namespace {

// Compositions of `remaining` into the axes [axis, n), largest leading part first.
void compositions(int axis, int remaining, std::vector<int>& current, std::vector<MultiIndex>& out) {
  const int n = static_cast<int>(current.size());
  if (axis == n - 1) {
    current[axis] = remaining;
    out.emplace_back(current);
    return;
  }
  for (int e = remaining; e >= 0; --e) {
    current[axis] = e;
    compositions(axis + 1, remaining - e, current, out);
  }
}

}  // namespace

std::vector<MultiIndex> enumerate_indices(int dimension, int degree) {
  if (dimension < 1) throw std::invalid_argument("dimension must be >= 1");
  if (degree < 0) throw std::invalid_argument("degree must be >= 0");
  std::vector<MultiIndex> out;
  out.reserve(basis_size(dimension, degree));
  std::vector<int> current(dimension, 0);
  for (int t = 0; t <= degree; ++t) compositions(0, t, current, out);
  return out;
}

std::size_t basis_size(int dimension, int degree) {
  // binomial(n + d, d) computed incrementally; exact at every step.
  std::size_t result = 1;
  for (int k = 1; k <= degree; ++k) {
    result = result * static_cast<std::size_t>(dimension + k) / static_cast<std::size_t>(k);
  }
  return result;
}

std::string_view to_string(BasisKind kind) {
  return kind == BasisKind::kMonomial ? "monomial" : "chebyshev";
}

BasisKind basis_kind_from_string(std::string_view name) {
  if (name == "monomial") return BasisKind::kMonomial;
  if (name == "chebyshev") return BasisKind::kChebyshev;
  throw std::invalid_argument("unknown basis kind '" + std::string(name) + "'");
}

PolyBasis::PolyBasis(int dimension, int degree, BasisKind kind, std::optional<BoxDomain> box)
    : dimension_(dimension),
      degree_(degree),
      kind_(kind),
      box_(std::move(box)),
      indices_(enumerate_indices(dimension, degree)) {
  for (std::size_t k = 0; k < indices_.size(); ++k) lookup_.emplace(indices_[k], k);
}

PolyBasis PolyBasis::monomial(int dimension, int degree) {
  return PolyBasis(dimension, degree, BasisKind::kMonomial, std::nullopt);
}

PolyBasis PolyBasis::chebyshev(int dimension, int degree, const BoxDomain& box) {
  if (box.dimension() != dimension) throw std::invalid_argument("chebyshev basis: box dimension mismatch");
  return PolyBasis(dimension, degree, BasisKind::kChebyshev, box);
}

std::optional<std::size_t> PolyBasis::position(const MultiIndex& alpha) const {
  auto it = lookup_.find(alpha);
  if (it == lookup_.end()) return std::nullopt;
  return it->second;
}

PolyBasis PolyBasis::with_degree(int degree) const {
  return PolyBasis(dimension_, degree, kind_, box_);
}

void PolyBasis::evaluate(std::span<const double> x, std::span<double> out) const {
  if (static_cast<int>(x.size()) != dimension_) {
    throw std::invalid_argument("eval_basis: point has dimension " + std::to_string(x.size()) +
                                ", basis has " + std::to_string(dimension_));
  }
  if (out.size() != indices_.size()) throw std::invalid_argument("eval_basis: output length mismatch");

  // table[axis * (d+1) + k] holds x_axis^k or T_k(t_axis).
  const int stride = degree_ + 1;
  std::vector<double> table(static_cast<std::size_t>(dimension_) * stride);
  for (int axis = 0; axis < dimension_; ++axis) {
    double* row = table.data() + axis * stride;
    row[0] = 1.0;
    if (kind_ == BasisKind::kMonomial) {
      for (int k = 1; k <= degree_; ++k) row[k] = row[k - 1] * x[axis];
    } else {
      const double l = box_->lower(axis);
      const double u = box_->upper(axis);
      const double t = (2.0 * x[axis] - (l + u)) / (u - l);
      if (degree_ >= 1) row[1] = t;
      for (int k = 2; k <= degree_; ++k) row[k] = 2.0 * t * row[k - 1] - row[k - 2];
    }
  }
  for (std::size_t j = 0; j < indices_.size(); ++j) {
    const auto& alpha = indices_[j];
    double v = 1.0;
    for (int axis = 0; axis < dimension_; ++axis) v *= table[axis * stride + alpha[axis]];
    out[j] = v;
  }
}

Eigen::VectorXd PolyBasis::evaluate(std::span<const double> x) const {
  Eigen::VectorXd out(static_cast<Eigen::Index>(indices_.size()));
  evaluate(x, std::span<double>(out.data(), indices_.size()));
  return out;
}

bool PolyBasis::operator==(const PolyBasis& other) const {
  return dimension_ == other.dimension_ && degree_ == other.degree_ && kind_ == other.kind_ &&
         box_ == other.box_;
}

Eigen::VectorXd eval_basis(const PolyBasis& basis, std::span<const double> x) { return basis.evaluate(x); }

Polynomial::Polynomial(PolyBasis basis, Eigen::VectorXd coeffs)
    : basis_(std::move(basis)), coeffs_(std::move(coeffs)) {
  if (static_cast<std::size_t>(coeffs_.size()) != basis_.size()) {
    throw std::invalid_argument("polynomial: " + std::to_string(coeffs_.size()) +
                                " coefficients for a basis of size " + std::to_string(basis_.size()));
  }
  if (!coeffs_.allFinite()) throw std::invalid_argument("polynomial coefficients must be finite");
}

Polynomial Polynomial::zero(PolyBasis basis) {
  const auto n = static_cast<Eigen::Index>(basis.size());
  return Polynomial(std::move(basis), Eigen::VectorXd::Zero(n));
}

Polynomial Polynomial::constant(PolyBasis basis, double value) {
  // Both kinds have the constant 1 as their first element.
  const auto n = static_cast<Eigen::Index>(basis.size());
  Eigen::VectorXd c = Eigen::VectorXd::Zero(n);
  c[0] = value;
  return Polynomial(std::move(basis), std::move(c));
}

double Polynomial::operator()(std::span<const double> x) const {
  return coeffs_.dot(basis_.evaluate(x));
}

namespace {

// rows[k][j]: coefficient of x^j in T_k(s x + t), k, j <= degree.
std::vector<std::vector<long double>> shifted_chebyshev_powers(int degree, long double s, long double t) {
  const auto size = static_cast<std::size_t>(degree + 1);
  std::vector<std::vector<long double>> cheb(size, std::vector<long double>(size, 0.0L));
  cheb[0][0] = 1.0L;
  if (degree >= 1) cheb[1][1] = 1.0L;
  for (std::size_t k = 2; k < size; ++k) {
    for (std::size_t j = 0; j <= k; ++j) {
      cheb[k][j] = (j > 0 ? 2.0L * cheb[k - 1][j - 1] : 0.0L) - cheb[k - 2][j];
    }
  }
  // affine[i][j]: coefficient of x^j in (s x + t)^i.
  std::vector<std::vector<long double>> affine(size, std::vector<long double>(size, 0.0L));
  affine[0][0] = 1.0L;
  for (std::size_t i = 1; i < size; ++i) {
    for (std::size_t j = 0; j <= i; ++j) {
      affine[i][j] = t * affine[i - 1][j] + (j > 0 ? s * affine[i - 1][j - 1] : 0.0L);
    }
  }
  std::vector<std::vector<long double>> rows(size, std::vector<long double>(size, 0.0L));
  for (std::size_t k = 0; k < size; ++k) {
    for (std::size_t i = 0; i <= k; ++i) {
      if (cheb[k][i] == 0.0L) continue;
      for (std::size_t j = 0; j <= i; ++j) rows[k][j] += cheb[k][i] * affine[i][j];
    }
  }
  return rows;
}

}  // namespace

Eigen::MatrixXd chebyshev_to_monomial(const PolyBasis& chebyshev) {
  if (chebyshev.kind() != BasisKind::kChebyshev)
    throw std::invalid_argument("chebyshev_to_monomial: basis is not of Chebyshev kind");
  const int n = chebyshev.dimension();
  const int d = chebyshev.degree();
  const BoxDomain& box = *chebyshev.chebyshev_box();
  std::vector<std::vector<std::vector<long double>>> axes;
  for (int axis = 0; axis < n; ++axis) {
    const long double lo = box.lower(axis);
    const long double hi = box.upper(axis);
    axes.push_back(shifted_chebyshev_powers(d, 2.0L / (hi - lo), -(hi + lo) / (hi - lo)));
  }
  const PolyBasis monomial = PolyBasis::monomial(n, d);
  const auto size = static_cast<Eigen::Index>(chebyshev.size());
  Eigen::MatrixXd t = Eigen::MatrixXd::Zero(size, size);
  std::vector<int> beta(static_cast<std::size_t>(n));
  for (Eigen::Index col = 0; col < size; ++col) {
    const MultiIndex& alpha = chebyshev[static_cast<std::size_t>(col)];
    // Odometer over all beta <= alpha componentwise.
    std::fill(beta.begin(), beta.end(), 0);
    while (true) {
      long double value = 1.0L;
      for (int axis = 0; axis < n && value != 0.0L; ++axis) {
        value *= axes[static_cast<std::size_t>(axis)][static_cast<std::size_t>(alpha[axis])]
                     [static_cast<std::size_t>(beta[static_cast<std::size_t>(axis)])];
      }
      if (value != 0.0L) t(static_cast<Eigen::Index>(*monomial.position(MultiIndex(beta))), col) = static_cast<double>(value);
      int axis = 0;
      while (axis < n && beta[static_cast<std::size_t>(axis)] == alpha[axis]) beta[static_cast<std::size_t>(axis++)] = 0;
      if (axis == n) break;
      ++beta[static_cast<std::size_t>(axis)];
    }
  }
  return t;
}

Polynomial to_monomial(const Polynomial& p) {
  if (p.basis().kind() == BasisKind::kMonomial) return p;
  const Eigen::MatrixXd t = chebyshev_to_monomial(p.basis());
  Eigen::VectorXd coeffs(t.rows());
  for (Eigen::Index i = 0; i < t.rows(); ++i) {
    long double sum = 0.0L;
    for (Eigen::Index j = 0; j < t.cols(); ++j) sum += static_cast<long double>(t(i, j)) * p.coeffs()[j];
    coeffs[i] = static_cast<double>(sum);
  }
  return Polynomial(PolyBasis::monomial(p.dimension(), p.degree()), std::move(coeffs));
}

Polynomial Polynomial::promoted(int degree) const {
  if (degree < basis_.degree()) throw std::invalid_argument("promoted: target degree is lower");
  PolyBasis target = basis_.with_degree(degree);
  Eigen::VectorXd c = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(target.size()));
  for (std::size_t k = 0; k < basis_.size(); ++k) c[static_cast<Eigen::Index>(*target.position(basis_[k]))] = coeffs_[k];
  return Polynomial(std::move(target), std::move(c));
}

double eval_poly(const Polynomial& p, std::span<const double> x) { return p(x); }

Polynomial gram_to_poly(const GramMatrix& gram) {
  const PolyBasis& half = gram.basis;
  if (half.kind() != BasisKind::kMonomial) throw std::invalid_argument("gram_to_poly: monomial basis required");
  const auto s = static_cast<Eigen::Index>(half.size());
  if (gram.entries.rows() != s || gram.entries.cols() != s)
    throw std::invalid_argument("gram_to_poly: matrix side does not match basis size");
  const double scale = std::max(1.0, gram.entries.cwiseAbs().maxCoeff());
  if ((gram.entries - gram.entries.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale)
    throw std::invalid_argument("gram_to_poly: matrix is not symmetric");

  PolyBasis full = PolyBasis::monomial(half.dimension(), 2 * half.degree());
  Eigen::VectorXd c = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(full.size()));
  for (Eigen::Index a = 0; a < s; ++a) {
    for (Eigen::Index b = 0; b < s; ++b) {
      const auto k = *full.position(half[a] + half[b]);
      c[static_cast<Eigen::Index>(k)] += gram.entries(a, b);
    }
  }
  return Polynomial(std::move(full), std::move(c));
}

GramMatrix poly_to_gram(const Polynomial& p, std::optional<int> delta) {
  if (p.basis().kind() != BasisKind::kMonomial) throw std::invalid_argument("poly_to_gram: monomial basis required");
  const int half_deg = delta.value_or(half_degree(p.degree()));
  if (2 * half_deg < p.degree()) throw std::invalid_argument("poly_to_gram: delta too small for degree");
  PolyBasis half = PolyBasis::monomial(p.dimension(), half_deg);
  PolyBasis full = PolyBasis::monomial(p.dimension(), 2 * half_deg);
  const auto s = static_cast<Eigen::Index>(half.size());

  std::vector<int> pair_count(full.size(), 0);
  std::vector<std::size_t> slot(static_cast<std::size_t>(s * s));
  for (Eigen::Index a = 0; a < s; ++a) {
    for (Eigen::Index b = 0; b < s; ++b) {
      const auto k = *full.position(half[a] + half[b]);
      slot[static_cast<std::size_t>(a * s + b)] = k;
      ++pair_count[k];
    }
  }
  Eigen::VectorXd gamma = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(full.size()));
  for (std::size_t k = 0; k < p.basis().size(); ++k) {
    gamma[static_cast<Eigen::Index>(*full.position(p.basis()[k]))] = p.coeffs()[static_cast<Eigen::Index>(k)];
  }
  Eigen::MatrixXd entries(s, s);
  for (Eigen::Index a = 0; a < s; ++a) {
    for (Eigen::Index b = 0; b < s; ++b) {
      const auto k = slot[static_cast<std::size_t>(a * s + b)];
      entries(a, b) = gamma[static_cast<Eigen::Index>(k)] / pair_count[k];
    }
  }
  return GramMatrix{std::move(half), std::move(entries)};
}

nlohmann::json to_json(const Polynomial& p) {
  nlohmann::json j;
  j["dimension"] = p.dimension();
  j["degree"] = p.degree();
  j["kind"] = std::string(to_string(p.basis().kind()));
  j["coeffs"] = std::vector<double>(p.coeffs().data(), p.coeffs().data() + p.coeffs().size());
  if (const auto& box = p.basis().chebyshev_box()) {
    j["box"] = {{"lower", box->lower()}, {"upper", box->upper()}};
  }
  return j;
}

Polynomial polynomial_from_json(const nlohmann::json& j) {
  const int n = j.at("dimension").get<int>();
  const int d = j.at("degree").get<int>();
  const BasisKind kind = basis_kind_from_string(j.at("kind").get<std::string>());
  auto coeffs = j.at("coeffs").get<std::vector<double>>();
  PolyBasis basis = kind == BasisKind::kMonomial
                        ? PolyBasis::monomial(n, d)
                        : PolyBasis::chebyshev(n, d,
                                               BoxDomain(j.at("box").at("lower").get<std::vector<double>>(),
                                                         j.at("box").at("upper").get<std::vector<double>>()));
  return Polynomial(std::move(basis), Eigen::Map<Eigen::VectorXd>(coeffs.data(), static_cast<Eigen::Index>(coeffs.size())));
}

}  // namespace levelfit
