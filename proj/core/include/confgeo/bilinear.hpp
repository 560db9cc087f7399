#pragma once

#include <optional>
#include <utility>

#include <Eigen/Dense>

namespace confgeo {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Counts of positive and negative directions of a flat metric.
struct Signature {
  int p = 0;
  int q = 0;

  int dimension() const { return p + q; }
  bool operator==(const Signature&) const = default;
};

/// Real symmetric bilinear form on R^d. The stored matrix is exactly
/// symmetric: any input is replaced by (A + Aᵀ)/2 on construction.
class SymForm {
 public:
  SymForm() = default;
  explicit SymForm(const Matrix& entries);

  static SymForm identity(int dim);
  static SymForm zero(int dim);
  static SymForm diagonal(const Vector& diag);

  int dim() const { return static_cast<int>(m_.rows()); }
  const Matrix& matrix() const { return m_; }
  double operator()(int i, int j) const { return m_(i, j); }

  double frobenius_norm() const { return m_.norm(); }
  double max_abs() const { return dim() == 0 ? 0.0 : m_.cwiseAbs().maxCoeff(); }
  double determinant() const { return m_.determinant(); }

  SymForm operator+(const SymForm& o) const;
  SymForm operator-(const SymForm& o) const;
  SymForm operator*(double s) const;
  friend SymForm operator*(double s, const SymForm& f) { return f * s; }

 private:
  Matrix m_;
};

/// Rank and inertia of a form at a given relative threshold.
struct FormClass {
  int rank = 0;
  int plus = 0;
  int minus = 0;
  bool decomposable = false;
};

constexpr double kDefaultRankTol = 1e-9;
constexpr double kDefaultDetEps = 1e-12;

/// Scale-aware degeneracy threshold: rel * (max Euclidean row norm)^d.
double degeneracy_threshold(const SymForm& g, double rel = kDefaultDetEps);

/// Inverse of a nondegenerate form. Throws DegenerateForm when
/// |det g| <= degeneracy_threshold(g, det_eps_rel).
SymForm invert_form(const SymForm& g, double det_eps_rel = kDefaultDetEps);

/// Full contraction Σ g^{ij} h_{ij}.
double contract(const SymForm& g_inv, const SymForm& h);

/// g_{ij} v^i v^j.
double evaluate_form(const SymForm& g, const Vector& v);

FormClass classify_form(const SymForm& q, double tol = kDefaultRankTol);

/// True iff q is a product of two real linear forms.
bool is_decomposable(const SymForm& q, double tol = kDefaultRankTol);

/// Linear factors (α, β) with q(v) = (α·v)(β·v), when they exist.
std::optional<std::pair<Vector, Vector>> factorize(const SymForm& q,
                                                   double tol = kDefaultRankTol);

}  // namespace confgeo
