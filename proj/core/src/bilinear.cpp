#include "confgeo/bilinear.hpp"

#include <cmath>
#include <string>

#include "confgeo/errors.hpp"

namespace confgeo {

namespace {

void require_same_dim(int a, int b, const char* what) {
  if (a != b) {
    throw DimensionMismatch(std::string(what) + ": dimension " + std::to_string(a) +
                            " vs " + std::to_string(b));
  }
}

}  // namespace

SymForm::SymForm(const Matrix& entries) {
  if (entries.rows() != entries.cols()) {
    throw DimensionMismatch("SymForm requires a square matrix");
  }
  m_ = 0.5 * (entries + entries.transpose());
}

SymForm SymForm::identity(int dim) { return SymForm(Matrix::Identity(dim, dim)); }

SymForm SymForm::zero(int dim) { return SymForm(Matrix::Zero(dim, dim)); }

SymForm SymForm::diagonal(const Vector& diag) { return SymForm(Matrix(diag.asDiagonal())); }

SymForm SymForm::operator+(const SymForm& o) const {
  require_same_dim(dim(), o.dim(), "SymForm +");
  return SymForm(m_ + o.m_);
}

SymForm SymForm::operator-(const SymForm& o) const {
  require_same_dim(dim(), o.dim(), "SymForm -");
  return SymForm(m_ - o.m_);
}

SymForm SymForm::operator*(double s) const { return SymForm(m_ * s); }

double degeneracy_threshold(const SymForm& g, double rel) {
  if (g.dim() == 0) return 0.0;
  const double row = g.matrix().rowwise().norm().maxCoeff();
  return rel * std::pow(row, g.dim());
}

SymForm invert_form(const SymForm& g, double det_eps_rel) {
  const double det = g.determinant();
  if (!(std::abs(det) > degeneracy_threshold(g, det_eps_rel))) {
    throw DegenerateForm("form is degenerate (|det| = " + std::to_string(std::abs(det)) + ")");
  }
  return SymForm(g.matrix().partialPivLu().inverse());
}

double contract(const SymForm& g_inv, const SymForm& h) {
  require_same_dim(g_inv.dim(), h.dim(), "contract");
  return g_inv.matrix().cwiseProduct(h.matrix()).sum();
}

double evaluate_form(const SymForm& g, const Vector& v) {
  require_same_dim(g.dim(), static_cast<int>(v.size()), "evaluate_form");
  return v.dot(g.matrix() * v);
}

FormClass classify_form(const SymForm& q, double tol) {
  FormClass out;
  if (q.dim() == 0) {
    out.decomposable = true;
    return out;
  }
  Eigen::SelfAdjointEigenSolver<Matrix> eig(q.matrix(), Eigen::EigenvaluesOnly);
  const Vector& mu = eig.eigenvalues();
  const double scale = mu.cwiseAbs().maxCoeff();
  if (scale > 0.0) {
    for (Eigen::Index i = 0; i < mu.size(); ++i) {
      if (std::abs(mu[i]) > tol * scale) {
        ++out.rank;
        (mu[i] > 0.0 ? out.plus : out.minus) += 1;
      }
    }
  }
  out.decomposable = out.rank <= 1 || (out.rank == 2 && out.plus == 1 && out.minus == 1);
  return out;
}

bool is_decomposable(const SymForm& q, double tol) { return classify_form(q, tol).decomposable; }

std::optional<std::pair<Vector, Vector>> factorize(const SymForm& q, double tol) {
  const int d = q.dim();
  if (d == 0) return std::nullopt;
  Eigen::SelfAdjointEigenSolver<Matrix> eig(q.matrix());
  const Vector& mu = eig.eigenvalues();  // ascending
  const Matrix& v = eig.eigenvectors();
  const double scale = mu.cwiseAbs().maxCoeff();
  if (scale == 0.0) return std::make_pair(Vector::Zero(d), Vector::Zero(d));

  const FormClass cls = classify_form(q, tol);
  if (!cls.decomposable) return std::nullopt;
  if (cls.rank == 1) {
    const Eigen::Index k = std::abs(mu[0]) >= std::abs(mu[d - 1]) ? 0 : d - 1;
    return std::make_pair(Vector(mu[k] * v.col(k)), Vector(v.col(k)));
  }
  // rank 2, signature (1,1): μ+ (v+·w)² + μ- (v-·w)² = (a v+ + b v-)·w (a v+ - b v-)·w
  const double a = std::sqrt(mu[d - 1]);
  const double b = std::sqrt(-mu[0]);
  Vector alpha = a * v.col(d - 1) + b * v.col(0);
  Vector beta = a * v.col(d - 1) - b * v.col(0);
  return std::make_pair(std::move(alpha), std::move(beta));
}

}  // namespace confgeo
