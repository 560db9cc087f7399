#include "confgeo/hypersurface.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

#include "confgeo/errors.hpp"

namespace confgeo {

bool ParameterBox::contains(const Vector& u, double margin) const {
  if (u.size() != dim()) return false;
  for (int i = 0; i < dim(); ++i) {
    if (!(u[i] >= ranges[i].first + margin && u[i] <= ranges[i].second - margin)) return false;
  }
  return true;
}

double ParameterBox::extent() const {
  double e = 0.0;
  for (const auto& [lo, hi] : ranges) e = std::max(e, hi - lo);
  return e;
}

ParameterBox ParameterBox::cube(int dim, double lo, double hi) {
  return ParameterBox{std::vector<std::pair<double, double>>(dim, {lo, hi})};
}

std::vector<Vector> grid_points(const ParameterBox& box, const std::vector<int>& resolution) {
  const int d = box.dim();
  if (static_cast<int>(resolution.size()) != d) throw DimensionMismatch("grid resolution per axis");
  std::size_t total = 1;
  for (int r : resolution) {
    if (r < 2) throw InvalidParameter("grid resolution must be >= 2 per axis");
    total *= static_cast<std::size_t>(r);
  }
  std::vector<Vector> out;
  out.reserve(total);
  std::vector<int> idx(d, 0);
  for (std::size_t k = 0; k < total; ++k) {
    Vector u(d);
    for (int i = 0; i < d; ++i) {
      const auto [lo, hi] = box.ranges[i];
      u[i] = idx[i] + 1 == resolution[i] ? hi : lo + (hi - lo) * idx[i] / (resolution[i] - 1);
    }
    out.push_back(std::move(u));
    for (int i = d - 1; i >= 0; --i) {
      if (++idx[i] < resolution[i]) break;
      idx[i] = 0;
    }
  }
  return out;
}

Immersion make_immersion(const AmbientSpace& space, const std::vector<std::string>& components,
                         ParameterBox domain, std::string name) {
  const int n = space.n();
  if (static_cast<int>(components.size()) != n) {
    throw DimensionMismatch("immersion needs " + std::to_string(n) + " components, got " +
                            std::to_string(components.size()));
  }
  if (domain.dim() != n - 1) {
    throw DimensionMismatch("parameter domain must have " + std::to_string(n - 1) + " axes");
  }
  for (const auto& [lo, hi] : domain.ranges) {
    if (!(lo < hi)) throw InvalidParameter("empty parameter range");
  }
  std::vector<Expr> exprs;
  exprs.reserve(components.size());
  for (const auto& c : components) exprs.push_back(parse(c, n - 1));
  return Immersion{space, std::move(exprs), std::move(domain), std::move(name)};
}

SurfaceJet jet_at_unchecked(const Immersion& imm, const Vector& u) {
  const int n = imm.space.n();
  const int d = imm.params();
  if (u.size() != d) throw DimensionMismatch("parameter vector of wrong dimension");
  SurfaceJet jet;
  jet.u = u;
  jet.x.resize(n);
  jet.tangents.resize(n, d);
  jet.second.assign(static_cast<std::size_t>(d) * d, Vector::Zero(n));
  for (int a = 0; a < n; ++a) {
    const Jet2 c = eval_jet2(imm.components[a], u);
    jet.x[a] = c.value;
    jet.tangents.row(a) = c.grad.transpose();
    for (int i = 0; i < d; ++i) {
      for (int j = 0; j < d; ++j) jet.second[i * d + j][a] = c.hess(i, j);
    }
  }
  return jet;
}

SurfaceJet jet_at(const Immersion& imm, const Vector& u) {
  if (!imm.domain.contains(u)) throw DomainError("parameter point outside the immersion domain");
  return jet_at_unchecked(imm, u);
}

namespace {

// N with det[t_1..t_d | y] = N·y for all y; orthogonal to every tangent.
Vector cofactor_normal(const Matrix& t) {
  const Eigen::Index n = t.rows();
  const Eigen::Index d = t.cols();
  Vector out(n);
  Matrix minor(d, d);
  for (Eigen::Index a = 0; a < n; ++a) {
    Eigen::Index r = 0;
    for (Eigen::Index b = 0; b < n; ++b) {
      if (b != a) minor.row(r++) = t.row(b);
    }
    const double sign = ((a + d) % 2 == 0) ? 1.0 : -1.0;
    out[a] = sign * (d == 0 ? 1.0 : minor.determinant());
  }
  return out;
}

}  // namespace

FundamentalData fundamental_forms(const AmbientSpace& space, const SurfaceJet& jet,
                                  const GeometryTolerances& tol) {
  const int n = space.n();
  const int d = jet.params();
  if (jet.x.size() != n || d != n - 1) throw DimensionMismatch("jet does not match the ambient space");

  const Vector& gdiag = space.metric_diagonal();
  const Matrix gram = jet.tangents.transpose() * gdiag.asDiagonal() * jet.tangents;
  const SymForm gram_form(gram);
  if (!(std::abs(gram_form.determinant()) > degeneracy_threshold(gram_form, tol.det_eps))) {
    throw IsotropicPoint("tangent hyperplane is isotropic (det g ~ 0)");
  }

  // G(ν, t_i) = 0  <=>  (Gν)·t_i = 0, and G = G⁻¹.
  Vector nu = gdiag.asDiagonal() * cofactor_normal(jet.tangents);
  const double nn = space.inner(nu, nu);
  if (!(std::abs(nn) > tol.null_tol * nu.squaredNorm())) {
    throw NullNormal("normal vector is null");
  }
  nu /= std::sqrt(std::abs(nn));

  FundamentalData out;
  out.normal = nu;
  out.epsilon = nn > 0.0 ? 1 : -1;
  out.g = out.epsilon > 0 ? gram_form : gram_form * -1.0;
  out.g_inv = invert_form(out.g, tol.det_eps);

  Matrix lam(d, d);
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) lam(i, j) = space.inner(jet.second_partial(i, j), nu);
  }
  out.lambda = SymForm(lam);
  out.lambda_mean = contract(out.g_inv, out.lambda) / d;
  out.h = out.lambda - out.g * out.lambda_mean;
  return out;
}

double invariant_I(const FundamentalData& data, const Vector& w) {
  const double gw = evaluate_form(data.g, w);
  if (!(std::abs(gw) > 1e-12 * data.g.frobenius_norm() * w.squaredNorm())) {
    throw IsotropicDirection("direction is isotropic for g");
  }
  const double hw = evaluate_form(data.h, w);
  return hw * hw / gw;
}

InvariantElement canonical_element(const FundamentalData& data) {
  const int d = data.params();
  const double det = std::abs(data.g.determinant());
  if (!(det > degeneracy_threshold(data.g))) throw DegenerateForm("first fundamental form is degenerate");

  InvariantElement out;
  out.g_hat = data.g * (1.0 / std::pow(det, 1.0 / d));
  out.h_hat = data.h * (1.0 / std::pow(det, 0.5 / d));
  const double cutoff = 1e-9 * out.h_hat.max_abs();
  for (int k = 0; k < d * d; ++k) {
    const double v = out.h_hat(k / d, k % d);
    if (std::abs(v) > cutoff) {
      out.gauge_sign = v < 0.0 ? -1 : 1;
      break;
    }
  }
  if (out.gauge_sign < 0) out.h_hat = out.h_hat * -1.0;
  return out;
}

bool is_umbilical(const FundamentalData& data, double tol) {
  return data.h.frobenius_norm() < tol * data.g.frobenius_norm();
}

namespace {

// c * e, dropping exact zeros and unit coefficients.
std::optional<Expr> scaled(double c, const Expr& e) {
  if (c == 0.0) return std::nullopt;
  if (c == 1.0) return e;
  if (c == -1.0) return -e;
  return Expr::literal(c) * e;
}

Expr linear_combination(const Eigen::RowVectorXd& row, const std::vector<Expr>& terms) {
  std::optional<Expr> acc;
  for (Eigen::Index c = 0; c < row.size(); ++c) {
    auto t = scaled(row[c], terms[c]);
    if (!t) continue;
    acc = acc ? *acc + *t : *t;
  }
  return acc ? *acc : Expr::literal(0.0);
}

}  // namespace

Immersion transform_immersion(const MobiusMap& m, const Immersion& imm) {
  const AmbientSpace& space = imm.space;
  const int n = space.n();
  if (m.matrix.rows() != n + 2 || m.matrix.cols() != n + 2) {
    throw DimensionMismatch("Möbius matrix does not match the immersion's space");
  }
  std::vector<Expr> lifted;
  lifted.reserve(n + 2);
  lifted.push_back(Expr::literal(1.0));
  for (const Expr& c : imm.components) lifted.push_back(c);

  Eigen::RowVectorXd half_metric = Eigen::RowVectorXd::Zero(n);
  std::vector<Expr> squares;
  for (int a = 0; a < n; ++a) {
    squares.push_back(Expr::pow(imm.components[a], 2));
    half_metric[a] = 0.5 * space.metric(a);
  }
  lifted.push_back(linear_combination(half_metric, squares));

  const Expr denominator = linear_combination(m.matrix.row(0), lifted);
  std::vector<Expr> out;
  out.reserve(n);
  for (int a = 1; a <= n; ++a) out.push_back(linear_combination(m.matrix.row(a), lifted) / denominator);

  return Immersion{space, std::move(out), imm.domain, imm.name.empty() ? std::string() : "mobius(" + imm.name + ")"};
}

}  // namespace confgeo
