#include "confgeo/mobius.hpp"

#include <cmath>
#include <string>

#include "confgeo/errors.hpp"

namespace confgeo {

AmbientSpace::AmbientSpace(Signature sig) : sig_(sig) {
  if (sig.p < 1 || sig.q < 0) {
    throw InvalidParameter("signature requires p >= 1 and q >= 0");
  }
  const int n = sig.dimension();
  g_ = Vector::Ones(n);
  g_.tail(sig.q).setConstant(-1.0);
  q_ = Matrix::Zero(n + 2, n + 2);
  q_.block(1, 1, n, n) = g_.asDiagonal();
  q_(0, n + 1) = -1.0;
  q_(n + 1, 0) = -1.0;
}

double AmbientSpace::inner(const Vector& x, const Vector& y) const {
  if (x.size() != n() || y.size() != n()) {
    throw DimensionMismatch("flat vector of wrong dimension");
  }
  return (x.array() * g_.array() * y.array()).sum();
}

LightConeVector LightConeVector::from_coords(const Vector& c) {
  const Eigen::Index n = c.size() - 2;
  return LightConeVector{c[0], c.segment(1, n), c[n + 1]};
}

Vector LightConeVector::coords() const {
  Vector c(spatial.size() + 2);
  c[0] = minus;
  c.segment(1, spatial.size()) = spatial;
  c[spatial.size() + 1] = plus;
  return c;
}

LightConeVector LightConeVector::operator+(const LightConeVector& o) const {
  return {minus + o.minus, spatial + o.spatial, plus + o.plus};
}

LightConeVector LightConeVector::operator-(const LightConeVector& o) const {
  return {minus - o.minus, spatial - o.spatial, plus - o.plus};
}

LightConeVector LightConeVector::operator*(double s) const {
  return {minus * s, spatial * s, plus * s};
}

MobiusMap MobiusMap::identity(const AmbientSpace& space) {
  return MobiusMap{Matrix::Identity(space.ambient_dim(), space.ambient_dim())};
}

LightConeVector MobiusMap::operator()(const LightConeVector& v) const {
  return LightConeVector::from_coords(matrix * v.coords());
}

LightConeVector e_minus(const AmbientSpace& space) {
  return LightConeVector{1.0, Vector::Zero(space.n()), 0.0};
}

LightConeVector e_plus(const AmbientSpace& space) {
  return LightConeVector{0.0, Vector::Zero(space.n()), 1.0};
}

LightConeVector lift_point(const AmbientSpace& space, const Vector& x) {
  return LightConeVector{1.0, x, 0.5 * space.inner(x, x)};
}

Vector project_point(const LightConeVector& X) {
  const double scale = X.coords().norm();
  if (!(std::abs(X.minus) > 1e-12 * scale)) {
    throw PointAtInfinity("vector has no finite image point (minus coordinate ~ 0)");
  }
  return X.spatial / X.minus;
}

LightConeVector sphere_vector(const AmbientSpace& space, const Vector& center, double radius_sq) {
  LightConeVector s = lift_point(space, center);
  s.plus -= 0.5 * radius_sq;
  return s;
}

LightConeVector plane_vector(const AmbientSpace& space, const Vector& normal, double offset) {
  if (normal.size() != space.n()) throw DimensionMismatch("plane normal of wrong dimension");
  return LightConeVector{0.0, normal, offset};
}

double incidence(const AmbientSpace& space, const LightConeVector& X, const LightConeVector& S) {
  return space.inner(X.spatial, S.spatial) - X.minus * S.plus - X.plus * S.minus;
}

double quadric_residual(const AmbientSpace& space, const Vector& coords, const SymForm& g_frame) {
  const int n = space.n();
  if (coords.size() != n + 2 || g_frame.dim() != n - 1) {
    throw DimensionMismatch("quadric_residual: expected n+2 coordinates and an (n-1)-form");
  }
  const Vector xi = coords.segment(1, n - 1);
  return evaluate_form(g_frame, xi) + coords[n] * coords[n] - 2.0 * coords[0] * coords[n + 1];
}

namespace {

struct GeneratorBuilder {
  const AmbientSpace& space;

  Matrix operator()(const Translation& t) const {
    const int n = space.n();
    if (t.v.size() != n) throw DimensionMismatch("translation vector of wrong dimension");
    // (m, s, p) -> (m, s + m v, p + G(v, s) + m G(v, v)/2)
    Matrix m = Matrix::Identity(n + 2, n + 2);
    m.block(1, 0, n, 1) = t.v;
    m.block(n + 1, 1, 1, n) = (space.metric_diagonal().array() * t.v.array()).matrix().transpose();
    m(n + 1, 0) = 0.5 * space.inner(t.v, t.v);
    return m;
  }

  Matrix operator()(const Rotation& r) const {
    const int n = space.n();
    if (r.i < 0 || r.j < 0 || r.i >= n || r.j >= n || r.i == r.j) {
      throw InvalidParameter("rotation plane axes must be distinct and in range");
    }
    Matrix m = Matrix::Identity(n + 2, n + 2);
    const int a = r.i + 1;
    const int b = r.j + 1;
    if (space.metric(r.i) == space.metric(r.j)) {
      const double c = std::cos(r.angle), s = std::sin(r.angle);
      m(a, a) = c;
      m(a, b) = -s;
      m(b, a) = s;
      m(b, b) = c;
    } else {
      const double c = std::cosh(r.angle), s = std::sinh(r.angle);
      m(a, a) = c;
      m(a, b) = s;
      m(b, a) = s;
      m(b, b) = c;
    }
    return m;
  }

  Matrix operator()(const Dilation& d) const {
    if (d.r == 0.0 || !std::isfinite(d.r)) throw InvalidParameter("dilation factor must be nonzero");
    const int n = space.n();
    Matrix m = Matrix::Identity(n + 2, n + 2);
    m(0, 0) = 1.0 / d.r;
    m(n + 1, n + 1) = d.r;
    return m;
  }

  Matrix operator()(const Inversion& inv) const {
    if (inv.radius_sq == 0.0 || !std::isfinite(inv.radius_sq)) {
      throw InvalidParameter("inversion radius_sq must be nonzero");
    }
    // (1, x, G/2) ~ (G/k, x, k/2): swap the null pair with weights 2/k, k/2.
    const int n = space.n();
    Matrix m = Matrix::Identity(n + 2, n + 2);
    m(0, 0) = 0.0;
    m(n + 1, n + 1) = 0.0;
    m(0, n + 1) = 2.0 / inv.radius_sq;
    m(n + 1, 0) = 0.5 * inv.radius_sq;
    return m;
  }
};

}  // namespace

MobiusMap make_generator(const AmbientSpace& space, const Generator& kind) {
  return MobiusMap{std::visit(GeneratorBuilder{space}, kind)};
}

MobiusMap compose(const MobiusMap& a, const MobiusMap& b) {
  if (a.matrix.cols() != b.matrix.rows()) throw DimensionMismatch("compose: size mismatch");
  return MobiusMap{a.matrix * b.matrix};
}

Vector apply_to_ambient_point(const AmbientSpace& space, const MobiusMap& m, const Vector& x) {
  return project_point(m(lift_point(space, x)));
}

double orthogonality_residual(const AmbientSpace& space, const MobiusMap& m) {
  const Matrix& q = space.gram();
  return (m.matrix.transpose() * q * m.matrix - q).norm() / q.norm();
}

double conformal_factor(const AmbientSpace& space, const MobiusMap& m, const Vector& x) {
  const Matrix& q = space.gram();
  // MᵀQM = μQ; Q² = I so μ = tr(Q MᵀQM) / (n+2).
  const double mu = (q * m.matrix.transpose() * q * m.matrix).trace() / space.ambient_dim();
  const LightConeVector y = m(lift_point(space, x));
  if (y.minus == 0.0) throw PointAtInfinity("point is sent to infinity");
  return std::sqrt(std::abs(mu)) / std::abs(y.minus);
}

MobiusMap nearest_mobius(const AmbientSpace& space, const Matrix& m, double tol) {
  const Matrix& q = space.gram();
  const int dim = space.ambient_dim();
  if (m.rows() != dim || m.cols() != dim) throw DimensionMismatch("nearest_mobius: wrong size");
  const Matrix e = q * m.transpose() * q * m;
  const double mu = e.trace() / dim;
  if (!(mu > 0.0) || (e - mu * Matrix::Identity(dim, dim)).norm() > tol * mu * std::sqrt(dim)) {
    throw InvalidParameter("matrix is not a positive multiple of a form-preserving map");
  }
  Matrix x = m / std::sqrt(mu);
  const Matrix id = Matrix::Identity(dim, dim);
  for (int it = 0; it < 20; ++it) {
    const Matrix ex = q * x.transpose() * q * x;
    const double err = (ex - id).norm();
    if (err < 1e-15) break;
    x = x * (3.0 * id - ex) * 0.5;
  }
  return MobiusMap{x};
}

}  // namespace confgeo
