#pragma once

#include <variant>

#include "confgeo/bilinear.hpp"

namespace confgeo {

/// Flat model R^{p,q} of the (pseudo)conformal space, together with its
/// light-cone ambient space R^{p+1,q+1}.
///
/// Ambient coordinates are ordered (minus, x_1..x_n, plus) in the null-pair
/// basis (e_-, e_1..e_n, e_+) with <e_-, e_+> = -1, so that
///   <X, Y> = G(x, y) - X.minus * Y.plus - X.plus * Y.minus.
class AmbientSpace {
 public:
  explicit AmbientSpace(Signature sig);
  AmbientSpace(int p, int q) : AmbientSpace(Signature{p, q}) {}

  const Signature& signature() const { return sig_; }
  int n() const { return sig_.dimension(); }
  int ambient_dim() const { return n() + 2; }

  /// Diagonal entry of G: +1 for the first p axes, -1 for the last q.
  double metric(int axis) const { return axis < sig_.p ? 1.0 : -1.0; }
  const Vector& metric_diagonal() const { return g_; }
  double inner(const Vector& x, const Vector& y) const;

  /// Gram matrix Q of the ambient bilinear form.
  const Matrix& gram() const { return q_; }

 private:
  Signature sig_;
  Vector g_;
  Matrix q_;
};

/// Vector of the ambient space. Null vectors are points, non-null vectors
/// are hyperspheres (up to scale).
struct LightConeVector {
  double minus = 0.0;
  Vector spatial;
  double plus = 0.0;

  static LightConeVector from_coords(const Vector& c);
  Vector coords() const;

  LightConeVector operator+(const LightConeVector& o) const;
  LightConeVector operator-(const LightConeVector& o) const;
  LightConeVector operator*(double s) const;
  friend LightConeVector operator*(double s, const LightConeVector& v) { return v * s; }
};

/// Linear map of the ambient space preserving the bilinear form.
struct MobiusMap {
  Matrix matrix;

  static MobiusMap identity(const AmbientSpace& space);
  LightConeVector operator()(const LightConeVector& v) const;
};

LightConeVector e_minus(const AmbientSpace& space);
LightConeVector e_plus(const AmbientSpace& space);

/// Darboux lift x -> e_- + x + G(x,x)/2 e_+.
LightConeVector lift_point(const AmbientSpace& space, const Vector& x);

/// Inverse of the lift (projective). Throws PointAtInfinity.
Vector project_point(const LightConeVector& X);

/// Hypersphere G(x - c, x - c) = radius_sq. <S, S> = radius_sq.
LightConeVector sphere_vector(const AmbientSpace& space, const Vector& center, double radius_sq);

/// Hyperplane G(x, normal) = offset, a sphere through the point at infinity.
LightConeVector plane_vector(const AmbientSpace& space, const Vector& normal, double offset);

/// Ambient scalar product <X, S>.
double incidence(const AmbientSpace& space, const LightConeVector& X, const LightConeVector& S);

/// g_ij x^i x^j + (x^n)^2 - 2 x^0 x^{n+1} for frame coordinates
/// (x^0, x^1..x^{n-1}, x^n, x^{n+1}).
double quadric_residual(const AmbientSpace& space, const Vector& coords, const SymForm& g_frame);

struct Translation {
  Vector v;
};
/// Rotation in the coordinate plane (i, j), 0-based axes. Mixing a positive
/// and a negative axis gives a hyperbolic rotation (boost).
struct Rotation {
  int i = 0;
  int j = 1;
  double angle = 0.0;
};
struct Dilation {
  double r = 1.0;
};
/// x -> radius_sq * x / G(x, x).
struct Inversion {
  double radius_sq = 1.0;
};
using Generator = std::variant<Translation, Rotation, Dilation, Inversion>;

MobiusMap make_generator(const AmbientSpace& space, const Generator& kind);

/// a after b.
MobiusMap compose(const MobiusMap& a, const MobiusMap& b);

/// project(M lift(x)). Throws PointAtInfinity when x is sent to infinity.
Vector apply_to_ambient_point(const AmbientSpace& space, const MobiusMap& m, const Vector& x);

/// ‖MᵀQM - Q‖_F / ‖Q‖_F.
double orthogonality_residual(const AmbientSpace& space, const MobiusMap& m);

/// Linear conformal factor of x -> apply(m, x): G(dφ, dφ) = factor² G(dx, dx).
/// Valid for any nonzero multiple of a form-preserving matrix.
double conformal_factor(const AmbientSpace& space, const MobiusMap& m, const Vector& x);

/// Rescales m so that MᵀQM = Q, then refines it onto the group by Newton
/// iteration. Throws InvalidParameter when MᵀQM is not a positive multiple
/// of Q to within `tol` relative.
MobiusMap nearest_mobius(const AmbientSpace& space, const Matrix& m, double tol = 1e-3);

}  // namespace confgeo
