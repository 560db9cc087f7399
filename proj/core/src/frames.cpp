#include "confgeo/frames.hpp"

#include <algorithm>
#include <cmath>

#include "confgeo/errors.hpp"

namespace confgeo {

namespace {

void raise(double& acc, double v) { acc = std::max(acc, std::abs(v)); }

LightConeVector sphere_through(const AmbientSpace& space, const Vector& x, const Vector& direction) {
  // direction + G(x, direction) e_+ contains lift(x) and e_+.
  return LightConeVector{0.0, direction, space.inner(x, direction)};
}

}  // namespace

Matrix ConformalFrame::basis() const {
  const Eigen::Index dim = a0.spatial.size() + 2;
  Matrix f(dim, dim);
  f.row(0) = a0.coords().transpose();
  for (int i = 0; i < params(); ++i) f.row(i + 1) = ai[i].coords().transpose();
  if (order == 2) {
    f.row(dim - 2) = cn->coords().transpose();
    f.row(dim - 1) = cn_partner->coords().transpose();
  } else {
    f.row(dim - 2) = an.coords().transpose();
    f.row(dim - 1) = an1.coords().transpose();
  }
  return f;
}

ConformalFrame build_frame(const AmbientSpace& space, const SurfaceJet& jet, const FundamentalData& data,
                           int order) {
  if (order != 1 && order != 2) throw InvalidParameter("frame order must be 1 or 2");
  if (data.g.dim() != jet.params() || data.g.dim() != space.n() - 1) {
    throw DimensionMismatch("fundamental data does not match the jet");
  }
  if (!(std::abs(data.g.determinant()) > degeneracy_threshold(data.g))) {
    throw IsotropicPoint("cannot build a frame at an isotropic point");
  }
  ConformalFrame f;
  f.order = order;
  f.form_sign = data.epsilon;
  f.lambda_mean = data.lambda_mean;
  const double s = data.epsilon;
  f.a0 = lift_point(space, jet.x) * s;
  for (int i = 0; i < jet.params(); ++i) {
    f.ai.push_back(sphere_through(space, jet.x, jet.tangents.col(i)) * s);
  }
  f.an = sphere_through(space, jet.x, data.normal);
  f.an1 = e_plus(space);
  if (order == 2) {
    const double lam = data.lambda_mean;
    f.cn = central_sphere(f, lam);
    // Keeps (P, P) = 0, (A0, P) = -1 and (P, Cn) = 0.
    f.cn_partner = f.an1 + f.an * lam + f.a0 * (0.5 * lam * lam);
  }
  return f;
}

LightConeVector central_sphere(const ConformalFrame& frame, double lambda_mean) {
  return frame.an + frame.a0 * lambda_mean;
}

double FrameResiduals::max() const {
  return std::max({null_points, incidence, orthogonality, normalization, metric, sphere_norm, second_order});
}

FrameResiduals frame_residuals(const AmbientSpace& space, const ConformalFrame& frame, const SymForm& g) {
  auto dot = [&](const LightConeVector& x, const LightConeVector& y) { return frame.product(space, x, y); };
  const int d = frame.params();
  if (g.dim() != d) throw DimensionMismatch("frame_residuals: form dimension");

  FrameResiduals r;
  raise(r.null_points, dot(frame.a0, frame.a0));
  raise(r.null_points, dot(frame.an1, frame.an1));
  raise(r.normalization, dot(frame.a0, frame.an1) + 1.0);
  raise(r.sphere_norm, dot(frame.an, frame.an) - 1.0);
  raise(r.incidence, dot(frame.a0, frame.an));
  raise(r.incidence, dot(frame.an1, frame.an));
  for (int i = 0; i < d; ++i) {
    raise(r.incidence, dot(frame.a0, frame.ai[i]));
    raise(r.incidence, dot(frame.an1, frame.ai[i]));
    raise(r.orthogonality, dot(frame.ai[i], frame.an));
    for (int j = 0; j < d; ++j) raise(r.metric, dot(frame.ai[i], frame.ai[j]) - g(i, j));
  }
  if (frame.order == 2 && frame.cn && frame.cn_partner) {
    const auto& c = *frame.cn;
    const auto& p = *frame.cn_partner;
    raise(r.second_order, dot(c, c) - 1.0);
    raise(r.second_order, dot(c, frame.a0));
    raise(r.second_order, dot(c, p));
    raise(r.second_order, dot(p, p));
    raise(r.second_order, dot(frame.a0, p) + 1.0);
    for (int i = 0; i < d; ++i) {
      raise(r.second_order, dot(c, frame.ai[i]));
      raise(r.second_order, dot(p, frame.ai[i]));
    }
  }
  return r;
}

ConformalFrame transform_frame(const MobiusMap& m, const ConformalFrame& frame) {
  ConformalFrame out = frame;
  out.a0 = m(frame.a0);
  for (auto& v : out.ai) v = m(v);
  out.an = m(frame.an);
  out.an1 = m(frame.an1);
  if (frame.cn) out.cn = m(*frame.cn);
  if (frame.cn_partner) out.cn_partner = m(*frame.cn_partner);
  return out;
}

// ---------------------------------------------------------------------------
// Connection forms

namespace {

Matrix frame_matrix(const Immersion& imm, const Vector& u, int order, const GeometryTolerances& tol) {
  const SurfaceJet jet = jet_at_unchecked(imm, u);
  const FundamentalData data = fundamental_forms(imm.space, jet, tol);
  return build_frame(imm.space, jet, data, order).basis();
}

Matrix solve_right(const Matrix& f, const Matrix& df) {
  // Ω F = dF  <=>  Fᵀ Ωᵀ = dFᵀ
  Eigen::PartialPivLU<Matrix> lu(f.transpose());
  if (!(lu.rcond() > 1e-13)) throw SingularFrame("frame matrix is singular");
  return lu.solve(df.transpose()).transpose();
}

Matrix omega_direction(const Immersion& imm, const Vector& u, int k, double step, int order,
                       const GeometryTolerances& tol, const Matrix& f_at_u) {
  Vector up = u, um = u;
  up[k] += step;
  um[k] -= step;
  const Matrix df = (frame_matrix(imm, up, order, tol) - frame_matrix(imm, um, order, tol)) / (2.0 * step);
  return solve_right(f_at_u, df);
}

void require_interior(const Immersion& imm, const Vector& u, double step) {
  if (!(step > 0.0)) throw InvalidParameter("difference step must be positive");
  if (!imm.domain.contains(u, step)) {
    throw DomainError("point is closer than one difference step to the domain boundary");
  }
}

}  // namespace

ConnectionSlice connection_at(const Immersion& imm, const Vector& u, double step, int order,
                              const GeometryTolerances& tol) {
  require_interior(imm, u, step);
  const Matrix f = frame_matrix(imm, u, order, tol);
  ConnectionSlice slice;
  slice.order = order;
  for (int k = 0; k < imm.params(); ++k) slice.omega.push_back(omega_direction(imm, u, k, step, order, tol, f));
  return slice;
}

double ConnectionReport::max() const {
  return std::max({omega_0n, basis_forms, relations, metric_derivative, second_form, symmetry});
}

ConnectionReport check_connection(const Immersion& imm, const Vector& u, double step, int order,
                                  const GeometryTolerances& tol) {
  const ConnectionSlice slice = connection_at(imm, u, step, order, tol);
  const FundamentalData data = fundamental_forms(imm.space, jet_at(imm, u), tol);
  const int d = imm.params();
  const int n = d + 1;
  const Matrix& g = data.g.matrix();
  const Matrix& ginv = data.g_inv.matrix();
  const SymForm& target = order == 2 ? data.h : data.lambda;

  ConnectionReport r;
  for (int k = 0; k < d; ++k) {
    const Matrix& w = slice.omega[k];
    raise(r.omega_0n, w(0, n));
    for (int i = 1; i <= d; ++i) raise(r.basis_forms, w(0, i) - (i - 1 == k ? 1.0 : 0.0));

    raise(r.relations, w(0, n + 1));
    raise(r.relations, w(n + 1, 0));
    raise(r.relations, w(0, 0) + w(n + 1, n + 1));
    raise(r.relations, w(n, n + 1) - w(0, n));
    raise(r.relations, w(n + 1, n) - w(n, 0));
    raise(r.relations, w(n, n));
    for (int i = 0; i < d; ++i) {
      double a = w(i + 1, n + 1), b = w(n + 1, i + 1), c = w(i + 1, n);
      for (int j = 0; j < d; ++j) {
        a -= g(i, j) * w(0, j + 1);
        b -= ginv(i, j) * w(j + 1, 0);
        c += g(i, j) * w(n, j + 1);
      }
      raise(r.relations, a);
      raise(r.relations, b);
      raise(r.relations, c);
    }

    Vector up = u, um = u;
    up[k] += step;
    um[k] -= step;
    const Matrix dg = (fundamental_forms(imm.space, jet_at(imm, up), tol).g.matrix() -
                       fundamental_forms(imm.space, jet_at(imm, um), tol).g.matrix()) /
                      (2.0 * step);
    for (int i = 0; i < d; ++i) {
      for (int j = 0; j < d; ++j) {
        double rhs = 0.0;
        for (int l = 0; l < d; ++l) rhs += g(i, l) * w(j + 1, l + 1) + g(l, j) * w(i + 1, l + 1);
        raise(r.metric_derivative, dg(i, j) - rhs);
      }
    }

    for (int i = 0; i < d; ++i) {
      raise(r.second_form, w(i + 1, n) - target(i, k));
      raise(r.symmetry, w(i + 1, n) - slice.omega[i](k + 1, n));
    }
  }
  return r;
}

double structure_residual(const Immersion& imm, const Vector& u, double step, int order,
                          const GeometryTolerances& tol) {
  require_interior(imm, u, step);
  const int d = imm.params();
  const ConnectionSlice at_u = connection_at(imm, u, step, order, tol);
  double worst = 0.0;
  for (int k = 0; k < d; ++k) {
    for (int l = k + 1; l < d; ++l) {
      // ∂_k Ω_l and ∂_l Ω_k by central differences of Ω at shifted points.
      auto shifted = [&](int axis, double delta, int dir) {
        Vector v = u;
        v[axis] += delta;
        return omega_direction(imm, v, dir, step, order, tol, frame_matrix(imm, v, order, tol));
      };
      const Matrix dk_wl = (shifted(k, step, l) - shifted(k, -step, l)) / (2.0 * step);
      const Matrix dl_wk = (shifted(l, step, k) - shifted(l, -step, k)) / (2.0 * step);
      const Matrix& wk = at_u.omega[k];
      const Matrix& wl = at_u.omega[l];
      worst = std::max(worst, (dk_wl - dl_wk - (wk * wl - wl * wk)).norm());
    }
  }
  return worst;
}

double default_fd_step(const Immersion& imm) { return 1e-4 * imm.domain.extent(); }

}  // namespace confgeo
