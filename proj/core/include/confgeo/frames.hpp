#pragma once

#include <optional>
#include <vector>

#include "confgeo/hypersurface.hpp"
#include "confgeo/mobius.hpp"

namespace confgeo {

/// Conformal moving frame attached to a surface point.
///
/// Frame scalar products are `form_sign * <X, Y>`, where form_sign is the
/// normal's causal sign epsilon. For epsilon = -1 this is the ambient form with
/// its sign reversed, and A0 is the negated lift, so that (A0, A_{n+1}) = -1
/// and (A_n, A_n) = 1 hold for both causal types.
struct ConformalFrame {
  int order = 1;
  int form_sign = 1;
  double lambda_mean = 0.0;
  LightConeVector a0;               // the point
  std::vector<LightConeVector> ai;  // normal hyperspheres, A_i = ∂A0/∂u^i
  LightConeVector an;               // tangent hypersphere
  LightConeVector an1;              // second point, e_+
  std::optional<LightConeVector> cn;        // central tangent hypersphere (order 2)
  std::optional<LightConeVector> cn_partner;  // point paired with cn (order 2)

  int params() const { return static_cast<int>(ai.size()); }

  /// Active frame as rows of an (n+2)x(n+2) matrix: A0, A1..Ad, then An and
  /// A_{n+1} (order 1) or Cn and its partner (order 2).
  Matrix basis() const;

  double product(const AmbientSpace& space, const LightConeVector& x, const LightConeVector& y) const {
    return form_sign * incidence(space, x, y);
  }
};

/// Throws IsotropicPoint when `data` cannot come from a nonisotropic point.
ConformalFrame build_frame(const AmbientSpace& space, const SurfaceJet& jet, const FundamentalData& data,
                           int order = 1);

/// Cn = An + λ A0.
LightConeVector central_sphere(const ConformalFrame& frame, double lambda_mean);

/// Maximal violation of each family of frame conditions.
struct FrameResiduals {
  double null_points = 0.0;     // (A0,A0), (A_{n+1},A_{n+1})
  double incidence = 0.0;       // (A0,Ai), (A_{n+1},Ai), (A0,An), (A_{n+1},An)
  double orthogonality = 0.0;   // (Ai,An)
  double normalization = 0.0;   // (A0,A_{n+1}) + 1
  double metric = 0.0;          // (Ai,Aj) - g_ij
  double sphere_norm = 0.0;     // (An,An) - 1
  double second_order = 0.0;    // the same conditions for (Cn, partner); 0 at order 1

  double max() const;
};

FrameResiduals frame_residuals(const AmbientSpace& space, const ConformalFrame& frame, const SymForm& g);

/// Every frame vector mapped by m. Scalar products are unchanged.
ConformalFrame transform_frame(const MobiusMap& m, const ConformalFrame& frame);

/// Connection matrices Ω_k with ∂_k F = Ω_k F (F rows = frame vectors),
/// so omega[k](ξ, η) is ω_ξ^η evaluated on ∂/∂u^k.
struct ConnectionSlice {
  int order = 1;
  std::vector<Matrix> omega;

  int params() const { return static_cast<int>(omega.size()); }
};

/// Ω_k from central differences of the analytic frame field. Requires u to be
/// at least `step` inside the domain (DomainError otherwise); throws
/// SingularFrame when the frame matrix cannot be inverted.
ConnectionSlice connection_at(const Immersion& imm, const Vector& u, double step, int order = 1,
                              const GeometryTolerances& tol = {});

/// Residuals of the first-order relations among the connection forms.
struct ConnectionReport {
  double omega_0n = 0.0;        // max |ω_0^n|, zero on first-order frames
  double basis_forms = 0.0;     // max |ω_0^i(∂_k) - δ_ik|
  double relations = 0.0;       // max violation of the algebraic relations
  double metric_derivative = 0.0;  // dg_ij = g_ik ω_j^k + g_kj ω_i^k (FD in u)
  double second_form = 0.0;     // max |ω_i^n(∂_k) - λ_ik| (order 1) or h_ik (order 2)
  double symmetry = 0.0;        // max |ω_i^n(∂_k) - ω_k^n(∂_i)|

  double max() const;
};

ConnectionReport check_connection(const Immersion& imm, const Vector& u, double step, int order = 1,
                                  const GeometryTolerances& tol = {});

/// max over k < l of ‖∂_k Ω_l - ∂_l Ω_k - (Ω_k Ω_l - Ω_l Ω_k)‖_F with
/// nested central differences; O(step²).
double structure_residual(const Immersion& imm, const Vector& u, double step, int order = 1,
                          const GeometryTolerances& tol = {});

/// Default difference step for an immersion: 1e-4 times the domain extent.
double default_fd_step(const Immersion& imm);

}  // namespace confgeo
