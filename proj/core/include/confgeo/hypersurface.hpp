#pragma once

#include <string>
#include <utility>
#include <vector>

#include "confgeo/bilinear.hpp"
#include "confgeo/expr.hpp"
#include "confgeo/mobius.hpp"

namespace confgeo {

/// Axis-aligned box of parameter ranges.
struct ParameterBox {
  std::vector<std::pair<double, double>> ranges;

  int dim() const { return static_cast<int>(ranges.size()); }
  /// True when every coordinate lies in [lo + margin, hi - margin].
  bool contains(const Vector& u, double margin = 0.0) const;
  /// Largest side length.
  double extent() const;

  static ParameterBox cube(int dim, double lo, double hi);
};

/// Regular grid over a parameter box, `resolution[i] >= 2` points on axis i,
/// ordered row-major (last axis fastest).
std::vector<Vector> grid_points(const ParameterBox& box, const std::vector<int>& resolution);

/// Hypersurface patch u -> x(u) in the flat model R^{p,q}, u in R^{n-1}.
struct Immersion {
  AmbientSpace space;
  std::vector<Expr> components;
  ParameterBox domain;
  std::string name;

  int params() const { return space.n() - 1; }
};

/// Parses one expression per ambient coordinate. Throws DimensionMismatch
/// when the component or domain counts do not match the signature.
Immersion make_immersion(const AmbientSpace& space, const std::vector<std::string>& components,
                         ParameterBox domain, std::string name = {});

/// Position, first and second partial derivatives at one parameter point.
struct SurfaceJet {
  Vector u;
  Vector x;
  Matrix tangents;             // n x d, column i = ∂x/∂u^i
  std::vector<Vector> second;  // d*d entries, index i*d + j, symmetric in (i, j)

  int params() const { return static_cast<int>(tangents.cols()); }
  const Vector& second_partial(int i, int j) const { return second[i * params() + j]; }
};

/// Throws DomainError when u is outside the immersion's domain box, or when a
/// component cannot be evaluated there.
SurfaceJet jet_at(const Immersion& imm, const Vector& u);

/// Same as jet_at without the domain check; finite-difference stencils use it.
SurfaceJet jet_at_unchecked(const Immersion& imm, const Vector& u);

struct GeometryTolerances {
  double det_eps = kDefaultDetEps;  // relative, see degeneracy_threshold
  double null_tol = 1e-12;          // |G(ν,ν)| / |ν|² below this is a null normal
};

/// First and second fundamental forms at one point.
///
/// When the normal is timelike (epsilon = -1) the first form is stored with
/// its sign flipped, g = -G(t_i, t_j), so that the tangent hypersphere is
/// normalised to unit length.
struct FundamentalData {
  SymForm g;
  SymForm g_inv;
  Vector normal;
  int epsilon = 1;
  SymForm lambda;
  double lambda_mean = 0.0;
  SymForm h;

  int params() const { return g.dim(); }
};

FundamentalData fundamental_forms(const AmbientSpace& space, const SurfaceJet& jet,
                                  const GeometryTolerances& tol = {});

/// Conformal quadratic element h(w)² / g(w). Throws IsotropicDirection.
double invariant_I(const FundamentalData& data, const Vector& w);

/// The pair (g, h) with the weight normalised away: |det g_hat| = 1 and the
/// first significant entry of h_hat (row-major) non-negative.
struct InvariantElement {
  SymForm g_hat;
  SymForm h_hat;
  int gauge_sign = 1;
};

InvariantElement canonical_element(const FundamentalData& data);

constexpr double kDefaultUmbilicTol = 1e-8;

/// ‖h‖_F / ‖g‖_F < tol.
bool is_umbilical(const FundamentalData& data, double tol = kDefaultUmbilicTol);

/// Analytic composition φ ∘ x: each component becomes
/// (row_a · X(u)) / (row_0 · X(u)) with X the lifted expression vector.
Immersion transform_immersion(const MobiusMap& m, const Immersion& imm);

}  // namespace confgeo
