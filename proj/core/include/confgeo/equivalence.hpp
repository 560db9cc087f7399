#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "confgeo/hypersurface.hpp"
#include "confgeo/mobius.hpp"

namespace confgeo {

/// Two immersions over one parameter chart; the correspondence is u -> u.
struct CorrespondencePair {
  Immersion v;
  Immersion v_bar;
  std::vector<Vector> grid;
};

/// How far ḡ = σ² g and h̄ = σ h are from holding at one point.
struct FactorResiduals {
  double sigma = 0.0;
  double g_residual = 0.0;  // max|ḡ - σ² g| / (σ² ‖g‖_F)
  double h_residual = 0.0;  // max|h̄ - σ h| / (|σ| ‖h‖_F)
};

/// σ from the determinant ratio, sign matched on the largest entry of h.
FactorResiduals factor_residuals(const FundamentalData& data, const FundamentalData& data_bar);

/// σ with ḡ = σ² g and h̄ = σ h to relative tolerance `tol`.
/// Throws UmbilicalPoint or NotProportional.
double sigma_factor(const FundamentalData& data, const FundamentalData& data_bar, double tol,
                    double umbilic_tol = kDefaultUmbilicTol);

struct EquivalenceConfig {
  double factor_tol = 1e-6;
  double umbilic_tol = kDefaultUmbilicTol;
  GeometryTolerances geometry;
  bool reconstruct = true;
};

struct PointFactor {
  Vector u;
  FactorResiduals residuals;
  bool proportional = false;
};

struct EquivalenceVerdict {
  bool equivalent = false;
  std::vector<PointFactor> points;
  double max_g_residual = 0.0;
  double max_h_residual = 0.0;
  bool sigma_sign_consistent = true;

  std::optional<MobiusMap> reconstructed;
  std::optional<double> map_residual;           // held-out, relative to the surface size
  std::optional<double> orthogonality;          // of the reconstructed map
  std::optional<std::string> reconstruction_error;

  std::optional<std::string> refusal_reason;

  static EquivalenceVerdict refused(std::string reason);
};

/// Decides whether v_bar = φ(v) for a Möbius transformation φ.
///
/// Throws DimensionTooSmall for n < 4, GridContainsUmbilics when either
/// surface has an umbilical grid point, and IsotropicPoint when a grid point
/// is isotropic. When the verdict is positive and reconstruction is enabled,
/// φ is fitted on the even grid indices and checked on the odd ones.
EquivalenceVerdict test_equivalence(const CorrespondencePair& pair, const EquivalenceConfig& config = {});

/// Explanation attached to every n = 3 refusal.
std::string small_dimension_reason(int n);

/// Möbius map with M lift(from_k) ∝ lift(to_k), by a normalised homogeneous
/// least-squares solve followed by projection onto the group.
/// Needs at least (n+2)² correspondences; throws DegenerateConfiguration.
MobiusMap reconstruct_mobius(const AmbientSpace& space, std::span<const Vector> from,
                             std::span<const Vector> to);

/// Relative least-squares residual of h² = g θ over symmetric θ, measured on
/// quartic monomial coefficients. Zero at umbilical points.
double lemma_residual(const FundamentalData& data, double umbilic_tol = kDefaultUmbilicTol);

}  // namespace confgeo
