#pragma once

#include <string>
#include <vector>

#include "confgeo/hypersurface.hpp"

namespace confgeo {

/// Built-in hypersurfaces, defined for any signature with n = p + q >= 2.
/// Parameters are u1..ud with d = n - 1 and |u|² = Σ u_i².
///
///   paraboloid            x = (u, |u|²/2), domain [-0.5, 0.5]^d.
///                         Umbilic only at u = 0 when q = 0.
///   graph-cubic           x = (u, f), f = Σ (i/2) u_i² + Σ u_i³/6,
///                         domain [-0.5, 0.5]^d.
///   sphere-stereographic  S = Σ G_{i+1} u_i²; x_1 = (S - 1)/(S + 1),
///                         x_{i+1} = 2 u_i/(S + 1); G(x, x) = 1.
///                         Domain [-0.8, 0.8]^d (q = 0: the unit sphere).
///   ellipsoid-graph       x = (u, 1 - sqrt(1 - Σ u_i²/a_i²)), a_i = 1 + i/2,
///                         domain [-0.5, 0.5]^d.
///   pseudo-graph          x = (u, f), f = Σ (i/6) u_i² + Σ u_i³/18,
///                         domain [-0.5, 0.5]^d. |∇f| < 1 on the domain, so
///                         with a negative last axis it is spacelike and its
///                         normal is timelike.
///
/// With q > 0 the paraboloid and graph-cubic can reach the isotropic locus
/// det g = 0 inside their domains; the other three stay nonisotropic.
std::vector<std::string> catalog_names();

/// Component expressions of a catalog surface. Throws InvalidParameter for
/// an unknown name.
std::vector<std::string> catalog_components(const std::string& name, const AmbientSpace& space);

ParameterBox catalog_domain(const std::string& name, int params);

Immersion catalog_immersion(const std::string& name, const AmbientSpace& space);

}  // namespace confgeo
