#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "confgeo/hypersurface.hpp"
#include "confgeo/mobius.hpp"

namespace confgeo::cli {

using Json = nlohmann::ordered_json;

/// Invalid run configuration. `field` is a dotted path such as
/// "surface.components[2]"; `line` is 1-based, 0 when unknown.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string field, int line, const std::string& message);
  const std::string& field() const noexcept { return field_; }
  int line() const noexcept { return line_; }

 private:
  std::string field_;
  int line_;
};

struct Tolerances {
  double umbilic_tol = kDefaultUmbilicTol;
  double factor_tol = 1e-6;
  double det_eps = kDefaultDetEps;
  double null_tol = 1e-12;
  std::optional<double> fd_step;  // default: default_fd_step(immersion)
  double structure_step = 1e-2;
};

struct RunConfig {
  Signature signature;
  Immersion surface{AmbientSpace(3, 0), {}, {}, {}};
  std::optional<Immersion> surface_bar;
  std::vector<int> grid;
  Tolerances tolerances;
  int direction_count = 3;
  std::vector<Vector> directions;  // explicit directions, used instead of random ones
  std::vector<Generator> transform;
  bool reconstruct = true;
  Json echo;

  AmbientSpace space() const { return AmbientSpace(signature); }
};

/// Parses and validates a JSON configuration document.
RunConfig parse_config(const std::string& text);

/// Generators of a "transform" list, composed so that the first entry acts
/// first.
MobiusMap compose_transform(const AmbientSpace& space, const std::vector<Generator>& gens);

/// JSON description of a generator, the inverse of the config syntax.
Json generator_to_json(const Generator& g);

}  // namespace confgeo::cli
