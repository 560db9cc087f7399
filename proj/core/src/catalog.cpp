#include "confgeo/catalog.hpp"

#include <cmath>
#include <cstdio>

#include "confgeo/errors.hpp"

namespace confgeo {

namespace {

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string var(int i) { return "u" + std::to_string(i); }

// Σ c_i * u_i^k, skipping zero coefficients; "0" when empty.
template <class Coef>
std::string power_sum(int d, int k, Coef coef) {
  std::string out;
  for (int i = 1; i <= d; ++i) {
    const double c = coef(i);
    if (c == 0.0) continue;
    if (!out.empty()) out += c < 0.0 ? " - " : " + ";
    else if (c < 0.0) out += "-";
    out += num(std::abs(c)) + "*" + var(i) + "^" + std::to_string(k);
  }
  return out.empty() ? "0" : out;
}

std::vector<std::string> graph(int d, const std::string& f) {
  std::vector<std::string> comps;
  for (int i = 1; i <= d; ++i) comps.push_back(var(i));
  comps.push_back(f);
  return comps;
}

}  // namespace

std::vector<std::string> catalog_names() {
  return {"paraboloid", "graph-cubic", "sphere-stereographic", "ellipsoid-graph", "pseudo-graph"};
}

std::vector<std::string> catalog_components(const std::string& name, const AmbientSpace& space) {
  const int n = space.n();
  const int d = n - 1;
  if (d < 1) throw InvalidParameter("catalog surfaces need n >= 2");

  if (name == "paraboloid") {
    return graph(d, power_sum(d, 2, [](int) { return 0.5; }));
  }
  if (name == "graph-cubic") {
    return graph(d, power_sum(d, 2, [](int i) { return 0.5 * i; }) + " + " +
                        power_sum(d, 3, [](int) { return 1.0 / 6.0; }));
  }
  if (name == "pseudo-graph") {
    return graph(d, power_sum(d, 2, [](int i) { return i / 6.0; }) + " + " +
                        power_sum(d, 3, [](int) { return 1.0 / 18.0; }));
  }
  if (name == "ellipsoid-graph") {
    const std::string s = power_sum(d, 2, [](int i) {
      const double a = 1.0 + 0.5 * i;
      return 1.0 / (a * a);
    });
    return graph(d, "1 - sqrt(1 - (" + s + "))");
  }
  if (name == "sphere-stereographic") {
    const std::string s = "(" + power_sum(d, 2, [&](int i) { return space.metric(i); }) + ")";
    std::vector<std::string> comps;
    comps.push_back("(" + s + " - 1)/(" + s + " + 1)");
    for (int i = 1; i <= d; ++i) comps.push_back("2*" + var(i) + "/(" + s + " + 1)");
    return comps;
  }
  throw InvalidParameter("unknown catalog surface '" + name + "'");
}

ParameterBox catalog_domain(const std::string& name, int params) {
  if (name == "sphere-stereographic") return ParameterBox::cube(params, -0.8, 0.8);
  for (const auto& known : catalog_names()) {
    if (known == name) return ParameterBox::cube(params, -0.5, 0.5);
  }
  throw InvalidParameter("unknown catalog surface '" + name + "'");
}

Immersion catalog_immersion(const std::string& name, const AmbientSpace& space) {
  return make_immersion(space, catalog_components(name, space), catalog_domain(name, space.n() - 1),
                        name);
}

}  // namespace confgeo
