#include "config.hpp"

#include <algorithm>
#include <cmath>

#include "confgeo/catalog.hpp"
#include "confgeo/errors.hpp"

namespace confgeo::cli {

ConfigError::ConfigError(std::string field, int line, const std::string& message)
    : std::runtime_error((line > 0 ? "line " + std::to_string(line) + ": " : std::string()) +
                         (field.empty() ? std::string() : field + ": ") + message),
      field_(std::move(field)),
      line_(line) {}

namespace {

int line_of(const std::string& text, std::size_t pos) {
  return 1 + static_cast<int>(std::count(text.begin(), text.begin() + static_cast<long>(std::min(pos, text.size())), '\n'));
}

/// Walks the document tracking the dotted path of the value being read and
/// a best-effort source line, found by locating the quoted keys in order.
class Reader {
 public:
  explicit Reader(const std::string& text) : text_(text) {}

  class Scope {
   public:
    Scope(Reader& r, std::size_t keys, std::size_t pos) : r_(r), keys_(keys), pos_(pos) {}
    Scope(const Scope&) = delete;
    Scope& operator=(const Scope&) = delete;
    ~Scope() {
      r_.path_.resize(keys_);
      r_.pos_ = pos_;
    }

   private:
    Reader& r_;
    std::size_t keys_, pos_;
  };

  Scope enter(const std::string& key) {
    const std::size_t keys = path_.size(), pos = pos_;
    path_.push_back(key);
    const auto at = text_.find('"' + key + '"', pos_);
    if (at != std::string::npos) pos_ = at;
    return Scope(*this, keys, pos);
  }

  Scope index(std::size_t i) {
    const std::size_t keys = path_.size(), pos = pos_;
    path_.push_back("[" + std::to_string(i) + "]");
    return Scope(*this, keys, pos);
  }

  std::string path() const {
    std::string out;
    for (const auto& k : path_) {
      if (!out.empty() && k.front() != '[') out += '.';
      out += k;
    }
    return out;
  }

  [[noreturn]] void fail(const std::string& message) const { throw ConfigError(path(), line_of(text_, pos_), message); }

  double number(const Json& j, bool positive = false) const {
    if (!j.is_number()) fail("expected a number");
    const double v = j.get<double>();
    if (!std::isfinite(v)) fail("number must be finite");
    if (positive && !(v > 0.0)) fail("must be positive");
    return v;
  }

  int integer(const Json& j) const {
    if (!j.is_number_integer()) fail("expected an integer");
    return j.get<int>();
  }

  const Json& array(const Json& j) const {
    if (!j.is_array()) fail("expected an array");
    return j;
  }

  const Json& object(const Json& j) const {
    if (!j.is_object()) fail("expected an object");
    return j;
  }

  std::string string(const Json& j) const {
    if (!j.is_string()) fail("expected a string");
    return j.get<std::string>();
  }

  Vector vector(const Json& j, int expected) {
    array(j);
    if (static_cast<int>(j.size()) != expected) fail("expected " + std::to_string(expected) + " numbers");
    Vector v(expected);
    for (int i = 0; i < expected; ++i) {
      auto s = index(static_cast<std::size_t>(i));
      v[i] = number(j[static_cast<std::size_t>(i)]);
    }
    return v;
  }

  void only_keys(const Json& obj, std::initializer_list<const char*> allowed) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
      if (std::none_of(allowed.begin(), allowed.end(), [&](const char* a) { return it.key() == a; })) {
        auto s = enter(it.key());
        fail("unknown field");
      }
    }
  }

 private:
  const std::string& text_;
  std::vector<std::string> path_;
  std::size_t pos_ = 0;
};

Generator read_generator(Reader& r, const Json& j, int n) {
  r.object(j);
  if (j.size() != 1) r.fail("a generator has exactly one of translation, rotation, dilation, inversion");
  const std::string kind = j.begin().key();
  auto s = r.enter(kind);
  const Json& v = j.begin().value();
  if (kind == "translation") return Translation{r.vector(v, n)};
  if (kind == "dilation") return Dilation{r.number(v, true)};
  if (kind == "inversion") return Inversion{r.number(v, true)};
  if (kind == "rotation") {
    r.object(v);
    r.only_keys(v, {"axes", "angle"});
    if (!v.contains("axes") || !v.contains("angle")) r.fail("rotation needs axes and angle");
    int a = 0, b = 0;
    {
      auto sa = r.enter("axes");
      r.array(v["axes"]);
      if (v["axes"].size() != 2) r.fail("expected two axis numbers");
      a = r.integer(v["axes"][0]);
      b = r.integer(v["axes"][1]);
      if (a < 1 || b < 1 || a > n || b > n || a == b) r.fail("axes must be distinct and in 1.." + std::to_string(n));
    }
    auto sg = r.enter("angle");
    return Rotation{a - 1, b - 1, r.number(v["angle"])};
  }
  r.fail("unknown generator '" + kind + "'");
}

std::vector<Generator> read_transform(Reader& r, const Json& j, int n) {
  r.array(j);
  std::vector<Generator> out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    auto s = r.index(i);
    out.push_back(read_generator(r, j[i], n));
  }
  return out;
}

ParameterBox read_domain(Reader& r, const Json& j, int d) {
  r.array(j);
  if (static_cast<int>(j.size()) != d) r.fail("expected " + std::to_string(d) + " ranges");
  ParameterBox box;
  for (int i = 0; i < d; ++i) {
    auto s = r.index(static_cast<std::size_t>(i));
    const Json& range = j[static_cast<std::size_t>(i)];
    r.array(range);
    if (range.size() != 2) r.fail("a range is [lo, hi]");
    const double lo = r.number(range[0]), hi = r.number(range[1]);
    if (!(lo < hi)) r.fail("range must have lo < hi");
    box.ranges.emplace_back(lo, hi);
  }
  return box;
}

Immersion read_surface(Reader& r, const Json& j, const AmbientSpace& space) {
  r.object(j);
  r.only_keys(j, {"catalog", "components", "domain", "name", "transform"});
  const int d = space.n() - 1;
  Immersion imm{space, {}, {}, {}};
  if (j.contains("catalog") == j.contains("components")) r.fail("give exactly one of catalog or components");
  if (j.contains("catalog")) {
    auto s = r.enter("catalog");
    const std::string name = r.string(j["catalog"]);
    const auto names = catalog_names();
    if (std::find(names.begin(), names.end(), name) == names.end()) r.fail("unknown catalog surface '" + name + "'");
    imm = catalog_immersion(name, space);
  } else {
    auto s = r.enter("components");
    r.array(j["components"]);
    if (static_cast<int>(j["components"].size()) != space.n()) {
      r.fail("expected " + std::to_string(space.n()) + " component expressions");
    }
    if (!j.contains("domain")) r.fail("components need a domain");
    for (std::size_t a = 0; a < j["components"].size(); ++a) {
      auto sa = r.index(a);
      const std::string text = r.string(j["components"][a]);
      try {
        imm.components.push_back(parse(text, d));
      } catch (const Error& e) {
        r.fail(std::string(e.kind()) + ": " + e.what());
      }
    }
    imm.name = "custom";
  }
  if (j.contains("domain")) {
    auto s = r.enter("domain");
    imm.domain = read_domain(r, j["domain"], d);
  }
  if (j.contains("name")) {
    auto s = r.enter("name");
    imm.name = r.string(j["name"]);
  }
  if (j.contains("transform")) {
    auto s = r.enter("transform");
    const auto gens = read_transform(r, j["transform"], space.n());
    imm = transform_immersion(compose_transform(space, gens), imm);
  }
  return imm;
}

}  // namespace

MobiusMap compose_transform(const AmbientSpace& space, const std::vector<Generator>& gens) {
  MobiusMap m = MobiusMap::identity(space);
  for (const auto& g : gens) m = compose(make_generator(space, g), m);
  return m;
}

Json generator_to_json(const Generator& g) {
  return std::visit(
      [](const auto& v) -> Json {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, Translation>) {
          return Json{{"translation", std::vector<double>(v.v.data(), v.v.data() + v.v.size())}};
        } else if constexpr (std::is_same_v<T, Rotation>) {
          return Json{{"rotation", Json{{"axes", {v.i + 1, v.j + 1}}, {"angle", v.angle}}}};
        } else if constexpr (std::is_same_v<T, Dilation>) {
          return Json{{"dilation", v.r}};
        } else {
          return Json{{"inversion", v.radius_sq}};
        }
      },
      g);
}

RunConfig parse_config(const std::string& text) {
  Json doc;
  try {
    doc = Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw ConfigError("", line_of(text, e.byte > 0 ? e.byte - 1 : 0), e.what());
  }
  Reader r(text);
  r.object(doc);
  r.only_keys(doc, {"signature", "surface", "surface_bar", "grid", "tolerances", "directions", "transform",
                    "reconstruct", "description"});

  RunConfig cfg;
  cfg.echo = doc;
  {
    if (!doc.contains("signature")) r.fail("missing field 'signature'");
    auto s = r.enter("signature");
    r.array(doc["signature"]);
    if (doc["signature"].size() != 2) r.fail("signature is [p, q]");
    cfg.signature = {r.integer(doc["signature"][0]), r.integer(doc["signature"][1])};
    if (cfg.signature.p < 1 || cfg.signature.q < 0) r.fail("need p >= 1 and q >= 0");
    if (cfg.signature.dimension() < 3) r.fail("need p + q >= 3");
  }
  const AmbientSpace space = cfg.space();
  const int d = space.n() - 1;

  if (!doc.contains("surface")) r.fail("missing field 'surface'");
  {
    auto s = r.enter("surface");
    cfg.surface = read_surface(r, doc["surface"], space);
  }
  if (doc.contains("surface_bar")) {
    auto s = r.enter("surface_bar");
    cfg.surface_bar = read_surface(r, doc["surface_bar"], space);
  }

  cfg.grid.assign(static_cast<std::size_t>(d), 5);
  if (doc.contains("grid")) {
    auto s = r.enter("grid");
    const Json& g = doc["grid"];
    if (g.is_number_integer()) {
      cfg.grid.assign(static_cast<std::size_t>(d), r.integer(g));
    } else {
      r.array(g);
      if (static_cast<int>(g.size()) != d) r.fail("expected one resolution per parameter (" + std::to_string(d) + ")");
      for (std::size_t i = 0; i < g.size(); ++i) {
        auto si = r.index(i);
        cfg.grid[i] = r.integer(g[i]);
      }
    }
    if (std::any_of(cfg.grid.begin(), cfg.grid.end(), [](int k) { return k < 2; })) r.fail("resolution must be >= 2");
  }

  if (doc.contains("tolerances")) {
    auto s = r.enter("tolerances");
    const Json& t = r.object(doc["tolerances"]);
    r.only_keys(t, {"umbilic_tol", "factor_tol", "det_eps", "null_tol", "fd_step", "structure_step"});
    auto read = [&](const char* key, double& slot) {
      if (!t.contains(key)) return;
      auto sk = r.enter(key);
      slot = r.number(t[key], true);
    };
    read("umbilic_tol", cfg.tolerances.umbilic_tol);
    read("factor_tol", cfg.tolerances.factor_tol);
    read("det_eps", cfg.tolerances.det_eps);
    read("null_tol", cfg.tolerances.null_tol);
    read("structure_step", cfg.tolerances.structure_step);
    if (t.contains("fd_step")) {
      double v = 0;
      read("fd_step", v);
      cfg.tolerances.fd_step = v;
    }
  }

  if (doc.contains("directions")) {
    auto s = r.enter("directions");
    const Json& dj = doc["directions"];
    if (dj.is_number_integer()) {
      cfg.direction_count = r.integer(dj);
      if (cfg.direction_count < 0) r.fail("direction count must be >= 0");
    } else {
      r.array(dj);
      for (std::size_t i = 0; i < dj.size(); ++i) {
        auto si = r.index(i);
        cfg.directions.push_back(r.vector(dj[i], d));
        if (cfg.directions.back().norm() == 0.0) r.fail("direction must be nonzero");
      }
      cfg.direction_count = static_cast<int>(cfg.directions.size());
    }
  }

  if (doc.contains("transform")) {
    auto s = r.enter("transform");
    cfg.transform = read_transform(r, doc["transform"], space.n());
  }

  if (doc.contains("reconstruct")) {
    auto s = r.enter("reconstruct");
    if (!doc["reconstruct"].is_boolean()) r.fail("expected true or false");
    cfg.reconstruct = doc["reconstruct"].get<bool>();
  }
  return cfg;
}

}  // namespace confgeo::cli
