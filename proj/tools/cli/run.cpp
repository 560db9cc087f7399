#include "run.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <iomanip>
#include <limits>
#include <random>
#include <sstream>

#include "confgeo/equivalence.hpp"
#include "confgeo/errors.hpp"
#include "confgeo/frames.hpp"
#include "confgeo/parallel.hpp"

namespace confgeo::cli {

namespace {

Json to_json(const Vector& v) { return Json(std::vector<double>(v.data(), v.data() + v.size())); }

Json to_json(const Matrix& m) {
  Json rows = Json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) rows.push_back(to_json(Vector(m.row(r).transpose())));
  return rows;
}

Json to_json(const SymForm& f) { return to_json(f.matrix()); }

Json domain_json(const ParameterBox& box) {
  Json out = Json::array();
  for (const auto& [lo, hi] : box.ranges) out.push_back({lo, hi});
  return out;
}

std::string utc_now() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::ostringstream s;
  s << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return s.str();
}

Json header(Command c, const RunOptions& opt) {
  Json r;
  r["tool"] = kToolName;
  r["version"] = kToolVersion;
  r["command"] = command_name(c);
  r["seed"] = opt.seed;
  if (opt.timestamp) r["timestamp"] = utc_now();
  return r;
}

Json error_entry(const char* kind, const std::string& message) {
  return Json{{"kind", kind}, {"message", message}};
}

Json error_entry(const Error& e) { return error_entry(e.kind(), e.what()); }

Json located(Json entry, std::size_t index, const Vector& u) {
  entry["index"] = index;
  entry["u"] = to_json(u);
  return entry;
}

/// Per-point result slot, filled concurrently and assembled in grid order.
struct Slot {
  Json record;
  std::vector<Json> errors;
};

GeometryTolerances geometry(const RunConfig& cfg) {
  return GeometryTolerances{cfg.tolerances.det_eps, cfg.tolerances.null_tol};
}

RunResult assemble(Json record, std::vector<Slot>& slots, Json summary) {
  Json points = Json::array();
  Json errors = Json::array();
  for (auto& s : slots) {
    if (!s.record.is_null()) points.push_back(std::move(s.record));
    for (auto& e : s.errors) errors.push_back(std::move(e));
  }
  summary["error_count"] = errors.size();
  record["points"] = std::move(points);
  record["errors"] = std::move(errors);
  record["summary"] = std::move(summary);
  RunResult out;
  out.exit_code = record["errors"].empty() ? kSuccess : kError;
  out.record = std::move(record);
  return out;
}

RunResult refusal(Json record, const HypothesisViolation& e, Json summary = Json::object()) {
  record["refusal"] = error_entry(e);
  if (const auto* g = dynamic_cast<const GridContainsUmbilics*>(&e)) record["refusal"]["points"] = g->points();
  if (!record.contains("points")) record["points"] = Json::array();
  if (!record.contains("errors")) record["errors"] = Json::array();
  summary["verdict"] = "refused";
  summary["certified"] = false;
  record["summary"] = std::move(summary);
  return RunResult{std::move(record), kRefusal};
}

// ---------------------------------------------------------------------------

RunResult run_invariant(const RunConfig& cfg, Json record, const RunOptions& opt) {
  const Immersion& imm = cfg.surface;
  const auto grid = grid_points(imm.domain, cfg.grid);
  const int d = imm.params();

  std::vector<std::vector<Vector>> dirs(grid.size());
  std::mt19937_64 rng(opt.seed);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  for (auto& list : dirs) {
    if (!cfg.directions.empty()) {
      list = cfg.directions;
      continue;
    }
    for (int k = 0; k < cfg.direction_count; ++k) {
      Vector w(d);
      for (int i = 0; i < d; ++i) w[i] = U(rng);
      list.push_back(w);
    }
  }

  std::vector<Slot> slots(grid.size());
  const GeometryTolerances tol = geometry(cfg);
  parallel_for(grid.size(), [&](std::size_t k) {
    Slot& slot = slots[k];
    try {
      const SurfaceJet jet = jet_at(imm, grid[k]);
      const FundamentalData data = fundamental_forms(imm.space, jet, tol);
      Json samples = Json::array();
      for (const auto& w : dirs[k]) {
        try {
          samples.push_back({{"w", to_json(w)}, {"I", invariant_I(data, w)}});
        } catch (const IsotropicDirection& e) {
          Json entry = located(error_entry(e), k, grid[k]);
          entry["direction"] = to_json(w);
          slot.errors.push_back(std::move(entry));
        }
      }
      slot.record = {{"index", k},
                     {"u", to_json(grid[k])},
                     {"x", to_json(jet.x)},
                     {"epsilon", data.epsilon},
                     {"g", to_json(data.g)},
                     {"lambda", to_json(data.lambda)},
                     {"lambda_mean", data.lambda_mean},
                     {"h", to_json(data.h)},
                     {"umbilic", is_umbilical(data, cfg.tolerances.umbilic_tol)},
                     {"residuals", {{"apolarity", std::abs(contract(data.g_inv, data.h))}}},
                     {"I", std::move(samples)}};
    } catch (const Error& e) {
      slot.errors.push_back(located(error_entry(e), k, grid[k]));
    }
  });

  std::size_t evaluated = 0, umbilic = 0;
  double max_apolarity = 0.0, max_I = 0.0;
  for (const auto& s : slots) {
    if (s.record.is_null()) continue;
    ++evaluated;
    umbilic += s.record["umbilic"].get<bool>();
    max_apolarity = std::max(max_apolarity, s.record["residuals"]["apolarity"].get<double>());
    for (const auto& smp : s.record["I"]) max_I = std::max(max_I, std::abs(smp["I"].get<double>()));
  }
  Json summary = {{"points", grid.size()},
                  {"evaluated", evaluated},
                  {"umbilic_points", umbilic},
                  {"all_umbilic", evaluated == grid.size() && umbilic == evaluated},
                  {"max_apolarity", max_apolarity},
                  {"max_abs_I", max_I}};
  return assemble(std::move(record), slots, std::move(summary));
}

// ---------------------------------------------------------------------------

Json frame_residuals_json(const FrameResiduals& r) {
  return {{"null_points", r.null_points},   {"incidence", r.incidence},   {"orthogonality", r.orthogonality},
          {"normalization", r.normalization}, {"metric", r.metric},     {"sphere_norm", r.sphere_norm},
          {"second_order", r.second_order},   {"max", r.max()}};
}

Json connection_json(const ConnectionReport& r) {
  return {{"omega_0n", r.omega_0n},
          {"basis_forms", r.basis_forms},
          {"relations", r.relations},
          {"metric_derivative", r.metric_derivative},
          {"second_form", r.second_form},
          {"symmetry", r.symmetry}};
}

RunResult run_frame(const RunConfig& cfg, Json record) {
  const Immersion& imm = cfg.surface;
  const double step = cfg.tolerances.fd_step.value_or(default_fd_step(imm));
  const double sstep = cfg.tolerances.structure_step;
  const double margin = 2.0 * std::max(step, sstep);
  ParameterBox inner = imm.domain;
  for (auto& [lo, hi] : inner.ranges) {
    if (!(hi - lo > 2.0 * margin)) {
      throw ConfigError("tolerances", 0, "difference steps are too large for the parameter domain");
    }
    lo += margin;
    hi -= margin;
  }
  const auto grid = grid_points(inner, cfg.grid);
  const GeometryTolerances tol = geometry(cfg);
  record["fd_step"] = step;
  record["structure_step"] = sstep;

  std::vector<Slot> slots(grid.size());
  parallel_for(grid.size(), [&](std::size_t k) {
    Slot& slot = slots[k];
    try {
      const SurfaceJet jet = jet_at(imm, grid[k]);
      const FundamentalData data = fundamental_forms(imm.space, jet, tol);
      const FrameResiduals r1 = frame_residuals(imm.space, build_frame(imm.space, jet, data, 1), data.g);
      const FrameResiduals r2 = frame_residuals(imm.space, build_frame(imm.space, jet, data, 2), data.g);
      const ConnectionReport c1 = check_connection(imm, grid[k], step, 1, tol);
      const ConnectionReport c2 = check_connection(imm, grid[k], step, 2, tol);
      Json structure = Json::object();
      if (imm.params() >= 2) {
        const double a = structure_residual(imm, grid[k], sstep, 1, tol);
        const double b = structure_residual(imm, grid[k], 0.5 * sstep, 1, tol);
        structure = {{"step", sstep}, {"residual", a}, {"residual_half_step", b}};
        if (b > 0.0) structure["ratio"] = a / b;
      }
      slot.record = {{"index", k},
                     {"u", to_json(grid[k])},
                     {"epsilon", data.epsilon},
                     {"frame", frame_residuals_json(r1)},
                     {"frame_second_order", frame_residuals_json(r2)},
                     {"connection", connection_json(c1)},
                     {"connection_second_order", connection_json(c2)},
                     {"structure", std::move(structure)}};
    } catch (const Error& e) {
      slot.errors.push_back(located(error_entry(e), k, grid[k]));
    }
  });

  double frame_max = 0.0, lambda_err = 0.0, h_err = 0.0, omega0n = 0.0, smax = 0.0;
  double rmin = std::numeric_limits<double>::infinity(), rmax = 0.0;
  for (const auto& s : slots) {
    if (s.record.is_null()) continue;
    frame_max = std::max({frame_max, s.record["frame"]["max"].get<double>(),
                          s.record["frame_second_order"]["max"].get<double>()});
    lambda_err = std::max(lambda_err, s.record["connection"]["second_form"].get<double>());
    h_err = std::max(h_err, s.record["connection_second_order"]["second_form"].get<double>());
    omega0n = std::max(omega0n, s.record["connection"]["omega_0n"].get<double>());
    const Json& st = s.record["structure"];
    if (st.contains("residual")) smax = std::max(smax, st["residual"].get<double>());
    if (st.contains("ratio")) {
      rmin = std::min(rmin, st["ratio"].get<double>());
      rmax = std::max(rmax, st["ratio"].get<double>());
    }
  }
  Json summary = {{"points", grid.size()},
                  {"max_frame_residual", frame_max},
                  {"max_lambda_recovery_error", lambda_err},
                  {"max_h_recovery_error", h_err},
                  {"max_omega_0n", omega0n},
                  {"max_structure_residual", smax}};
  if (rmax > 0.0) summary["structure_ratio_range"] = {rmin, rmax};
  return assemble(std::move(record), slots, std::move(summary));
}

// ---------------------------------------------------------------------------

RunResult run_mobius_apply(const RunConfig& cfg, Json record) {
  const AmbientSpace space = cfg.space();
  const Immersion& imm = cfg.surface;
  const MobiusMap m = compose_transform(space, cfg.transform);
  const Immersion out = transform_immersion(m, imm);

  Json transform = Json::array();
  for (const auto& g : cfg.transform) transform.push_back(generator_to_json(g));
  record["transform"] = std::move(transform);
  record["matrix"] = to_json(m.matrix);
  Json comps = Json::array();
  for (const auto& e : out.components) comps.push_back(unparse(e));
  record["surface"] = {{"components", std::move(comps)}, {"domain", domain_json(imm.domain)},
                       {"name", imm.name + "+mobius"}};

  const auto grid = grid_points(imm.domain, cfg.grid);
  std::vector<Slot> slots(grid.size());
  parallel_for(grid.size(), [&](std::size_t k) {
    Slot& slot = slots[k];
    try {
      const Vector x = jet_at(imm, grid[k]).x;
      const Vector xb = apply_to_ambient_point(space, m, x);
      const Vector xe = jet_at(out, grid[k]).x;
      slot.record = {{"index", k},
                     {"u", to_json(grid[k])},
                     {"x", to_json(x)},
                     {"x_bar", to_json(xb)},
                     {"conformal_factor", conformal_factor(space, m, x)},
                     {"expression_residual", (xe - xb).norm()}};
    } catch (const Error& e) {
      slot.errors.push_back(located(error_entry(e), k, grid[k]));
    }
  });
  double worst = 0.0;
  for (const auto& s : slots) {
    if (!s.record.is_null()) worst = std::max(worst, s.record["expression_residual"].get<double>());
  }
  Json summary = {{"points", grid.size()},
                  {"orthogonality", orthogonality_residual(space, m)},
                  {"max_expression_residual", worst}};
  return assemble(std::move(record), slots, std::move(summary));
}

// ---------------------------------------------------------------------------

RunResult run_equivalence(const RunConfig& cfg, Json record) {
  if (!cfg.surface_bar) throw ConfigError("surface_bar", 0, "equivalence needs a second surface");
  const AmbientSpace space = cfg.space();
  const int n = space.n();
  if (n < 4) return refusal(std::move(record), DimensionTooSmall(small_dimension_reason(n)));

  const auto grid = grid_points(cfg.surface.domain, cfg.grid);
  EquivalenceConfig ec;
  ec.factor_tol = cfg.tolerances.factor_tol;
  ec.umbilic_tol = cfg.tolerances.umbilic_tol;
  ec.geometry = geometry(cfg);
  ec.reconstruct = cfg.reconstruct;

  EquivalenceVerdict v;
  try {
    v = test_equivalence({cfg.surface, *cfg.surface_bar, grid}, ec);
  } catch (const HypothesisViolation& e) {
    return refusal(std::move(record), e);
  } catch (const Error& e) {
    record["points"] = Json::array();
    record["errors"] = Json::array({error_entry(e)});
    record["summary"] = {{"points", grid.size()}, {"error_count", 1}};
    return RunResult{std::move(record), kError};
  }

  std::vector<Slot> slots(grid.size());
  double smin = std::numeric_limits<double>::infinity(), smax = -smin;
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const PointFactor& p = v.points[k];
    slots[k].record = {{"index", k},
                       {"u", to_json(p.u)},
                       {"sigma", p.residuals.sigma},
                       {"g_residual", p.residuals.g_residual},
                       {"h_residual", p.residuals.h_residual},
                       {"proportional", p.proportional}};
    smin = std::min(smin, p.residuals.sigma);
    smax = std::max(smax, p.residuals.sigma);
  }
  Json summary = {{"points", grid.size()},
                  {"verdict", v.equivalent ? "equivalent" : "not-equivalent"},
                  {"equivalent", v.equivalent},
                  {"certified", true},
                  {"max_g_residual", v.max_g_residual},
                  {"max_h_residual", v.max_h_residual},
                  {"sigma_sign_consistent", v.sigma_sign_consistent},
                  {"sigma_range", {smin, smax}}};
  if (v.reconstructed) {
    summary["reconstruction"] = {{"matrix", to_json(v.reconstructed->matrix)},
                                 {"map_residual", *v.map_residual},
                                 {"orthogonality", *v.orthogonality}};
  } else if (v.reconstruction_error) {
    summary["reconstruction"] = {{"error", *v.reconstruction_error}};
  }
  return assemble(std::move(record), slots, std::move(summary));
}

// ---------------------------------------------------------------------------

RunResult run_lemma_check(const RunConfig& cfg, Json record) {
  const Immersion& imm = cfg.surface;
  const int n = imm.space.n();
  const auto grid = grid_points(imm.domain, cfg.grid);
  const GeometryTolerances tol = geometry(cfg);
  std::vector<Slot> slots(grid.size());
  parallel_for(grid.size(), [&](std::size_t k) {
    Slot& slot = slots[k];
    try {
      const FundamentalData data = fundamental_forms(imm.space, jet_at(imm, grid[k]), tol);
      slot.record = {{"index", k},
                     {"u", to_json(grid[k])},
                     {"umbilic", is_umbilical(data, cfg.tolerances.umbilic_tol)},
                     {"lemma_residual", lemma_residual(data, cfg.tolerances.umbilic_tol)}};
    } catch (const Error& e) {
      slot.errors.push_back(located(error_entry(e), k, grid[k]));
    }
  });
  double min_nonumbilic = std::numeric_limits<double>::infinity(), max_umbilic = 0.0;
  std::size_t umbilic = 0;
  for (const auto& s : slots) {
    if (s.record.is_null()) continue;
    const double r = s.record["lemma_residual"].get<double>();
    if (s.record["umbilic"].get<bool>()) {
      ++umbilic;
      max_umbilic = std::max(max_umbilic, r);
    } else {
      min_nonumbilic = std::min(min_nonumbilic, r);
    }
  }
  Json summary = {{"points", grid.size()}, {"umbilic_points", umbilic}, {"max_umbilic_residual", max_umbilic}};
  if (std::isfinite(min_nonumbilic)) summary["min_nonumbilic_residual"] = min_nonumbilic;

  if (n < 4) {
    // Residuals are recorded for reference; no claim is made for n = 3.
    Json points = Json::array();
    for (auto& s : slots)
      if (!s.record.is_null()) points.push_back(std::move(s.record));
    record["points"] = std::move(points);
    return refusal(std::move(record), DimensionTooSmall(small_dimension_reason(n)), std::move(summary));
  }
  summary["certified"] = true;
  return assemble(std::move(record), slots, std::move(summary));
}

}  // namespace

std::optional<Command> command_from_name(const std::string& name) {
  if (name == "invariant") return Command::Invariant;
  if (name == "frame") return Command::Frame;
  if (name == "mobius-apply") return Command::MobiusApply;
  if (name == "equivalence") return Command::Equivalence;
  if (name == "lemma-check") return Command::LemmaCheck;
  return std::nullopt;
}

const char* command_name(Command c) {
  switch (c) {
    case Command::Invariant: return "invariant";
    case Command::Frame: return "frame";
    case Command::MobiusApply: return "mobius-apply";
    case Command::Equivalence: return "equivalence";
    case Command::LemmaCheck: return "lemma-check";
  }
  return "?";
}

RunResult run(Command command, const RunConfig& config, const RunOptions& options) {
  Json record = header(command, options);
  record["config"] = config.echo;
  try {
    switch (command) {
      case Command::Invariant: return run_invariant(config, std::move(record), options);
      case Command::Frame: return run_frame(config, std::move(record));
      case Command::MobiusApply: return run_mobius_apply(config, std::move(record));
      case Command::Equivalence: return run_equivalence(config, std::move(record));
      case Command::LemmaCheck: return run_lemma_check(config, std::move(record));
    }
  } catch (const ConfigError& e) {
    return config_failure(command, e, options);
  }
  throw std::logic_error("unknown command");
}

RunResult config_failure(Command command, const ConfigError& error, const RunOptions& options) {
  Json record = header(command, options);
  Json entry = error_entry("ConfigError", error.what());
  entry["field"] = error.field();
  if (error.line() > 0) entry["line"] = error.line();
  record["points"] = Json::array();
  record["errors"] = Json::array({std::move(entry)});
  record["summary"] = {{"error_count", 1}};
  return RunResult{std::move(record), kError};
}

}  // namespace confgeo::cli
