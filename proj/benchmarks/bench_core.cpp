#include <benchmark/benchmark.h>

#include "confgeo/catalog.hpp"
#include "confgeo/equivalence.hpp"
#include "confgeo/frames.hpp"

using namespace confgeo;

namespace {

Vector probe(int d) {
  Vector u(d);
  for (int i = 0; i < d; ++i) u[i] = 0.1 * (i + 1) - 0.2;
  return u;
}

/// Inversion after a shift that keeps the surface away from the center.
MobiusMap shifted_inversion(const AmbientSpace& s) {
  return compose(make_generator(s, Inversion{2.0}), make_generator(s, Translation{Vector::Constant(s.n(), 1.5)}));
}

}  // namespace

static void BM_Jet(benchmark::State& state) {
  const AmbientSpace s(static_cast<int>(state.range(0)), 0);
  const Immersion imm = catalog_immersion("graph-cubic", s);
  const Vector u = probe(imm.params());
  for (auto _ : state) benchmark::DoNotOptimize(jet_at(imm, u));
}
BENCHMARK(BM_Jet)->Arg(4)->Arg(5)->Arg(8);

static void BM_FundamentalForms(benchmark::State& state) {
  const AmbientSpace s(static_cast<int>(state.range(0)), 0);
  const Immersion imm = catalog_immersion("ellipsoid-graph", s);
  const SurfaceJet jet = jet_at(imm, probe(imm.params()));
  for (auto _ : state) benchmark::DoNotOptimize(fundamental_forms(s, jet));
}
BENCHMARK(BM_FundamentalForms)->Arg(4)->Arg(5)->Arg(8);

static void BM_Frame(benchmark::State& state) {
  const AmbientSpace s(4, 0);
  const Immersion imm = catalog_immersion("graph-cubic", s);
  const SurfaceJet jet = jet_at(imm, probe(3));
  const FundamentalData d = fundamental_forms(s, jet);
  for (auto _ : state) benchmark::DoNotOptimize(build_frame(s, jet, d, 2));
}
BENCHMARK(BM_Frame);

static void BM_StructureResidual(benchmark::State& state) {
  const Immersion imm = catalog_immersion("graph-cubic", AmbientSpace(4, 0));
  const Vector u = probe(3);
  for (auto _ : state) benchmark::DoNotOptimize(structure_residual(imm, u, 1e-2, 2));
}
BENCHMARK(BM_StructureResidual);

static void BM_Equivalence(benchmark::State& state) {
  const int res = static_cast<int>(state.range(0));
  const AmbientSpace s(4, 0);
  const Immersion v = catalog_immersion("graph-cubic", s);
  const Immersion vb = transform_immersion(shifted_inversion(s), v);
  const CorrespondencePair pair{v, vb, grid_points(v.domain, {res, res, res})};
  for (auto _ : state) benchmark::DoNotOptimize(test_equivalence(pair));
  state.SetItemsProcessed(state.iterations() * res * res * res);
}
BENCHMARK(BM_Equivalence)->Arg(5)->Arg(8)->Unit(benchmark::kMillisecond);

static void BM_Reconstruct(benchmark::State& state) {
  const AmbientSpace s(static_cast<int>(state.range(0)), 0);
  const Immersion v = catalog_immersion("graph-cubic", s);
  const MobiusMap m = shifted_inversion(s);
  std::vector<Vector> from, to;
  for (const auto& u : grid_points(v.domain, std::vector<int>(v.params(), 4))) {
    from.push_back(jet_at(v, u).x);
    to.push_back(apply_to_ambient_point(s, m, from.back()));
  }
  for (auto _ : state) benchmark::DoNotOptimize(reconstruct_mobius(s, from, to));
}
BENCHMARK(BM_Reconstruct)->Arg(4)->Arg(5);
BENCHMARK_MAIN();
