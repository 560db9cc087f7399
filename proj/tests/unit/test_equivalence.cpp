#include <cmath>
#include <random>
#include <string>

#include <gtest/gtest.h>

#include "confgeo/catalog.hpp"
#include "confgeo/equivalence.hpp"
#include "confgeo/errors.hpp"
#include "oracles.hpp"

using namespace confgeo;

namespace {

Vector vec(std::initializer_list<double> xs) {
  Vector v(xs.size());
  int i = 0;
  for (double x : xs) v[i++] = x;
  return v;
}

FundamentalData forms_from(const SymForm& g, const SymForm& h) {
  FundamentalData d;
  d.g = g;
  d.g_inv = invert_form(g);
  d.lambda = h;
  d.h = h;
  return d;
}

FundamentalData data_at(const Immersion& imm, const Vector& u) { return fundamental_forms(imm.space, jet_at(imm, u)); }

/// Graph-cubic components with an extra term added to the height.
Immersion bumped(const AmbientSpace& s, const std::string& extra) {
  auto comps = catalog_components("graph-cubic", s);
  comps.back() = "(" + comps.back() + ") + " + extra;
  return make_immersion(s, comps, catalog_domain("graph-cubic", s.n() - 1), "bumped");
}

std::vector<Vector> images(const Immersion& imm, const std::vector<Vector>& grid) {
  std::vector<Vector> out;
  for (const auto& u : grid) out.push_back(jet_at(imm, u).x);
  return out;
}

Matrix up_to_scale(const Matrix& m) {
  Eigen::Index r, c;
  m.cwiseAbs().maxCoeff(&r, &c);
  return m / m(r, c);
}

/// Relative least-squares residual of h(v)² = g(v) θ(v) over sampled
/// directions instead of monomial coefficients.
double sampled_lemma_residual(const Matrix& g, const Matrix& h, std::mt19937_64& rng) {
  const int d = static_cast<int>(g.rows());
  const int unknowns = d * (d + 1) / 2;
  const int samples = 400;
  Matrix design(samples, unknowns);
  Vector target(samples);
  for (int s = 0; s < samples; ++s) {
    const Vector v = oracle::random_point(rng, d);
    const double gv = v.dot(g * v);
    target[s] = std::pow(v.dot(h * v), 2);
    int col = 0;
    for (int a = 0; a < d; ++a)
      for (int b = a; b < d; ++b) design(s, col++) = gv * (a == b ? v[a] * v[a] : 2 * v[a] * v[b]);
  }
  const Vector theta = design.colPivHouseholderQr().solve(target);
  return (target - design * theta).norm() / target.norm();
}

}  // namespace

TEST(SigmaFactor, Examples) {
  const AmbientSpace s(4, 0);
  const Immersion v = catalog_immersion("graph-cubic", s);
  const Immersion big = transform_immersion(make_generator(s, Dilation{2.0}), v);
  const Vector u = vec({0.1, -0.3, 0.2});
  EXPECT_NEAR(sigma_factor(data_at(v, u), data_at(big, u), 1e-8), 2.0, 1e-12);
  EXPECT_NEAR(sigma_factor(data_at(v, u), data_at(v, u), 1e-8), 1.0, 1e-15);

  const Immersion bump = bumped(s, "0.1*u1^3");
  EXPECT_THROW(sigma_factor(data_at(v, u), data_at(bump, u), 1e-6), NotProportional);

  const Immersion par = catalog_immersion("paraboloid", s);
  EXPECT_THROW(sigma_factor(data_at(par, Vector::Zero(3)), data_at(par, Vector::Zero(3)), 1e-6), UmbilicalPoint);
}

TEST(SigmaFactor, FactorResidualsAreScaleFree) {
  const FundamentalData a = forms_from(SymForm::identity(3), SymForm::diagonal(Eigen::Vector3d(-1, 0, 1)));
  const FundamentalData b = forms_from(1e6 * SymForm::identity(3), 1e3 * SymForm::diagonal(Eigen::Vector3d(-1, 0, 1)));
  const FactorResiduals r = factor_residuals(a, b);
  EXPECT_NEAR(r.sigma, 1e3, 1e-9);
  EXPECT_LT(r.g_residual, 1e-15);
  EXPECT_LT(r.h_residual, 1e-15);
  const FundamentalData c = forms_from(SymForm::identity(3), SymForm::diagonal(Eigen::Vector3d(1, 0, -1)));
  EXPECT_NEAR(factor_residuals(a, c).sigma, -1.0, 1e-15);
}

TEST(Equivalence, InversionDilationTranslation) {
  const AmbientSpace s(4, 0);
  const Immersion v = catalog_immersion("graph-cubic", s);
  Vector t = Vector::Constant(4, 0.7);
  const MobiusMap phi = compose(make_generator(s, Inversion{1.0}),
                                compose(make_generator(s, Dilation{1.5}), make_generator(s, Translation{t})));
  const Immersion vb = transform_immersion(phi, v);
  const auto grid = grid_points(v.domain, {5, 5, 5});
  const EquivalenceVerdict r = test_equivalence({v, vb, grid});
  ASSERT_TRUE(r.equivalent);
  EXPECT_TRUE(r.sigma_sign_consistent);
  ASSERT_TRUE(r.reconstructed.has_value());
  EXPECT_LT(*r.map_residual, 1e-6);
  EXPECT_LT(*r.orthogonality, 1e-10);
  const Matrix got = up_to_scale(r.reconstructed->matrix), want = up_to_scale(phi.matrix);
  EXPECT_LT((got - want).cwiseAbs().maxCoeff(), 1e-5);
  for (std::size_t k = 0; k < grid.size(); ++k) {
    EXPECT_EQ(r.points[k].u, grid[k]);
    const double analytic = conformal_factor(s, phi, jet_at(v, grid[k]).x);
    EXPECT_NEAR(std::abs(r.points[k].residuals.sigma), analytic, 1e-6 * analytic);
    const InvariantElement a = canonical_element(data_at(v, grid[k]));
    const InvariantElement b = canonical_element(data_at(vb, grid[k]));
    EXPECT_LT((a.g_hat.matrix() - b.g_hat.matrix()).cwiseAbs().maxCoeff(), 1e-8);
    EXPECT_LT((a.h_hat.matrix() - b.h_hat.matrix()).cwiseAbs().maxCoeff(), 1e-8);
  }
}

TEST(Equivalence, IdenticalSurfaces) {
  const AmbientSpace s(4, 0);
  const Immersion v = catalog_immersion("graph-cubic", s);
  const EquivalenceVerdict r = test_equivalence({v, v, grid_points(v.domain, {5, 5, 5})});
  ASSERT_TRUE(r.equivalent);
  for (const auto& p : r.points) EXPECT_NEAR(p.residuals.sigma, 1.0, 1e-14);
  ASSERT_TRUE(r.reconstructed.has_value());
  EXPECT_LT((up_to_scale(r.reconstructed->matrix) - Matrix::Identity(6, 6)).cwiseAbs().maxCoeff(), 1e-8);
}

TEST(Equivalence, SmallGridReportsReconstructionError) {
  const AmbientSpace s(4, 0);
  const Immersion v = catalog_immersion("graph-cubic", s);
  const EquivalenceVerdict r = test_equivalence({v, v, grid_points(v.domain, {4, 4, 4})});
  EXPECT_TRUE(r.equivalent);
  EXPECT_FALSE(r.reconstructed.has_value());
  ASSERT_TRUE(r.reconstruction_error.has_value());
  EXPECT_NE(r.reconstruction_error->find("DegenerateConfiguration"), std::string::npos);
}

TEST(Equivalence, BumpIsRejected) {
  const AmbientSpace s(4, 0);
  const Immersion v = catalog_immersion("graph-cubic", s);
  const EquivalenceVerdict r = test_equivalence({v, bumped(s, "0.1*u1^3"), grid_points(v.domain, {4, 4, 4})});
  EXPECT_FALSE(r.equivalent);
  EXPECT_GT(std::max(r.max_g_residual, r.max_h_residual), 1e-2);
  EXPECT_FALSE(r.reconstructed.has_value());
}

TEST(Equivalence, HypothesisViolations) {
  const AmbientSpace s3(3, 0);
  const Immersion v3 = catalog_immersion("graph-cubic", s3);
  try {
    test_equivalence({v3, v3, grid_points(v3.domain, {3, 3})});
    FAIL();
  } catch (const DimensionTooSmall& e) {
    EXPECT_NE(std::string(e.what()).find("n = 3"), std::string::npos);
  }
  const AmbientSpace s21(2, 1);
  const Immersion v21 = catalog_immersion("pseudo-graph", s21);
  EXPECT_THROW(test_equivalence({v21, v21, grid_points(v21.domain, {3, 3})}), DimensionTooSmall);

  const AmbientSpace s(4, 0);
  const Immersion sphere = catalog_immersion("sphere-stereographic", s);
  try {
    test_equivalence({sphere, sphere, grid_points(sphere.domain, {3, 3, 3})});
    FAIL();
  } catch (const GridContainsUmbilics& e) {
    EXPECT_EQ(e.points().size(), 27u);
  }
  const Immersion par = catalog_immersion("paraboloid", s);
  try {
    test_equivalence({par, par, grid_points(par.domain, {3, 3, 3})});
    FAIL();
  } catch (const GridContainsUmbilics& e) {
    ASSERT_EQ(e.points().size(), 1u);
    EXPECT_EQ(e.points().front(), 13u);
  }
}

TEST(Equivalence, IsotropicGridPointIsLocated) {
  const AmbientSpace s(4, 1);
  const Immersion iso = make_immersion(s, {"u1", "u2", "u3", "u4", "u4"}, ParameterBox::cube(4, -1, 1));
  try {
    test_equivalence({iso, iso, grid_points(iso.domain, {2, 2, 2, 2})});
    FAIL();
  } catch (const IsotropicPoint& e) {
    EXPECT_NE(std::string(e.what()).find("grid point 0"), std::string::npos);
  }
  EXPECT_THROW(test_equivalence({iso, iso, {}}), InvalidParameter);
}

TEST(Equivalence, RandomPositivePairs) {
  std::mt19937_64 rng(1234);
  struct Case {
    int p, q;
    const char* name;
    int res;
  };
  const Case cases[] = {{4, 0, "graph-cubic", 5}, {3, 1, "pseudo-graph", 5}, {5, 0, "graph-cubic", 4},
                        {4, 1, "pseudo-graph", 4}};
  int done = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const Case& c = cases[trial % 4];
    const AmbientSpace s(c.p, c.q);
    const Immersion v = catalog_immersion(c.name, s);
    const auto grid = grid_points(v.domain, std::vector<int>(v.params(), c.res));
    const MobiusMap phi = oracle::random_mobius(s, rng, 4, images(v, grid));
    const EquivalenceVerdict r = test_equivalence({v, transform_immersion(phi, v), grid});
    EXPECT_TRUE(r.equivalent) << c.name << " trial " << trial << " g " << r.max_g_residual << " h " << r.max_h_residual;
    ASSERT_TRUE(r.map_residual.has_value()) << r.reconstruction_error.value_or("");
    EXPECT_LT(*r.map_residual, 1e-5) << c.name << " trial " << trial;
    EXPECT_TRUE(r.sigma_sign_consistent);
    ++done;
  }
  EXPECT_EQ(done, 100);
}

TEST(Equivalence, NonConformalPerturbationsRejected) {
  const AmbientSpace s(4, 0);
  const Immersion v = catalog_immersion("graph-cubic", s);
  const auto grid = grid_points(v.domain, {4, 4, 4});
  for (const char* extra : {"0.02*u1^3", "0.05*u1*u2*u3", "0.03*u2^2*u3", "0.02*sin(3*u3)", "0.01*u1^4"}) {
    const EquivalenceVerdict r = test_equivalence({v, bumped(s, extra), grid});
    EXPECT_FALSE(r.equivalent) << extra;
  }
}

TEST(Equivalence, SigmaConstantUnderDilation) {
  for (double r : {0.5, 2.0, 3.7}) {
    const AmbientSpace s(4, 0);
    const Immersion v = catalog_immersion("graph-cubic", s);
    const Immersion vb = transform_immersion(make_generator(s, Dilation{r}), v);
    const EquivalenceVerdict out = test_equivalence({v, vb, grid_points(v.domain, {4, 4, 4})});
    ASSERT_TRUE(out.equivalent);
    for (const auto& p : out.points) EXPECT_NEAR(p.residuals.sigma, r, 1e-8 * r);
  }
}

TEST(Reconstruct, Examples) {
  std::mt19937_64 rng(77);
  const AmbientSpace s(4, 0);
  std::vector<Vector> from;
  for (int k = 0; k < 60; ++k) from.push_back(oracle::random_point(rng, 4));
  const MobiusMap phi = oracle::random_mobius(s, rng, 4, from);
  std::vector<Vector> to;
  for (const auto& x : from) to.push_back(apply_to_ambient_point(s, phi, x));
  const MobiusMap m = reconstruct_mobius(s, from, to);
  EXPECT_LT((up_to_scale(m.matrix) - up_to_scale(phi.matrix)).cwiseAbs().maxCoeff(), 1e-5);
  EXPECT_LT(orthogonality_residual(s, m), 1e-12);

  const MobiusMap id = reconstruct_mobius(s, from, from);
  EXPECT_LT((up_to_scale(id.matrix) - Matrix::Identity(6, 6)).cwiseAbs().maxCoeff(), 1e-8);
}

TEST(Reconstruct, DegenerateInputs) {
  std::mt19937_64 rng(78);
  const AmbientSpace s(4, 0);
  std::vector<Vector> few;
  for (int k = 0; k < 35; ++k) few.push_back(oracle::random_point(rng, 4));
  EXPECT_THROW(reconstruct_mobius(s, few, few), DegenerateConfiguration);
  const std::vector<Vector> same(40, Vector::Constant(4, 0.3));
  EXPECT_THROW(reconstruct_mobius(s, same, same), DegenerateConfiguration);
  EXPECT_THROW(reconstruct_mobius(s, few, std::vector<Vector>(34, Vector::Zero(4))), DimensionMismatch);

  // Unrelated clouds: either refused or visibly poor on held-out points.
  std::vector<Vector> a, b;
  for (int k = 0; k < 80; ++k) {
    a.push_back(oracle::random_point(rng, 4));
    b.push_back(oracle::random_point(rng, 4));
  }
  try {
    const MobiusMap m = reconstruct_mobius(s, std::span(a).first(40), std::span(b).first(40));
    double worst = 0.0;
    for (int k = 40; k < 80; ++k) {
      try {
        worst = std::max(worst, (apply_to_ambient_point(s, m, a[k]) - b[k]).norm());
      } catch (const PointAtInfinity&) {
        worst = INFINITY;
      }
    }
    EXPECT_GT(worst, 0.1);
  } catch (const DegenerateConfiguration&) {
    SUCCEED();
  }
}

TEST(Lemma, Examples) {
  EXPECT_EQ(lemma_residual(forms_from(SymForm::identity(3), SymForm::zero(3))), 0.0);
  const FundamentalData d = forms_from(SymForm::identity(3), SymForm::diagonal(Eigen::Vector3d(-1, 0, 1)));
  const double r = lemma_residual(d);
  EXPECT_GT(r, 1e-3);
  std::mt19937_64 rng(3);
  EXPECT_GT(sampled_lemma_residual(d.g.matrix(), d.h.matrix(), rng), 1e-3);
  // Scale free.
  EXPECT_NEAR(lemma_residual(forms_from(9.0 * SymForm::identity(3), 3.0 * d.h)), r, 1e-12);
  // Below the umbilic tolerance the point counts as umbilical.
  EXPECT_EQ(lemma_residual(forms_from(SymForm::identity(3), 1e-12 * d.h)), 0.0);
}

TEST(Lemma, CatalogPoints) {
  std::mt19937_64 rng(6);
  for (auto [p, q, name] : {std::tuple{4, 0, "graph-cubic"}, std::tuple{5, 0, "graph-cubic"},
                            std::tuple{4, 0, "ellipsoid-graph"}, std::tuple{3, 1, "pseudo-graph"},
                            std::tuple{4, 1, "pseudo-graph"}}) {
    const AmbientSpace s(p, q);
    const Immersion imm = catalog_immersion(name, s);
    for (const auto& u : grid_points(imm.domain, std::vector<int>(imm.params(), 3))) {
      const FundamentalData d = data_at(imm, u);
      ASSERT_FALSE(is_umbilical(d));
      EXPECT_GT(lemma_residual(d), 1e-3) << name;
      EXPECT_GT(sampled_lemma_residual(d.g.matrix(), d.h.matrix(), rng), 1e-3) << name;
    }
  }
  const Immersion sphere = catalog_immersion("sphere-stereographic", AmbientSpace(5, 0));
  for (const auto& u : grid_points(sphere.domain, {3, 3, 3, 3})) EXPECT_EQ(lemma_residual(data_at(sphere, u)), 0.0);
}
