#include "confgeo/equivalence.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>

#include "confgeo/errors.hpp"
#include "confgeo/parallel.hpp"

namespace confgeo {

FactorResiduals factor_residuals(const FundamentalData& data, const FundamentalData& data_bar) {
  const int d = data.params();
  if (data_bar.params() != d) throw DimensionMismatch("factor_residuals: dimension");
  const double det = std::abs(data.g.determinant());
  const double det_bar = std::abs(data_bar.g.determinant());
  if (!(det > 0.0) || !(det_bar > 0.0)) throw DegenerateForm("degenerate first fundamental form");

  FactorResiduals r;
  const double sigma_sq = std::pow(det_bar / det, 1.0 / d);
  double sigma = std::sqrt(sigma_sq);
  Eigen::Index bi = 0, bj = 0;
  data.h.matrix().cwiseAbs().maxCoeff(&bi, &bj);
  if (data.h(bi, bj) * data_bar.h(bi, bj) < 0.0) sigma = -sigma;
  r.sigma = sigma;

  r.g_residual = (data_bar.g.matrix() - sigma_sq * data.g.matrix()).cwiseAbs().maxCoeff() /
                 (sigma_sq * data.g.frobenius_norm());
  const double h_scale = std::abs(sigma) * data.h.frobenius_norm();
  const double h_diff = (data_bar.h.matrix() - sigma * data.h.matrix()).cwiseAbs().maxCoeff();
  r.h_residual = h_scale > 0.0 ? h_diff / h_scale : (h_diff > 0.0 ? std::numeric_limits<double>::infinity() : 0.0);
  return r;
}

double sigma_factor(const FundamentalData& data, const FundamentalData& data_bar, double tol, double umbilic_tol) {
  if (is_umbilical(data, umbilic_tol) || is_umbilical(data_bar, umbilic_tol)) {
    throw UmbilicalPoint("sigma is undefined at an umbilical point");
  }
  const FactorResiduals r = factor_residuals(data, data_bar);
  if (!(r.g_residual <= tol) || !(r.h_residual <= tol)) {
    std::ostringstream msg;
    msg << "fundamental forms are not proportional (g residual " << r.g_residual << ", h residual "
        << r.h_residual << ")";
    throw NotProportional(msg.str());
  }
  return r.sigma;
}

EquivalenceVerdict EquivalenceVerdict::refused(std::string reason) {
  EquivalenceVerdict v;
  v.refusal_reason = std::move(reason);
  return v;
}

std::string small_dimension_reason(int n) {
  return "n = " + std::to_string(n) +
         ": the conformal quadratic element determines a hypersurface up to Mobius transformations "
         "only for n >= 4. For n = 3 the contracted compatibility condition (n - 3) t_jl = -t g_jl "
         "no longer forces t = 0, so third-order invariants would be required.";
}

namespace {

std::string describe(const Vector& u) {
  std::ostringstream s;
  s << '(';
  for (Eigen::Index i = 0; i < u.size(); ++i) s << (i ? ", " : "") << u[i];
  s << ')';
  return s.str();
}

template <class E>
[[noreturn]] void rethrow_at(const E& e, std::size_t k, const Vector& u, const char* which) {
  throw E(std::string(e.what()) + " [" + which + " grid point " + std::to_string(k) + " u=" + describe(u) + "]");
}

std::vector<FundamentalData> data_on_grid(const Immersion& imm, const std::vector<Vector>& grid,
                                          const GeometryTolerances& tol, const char* which) {
  std::vector<FundamentalData> out(grid.size());
  parallel_for(grid.size(), [&](std::size_t k) {
    try {
      out[k] = fundamental_forms(imm.space, jet_at(imm, grid[k]), tol);
    } catch (const IsotropicPoint& e) {
      rethrow_at(e, k, grid[k], which);
    } catch (const NullNormal& e) {
      rethrow_at(e, k, grid[k], which);
    } catch (const DomainError& e) {
      rethrow_at(e, k, grid[k], which);
    }
  });
  return out;
}

double bounding_diagonal(const std::vector<Vector>& pts) {
  Vector lo = pts.front(), hi = pts.front();
  for (const auto& p : pts) {
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  }
  return (hi - lo).norm();
}

}  // namespace

EquivalenceVerdict test_equivalence(const CorrespondencePair& pair, const EquivalenceConfig& config) {
  const AmbientSpace& space = pair.v.space;
  const int n = space.n();
  if (!(pair.v_bar.space.signature() == space.signature())) {
    throw DimensionMismatch("surfaces live in different spaces");
  }
  if (pair.grid.empty()) throw InvalidParameter("empty sample grid");
  if (n < 4) throw DimensionTooSmall(small_dimension_reason(n));

  const auto data = data_on_grid(pair.v, pair.grid, config.geometry, "V");
  const auto data_bar = data_on_grid(pair.v_bar, pair.grid, config.geometry, "V-bar");

  std::vector<std::size_t> umbilics;
  for (std::size_t k = 0; k < pair.grid.size(); ++k) {
    if (is_umbilical(data[k], config.umbilic_tol) || is_umbilical(data_bar[k], config.umbilic_tol)) {
      umbilics.push_back(k);
    }
  }
  if (!umbilics.empty()) {
    std::ostringstream msg;
    msg << umbilics.size() << " umbilical grid point(s); the rigidity argument assumes none. First at index "
        << umbilics.front() << " u=" << describe(pair.grid[umbilics.front()]);
    throw GridContainsUmbilics(msg.str(), std::move(umbilics));
  }

  EquivalenceVerdict verdict;
  verdict.points.resize(pair.grid.size());
  parallel_for(pair.grid.size(), [&](std::size_t k) {
    PointFactor& p = verdict.points[k];
    p.u = pair.grid[k];
    p.residuals = factor_residuals(data[k], data_bar[k]);
    p.proportional = p.residuals.g_residual <= config.factor_tol && p.residuals.h_residual <= config.factor_tol;
  });

  bool all = true;
  int positive = 0, negative = 0;
  for (const auto& p : verdict.points) {
    verdict.max_g_residual = std::max(verdict.max_g_residual, p.residuals.g_residual);
    verdict.max_h_residual = std::max(verdict.max_h_residual, p.residuals.h_residual);
    all = all && p.proportional;
    (p.residuals.sigma > 0.0 ? positive : negative) += 1;
  }
  verdict.sigma_sign_consistent = positive == 0 || negative == 0;
  verdict.equivalent = all && verdict.sigma_sign_consistent;

  if (verdict.equivalent && config.reconstruct) {
    std::vector<Vector> fit_from, fit_to, check_from, check_to, all_to;
    for (std::size_t k = 0; k < pair.grid.size(); ++k) {
      const Vector x = jet_at(pair.v, pair.grid[k]).x;
      const Vector xb = jet_at(pair.v_bar, pair.grid[k]).x;
      all_to.push_back(xb);
      if (k % 2 == 0) {
        fit_from.push_back(x);
        fit_to.push_back(xb);
      } else {
        check_from.push_back(x);
        check_to.push_back(xb);
      }
    }
    try {
      const MobiusMap m = reconstruct_mobius(space, fit_from, fit_to);
      const double scale = std::max(bounding_diagonal(all_to), std::numeric_limits<double>::min());
      double worst = 0.0;
      for (std::size_t k = 0; k < check_from.size(); ++k) {
        worst = std::max(worst, (apply_to_ambient_point(space, m, check_from[k]) - check_to[k]).norm() / scale);
      }
      verdict.reconstructed = m;
      verdict.orthogonality = orthogonality_residual(space, m);
      verdict.map_residual = worst;
    } catch (const Error& e) {
      verdict.reconstruction_error = std::string(e.kind()) + ": " + e.what();
    }
  }
  return verdict;
}

// ---------------------------------------------------------------------------
// Reconstruction

namespace {

/// Translate the centroid to 0 and scale the RMS radius to 1.
MobiusMap normalizer(const AmbientSpace& space, std::span<const Vector> pts, MobiusMap& inverse) {
  Vector c = Vector::Zero(space.n());
  for (const auto& p : pts) c += p;
  c /= static_cast<double>(pts.size());
  double rms = 0.0;
  for (const auto& p : pts) rms += (p - c).squaredNorm();
  rms = std::sqrt(rms / static_cast<double>(pts.size()));
  if (!(rms > 0.0)) throw DegenerateConfiguration("all sample points coincide");
  const MobiusMap fwd = compose(make_generator(space, Dilation{1.0 / rms}), make_generator(space, Translation{-c}));
  inverse = compose(make_generator(space, Translation{c}), make_generator(space, Dilation{rms}));
  return fwd;
}

}  // namespace

MobiusMap reconstruct_mobius(const AmbientSpace& space, std::span<const Vector> from, std::span<const Vector> to) {
  const int dim = space.ambient_dim();
  const std::size_t needed = static_cast<std::size_t>(dim) * dim;
  if (from.size() != to.size()) throw DimensionMismatch("reconstruct_mobius: unequal point counts");
  if (from.size() < needed) {
    throw DegenerateConfiguration("need at least " + std::to_string(needed) + " correspondences, got " +
                                  std::to_string(from.size()));
  }

  MobiusMap from_inv, to_inv;
  const MobiusMap from_norm = normalizer(space, from, from_inv);
  const MobiusMap to_norm = normalizer(space, to, to_inv);

  // Row (k, b): (M X_k)_b - Y_kb (M X_k)_0 = 0 with Y_k0 = 1.
  Matrix a = Matrix::Zero(static_cast<Eigen::Index>(from.size()) * (dim - 1), dim * dim);
  for (std::size_t k = 0; k < from.size(); ++k) {
    const Vector x = from_norm(lift_point(space, from[k])).coords();
    Vector y = to_norm(lift_point(space, to[k])).coords();
    y /= y[0];
    for (int b = 1; b < dim; ++b) {
      const Eigen::Index row = static_cast<Eigen::Index>(k) * (dim - 1) + (b - 1);
      a.block(row, b * dim, 1, dim) = x.transpose();
      a.block(row, 0, 1, dim) = -y[b] * x.transpose();
    }
  }
  Eigen::JacobiSVD<Matrix> svd(a, Eigen::ComputeFullV);
  const Vector& s = svd.singularValues();
  const Eigen::Index last = s.size() - 1;
  if (!(s[last - 1] > 1e-8 * s[0])) {
    throw DegenerateConfiguration("correspondences do not determine a unique map (rank deficient)");
  }
  const Vector m = svd.matrixV().col(last);
  Matrix mn(dim, dim);
  for (int r = 0; r < dim; ++r) mn.row(r) = m.segment(r * dim, dim).transpose();

  const Matrix full = to_inv.matrix * mn * from_norm.matrix;
  try {
    return nearest_mobius(space, full);
  } catch (const InvalidParameter& e) {
    throw DegenerateConfiguration(std::string("least-squares map is not conformal: ") + e.what());
  }
}

// ---------------------------------------------------------------------------
// Quartic coefficient test of h² = g θ

namespace {

class QuarticBasis {
 public:
  explicit QuarticBasis(int d) {
    for (int i = 0; i < d; ++i)
      for (int j = i; j < d; ++j)
        for (int k = j; k < d; ++k)
          for (int l = k; l < d; ++l) index_.emplace(std::array<int, 4>{i, j, k, l}, static_cast<int>(index_.size()));
  }

  int size() const { return static_cast<int>(index_.size()); }

  /// Coefficients of the quartic (a·v)(b·v) for quadratic forms a, b.
  Vector product(const Matrix& a, const Matrix& b) const {
    const Eigen::Index d = a.rows();
    Vector c = Vector::Zero(size());
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) {
        if (a(i, j) == 0.0) continue;
        for (int k = 0; k < d; ++k)
          for (int l = 0; l < d; ++l) {
            std::array<int, 4> key{i, j, k, l};
            std::sort(key.begin(), key.end());
            c[index_.at(key)] += a(i, j) * b(k, l);
          }
      }
    return c;
  }

 private:
  std::map<std::array<int, 4>, int> index_;
};

}  // namespace

double lemma_residual(const FundamentalData& data, double umbilic_tol) {
  const int d = data.params();
  const Matrix& h = data.h.matrix();
  const Matrix& g = data.g.matrix();
  if (is_umbilical(data, umbilic_tol)) return 0.0;

  const QuarticBasis basis(d);
  const Vector target = basis.product(h, h);
  const double scale = target.norm();
  if (scale == 0.0) return 0.0;

  const int unknowns = d * (d + 1) / 2;
  Matrix design(basis.size(), unknowns);
  int col = 0;
  for (int a = 0; a < d; ++a)
    for (int b = a; b < d; ++b) {
      Matrix e = Matrix::Zero(d, d);
      e(a, b) = 1.0;
      e(b, a) = 1.0;
      design.col(col++) = basis.product(g, e);
    }
  const Vector theta = design.colPivHouseholderQr().solve(target);
  return (target - design * theta).norm() / scale;
}

}  // namespace confgeo
