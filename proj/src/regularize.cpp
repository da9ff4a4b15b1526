#include "deblur/regularize.hpp"

#include <algorithm>
#include <cmath>

namespace deblur {

namespace {

// Matrix-free apply of B = A^T A + lambda L on the latent grid.
LinearOperator make_normal_operator(const ForwardModel& model,
                                    const LaplacianOp& laplacian, double lambda) {
  const int q = model.latent_size();
  LinearOperator op;
  op.n = q * q;
  op.apply = [&model, &laplacian, lambda, q](const std::vector<double>& in,
                                             std::vector<double>& out) {
    ImageGrid x(q, q, std::vector<double>(in));
    ImageGrid ata = model.apply_adjoint(model.apply_forward(x));
    if (lambda != 0.0) {
      ImageGrid lx = laplacian.apply(x);
      for (int i = 0; i < ata.size(); ++i) ata.values[i] += lambda * lx.values[i];
    }
    out = std::move(ata.values);
  };
  return op;
}

}  // namespace

ImageGrid solve_gendeconv(const ForwardModel& model, const LaplacianOp& laplacian,
                          double lambda, const ImageGrid& y,
                          const IterativeSolverConfig& config) {
  if (lambda < 0.0) throw DomainError("solve_gendeconv: lambda must be nonnegative");
  if (model.variant() == BoundaryVariant::PeriodicSpectral) {
    const int p = model.observed_size();
    if (y.width != p || y.height != p)
      throw DimensionError("solve_gendeconv: data shape mismatch");
    const cvec& ahat = model.spectrum();
    const std::vector<double> lhat = laplacian_spectrum(p, p);
    cvec yhat = dft2(y);
    for (size_t i = 0; i < yhat.size(); ++i) {
      const double a2 = std::norm(ahat[i]);
      const double denom = a2 + lambda * lhat[i];
      if (denom <= 1e-15 * (1.0 + a2)) {
        throw SingularSystemError(
            "solve_gendeconv: singular mode (spectral zero of A with lambda*Lhat = 0)");
      }
      yhat[i] = std::conj(ahat[i]) * yhat[i] / denom;
    }
    return idft2_real(yhat, p, p);
  }
  ImageGrid rhs = model.apply_adjoint(y);
  LinearOperator op = make_normal_operator(model, laplacian, lambda);
  SolveResult res = iterative_solve(op, rhs.values, config);
  const int q = model.latent_size();
  return ImageGrid(q, q, std::move(res.solution));
}

LCurve build_lcurve(const ForwardModel& model, const LaplacianOp& laplacian,
                    const ImageGrid& y, const std::vector<double>& lambda_grid,
                    const IterativeSolverConfig& config) {
  if (lambda_grid.empty()) throw DomainError("build_lcurve: empty lambda grid");
  for (size_t i = 0; i < lambda_grid.size(); ++i) {
    if (lambda_grid[i] <= 0.0)
      throw DomainError("build_lcurve: grid must be strictly positive");
    if (i > 0 && lambda_grid[i] <= lambda_grid[i - 1])
      throw DomainError("build_lcurve: grid must be sorted ascending");
  }
  LCurve curve;
  curve.lambdas = lambda_grid;
  curve.residual_norms.resize(lambda_grid.size());
  curve.seminorms.resize(lambda_grid.size());

  if (model.variant() == BoundaryVariant::PeriodicSpectral) {
    // One O(n) pass per grid point in the transform domain: by Parseval the
    // misfit and seminorm need no inverse transforms.
    const int p = model.observed_size();
    const cvec& ahat = model.spectrum();
    const std::vector<double> lhat = laplacian_spectrum(p, p);
    const cvec yhat = dft2(y);
    const double n = static_cast<double>(p) * p;
    for (size_t k = 0; k < lambda_grid.size(); ++k) {
      const double lambda = lambda_grid[k];
      double misfit = 0.0, semi = 0.0;
      for (size_t i = 0; i < yhat.size(); ++i) {
        const double a2 = std::norm(ahat[i]);
        const double denom = a2 + lambda * lhat[i];
        const double y2 = std::norm(yhat[i]);
        if (denom <= 0.0) {
          if (y2 > 0.0) misfit += y2;  // unmatched mode stays in the residual
          continue;
        }
        // xhat = conj(A) y / denom; residual mode = (1 - a2/denom) y.
        const double rfac = 1.0 - a2 / denom;
        misfit += rfac * rfac * y2;
        semi += lhat[i] * a2 * y2 / (denom * denom);
      }
      curve.residual_norms[k] = std::sqrt(misfit / n);
      curve.seminorms[k] = std::sqrt(std::max(0.0, semi / n));
    }
  } else {
    for (size_t k = 0; k < lambda_grid.size(); ++k) {
      ImageGrid xhat = solve_gendeconv(model, laplacian, lambda_grid[k], y, config);
      ImageGrid ax = model.apply_forward(xhat);
      double misfit = 0.0;
      for (int i = 0; i < ax.size(); ++i) {
        const double d = ax.values[i] - y.values[i];
        misfit += d * d;
      }
      curve.residual_norms[k] = std::sqrt(misfit);
      curve.seminorms[k] = std::sqrt(std::max(0.0, laplacian.quadratic_form(xhat)));
    }
  }
  curve.corner_index =
      (lambda_grid.size() < 3) ? 0 : lcurve_corner(curve).second;
  return curve;
}

std::vector<double> default_lambda_grid(const ForwardModel& model,
                                        const LaplacianOp& laplacian, int K) {
  if (K < 1) throw DomainError("default_lambda_grid: K must be >= 1");
  // Representative-column 1-norms: for the circulant case every column of
  // A^T A has the same 1-norm; use the center column otherwise.
  const int q = model.latent_size();
  ImageGrid e(q, q, 0.0);
  e.at(q / 2, q / 2) = 1.0;
  ImageGrid col = model.apply_adjoint(model.apply_forward(e));
  double na = 0.0;
  for (double v : col.values) na += std::abs(v);
  ImageGrid lcol = laplacian.apply(e);
  double nl = 0.0;
  for (double v : lcol.values) nl += std::abs(v);
  const double scale = (nl > 0.0) ? na / nl : 1.0;
  std::vector<double> grid(K);
  if (K == 1) {
    grid[0] = scale;
    return grid;
  }
  const double lo = std::log(1e-8 * scale), hi = std::log(1e2 * scale);
  for (int i = 0; i < K; ++i)
    grid[i] = std::exp(lo + (hi - lo) * i / (K - 1));
  return grid;
}

std::pair<double, int> lcurve_corner(const LCurve& curve) {
  const size_t K = curve.lambdas.size();
  if (K < 3) throw DomainError("lcurve_corner: need at least 3 points");
  // Monotone cleanup: drop points that violate residual up / seminorm down
  // beyond solver noise.
  std::vector<int> kept;
  kept.push_back(0);
  for (size_t i = 1; i < K; ++i) {
    const int pr = kept.back();
    if (curve.residual_norms[i] >= curve.residual_norms[pr] * (1.0 - 1e-9) &&
        curve.seminorms[i] <= curve.seminorms[pr] * (1.0 + 1e-9))
      kept.push_back(static_cast<int>(i));
  }
  if (kept.size() < 3) throw NoCornerError("lcurve_corner: too few monotone points");

  auto logpt = [&curve](int i) {
    return std::pair<double, double>(std::log(std::max(curve.residual_norms[i], 1e-300)),
                                     std::log(std::max(curve.seminorms[i], 1e-300)));
  };
  double best = 0.0;
  int best_idx = -1;
  for (size_t t = 1; t + 1 < kept.size(); ++t) {
    const auto [x1, y1] = logpt(kept[t - 1]);
    const auto [x2, y2] = logpt(kept[t]);
    const auto [x3, y3] = logpt(kept[t + 1]);
    const double cross = (x2 - x1) * (y3 - y2) - (y2 - y1) * (x3 - x2);
    const double d12 = std::hypot(x2 - x1, y2 - y1);
    const double d23 = std::hypot(x3 - x2, y3 - y2);
    const double d13 = std::hypot(x3 - x1, y3 - y1);
    if (d12 == 0.0 || d23 == 0.0 || d13 == 0.0) continue;
    const double curvature = 2.0 * cross / (d12 * d23 * d13);  // signed Menger
    if (curvature > best) {
      best = curvature;
      best_idx = kept[t];
    }
  }
  if (best_idx < 0)
    throw NoCornerError("lcurve_corner: curve is collinear, no curvature maximum");
  return {curve.lambdas[best_idx], best_idx};
}

}  // namespace deblur
