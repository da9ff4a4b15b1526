#include "deblur/samplers.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace deblur {

double HyperPrior::log_density(double gamma, double delta) const {
  if (!(gamma > 0.0) || !(delta > 0.0))
    return -std::numeric_limits<double>::infinity();
  if (general_log_density) return general_log_density(gamma, delta);
  return (alpha_gamma - 1.0) * std::log(gamma) - beta_gamma * gamma +
         (alpha_delta - 1.0) * std::log(delta) - beta_delta * delta;
}

double Chain::acceptance_rate() const {
  if (accepted.empty()) return 0.0;
  double s = 0.0;
  for (bool a : accepted) s += a ? 1.0 : 0.0;
  return s / static_cast<double>(accepted.size());
}

std::vector<double> Chain::series(const std::string& field) const {
  std::vector<double> out;
  out.reserve(states.size());
  for (const auto& h : states) {
    if (field == "gamma") out.push_back(h.gamma);
    else if (field == "delta") out.push_back(h.delta);
    else if (field == "lambda") out.push_back(h.lambda());
    else throw DomainError("Chain::series: unknown field " + field);
  }
  return out;
}

namespace {

double resolve_delta_exponent(const MarginalEvalOptions& opts, int n) {
  return std::isnan(opts.delta_exponent) ? 0.5 * n : opts.delta_exponent;
}

double eval_f(const SpectralCache& cache, const CumulantTables& tables,
              double lambda, const MarginalEvalOptions& opts) {
  return opts.use_fast ? f_fast(cache, tables, lambda, opts.eps)
                       : f_direct(cache, lambda);
}

double eval_g(const SpectralCache& cache, const CumulantTables& tables,
              double lambda, const MarginalEvalOptions& opts) {
  return opts.use_fast ? g_fast(cache, tables, lambda, opts.eps)
                       : g_direct(cache, lambda);
}

}  // namespace

double log_marginal(const SpectralCache& cache, const CumulantTables& tables,
                    const Hyper& hyper, const HyperPrior& prior,
                    const MarginalEvalOptions& opts) {
  const double lambda = hyper.lambda();
  const double e = resolve_delta_exponent(opts, cache.n);
  const double f = eval_f(cache, tables, lambda, opts);
  const double g = eval_g(cache, tables, lambda, opts);
  return e * std::log(hyper.delta) - 0.5 * g - 0.5 * hyper.gamma * f +
         prior.log_density(hyper.gamma, hyper.delta);
}

ImageGrid rto_solve(const ForwardModel& model, const LaplacianOp& laplacian,
                    const Hyper& hyper, const ImageGrid& y, const ImageGrid& w) {
  if (model.variant() != BoundaryVariant::PeriodicSpectral)
    throw DomainError("rto_solve: periodic variant only (module nonperiodic owns the rest)");
  const int p = model.observed_size();
  if (y.width != p || y.height != p || w.width != p || w.height != p)
    throw DimensionError("rto_solve: shape mismatch");
  (void)laplacian;
  const cvec& ahat = model.spectrum();
  const std::vector<double> lhat = laplacian_spectrum(p, p);
  cvec yhat = dft2(y);
  cvec what = dft2(w);
  for (size_t i = 0; i < yhat.size(); ++i) {
    double denom = hyper.gamma * std::norm(ahat[i]) + hyper.delta * lhat[i];
    if (denom <= 0.0) denom = 1e-10 * hyper.delta;  // nugget on a doubly-null mode
    yhat[i] = (hyper.gamma * std::conj(ahat[i]) * yhat[i] + what[i]) / denom;
  }
  return idft2_real(yhat, p, p);
}

ImageGrid sample_conditional_x(const ForwardModel& model, const LaplacianOp& laplacian,
                               const Hyper& hyper, const ImageGrid& y, RngStream& rng) {
  const int p = model.observed_size();
  // v1 = sqrt(gamma) A^T xi has covariance gamma A^T A.
  ImageGrid xi(p, p);
  for (auto& v : xi.values) v = rng.normal();
  ImageGrid v1 = model.apply_adjoint(xi);
  const double sg = std::sqrt(hyper.gamma);
  for (auto& v : v1.values) v *= sg;
  ImageGrid v2 = sample_prior_noise(laplacian, hyper.delta, rng);
  if (!v1.same_shape(v2)) throw DimensionError("sample_conditional_x: shape mismatch");
  for (int i = 0; i < v1.size(); ++i) v1.values[i] += v2.values[i];
  return rto_solve(model, laplacian, hyper, y, v1);
}

GibbsState gibbs_step(const GibbsState& state, const ForwardModel& model,
                      const LaplacianOp& laplacian, const ImageGrid& y,
                      const HyperPrior& prior, RngStream& rng) {
  if (!prior.conjugate())
    throw UnsupportedPriorError("gibbs_step: conjugate Gamma hyperprior required");
  GibbsState next;
  next.x = sample_conditional_x(model, laplacian, state.hyper, y, rng);
  ImageGrid ax = model.apply_forward(next.x);
  double misfit = 0.0;
  for (int i = 0; i < ax.size(); ++i) {
    const double d = ax.values[i] - y.values[i];
    misfit += d * d;
  }
  const double m = static_cast<double>(model.m());
  const double n = static_cast<double>(laplacian.n());
  const double gamma =
      rng.gamma(0.5 * m + prior.alpha_gamma, 0.5 * misfit + prior.beta_gamma);
  const double xlx = laplacian.quadratic_form(next.x);
  const double delta =
      rng.gamma(0.5 * n + prior.alpha_delta, 0.5 * xlx + prior.beta_delta);
  next.hyper = Hyper(gamma, delta);
  return next;
}

namespace {

// Log densities of the hierarchical factors, each up to theta-independent
// constants, evaluated in the transform domain.
struct FactorEval {
  const ForwardModel& model;
  const LaplacianOp& laplacian;
  const ImageGrid& y;
  std::vector<double> lhat;
  cvec yhat;

  FactorEval(const ForwardModel& mdl, const LaplacianOp& lap, const ImageGrid& data)
      : model(mdl), laplacian(lap), y(data),
        lhat(laplacian_spectrum(mdl.observed_size(), mdl.observed_size())),
        yhat(dft2(data)) {}

  // log N(y; Ax, gamma^{-1} I) ~ (m/2) log gamma - (gamma/2) ||Ax - y||^2
  double log_likelihood(const ImageGrid& x, const Hyper& th) const {
    ImageGrid ax = model.apply_forward(x);
    double misfit = 0.0;
    for (int i = 0; i < ax.size(); ++i) {
      const double d = ax.values[i] - y.values[i];
      misfit += d * d;
    }
    return 0.5 * model.m() * std::log(th.gamma) - 0.5 * th.gamma * misfit;
  }

  // log N(x; 0, (delta L)^{-1}) ~ (n/2) log delta - (delta/2) x^T L x,
  // carrying the printed delta^{n/2} convention.
  double log_prior_x(const ImageGrid& x, const Hyper& th) const {
    return 0.5 * laplacian.n() * std::log(th.delta) -
           0.5 * th.delta * laplacian.quadratic_form(x);
  }

  // log N(x; mu_theta, (gamma A^T A + delta L)^{-1}) with its normalizer.
  double log_full_conditional(const ImageGrid& x, const Hyper& th) const {
    const cvec& ahat = model.spectrum();
    const int p = model.observed_size();
    const double n = static_cast<double>(p) * p;
    cvec xhat = dft2(x);
    double logdet = 0.0, quad = 0.0;
    for (size_t i = 0; i < ahat.size(); ++i) {
      double denom = th.gamma * std::norm(ahat[i]) + th.delta * lhat[i];
      if (denom <= 0.0) denom = 1e-10 * th.delta;
      logdet += std::log(denom);
      const std::complex<double> mu = th.gamma * std::conj(ahat[i]) * yhat[i] / denom;
      quad += denom * std::norm(xhat[i] - mu);
    }
    return 0.5 * logdet - 0.5 * quad / n;
  }
};

}  // namespace

OneBlockResult oneblock_step(const GibbsState& state, const ForwardModel& model,
                             const LaplacianOp& laplacian, const ImageGrid& y,
                             const HyperPrior& prior, const ProposalWidths& widths,
                             RngStream& proposal_rng, RngStream& x_rng) {
  if (!(widths.w_gamma > 0.0) || !(widths.w_delta > 0.0))
    throw DomainError("oneblock_step: proposal widths must be positive");
  const double gamma_p = state.hyper.gamma + widths.w_gamma * proposal_rng.normal();
  const double delta_p = state.hyper.delta + widths.w_delta * proposal_rng.normal();
  OneBlockResult res;
  if (!(gamma_p > 0.0) || !(delta_p > 0.0)) {
    res.state = state;
    res.accepted = false;
    res.log_ratio = -std::numeric_limits<double>::infinity();
    return res;
  }
  const Hyper theta_p(gamma_p, delta_p);
  GibbsState prop;
  prop.hyper = theta_p;
  prop.x = sample_conditional_x(model, laplacian, theta_p, y, x_rng);

  FactorEval fe(model, laplacian, y);
  const double log_ratio =
      fe.log_likelihood(prop.x, theta_p) + fe.log_prior_x(prop.x, theta_p) +
      prior.log_density(theta_p.gamma, theta_p.delta) +
      fe.log_full_conditional(state.x, state.hyper) -
      (fe.log_likelihood(state.x, state.hyper) +
       fe.log_prior_x(state.x, state.hyper) +
       prior.log_density(state.hyper.gamma, state.hyper.delta) +
       fe.log_full_conditional(prop.x, theta_p));
  res.log_ratio = log_ratio;
  const double u = proposal_rng.uniform01();
  if (std::log(u) < log_ratio) {
    res.state = std::move(prop);
    res.accepted = true;
  } else {
    res.state = state;
    res.accepted = false;
  }
  return res;
}

MtcStepResult mtc_option1_step(const Hyper& theta, const SpectralCache& cache,
                               const CumulantTables& tables, const HyperPrior& prior,
                               const ProposalWidths& widths, RngStream& rng,
                               const MarginalEvalOptions& opts) {
  if (!(widths.w_gamma > 0.0) || !(widths.w_delta > 0.0))
    throw DomainError("mtc_option1_step: proposal widths must be positive");
  const double gamma_p = theta.gamma + widths.w_gamma * rng.normal();
  const double delta_p = theta.delta + widths.w_delta * rng.normal();
  MtcStepResult res;
  if (!(gamma_p > 0.0) || !(delta_p > 0.0)) {
    res.hyper = theta;
    res.accepted = false;
    res.log_ratio = -std::numeric_limits<double>::infinity();
    return res;
  }
  const Hyper theta_p(gamma_p, delta_p);
  res.log_ratio = log_marginal(cache, tables, theta_p, prior, opts) -
                  log_marginal(cache, tables, theta, prior, opts);
  const double u = rng.uniform01();
  if (std::log(u) < res.log_ratio) {
    res.hyper = theta_p;
    res.accepted = true;
  } else {
    res.hyper = theta;
    res.accepted = false;
  }
  return res;
}

MtcStepResult mtc_option2_step(const Hyper& theta, const SpectralCache& cache,
                               const CumulantTables& tables, const HyperPrior& prior,
                               double w2, RngStream& rng,
                               const MarginalEvalOptions& opts) {
  if (!prior.conjugate())
    throw UnsupportedPriorError(
        "mtc_option2_step: the r | phi Gamma draw requires the conjugate prior");
  if (!(w2 > 0.0)) throw DomainError("mtc_option2_step: w2 must be positive");
  const double e = resolve_delta_exponent(opts, cache.n);
  const double shape = e + prior.alpha_gamma + prior.alpha_delta;

  const double phi = theta.phi();
  auto gamma_rate = [&](double ph) {
    return 0.5 * std::cos(ph) * eval_f(cache, tables, std::tan(ph), opts) +
           prior.beta_gamma * std::cos(ph) + prior.beta_delta * std::sin(ph);
  };
  const double r = rng.gamma(shape, gamma_rate(phi));

  // Conditional density of phi given r (up to a constant):
  //   (alpha_gamma - 1) log cos + (e + alpha_delta - 1) log sin
  //   - g(tan phi)/2 - (r cos phi / 2) f(tan phi)
  //   - beta_gamma r cos phi - beta_delta r sin phi.
  auto log_phi_density = [&](double ph) {
    const double lam = std::tan(ph);
    return (prior.alpha_gamma - 1.0) * std::log(std::cos(ph)) +
           (e + prior.alpha_delta - 1.0) * std::log(std::sin(ph)) -
           0.5 * eval_g(cache, tables, lam, opts) -
           0.5 * r * std::cos(ph) * eval_f(cache, tables, lam, opts) -
           prior.beta_gamma * r * std::cos(ph) - prior.beta_delta * r * std::sin(ph);
  };

  MtcStepResult res;
  const double phi_p = phi + w2 * rng.normal();
  if (!(phi_p > 0.0) || !(phi_p < 0.5 * 3.14159265358979323846)) {
    res.hyper = Hyper::from_polar(r, phi);
    res.accepted = false;
    res.log_ratio = -std::numeric_limits<double>::infinity();
    return res;
  }
  res.log_ratio = log_phi_density(phi_p) - log_phi_density(phi);
  const double u = rng.uniform01();
  if (std::log(u) < res.log_ratio) {
    res.hyper = Hyper::from_polar(r, phi_p);
    res.accepted = true;
  } else {
    res.hyper = Hyper::from_polar(r, phi);
    res.accepted = false;
  }
  return res;
}

PeriodicProblem PeriodicProblem::build(const Psf& psf, const ImageGrid& y,
                                       int table_order) {
  if (y.width != y.height)
    throw DomainError("PeriodicProblem: square image required");
  PeriodicProblem p{ForwardModel::periodic(psf, y.width),
                    LaplacianOp(y.width, y.height, LaplacianBoundary::Periodic), y,
                    SpectralCache{}, CumulantTables{}};
  p.cache = build_spectral_cache(psf, y);
  p.tables = build_cumulant_tables(p.cache, table_order);
  return p;
}

Chain run_chain(SamplerKind kind, const PeriodicProblem& problem,
                const HyperPrior& prior, const Hyper& init, const ChainConfig& config) {
  if (config.steps < 1) throw DomainError("run_chain: steps must be >= 1");
  if (config.thin < 1) throw DomainError("run_chain: thin must be >= 1");
  const auto t0 = std::chrono::steady_clock::now();

  RngStream rng(config.seed, 0);
  RngStream x_rng(config.seed, 1);  // one-block conditional draws
  RngStream image_rng(config.seed, 2);

  Chain chain;
  chain.states.reserve(config.steps / config.thin + 1);
  chain.accepted.reserve(config.steps);

  auto record_state = [&](const Hyper& h, const ImageGrid* x) {
    chain.states.push_back(h);
    chain.log_density.push_back(
        log_marginal(problem.cache, problem.tables, h, prior, config.marginal));
    if (config.retain_images > 0 &&
        (chain.states.size() - 1) % config.retain_images == 0) {
      if (x)
        chain.images.push_back(*x);
      else
        chain.images.push_back(sample_conditional_x(problem.model, problem.laplacian,
                                                    h, problem.y, image_rng));
    }
  };

  if (kind == SamplerKind::BlockGibbs || kind == SamplerKind::OneBlock) {
    GibbsState state;
    state.hyper = init;
    // Start the latent field at its conditional mean given theta0.
    state.x = rto_solve(problem.model, problem.laplacian, init, problem.y,
                        ImageGrid(problem.y.width, problem.y.height, 0.0));
    record_state(state.hyper, &state.x);
    for (int t = 1; t <= config.steps; ++t) {
      bool acc = true;
      if (kind == SamplerKind::BlockGibbs) {
        state = gibbs_step(state, problem.model, problem.laplacian, problem.y, prior, rng);
      } else {
        OneBlockResult r = oneblock_step(state, problem.model, problem.laplacian,
                                         problem.y, prior, config.widths, rng, x_rng);
        state = std::move(r.state);
        acc = r.accepted;
      }
      chain.accepted.push_back(acc);
      if (t % config.thin == 0) record_state(state.hyper, &state.x);
    }
  } else {
    Hyper theta = init;
    record_state(theta, nullptr);
    for (int t = 1; t <= config.steps; ++t) {
      MtcStepResult r;
      if (kind == SamplerKind::MtcOption1)
        r = mtc_option1_step(theta, problem.cache, problem.tables, prior,
                             config.widths, rng, config.marginal);
      else
        r = mtc_option2_step(theta, problem.cache, problem.tables, prior, config.w2,
                             rng, config.marginal);
      theta = r.hyper;
      chain.accepted.push_back(r.accepted);
      if (t % config.thin == 0) record_state(theta, nullptr);
    }
  }

  chain.wall_time_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return chain;
}

Hyper find_mode_periodic(const SpectralCache& cache, const HyperPrior& prior,
                         double lambda_lo, double lambda_hi) {
  if (!prior.conjugate())
    throw UnsupportedPriorError(
        "find_mode_periodic: profiling needs the conjugate Gamma form");
  const double shape =
      0.5 * cache.n + prior.alpha_gamma + prior.alpha_delta;  // m = n periodic
  auto rate = [&](double lam) {
    return 0.5 * f_direct(cache, lam) + prior.beta_gamma + prior.beta_delta * lam;
  };
  // Profiled objective: gamma at its conditional mode (shape-1)/rate.
  auto h = [&](double lam) {
    return -(shape - 1.0) * std::log(rate(lam)) +
           (0.5 * cache.n + prior.alpha_delta - 1.0) * std::log(lam) -
           0.5 * g_direct(cache, lam);
  };
  // Coarse log-grid scan, then golden-section refinement.
  const int K = 240;
  const double llo = std::log(lambda_lo), lhi = std::log(lambda_hi);
  double best = -std::numeric_limits<double>::infinity();
  int best_i = 0;
  for (int i = 0; i < K; ++i) {
    const double lam = std::exp(llo + (lhi - llo) * i / (K - 1));
    const double v = h(lam);
    if (v > best) {
      best = v;
      best_i = i;
    }
  }
  double a = std::exp(llo + (lhi - llo) * std::max(0, best_i - 1) / (K - 1));
  double b = std::exp(llo + (lhi - llo) * std::min(K - 1, best_i + 1) / (K - 1));
  double la = std::log(a), lb = std::log(b);
  const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
  double x1 = lb - gr * (lb - la), x2 = la + gr * (lb - la);
  double h1 = h(std::exp(x1)), h2 = h(std::exp(x2));
  for (int it = 0; it < 200 && (lb - la) > 1e-12; ++it) {
    if (h1 < h2) {
      la = x1;
      x1 = x2;
      h1 = h2;
      x2 = la + gr * (lb - la);
      h2 = h(std::exp(x2));
    } else {
      lb = x2;
      x2 = x1;
      h2 = h1;
      x1 = lb - gr * (lb - la);
      h1 = h(std::exp(x1));
    }
  }
  const double lambda0 = std::exp(0.5 * (la + lb));
  const double gamma0 = (shape - 1.0) / rate(lambda0);
  return Hyper(gamma0, gamma0 * lambda0);
}

void write_chain_csv(const Chain& chain, const std::string& path) {
  std::ofstream out(path, std::ios::binary);  // binary keeps LF endings
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << "iter,gamma,delta,lambda,accepted,logdensity\n";
  char buf[256];
  for (size_t i = 0; i < chain.states.size(); ++i) {
    const Hyper& h = chain.states[i];
    const int acc = (i == 0) ? 1 : (chain.accepted[i - 1] ? 1 : 0);
    std::snprintf(buf, sizeof(buf), "%zu,%.17g,%.17g,%.17g,%d,%.17g\n", i, h.gamma,
                  h.delta, h.lambda(), acc,
                  i < chain.log_density.size() ? chain.log_density[i] : 0.0);
    out << buf;
  }
  if (!out) throw std::runtime_error("write failed: " + path);
}

Chain read_chain_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open chain CSV: " + path);
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("empty chain CSV: " + path);
  Chain chain;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ss(line);
    std::string tok;
    std::vector<std::string> cols;
    while (std::getline(ss, tok, ',')) cols.push_back(tok);
    if (cols.size() < 6) throw std::runtime_error("bad chain CSV row: " + line);
    chain.states.emplace_back(std::stod(cols[1]), std::stod(cols[2]));
    if (chain.states.size() > 1) chain.accepted.push_back(cols[4] == "1");
    chain.log_density.push_back(std::stod(cols[5]));
  }
  return chain;
}

}  // namespace deblur
