#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "deblur/forward.hpp"
#include "deblur/laplacian.hpp"
#include "deblur/rng.hpp"
#include "deblur/spectral.hpp"

namespace deblur {

// Hyperparameter pair: noise precision gamma and prior lumping constant
// delta, with the derived views lambda = delta/gamma and polar (r, phi).
struct Hyper {
  double gamma = 1.0;
  double delta = 1.0;

  Hyper() = default;
  Hyper(double g, double d) : gamma(g), delta(d) {
    if (!(g > 0.0) || !(d > 0.0))
      throw DomainError("Hyper: gamma and delta must be positive");
  }

  double lambda() const { return delta / gamma; }
  double radius() const { return std::sqrt(gamma * gamma + delta * delta); }
  double phi() const { return std::atan(delta / gamma); }

  static Hyper from_polar(double r, double phi) {
    return Hyper(r * std::cos(phi), r * std::sin(phi));
  }
};

// Hyperprior over (gamma, delta): independent Gamma(alpha, beta) components
// by default (the conjugate case Gibbs and MTC Option 2 require), or any
// evaluable log density.
struct HyperPrior {
  double alpha_gamma = 1.0;
  double beta_gamma = 1e-4;
  double alpha_delta = 1.0;
  double beta_delta = 1e-4;
  // When set, replaces the Gamma x Gamma form; conjugate-only samplers
  // refuse it.
  std::function<double(double gamma, double delta)> general_log_density;

  bool conjugate() const { return !general_log_density; }

  // Log density up to an additive constant; -inf outside the positive
  // quadrant.
  double log_density(double gamma, double delta) const;
};

// Ordered record of hyperparameter states with acceptance flags, recorded
// log target, wall time, and optionally retained image draws.
struct Chain {
  std::vector<Hyper> states;          // states[0] is the initial state
  std::vector<bool> accepted;         // one flag per transition (pre-thinning)
  std::vector<double> log_density;    // log marginal at each recorded state
  int thin = 1;                       // states are every thin-th iterate
  double wall_time_seconds = 0.0;
  std::vector<ImageGrid> images;      // optional retained draws

  double acceptance_rate() const;
  std::vector<double> series(const std::string& field) const;  // gamma|delta|lambda
};

// Options for evaluating the log marginal density over theta.
struct MarginalEvalOptions {
  bool use_fast = true;   // f_fast/g_fast against the cumulant tables
  double eps = 1e-9;      // certified absolute error for each of f and g
  // Exponent of delta in the marginal; the printed form is n/2. The
  // pseudo-determinant reading under periodic boundaries would be (n-1)/2;
  // exposed as an expert override. NaN means n/2.
  double delta_exponent = std::numeric_limits<double>::quiet_NaN();
};

// log pi(theta | y) up to one additive constant fixed per cache:
//   (n/2) log delta - g(lambda)/2 - (gamma/2) f(lambda) + log pi(theta).
double log_marginal(const SpectralCache& cache, const CumulantTables& tables,
                    const Hyper& hyper, const HyperPrior& prior,
                    const MarginalEvalOptions& opts = {});

// Deterministic randomize-then-optimize solve of
//   (gamma A^T A + delta L) x = gamma A^T y + w.
// Periodic variant solves diagonally in the transform domain.
ImageGrid rto_solve(const ForwardModel& model, const LaplacianOp& laplacian,
                    const Hyper& hyper, const ImageGrid& y, const ImageGrid& w);

// Exact draw from the full conditional
//   x | theta, y ~ N((A^T A + lambda L)^{-1} A^T y, (gamma A^T A + delta L)^{-1})
// with w = v1 + v2, v1 = sqrt(gamma) A^T xi, v2 ~ N(0, delta L) by cliques.
ImageGrid sample_conditional_x(const ForwardModel& model, const LaplacianOp& laplacian,
                               const Hyper& hyper, const ImageGrid& y, RngStream& rng);

struct GibbsState {
  ImageGrid x;
  Hyper hyper;
};

// One sweep of the blocked Gibbs sampler: x | theta,y then gamma | x,y then
// delta | x,y (Gamma conjugate updates; the delta rate is x^T L x / 2).
GibbsState gibbs_step(const GibbsState& state, const ForwardModel& model,
                      const LaplacianOp& laplacian, const ImageGrid& y,
                      const HyperPrior& prior, RngStream& rng);

struct ProposalWidths {
  double w_gamma = 2.34e-3;  // paper's tuned values for the Jupiter run
  double w_delta = 17.28e-7;
};

struct OneBlockResult {
  GibbsState state;
  bool accepted = false;
  double log_ratio = 0.0;  // joint MH log ratio (equals the marginal ratio)
};

// One-block step: propose theta' (Gaussian random walk), draw
// x' ~ pi(x | theta', y), accept/reject jointly. Proposals and the accept
// uniform come from proposal_rng in the order (gamma, delta, uniform);
// x-noise comes from x_rng, so the theta-side stream can be shared with
// mtc_option1_step for exact Lemma-3 comparisons. Out-of-quadrant proposals
// reject without consuming the uniform.
OneBlockResult oneblock_step(const GibbsState& state, const ForwardModel& model,
                             const LaplacianOp& laplacian, const ImageGrid& y,
                             const HyperPrior& prior, const ProposalWidths& widths,
                             RngStream& proposal_rng, RngStream& x_rng);

struct MtcStepResult {
  Hyper hyper;
  bool accepted = false;
  double log_ratio = 0.0;
};

// Metropolis random walk on (gamma, delta) against the marginal density.
// Draw order matches oneblock_step: normal, normal, then one uniform
// (skipped when the proposal leaves the positive quadrant).
MtcStepResult mtc_option1_step(const Hyper& theta, const SpectralCache& cache,
                               const CumulantTables& tables, const HyperPrior& prior,
                               const ProposalWidths& widths, RngStream& rng,
                               const MarginalEvalOptions& opts = {});

// Metropolis-within-Gibbs in polar coordinates: exact Gamma draw of
// r | phi, y followed by one Metropolis step on phi | r, y with proposal
// N(phi, w2^2). Conjugate Gamma hyperprior only.
MtcStepResult mtc_option2_step(const Hyper& theta, const SpectralCache& cache,
                               const CumulantTables& tables, const HyperPrior& prior,
                               double w2, RngStream& rng,
                               const MarginalEvalOptions& opts = {});

enum class SamplerKind { BlockGibbs, OneBlock, MtcOption1, MtcOption2 };

struct ChainConfig {
  int steps = 10000;  // paper's chain length
  int thin = 1;
  std::uint64_t seed = 0;
  ProposalWidths widths;
  double w2 = 1e-5;  // paper's tuned Option 2 width
  MarginalEvalOptions marginal;
  int retain_images = 0;  // keep an image draw every k recorded states
};

// Bundles the periodic problem objects the samplers share.
struct PeriodicProblem {
  ForwardModel model;
  LaplacianOp laplacian;
  ImageGrid y;
  SpectralCache cache;
  CumulantTables tables;

  static PeriodicProblem build(const Psf& psf, const ImageGrid& y, int table_order = 8);
};

// Runs `steps` transitions from the given state; the chain records the
// initial state plus every thinned state, acceptance flags, the log
// marginal at each recorded state, and total wall time. Deterministic
// given the seed.
Chain run_chain(SamplerKind kind, const PeriodicProblem& problem,
                const HyperPrior& prior, const Hyper& init, const ChainConfig& config);

// Profiled mode of the marginal posterior on the periodic problem using
// direct f/g evaluations: maximizes over lambda with gamma at its
// conditional mode. Used as the default chain initialization.
Hyper find_mode_periodic(const SpectralCache& cache, const HyperPrior& prior,
                         double lambda_lo = 1e-10, double lambda_hi = 1e4);

// Chain CSV: header iter,gamma,delta,lambda,accepted,logdensity with
// full-precision floats and LF line endings.
void write_chain_csv(const Chain& chain, const std::string& path);
Chain read_chain_csv(const std::string& path);

}  // namespace deblur
