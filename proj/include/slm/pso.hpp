#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <span>
#include <string_view>
#include <vector>

#include "slm/parallel.hpp"
#include "slm/types.hpp"

namespace slm {

struct Particle {
  std::vector<double> position;
  std::vector<double> velocity;
  std::vector<double> pbest_position;
  double pbest_loss = std::numeric_limits<double>::infinity();
  double loss = std::numeric_limits<double>::infinity();  // at `position`
};

// Bounded-box swarm settings. With `adaptive` the coefficients below are only
// the starting values; the evolutionary state re-derives them each iteration.
struct SwarmConfig {
  std::size_t population = 20;
  std::size_t dim = 0;
  std::size_t max_iter = 110;
  double omega = 0.9;
  double c1 = 2.0;
  double c2 = 2.0;
  std::vector<double> lower;  // per coordinate
  std::vector<double> upper;
  double vmax = 0.0;          // 0 means 0.2 x the narrowest box width
  bool adaptive = true;
  std::uint64_t seed = 0;
  std::size_t patience = 0;   // stop after this many non-improving iterations; 0 disables

  double c_min = 1.5;
  double c_max = 2.5;
  double c_sum_max = 4.0;
  double sigma_max = 1.0;     // elite-learning noise, as a fraction of the box width
  double sigma_min = 0.1;

  // Uniform box [lo, hi]^dim.
  static SwarmConfig box(std::size_t dim, double lo, double hi);
  double velocity_limit() const;
  void validate() const;
};

enum class EvoState { kExploration, kExploitation, kConvergence, kJumpout };
std::string_view to_string(EvoState state);

struct Coefficients {
  double omega;
  double c1;
  double c2;
};

struct SwarmState {
  std::vector<Particle> particles;
  std::vector<double> gbest_position;
  double gbest_loss = std::numeric_limits<double>::infinity();
  std::size_t gbest_index = 0;  // particle whose pbest is the global best
  std::size_t iteration = 0;
  EvoState evo_state = EvoState::kExploration;
  double evo_factor = 0.0;
  Coefficients coeffs{0.9, 2.0, 2.0};
};

// v <- omega v + c1 r1 (pbest - x) + c2 r2 (gbest - x), clamped to +-vmax;
// then x <- x + v (the updated velocity), clamped to the box. r1 and r2 hold
// one draw per coordinate.
Particle step_particle(const Particle& p, std::span<const double> gbest, const SwarmConfig& cfg,
                       const Coefficients& coeffs, std::span<const double> r1,
                       std::span<const double> r2);
// The same draw for every coordinate.
Particle step_particle(const Particle& p, std::span<const double> gbest, const SwarmConfig& cfg,
                       const Coefficients& coeffs, double r1, double r2);
Particle step_particle(const Particle& p, std::span<const double> gbest, const SwarmConfig& cfg,
                       double r1, double r2);

// (d_g - d_min) / (d_max - d_min) over each particle's mean distance to the
// others, d_g belonging to the global-best particle; 0 for a collapsed swarm.
double evolutionary_factor(const SwarmState& state);

EvoState classify_state(double f);

// omega for a given evolutionary factor: 1 / (1 + 1.5 exp(-2.6 f)).
double adaptive_inertia(double f);

// State-driven nudge of (c1, c2) by delta, clamped to [c_min, c_max] and
// rescaled so that c1 + c2 <= c_sum_max.
Coefficients adapt_coefficients(EvoState state, double c1, double c2, double f, double delta,
                                const SwarmConfig& cfg);
// Same, with delta drawn uniformly from [0.05, 0.1].
Coefficients adapt_coefficients(EvoState state, double c1, double c2, double f,
                                const SwarmConfig& cfg, Rng& rng);

// Elite-learning noise scale (fraction of box width) at an iteration.
double elite_sigma(std::size_t iter, std::size_t max_iter, const SwarmConfig& cfg);

// gbest with one uniformly chosen coordinate perturbed by Gaussian noise.
std::vector<double> elite_candidate(std::span<const double> gbest, std::size_t iter,
                                    std::size_t max_iter, const SwarmConfig& cfg, Rng& rng);

// A better candidate becomes the global best; otherwise it overwrites the
// particle with the highest current loss.
void apply_elite(SwarmState& state, std::vector<double> candidate, double loss);

using LossFn = std::function<double(std::span<const double>)>;

struct OptimizeResult {
  std::vector<double> best_position;
  double best_loss = std::numeric_limits<double>::infinity();
  std::vector<double> history;  // gbest loss after init, then after every iteration
  std::size_t iterations = 0;
  std::size_t evaluations = 0;
};

// Minimizes `loss` over the box. Evaluations within an iteration run on the
// pool (so `loss` must be safe to call concurrently); all state updates happen
// afterwards on the calling thread, in particle order.
OptimizeResult optimize(const LossFn& loss, const SwarmConfig& cfg,
                        WorkerPool& pool = default_pool());

}  // namespace slm
