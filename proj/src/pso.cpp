#include "slm/pso.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace slm {

namespace {

double distance(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(s);
}

std::string describe(std::span<const double> x) {
  std::ostringstream os;
  os.precision(17);
  os << '[';
  for (std::size_t i = 0; i < x.size(); ++i) os << (i ? ", " : "") << x[i];
  os << ']';
  return os.str();
}

double checked(double value, std::span<const double> position) {
  if (!std::isfinite(value)) throw Error("non-finite loss at position " + describe(position));
  return value;
}

void evaluate_all(const LossFn& loss, SwarmState& state, WorkerPool& pool) {
  auto& ps = state.particles;
  std::vector<double> values(ps.size());
  pool.parallel_for(ps.size(), [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) values[i] = loss(ps[i].position);
  });
  for (std::size_t i = 0; i < ps.size(); ++i) ps[i].loss = checked(values[i], ps[i].position);
}

// Personal and global best bookkeeping, in particle order.
void update_bests(SwarmState& state) {
  for (std::size_t i = 0; i < state.particles.size(); ++i) {
    auto& p = state.particles[i];
    if (p.loss < p.pbest_loss) {
      p.pbest_loss = p.loss;
      p.pbest_position = p.position;
      if (p.loss < state.gbest_loss) {
        state.gbest_loss = p.loss;
        state.gbest_position = p.position;
        state.gbest_index = i;
      }
    }
  }
}

}  // namespace

SwarmConfig SwarmConfig::box(std::size_t dim, double lo, double hi) {
  SwarmConfig cfg;
  cfg.dim = dim;
  cfg.lower.assign(dim, lo);
  cfg.upper.assign(dim, hi);
  return cfg;
}

double SwarmConfig::velocity_limit() const {
  if (vmax > 0.0) return vmax;
  double width = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < dim; ++i) width = std::min(width, upper[i] - lower[i]);
  return 0.2 * width;
}

void SwarmConfig::validate() const {
  if (population < 2) throw Error("swarm population must be at least 2");
  if (dim == 0) throw Error("swarm dimension must be positive");
  if (lower.size() != dim || upper.size() != dim) throw Error("swarm bounds must have one entry per dimension");
  for (std::size_t i = 0; i < dim; ++i)
    if (!(upper[i] > lower[i])) throw Error("swarm bounds must satisfy lower < upper");
  if (vmax < 0.0) throw Error("vmax must be positive");
  if (!(c_min <= c_max)) throw Error("c_min must not exceed c_max");
}

std::string_view to_string(EvoState state) {
  switch (state) {
    case EvoState::kExploration: return "exploration";
    case EvoState::kExploitation: return "exploitation";
    case EvoState::kConvergence: return "convergence";
    case EvoState::kJumpout: return "jumpout";
  }
  return "unknown";
}

Particle step_particle(const Particle& p, std::span<const double> gbest, const SwarmConfig& cfg,
                       const Coefficients& coeffs, std::span<const double> r1,
                       std::span<const double> r2) {
  Particle out = p;
  const double vmax = cfg.velocity_limit();
  for (std::size_t d = 0; d < out.position.size(); ++d) {
    const double x = p.position[d];
    double v = coeffs.omega * p.velocity[d] + coeffs.c1 * r1[d] * (p.pbest_position[d] - x) +
               coeffs.c2 * r2[d] * (gbest[d] - x);
    v = std::clamp(v, -vmax, vmax);
    out.velocity[d] = v;
    out.position[d] = std::clamp(x + v, cfg.lower[d], cfg.upper[d]);
  }
  return out;
}

Particle step_particle(const Particle& p, std::span<const double> gbest, const SwarmConfig& cfg,
                       const Coefficients& coeffs, double r1, double r2) {
  const std::vector<double> a(p.position.size(), r1), b(p.position.size(), r2);
  return step_particle(p, gbest, cfg, coeffs, a, b);
}

Particle step_particle(const Particle& p, std::span<const double> gbest, const SwarmConfig& cfg,
                       double r1, double r2) {
  return step_particle(p, gbest, cfg, Coefficients{cfg.omega, cfg.c1, cfg.c2}, r1, r2);
}

double evolutionary_factor(const SwarmState& state) {
  const auto& ps = state.particles;
  const std::size_t n = ps.size();
  if (n < 2) return 0.0;
  std::vector<double> mean_dist(n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      double d = distance(ps[i].position, ps[j].position);
      mean_dist[i] += d;
      mean_dist[j] += d;
    }
  for (double& d : mean_dist) d /= static_cast<double>(n - 1);
  auto [lo, hi] = std::minmax_element(mean_dist.begin(), mean_dist.end());
  if (!(*hi > *lo)) return 0.0;
  return std::clamp((mean_dist[state.gbest_index] - *lo) / (*hi - *lo), 0.0, 1.0);
}

EvoState classify_state(double f) {
  if (f < 0.25) return EvoState::kConvergence;
  if (f < 0.5) return EvoState::kExploitation;
  if (f < 0.75) return EvoState::kExploration;
  return EvoState::kJumpout;
}

double adaptive_inertia(double f) { return 1.0 / (1.0 + 1.5 * std::exp(-2.6 * f)); }

Coefficients adapt_coefficients(EvoState state, double c1, double c2, double f, double delta,
                                const SwarmConfig& cfg) {
  switch (state) {
    case EvoState::kExploration:
      c1 += delta;
      c2 -= delta;
      break;
    case EvoState::kExploitation:
      c1 += 0.5 * delta;
      c2 -= 0.5 * delta;
      break;
    case EvoState::kConvergence:
      c1 += 0.5 * delta;
      c2 += 0.5 * delta;
      break;
    case EvoState::kJumpout:
      c1 -= delta;
      c2 += delta;
      break;
  }
  c1 = std::clamp(c1, cfg.c_min, cfg.c_max);
  c2 = std::clamp(c2, cfg.c_min, cfg.c_max);
  if (c1 + c2 > cfg.c_sum_max) {
    const double scale = cfg.c_sum_max / (c1 + c2);
    c1 *= scale;
    c2 *= scale;
  }
  return {adaptive_inertia(f), c1, c2};
}

Coefficients adapt_coefficients(EvoState state, double c1, double c2, double f,
                                const SwarmConfig& cfg, Rng& rng) {
  std::uniform_real_distribution<double> delta(0.05, 0.1);
  return adapt_coefficients(state, c1, c2, f, delta(rng), cfg);
}

double elite_sigma(std::size_t iter, std::size_t max_iter, const SwarmConfig& cfg) {
  if (max_iter == 0) return cfg.sigma_max;
  const double progress = std::min(1.0, static_cast<double>(iter) / static_cast<double>(max_iter));
  return cfg.sigma_max - (cfg.sigma_max - cfg.sigma_min) * progress;
}

std::vector<double> elite_candidate(std::span<const double> gbest, std::size_t iter,
                                    std::size_t max_iter, const SwarmConfig& cfg, Rng& rng) {
  std::vector<double> out(gbest.begin(), gbest.end());
  std::uniform_int_distribution<std::size_t> coord(0, out.size() - 1);
  const std::size_t d = coord(rng);
  const double width = cfg.upper[d] - cfg.lower[d];
  std::normal_distribution<double> noise(0.0, elite_sigma(iter, max_iter, cfg) * width);
  out[d] = std::clamp(out[d] + noise(rng), cfg.lower[d], cfg.upper[d]);
  return out;
}

void apply_elite(SwarmState& state, std::vector<double> candidate, double loss) {
  if (loss < state.gbest_loss) {
    auto& holder = state.particles[state.gbest_index];
    holder.pbest_position = candidate;
    holder.pbest_loss = loss;
    state.gbest_position = std::move(candidate);
    state.gbest_loss = loss;
    return;
  }
  std::size_t worst = 0;
  for (std::size_t i = 1; i < state.particles.size(); ++i)
    if (state.particles[i].loss > state.particles[worst].loss) worst = i;
  auto& p = state.particles[worst];
  p.position = std::move(candidate);
  p.loss = loss;
  if (loss < p.pbest_loss) {
    p.pbest_loss = loss;
    p.pbest_position = p.position;
  }
}

OptimizeResult optimize(const LossFn& loss, const SwarmConfig& cfg, WorkerPool& pool) {
  cfg.validate();
  Rng rng(cfg.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double vmax = cfg.velocity_limit();

  SwarmState state;
  state.coeffs = {cfg.omega, cfg.c1, cfg.c2};
  state.particles.resize(cfg.population);
  for (auto& p : state.particles) {
    p.position.resize(cfg.dim);
    p.velocity.resize(cfg.dim);
    for (std::size_t d = 0; d < cfg.dim; ++d) {
      p.position[d] = cfg.lower[d] + unit(rng) * (cfg.upper[d] - cfg.lower[d]);
      p.velocity[d] = -vmax + unit(rng) * 2.0 * vmax;
    }
  }

  OptimizeResult result;
  evaluate_all(loss, state, pool);
  result.evaluations += state.particles.size();
  update_bests(state);
  result.history.push_back(state.gbest_loss);

  std::vector<double> r1(cfg.dim), r2(cfg.dim);
  std::size_t stale = 0;
  for (std::size_t iter = 0; iter < cfg.max_iter; ++iter) {
    state.iteration = iter;
    if (cfg.adaptive) {
      state.evo_factor = evolutionary_factor(state);
      state.evo_state = classify_state(state.evo_factor);
      state.coeffs = adapt_coefficients(state.evo_state, state.coeffs.c1, state.coeffs.c2,
                                        state.evo_factor, cfg, rng);
    }
    for (auto& p : state.particles) {
      for (std::size_t d = 0; d < cfg.dim; ++d) {
        r1[d] = unit(rng);
        r2[d] = unit(rng);
      }
      p = step_particle(p, state.gbest_position, cfg, state.coeffs, r1, r2);
    }
    const double before = state.gbest_loss;
    evaluate_all(loss, state, pool);
    result.evaluations += state.particles.size();
    update_bests(state);

    if (cfg.adaptive && state.evo_state == EvoState::kConvergence) {
      auto candidate = elite_candidate(state.gbest_position, iter, cfg.max_iter, cfg, rng);
      double value = checked(loss(candidate), candidate);
      ++result.evaluations;
      apply_elite(state, std::move(candidate), value);
    }

    result.history.push_back(state.gbest_loss);
    result.iterations = iter + 1;
    if (cfg.patience > 0) {
      stale = before - state.gbest_loss < 1e-12 ? stale + 1 : 0;
      if (stale >= cfg.patience) break;
    }
  }

  result.best_position = state.gbest_position;
  result.best_loss = state.gbest_loss;
  return result;
}

}  // namespace slm
