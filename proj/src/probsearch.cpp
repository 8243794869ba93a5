#include "slm/probsearch.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace slm {

namespace {
constexpr int kMaxResamples = 100;
}

std::size_t ProjectionVector::nonzeros() const {
  return static_cast<std::size_t>(
      std::count_if(coeffs.begin(), coeffs.end(), [](double c) { return c != 0.0; }));
}

std::size_t ProbSearchParams::effective_R(std::size_t dims) const {
  return R == 0 ? std::min<std::size_t>(dims, 8) : std::min(R, dims);
}

void ProbSearchParams::validate(std::size_t dims) const {
  if (!(alpha0 > 0.0)) throw Error("alpha0 must be positive");
  if (!(alpha >= 0.0)) throw Error("alpha must be non-negative");
  if (!(beta >= 0.0)) throw Error("beta must be non-negative");
  if (R > dims) throw Error("R must not exceed the number of dimensions");
  if (p == 0 || q == 0 || q > p) throw Error("need 1 <= q <= p");
  if (!(cos_max > 0.0 && cos_max <= 1.0)) throw Error("cos_max must lie in (0, 1]");
}

int coefficient_range(std::size_t rank, const ProbSearchParams& params) {
  return static_cast<int>(std::floor(params.alpha0 * std::exp(-params.alpha * static_cast<double>(rank))));
}

double selection_probability(std::size_t rank, const ProbSearchParams& params) {
  if (rank <= 1) return 1.0;
  return std::exp(-params.beta * static_cast<double>(rank - 1));
}

ProjectionVector sample_projection(std::span<const std::size_t> order, std::size_t dims,
                                   const ProbSearchParams& params, Rng& rng) {
  if (order.empty()) throw Error("sample_projection: empty ranking");
  const std::size_t active = params.effective_R(order.size());
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  ProjectionVector out;
  for (int attempt = 0; attempt <= kMaxResamples; ++attempt) {
    out.coeffs.assign(dims, 0.0);
    std::size_t kept = 0;
    bool any = false;
    for (std::size_t r = 0; r < order.size() && kept < active; ++r) {
      const std::size_t rank = r + 1;
      if (!(unit(rng) < selection_probability(rank, params))) continue;
      ++kept;
      const int range = coefficient_range(rank, params);
      if (range < 1) continue;
      std::uniform_int_distribution<int> pick(-range, range);
      int c = 0;
      while (c == 0) c = pick(rng);
      if (order[r] >= dims) throw Error("sample_projection: ranked dimension out of range");
      out.coeffs[order[r]] = c;
      any = true;
    }
    if (any) {
      double norm = std::sqrt(std::inner_product(out.coeffs.begin(), out.coeffs.end(),
                                                 out.coeffs.begin(), 0.0));
      for (double& c : out.coeffs) c /= norm;
      return out;
    }
  }
  throw Error("sample_projection: every draw produced an all-zero vector (alpha0/alpha too small)");
}

ProjectionVector sample_projection(const DftRanking& ranking, const ProbSearchParams& params, Rng& rng) {
  return sample_projection(ranking.order, ranking.order.size(), params, rng);
}

double cosine_similarity(std::span<const double> a, std::span<const double> b) {
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  if (na == 0.0 || nb == 0.0) return 0.0;
  return dot / std::sqrt(na * nb);
}

std::vector<std::size_t> select_diverse(std::span<const ProjectionVector> candidates,
                                        std::span<const double> losses, std::size_t q,
                                        double cos_max) {
  if (candidates.empty()) throw Error("select_diverse: no candidates");
  if (losses.size() != candidates.size()) throw Error("select_diverse: one loss per candidate required");
  std::vector<std::size_t> order(candidates.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return losses[a] < losses[b]; });

  std::vector<std::size_t> kept;
  for (std::size_t idx : order) {
    if (kept.size() >= std::max<std::size_t>(q, 1)) break;
    bool diverse = std::all_of(kept.begin(), kept.end(), [&](std::size_t k) {
      return std::abs(cosine_similarity(candidates[idx].coeffs, candidates[k].coeffs)) <= cos_max;
    });
    if (diverse || kept.empty()) kept.push_back(idx);
  }
  return kept;
}

}  // namespace slm
