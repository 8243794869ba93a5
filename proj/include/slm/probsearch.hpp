#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "slm/dft.hpp"
#include "slm/types.hpp"

namespace slm {

// Unit-norm coefficient vector over D raw dimensions.
struct ProjectionVector {
  std::vector<double> coeffs;

  std::size_t nonzeros() const;
};

struct ProbSearchParams {
  double alpha0 = 10.0;   // coefficient range at rank 0
  double alpha = 0.3;     // range decay per rank
  double beta = 0.2;      // selection-probability decay per rank
  std::size_t R = 0;      // active coefficients; 0 means min(D, 8)
  std::size_t p = 512;    // candidates sampled per node
  std::size_t q = 1;      // candidates kept per node
  double cos_max = 0.9;   // max |cos| between kept candidates

  std::size_t effective_R(std::size_t dims) const;
  void validate(std::size_t dims) const;
};

// floor(alpha0 * exp(-alpha * rank)) for a 1-based rank.
int coefficient_range(std::size_t rank, const ProbSearchParams& params);

// exp(-beta * (rank - 1)); rank 1 is always eligible.
double selection_probability(std::size_t rank, const ProbSearchParams& params);

// Draws one sparse integer combination of the ranked dimensions and
// normalizes it. `order` lists raw dimensions from most to least
// discriminant (it may cover a subset of the D dimensions).
ProjectionVector sample_projection(std::span<const std::size_t> order, std::size_t dims,
                                   const ProbSearchParams& params, Rng& rng);
ProjectionVector sample_projection(const DftRanking& ranking, const ProbSearchParams& params,
                                   Rng& rng);

double cosine_similarity(std::span<const double> a, std::span<const double> b);

// Greedy by ascending loss (ties by index): keep a candidate iff its |cos|
// with every kept one is <= cos_max; stop after q. Returns candidate indices
// in acceptance order; the lowest-loss candidate is always first.
std::vector<std::size_t> select_diverse(std::span<const ProjectionVector> candidates,
                                        std::span<const double> losses, std::size_t q,
                                        double cos_max);

}  // namespace slm
