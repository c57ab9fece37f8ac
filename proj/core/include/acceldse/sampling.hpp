#pragma once

#include <cstdint>
#include <vector>

namespace acceldse {

using Point = std::vector<double>;

// Latin Hypercube design: per dimension exactly one point per stratum, points
// at stratum centers plus uniform jitter of +-0.5 stratum width. Among
// `candidates` independently generated designs the one with the largest
// minimum pairwise Euclidean distance is returned.
std::vector<Point> lhs(std::size_t dim, std::size_t n, std::uint64_t seed,
                       std::size_t candidates = 32);

// All internal candidate designs, in generation order (test hook for the
// maximin selection rule).
std::vector<std::vector<Point>> lhs_candidates(std::size_t dim, std::size_t n,
                                               std::uint64_t seed,
                                               std::size_t candidates = 32);

double min_pairwise_distance(const std::vector<Point>& points);

// Prefix-extendable Halton sequence (plain, unscrambled; first 64 primes).
class HaltonSampler {
 public:
  explicit HaltonSampler(std::size_t dim);
  std::vector<Point> next(std::size_t k);
  std::size_t emitted() const { return emitted_; }

 private:
  std::size_t dim_;
  std::size_t emitted_ = 0;
};

// Radical inverse of index in the given base.
double radical_inverse(std::uint64_t index, std::uint32_t base);

// Prefix-extendable Sobol sequence, Gray-code construction with Joe-Kuo
// direction numbers; the all-zeros point at index 0 is skipped.
class SobolSampler {
 public:
  explicit SobolSampler(std::size_t dim);
  std::vector<Point> next(std::size_t k);
  std::size_t emitted() const { return index_; }
  static std::size_t max_dim();

 private:
  std::size_t dim_;
  std::size_t index_ = 0;                 // count of points consumed (post-skip)
  std::vector<std::uint32_t> current_;    // running Gray-code state per dimension
  std::vector<std::vector<std::uint32_t>> direction_;  // [dim][bit]
};

// Exact star discrepancy by exhaustive scan over the anchored-box grid induced
// by the point coordinates. Cost is exponential in dim: n <= 256, dim <= 3.
double star_discrepancy_bruteforce(const std::vector<Point>& points);

}  // namespace acceldse
