#include "acceldse/sampling.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "acceldse/rng.hpp"

namespace acceldse {

namespace {

constexpr std::uint32_t kPrimes[64] = {
    2,   3,   5,   7,   11,  13,  17,  19,  23,  29,  31,  37,  41,
    43,  47,  53,  59,  61,  67,  71,  73,  79,  83,  89,  97,  101,
    103, 107, 109, 113, 127, 131, 137, 139, 149, 151, 157, 163, 167,
    173, 179, 181, 191, 193, 197, 199, 211, 223, 227, 229, 233, 239,
    241, 251, 257, 263, 269, 271, 277, 281, 283, 293, 307, 311};

// Joe-Kuo "new-joe-kuo-6" table rows for dimensions 2..17 (dimension 1 is the
// plain van der Corput sequence): polynomial degree s, coefficients a, and
// initial direction integers m_1..m_s.
// Source: https://web.maths.unsw.edu.au/~fkuo/sobol/ (new-joe-kuo-6.21201).
struct JoeKuoRow {
  std::uint32_t s;
  std::uint32_t a;
  std::uint32_t m[7];
};

constexpr JoeKuoRow kJoeKuo[] = {
    {1, 0, {1}},
    {2, 1, {1, 3}},
    {3, 1, {1, 3, 1}},
    {3, 2, {1, 1, 1}},
    {4, 1, {1, 1, 3, 3}},
    {4, 4, {1, 3, 5, 13}},
    {5, 2, {1, 1, 5, 5, 17}},
    {5, 4, {1, 1, 5, 5, 5}},
    {5, 7, {1, 1, 7, 11, 19}},
    {5, 11, {1, 1, 5, 1, 1}},
    {5, 13, {1, 1, 1, 3, 11}},
    {5, 14, {1, 3, 5, 5, 31}},
    {6, 1, {1, 3, 3, 9, 7, 49}},
    {6, 13, {1, 1, 1, 15, 21, 21}},
    {6, 16, {1, 3, 1, 13, 27, 49}},
    {6, 19, {1, 1, 1, 3, 35, 33}},
    {6, 22, {1, 3, 1, 3, 19, 57}},
    {6, 25, {1, 1, 1, 25, 9, 59}},
    {7, 1, {1, 3, 5, 13, 27, 87, 125}},  // unused filler beyond dim 19
};

constexpr std::uint32_t kSobolBits = 32;
constexpr std::size_t kSobolMaxDim = 17;  // van der Corput + 16 Joe-Kuo rows

std::vector<std::uint32_t> direction_numbers(std::size_t dim_index) {
  std::vector<std::uint32_t> v(kSobolBits);
  if (dim_index == 0) {
    for (std::uint32_t k = 0; k < kSobolBits; ++k) v[k] = 1u << (31 - k);
    return v;
  }
  const JoeKuoRow& row = kJoeKuo[dim_index - 1];
  const std::uint32_t s = row.s;
  std::vector<std::uint32_t> m(kSobolBits + 1);
  for (std::uint32_t k = 1; k <= s && k <= kSobolBits; ++k) m[k] = row.m[k - 1];
  for (std::uint32_t k = s + 1; k <= kSobolBits; ++k) {
    m[k] = m[k - s] ^ (m[k - s] << s);
    for (std::uint32_t i = 1; i < s; ++i)
      m[k] ^= ((row.a >> (s - 1 - i)) & 1u) * (m[k - i] << i);
  }
  for (std::uint32_t k = 1; k <= kSobolBits; ++k) v[k - 1] = m[k] << (kSobolBits - k);
  return v;
}

}  // namespace

double min_pairwise_distance(const std::vector<Point>& points) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < points.size(); ++i)
    for (std::size_t j = i + 1; j < points.size(); ++j) {
      double d2 = 0.0;
      for (std::size_t k = 0; k < points[i].size(); ++k) {
        const double d = points[i][k] - points[j][k];
        d2 += d * d;
      }
      best = std::min(best, std::sqrt(d2));
    }
  return best;
}

std::vector<std::vector<Point>> lhs_candidates(std::size_t dim, std::size_t n,
                                               std::uint64_t seed,
                                               std::size_t candidates) {
  if (dim == 0 || n == 0) throw std::invalid_argument("lhs: dim and n must be >= 1");
  if (candidates == 0) throw std::invalid_argument("lhs: candidates must be >= 1");
  Rng rng(seed);
  std::vector<std::vector<Point>> designs;
  designs.reserve(candidates);
  for (std::size_t c = 0; c < candidates; ++c) {
    std::vector<Point> pts(n, Point(dim, 0.0));
    for (std::size_t d = 0; d < dim; ++d) {
      const auto perm = rng.permutation(n);
      for (std::size_t i = 0; i < n; ++i) {
        // stratum center + jitter of +-0.5 stratum width, i.e. uniform in the stratum
        const double jitter = rng.uniform() - 0.5;
        pts[i][d] = (static_cast<double>(perm[i]) + 0.5 + jitter) / static_cast<double>(n);
      }
    }
    designs.push_back(std::move(pts));
  }
  return designs;
}

std::vector<Point> lhs(std::size_t dim, std::size_t n, std::uint64_t seed,
                       std::size_t candidates) {
  auto designs = lhs_candidates(dim, n, seed, candidates);
  std::size_t best = 0;
  double best_dist = -1.0;
  for (std::size_t c = 0; c < designs.size(); ++c) {
    const double d = (n > 1) ? min_pairwise_distance(designs[c]) : 0.0;
    if (d > best_dist) {
      best_dist = d;
      best = c;
    }
  }
  return designs[best];
}

double radical_inverse(std::uint64_t index, std::uint32_t base) {
  double result = 0.0;
  double inv = 1.0 / static_cast<double>(base);
  double frac = inv;
  while (index > 0) {
    result += static_cast<double>(index % base) * frac;
    index /= base;
    frac *= inv;
  }
  return result;
}

HaltonSampler::HaltonSampler(std::size_t dim) : dim_(dim) {
  if (dim == 0 || dim > 64)
    throw std::invalid_argument("halton: dim must be in [1, 64]");
}

std::vector<Point> HaltonSampler::next(std::size_t k) {
  std::vector<Point> out;
  out.reserve(k);
  for (std::size_t i = 0; i < k; ++i) {
    Point p(dim_);
    const std::uint64_t index = emitted_ + i + 1;  // sequence starts at 1
    for (std::size_t d = 0; d < dim_; ++d) p[d] = radical_inverse(index, kPrimes[d]);
    out.push_back(std::move(p));
  }
  emitted_ += k;
  return out;
}

std::size_t SobolSampler::max_dim() { return kSobolMaxDim; }

SobolSampler::SobolSampler(std::size_t dim) : dim_(dim), current_(dim, 0) {
  if (dim == 0 || dim > kSobolMaxDim)
    throw std::invalid_argument("sobol: dim must be in [1, " +
                                std::to_string(kSobolMaxDim) + "]");
  direction_.reserve(dim);
  for (std::size_t d = 0; d < dim; ++d) direction_.push_back(direction_numbers(d));
}

std::vector<Point> SobolSampler::next(std::size_t k) {
  std::vector<Point> out;
  out.reserve(k);
  for (std::size_t i = 0; i < k; ++i) {
    // Gray-code step: flip the direction number at the rightmost zero bit of
    // the running index. Index 0 would be the all-zeros point; it is skipped,
    // so the first emitted point is the state after one step.
    std::uint32_t c = 0;
    std::size_t value = index_;
    while (value & 1) {
      value >>= 1;
      ++c;
    }
    for (std::size_t d = 0; d < dim_; ++d) current_[d] ^= direction_[d][c];
    ++index_;
    Point p(dim_);
    for (std::size_t d = 0; d < dim_; ++d)
      p[d] = static_cast<double>(current_[d]) * 0x1.0p-32;
    out.push_back(std::move(p));
  }
  return out;
}

double star_discrepancy_bruteforce(const std::vector<Point>& points) {
  if (points.empty()) throw std::invalid_argument("star discrepancy: no points");
  const std::size_t n = points.size();
  const std::size_t dim = points[0].size();
  if (n > 256 || dim == 0 || dim > 3)
    throw std::invalid_argument("star discrepancy: limits are n <= 256, dim <= 3");

  // Candidate box corners per dimension: each point coordinate plus 1.0.
  std::vector<std::vector<double>> grid(dim);
  for (std::size_t d = 0; d < dim; ++d) {
    for (const auto& p : points) grid[d].push_back(p[d]);
    grid[d].push_back(1.0);
  }

  double worst = 0.0;
  std::vector<std::size_t> idx(dim, 0);
  while (true) {
    double volume = 1.0;
    std::vector<double> corner(dim);
    for (std::size_t d = 0; d < dim; ++d) {
      corner[d] = grid[d][idx[d]];
      volume *= corner[d];
    }
    std::size_t open_count = 0, closed_count = 0;
    for (const auto& p : points) {
      bool open_in = true, closed_in = true;
      for (std::size_t d = 0; d < dim; ++d) {
        if (!(p[d] < corner[d])) open_in = false;
        if (!(p[d] <= corner[d])) closed_in = false;
      }
      open_count += open_in;
      closed_count += closed_in;
    }
    const double nn = static_cast<double>(n);
    worst = std::max(worst, volume - static_cast<double>(open_count) / nn);
    worst = std::max(worst, static_cast<double>(closed_count) / nn - volume);

    std::size_t d = 0;
    while (d < dim && ++idx[d] == grid[d].size()) idx[d++] = 0;
    if (d == dim) break;
  }
  return worst;
}

}  // namespace acceldse
