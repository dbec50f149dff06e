#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "rbsde/errors.hpp"
#include "rbsde/time_grid.hpp"

namespace rbsde {

namespace detail {

/// splitmix64 step; used to derive independent per-path seeds from
/// (seed, stream, path index) so path m never depends on how many other
/// paths were drawn before it or on any threading of the outer loop.
inline std::uint64_t splitmix64(std::uint64_t& x) {
  x += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = x;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline std::uint64_t path_seed(std::uint64_t seed, std::uint64_t stream,
                               std::uint64_t path) {
  std::uint64_t x = seed;
  std::uint64_t a = splitmix64(x);
  x ^= stream * 0xd1342543de82ef95ULL + 0x2545f4914f6cdd1dULL;
  std::uint64_t b = splitmix64(x);
  x ^= path * 0xda942042e4dd58b5ULL + 0x9e3779b97f4a7c15ULL;
  std::uint64_t c = splitmix64(x);
  return a ^ (b + 0x165667b19e3779f9ULL) ^ (c << 1);
}

}  // namespace detail

/// Monte-Carlo ensemble of d-dimensional Brownian paths sampled on a uniform
/// grid. Storage is flat, path-major: position(m, i) is contiguous in the
/// component index.
class PathEnsemble {
 public:
  PathEnsemble(const TimeGrid& grid, int dim, int count, std::uint64_t seed,
               std::uint64_t stream)
      : grid_(grid),
        dim_(dim),
        count_(count),
        seed_(seed),
        stream_(stream),
        w_(static_cast<std::size_t>(count) * (grid.steps() + 1) * dim, 0.0) {}

  const TimeGrid& grid() const { return grid_; }
  int dim() const { return dim_; }
  int count() const { return count_; }
  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream() const { return stream_; }

  std::span<const double> position(int m, int step) const {
    return {w_.data() + offset(m, step), static_cast<std::size_t>(dim_)};
  }
  std::span<double> position(int m, int step) {
    return {w_.data() + offset(m, step), static_cast<std::size_t>(dim_)};
  }

  /// W_{i+1} - W_i along path m, component c.
  double increment(int m, int step, int c) const {
    return w_[offset(m, step + 1) + c] - w_[offset(m, step) + c];
  }

  /// Copy of paths [begin, begin + n). Used for batch-mean error bars.
  PathEnsemble slice(int begin, int n) const {
    if (begin < 0 || n < 1 || begin + n > count_)
      throw ParameterError("PathEnsemble::slice: range out of bounds");
    PathEnsemble out(grid_, dim_, n, seed_, stream_);
    const std::size_t row = static_cast<std::size_t>(grid_.steps() + 1) * dim_;
    std::copy(w_.begin() + begin * row, w_.begin() + (begin + n) * row,
              out.w_.begin());
    return out;
  }

 private:
  std::size_t offset(int m, int step) const {
    return (static_cast<std::size_t>(m) * (grid_.steps() + 1) + step) * dim_;
  }

  TimeGrid grid_;
  int dim_;
  int count_;
  std::uint64_t seed_;
  std::uint64_t stream_;
  std::vector<double> w_;
};

/// Draws an ensemble of Brownian paths started at 0. Each path owns a
/// counter-derived RNG stream, so the result is a pure function of
/// (grid, d, count, seed, stream) and identical no matter how the loop is
/// scheduled.
inline PathEnsemble simulate_paths(const TimeGrid& grid, int dim, int count,
                                   std::uint64_t seed,
                                   std::uint64_t stream = 0) {
  if (dim < 1) throw ParameterError("simulate_paths: dimension must be >= 1");
  if (count < 1) throw ParameterError("simulate_paths: need at least one path");
  PathEnsemble ens(grid, dim, count, seed, stream);
  const double sdt = grid.sqrt_dt();
  for (int m = 0; m < count; ++m) {
    std::mt19937_64 eng(detail::path_seed(seed, stream, m));
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (int i = 0; i < grid.steps(); ++i) {
      auto prev = ens.position(m, i);
      auto next = ens.position(m, i + 1);
      for (int c = 0; c < dim; ++c) next[c] = prev[c] + sdt * gauss(eng);
    }
  }
  return ens;
}

}  // namespace rbsde
