#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <span>

namespace qmclab {

/// Name recorded in run metadata for every stochastic computation.
inline constexpr const char* kGaussianAlgorithm = "mt19937_64+std::normal_distribution";

using Rng = std::mt19937_64;

/// SplitMix64 finalizer; used to derive independent per-chunk / per-trial seeds.
inline std::uint64_t mix_seed(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  return mix_seed(mix_seed(seed) ^ mix_seed(stream + 0x632be59bd9b4e019ULL));
}

class GaussianSampler {
 public:
  explicit GaussianSampler(std::uint64_t seed) : rng_(seed) {}

  double operator()() { return normal_(rng_); }

  void fill(std::span<double> out) {
    for (double& x : out) x = normal_(rng_);
  }

  /// Uniform point on the unit sphere S^{d-1} written to `out` (d = out.size()).
  void unit_vector(std::span<double> out) {
    double norm2 = 0.0;
    do {
      norm2 = 0.0;
      for (double& x : out) {
        x = normal_(rng_);
        norm2 += x * x;
      }
    } while (norm2 == 0.0);
    const double inv = 1.0 / std::sqrt(norm2);
    for (double& x : out) x *= inv;
  }

  Rng& engine() { return rng_; }

 private:
  Rng rng_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

/// Running mean / variance (Welford).
class RunningStats {
 public:
  void add(double x) {
    ++count_;
    const double delta = x - mean_;
    mean_ += delta / static_cast<double>(count_);
    m2_ += delta * (x - mean_);
  }

  void merge(const RunningStats& other) {
    if (other.count_ == 0) return;
    if (count_ == 0) {
      *this = other;
      return;
    }
    const double n1 = static_cast<double>(count_);
    const double n2 = static_cast<double>(other.count_);
    const double delta = other.mean_ - mean_;
    const double total = n1 + n2;
    mean_ += delta * n2 / total;
    m2_ += other.m2_ + delta * delta * n1 * n2 / total;
    count_ += other.count_;
  }

  std::uint64_t count() const { return count_; }
  double mean() const { return mean_; }
  double variance() const { return count_ > 1 ? m2_ / static_cast<double>(count_ - 1) : 0.0; }
  double stderr_mean() const {
    return count_ > 0 ? std::sqrt(variance() / static_cast<double>(count_)) : 0.0;
  }

 private:
  std::uint64_t count_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
};

}  // namespace qmclab
