// Copyright 2026 The randproj Authors
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef RANDPROJ_SAMPLING_H_
#define RANDPROJ_SAMPLING_H_

#include <cstdint>
#include <limits>
#include <optional>
#include <utility>
#include <vector>

#include "randproj/types.h"

namespace randproj {

// Counter-based generator: the k-th output is a SplitMix64 finalizer applied
// to (key + k * golden). Identical seed gives an identical sequence on every
// platform, and streams can be seeked or split without shared state.
//
// Uniform and Gaussian variates are produced here rather than through
// <random> distributions, whose outputs differ between standard libraries.
class RngStream {
 public:
  using result_type = std::uint64_t;

  explicit RngStream(std::uint64_t seed = 0) : seed_(seed), key_(mix(seed)) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() {
    return std::numeric_limits<result_type>::max();
  }

  result_type operator()() { return next_u64(); }
  std::uint64_t next_u64();

  // Uniform on [0, 1) with 53 random bits. One event.
  double uniform();
  // Standard normal by Box-Muller. Two events.
  double normal();
  Vector normal_vector(Eigen::Index n);

  std::uint64_t seed() const { return seed_; }
  std::uint64_t counter() const { return counter_; }
  void seek(std::uint64_t counter) { counter_ = counter; }

  // Independent child stream, a pure function of (seed, index).
  RngStream split(std::uint64_t index) const;

  static std::uint64_t mix(std::uint64_t z);

 private:
  std::uint64_t seed_;
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

// Probability vector over indices {0, ..., m-1}.
class DiscreteDistribution {
 public:
  // Throws InvalidInputError unless all weights are >= 0 and sum to 1 within
  // 1e-12.
  explicit DiscreteDistribution(Vector weights);

  Eigen::Index size() const { return weights_.size(); }
  const Vector& weights() const { return weights_; }
  double weight(Eigen::Index i) const { return weights_(i); }
  // Smallest strictly positive weight.
  double min_positive_weight() const;
  double min_weight() const { return weights_.minCoeff(); }

  // Inverse-CDF lookup for u in [0, 1).
  Eigen::Index index_for(double u) const;

 private:
  Vector weights_;
  std::vector<double> cumulative_;
};

// p_i = ||A_i||^2 / ||A||_F^2. Throws InvalidInputError on a zero row.
DiscreteDistribution row_norm_weights(const Matrix& a);

// p_i = 1/m. Throws InvalidInputError for m = 0.
DiscreteDistribution uniform_weights(Eigen::Index m);

// Normalizes arbitrary nonnegative weights; throws if all are zero.
DiscreteDistribution normalized_weights(const Vector& raw);

// One index drawn with one rng event.
Eigen::Index sample(const DiscreteDistribution& dist, RngStream& rng);

// N i.i.d. indices in draw order; exactly N events. Throws for N = 0.
std::vector<Eigen::Index> sample_minibatch(const DiscreteDistribution& dist,
                                           int n, RngStream& rng);

// Random sketch matrices for a linear system with m rows.
class SketchSampler {
 public:
  enum class Mode {
    kCoordinate,     // S = e_i, i ~ dist
    kRowSubset,      // q distinct columns of I_m, subset uniform
    kAggregate,      // S >= 0 with r random nonzeros, entries in (0, 1]
    kFiniteFamily,   // user-provided list with weights
  };

  // One finite family member.
  struct Member {
    Matrix sketch;
    double weight;
  };

  static SketchSampler coordinate(DiscreteDistribution dist);
  static SketchSampler row_subset(Eigen::Index m, Eigen::Index q);
  static SketchSampler aggregate(Eigen::Index m, Eigen::Index support);
  static SketchSampler finite_family(std::vector<Matrix> sketches,
                                     DiscreteDistribution dist);

  Mode mode() const { return mode_; }
  Eigen::Index rows() const { return m_; }
  // q for row-subset mode, support size for aggregate mode.
  Eigen::Index block() const { return q_; }
  const std::optional<DiscreteDistribution>& distribution() const {
    return dist_;
  }

  Matrix draw(RngStream& rng) const;

  // Number of family members, or nullopt for a continuous family. Capped at
  // `cap + 1` for combinatorial families.
  std::optional<std::uint64_t> family_size(std::uint64_t cap = 100000) const;

  // The whole family with exact weights when it has at most `cap` members.
  std::optional<std::vector<Member>> enumerate(
      std::uint64_t cap = 100000) const;

 private:
  Mode mode_ = Mode::kCoordinate;
  Eigen::Index m_ = 0;
  Eigen::Index q_ = 1;
  std::optional<DiscreteDistribution> dist_;
  std::vector<Matrix> family_;
};

}  // namespace randproj

#endif  // RANDPROJ_SAMPLING_H_
