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

#include "randproj/sampling.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <sstream>

namespace randproj {
namespace {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

// C(m, q) with early exit once it exceeds cap.
std::uint64_t binomial_capped(std::uint64_t m, std::uint64_t q,
                              std::uint64_t cap) {
  if (q > m) return 0;
  q = std::min(q, m - q);
  long double acc = 1.0L;
  for (std::uint64_t i = 1; i <= q; ++i) {
    acc = acc * static_cast<long double>(m - q + i) / static_cast<long double>(i);
    if (acc > static_cast<long double>(cap)) return cap + 1;
  }
  return static_cast<std::uint64_t>(std::llround(acc));
}

// Partial Fisher-Yates: k distinct indices out of m, k rng events.
std::vector<Eigen::Index> random_subset(Eigen::Index m, Eigen::Index k,
                                        RngStream& rng) {
  std::vector<Eigen::Index> pool(static_cast<std::size_t>(m));
  std::iota(pool.begin(), pool.end(), Eigen::Index{0});
  for (Eigen::Index i = 0; i < k; ++i) {
    const auto span = static_cast<double>(m - i);
    auto j = i + static_cast<Eigen::Index>(rng.uniform() * span);
    j = std::min(j, m - 1);
    std::swap(pool[static_cast<std::size_t>(i)], pool[static_cast<std::size_t>(j)]);
  }
  pool.resize(static_cast<std::size_t>(k));
  std::sort(pool.begin(), pool.end());
  return pool;
}

}  // namespace

std::uint64_t RngStream::mix(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::uint64_t RngStream::next_u64() {
  ++counter_;
  return mix(key_ + counter_ * kGolden);
}

double RngStream::uniform() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double RngStream::normal() {
  const double u1 = 1.0 - uniform();  // (0, 1]
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) *
         std::cos(2.0 * std::numbers::pi * u2);
}

Vector RngStream::normal_vector(Eigen::Index n) {
  Vector v(n);
  for (Eigen::Index i = 0; i < n; ++i) v(i) = normal();
  return v;
}

RngStream RngStream::split(std::uint64_t index) const {
  return RngStream(mix(seed_ ^ mix(index + kGolden)) + index);
}

DiscreteDistribution::DiscreteDistribution(Vector weights)
    : weights_(std::move(weights)) {
  if (weights_.size() == 0) {
    throw InvalidInputError("distribution needs at least one weight");
  }
  double total = 0.0;
  cumulative_.reserve(static_cast<std::size_t>(weights_.size()));
  for (Eigen::Index i = 0; i < weights_.size(); ++i) {
    if (!(weights_(i) >= 0.0) || !std::isfinite(weights_(i))) {
      throw InvalidInputError("distribution weights must be nonnegative");
    }
    total += weights_(i);
    cumulative_.push_back(total);
  }
  if (std::abs(total - 1.0) > 1e-12) {
    std::ostringstream os;
    os.precision(17);
    os << "distribution weights sum to " << total << ", expected 1";
    throw InvalidInputError(os.str());
  }
  for (double& c : cumulative_) c /= total;
}

double DiscreteDistribution::min_positive_weight() const {
  double best = 0.0;
  for (Eigen::Index i = 0; i < weights_.size(); ++i) {
    if (weights_(i) > 0.0 && (best == 0.0 || weights_(i) < best)) {
      best = weights_(i);
    }
  }
  return best;
}

Eigen::Index DiscreteDistribution::index_for(double u) const {
  auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
  auto i = static_cast<Eigen::Index>(it - cumulative_.begin());
  if (i >= size()) {
    // u rounded past the last cumulative value; take the last positive entry.
    i = size() - 1;
    while (i > 0 && weights_(i) == 0.0) --i;
  }
  return i;
}

DiscreteDistribution row_norm_weights(const Matrix& a) {
  if (a.rows() == 0) throw InvalidInputError("matrix has no rows");
  const Vector row_sq = a.rowwise().squaredNorm();
  for (Eigen::Index i = 0; i < row_sq.size(); ++i) {
    if (!(row_sq(i) > 0.0)) {
      throw InvalidInputError("row " + std::to_string(i) +
                              " is zero; row-norm weight undefined");
    }
  }
  return DiscreteDistribution(row_sq / row_sq.sum());
}

DiscreteDistribution uniform_weights(Eigen::Index m) {
  if (m <= 0) throw InvalidInputError("uniform weights need m >= 1");
  return DiscreteDistribution(
      Vector::Constant(m, 1.0 / static_cast<double>(m)));
}

DiscreteDistribution normalized_weights(const Vector& raw) {
  if (raw.size() == 0 || (raw.array() < 0.0).any() || !raw.allFinite()) {
    throw InvalidInputError("weights must be finite and nonnegative");
  }
  const double total = raw.sum();
  if (!(total > 0.0)) throw InvalidInputError("weights are all zero");
  return DiscreteDistribution(raw / total);
}

Eigen::Index sample(const DiscreteDistribution& dist, RngStream& rng) {
  return dist.index_for(rng.uniform());
}

std::vector<Eigen::Index> sample_minibatch(const DiscreteDistribution& dist,
                                           int n, RngStream& rng) {
  if (n < 1) throw InvalidInputError("minibatch size must be >= 1");
  std::vector<Eigen::Index> out;
  out.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) out.push_back(sample(dist, rng));
  return out;
}

SketchSampler SketchSampler::coordinate(DiscreteDistribution dist) {
  SketchSampler s;
  s.mode_ = Mode::kCoordinate;
  s.m_ = dist.size();
  s.q_ = 1;
  s.dist_ = std::move(dist);
  return s;
}

SketchSampler SketchSampler::row_subset(Eigen::Index m, Eigen::Index q) {
  if (m < 1 || q < 1 || q > m) {
    throw InvalidInputError("row-subset sketch needs 1 <= q <= m");
  }
  SketchSampler s;
  s.mode_ = Mode::kRowSubset;
  s.m_ = m;
  s.q_ = q;
  return s;
}

SketchSampler SketchSampler::aggregate(Eigen::Index m, Eigen::Index support) {
  if (m < 1 || support < 1 || support > m) {
    throw InvalidInputError("aggregate sketch needs 1 <= support <= m");
  }
  SketchSampler s;
  s.mode_ = Mode::kAggregate;
  s.m_ = m;
  s.q_ = support;
  return s;
}

SketchSampler SketchSampler::finite_family(std::vector<Matrix> sketches,
                                           DiscreteDistribution dist) {
  if (sketches.empty() ||
      static_cast<Eigen::Index>(sketches.size()) != dist.size()) {
    throw InvalidInputError("sketch family and weights differ in length");
  }
  const Eigen::Index m = sketches.front().rows();
  for (const Matrix& s : sketches) {
    if (s.rows() != m || s.cols() < 1) {
      throw InvalidInputError("sketch family members must be m x q");
    }
  }
  SketchSampler s;
  s.mode_ = Mode::kFiniteFamily;
  s.m_ = m;
  s.q_ = sketches.front().cols();
  s.dist_ = std::move(dist);
  s.family_ = std::move(sketches);
  return s;
}

Matrix SketchSampler::draw(RngStream& rng) const {
  switch (mode_) {
    case Mode::kCoordinate: {
      Matrix s = Matrix::Zero(m_, 1);
      s(sample(*dist_, rng), 0) = 1.0;
      return s;
    }
    case Mode::kRowSubset: {
      Matrix s = Matrix::Zero(m_, q_);
      const auto rows = random_subset(m_, q_, rng);
      for (Eigen::Index j = 0; j < q_; ++j) {
        s(rows[static_cast<std::size_t>(j)], j) = 1.0;
      }
      return s;
    }
    case Mode::kAggregate: {
      Matrix s = Matrix::Zero(m_, 1);
      const auto rows = random_subset(m_, q_, rng);
      for (Eigen::Index r : rows) s(r, 0) = 1.0 - rng.uniform();
      return s;
    }
    case Mode::kFiniteFamily:
      return family_[static_cast<std::size_t>(sample(*dist_, rng))];
  }
  return {};
}

std::optional<std::uint64_t> SketchSampler::family_size(
    std::uint64_t cap) const {
  switch (mode_) {
    case Mode::kCoordinate:
      return static_cast<std::uint64_t>(m_);
    case Mode::kRowSubset:
      return binomial_capped(static_cast<std::uint64_t>(m_),
                             static_cast<std::uint64_t>(q_), cap);
    case Mode::kAggregate:
      return std::nullopt;
    case Mode::kFiniteFamily:
      return family_.size();
  }
  return std::nullopt;
}

std::optional<std::vector<SketchSampler::Member>> SketchSampler::enumerate(
    std::uint64_t cap) const {
  const auto count = family_size(cap);
  if (!count || *count > cap) return std::nullopt;
  std::vector<Member> out;
  out.reserve(static_cast<std::size_t>(*count));
  switch (mode_) {
    case Mode::kCoordinate:
      for (Eigen::Index i = 0; i < m_; ++i) {
        Matrix s = Matrix::Zero(m_, 1);
        s(i, 0) = 1.0;
        out.push_back({std::move(s), dist_->weight(i)});
      }
      break;
    case Mode::kRowSubset: {
      // Lexicographic combinations of q rows out of m.
      std::vector<Eigen::Index> idx(static_cast<std::size_t>(q_));
      std::iota(idx.begin(), idx.end(), Eigen::Index{0});
      const double w = 1.0 / static_cast<double>(*count);
      while (true) {
        Matrix s = Matrix::Zero(m_, q_);
        for (Eigen::Index j = 0; j < q_; ++j) {
          s(idx[static_cast<std::size_t>(j)], j) = 1.0;
        }
        out.push_back({std::move(s), w});
        Eigen::Index j = q_ - 1;
        while (j >= 0 && idx[static_cast<std::size_t>(j)] == m_ - q_ + j) --j;
        if (j < 0) break;
        ++idx[static_cast<std::size_t>(j)];
        for (Eigen::Index k = j + 1; k < q_; ++k) {
          idx[static_cast<std::size_t>(k)] = idx[static_cast<std::size_t>(k - 1)] + 1;
        }
      }
      break;
    }
    case Mode::kAggregate:
      return std::nullopt;
    case Mode::kFiniteFamily:
      for (std::size_t i = 0; i < family_.size(); ++i) {
        out.push_back(
            {family_[i], dist_->weight(static_cast<Eigen::Index>(i))});
      }
      break;
  }
  return out;
}

}  // namespace randproj
