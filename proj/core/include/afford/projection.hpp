// Copyright 2026 The Afford Authors. All Rights Reserved.
//
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

#ifndef AFFORD_PROJECTION_HPP_
#define AFFORD_PROJECTION_HPP_

// Exact t-SNE: d-dimensional embeddings to a 2D canvas layout.
//
// All reductions run in a fixed left-to-right order so that identical inputs
// and seed give bit-identical layouts.

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace afford {

struct DetectionSet;

namespace projection {

// Dense row-major matrix.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  static Matrix from_rows(const std::vector<std::vector<double>>& rows);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const {
    return data_[r * cols_ + c];
  }

  std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
  std::span<const double> row(std::size_t r) const {
    return {data_.data() + r * cols_, cols_};
  }
  std::span<const double> values() const noexcept { return data_; }
  std::span<double> values() noexcept { return data_; }

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

struct TsneParams {
  double perplexity = 30.0;
  int iterations = 1000;
  double early_exaggeration_factor = 12.0;
  int early_exaggeration_iters = 250;
  double learning_rate = 200.0;
  double initial_momentum = 0.5;
  double final_momentum = 0.8;
  int momentum_switch_iter = 250;
  std::uint64_t seed = 42;

  friend bool operator==(const TsneParams&, const TsneParams&) = default;
};

// Throws kInvalidParams.
void validate_params(const TsneParams& params);

struct ProjectionLayout {
  std::vector<std::string> object_ids;
  std::vector<std::array<double, 2>> points;
  double final_kl = 0.0;
  // KL(P || Q) right after early exaggeration stops.
  double exaggeration_kl = 0.0;

  friend bool operator==(const ProjectionLayout&,
                         const ProjectionLayout&) = default;
};

Matrix squared_distances(const Matrix& points);

// Row-normalized Gaussian affinities p_{j|i}, each row's bandwidth found by
// bisection so that 2^H(P_i) matches `perplexity`. Rows whose distances are
// all equal come out uniform whatever the bandwidth.
// Throws kTooFewPoints (N < 3), kPerplexityTooLarge (> (N-1)/3),
// kInvalidParams (perplexity <= 0) or kDegenerateDistances.
Matrix conditional_affinities(const Matrix& embeddings, double perplexity);

// (P + P^T) / 2N.
Matrix symmetrize(const Matrix& conditional);

// Student-t (one degree of freedom) affinities of a 2D layout, normalized
// over all ordered pairs i != j.
Matrix student_affinities(std::span<const std::array<double, 2>> points);

// sum p log(p / max(q, 1e-12)), with 0 log 0 = 0. Natural log.
double kl_divergence(std::span<const double> p, std::span<const double> q);

// Perplexity actually used for N points: the request clamped to (N-1)/3.
// Throws kPerplexityTooLarge when the request is not below N.
double effective_perplexity(double requested, std::size_t num_points);

// Throws anything conditional_affinities throws, kInvalidParams, or
// kNumericalDivergence if a coordinate stops being finite.
ProjectionLayout tsne_project(const Matrix& embeddings,
                              std::vector<std::string> object_ids,
                              const TsneParams& params);
ProjectionLayout tsne_project(const DetectionSet& detections,
                              const TsneParams& params);

Matrix embedding_matrix(const DetectionSet& detections);

std::string layout_to_json(const ProjectionLayout& layout);
ProjectionLayout layout_from_json(std::string_view json_text);

}  // namespace projection
}  // namespace afford

#endif  // AFFORD_PROJECTION_HPP_
