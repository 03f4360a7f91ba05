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

#include "afford/projection.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "afford/detection.hpp"
#include "afford/error.hpp"
#include "io_util.hpp"

namespace afford::projection {

namespace {

constexpr double kQFloor = 1e-12;
constexpr int kMaxBracketSteps = 64;
constexpr int kMaxBisectionSteps = 200;
constexpr double kEntropyTolerance = 1e-10;
constexpr double kMinGain = 0.01;
constexpr double kInitStddev = 1e-4;

[[noreturn]] void bad_params(const std::string& msg) {
  throw Error(ErrorCode::kInvalidParams, msg);
}

// Entropy (nats) of the Gaussian row with precision `beta`; fills `row` with
// the unnormalized weights and returns their sum through `total`.
double row_entropy(std::span<const double> shifted, std::size_t self, double beta,
                   std::span<double> row, double& total) {
  total = 0.0;
  double weighted = 0.0;
  for (std::size_t j = 0; j < shifted.size(); ++j) {
    if (j == self) {
      row[j] = 0.0;
      continue;
    }
    const double w = std::exp(-beta * shifted[j]);
    row[j] = w;
    total += w;
    weighted += shifted[j] * w;
  }
  return std::log(total) + beta * weighted / total;
}

}  // namespace

Matrix Matrix::from_rows(const std::vector<std::vector<double>>& rows) {
  if (rows.empty()) return {};
  Matrix m(rows.size(), rows.front().size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].size() != m.cols()) {
      throw Error(ErrorCode::kDimensionMismatch,
                  "row " + std::to_string(r) + " has " + std::to_string(rows[r].size()) +
                      " columns, expected " + std::to_string(m.cols()));
    }
    std::copy(rows[r].begin(), rows[r].end(), m.row(r).begin());
  }
  return m;
}

void validate_params(const TsneParams& p) {
  if (!(std::isfinite(p.perplexity) && p.perplexity > 0.0)) bad_params("perplexity must be > 0");
  if (p.iterations < 0 || p.early_exaggeration_iters < 0 || p.momentum_switch_iter < 0) {
    bad_params("iteration counts must be non-negative");
  }
  if (p.iterations < p.early_exaggeration_iters) {
    bad_params("iterations must be >= early_exaggeration_iters");
  }
  if (!(std::isfinite(p.early_exaggeration_factor) && p.early_exaggeration_factor > 0.0)) {
    bad_params("early_exaggeration_factor must be > 0");
  }
  if (!(std::isfinite(p.learning_rate) && p.learning_rate > 0.0)) {
    bad_params("learning_rate must be > 0");
  }
  for (double m : {p.initial_momentum, p.final_momentum}) {
    if (!(m >= 0.0 && m < 1.0)) bad_params("momentum must lie in [0, 1)");
  }
}

Matrix squared_distances(const Matrix& points) {
  const std::size_t n = points.rows();
  Matrix d(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto xi = points.row(i);
    for (std::size_t j = i + 1; j < n; ++j) {
      const auto xj = points.row(j);
      double s = 0.0;
      for (std::size_t k = 0; k < xi.size(); ++k) {
        const double diff = xi[k] - xj[k];
        s += diff * diff;
      }
      d(i, j) = s;
      d(j, i) = s;
    }
  }
  return d;
}

Matrix conditional_affinities(const Matrix& embeddings, double perplexity) {
  const std::size_t n = embeddings.rows();
  if (n < 3) {
    throw Error(ErrorCode::kTooFewPoints,
                "t-SNE needs at least 3 points, got " + std::to_string(n));
  }
  if (!(std::isfinite(perplexity) && perplexity > 0.0)) bad_params("perplexity must be > 0");
  const double limit = static_cast<double>(n - 1) / 3.0;
  if (perplexity > limit) {
    throw Error(ErrorCode::kPerplexityTooLarge,
                "perplexity " + std::to_string(perplexity) + " exceeds (N-1)/3 = " +
                    std::to_string(limit));
  }
  const Matrix dist = squared_distances(embeddings);
  if (std::all_of(dist.values().begin(), dist.values().end(),
                  [](double v) { return v == 0.0; })) {
    throw Error(ErrorCode::kDegenerateDistances, "all pairwise distances are zero");
  }

  const double target = std::log(perplexity);
  Matrix p(n, n);
  std::vector<double> shifted(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto d = dist.row(i);
    double d_min = std::numeric_limits<double>::infinity();
    double d_max = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      d_min = std::min(d_min, d[j]);
      d_max = std::max(d_max, d[j]);
    }
    double spread = 0.0;
    std::size_t spread_count = 0;
    for (std::size_t j = 0; j < n; ++j) {
      shifted[j] = j == i ? 0.0 : d[j] - d_min;
      if (j != i && shifted[j] > 0.0) {
        spread += shifted[j];
        ++spread_count;
      }
    }

    auto row = p.row(i);
    double total = 0.0;
    if (d_max == d_min) {
      // Equidistant neighbours: every bandwidth gives the uniform row.
      row_entropy(shifted, i, 0.0, row, total);
    } else {
      double beta = static_cast<double>(spread_count) / spread;
      double lo = 0.0;
      double hi = std::numeric_limits<double>::infinity();
      double h = row_entropy(shifted, i, beta, row, total);
      // Entropy falls as beta grows: double or halve until bracketed.
      for (int step = 0; std::abs(h - target) > kEntropyTolerance; ++step) {
        if (h > target) {
          lo = beta;
        } else {
          hi = beta;
        }
        if ((lo > 0.0 && std::isfinite(hi)) || step == kMaxBracketSteps) break;
        beta = h > target ? beta * 2.0 : beta * 0.5;
        h = row_entropy(shifted, i, beta, row, total);
      }
      for (int step = 0; step < kMaxBisectionSteps && std::abs(h - target) > kEntropyTolerance &&
                         lo > 0.0 && std::isfinite(hi);
           ++step) {
        beta = std::sqrt(lo * hi);
        h = row_entropy(shifted, i, beta, row, total);
        if (h > target) {
          lo = beta;
        } else {
          hi = beta;
        }
      }
    }
    for (double& v : row) v /= total;
  }
  return p;
}

Matrix symmetrize(const Matrix& conditional) {
  const std::size_t n = conditional.rows();
  Matrix p(n, n);
  const double scale = 1.0 / (2.0 * static_cast<double>(n));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double v = (conditional(i, j) + conditional(j, i)) * scale;
      p(i, j) = v;
      p(j, i) = v;
    }
  }
  return p;
}

Matrix student_affinities(std::span<const std::array<double, 2>> points) {
  const std::size_t n = points.size();
  Matrix q(n, n);
  double z = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double dx = points[i][0] - points[j][0];
      const double dy = points[i][1] - points[j][1];
      const double num = 1.0 / (1.0 + dx * dx + dy * dy);
      q(i, j) = num;
      q(j, i) = num;
      z += 2.0 * num;
    }
  }
  if (z > 0.0) {
    for (double& v : q.values()) v /= z;
  }
  return q;
}

double kl_divergence(std::span<const double> p, std::span<const double> q) {
  if (p.size() != q.size()) bad_params("KL divergence of distributions of different sizes");
  double kl = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] > 0.0) kl += p[i] * std::log(p[i] / std::max(q[i], kQFloor));
  }
  return std::max(kl, 0.0);
}

double effective_perplexity(double requested, std::size_t num_points) {
  if (!(std::isfinite(requested) && requested > 0.0)) bad_params("perplexity must be > 0");
  if (requested >= static_cast<double>(num_points)) {
    throw Error(ErrorCode::kPerplexityTooLarge,
                "perplexity " + std::to_string(requested) + " is not below N = " +
                    std::to_string(num_points));
  }
  return std::min(requested, static_cast<double>(num_points - 1) / 3.0);
}

ProjectionLayout tsne_project(const Matrix& embeddings,
                              std::vector<std::string> object_ids,
                              const TsneParams& params) {
  validate_params(params);
  const std::size_t n = embeddings.rows();
  if (object_ids.size() != n) bad_params("one object id per embedding row required");
  if (n < 3) {
    throw Error(ErrorCode::kTooFewPoints,
                "t-SNE needs at least 3 points, got " + std::to_string(n));
  }
  const Matrix p =
      symmetrize(conditional_affinities(embeddings, effective_perplexity(params.perplexity, n)));

  std::mt19937_64 rng(params.seed);
  std::normal_distribution<double> init(0.0, kInitStddev);
  std::vector<std::array<double, 2>> y(n);
  for (auto& pt : y) {
    pt[0] = init(rng);
    pt[1] = init(rng);
  }
  std::vector<std::array<double, 2>> velocity(n, {0.0, 0.0});
  std::vector<std::array<double, 2>> gains(n, {1.0, 1.0});
  std::vector<std::array<double, 2>> grad(n);
  Matrix num(n, n);

  auto kl_now = [&] {
    const Matrix q = student_affinities(y);
    return kl_divergence(p.values(), q.values());
  };

  ProjectionLayout layout;
  if (params.early_exaggeration_iters == 0) layout.exaggeration_kl = kl_now();

  for (int iter = 0; iter < params.iterations; ++iter) {
    const double exaggeration =
        iter < params.early_exaggeration_iters ? params.early_exaggeration_factor : 1.0;
    const double momentum =
        iter < params.momentum_switch_iter ? params.initial_momentum : params.final_momentum;

    double z = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        const double dx = y[i][0] - y[j][0];
        const double dy = y[i][1] - y[j][1];
        const double v = 1.0 / (1.0 + dx * dx + dy * dy);
        num(i, j) = v;
        num(j, i) = v;
        z += 2.0 * v;
      }
    }
    // dC/dy_i = 4 sum_j (p_ij - q_ij) (y_i - y_j) / (1 + |y_i - y_j|^2)
    for (std::size_t i = 0; i < n; ++i) {
      double gx = 0.0;
      double gy = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        if (j == i) continue;
        const double w = num(i, j);
        const double mult = (exaggeration * p(i, j) - w / z) * w;
        gx += mult * (y[i][0] - y[j][0]);
        gy += mult * (y[i][1] - y[j][1]);
      }
      grad[i] = {4.0 * gx, 4.0 * gy};
    }

    double mean_x = 0.0;
    double mean_y = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      for (int c = 0; c < 2; ++c) {
        const bool same_sign = (grad[i][c] > 0.0) == (velocity[i][c] > 0.0);
        gains[i][c] = same_sign ? gains[i][c] * 0.8 : gains[i][c] + 0.2;
        gains[i][c] = std::max(gains[i][c], kMinGain);
        velocity[i][c] = momentum * velocity[i][c] -
                         params.learning_rate * gains[i][c] * grad[i][c];
        y[i][c] += velocity[i][c];
      }
      mean_x += y[i][0];
      mean_y += y[i][1];
    }
    mean_x /= static_cast<double>(n);
    mean_y /= static_cast<double>(n);
    for (auto& pt : y) {
      pt[0] -= mean_x;
      pt[1] -= mean_y;
      if (!std::isfinite(pt[0]) || !std::isfinite(pt[1])) {
        throw Error(ErrorCode::kNumericalDivergence,
                    "layout diverged at iteration " + std::to_string(iter));
      }
    }
    if (iter + 1 == params.early_exaggeration_iters) layout.exaggeration_kl = kl_now();
  }

  layout.final_kl = kl_now();
  layout.object_ids = std::move(object_ids);
  layout.points = std::move(y);
  return layout;
}

Matrix embedding_matrix(const DetectionSet& detections) {
  Matrix m(detections.objects.size(), detections.dimension);
  for (std::size_t i = 0; i < detections.objects.size(); ++i) {
    const auto& e = detections.objects[i].embedding;
    if (e.size() != detections.dimension) {
      throw Error(ErrorCode::kDimensionMismatch,
                  "object " + detections.objects[i].object_id + " has dimension " +
                      std::to_string(e.size()));
    }
    std::copy(e.begin(), e.end(), m.row(i).begin());
  }
  return m;
}

ProjectionLayout tsne_project(const DetectionSet& detections, const TsneParams& params) {
  std::vector<std::string> ids;
  ids.reserve(detections.objects.size());
  for (const auto& o : detections.objects) ids.push_back(o.object_id);
  return tsne_project(embedding_matrix(detections), std::move(ids), params);
}

std::string layout_to_json(const ProjectionLayout& layout) {
  detail::OrderedJson root;
  root["object_ids"] = layout.object_ids;
  root["points"] = detail::OrderedJson::array();
  for (const auto& pt : layout.points) root["points"].push_back({pt[0], pt[1]});
  root["final_kl"] = layout.final_kl;
  root["exaggeration_kl"] = layout.exaggeration_kl;
  return root.dump() + "\n";
}

ProjectionLayout layout_from_json(std::string_view json_text) {
  const auto root = detail::parse_json(json_text, "projection layout");
  ProjectionLayout layout;
  const auto& ids = detail::require(root, "object_ids", "projection layout");
  const auto& pts = detail::require(root, "points", "projection layout");
  if (!ids.is_array() || !pts.is_array() || ids.size() != pts.size()) {
    throw Error(ErrorCode::kSchemaError, "object_ids and points must be arrays of equal length");
  }
  for (const auto& id : ids) {
    if (!id.is_string()) throw Error(ErrorCode::kSchemaError, "object_ids must be strings");
    layout.object_ids.push_back(id.get<std::string>());
  }
  for (const auto& pt : pts) {
    if (!pt.is_array() || pt.size() != 2 || !pt[0].is_number() || !pt[1].is_number()) {
      throw Error(ErrorCode::kSchemaError, "points must be [x, y] pairs");
    }
    layout.points.push_back({pt[0].get<double>(), pt[1].get<double>()});
  }
  layout.final_kl = detail::require_number(root, "final_kl", "projection layout");
  if (root.contains("exaggeration_kl")) {
    layout.exaggeration_kl = detail::require_number(root, "exaggeration_kl", "projection layout");
  }
  return layout;
}

}  // namespace afford::projection
