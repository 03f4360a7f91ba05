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

#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "afford/projection.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

namespace {

using namespace afford;
using namespace afford::projection;
using testutil::code_of;

Matrix blob(std::size_t n, std::size_t d, std::uint64_t seed) {
  oracle::Gen g(seed);
  std::vector<std::vector<double>> rows;
  for (std::size_t i = 0; i < n; ++i) rows.push_back(g.gaussian_vector(d));
  return Matrix::from_rows(rows);
}

std::vector<std::string> ids(std::size_t n) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back("o" + std::to_string(i));
  return out;
}

std::vector<double> row_vec(const Matrix& m, std::size_t i) {
  auto r = m.row(i);
  return {r.begin(), r.end()};
}

TEST(Affinities, EquilateralTriangleIsUniform) {
  // Basis vectors: every pairwise squared distance is exactly 2.
  const auto x = Matrix::from_rows({{1.0, 0.0, 0.0}, {0.0, 1.0, 0.0}, {0.0, 0.0, 1.0}});
  for (double perplexity : {0.3, 0.5, 0.6}) {
    const auto p = conditional_affinities(x, perplexity);
    for (std::size_t i = 0; i < 3; ++i) {
      for (std::size_t j = 0; j < 3; ++j) EXPECT_NEAR(p(i, j), i == j ? 0.0 : 0.5, 1e-9);
    }
  }
}

TEST(Affinities, BlobRowsHitTargetPerplexity) {
  const auto x = blob(50, 8, 1);
  const auto p = conditional_affinities(x, 10.0);
  for (std::size_t i = 0; i < 50; ++i) {
    const auto row = row_vec(p, i);
    EXPECT_EQ(p(i, i), 0.0);
    EXPECT_NEAR(std::accumulate(row.begin(), row.end(), 0.0), 1.0, 1e-9);
    const double perp = oracle::row_perplexity(row, i);
    EXPECT_GE(perp, 9.999);
    EXPECT_LE(perp, 10.001);
  }
}

TEST(Affinities, Errors) {
  EXPECT_EQ(code_of([] { conditional_affinities(Matrix::from_rows({{0.0}, {1.0}}), 0.1); }),
            ErrorCode::kTooFewPoints);
  EXPECT_EQ(code_of([] { conditional_affinities(blob(10, 2, 1), 3.5); }), ErrorCode::kPerplexityTooLarge);
  EXPECT_EQ(code_of([] { conditional_affinities(Matrix(5, 3, 1.0), 1.0); }), ErrorCode::kDegenerateDistances);
  EXPECT_EQ(code_of([] { conditional_affinities(blob(10, 2, 1), -1.0); }), ErrorCode::kInvalidParams);
}

// Randomized: different sizes, dimensions, scales and perplexities.
TEST(AffinitiesProperty, CalibratedRowsAndValidJointDistribution) {
  oracle::Gen g(21);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t n = 4 + g.index(60);
    const std::size_t d = 1 + g.index(10);
    const double scale = std::pow(10.0, g.uniform(-3.0, 3.0));
    std::vector<std::vector<double>> rows;
    for (std::size_t i = 0; i < n; ++i) rows.push_back(g.gaussian_vector(d, scale));
    const double perplexity = g.uniform(1.0, static_cast<double>(n - 1) / 3.0);
    const auto c = conditional_affinities(Matrix::from_rows(rows), perplexity);
    for (std::size_t i = 0; i < n; ++i) {
      EXPECT_NEAR(oracle::row_perplexity(row_vec(c, i), i), perplexity, 1e-3)
          << "n=" << n << " d=" << d << " scale=" << scale;
    }
    const auto p = symmetrize(c);
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        EXPECT_EQ(p(i, j), p(j, i));
        EXPECT_GE(p(i, j), 0.0);
        total += p(i, j);
      }
    }
    EXPECT_NEAR(total, 1.0, 1e-9);
  }
}

TEST(Symmetrize, UniformRows) {
  Matrix c(3, 3, 0.5);
  for (std::size_t i = 0; i < 3; ++i) c(i, i) = 0.0;
  const auto p = symmetrize(c);
  for (std::size_t i = 0; i < 3; ++i) {
    for (std::size_t j = 0; j < 3; ++j) EXPECT_NEAR(p(i, j), i == j ? 0.0 : 1.0 / 6.0, 1e-15);
  }
}

TEST(Symmetrize, AsymmetricFixture) {
  const auto c = Matrix::from_rows({{0.0, 0.7, 0.3}, {0.2, 0.0, 0.8}, {0.5, 0.5, 0.0}});
  const auto p = symmetrize(c);
  // (c_ij + c_ji) / (2 * 3)
  EXPECT_NEAR(p(0, 1), 0.9 / 6.0, 1e-15);
  EXPECT_NEAR(p(0, 2), 0.8 / 6.0, 1e-15);
  EXPECT_NEAR(p(1, 2), 1.3 / 6.0, 1e-15);
  EXPECT_EQ(p(1, 0), p(0, 1));
  EXPECT_EQ(p(2, 1), p(1, 2));
  EXPECT_EQ(p(1, 1), 0.0);
}

TEST(KlDivergence, Fixtures) {
  const std::vector<double> u{0.25, 0.25, 0.25, 0.25};
  EXPECT_EQ(kl_divergence(u, u), 0.0);
  const std::vector<double> p{0.5, 0.5};
  const std::vector<double> q{0.9, 0.1};
  EXPECT_NEAR(kl_divergence(p, q), 0.5 * std::log(0.5 / 0.9) + 0.5 * std::log(0.5 / 0.1), 1e-15);
  EXPECT_NEAR(kl_divergence(p, q), 0.5108, 1e-4);
  // 0 log 0 = 0; q floored.
  EXPECT_NEAR(kl_divergence(std::vector<double>{0.0, 1.0}, std::vector<double>{1.0, 0.0}),
              std::log(1.0 / 1e-12), 1e-9);
}

TEST(KlDivergenceProperty, NonNegative) {
  oracle::Gen g(8);
  for (int trial = 0; trial < 500; ++trial) {
    const std::size_t n = 2 + g.index(20);
    std::vector<double> p(n), q(n);
    double sp = 0.0, sq = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      p[i] = g.coin(0.2) ? 0.0 : g.uniform(0.0, 1.0);
      q[i] = g.uniform(1e-6, 1.0);
      sp += p[i];
      sq += q[i];
    }
    if (sp == 0.0) continue;
    for (std::size_t i = 0; i < n; ++i) {
      p[i] /= sp;
      q[i] /= sq;
    }
    EXPECT_GE(kl_divergence(p, q), 0.0);
  }
}

TEST(Perplexity, EffectiveClamp) {
  EXPECT_DOUBLE_EQ(effective_perplexity(30.0, 300), 30.0);
  EXPECT_DOUBLE_EQ(effective_perplexity(30.0, 31), 10.0);
  EXPECT_EQ(code_of([] { effective_perplexity(30.0, 30); }), ErrorCode::kPerplexityTooLarge);
}

TEST(Params, Validation) {
  TsneParams p;
  p.iterations = 100;  // fewer than the exaggeration phase
  EXPECT_EQ(code_of([&] { validate_params(p); }), ErrorCode::kInvalidParams);
  p = TsneParams{};
  p.final_momentum = 1.0;
  EXPECT_EQ(code_of([&] { validate_params(p); }), ErrorCode::kInvalidParams);
  p = TsneParams{};
  p.learning_rate = 0.0;
  EXPECT_EQ(code_of([&] { validate_params(p); }), ErrorCode::kInvalidParams);
}

TEST(Tsne, SeparatesThreeClusters) {
  const auto [pts, cluster] = oracle::clustered_points(3, 20, 16, 0.05, 5);
  const auto layout = tsne_project(Matrix::from_rows(pts), ids(60), TsneParams{});
  ASSERT_EQ(layout.points.size(), 60u);
  EXPECT_GE(oracle::neighbor_purity(layout.points, cluster, 5), 0.9);
  EXPECT_LE(layout.final_kl, layout.exaggeration_kl);
  EXPECT_GE(layout.final_kl, 0.0);
  for (const auto& p : layout.points) {
    EXPECT_TRUE(std::isfinite(p[0]) && std::isfinite(p[1]));
  }
}

TEST(Tsne, DeterministicForSeed) {
  const auto x = blob(40, 6, 2);
  TsneParams params;
  params.iterations = 300;
  params.early_exaggeration_iters = 100;
  params.momentum_switch_iter = 100;
  const auto a = tsne_project(x, ids(40), params);
  const auto b = tsne_project(x, ids(40), params);
  EXPECT_EQ(a.points, b.points);
  EXPECT_EQ(a.final_kl, b.final_kl);
  params.seed = 43;
  EXPECT_NE(tsne_project(x, ids(40), params).points, a.points);
}

TEST(Tsne, Errors) {
  TsneParams small;
  small.perplexity = 3.0;
  EXPECT_EQ(code_of([&] { tsne_project(Matrix(10, 4, 0.3), ids(10), small); }),
            ErrorCode::kDegenerateDistances);
  EXPECT_EQ(code_of([&] { tsne_project(blob(2, 4, 1), ids(2), small); }), ErrorCode::kTooFewPoints);
  EXPECT_EQ(code_of([&] { tsne_project(blob(5, 4, 1), ids(4), small); }), ErrorCode::kInvalidParams);
  // Perplexity must stay below N.
  EXPECT_EQ(code_of([] { tsne_project(blob(20, 4, 1), ids(20), TsneParams{}); }),
            ErrorCode::kPerplexityTooLarge);
  TsneParams wild = small;
  wild.learning_rate = 1e308;
  EXPECT_EQ(code_of([&] { tsne_project(blob(20, 4, 1), ids(20), wild); }), ErrorCode::kNumericalDivergence);
}

// A half-turn in the plane of two coordinates negates both, so every
// difference is negated and its square is bit-identical.
TEST(TsneProperty, HalfTurnLeavesAffinitiesBitIdentical) {
  oracle::Gen g(17);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t n = 10 + g.index(30), d = 2 + g.index(8);
    auto x = blob(n, d, 100 + static_cast<std::uint64_t>(trial));
    auto r = x;
    const std::size_t a = g.index(d);
    std::size_t b = g.index(d);
    if (b == a) b = (a + 1) % d;
    for (std::size_t i = 0; i < n; ++i) {
      r(i, a) = -r(i, a);
      r(i, b) = -r(i, b);
    }
    EXPECT_EQ(squared_distances(x), squared_distances(r));
    EXPECT_EQ(symmetrize(conditional_affinities(x, 3.0)), symmetrize(conditional_affinities(r, 3.0)));
  }
}

TEST(TsneProperty, GeneralRotationPreservesAffinities) {
  oracle::Gen g(18);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t n = 10 + g.index(30), d = 2 + g.index(8);
    auto x = blob(n, d, 200 + static_cast<std::uint64_t>(trial));
    auto r = x;
    const std::size_t a = g.index(d);
    const std::size_t b = (a + 1 + g.index(d - 1)) % d;
    const double t = g.uniform(0.0, 2.0 * std::numbers::pi);
    for (std::size_t i = 0; i < n; ++i) {
      r(i, a) = std::cos(t) * x(i, a) - std::sin(t) * x(i, b);
      r(i, b) = std::sin(t) * x(i, a) + std::cos(t) * x(i, b);
    }
    const auto p = symmetrize(conditional_affinities(x, 3.0));
    const auto q = symmetrize(conditional_affinities(r, 3.0));
    for (std::size_t i = 0; i < p.values().size(); ++i) EXPECT_NEAR(p.values()[i], q.values()[i], 1e-12);
  }
}

TEST(Layout, JsonRoundTrip) {
  const auto layout = tsne_project(blob(40, 3, 4), ids(40), TsneParams{});
  const auto back = layout_from_json(layout_to_json(layout));
  EXPECT_EQ(back.object_ids, layout.object_ids);
  EXPECT_EQ(back.points, layout.points);
  EXPECT_EQ(back.final_kl, layout.final_kl);
  EXPECT_EQ(back.exaggeration_kl, layout.exaggeration_kl);
  EXPECT_EQ(layout_to_json(back), layout_to_json(layout));
}

}  // namespace
