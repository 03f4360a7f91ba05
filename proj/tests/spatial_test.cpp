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

#include <gtest/gtest.h>

#include "afford/spatial.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

namespace {

using namespace afford;
using namespace afford::spatial;
using testutil::code_of;

BoundingBox centered(double cx, double cy, double w = 10.0, double h = 10.0) {
  return BoundingBox::make(cx - w / 2, cy - h / 2, cx + w / 2, cy + h / 2);
}

const BoundingBox kDoor = BoundingBox::make(0, 0, 100, 200);

SpatialRule rule(double tau = 0.25) {
  SpatialRule r = default_door_rule();
  r.keep_threshold = tau;
  return r;
}

TEST(RangeScores, AnalyticTable) {
  EXPECT_NEAR(hor_range_score(centered(100, 100), kDoor), 1.0, 1e-12);
  EXPECT_NEAR(hor_range_score(centered(0, 100), kDoor), 1.0, 1e-12);
  EXPECT_NEAR(hor_range_score(centered(200, 100), kDoor), 0.0, 1e-12);
  EXPECT_NEAR(hor_range_score(centered(-100, 100), kDoor), 0.0, 1e-12);
  EXPECT_NEAR(hor_range_score(centered(150, 100), kDoor), 0.5, 1e-12);
  EXPECT_NEAR(hor_range_score(centered(50, 100), kDoor), 0.5, 1e-12);  // door center

  EXPECT_NEAR(vert_range_score(centered(0, 100), kDoor), 1.0, 1e-12);
  EXPECT_NEAR(vert_range_score(centered(0, 300), kDoor), 0.0, 1e-12);
  EXPECT_NEAR(vert_range_score(centered(0, -100), kDoor), 0.0, 1e-12);
  EXPECT_NEAR(vert_range_score(centered(0, 150), kDoor), 0.75, 1e-12);
  EXPECT_NEAR(vert_range_score(centered(0, 50), kDoor), 0.75, 1e-12);
}

TEST(RangeScores, ClampExactlyAtZero) {
  EXPECT_EQ(hor_range_score(centered(500, 100), kDoor), 0.0);
  EXPECT_EQ(vert_range_score(centered(0, 5000), kDoor), 0.0);
}

TEST(Verify, WorkedProductExample) {
  const std::vector<SpatialObject> objs{{"d", "f", "door", 0.9, kDoor},
                                        {"o", "f", "handle", 0.8, centered(95, 100)}};
  const auto v = verify(objs, rule());
  ASSERT_EQ(v.size(), 1u);
  EXPECT_EQ(v[0].opener_id, "o");
  EXPECT_EQ(v[0].best_door_id, "d");
  EXPECT_NEAR(v[0].hor_score, 0.95, 1e-12);
  EXPECT_NEAR(v[0].vert_score, 1.0, 1e-12);
  EXPECT_NEAR(v[0].combined_score, 0.684, 1e-12);
  EXPECT_TRUE(v[0].kept);
}

TEST(Verify, PerfectOpenerKeptAtAnyThreshold) {
  const std::vector<SpatialObject> objs{{"d", "f", "door", 1.0, kDoor},
                                        {"o", "f", "knob", 1.0, centered(100, 100)}};
  for (double tau : {0.0, 0.5, 1.0}) {
    const auto v = verify(objs, rule(tau));
    EXPECT_DOUBLE_EQ(v[0].combined_score, 1.0);
    EXPECT_TRUE(v[0].kept);
  }
}

TEST(Verify, NoDoorInFrame) {
  const std::vector<SpatialObject> objs{{"d", "f1", "door", 1.0, kDoor},
                                        {"o", "f2", "handle", 1.0, centered(100, 100)}};
  const auto v = verify(objs, rule(0.0));
  ASSERT_EQ(v.size(), 1u);
  EXPECT_FALSE(v[0].kept);
  EXPECT_FALSE(v[0].best_door_id.has_value());
  EXPECT_EQ(v[0].combined_score, 0.0);
}

TEST(Verify, BestDoorWinsAndFilterKeepsNonOpeners) {
  const std::vector<SpatialObject> objs{
      {"d1", "f", "door", 0.9, kDoor},
      {"d2", "f", "door", 0.9, BoundingBox::make(300, 0, 400, 200)},
      {"o", "f", "handle", 0.9, centered(305, 100)},
      {"far", "f", "button", 0.9, centered(1000, 100)},
      {"cup", "f", "cup", 0.1, centered(1000, 1000)}};
  const auto v = verify(objs, rule());
  ASSERT_EQ(v.size(), 2u);
  EXPECT_EQ(v[0].best_door_id, "d2");
  EXPECT_TRUE(v[0].kept);
  EXPECT_FALSE(v[1].kept);
  const auto kept = filter_kept(objs, v);
  std::vector<std::string> ids;
  for (const auto& o : kept) ids.push_back(o.object_id);
  EXPECT_EQ(ids, (std::vector<std::string>{"d1", "d2", "o", "cup"}));
}

TEST(Rule, ValidationAndIo) {
  SpatialRule r = default_door_rule();
  r.opener_labels.clear();
  EXPECT_EQ(code_of([&] { validate_rule(r); }), ErrorCode::kInvalidRule);
  r = default_door_rule();
  r.opener_labels.insert("door");
  EXPECT_EQ(code_of([&] { validate_rule(r); }), ErrorCode::kInvalidRule);
  r = default_door_rule();
  r.keep_threshold = 1.5;
  EXPECT_EQ(code_of([&] { validate_rule(r); }), ErrorCode::kInvalidRule);
  EXPECT_EQ(parse_rule(format_rule(default_door_rule())), default_door_rule());
  EXPECT_EQ(load_rule(testutil::kDataDir / "rules/door_openers.json"), default_door_rule());
}

TEST(Verdicts, JsonRoundTrip) {
  const std::vector<SpatialObject> objs{{"d", "f", "door", 0.9, kDoor},
                                        {"o", "f", "handle", 0.8, centered(95, 100)},
                                        {"x", "g", "knob", 0.8, centered(95, 100)}};
  const auto v = verify(objs, rule());
  EXPECT_EQ(verdicts_from_json(verdicts_to_json(v)), v);
}

// Random rigid translations and positive scalings of a door/opener pair.
TEST(RangeScoresProperty, TranslationAndScaleInvariant) {
  oracle::Gen g(12);
  for (int trial = 0; trial < 100; ++trial) {
    const auto door = BoundingBox::make(g.uniform(-50, 50), g.uniform(-50, 50), g.uniform(60, 200), g.uniform(60, 300));
    const auto opener = centered(g.uniform(-100, 300), g.uniform(-100, 400), g.uniform(1, 20), g.uniform(1, 20));
    const double tx = g.uniform(-1000, 1000), ty = g.uniform(-1000, 1000);
    const double s = std::pow(10.0, g.uniform(-2, 2));
    auto map = [&](const BoundingBox& b) {
      return BoundingBox::make((b.x_min + tx) * s, (b.y_min + ty) * s, (b.x_max + tx) * s, (b.y_max + ty) * s);
    };
    EXPECT_NEAR(hor_range_score(map(opener), map(door)), hor_range_score(opener, door), 1e-12);
    EXPECT_NEAR(vert_range_score(map(opener), map(door)), vert_range_score(opener, door), 1e-12);
  }
}

TEST(RangeScoresProperty, NonIncreasingInDistance) {
  oracle::Gen g(13);
  for (int trial = 0; trial < 200; ++trial) {
    const double a = g.uniform(0, 150), b = g.uniform(0, 150);
    const double near = std::min(a, b), far = std::max(a, b);
    EXPECT_GE(hor_range_score(centered(100 + near, 100), kDoor), hor_range_score(centered(100 + far, 100), kDoor));
    EXPECT_GE(vert_range_score(centered(0, 100 + 2 * near), kDoor), vert_range_score(centered(0, 100 + 2 * far), kDoor));
  }
}

std::vector<SpatialObject> random_frame(oracle::Gen& g, std::size_t doors, std::size_t openers) {
  std::vector<SpatialObject> objs;
  for (std::size_t i = 0; i < doors; ++i) {
    const double x = g.uniform(0, 1000), y = g.uniform(0, 200);
    objs.push_back({"d" + std::to_string(i), "f", "door", g.uniform(0.1, 1.0),
                    BoundingBox::make(x, y, x + g.uniform(50, 200), y + g.uniform(100, 400))});
  }
  const std::vector<std::string> kinds{"handle", "knob", "push bar", "button"};
  for (std::size_t i = 0; i < openers; ++i) {
    objs.push_back({"o" + std::to_string(i), "f", kinds[g.index(4)], g.uniform(0.0, 1.0),
                    centered(g.uniform(-100, 1300), g.uniform(-100, 700))});
  }
  return objs;
}

TEST(VerifyProperty, ZeroThresholdKeepsEveryOpenerNextToADoor) {
  oracle::Gen g(14);
  for (int trial = 0; trial < 100; ++trial) {
    const auto objs = random_frame(g, 1 + g.index(3), 1 + g.index(6));
    for (const auto& v : verify(objs, rule(0.0))) EXPECT_TRUE(v.kept);
  }
}

TEST(VerifyProperty, RemovingNonBestDoorKeepsVerdict) {
  oracle::Gen g(15);
  for (int trial = 0; trial < 200; ++trial) {
    auto objs = random_frame(g, 2 + g.index(3), 1);
    const auto before = verify(objs, rule());
    ASSERT_EQ(before.size(), 1u);
    if (!before[0].best_door_id) continue;
    // drop one door that is not the best
    for (std::size_t i = 0; i < objs.size(); ++i) {
      if (objs[i].label == "door" && objs[i].object_id != *before[0].best_door_id) {
        objs.erase(objs.begin() + static_cast<std::ptrdiff_t>(i));
        break;
      }
    }
    const auto after = verify(objs, rule());
    if (before[0].combined_score == 0.0) {
      EXPECT_EQ(after[0].kept, before[0].kept);
      EXPECT_EQ(after[0].combined_score, 0.0);
    } else {
      EXPECT_EQ(after[0], before[0]);
    }
  }
}

}  // namespace
