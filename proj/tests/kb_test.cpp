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

#include <algorithm>
#include <filesystem>
#include <random>

#include <gtest/gtest.h>

#include "afford/detection.hpp"
#include "afford/error.hpp"
#include "afford/kb.hpp"
#include "test_util.hpp"

namespace {

using namespace afford;
using namespace afford::kb;

using testutil::code_of;
const std::filesystem::path kData = testutil::kDataDir;

AffordanceGraph door_base() {
  AffordanceGraph g;
  add_entity(g, {"door", "door", EntityKind::kObject});
  add_entity(g, {"handle", "handle", EntityKind::kObject});
  add_entity(g, {"knob", "knob", EntityKind::kObject});
  add_entity(g, {"accessibility", "accessibility", EntityKind::kProperty});
  add_effect(g, {"e1", "door", "accessibility", std::nullopt, std::nullopt});
  return g;
}

AffordanceRelation single(std::string id, std::string verb, std::string object, double p,
                          std::string effect = "e1") {
  return {std::move(id), {{{std::move(verb), std::move(object), std::nullopt, std::nullopt}}},
          {{std::move(effect), p}}, EffectMode::kJoint};
}

TEST(KbEntities, AddAndDuplicate) {
  AffordanceGraph g;
  add_entity(g, {"door", "door", EntityKind::kObject});
  EXPECT_EQ(g.entities.size(), 1u);
  EXPECT_EQ(code_of([&] { add_entity(g, {"door", "other", EntityKind::kObject}); }),
            ErrorCode::kDuplicateId);
  add_entity(g, {"handle", "handle", EntityKind::kObject});
  EXPECT_EQ(g.entities.size(), 2u);
  ASSERT_NE(g.find_entity("handle"), nullptr);
  EXPECT_EQ(g.find_entity("handle")->name, "handle");
}

TEST(KbEntities, EmptyNameRejected) {
  AffordanceGraph g;
  EXPECT_EQ(code_of([&] { add_entity(g, {"x", "", EntityKind::kObject}); }),
            ErrorCode::kInvalidRelation);
}

TEST(KbEffects, NeedsPropertyOrVerbAndExistingObject) {
  AffordanceGraph g = door_base();
  EXPECT_EQ(code_of([&] { add_effect(g, {"e2", "door", std::nullopt, std::nullopt, std::nullopt}); }),
            ErrorCode::kInvalidRelation);
  EXPECT_EQ(code_of([&] { add_effect(g, {"e2", "window", "accessibility", std::nullopt, std::nullopt}); }),
            ErrorCode::kDanglingReference);
  // property must be a property entity
  EXPECT_EQ(code_of([&] { add_effect(g, {"e2", "door", "handle", std::nullopt, std::nullopt}); }),
            ErrorCode::kInvalidRelation);
}

TEST(KbAffordances, PushDownHandleStores) {
  AffordanceGraph g = door_base();
  add_affordance(g, single("a1", "push down", "handle", 1.0));
  EXPECT_TRUE(g.affordances.contains("a1"));
  EXPECT_TRUE(validate_graph(g).empty());
}

TEST(KbAffordances, DanglingEffectAndBadProbability) {
  AffordanceGraph g = door_base();
  EXPECT_EQ(code_of([&] { add_affordance(g, single("a1", "push", "handle", 1.0, "e99")); }),
            ErrorCode::kDanglingReference);
  EXPECT_EQ(code_of([&] { add_affordance(g, single("a1", "push", "ghost", 1.0)); }),
            ErrorCode::kDanglingReference);
  EXPECT_EQ(code_of([&] { add_affordance(g, single("a1", "push", "handle", 1.2)); }),
            ErrorCode::kInvalidProbability);
  EXPECT_EQ(code_of([&] { add_affordance(g, single("a1", "push", "handle", -0.1)); }),
            ErrorCode::kInvalidProbability);
  EXPECT_TRUE(g.affordances.empty());
}

TEST(KbValidate, AlternativeMassExceeded) {
  AffordanceGraph g = door_base();
  add_effect(g, {"e2", "door", std::nullopt, "open", std::nullopt});
  AffordanceRelation a = single("a1", "push", "handle", 0.7);
  a.effects.push_back({"e2", 0.6});
  a.effect_mode = EffectMode::kAlternative;
  g.affordances["a1"] = a;  // bypass add_* on purpose
  auto v = validate_graph(g);
  ASSERT_EQ(v.size(), 1u);
  EXPECT_EQ(v[0].kind, ViolationKind::kProbabilityMassExceeded);
  // The same pair is fine when the effects happen jointly.
  g.affordances["a1"].effect_mode = EffectMode::kJoint;
  EXPECT_TRUE(validate_graph(g).empty());
}

TEST(KbValidate, EmptyEffectsAndChain) {
  AffordanceGraph g = door_base();
  g.affordances["a1"] = {"a1", {{{"push", "handle", std::nullopt, std::nullopt}}}, {}, EffectMode::kJoint};
  auto v = validate_graph(g);
  ASSERT_EQ(v.size(), 1u);
  EXPECT_EQ(v[0].kind, ViolationKind::kEmptyEffects);

  g.affordances["a1"] = {"a1", {}, {{"e1", 1.0}}, EffectMode::kJoint};
  v = validate_graph(g);
  ASSERT_EQ(v.size(), 1u);
  EXPECT_EQ(v[0].kind, ViolationKind::kEmptyActionChain);
}

TEST(KbValidate, KeyMismatch) {
  AffordanceGraph g = door_base();
  g.entities["alias"] = {"door", "door", EntityKind::kObject};
  auto v = validate_graph(g);
  ASSERT_FALSE(v.empty());
  EXPECT_EQ(v[0].kind, ViolationKind::kKeyMismatch);
}

TEST(KbQuery, DoorAccessReturnsPushDownOnHandle) {
  const auto g = load_graph(kData / "kb/door_handle.json");
  const auto m = query_actions_for_effect(g, {"door", "accessibility"});
  ASSERT_EQ(m.size(), 1u);
  EXPECT_EQ(m[0].chain.steps.size(), 1u);
  EXPECT_EQ(m[0].chain.last().verb, "push down");
  EXPECT_EQ(m[0].direct_object, "handle");
  EXPECT_DOUBLE_EQ(m[0].probability, 1.0);
}

TEST(KbQuery, KnobAndHandleChainsBothReturned) {
  AffordanceGraph g = door_base();
  add_affordance(g, {"a_knob",
                     {{{"grasp", "knob", std::nullopt, std::nullopt}, {"twist", "knob", std::nullopt, std::nullopt}}},
                     {{"e1", 0.9}},
                     EffectMode::kJoint});
  add_affordance(g, {"a_handle",
                     {{{"grasp", "handle", std::nullopt, std::nullopt}, {"push", "handle", std::nullopt, std::nullopt}}},
                     {{"e1", 0.9}},
                     EffectMode::kJoint});
  const auto m = query_actions_for_effect(g, {"door", "accessibility"});
  ASSERT_EQ(m.size(), 2u);
  // Equal probability: affordance id decides.
  EXPECT_EQ(m[0].affordance_id, "a_handle");
  EXPECT_EQ(m[1].affordance_id, "a_knob");
  EXPECT_EQ(m[1].chain.steps[0].verb, "grasp");
  EXPECT_EQ(m[1].chain.steps[1].verb, "twist");
}

TEST(KbQuery, NoAffordancesAndUnknownObject) {
  AffordanceGraph g = door_base();
  EXPECT_TRUE(query_actions_for_effect(g, {"handle", "accessibility"}).empty());
  EXPECT_EQ(code_of([&] { query_actions_for_effect(g, {"window", "accessibility"}); }),
            ErrorCode::kUnknownEntity);
}

TEST(KbQuery, CaseInsensitiveNamesAndVerbs) {
  const auto g = load_graph(kData / "kb/give_cup.json");
  const auto m = query_actions_for_effect(g, {"Cup", "HOLDS"});
  ASSERT_EQ(m.size(), 1u);
  EXPECT_EQ(m[0].chain.last().verb, "give");
  EXPECT_EQ(m[0].chain.last().indirect_object, "person");
  EXPECT_EQ(m[0].chain.last().agent, "spot");
}

TEST(KbQuery, SortedByProbabilityThenId) {
  const auto g = load_graph(kData / "kb/door_opening.json");
  const auto m = query_actions_for_effect(g, {"door", "accessibility"});
  std::vector<std::string> ids;
  for (const auto& x : m) ids.push_back(x.affordance_id);
  EXPECT_EQ(ids, (std::vector<std::string>{"a_handle", "a_button", "a_knob", "a_push_bar"}));
  // Only the alternative member matches the verb query.
  const auto open = query_actions_for_effect(g, {"door", "open"});
  ASSERT_EQ(open.size(), 2u);
  EXPECT_EQ(open[0].affordance_id, "a_handle");
  EXPECT_DOUBLE_EQ(open[1].probability, 0.4);
}

TEST(KbLabelSet, DoorOpeningFixture) {
  const auto g = load_graph(kData / "kb/door_opening.json");
  EXPECT_EQ(label_set_for_goal(g, {"door", "accessibility"}).labels(),
            (std::vector<std::string>{"button", "door", "handle", "knob", "push bar"}));
}

TEST(KbLabelSet, SingleHandleFixtureAndEmptyGraph) {
  const auto g = load_graph(kData / "kb/door_handle.json");
  EXPECT_EQ(label_set_for_goal(g, {"door", "accessibility"}).labels(),
            (std::vector<std::string>{"door", "handle"}));
  EXPECT_EQ(code_of([&] { label_set_for_goal(AffordanceGraph{}, {"door", "accessibility"}); }),
            ErrorCode::kUnknownEntity);
}

TEST(KbLabelSet, InvariantUnderInsertionOrder) {
  const auto ref = load_graph(kData / "kb/door_opening.json");
  const auto expected = label_set_for_goal(ref, {"door", "accessibility"}).labels();
  std::vector<AffordanceRelation> affordances;
  for (const auto& [id, a] : ref.affordances) affordances.push_back(a);
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    std::shuffle(affordances.begin(), affordances.end(), rng);
    AffordanceGraph g;
    for (const auto& [id, e] : ref.entities) add_entity(g, e);
    for (const auto& [id, e] : ref.effects) add_effect(g, e);
    for (const auto& a : affordances) add_affordance(g, a);
    const auto labels = label_set_for_goal(g, {"door", "accessibility"}).labels();
    EXPECT_EQ(labels, expected);
    EXPECT_TRUE(std::is_sorted(labels.begin(), labels.end()));
  }
}

TEST(KbSerialization, FixturesRoundTrip) {
  for (const char* name : {"kb/door_handle.json", "kb/give_cup.json", "kb/door_opening.json"}) {
    const auto g = load_graph(kData / name);
    EXPECT_TRUE(validate_graph(g).empty()) << name;
    EXPECT_EQ(deserialize_graph(serialize_graph(g)), g) << name;
  }
}

TEST(KbSerialization, ProbabilityDefaultsAndBareAction) {
  const auto g = deserialize_graph(R"({
    "entities": [{"id": "door", "name": "door", "kind": "object"},
                 {"id": "handle", "name": "handle", "kind": "object"},
                 {"id": "acc", "name": "accessibility", "kind": "property"}],
    "effects": [{"id": "e1", "object": "door", "property": "acc"}],
    "affordances": [{"id": "a1", "action": {"verb": "push down", "direct_object": "handle"},
                     "effects": ["e1"]}]})");
  const auto& a = g.affordances.at("a1");
  EXPECT_EQ(a.action.steps.size(), 1u);
  EXPECT_DOUBLE_EQ(a.effects[0].probability, 1.0);
  EXPECT_EQ(a.effect_mode, EffectMode::kJoint);
}

TEST(KbSerialization, LoaderRejectsInvalidGraph) {
  const auto dir = std::filesystem::temp_directory_path() / "afford_kb_test";
  std::filesystem::create_directories(dir);
  AffordanceGraph g = door_base();
  g.affordances["a1"] = single("a1", "push", "ghost", 1.0);
  save_graph(g, dir / "bad.json");
  EXPECT_EQ(code_of([&] { load_graph(dir / "bad.json"); }), ErrorCode::kSchemaError);
  EXPECT_EQ(code_of([&] { load_graph(dir / "missing.json"); }), ErrorCode::kIoError);
  std::filesystem::remove_all(dir);
}

// Random graphs built only through add_*: every success leaves a valid graph,
// and serialization round-trips.
TEST(KbProperty, AddOnlyGraphsStayValid) {
  std::mt19937_64 rng(11);
  auto pick = [&](std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng); };
  for (int trial = 0; trial < 100; ++trial) {
    AffordanceGraph g;
    std::vector<std::string> objects, properties, effects;
    for (int i = 0; i < 5; ++i) {
      objects.push_back("o" + std::to_string(i));
      add_entity(g, {objects.back(), "object " + std::to_string(i), EntityKind::kObject});
    }
    for (int i = 0; i < 2; ++i) {
      properties.push_back("p" + std::to_string(i));
      add_entity(g, {properties.back(), "property " + std::to_string(i), EntityKind::kProperty});
    }
    for (int i = 0; i < 4; ++i) {
      effects.push_back("e" + std::to_string(i));
      if (pick(2) == 0) {
        add_effect(g, {effects.back(), objects[pick(5)], properties[pick(2)], std::nullopt, std::nullopt});
      } else {
        add_effect(g, {effects.back(), objects[pick(5)], std::nullopt, "verb" + std::to_string(i), std::nullopt});
      }
    }
    for (int i = 0; i < 8; ++i) {
      AffordanceRelation a;
      a.id = "a" + std::to_string(i);
      const std::size_t steps = 1 + pick(3);
      for (std::size_t s = 0; s < steps; ++s) {
        // occasionally dangling
        const std::string target = pick(10) == 0 ? "nowhere" : objects[pick(5)];
        a.action.steps.push_back({"v" + std::to_string(s), target, std::nullopt, std::nullopt});
      }
      const std::size_t n_eff = 1 + pick(2);
      for (std::size_t k = 0; k < n_eff; ++k) {
        a.effects.push_back({effects[pick(4)], std::uniform_real_distribution<double>(0.0, 0.8)(rng)});
      }
      a.effect_mode = pick(2) == 0 ? EffectMode::kJoint : EffectMode::kAlternative;
      try {
        add_affordance(g, a);
      } catch (const Error&) {
      }
      ASSERT_TRUE(validate_graph(g).empty());
    }
    EXPECT_EQ(deserialize_graph(serialize_graph(g)), g);
    for (const auto& o : objects) {
      for (const auto& p : {"property 0", "property 1", "verb0", "verb3"}) {
        for (const auto& m : query_actions_for_effect(g, {o, p})) {
          ASSERT_TRUE(g.affordances.contains(m.affordance_id));
          EXPECT_EQ(g.affordances.at(m.affordance_id).action, m.chain);
          EXPECT_EQ(m.direct_object, m.chain.last().direct_object);
        }
      }
    }
  }
}

}  // namespace
