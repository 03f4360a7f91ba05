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

#include "afford/kb.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "afford/detection.hpp"
#include "afford/error.hpp"
#include "io_util.hpp"

namespace afford::kb {

using detail::Json;
using detail::OrderedJson;

std::string_view to_string(EntityKind kind) {
  switch (kind) {
    case EntityKind::kObject: return "object";
    case EntityKind::kProperty: return "property";
    case EntityKind::kAgent: return "agent";
  }
  return "object";
}

EntityKind entity_kind_from_string(std::string_view text) {
  if (text == "object") return EntityKind::kObject;
  if (text == "property") return EntityKind::kProperty;
  if (text == "agent") return EntityKind::kAgent;
  throw Error(ErrorCode::kSchemaError,
              "unknown entity kind '" + std::string(text) + "'");
}

std::string_view to_string(EffectMode mode) {
  return mode == EffectMode::kJoint ? "joint" : "alternative";
}

std::string_view to_string(ViolationKind kind) {
  switch (kind) {
    case ViolationKind::kKeyMismatch: return "KeyMismatch";
    case ViolationKind::kEmptyName: return "EmptyName";
    case ViolationKind::kDanglingReference: return "DanglingReference";
    case ViolationKind::kWrongEntityKind: return "WrongEntityKind";
    case ViolationKind::kMissingOutcome: return "MissingOutcome";
    case ViolationKind::kEmptyActionChain: return "EmptyActionChain";
    case ViolationKind::kEmptyVerb: return "EmptyVerb";
    case ViolationKind::kEmptyEffects: return "EmptyEffects";
    case ViolationKind::kInvalidProbability: return "InvalidProbability";
    case ViolationKind::kProbabilityMassExceeded: return "ProbabilityMassExceeded";
  }
  return "Unknown";
}

const Entity* AffordanceGraph::find_entity(std::string_view id) const {
  auto it = entities.find(std::string(id));
  return it == entities.end() ? nullptr : &it->second;
}

namespace {

constexpr double kMassTolerance = 1e-9;

class Checker {
 public:
  Checker(const AffordanceGraph& graph, std::vector<Violation>& out)
      : graph_(graph), out_(out) {}

  void entity(const std::string& key, const Entity& e) {
    if (e.id.empty() || e.id != key) {
      add(ViolationKind::kKeyMismatch, key, "entity id '" + e.id + "' stored under '" + key + "'");
    }
    if (e.name.empty()) add(ViolationKind::kEmptyName, e.id, "entity name is empty");
  }

  void effect(const std::string& key, const EffectRelation& e) {
    if (e.id.empty() || e.id != key) {
      add(ViolationKind::kKeyMismatch, key, "effect id '" + e.id + "' stored under '" + key + "'");
    }
    reference(e.id, "object", e.object, EntityKind::kObject);
    if (e.property) reference(e.id, "property", *e.property, EntityKind::kProperty);
    if (e.agent) reference(e.id, "agent", *e.agent, EntityKind::kAgent);
    if (!e.property && !e.verb) {
      add(ViolationKind::kMissingOutcome, e.id, "effect needs a property or a verb");
    }
    if (e.verb && e.verb->empty()) add(ViolationKind::kEmptyVerb, e.id, "effect verb is empty");
  }

  void affordance(const std::string& key, const AffordanceRelation& a) {
    if (a.id.empty() || a.id != key) {
      add(ViolationKind::kKeyMismatch, key, "affordance id '" + a.id + "' stored under '" + key + "'");
    }
    if (a.action.steps.empty()) {
      add(ViolationKind::kEmptyActionChain, a.id, "action chain has no steps");
    }
    for (const auto& step : a.action.steps) {
      if (step.verb.empty()) add(ViolationKind::kEmptyVerb, a.id, "action step verb is empty");
      reference(a.id, "direct_object", step.direct_object, std::nullopt);
      if (step.indirect_object) {
        reference(a.id, "indirect_object", *step.indirect_object, std::nullopt);
      }
      if (step.agent) reference(a.id, "agent", *step.agent, EntityKind::kAgent);
    }
    if (a.effects.empty()) {
      add(ViolationKind::kEmptyEffects, a.id, "affordance has no effects");
    }
    double mass = 0.0;
    for (const auto& outcome : a.effects) {
      if (!graph_.effects.contains(outcome.effect)) {
        add(ViolationKind::kDanglingReference, a.id,
            "unknown effect '" + outcome.effect + "'");
      }
      if (!std::isfinite(outcome.probability) || outcome.probability < 0.0 ||
          outcome.probability > 1.0) {
        add(ViolationKind::kInvalidProbability, a.id,
            "probability of '" + outcome.effect + "' outside [0, 1]");
      }
      mass += outcome.probability;
    }
    if (a.effect_mode == EffectMode::kAlternative && mass > 1.0 + kMassTolerance) {
      add(ViolationKind::kProbabilityMassExceeded, a.id,
          "alternative effects carry probability mass " + std::to_string(mass));
    }
  }

 private:
  void add(ViolationKind kind, const std::string& subject, std::string message) {
    out_.push_back({kind, subject, std::move(message)});
  }

  void reference(const std::string& subject, const char* role,
                 const std::string& ref, std::optional<EntityKind> kind) {
    const Entity* target = graph_.find_entity(ref);
    if (target == nullptr) {
      add(ViolationKind::kDanglingReference, subject,
          std::string(role) + " refers to unknown entity '" + ref + "'");
    } else if (kind && target->kind != *kind) {
      add(ViolationKind::kWrongEntityKind, subject,
          std::string(role) + " '" + ref + "' must be of kind " +
              std::string(to_string(*kind)));
    }
  }

  const AffordanceGraph& graph_;
  std::vector<Violation>& out_;
};

[[noreturn]] void throw_violation(const Violation& v) {
  ErrorCode code = ErrorCode::kInvalidRelation;
  if (v.kind == ViolationKind::kDanglingReference) code = ErrorCode::kDanglingReference;
  if (v.kind == ViolationKind::kInvalidProbability ||
      v.kind == ViolationKind::kProbabilityMassExceeded) {
    code = ErrorCode::kInvalidProbability;
  }
  throw Error(code, v.subject_id + ": " + v.message);
}

}  // namespace

void add_entity(AffordanceGraph& graph, Entity entity) {
  if (graph.entities.contains(entity.id)) {
    throw Error(ErrorCode::kDuplicateId, "entity '" + entity.id + "' already present");
  }
  std::vector<Violation> found;
  Checker(graph, found).entity(entity.id, entity);
  if (!found.empty()) throw_violation(found.front());
  auto id = entity.id;
  graph.entities.emplace(std::move(id), std::move(entity));
}

void add_effect(AffordanceGraph& graph, EffectRelation effect) {
  if (graph.effects.contains(effect.id)) {
    throw Error(ErrorCode::kDuplicateId, "effect '" + effect.id + "' already present");
  }
  std::vector<Violation> found;
  Checker(graph, found).effect(effect.id, effect);
  if (!found.empty()) throw_violation(found.front());
  auto id = effect.id;
  graph.effects.emplace(std::move(id), std::move(effect));
}

void add_affordance(AffordanceGraph& graph, AffordanceRelation affordance) {
  if (graph.affordances.contains(affordance.id)) {
    throw Error(ErrorCode::kDuplicateId,
                "affordance '" + affordance.id + "' already present");
  }
  std::vector<Violation> found;
  Checker(graph, found).affordance(affordance.id, affordance);
  if (!found.empty()) throw_violation(found.front());
  auto id = affordance.id;
  graph.affordances.emplace(std::move(id), std::move(affordance));
}

std::vector<Violation> validate_graph(const AffordanceGraph& graph) {
  std::vector<Violation> found;
  Checker check(graph, found);
  for (const auto& [key, e] : graph.entities) check.entity(key, e);
  for (const auto& [key, e] : graph.effects) check.effect(key, e);
  for (const auto& [key, a] : graph.affordances) check.affordance(key, a);
  return found;
}

const Entity& resolve_entity(const AffordanceGraph& graph, std::string_view ref) {
  if (const Entity* e = graph.find_entity(ref)) return *e;
  for (const auto& [id, e] : graph.entities) {
    if (detail::iequals(e.name, ref)) return e;
  }
  throw Error(ErrorCode::kUnknownEntity, "no entity '" + std::string(ref) + "'");
}

namespace {

bool effect_matches(const AffordanceGraph& graph, const EffectRelation& effect,
                    const Entity& object, std::string_view property_or_verb) {
  if (effect.object != object.id) return false;
  if (effect.verb && detail::iequals(*effect.verb, property_or_verb)) return true;
  if (effect.property) {
    const Entity* property = graph.find_entity(*effect.property);
    if (property != nullptr && detail::iequals(property->name, property_or_verb)) {
      return true;
    }
  }
  return false;
}

}  // namespace

std::vector<ActionMatch> query_actions_for_effect(const AffordanceGraph& graph,
                                                  const EffectQuery& query) {
  const Entity& object = resolve_entity(graph, query.object);
  std::vector<ActionMatch> matches;
  for (const auto& [id, affordance] : graph.affordances) {
    std::optional<double> best;
    for (const auto& outcome : affordance.effects) {
      auto it = graph.effects.find(outcome.effect);
      if (it == graph.effects.end()) continue;
      if (effect_matches(graph, it->second, object, query.property_or_verb)) {
        best = std::max(best.value_or(outcome.probability), outcome.probability);
      }
    }
    if (!best || affordance.action.steps.empty()) continue;
    matches.push_back({id, affordance.action,
                       affordance.action.last().direct_object, *best});
  }
  std::stable_sort(matches.begin(), matches.end(),
                   [](const ActionMatch& a, const ActionMatch& b) {
                     if (a.probability != b.probability) {
                       return a.probability > b.probability;
                     }
                     return a.affordance_id < b.affordance_id;
                   });
  return matches;
}

LabelSet label_set_for_goal(const AffordanceGraph& graph, const EffectQuery& query) {
  const Entity& object = resolve_entity(graph, query.object);
  std::set<std::string> names{object.name};
  for (const auto& match : query_actions_for_effect(graph, query)) {
    for (const auto& step : match.chain.steps) {
      if (const Entity* e = graph.find_entity(step.direct_object)) {
        names.insert(e->name);
      }
    }
  }
  return LabelSet::deduplicated({names.begin(), names.end()});
}

// --- serialization --------------------------------------------------------

namespace {

void put_optional(OrderedJson& out, const char* key,
                  const std::optional<std::string>& value) {
  if (value) out[key] = *value;
}

std::optional<std::string> get_optional(const Json& in, const char* key,
                                        std::string_view what) {
  auto it = in.find(key);
  if (it == in.end() || it->is_null()) return std::nullopt;
  if (!it->is_string()) {
    throw Error(ErrorCode::kSchemaError,
                std::string(what) + ": field '" + key + "' must be a string");
  }
  return it->get<std::string>();
}

ActionSpec step_from_json(const Json& j) {
  ActionSpec step;
  step.verb = detail::require_string(j, "verb", "action step");
  step.direct_object = detail::require_string(j, "direct_object", "action step");
  step.indirect_object = get_optional(j, "indirect_object", "action step");
  step.agent = get_optional(j, "agent", "action step");
  return step;
}

ActionChain chain_from_json(const Json& j) {
  ActionChain chain;
  const Json* steps = nullptr;
  if (j.is_array()) {
    steps = &j;
  } else if (j.is_object() && j.contains("steps")) {
    steps = &j["steps"];
  } else if (j.is_object()) {
    chain.steps.push_back(step_from_json(j));  // bare action
    return chain;
  }
  if (steps == nullptr || !steps->is_array()) {
    throw Error(ErrorCode::kSchemaError, "affordance action must be an action or {steps:[...]}");
  }
  for (const auto& s : *steps) chain.steps.push_back(step_from_json(s));
  return chain;
}

}  // namespace

std::string serialize_graph(const AffordanceGraph& graph) {
  OrderedJson root;
  root["entities"] = OrderedJson::array();
  for (const auto& [id, e] : graph.entities) {
    root["entities"].push_back(
        {{"id", e.id}, {"name", e.name}, {"kind", std::string(to_string(e.kind))}});
  }
  root["effects"] = OrderedJson::array();
  for (const auto& [id, e] : graph.effects) {
    OrderedJson j{{"id", e.id}, {"object", e.object}};
    put_optional(j, "property", e.property);
    put_optional(j, "verb", e.verb);
    put_optional(j, "agent", e.agent);
    root["effects"].push_back(std::move(j));
  }
  root["affordances"] = OrderedJson::array();
  for (const auto& [id, a] : graph.affordances) {
    OrderedJson steps = OrderedJson::array();
    for (const auto& s : a.action.steps) {
      OrderedJson j{{"verb", s.verb}, {"direct_object", s.direct_object}};
      put_optional(j, "indirect_object", s.indirect_object);
      put_optional(j, "agent", s.agent);
      steps.push_back(std::move(j));
    }
    OrderedJson effects = OrderedJson::array();
    for (const auto& o : a.effects) {
      effects.push_back({{"effect", o.effect}, {"probability", o.probability}});
    }
    root["affordances"].push_back({{"id", a.id},
                                   {"action", {{"steps", std::move(steps)}}},
                                   {"effects", std::move(effects)},
                                   {"effect_mode", std::string(to_string(a.effect_mode))}});
  }
  return root.dump(2) + "\n";
}

AffordanceGraph deserialize_graph(std::string_view json_text) {
  const Json root = detail::parse_json(json_text, "knowledge graph");
  if (!root.is_object()) {
    throw Error(ErrorCode::kSchemaError, "knowledge graph must be a JSON object");
  }
  auto array_field = [&](const char* key) -> const Json& {
    static const Json kEmpty = Json::array();
    auto it = root.find(key);
    if (it == root.end()) return kEmpty;
    if (!it->is_array()) {
      throw Error(ErrorCode::kSchemaError,
                  std::string("knowledge graph field '") + key + "' must be an array");
    }
    return *it;
  };

  AffordanceGraph graph;
  for (const auto& j : array_field("entities")) {
    Entity e;
    e.id = detail::require_string(j, "id", "entity");
    e.name = detail::require_string(j, "name", "entity");
    e.kind = entity_kind_from_string(detail::require_string(j, "kind", "entity"));
    if (!graph.entities.emplace(e.id, e).second) {
      throw Error(ErrorCode::kDuplicateId, "entity '" + e.id + "' appears twice");
    }
  }
  for (const auto& j : array_field("effects")) {
    EffectRelation e;
    e.id = detail::require_string(j, "id", "effect");
    e.object = detail::require_string(j, "object", "effect");
    e.property = get_optional(j, "property", "effect");
    e.verb = get_optional(j, "verb", "effect");
    e.agent = get_optional(j, "agent", "effect");
    if (!graph.effects.emplace(e.id, e).second) {
      throw Error(ErrorCode::kDuplicateId, "effect '" + e.id + "' appears twice");
    }
  }
  for (const auto& j : array_field("affordances")) {
    AffordanceRelation a;
    a.id = detail::require_string(j, "id", "affordance");
    a.action = chain_from_json(detail::require(j, "action", "affordance"));
    const Json& effects = detail::require(j, "effects", "affordance");
    if (!effects.is_array()) {
      throw Error(ErrorCode::kSchemaError, "affordance effects must be an array");
    }
    for (const auto& o : effects) {
      if (o.is_string()) {
        a.effects.push_back({o.get<std::string>(), 1.0});
        continue;
      }
      EffectOutcome outcome;
      outcome.effect = detail::require_string(o, "effect", "affordance effect");
      if (o.contains("probability")) {
        outcome.probability = detail::require_number(o, "probability", "affordance effect");
      }
      a.effects.push_back(std::move(outcome));
    }
    std::string mode = detail::optional_string(j, "effect_mode", "affordance");
    if (mode.empty() || mode == "joint") {
      a.effect_mode = EffectMode::kJoint;
    } else if (mode == "alternative") {
      a.effect_mode = EffectMode::kAlternative;
    } else {
      throw Error(ErrorCode::kSchemaError, "unknown effect_mode '" + mode + "'");
    }
    if (!graph.affordances.emplace(a.id, a).second) {
      throw Error(ErrorCode::kDuplicateId, "affordance '" + a.id + "' appears twice");
    }
  }
  return graph;
}

AffordanceGraph load_graph(const std::filesystem::path& path) {
  AffordanceGraph graph = deserialize_graph(detail::read_file(path));
  auto violations = validate_graph(graph);
  if (!violations.empty()) {
    std::string msg = path.string() + " fails validation:";
    for (const auto& v : violations) {
      msg += " [" + std::string(to_string(v.kind)) + " " + v.subject_id + ": " +
             v.message + "]";
    }
    throw Error(ErrorCode::kSchemaError, msg);
  }
  return graph;
}

void save_graph(const AffordanceGraph& graph, const std::filesystem::path& path) {
  detail::write_file(path, serialize_graph(graph));
}

}  // namespace afford::kb
