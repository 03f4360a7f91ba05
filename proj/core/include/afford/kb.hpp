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

#ifndef AFFORD_KB_HPP_
#define AFFORD_KB_HPP_

// Affordance knowledge graph: objects, properties and agents linked by
// effect relations (object -> property or verb outcome), affordance relations
// (action chain -> effects) and action relations (verb -> direct object).

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace afford {

class LabelSet;

namespace kb {

enum class EntityKind { kObject, kProperty, kAgent };

std::string_view to_string(EntityKind kind);
EntityKind entity_kind_from_string(std::string_view text);

struct Entity {
  std::string id;
  std::string name;
  EntityKind kind = EntityKind::kObject;

  friend bool operator==(const Entity&, const Entity&) = default;
};

// Outcome of an action on `object`: either a property becomes true of it
// (door -> accessibility) or a verb describes it (person "holds" cup).
struct EffectRelation {
  std::string id;
  std::string object;
  std::optional<std::string> property;
  std::optional<std::string> verb;
  std::optional<std::string> agent;

  friend bool operator==(const EffectRelation&, const EffectRelation&) = default;
};

struct ActionSpec {
  std::string verb;
  std::string direct_object;
  std::optional<std::string> indirect_object;
  std::optional<std::string> agent;

  friend bool operator==(const ActionSpec&, const ActionSpec&) = default;
};

// Ordered steps; a single-step chain is a plain action.
struct ActionChain {
  std::vector<ActionSpec> steps;

  const ActionSpec& last() const { return steps.back(); }
  friend bool operator==(const ActionChain&, const ActionChain&) = default;
};

enum class EffectMode { kJoint, kAlternative };

std::string_view to_string(EffectMode mode);

struct EffectOutcome {
  std::string effect;
  double probability = 1.0;

  friend bool operator==(const EffectOutcome&, const EffectOutcome&) = default;
};

struct AffordanceRelation {
  std::string id;
  ActionChain action;
  std::vector<EffectOutcome> effects;
  EffectMode effect_mode = EffectMode::kJoint;

  friend bool operator==(const AffordanceRelation&,
                         const AffordanceRelation&) = default;
};

// Plain data. Build it through the add_* functions below to keep it valid;
// validate_graph() reports what is wrong with a graph built any other way.
struct AffordanceGraph {
  std::map<std::string, Entity> entities;
  std::map<std::string, EffectRelation> effects;
  std::map<std::string, AffordanceRelation> affordances;

  const Entity* find_entity(std::string_view id) const;

  friend bool operator==(const AffordanceGraph&,
                         const AffordanceGraph&) = default;
};

enum class ViolationKind {
  kKeyMismatch,
  kEmptyName,
  kDanglingReference,
  kWrongEntityKind,
  kMissingOutcome,
  kEmptyActionChain,
  kEmptyVerb,
  kEmptyEffects,
  kInvalidProbability,
  kProbabilityMassExceeded,
};

std::string_view to_string(ViolationKind kind);

struct Violation {
  ViolationKind kind;
  std::string subject_id;
  std::string message;
};

void add_entity(AffordanceGraph& graph, Entity entity);
void add_effect(AffordanceGraph& graph, EffectRelation effect);
void add_affordance(AffordanceGraph& graph, AffordanceRelation affordance);

std::vector<Violation> validate_graph(const AffordanceGraph& graph);

// What a goal asks for: an object and the property or verb that should hold.
struct EffectQuery {
  std::string object;
  std::string property_or_verb;
};

struct ActionMatch {
  std::string affordance_id;
  ActionChain chain;
  std::string direct_object;  // entity id of the chain's last step
  double probability = 1.0;
};

// Resolves an entity reference by id, falling back to a case-insensitive name
// match. Throws kUnknownEntity.
const Entity& resolve_entity(const AffordanceGraph& graph,
                             std::string_view ref);

// Affordances having an effect on `query.object` whose property name or verb
// equals `query.property_or_verb` (case-insensitive). Members of joint and
// alternative effect groups both match. Sorted by probability descending,
// then affordance id.
std::vector<ActionMatch> query_actions_for_effect(const AffordanceGraph& graph,
                                                  const EffectQuery& query);

// Names of every direct object acting in a matching affordance plus the
// queried object, sorted and deduplicated: the detector vocabulary.
LabelSet label_set_for_goal(const AffordanceGraph& graph,
                            const EffectQuery& query);

std::string serialize_graph(const AffordanceGraph& graph);
// Parses without validating.
AffordanceGraph deserialize_graph(std::string_view json_text);

// Reads and validates a graph file; throws kSchemaError on any violation.
AffordanceGraph load_graph(const std::filesystem::path& path);
void save_graph(const AffordanceGraph& graph, const std::filesystem::path& path);

}  // namespace kb
}  // namespace afford

#endif  // AFFORD_KB_HPP_
