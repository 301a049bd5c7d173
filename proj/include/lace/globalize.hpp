#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "lace/io.hpp"

namespace lace {

// Which body occurrence of each head variable a converted object rule uses:
// atom index into the body plus the 1-based argument position there.
struct PositionSelection {
  std::string rule;
  int atom_x = 0, pos_x = 0;
  int atom_y = 0, pos_y = 0;
};

// Result of compiling object merges away. The schema turns every object
// position into a value position; the rule set keeps the value rules, adds
// one value rule per object rule, and adds one hard linking rule per ordered
// pair of former object positions. Object constants whose lexeme collides
// with an existing value lexeme are renamed ("~o" suffixed until free).
struct GlobalizedSpec {
  Schema schema;
  Specification spec;
  std::vector<PositionSelection> selections;
  std::map<std::string, std::string> renamed;  // object lexeme -> value lexeme
};

// `reserved_values` lists value lexemes that exist outside the specification
// (database contents, similarity table); `extra_objects` lists object
// lexemes that must receive a rename entry even if the specification never
// mentions them (database contents).
GlobalizedSpec globalize_spec(const Schema& schema, const Specification& spec,
                              const std::set<std::string>& reserved_values = {},
                              const std::set<std::string>& extra_objects = {});

// Same transformation applied to a whole workspace: facts are retyped so
// objects become plain values, similarity carries over, and the rule set is
// the compiled one.
Workspace globalize_workspace(const Workspace& ws);

// The cell partition over the retyped database that corresponds to (e, v):
// v's classes carry over, and cells that store equated object constants are
// grouped together. Since every constant equals itself, all cells storing
// one and the same object always share a class.
CellPartition lift_solution(const Database& db, const ObjectPartition& e,
                            const CellPartition& v);

}  // namespace lace
