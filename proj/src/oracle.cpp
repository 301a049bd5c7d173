#include <deque>
#include <map>
#include <set>

#include "lace/engine.hpp"

// Reference enumeration, kept deliberately naive: single merges only, no
// closure shortcuts, no dead-state pruning. It exercises nothing from the
// optimized search path so the two can check each other.

namespace lace {

std::vector<SolutionState> brute_force_solutions(const Workspace& ws,
                                                 const OracleLimits& limits) {
  if (obj_of(ws.db).size() > limits.max_objects)
    throw Error("E_DOMAIN", "reference enumeration guard: too many objects");
  if (cells_of(ws.db).size() > limits.max_cells)
    throw Error("E_DOMAIN", "reference enumeration guard: too many value cells");

  SolutionState start{trivial_objects(ws.db), trivial_cells(ws.db)};
  std::set<std::string> visited{start.key()};
  std::deque<SolutionState> queue;
  queue.push_back(std::move(start));
  std::map<std::string, SolutionState> found;

  while (!queue.empty()) {
    if (visited.size() > limits.max_states)
      throw Error("E_DOMAIN", "reference enumeration guard: state cap exceeded");
    SolutionState s = std::move(queue.front());
    queue.pop_front();

    ExtendedDatabase xdb = induce_extended_db(ws.db, s.e, s.v);

    bool ok = true;
    for (const Rule& r : ws.spec.rules)
      if (r.hard && !check_rule_sat(r, xdb, ws.sim, s.e, s.v)) {
        ok = false;
        break;
      }
    if (ok)
      for (const DenialConstraint& dc : ws.spec.dcs)
        if (!check_dc(dc, xdb, ws.sim)) {
          ok = false;
          break;
        }
    if (ok) found.emplace(s.key(), s);

    // Every justified single merge, of any rule strength, yields a successor.
    for (const Rule& r : ws.spec.rules) {
      for (const auto& ans : eval_answers(r.body, xdb, ws.sim)) {
        SolutionState t = s;
        bool changed = r.head == HeadKind::Obj
                           ? t.e.unite(ans[0], ans[1])
                           : t.v.unite(Cell{ans[0].lexeme, r.pos_i},
                                       Cell{ans[1].lexeme, r.pos_j});
        if (!changed) continue;
        if (visited.insert(t.key()).second) queue.push_back(std::move(t));
      }
    }
  }

  std::vector<SolutionState> out;
  out.reserve(found.size());
  for (auto& [key, s] : found) out.push_back(std::move(s));
  return out;
}

}  // namespace lace
