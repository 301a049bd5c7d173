#include "lace/engine.hpp"

#include <algorithm>
#include <map>
#include <set>

namespace lace {
namespace {

enum class RuleFilter { All, HardOnly, SoftOnly };

MergeAction obj_action(int rule, const Constant& a, const Constant& b) {
  MergeAction m;
  m.rule = rule;
  m.object = true;
  m.o1 = std::min(a, b);
  m.o2 = std::max(a, b);
  return m;
}

MergeAction cell_action(int rule, const std::string& t1, int i, const std::string& t2, int j) {
  MergeAction m;
  m.rule = rule;
  m.object = false;
  m.t1 = t1;
  m.pos_i = i;
  m.t2 = t2;
  m.pos_j = j;
  if (m.cell2() < m.cell1()) {
    std::swap(m.t1, m.t2);
    std::swap(m.pos_i, m.pos_j);
  }
  return m;
}

void collect_actions(const Workspace& ws, const ObjectPartition& e, const CellPartition& v,
                     RuleFilter filter, std::set<MergeAction>& out) {
  ExtendedDatabase xdb = induce_extended_db(ws.db, e, v);
  for (size_t ri = 0; ri < ws.spec.rules.size(); ++ri) {
    const Rule& r = ws.spec.rules[ri];
    if (filter == RuleFilter::HardOnly && !r.hard) continue;
    if (filter == RuleFilter::SoftOnly && r.hard) continue;
    for (const auto& ans : eval_answers(r.body, xdb, ws.sim)) {
      if (r.head == HeadKind::Obj) {
        if (e.same(ans[0], ans[1])) continue;
        out.insert(obj_action(static_cast<int>(ri), ans[0], ans[1]));
      } else {
        Cell c1{ans[0].lexeme, r.pos_i}, c2{ans[1].lexeme, r.pos_j};
        if (v.same(c1, c2)) continue;
        out.insert(cell_action(static_cast<int>(ri), ans[0].lexeme, r.pos_i, ans[1].lexeme,
                               r.pos_j));
      }
    }
  }
}

bool apply_action(const MergeAction& a, ObjectPartition& e, CellPartition& v) {
  return a.object ? e.unite(a.o1, a.o2) : v.unite(a.cell1(), a.cell2());
}

void require_matching_universe(const Workspace& ws, const ObjectPartition& e,
                               const CellPartition& v) {
  if (e.universe() != obj_of(ws.db) || v.universe() != cells_of(ws.db))
    throw DomainError("partitions do not range over the database's objects and cells");
}

bool hard_rules_hold(const Workspace& ws, const ExtendedDatabase& xdb, const ObjectPartition& e,
                     const CellPartition& v) {
  for (const Rule& r : ws.spec.rules)
    if (r.hard && !check_rule_sat(r, xdb, ws.sim, e, v)) return false;
  return true;
}

bool constraints_hold(const Workspace& ws, const ExtendedDatabase& xdb) {
  for (const DenialConstraint& dc : ws.spec.dcs)
    if (!check_dc(dc, xdb, ws.sim)) return false;
  return true;
}

// Depth-first walk of the hard-closed reachable states. visit() is called on
// every state that is a solution; returning true stops the walk. States that
// violate an inequality-free constraint are dropped whole: such a violation
// survives any further merging, so nothing above them can be a solution.
// States violating only constraints with inequalities are expanded anyway,
// because later merges can retract the offending disjointness witness.
template <class Visit>
void search(const Workspace& ws, const EnumOptions& opts, Visit&& visit) {
  SolutionState start = hard_close(ws, trivial_objects(ws.db), trivial_cells(ws.db));
  std::vector<SolutionState> stack;
  stack.push_back(std::move(start));
  std::set<std::string> seen{stack.back().key()};
  size_t explored = 0;

  while (!stack.empty()) {
    SolutionState s = std::move(stack.back());
    stack.pop_back();
    if (opts.explored) ++*opts.explored;
    if (++explored > opts.budget) throw BudgetError(explored);

    ExtendedDatabase xdb = induce_extended_db(ws.db, s.e, s.v);
    bool solution = true;
    bool dead = false;
    for (const DenialConstraint& dc : ws.spec.dcs) {
      if (check_dc(dc, xdb, ws.sim)) continue;
      solution = false;
      if (dc.body.ineqs.empty()) {
        dead = true;
        break;
      }
    }
    if (solution && visit(std::as_const(s))) return;
    if (dead) continue;

    std::set<MergeAction> acts;
    collect_actions(ws, s.e, s.v, RuleFilter::SoftOnly, acts);
    for (const MergeAction& a : acts) {
      ObjectPartition e = s.e;
      CellPartition v = s.v;
      apply_action(a, e, v);
      SolutionState t = hard_close(ws, std::move(e), std::move(v));
      if (seen.insert(t.key()).second) stack.push_back(std::move(t));
    }
  }
}

bool pair_merged(const SolutionState& s, const MergePair& pair) {
  if (std::holds_alternative<ObjPair>(pair)) {
    const auto& [a, b] = std::get<ObjPair>(pair);
    return s.e.same(a, b);
  }
  const auto& [c1, c2] = std::get<CellPair>(pair);
  return s.v.same(c1, c2);
}

void validate_pair(const Workspace& ws, const MergePair& pair) {
  if (std::holds_alternative<ObjPair>(pair)) {
    const auto& [a, b] = std::get<ObjPair>(pair);
    auto objs = obj_of(ws.db);
    for (const Constant* c : {&a, &b})
      if (!std::binary_search(objs.begin(), objs.end(), *c))
        throw DomainError(c->lexeme + " is not an object of the database");
  } else {
    const auto& [c1, c2] = std::get<CellPair>(pair);
    auto cells = cells_of(ws.db);
    for (const Cell* c : {&c1, &c2})
      if (!std::binary_search(cells.begin(), cells.end(), *c))
        throw DomainError(to_string(*c) + " is not a value cell of the database");
  }
}

bool constraints_inequality_free(const Workspace& ws) {
  for (const DenialConstraint& dc : ws.spec.dcs)
    if (!dc.body.ineqs.empty()) return false;
  return true;
}

Query checked_instance(const Workspace& ws, const Query& q, const std::vector<Constant>& tuple) {
  if (!q.ineqs.empty())
    throw Error("E_DOMAIN", "possible/certain answering takes inequality-free queries");
  analyze_query(q, ws.db.schema);
  return substitute(q, tuple);
}

}  // namespace

std::vector<MergeAction> applicable_merges(const Workspace& ws, const ObjectPartition& e,
                                           const CellPartition& v) {
  std::set<MergeAction> acts;
  collect_actions(ws, e, v, RuleFilter::All, acts);
  return {acts.begin(), acts.end()};
}

SolutionState hard_close(const Workspace& ws, ObjectPartition e, CellPartition v) {
  for (;;) {
    std::set<MergeAction> acts;
    collect_actions(ws, e, v, RuleFilter::HardOnly, acts);
    bool changed = false;
    for (const MergeAction& a : acts) changed |= apply_action(a, e, v);
    if (!changed) break;
  }
  return {std::move(e), std::move(v)};
}

bool rec_check(const Workspace& ws, const ObjectPartition& e, const CellPartition& v) {
  require_matching_universe(ws, e, v);

  // Replay: grow from the identity state using only merges that are justified
  // at the current stage and stay inside the target. Bodies are monotone
  // under merging, so batching the justified merges of a stage is harmless.
  ObjectPartition ce = trivial_objects(ws.db);
  CellPartition cv = trivial_cells(ws.db);
  for (;;) {
    std::set<MergeAction> acts;
    collect_actions(ws, ce, cv, RuleFilter::All, acts);
    bool changed = false;
    for (const MergeAction& a : acts) {
      bool inside = a.object ? e.same(a.o1, a.o2) : v.same(a.cell1(), a.cell2());
      if (inside) changed |= apply_action(a, ce, cv);
    }
    if (!changed) break;
  }
  if (!(ce == e) || !(cv == v)) return false;

  ExtendedDatabase xdb = induce_extended_db(ws.db, e, v);
  return hard_rules_hold(ws, xdb, e, v) && constraints_hold(ws, xdb);
}

bool existence_fast(const Workspace& ws) {
  SolutionState s = hard_close(ws, trivial_objects(ws.db), trivial_cells(ws.db));
  ExtendedDatabase xdb = induce_extended_db(ws.db, s.e, s.v);
  return constraints_hold(ws, xdb);
}

bool existence_search(const Workspace& ws, const EnumOptions& opts) {
  bool found = false;
  search(ws, opts, [&](const SolutionState&) {
    found = true;
    return true;
  });
  return found;
}

bool existence(const Workspace& ws, const EnumOptions& opts) {
  // The least candidate decides once no constraint needs an inequality
  // witness retracted: its violations persist upward, its success is itself
  // a solution.
  if (constraints_inequality_free(ws)) return existence_fast(ws);
  return existence_search(ws, opts);
}

std::vector<SolutionState> enumerate_solutions(const Workspace& ws, const EnumOptions& opts) {
  std::map<std::string, SolutionState> found;
  search(ws, opts, [&](const SolutionState& s) {
    found.emplace(s.key(), s);
    return false;
  });
  std::vector<SolutionState> out;
  out.reserve(found.size());
  for (auto& [key, s] : found) out.push_back(std::move(s));
  return out;
}

std::vector<SolutionState> enumerate_max_solutions(const Workspace& ws,
                                                   const EnumOptions& opts) {
  std::vector<SolutionState> sols = enumerate_solutions(ws, opts);
  std::vector<SolutionState> out;
  for (size_t i = 0; i < sols.size(); ++i) {
    bool maximal = true;
    for (size_t j = 0; j < sols.size() && maximal; ++j) {
      if (i == j) continue;
      if (sols[i].e.refines(sols[j].e) && sols[i].v.refines(sols[j].v)) maximal = false;
    }
    if (maximal) out.push_back(sols[i]);
  }
  return out;
}

bool max_rec_check_fast(const Workspace& ws, const ObjectPartition& e, const CellPartition& v) {
  if (!rec_check(ws, e, v)) return false;
  // A solution is non-maximal exactly when one unapplied firing, taken and
  // hard-closed, passes the constraints again; with inequality-free
  // constraints any larger solution shows up through its first new merge.
  std::set<MergeAction> acts;
  collect_actions(ws, e, v, RuleFilter::All, acts);
  for (const MergeAction& a : acts) {
    ObjectPartition e2 = e;
    CellPartition v2 = v;
    apply_action(a, e2, v2);
    SolutionState t = hard_close(ws, std::move(e2), std::move(v2));
    ExtendedDatabase xdb = induce_extended_db(ws.db, t.e, t.v);
    if (constraints_hold(ws, xdb)) return false;
  }
  return true;
}

bool max_rec_check_general(const Workspace& ws, const ObjectPartition& e,
                           const CellPartition& v, const EnumOptions& opts) {
  if (!rec_check(ws, e, v)) return false;
  std::string key = SolutionState{e, v}.key();
  for (const SolutionState& s : enumerate_max_solutions(ws, opts))
    if (s.key() == key) return true;
  return false;
}

bool max_rec_check(const Workspace& ws, const ObjectPartition& e, const CellPartition& v,
                   const EnumOptions& opts) {
  if (constraints_inequality_free(ws)) return max_rec_check_fast(ws, e, v);
  return max_rec_check_general(ws, e, v, opts);
}

Outcome poss_merge(const Workspace& ws, const MergePair& pair, const EnumOptions& opts) {
  validate_pair(ws, pair);
  // A merge possible in any solution is possible in a maximal one, since
  // every solution extends to a maximal solution.
  bool any = false, found = false;
  search(ws, opts, [&](const SolutionState& s) {
    any = true;
    if (pair_merged(s, pair)) {
      found = true;
      return true;
    }
    return false;
  });
  if (found) return Outcome::Yes;
  return any ? Outcome::No : Outcome::NoSolution;
}

Outcome cert_merge(const Workspace& ws, const MergePair& pair, const EnumOptions& opts) {
  validate_pair(ws, pair);
  std::vector<SolutionState> maxs = enumerate_max_solutions(ws, opts);
  if (maxs.empty()) return Outcome::NoSolution;
  for (const SolutionState& s : maxs)
    if (!pair_merged(s, pair)) return Outcome::No;
  return Outcome::Yes;
}

Outcome poss_ans(const Workspace& ws, const Query& q, const std::vector<Constant>& tuple,
                 const EnumOptions& opts) {
  Query inst = checked_instance(ws, q, tuple);
  // Inequality-free instances are monotone under merging, so holding in any
  // solution implies holding in a maximal one above it.
  bool any = false, found = false;
  search(ws, opts, [&](const SolutionState& s) {
    any = true;
    if (eval_boolean(inst, induce_extended_db(ws.db, s.e, s.v), ws.sim)) {
      found = true;
      return true;
    }
    return false;
  });
  if (found) return Outcome::Yes;
  return any ? Outcome::No : Outcome::NoSolution;
}

Outcome cert_ans(const Workspace& ws, const Query& q, const std::vector<Constant>& tuple,
                 const EnumOptions& opts) {
  Query inst = checked_instance(ws, q, tuple);
  std::vector<SolutionState> maxs = enumerate_max_solutions(ws, opts);
  if (maxs.empty()) return Outcome::NoSolution;
  for (const SolutionState& s : maxs)
    if (!eval_boolean(inst, induce_extended_db(ws.db, s.e, s.v), ws.sim)) return Outcome::No;
  return Outcome::Yes;
}

}  // namespace lace
