#include "lace/query.hpp"

#include <algorithm>
#include <set>

namespace lace {

bool term_eq(const Term& a, const Term& b) {
  if (a.index() != b.index()) return false;
  if (std::holds_alternative<Var>(a)) return std::get<Var>(a) == std::get<Var>(b);
  return std::get<Constant>(a) == std::get<Constant>(b);
}

std::string term_text(const Term& t) {
  if (std::holds_alternative<Var>(t)) return std::get<Var>(t).name;
  return std::get<Constant>(t).lexeme;
}

namespace {

using Image = std::vector<Constant>;  // sorted unique

bool img_contains(const Image& img, const Constant& c) {
  return std::binary_search(img.begin(), img.end(), c);
}

Image img_intersect(const Image& a, const Image& b) {
  Image out;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

bool img_disjoint(const Image& a, const Image& b) {
  auto i = a.begin();
  auto j = b.begin();
  while (i != a.end() && j != b.end()) {
    if (*i < *j)
      ++i;
    else if (*j < *i)
      ++j;
    else
      return false;
  }
  return true;
}

// Backtracking join: one extended fact per atom, variable images narrowed by
// intersection as atoms are matched. In answer mode, inequality and
// similarity atoms touching a free variable are re-checked per answer tuple
// because substituting a constant shrinks that variable's image.
struct Evaluator {
  const Query& q;
  const ExtendedDatabase& xdb;
  const SimilarityOracle& oracle;
  bool collect;

  std::set<std::string> free_set;
  std::vector<std::string> free_order;  // distinct free vars, sorted
  std::vector<int> eager_ineq, lazy_ineq, eager_sim, lazy_sim;
  std::map<std::string, Image> h;
  std::vector<std::pair<std::string, Image>> trail;
  std::set<std::vector<Constant>> answers;

  Evaluator(const Query& q_, const ExtendedDatabase& x_, const SimilarityOracle& o_, bool c_)
      : q(q_), xdb(x_), oracle(o_), collect(c_) {
    for (const auto& v : q.free_vars)
      if (free_set.insert(v).second) free_order.push_back(v);
    std::sort(free_order.begin(), free_order.end());
    auto involves_free = [&](const std::pair<Term, Term>& a) {
      for (const Term* t : {&a.first, &a.second})
        if (std::holds_alternative<Var>(*t) && free_set.count(std::get<Var>(*t).name)) return true;
      return false;
    };
    for (size_t i = 0; i < q.ineqs.size(); ++i)
      (collect && involves_free(q.ineqs[i]) ? lazy_ineq : eager_ineq).push_back((int)i);
    for (size_t i = 0; i < q.sims.size(); ++i)
      (collect && involves_free(q.sims[i]) ? lazy_sim : eager_sim).push_back((int)i);
  }

  Image image(const Term& t, const std::map<std::string, Constant>* bound) const {
    if (std::holds_alternative<Constant>(t)) return {std::get<Constant>(t)};
    const std::string& name = std::get<Var>(t).name;
    if (bound) {
      auto it = bound->find(name);
      if (it != bound->end()) return {it->second};
    }
    return h.at(name);
  }

  bool ineq_holds(int i, const std::map<std::string, Constant>* bound) const {
    return img_disjoint(image(q.ineqs[i].first, bound), image(q.ineqs[i].second, bound));
  }

  bool sim_holds(int i, const std::map<std::string, Constant>* bound) const {
    Image a = image(q.sims[i].first, bound), b = image(q.sims[i].second, bound);
    for (const Constant& x : a) {
      if (x.kind != Kind::Val) continue;
      for (const Constant& y : b)
        if (y.kind == Kind::Val && oracle.sim(x.lexeme, y.lexeme)) return true;
    }
    return false;
  }

  bool match(const RelAtom& atom, const ExtendedFact& xf, size_t trail_mark) {
    for (size_t p = 0; p < atom.terms.size(); ++p) {
      const Term& t = atom.terms[p];
      if (std::holds_alternative<Constant>(t)) {
        if (!img_contains(xf.args[p], std::get<Constant>(t))) return false;
        continue;
      }
      const std::string& name = std::get<Var>(t).name;
      auto it = h.find(name);
      if (it == h.end()) {
        trail.emplace_back(name, Image{});
        h.emplace(name, xf.args[p]);
      } else {
        Image narrowed = img_intersect(it->second, xf.args[p]);
        if (narrowed.empty()) return false;
        trail.emplace_back(name, it->second);
        it->second = std::move(narrowed);
      }
    }
    (void)trail_mark;
    return true;
  }

  void unwind(size_t mark) {
    while (trail.size() > mark) {
      auto& [name, old] = trail.back();
      if (old.empty())
        h.erase(name);
      else
        h[name] = std::move(old);
      trail.pop_back();
    }
  }

  bool leaf() {
    for (int i : eager_ineq)
      if (!ineq_holds(i, nullptr)) return false;
    for (int i : eager_sim)
      if (!sim_holds(i, nullptr)) return false;
    if (!collect) return true;
    emit();
    return false;  // keep searching for more leaves
  }

  void emit() {
    std::map<std::string, Constant> bound;
    std::vector<const Image*> domains;
    domains.reserve(free_order.size());
    for (const auto& v : free_order) domains.push_back(&h.at(v));
    std::vector<size_t> pick(free_order.size(), 0);
    while (true) {
      for (size_t k = 0; k < free_order.size(); ++k)
        bound[free_order[k]] = (*domains[k])[pick[k]];
      bool ok = true;
      for (int i : lazy_ineq)
        if (!ineq_holds(i, &bound)) { ok = false; break; }
      if (ok)
        for (int i : lazy_sim)
          if (!sim_holds(i, &bound)) { ok = false; break; }
      if (ok) {
        std::vector<Constant> tuple;
        tuple.reserve(q.free_vars.size());
        for (const auto& v : q.free_vars) tuple.push_back(bound.at(v));
        answers.insert(std::move(tuple));
      }
      size_t k = 0;
      for (; k < pick.size(); ++k) {
        if (++pick[k] < domains[k]->size()) break;
        pick[k] = 0;
      }
      if (k == pick.size()) break;
    }
  }

  bool solve(size_t ai) {
    if (ai == q.atoms.size()) return leaf();
    const RelAtom& atom = q.atoms[ai];
    auto it = xdb.by_relation.find(atom.relation);
    if (it == xdb.by_relation.end()) return false;
    for (int fi : it->second) {
      size_t mark = trail.size();
      if (match(atom, xdb.facts[fi], mark)) {
        if (solve(ai + 1)) return true;
      }
      unwind(mark);
    }
    return false;
  }
};

}  // namespace

std::map<std::string, Kind> analyze_query(const Query& q, const Schema& schema) {
  std::map<std::string, Kind> kinds;
  auto assign = [&](const std::string& v, Kind k) {
    auto [it, fresh] = kinds.emplace(v, k);
    if (!fresh && it->second != k)
      throw Error("E_MIXED_KIND", "variable " + v + " used both as " + kind_name(it->second) +
                                      " and as " + kind_name(k));
  };
  if (q.atoms.empty()) throw Error("E_SYNTAX", "query needs at least one relational atom");
  for (const RelAtom& atom : q.atoms) {
    const Relation& rel = schema.at(atom.relation);
    if (atom.terms.size() != rel.arity() + 1)
      throw Error("E_ARITY", "atom " + atom.relation + " expects " +
                                 std::to_string(rel.arity() + 1) + " terms, got " +
                                 std::to_string(atom.terms.size()));
    for (size_t p = 0; p < atom.terms.size(); ++p) {
      Kind want = p == 0                     ? Kind::Tid
                  : rel.types[p - 1] == PosKind::Obj ? Kind::Obj
                                                     : Kind::Val;
      const Term& t = atom.terms[p];
      if (std::holds_alternative<Var>(t)) {
        assign(std::get<Var>(t).name, want);
      } else if (std::get<Constant>(t).kind != want) {
        throw Error("E_TYPE", "constant " + term_text(t) + " is a " +
                                  kind_name(std::get<Constant>(t).kind) + " but position " +
                                  std::to_string(p) + " of " + atom.relation + " holds a " +
                                  kind_name(want));
      }
    }
  }
  auto check_side = [&](const Term& t, bool sim_atom) {
    if (std::holds_alternative<Var>(t)) {
      const std::string& name = std::get<Var>(t).name;
      auto it = kinds.find(name);
      if (it == kinds.end())
        throw Error("E_UNSAFE", "variable " + name + " appears only outside relational atoms");
      if (it->second == Kind::Tid)
        throw Error("E_TYPE", std::string(sim_atom ? "similarity" : "inequality") +
                                  " atoms cannot mention tuple-id terms (" + name + ")");
      if (sim_atom && it->second != Kind::Val)
        throw Error("E_TYPE", "similarity atoms relate values, but " + name + " is an object");
    } else {
      const Constant& c = std::get<Constant>(t);
      if (c.kind == Kind::Tid)
        throw Error("E_TYPE", "inequality and similarity atoms cannot mention tuple ids");
      if (sim_atom && c.kind != Kind::Val)
        throw Error("E_TYPE", "similarity atoms relate values, not objects");
    }
  };
  for (const auto& [a, b] : q.ineqs) {
    check_side(a, false);
    check_side(b, false);
  }
  for (const auto& [a, b] : q.sims) {
    check_side(a, true);
    check_side(b, true);
  }
  for (const std::string& v : q.free_vars)
    if (!kinds.count(v))
      throw Error("E_UNSAFE", "answer variable " + v + " appears in no relational atom");
  return kinds;
}

void validate_rule(const Rule& r, const Schema& schema) {
  auto kinds = analyze_query(r.body, schema);
  if (!r.body.ineqs.empty())
    throw Error("E_INEQ_IN_RULE", "rule bodies cannot contain inequality atoms");
  if (r.body.free_vars.size() != 2)
    throw Error("E_SYNTAX", "rule head needs exactly two variables");
  if (r.head == HeadKind::Obj) {
    for (const std::string& v : r.body.free_vars)
      if (kinds.at(v) != Kind::Obj)
        throw Error("E_TYPE", "object-merge head variable " + v + " must bind objects");
    return;
  }
  int positions[2] = {r.pos_i, r.pos_j};
  for (int side = 0; side < 2; ++side) {
    const std::string& v = r.body.free_vars[side];
    if (kinds.at(v) != Kind::Tid)
      throw Error("E_BAD_CELL", "cell head variable " + v + " must name a tuple id");
    int occurrences = 0;
    const RelAtom* home = nullptr;
    for (const RelAtom& atom : r.body.atoms)
      if (std::holds_alternative<Var>(atom.terms[0]) &&
          std::get<Var>(atom.terms[0]).name == v) {
        ++occurrences;
        home = &atom;
      }
    if (occurrences != 1)
      throw Error("E_BAD_CELL", "cell head variable " + v + " must stand at position 0 of exactly one atom");
    const Relation& rel = schema.at(home->relation);
    int pos = positions[side];
    if (pos < 1 || static_cast<size_t>(pos) > rel.arity() || rel.types[pos - 1] != PosKind::Val)
      throw Error("E_BAD_CELL", "position " + std::to_string(pos) + " of " + rel.name +
                                    " is not a value position");
  }
}

void validate_dc(const DenialConstraint& dc, const Schema& schema) {
  if (!dc.body.free_vars.empty())
    throw Error("E_SYNTAX", "denial constraints take no answer variables");
  analyze_query(dc.body, schema);
}

Query substitute(const Query& q, const std::vector<Constant>& tuple) {
  if (tuple.size() != q.free_vars.size())
    throw DomainError("substitution arity mismatch");
  std::map<std::string, Constant> sub;
  for (size_t i = 0; i < tuple.size(); ++i) {
    auto [it, fresh] = sub.emplace(q.free_vars[i], tuple[i]);
    if (!fresh && it->second != tuple[i])
      throw DomainError("conflicting bindings for repeated answer variable " + q.free_vars[i]);
  }
  auto rewrite = [&](Term& t) {
    if (!std::holds_alternative<Var>(t)) return;
    auto it = sub.find(std::get<Var>(t).name);
    if (it != sub.end()) t = it->second;
  };
  Query out = q;
  out.free_vars.clear();
  for (RelAtom& atom : out.atoms)
    for (Term& t : atom.terms) rewrite(t);
  for (auto& [a, b] : out.ineqs) {
    rewrite(a);
    rewrite(b);
  }
  for (auto& [a, b] : out.sims) {
    rewrite(a);
    rewrite(b);
  }
  return out;
}

bool eval_boolean(const Query& q, const ExtendedDatabase& xdb, const SimilarityOracle& sim) {
  if (q.atoms.empty()) return true;
  Evaluator ev(q, xdb, sim, false);
  return ev.solve(0);
}

std::vector<std::vector<Constant>> eval_answers(const Query& q, const ExtendedDatabase& xdb,
                                                const SimilarityOracle& sim) {
  if (q.atoms.empty()) {
    if (!q.free_vars.empty()) throw Error("E_UNSAFE", "answer variables need relational atoms");
    return {{}};
  }
  Evaluator ev(q, xdb, sim, true);
  ev.solve(0);
  return {ev.answers.begin(), ev.answers.end()};
}

bool check_dc(const DenialConstraint& dc, const ExtendedDatabase& xdb,
              const SimilarityOracle& sim) {
  return !eval_boolean(dc.body, xdb, sim);
}

bool check_rule_sat(const Rule& r, const ExtendedDatabase& xdb, const SimilarityOracle& sim,
                    const ObjectPartition& e, const CellPartition& v) {
  for (const auto& ans : eval_answers(r.body, xdb, sim)) {
    if (r.head == HeadKind::Obj) {
      if (!e.same(ans[0], ans[1])) return false;
    } else {
      if (!v.same(Cell{ans[0].lexeme, r.pos_i}, Cell{ans[1].lexeme, r.pos_j})) return false;
    }
  }
  return true;
}

}  // namespace lace
