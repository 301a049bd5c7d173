#include "lace/globalize.hpp"

#include <algorithm>

namespace lace {

namespace {

Schema retype_schema(const Schema& s) {
  Schema out;
  for (const auto& [name, rel] : s.relations) {
    Relation r = rel;
    std::fill(r.types.begin(), r.types.end(), PosKind::Val);
    out.add(std::move(r));
  }
  return out;
}

void collect_spec_lexemes(const Specification& spec, std::set<std::string>& objects,
                          std::set<std::string>& values) {
  auto scan_term = [&](const Term& t) {
    if (const Constant* c = std::get_if<Constant>(&t)) {
      if (c->kind == Kind::Obj) objects.insert(c->lexeme);
      if (c->kind == Kind::Val) values.insert(c->lexeme);
    }
  };
  auto scan_query = [&](const Query& q) {
    for (const auto& a : q.atoms)
      for (const auto& t : a.terms) scan_term(t);
    for (const auto& [l, r] : q.ineqs) scan_term(l), scan_term(r);
    for (const auto& [l, r] : q.sims) scan_term(l), scan_term(r);
  };
  for (const auto& r : spec.rules) scan_query(r.body);
  for (const auto& dc : spec.dcs) scan_query(dc.body);
}

std::map<std::string, std::string> build_renames(const std::set<std::string>& objects,
                                                 std::set<std::string> taken) {
  std::map<std::string, std::string> ren;
  for (const auto& o : objects) {
    std::string target = o;
    while (taken.count(target)) target += "~o";
    taken.insert(target);
    ren[o] = target;
  }
  return ren;
}

Term retype_term(const Term& t, const std::map<std::string, std::string>& ren) {
  if (const Constant* c = std::get_if<Constant>(&t)) {
    if (c->kind == Kind::Obj) return val_const(ren.at(c->lexeme));
  }
  return t;
}

Query retype_body(const Query& q, const std::map<std::string, std::string>& ren) {
  Query out = q;
  for (auto& a : out.atoms)
    for (auto& t : a.terms) t = retype_term(t, ren);
  for (auto& [l, r] : out.ineqs) l = retype_term(l, ren), r = retype_term(r, ren);
  for (auto& [l, r] : out.sims) l = retype_term(l, ren), r = retype_term(r, ren);
  return out;
}

// First occurrence of `var` scanning atoms left to right, restricted to atoms
// whose tuple-id slot is a variable (the converted head needs that variable).
PositionSelection half_select(const Query& body, const std::string& var,
                              const std::string& rule_name) {
  for (size_t a = 0; a < body.atoms.size(); ++a) {
    const RelAtom& atom = body.atoms[a];
    if (!std::holds_alternative<Var>(atom.terms[0])) continue;
    for (size_t p = 1; p < atom.terms.size(); ++p) {
      const Var* v = std::get_if<Var>(&atom.terms[p]);
      if (v && v->name == var)
        return PositionSelection{rule_name, static_cast<int>(a), static_cast<int>(p), 0, 0};
    }
  }
  throw Error("E_BAD_CELL", "cannot convert " + rule_name + ": no usable occurrence of " +
                                var + " in the rule body");
}

}  // namespace

GlobalizedSpec globalize_spec(const Schema& schema, const Specification& spec,
                              const std::set<std::string>& reserved_values,
                              const std::set<std::string>& extra_objects) {
  GlobalizedSpec out;
  out.schema = retype_schema(schema);

  std::set<std::string> objects = extra_objects;
  std::set<std::string> values = reserved_values;
  collect_spec_lexemes(spec, objects, values);
  out.renamed = build_renames(objects, values);

  for (const auto& dc : spec.dcs)
    out.spec.dcs.push_back(DenialConstraint{dc.name, retype_body(dc.body, out.renamed)});

  for (const auto& r : spec.rules)
    if (r.head == HeadKind::Val) {
      Rule copy = r;
      copy.body = retype_body(r.body, out.renamed);
      out.spec.rules.push_back(std::move(copy));
    }

  for (const auto& r : spec.rules) {
    if (r.head != HeadKind::Obj) continue;
    PositionSelection sel = half_select(r.body, r.body.free_vars[0], r.name);
    PositionSelection sel_y = half_select(r.body, r.body.free_vars[1], r.name);
    sel.atom_y = sel_y.atom_x;
    sel.pos_y = sel_y.pos_x;

    Rule conv;
    conv.name = r.name;
    conv.hard = r.hard;
    conv.head = HeadKind::Val;
    conv.body = retype_body(r.body, out.renamed);
    conv.body.free_vars = {std::get<Var>(r.body.atoms[sel.atom_x].terms[0]).name,
                           std::get<Var>(r.body.atoms[sel.atom_y].terms[0]).name};
    conv.pos_i = sel.pos_x;
    conv.pos_j = sel.pos_y;
    validate_rule(conv, out.schema);
    out.spec.rules.push_back(std::move(conv));
    out.selections.push_back(std::move(sel));
  }

  // One hard linking rule per ordered pair of former object positions: cells
  // holding a shared constant must land in one class.
  std::vector<std::pair<std::string, int>> obj_positions;
  for (const auto& [name, rel] : schema.relations)
    for (size_t p = 0; p < rel.types.size(); ++p)
      if (rel.types[p] == PosKind::Obj)
        obj_positions.emplace_back(name, static_cast<int>(p) + 1);

  for (const auto& [pn, pi] : obj_positions)
    for (const auto& [qn, qj] : obj_positions) {
      const Relation& pr = schema.at(pn);
      const Relation& qr = schema.at(qn);
      Rule link;
      link.name = "link " + pn + "." + std::to_string(pi) + " " + qn + "." + std::to_string(qj);
      link.hard = true;
      link.head = HeadKind::Val;
      link.pos_i = pi;
      link.pos_j = qj;
      link.body.free_vars = {"s", "t"};

      RelAtom left{pn, {Var{"s"}}};
      for (size_t p = 1; p <= pr.arity(); ++p)
        left.terms.push_back(static_cast<int>(p) == pi ? Term{Var{"z"}}
                                                       : Term{Var{"u" + std::to_string(p)}});
      RelAtom right{qn, {Var{"t"}}};
      for (size_t p = 1; p <= qr.arity(); ++p)
        right.terms.push_back(static_cast<int>(p) == qj ? Term{Var{"z"}}
                                                        : Term{Var{"v" + std::to_string(p)}});
      link.body.atoms = {std::move(left), std::move(right)};
      validate_rule(link, out.schema);
      out.spec.rules.push_back(std::move(link));
    }

  return out;
}

Workspace globalize_workspace(const Workspace& ws) {
  std::set<std::string> values;
  std::set<std::string> objects;
  for (const auto& f : ws.db.facts)
    for (const auto& c : f.args) {
      if (c.kind == Kind::Obj) objects.insert(c.lexeme);
      if (c.kind == Kind::Val) values.insert(c.lexeme);
    }
  for (const auto& [a, b] : ws.sim.table()) values.insert(a), values.insert(b);

  GlobalizedSpec g = globalize_spec(ws.db.schema, ws.spec, values, objects);

  Workspace out;
  out.db.schema = g.schema;
  for (const auto& f : ws.db.facts) {
    Fact copy = f;
    for (auto& c : copy.args)
      if (c.kind == Kind::Obj) c = val_const(g.renamed.at(c.lexeme));
    out.db.add(std::move(copy));
  }
  out.sim = ws.sim;
  out.spec = std::move(g.spec);
  return out;
}

CellPartition lift_solution(const Database& db, const ObjectPartition& e,
                            const CellPartition& v) {
  std::vector<Cell> universe;
  for (const auto& f : db.facts)
    for (size_t p = 1; p <= f.args.size(); ++p)
      universe.push_back(Cell{f.tid, static_cast<int>(p)});
  CellPartition out(std::move(universe));

  for (const auto& [a, b] : v.pairs()) out.unite(a, b);

  // Group object cells by the merge class of their stored constant.
  std::map<Constant, int> class_of;
  int next_class = 0;
  for (const auto& cls : e.classes()) {
    for (const auto& m : cls) class_of[m] = next_class;
    ++next_class;
  }
  std::map<int, Cell> anchor;
  for (const auto& f : db.facts) {
    const Relation& rel = db.schema.at(f.relation);
    for (size_t p = 0; p < f.args.size(); ++p) {
      if (rel.types[p] != PosKind::Obj) continue;
      Cell cell{f.tid, static_cast<int>(p) + 1};
      auto [it, fresh] = anchor.emplace(class_of.at(f.args[p]), cell);
      if (!fresh) out.unite(it->second, cell);
    }
  }
  return out;
}

}  // namespace lace
