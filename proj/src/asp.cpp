#include "lace/asp.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <cstdlib>
#include <map>
#include <set>
#include <sstream>

#include "lace/query.hpp"

namespace lace {

namespace {

std::string quote_str(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      default: out += c;
    }
  }
  out += '"';
  return out;
}

std::string mangle_core(const std::string& lexeme) {
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned char c : lexeme) {
    if ((c >= 'a' && c <= 'z') || (c >= '0' && c <= '9')) {
      out += static_cast<char>(c);
    } else if (c == '_') {
      out += "__";
    } else if (c >= 'A' && c <= 'Z') {
      out += '_';
      out += static_cast<char>(c - 'A' + 'a');
    } else {
      out += "_x";
      out += hex[c >> 4];
      out += hex[c & 15];
    }
  }
  return out;
}

}  // namespace

std::string mangle(Kind k, const std::string& lexeme) {
  switch (k) {
    case Kind::Tid: return "t_" + mangle_core(lexeme);
    case Kind::Obj: return "o_" + mangle_core(lexeme);
    case Kind::Val: return quote_str(lexeme);
  }
  return {};
}

std::string mangle_relation(const std::string& name) { return "r_" + mangle_core(name); }

std::string AspTerm::render() const {
  switch (kind) {
    case Kind::Var:
    case Kind::Sym: return text;
    case Kind::Int: return std::to_string(num);
    case Kind::Str: return quote_str(text);
  }
  return {};
}

std::string AspAtom::render() const {
  if (args.empty()) return pred;
  std::string out = pred + "(";
  for (size_t i = 0; i < args.size(); ++i) {
    if (i) out += ",";
    out += args[i].render();
  }
  return out + ")";
}

std::string AspRule::render() const {
  std::string out;
  if (head) out = head->render();
  if (!body.empty()) {
    out += out.empty() ? ":- " : " :- ";
    for (size_t i = 0; i < body.size(); ++i) {
      if (i) out += ", ";
      if (body[i].negated) out += "not ";
      out += body[i].atom.render();
    }
  }
  return out + ".";
}

std::string AspProgram::render() const {
  std::string out;
  bool first = true;
  for (const auto& [name, rules] : sections) {
    if (!first) out += "\n";
    first = false;
    out += "% " + name + "\n";
    for (const auto& r : rules) out += r.render() + "\n";
  }
  return out;
}

std::vector<const AspRule*> AspProgram::all_rules() const {
  std::vector<const AspRule*> out;
  for (const auto& [name, rules] : sections)
    for (const auto& r : rules) out.push_back(&r);
  return out;
}

namespace {

struct VarCounter {
  std::map<std::string, std::string> named;
  int next = 0;

  std::string fresh() { return "V" + std::to_string(next++); }
  std::string of(const std::string& src) {
    auto it = named.find(src);
    if (it != named.end()) return it->second;
    return named.emplace(src, fresh()).first->second;
  }
};

AspLiteral pos_lit(AspAtom a) { return AspLiteral{false, std::move(a)}; }
AspLiteral neg_lit(AspAtom a) { return AspLiteral{true, std::move(a)}; }

struct Occurrence {
  std::string var;  // the per-occurrence variable sitting in the atom
  int pos = 0;
  bool obj = false;
  AspTerm tid;  // the atom's tuple-id term
};

// Rewritten rule or constraint body. Relational atoms bind per-occurrence
// variables; joins, constants, and similarity atoms are lifted through the
// eqo / val indirection so matching happens over merge classes rather than
// stored constants; inequalities become negated class-sharing tests.
struct HatBody {
  std::vector<AspLiteral> atoms;
  std::vector<AspLiteral> joins;
  std::vector<AspLiteral> anchors;
  std::vector<AspLiteral> sims;
  std::vector<AspLiteral> ineqs;
  std::vector<AspRule> aux;     // sharev helper rules for value inequalities
  bool unsatisfiable = false;   // an inequality can never hold; emit nothing

  std::vector<AspLiteral> all() const {
    std::vector<AspLiteral> out = atoms;
    out.insert(out.end(), joins.begin(), joins.end());
    out.insert(out.end(), anchors.begin(), anchors.end());
    out.insert(out.end(), sims.begin(), sims.end());
    out.insert(out.end(), ineqs.begin(), ineqs.end());
    return out;
  }
};

struct BodyBuilder {
  const Schema& schema;
  VarCounter& vc;
  int& sharev_counter;
  // (atom index, position) -> pre-assigned variable (object-rule head vars).
  std::map<std::pair<int, int>, std::string> pinned;

  std::map<std::string, std::vector<Occurrence>> occ;
  std::vector<std::string> occ_order;
  std::map<std::string, std::string> witness;  // join var -> witness variable

  void record(const std::string& name, Occurrence o) {
    if (!occ.count(name)) occ_order.push_back(name);
    occ[name].push_back(std::move(o));
  }

  HatBody build(const Query& q) {
    HatBody out;

    for (size_t ai = 0; ai < q.atoms.size(); ++ai) {
      const RelAtom& a = q.atoms[ai];
      const Relation& rel = schema.at(a.relation);
      AspAtom atom{mangle_relation(a.relation), {}};

      AspTerm tid_term;
      if (const Var* v = std::get_if<Var>(&a.terms[0]))
        tid_term = AspTerm::var(vc.of(v->name));
      else
        tid_term = AspTerm::sym(mangle(Kind::Tid, std::get<Constant>(a.terms[0]).lexeme));
      atom.args.push_back(tid_term);

      for (size_t p = 1; p < a.terms.size(); ++p) {
        bool obj_pos = rel.types[p - 1] == PosKind::Obj;
        if (const Var* v = std::get_if<Var>(&a.terms[p])) {
          auto pin = pinned.find({static_cast<int>(ai), static_cast<int>(p)});
          std::string av = pin != pinned.end() ? pin->second : vc.fresh();
          atom.args.push_back(AspTerm::var(av));
          record(v->name, Occurrence{av, static_cast<int>(p), obj_pos, tid_term});
        } else {
          const Constant& c = std::get<Constant>(a.terms[p]);
          std::string av = vc.fresh();
          atom.args.push_back(AspTerm::var(av));
          if (obj_pos)
            out.anchors.push_back(pos_lit(
                AspAtom{"eqo", {AspTerm::var(av), AspTerm::sym(mangle(Kind::Obj, c.lexeme))}}));
          else
            out.anchors.push_back(pos_lit(
                AspAtom{"val", {tid_term, AspTerm::integer(p), AspTerm::str(c.lexeme)}}));
        }
      }
      out.atoms.push_back(pos_lit(std::move(atom)));
    }

    for (const auto& name : occ_order) {
      const auto& os = occ[name];
      if (os.size() < 2) continue;
      std::string w = vc.fresh();
      witness[name] = w;
      for (const auto& o : os) {
        if (o.obj)
          out.joins.push_back(
              pos_lit(AspAtom{"eqo", {AspTerm::var(o.var), AspTerm::var(w)}}));
        else
          out.joins.push_back(pos_lit(
              AspAtom{"val", {o.tid, AspTerm::integer(o.pos), AspTerm::var(w)}}));
      }
    }

    for (const auto& [l, r] : q.sims) {
      AspTerm lt = sim_side(l, out);
      AspTerm rt = sim_side(r, out);
      out.sims.push_back(pos_lit(AspAtom{"sim", {lt, rt}}));
    }

    for (const auto& [l, r] : q.ineqs) translate_ineq(l, r, out);
    return out;
  }

  AspTerm sim_side(const Term& t, HatBody& out) {
    if (const Constant* c = std::get_if<Constant>(&t)) return AspTerm::str(c->lexeme);
    const std::string& name = std::get<Var>(t).name;
    std::string w = vc.fresh();
    for (const auto& o : occ.at(name))
      out.sims.push_back(
          pos_lit(AspAtom{"val", {o.tid, AspTerm::integer(o.pos), AspTerm::var(w)}}));
    return AspTerm::var(w);
  }

  Kind side_kind(const Term& t) const {
    if (const Constant* c = std::get_if<Constant>(&t)) return c->kind;
    const auto& os = occ.at(std::get<Var>(t).name);
    return os.front().obj ? Kind::Obj : Kind::Val;
  }

  void translate_ineq(const Term& l, const Term& r, HatBody& out) {
    if (term_eq(l, r)) {
      out.unsatisfiable = true;  // x != x never holds
      return;
    }
    Kind lk = side_kind(l), rk = side_kind(r);
    if (lk != rk) return;  // distinct namespaces never share a constant

    if (lk == Kind::Obj) {
      out.ineqs.push_back(neg_lit(AspAtom{"eqo", {obj_rep(l), obj_rep(r)}}));
      return;
    }

    const Constant* lc = std::get_if<Constant>(&l);
    const Constant* rc = std::get_if<Constant>(&r);
    if (lc && rc) {
      if (lc->lexeme == rc->lexeme) out.unsatisfiable = true;
      return;  // distinct literals always differ
    }

    // Shared-constant test: sharev<k>(tids...) holds iff some constant is
    // stored by every merge class the two sides touch.
    AspRule aux;
    VarCounter avc;
    std::vector<AspTerm> head_args;
    std::vector<AspTerm> outer_args;
    AspTerm w = (lc || rc) ? AspTerm::str(lc ? lc->lexeme : rc->lexeme)
                           : AspTerm::var(std::string());
    if (w.kind == AspTerm::Kind::Var) w = AspTerm::var("W");

    auto add_side = [&](const Term& t) {
      const Var* v = std::get_if<Var>(&t);
      if (!v) return;
      for (const auto& o : occ.at(v->name)) {
        AspTerm outer_tid = o.tid;
        AspTerm inner_tid = outer_tid;
        if (outer_tid.kind == AspTerm::Kind::Var) {
          bool seen = false;
          for (size_t i = 0; i < outer_args.size(); ++i)
            if (outer_args[i].kind == AspTerm::Kind::Var &&
                outer_args[i].text == outer_tid.text) {
              inner_tid = head_args[i];
              seen = true;
              break;
            }
          if (!seen) {
            inner_tid = AspTerm::var(avc.fresh());
            head_args.push_back(inner_tid);
            outer_args.push_back(outer_tid);
          }
        }
        aux.body.push_back(
            pos_lit(AspAtom{"val", {inner_tid, AspTerm::integer(o.pos), w}}));
      }
    };
    add_side(l);
    add_side(r);

    std::string pred = "sharev" + std::to_string(sharev_counter++);
    aux.head = AspAtom{pred, head_args};
    out.aux.push_back(std::move(aux));
    out.ineqs.push_back(neg_lit(AspAtom{pred, outer_args}));
  }

  AspTerm obj_rep(const Term& t) {
    if (const Constant* c = std::get_if<Constant>(&t))
      return AspTerm::sym(mangle(Kind::Obj, c->lexeme));
    const std::string& name = std::get<Var>(t).name;
    auto w = witness.find(name);
    if (w != witness.end()) return AspTerm::var(w->second);
    return AspTerm::var(occ.at(name).front().var);
  }
};

AspRule make_rule(AspAtom head, std::vector<AspLiteral> body) {
  AspRule r;
  r.head = std::move(head);
  r.body = std::move(body);
  return r;
}

AspRule make_fact(AspAtom head) { return make_rule(std::move(head), {}); }

}  // namespace

AspProgram emit_program(const Database& db, const Specification& spec,
                        const SimilarityOracle& sim) {
  AspProgram out;

  std::vector<AspRule> facts;
  for (const auto& f : db.facts) {
    AspAtom a{mangle_relation(f.relation), {AspTerm::sym(mangle(Kind::Tid, f.tid))}};
    for (const auto& c : f.args)
      a.args.push_back(c.kind == Kind::Obj ? AspTerm::sym(mangle(Kind::Obj, c.lexeme))
                                           : AspTerm::str(c.lexeme));
    facts.push_back(make_fact(std::move(a)));
  }
  for (const auto& f : db.facts)
    facts.push_back(make_fact(AspAtom{"tid", {AspTerm::sym(mangle(Kind::Tid, f.tid))}}));
  for (const auto& f : db.facts) {
    const Relation& rel = db.schema.at(f.relation);
    for (size_t p = 0; p < rel.types.size(); ++p)
      if (rel.types[p] == PosKind::Val)
        facts.push_back(make_fact(AspAtom{
            "valpos",
            {AspTerm::sym(mangle(Kind::Tid, f.tid)), AspTerm::integer(p + 1)}}));
  }
  out.sections.emplace_back("facts", std::move(facts));

  // Similar value pairs, materialized both ways round plus reflexively, over
  // database values and value constants mentioned by the specification.
  std::set<std::string> universe;
  for (const auto& v : vals_of(db)) universe.insert(v);
  {
    std::set<std::string> objs_unused;
    auto scan_term = [&](const Term& t) {
      if (const Constant* c = std::get_if<Constant>(&t))
        if (c->kind == Kind::Val) universe.insert(c->lexeme);
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
  std::vector<AspRule> sims;
  for (const auto& a : universe)
    for (const auto& b : universe)
      if (sim.sim(a, b))
        sims.push_back(make_fact(AspAtom{"sim", {AspTerm::str(a), AspTerm::str(b)}}));
  out.sections.emplace_back("similarity", std::move(sims));

  std::vector<AspRule> structure;
  for (const auto& [rname, rel] : db.schema.relations) {
    for (size_t p = 1; p <= rel.arity(); ++p) {
      AspAtom body{mangle_relation(rname), {}};
      for (size_t i = 0; i <= rel.arity(); ++i)
        body.args.push_back(AspTerm::var("V" + std::to_string(i)));
      AspAtom head{"proj",
                   {AspTerm::var("V0"), AspTerm::integer(p),
                    AspTerm::var("V" + std::to_string(p))}};
      structure.push_back(make_rule(std::move(head), {pos_lit(std::move(body))}));
    }
  }
  for (const auto& [rname, rel] : db.schema.relations) {
    for (size_t p = 1; p <= rel.arity(); ++p) {
      if (rel.types[p - 1] != PosKind::Obj) continue;
      AspAtom body{mangle_relation(rname), {}};
      for (size_t i = 0; i <= rel.arity(); ++i)
        body.args.push_back(AspTerm::var("V" + std::to_string(i)));
      structure.push_back(make_rule(AspAtom{"obj", {AspTerm::var("V" + std::to_string(p))}},
                                    {pos_lit(std::move(body))}));
    }
  }
  // Stored values of a whole merge class.
  structure.push_back(make_rule(
      AspAtom{"val", {AspTerm::var("V0"), AspTerm::var("V1"), AspTerm::var("V2")}},
      {pos_lit(AspAtom{"eqv",
                       {AspTerm::var("V0"), AspTerm::var("V1"), AspTerm::var("V3"),
                        AspTerm::var("V4")}}),
       pos_lit(AspAtom{"proj", {AspTerm::var("V3"), AspTerm::var("V4"), AspTerm::var("V2")}})}));
  // Both merge relations are equivalence relations.
  structure.push_back(
      make_rule(AspAtom{"eqo", {AspTerm::var("V0"), AspTerm::var("V0")}},
                {pos_lit(AspAtom{"obj", {AspTerm::var("V0")}})}));
  structure.push_back(
      make_rule(AspAtom{"eqo", {AspTerm::var("V0"), AspTerm::var("V1")}},
                {pos_lit(AspAtom{"eqo", {AspTerm::var("V1"), AspTerm::var("V0")}})}));
  structure.push_back(
      make_rule(AspAtom{"eqo", {AspTerm::var("V0"), AspTerm::var("V1")}},
                {pos_lit(AspAtom{"eqo", {AspTerm::var("V0"), AspTerm::var("V2")}}),
                 pos_lit(AspAtom{"eqo", {AspTerm::var("V2"), AspTerm::var("V1")}})}));
  structure.push_back(make_rule(
      AspAtom{"eqv",
              {AspTerm::var("V0"), AspTerm::var("V1"), AspTerm::var("V0"),
               AspTerm::var("V1")}},
      {pos_lit(AspAtom{"tid", {AspTerm::var("V0")}}),
       pos_lit(AspAtom{"valpos", {AspTerm::var("V0"), AspTerm::var("V1")}})}));
  structure.push_back(make_rule(
      AspAtom{"eqv",
              {AspTerm::var("V0"), AspTerm::var("V1"), AspTerm::var("V2"),
               AspTerm::var("V3")}},
      {pos_lit(AspAtom{"eqv",
                       {AspTerm::var("V2"), AspTerm::var("V3"), AspTerm::var("V0"),
                        AspTerm::var("V1")}})}));
  structure.push_back(make_rule(
      AspAtom{"eqv",
              {AspTerm::var("V0"), AspTerm::var("V1"), AspTerm::var("V2"),
               AspTerm::var("V3")}},
      {pos_lit(AspAtom{"eqv",
                       {AspTerm::var("V0"), AspTerm::var("V1"), AspTerm::var("V4"),
                        AspTerm::var("V5")}}),
       pos_lit(AspAtom{"eqv",
                       {AspTerm::var("V4"), AspTerm::var("V5"), AspTerm::var("V2"),
                        AspTerm::var("V3")}})}));
  out.sections.emplace_back("structure", std::move(structure));

  bool any_soft_val = false, any_soft_obj = false;
  for (const auto& r : spec.rules) {
    if (r.hard) continue;
    (r.head == HeadKind::Val ? any_soft_val : any_soft_obj) = true;
  }
  if (any_soft_val || any_soft_obj) {
    std::vector<AspRule> choices;
    if (any_soft_val) {
      std::vector<AspTerm> cell{AspTerm::var("V0"), AspTerm::var("V1"), AspTerm::var("V2"),
                                AspTerm::var("V3")};
      choices.push_back(make_rule(AspAtom{"eqv", cell},
                                  {pos_lit(AspAtom{"activev", cell}),
                                   neg_lit(AspAtom{"neqv", cell})}));
      choices.push_back(make_rule(AspAtom{"neqv", cell},
                                  {pos_lit(AspAtom{"activev", cell}),
                                   neg_lit(AspAtom{"eqv", cell})}));
    }
    if (any_soft_obj) {
      std::vector<AspTerm> pair{AspTerm::var("V0"), AspTerm::var("V1")};
      choices.push_back(make_rule(AspAtom{"eqo", pair},
                                  {pos_lit(AspAtom{"activeo", pair}),
                                   neg_lit(AspAtom{"neqo", pair})}));
      choices.push_back(make_rule(AspAtom{"neqo", pair},
                                  {pos_lit(AspAtom{"activeo", pair}),
                                   neg_lit(AspAtom{"eqo", pair})}));
    }
    out.sections.emplace_back("choices", std::move(choices));
  }

  int sharev_counter = 0;

  std::vector<AspRule> rules;
  for (const auto& r : spec.rules) {
    VarCounter vc;
    BodyBuilder bb{db.schema, vc, sharev_counter, {}, {}, {}, {}};
    AspAtom head;

    if (r.head == HeadKind::Val) {
      std::string xt = vc.of(r.body.free_vars[0]);
      std::string yt = vc.of(r.body.free_vars[1]);
      head = AspAtom{r.hard ? "eqv" : "activev",
                     {AspTerm::var(xt), AspTerm::integer(r.pos_i), AspTerm::var(yt),
                      AspTerm::integer(r.pos_j)}};
    } else {
      std::string hx = vc.fresh();
      std::string hy = vc.fresh();
      auto pin = [&](const std::string& var, const std::string& to) {
        for (size_t ai = 0; ai < r.body.atoms.size(); ++ai) {
          const auto& terms = r.body.atoms[ai].terms;
          for (size_t p = 1; p < terms.size(); ++p) {
            const Var* v = std::get_if<Var>(&terms[p]);
            if (v && v->name == var &&
                !bb.pinned.count({static_cast<int>(ai), static_cast<int>(p)})) {
              bb.pinned[{static_cast<int>(ai), static_cast<int>(p)}] = to;
              return;
            }
          }
        }
      };
      pin(r.body.free_vars[0], hx);
      pin(r.body.free_vars[1], hy);
      head = AspAtom{r.hard ? "eqo" : "activeo", {AspTerm::var(hx), AspTerm::var(hy)}};
    }

    HatBody hat = bb.build(r.body);
    rules.push_back(make_rule(std::move(head), hat.all()));
  }
  out.sections.emplace_back("rules", std::move(rules));

  std::vector<AspRule> constraints;
  for (const auto& dc : spec.dcs) {
    VarCounter vc;
    BodyBuilder bb{db.schema, vc, sharev_counter, {}, {}, {}, {}};
    HatBody hat = bb.build(dc.body);
    if (hat.unsatisfiable) continue;
    for (auto& aux : hat.aux) constraints.push_back(std::move(aux));
    AspRule c;
    c.body = hat.all();
    constraints.push_back(std::move(c));
  }
  out.sections.emplace_back("constraints", std::move(constraints));

  return out;
}

void validate_program(const AspProgram& p, const Database& db) {
  std::map<std::string, size_t> inventory = {
      {"proj", 3}, {"obj", 1},     {"val", 3},  {"eqo", 2},    {"eqv", 4},
      {"activeo", 2}, {"neqo", 2}, {"activev", 4}, {"neqv", 4}, {"tid", 1},
      {"valpos", 2},  {"sim", 2}};
  for (const auto& [name, rel] : db.schema.relations)
    inventory[mangle_relation(name)] = rel.arity() + 1;

  auto check_atom = [&](const AspAtom& a) {
    auto it = inventory.find(a.pred);
    if (it == inventory.end()) {
      bool sharev = a.pred.rfind("sharev", 0) == 0 &&
                    a.pred.size() > 6 &&
                    std::all_of(a.pred.begin() + 6, a.pred.end(),
                                [](char c) { return std::isdigit(static_cast<unsigned char>(c)); });
      if (!sharev) throw Error("E_DOMAIN", "unknown predicate " + a.pred);
      return;
    }
    if (a.args.size() != it->second)
      throw Error("E_DOMAIN", "arity mismatch for " + a.pred);
  };

  for (const AspRule* r : p.all_rules()) {
    std::set<std::string> positive;
    std::set<std::string> used;
    auto vars_of = [](const AspAtom& a, std::set<std::string>& into) {
      for (const auto& t : a.args)
        if (t.kind == AspTerm::Kind::Var) into.insert(t.text);
    };
    if (r->head) {
      check_atom(*r->head);
      vars_of(*r->head, used);
    }
    for (const auto& lit : r->body) {
      check_atom(lit.atom);
      vars_of(lit.atom, used);
      if (!lit.negated && lit.atom.pred != "sim") vars_of(lit.atom, positive);
    }
    for (const auto& v : used)
      if (!positive.count(v))
        throw Error("E_DOMAIN", "unsafe variable " + v + " in " + r->render());
  }
}

namespace {

// Splits solver output into ground atoms; commas inside quoted strings and
// parentheses do not separate atoms.
std::vector<std::string> scan_atoms(const std::string& text) {
  std::vector<std::string> out;
  size_t i = 0;
  while (i < text.size()) {
    if (std::isspace(static_cast<unsigned char>(text[i]))) {
      ++i;
      continue;
    }
    size_t start = i;
    int depth = 0;
    bool in_str = false;
    while (i < text.size()) {
      char c = text[i];
      if (in_str) {
        if (c == '\\') ++i;
        else if (c == '"') in_str = false;
      } else if (c == '"') {
        in_str = true;
      } else if (c == '(') {
        ++depth;
      } else if (c == ')') {
        --depth;
        if (depth == 0) {
          ++i;
          break;
        }
      } else if (depth == 0 && std::isspace(static_cast<unsigned char>(c))) {
        break;
      }
      ++i;
    }
    out.push_back(text.substr(start, i - start));
  }
  return out;
}

std::vector<std::string> split_args(const std::string& inner) {
  std::vector<std::string> out;
  std::string cur;
  bool in_str = false;
  for (size_t i = 0; i < inner.size(); ++i) {
    char c = inner[i];
    if (in_str) {
      cur += c;
      if (c == '\\' && i + 1 < inner.size()) cur += inner[++i];
      else if (c == '"') in_str = false;
    } else if (c == '"') {
      cur += c;
      in_str = true;
    } else if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

}  // namespace

std::pair<ObjectPartition, CellPartition> decode_model(const std::string& model_text,
                                                       const Database& db) {
  std::map<std::string, Constant> objects;
  for (const auto& o : obj_of(db)) objects.emplace(mangle(Kind::Obj, o.lexeme), o);
  std::map<std::string, std::string> tids;
  for (const auto& f : db.facts) tids.emplace(mangle(Kind::Tid, f.tid), f.tid);

  ObjectPartition e = trivial_objects(db);
  CellPartition v = trivial_cells(db);

  for (const std::string& atom : scan_atoms(model_text)) {
    size_t open = atom.find('(');
    if (open == std::string::npos || atom.back() != ')') continue;
    std::string pred = atom.substr(0, open);
    if (pred != "eqo" && pred != "eqv") continue;
    std::vector<std::string> args = split_args(atom.substr(open + 1, atom.size() - open - 2));

    if (pred == "eqo") {
      if (args.size() != 2) throw Error("E_DOMAIN", "malformed atom " + atom);
      auto a = objects.find(args[0]);
      auto b = objects.find(args[1]);
      if (a == objects.end() || b == objects.end())
        throw Error("E_DOMAIN", "unknown object in " + atom);
      e.unite(a->second, b->second);
    } else {
      if (args.size() != 4) throw Error("E_DOMAIN", "malformed atom " + atom);
      auto t1 = tids.find(args[0]);
      auto t2 = tids.find(args[2]);
      if (t1 == tids.end() || t2 == tids.end())
        throw Error("E_DOMAIN", "unknown tuple id in " + atom);
      Cell c1{t1->second, std::atoi(args[1].c_str())};
      Cell c2{t2->second, std::atoi(args[3].c_str())};
      if (!v.contains(c1) || !v.contains(c2))
        throw Error("E_DOMAIN", "not a value cell in " + atom);
      v.unite(c1, c2);
    }
  }
  return {std::move(e), std::move(v)};
}

std::optional<std::vector<std::pair<ObjectPartition, CellPartition>>> solve_with_env_solver(
    const AspProgram& p, const Database& db) {
  const char* cmd = std::getenv("LACE_ASP_SOLVER");
  if (!cmd || !*cmd) return std::nullopt;

  char path[] = "/tmp/lace_asp_XXXXXX";
  int fd = mkstemp(path);
  if (fd < 0) throw Error("E_DOMAIN", "cannot create temp file for solver input");
  std::string text = p.render();
  FILE* f = fdopen(fd, "w");
  fwrite(text.data(), 1, text.size(), f);
  fclose(f);

  std::string full = std::string(cmd) + " " + path;
  FILE* pipe = popen(full.c_str(), "r");
  if (!pipe) {
    std::remove(path);
    throw Error("E_DOMAIN", "cannot run solver: " + full);
  }
  std::string output;
  char buf[4096];
  size_t n;
  while ((n = fread(buf, 1, sizeof buf, pipe)) > 0) output.append(buf, n);
  pclose(pipe);
  std::remove(path);

  std::vector<std::pair<ObjectPartition, CellPartition>> models;
  std::istringstream lines(output);
  std::string line;
  bool expect_model = false;
  while (std::getline(lines, line)) {
    if (line.rfind("Answer:", 0) == 0) {
      expect_model = true;
      continue;
    }
    if (expect_model && !line.empty()) {
      models.push_back(decode_model(line, db));
      expect_model = false;
    }
  }
  return models;
}

}  // namespace lace
