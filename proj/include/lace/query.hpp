#pragma once

#include <map>
#include <string>
#include <variant>
#include <vector>

#include "lace/model.hpp"

namespace lace {

struct Var {
  std::string name;
  auto operator<=>(const Var&) const = default;
};

using Term = std::variant<Var, Constant>;

bool term_eq(const Term& a, const Term& b);
std::string term_text(const Term& t);

// One relational atom R(u0, ..., uk); position 0 matches the tuple id.
struct RelAtom {
  std::string relation;
  std::vector<Term> terms;
};

// Conjunctive query with optional inequality and similarity atoms. Free
// variables are listed in answer order; the list may repeat a name (the
// answer then repeats that variable's binding).
struct Query {
  std::vector<std::string> free_vars;
  std::vector<RelAtom> atoms;
  std::vector<std::pair<Term, Term>> ineqs;
  std::vector<std::pair<Term, Term>> sims;
};

struct DenialConstraint {
  std::string name;
  Query body;  // boolean
};

enum class HeadKind { Obj, Val };

// Merge rule: body answers force (hard) or license (soft) merges. Object
// rules merge the two answer objects; value rules merge cell (x_t, pos_i)
// with cell (y_t, pos_j) for each answer pair of tids.
struct Rule {
  std::string name;
  bool hard = true;
  HeadKind head = HeadKind::Obj;
  Query body;
  int pos_i = 0, pos_j = 0;  // value rules only
};

// Variable kinds inferred from positions; every variable must be used at
// positions of a single kind. Throws Error on malformed queries.
std::map<std::string, Kind> analyze_query(const Query& q, const Schema& schema);
void validate_rule(const Rule& r, const Schema& schema);
void validate_dc(const DenialConstraint& dc, const Schema& schema);

Query substitute(const Query& q, const std::vector<Constant>& tuple);

bool eval_boolean(const Query& q, const ExtendedDatabase& xdb, const SimilarityOracle& sim);
std::vector<std::vector<Constant>> eval_answers(const Query& q, const ExtendedDatabase& xdb,
                                                const SimilarityOracle& sim);

// True iff the constraint holds, i.e. its body has no match.
bool check_dc(const DenialConstraint& dc, const ExtendedDatabase& xdb,
              const SimilarityOracle& sim);

// True iff every body answer is already merged in (e, v).
bool check_rule_sat(const Rule& r, const ExtendedDatabase& xdb, const SimilarityOracle& sim,
                    const ObjectPartition& e, const CellPartition& v);

}  // namespace lace
