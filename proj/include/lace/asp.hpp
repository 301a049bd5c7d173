#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "lace/io.hpp"

namespace lace {

// One term of an emitted ASP atom. Variables render as-is, symbols are
// pre-mangled constants, strings render quoted with escapes.
struct AspTerm {
  enum class Kind { Var, Sym, Int, Str };
  Kind kind = Kind::Sym;
  std::string text;
  long num = 0;

  static AspTerm var(std::string v) { return {Kind::Var, std::move(v), 0}; }
  static AspTerm sym(std::string s) { return {Kind::Sym, std::move(s), 0}; }
  static AspTerm integer(long n) { return {Kind::Int, {}, n}; }
  static AspTerm str(std::string s) { return {Kind::Str, std::move(s), 0}; }

  std::string render() const;
};

struct AspAtom {
  std::string pred;
  std::vector<AspTerm> args;
  std::string render() const;
};

struct AspLiteral {
  bool negated = false;
  AspAtom atom;
};

// head + empty body = fact; no head = constraint.
struct AspRule {
  std::optional<AspAtom> head;
  std::vector<AspLiteral> body;
  std::string render() const;
};

struct AspProgram {
  // Section comment plus its rules; rendered with one "% name" line each.
  std::vector<std::pair<std::string, std::vector<AspRule>>> sections;

  std::string render() const;
  std::vector<const AspRule*> all_rules() const;
};

// Reversible lowercase mangling for symbolic constants ("t_" tids, "o_"
// objects) and relation names ("r_"). Documented in docs/asp.md.
std::string mangle(Kind k, const std::string& lexeme);
std::string mangle_relation(const std::string& name);

AspProgram emit_program(const Database& db, const Specification& spec,
                        const SimilarityOracle& sim);

// Structural checks: predicate inventory and rule safety (every variable of
// a rule occurs in a positive body atom that is not a similarity atom).
void validate_program(const AspProgram& p, const Database& db);

// Reads eqo/2 and eqv/4 ground atoms out of solver output (other atoms are
// ignored) and closes them into partitions over the database.
std::pair<ObjectPartition, CellPartition> decode_model(const std::string& model_text,
                                                       const Database& db);

// Test hook: when LACE_ASP_SOLVER is set, writes the program to a temp file,
// runs `$LACE_ASP_SOLVER <file>` through the shell, and decodes every
// "Answer:" block of the output. Unset variable -> nullopt.
std::optional<std::vector<std::pair<ObjectPartition, CellPartition>>> solve_with_env_solver(
    const AspProgram& p, const Database& db);

}  // namespace lace
