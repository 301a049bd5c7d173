#pragma once

#include <string>
#include <utility>
#include <vector>

#include "lace/model.hpp"
#include "lace/query.hpp"

namespace lace {

// Rule set of a resolution problem. Rules keep their source order; names are
// synthesized from kind and position for messages.
struct Specification {
  std::vector<Rule> rules;
  std::vector<DenialConstraint> dcs;
};

struct Workspace {
  Database db;
  SimilarityOracle sim;
  Specification spec;
};

// Parsed merge classes of a .sol document; singleton classes are implicit.
struct SolutionDoc {
  std::vector<std::vector<Constant>> eqo_classes;
  std::vector<std::vector<Cell>> eqv_classes;
};

// Diagnostics print as code:line:col: message (1-based line and column).
struct ParseError : Error {
  int line = 0, col = 0;
  std::string message;
  ParseError(const std::string& code, int line_, int col_, const std::string& msg)
      : Error(code, std::to_string(line_) + ":" + std::to_string(col_) + ": " + msg),
        line(line_),
        col(col_),
        message(msg) {}
  std::string render() const;
};

Schema parse_schema(const std::string& text);
Database parse_database(const std::string& text, const Schema& schema);
SimilarityOracle parse_sim(const std::string& text);
Specification parse_spec(const std::string& text, const Schema& schema);
Workspace parse_workspace(const std::string& text);
SolutionDoc parse_solution(const std::string& text, const Database& db);
Query parse_query(const std::string& text, const Schema& schema);

// Builds the two partitions named by a solution document.
std::pair<ObjectPartition, CellPartition> solution_partitions(const SolutionDoc& doc,
                                                              const Database& db);

std::string render_schema(const Schema& schema);
std::string render_database(const Database& db);
std::string render_sim(const SimilarityOracle& sim);
std::string render_spec(const Specification& spec);
std::string render_workspace(const Workspace& ws);
std::string render_solution(const ObjectPartition& e, const CellPartition& v);
std::string render_query(const Query& q);

}  // namespace lace
