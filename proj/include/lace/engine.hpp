#pragma once

#include <cstddef>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "lace/io.hpp"
#include "lace/model.hpp"
#include "lace/query.hpp"

namespace lace {

// One justified merge step: an object pair derived by an object rule, or a
// value-rule firing on tids (t1, t2) naming the cells (t1, pos_i), (t2, pos_j).
// Stored normalized (object pair ascending, cell pair ascending).
struct MergeAction {
  int rule = -1;  // index into Specification::rules
  bool object = true;
  Constant o1, o2;
  std::string t1, t2;
  int pos_i = 0, pos_j = 0;

  Cell cell1() const { return {t1, pos_i}; }
  Cell cell2() const { return {t2, pos_j}; }

  friend bool operator==(const MergeAction&, const MergeAction&) = default;
  friend bool operator<(const MergeAction& a, const MergeAction& b) {
    if (a.rule != b.rule) return a.rule < b.rule;
    if (a.object != b.object) return a.object && !b.object;
    if (a.object) {
      if (a.o1 != b.o1) return a.o1 < b.o1;
      return a.o2 < b.o2;
    }
    auto ka = std::make_pair(a.cell1(), a.cell2());
    auto kb = std::make_pair(b.cell1(), b.cell2());
    return ka < kb;
  }
};

// A pair of merge relations; key() is canonical, equal keys mean equal state.
struct SolutionState {
  ObjectPartition e;
  CellPartition v;
  std::string key() const { return e.key() + "|" + v.key(); }
};

struct EnumOptions {
  size_t budget = 1000000;  // states taken off the worklist before giving up
  size_t* explored = nullptr;  // when set, accumulates states taken off the worklist
};

struct BudgetError : Error {
  size_t explored;
  explicit BudgetError(size_t n)
      : Error("E_BUDGET", "search budget exhausted after " + std::to_string(n) + " states"),
        explored(n) {}
};

// Every (rule, pair) whose pair is derived over the state induced by (e, v)
// and is not merged yet, hard and soft rules alike, ordered by rule index
// then pair.
std::vector<MergeAction> applicable_merges(const Workspace& ws, const ObjectPartition& e,
                                           const CellPartition& v);

// Least fixpoint of the hard rules above (e, v), firing rounds of every
// applicable hard merge at once; sound because rule bodies carry no
// inequality atoms, so their answers survive further merging.
SolutionState hard_close(const Workspace& ws, ObjectPartition e, CellPartition v);

// True iff (e, v) is reachable from the identity state by justified single
// merges staying inside (e, v), and the induced state satisfies every hard
// rule and every denial constraint.
bool rec_check(const Workspace& ws, const ObjectPartition& e, const CellPartition& v);

// True iff at least one solution exists. The fast variant is only valid when
// no denial constraint carries inequality atoms; the dispatcher picks it then.
bool existence(const Workspace& ws, const EnumOptions& opts = {});
bool existence_fast(const Workspace& ws);
bool existence_search(const Workspace& ws, const EnumOptions& opts = {});

// All solutions (hard-closed reachable states satisfying hard rules and
// constraints), canonically ordered by key. Throws BudgetError when the state
// budget runs out.
std::vector<SolutionState> enumerate_solutions(const Workspace& ws,
                                               const EnumOptions& opts = {});

// The inclusion-maximal solutions, comparing merged pair sets.
std::vector<SolutionState> enumerate_max_solutions(const Workspace& ws,
                                                   const EnumOptions& opts = {});

// True iff (e, v) is a solution no other solution strictly extends. The fast
// variant requires inequality-free constraints; the dispatcher picks it then.
bool max_rec_check(const Workspace& ws, const ObjectPartition& e, const CellPartition& v,
                   const EnumOptions& opts = {});
bool max_rec_check_fast(const Workspace& ws, const ObjectPartition& e, const CellPartition& v);
bool max_rec_check_general(const Workspace& ws, const ObjectPartition& e,
                           const CellPartition& v, const EnumOptions& opts = {});

using ObjPair = std::pair<Constant, Constant>;
using CellPair = std::pair<Cell, Cell>;
using MergePair = std::variant<ObjPair, CellPair>;

// NoSolution reports an empty solution space, distinct from a negative answer.
enum class Outcome { Yes, No, NoSolution };

// Whether the pair is merged in some solution (equivalently, some maximal
// solution) / in every maximal solution.
Outcome poss_merge(const Workspace& ws, const MergePair& pair, const EnumOptions& opts = {});
Outcome cert_merge(const Workspace& ws, const MergePair& pair, const EnumOptions& opts = {});

// Whether the tuple answers q over some solution (equivalently, some maximal
// solution) / over every maximal solution. q must be inequality-free.
Outcome poss_ans(const Workspace& ws, const Query& q, const std::vector<Constant>& tuple,
                 const EnumOptions& opts = {});
Outcome cert_ans(const Workspace& ws, const Query& q, const std::vector<Constant>& tuple,
                 const EnumOptions& opts = {});

// Reference implementation for tests: breadth-first search over every
// single-merge derivation sequence, no hard-closure shortcut, no pruning
// beyond revisit detection, built on the evaluator primitives alone. Guarded
// by instance size since the state space explodes quickly.
struct OracleLimits {
  size_t max_objects = 6;
  size_t max_cells = 8;
  size_t max_states = 2000000;
};
std::vector<SolutionState> brute_force_solutions(const Workspace& ws,
                                                 const OracleLimits& limits = {});

}  // namespace lace
