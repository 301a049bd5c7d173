#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace lace {

// Typed error with a stable machine-readable code.
struct Error : std::runtime_error {
  std::string code;
  Error(std::string c, const std::string& msg)
      : std::runtime_error(c + ": " + msg), code(std::move(c)) {}
};

struct DomainError : Error {
  DomainError(const std::string& msg) : Error("E_DOMAIN", msg) {}
};

// Constants come from three disjoint namespaces; lexemes only collide
// across kinds, never within one.
enum class Kind : uint8_t { Obj, Val, Tid };

struct Constant {
  Kind kind;
  std::string lexeme;
  auto operator<=>(const Constant&) const = default;
};

inline Constant obj_const(std::string s) { return {Kind::Obj, std::move(s)}; }
inline Constant val_const(std::string s) { return {Kind::Val, std::move(s)}; }
inline Constant tid_const(std::string s) { return {Kind::Tid, std::move(s)}; }

const char* kind_name(Kind k);

// Schema positions are 1-based; position 0 always holds the tuple id.
enum class PosKind : uint8_t { Obj, Val };

struct Relation {
  std::string name;
  std::vector<PosKind> types;
  // Display names for positions 1..arity; purely cosmetic, "p<i>" when absent.
  std::vector<std::string> pos_names;
  size_t arity() const { return types.size(); }
};

struct Schema {
  std::map<std::string, Relation> relations;
  void add(Relation r);
  const Relation* find(const std::string& name) const;
  const Relation& at(const std::string& name) const;
};

struct Fact {
  std::string tid;
  std::string relation;
  std::vector<Constant> args;  // positions 1..k
};

// Facts are append-only; each tid names at most one fact.
struct Database {
  Schema schema;
  std::vector<Fact> facts;
  std::map<std::string, int> tid_index;

  void add(Fact f);
  const Fact* by_tid(const std::string& tid) const;
};

// A value cell: 1-based value position of the fact named by tid.
struct Cell {
  std::string tid;
  int pos = 0;
  auto operator<=>(const Cell&) const = default;
};

std::string to_string(const Cell& c);

std::vector<Constant> obj_of(const Database& db);   // object constants, sorted
std::vector<Cell> cells_of(const Database& db);     // value cells, sorted
std::vector<Constant> dom_of(const Database& db);   // every constant incl. tids
std::vector<std::string> vals_of(const Database& db);  // value lexemes, sorted

// Union-find over a fixed universe. Copying a partition is cheap enough to
// branch on during search.
template <class T>
class Partition {
 public:
  Partition() = default;
  explicit Partition(std::vector<T> universe);

  const std::vector<T>& universe() const { return universe_; }
  bool contains(const T& x) const { return index_.count(x) != 0; }
  int index_of(const T& x) const;

  bool same(const T& a, const T& b) const { return root(index_of(a)) == root(index_of(b)); }
  bool unite(const T& a, const T& b);  // true if the partition changed

  // Classes ordered by smallest member; members ascending.
  std::vector<std::vector<T>> classes(bool include_singletons = true) const;
  // All same-class pairs (a < b), ascending.
  std::vector<std::pair<T, T>> pairs() const;
  size_t class_count() const;
  bool is_trivial() const { return merges_ == 0; }

  // True iff every class of *this is contained in a class of other.
  bool refines(const Partition& other) const;
  bool operator==(const Partition& other) const;

  std::string key() const;  // canonical form, singleton classes elided

 private:
  int root(int i) const;

  std::vector<T> universe_;
  std::map<T, int> index_;
  mutable std::vector<int> parent_;
  std::vector<int> rank_;
  size_t merges_ = 0;
};

using ObjectPartition = Partition<Constant>;
using CellPartition = Partition<Cell>;

ObjectPartition trivial_objects(const Database& db);
CellPartition trivial_cells(const Database& db);

// Least equivalence relation over `universe` containing `pairs`.
template <class T>
Partition<T> eqrel_close(const std::vector<std::pair<T, T>>& pairs, std::vector<T> universe);

// Explicit pair table plus an optional normalized edit-distance threshold.
// sim() is reflexive and symmetric by construction.
class SimilarityOracle {
 public:
  SimilarityOracle() = default;
  void add_pair(const std::string& a, const std::string& b);
  void set_threshold(double theta);  // theta in [0,1]
  std::optional<double> threshold() const { return threshold_; }
  const std::set<std::pair<std::string, std::string>>& table() const { return table_; }

  bool sim(const std::string& a, const std::string& b) const;

 private:
  std::set<std::pair<std::string, std::string>> table_;  // stored as (min,max)
  std::optional<double> threshold_;
};

// 1 - lev(a,b)/max(|a|,|b|); two empty strings score 1.
double normalized_edit_similarity(const std::string& a, const std::string& b);

// Fact arguments widened to constant sets: position 0 stays the singleton
// {tid}; object positions carry the whole merge class of the stored object;
// value positions carry every value stored by a cell merged with theirs.
struct ExtendedFact {
  int fact_index = -1;
  std::vector<std::vector<Constant>> args;  // positions 0..k, each sorted unique
};

struct ExtendedDatabase {
  const Database* db = nullptr;
  std::vector<ExtendedFact> facts;
  std::map<std::string, std::vector<int>> by_relation;
};

ExtendedDatabase induce_extended_db(const Database& db, const ObjectPartition& e,
                                    const CellPartition& v);

}  // namespace lace
