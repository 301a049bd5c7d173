#include "lace/model.hpp"

#include <algorithm>
#include <sstream>

namespace lace {

const char* kind_name(Kind k) {
  switch (k) {
    case Kind::Obj: return "object";
    case Kind::Val: return "value";
    case Kind::Tid: return "tid";
  }
  return "?";
}

void Schema::add(Relation r) {
  if (r.types.empty()) throw Error("E_ARITY", "relation " + r.name + " must have arity >= 1");
  if (relations.count(r.name))
    throw Error("E_DUP_RELATION", "relation " + r.name + " declared twice");
  relations.emplace(r.name, std::move(r));
}

const Relation* Schema::find(const std::string& name) const {
  auto it = relations.find(name);
  return it == relations.end() ? nullptr : &it->second;
}

const Relation& Schema::at(const std::string& name) const {
  const Relation* r = find(name);
  if (!r) throw Error("E_UNKNOWN_RELATION", "unknown relation " + name);
  return *r;
}

void Database::add(Fact f) {
  const Relation& rel = schema.at(f.relation);
  if (f.args.size() != rel.arity())
    throw Error("E_ARITY", "fact " + f.tid + ": " + f.relation + " expects " +
                               std::to_string(rel.arity()) + " arguments, got " +
                               std::to_string(f.args.size()));
  for (size_t i = 0; i < rel.arity(); ++i) {
    Kind want = rel.types[i] == PosKind::Obj ? Kind::Obj : Kind::Val;
    if (f.args[i].kind != want)
      throw Error("E_TYPE", "fact " + f.tid + ": position " + std::to_string(i + 1) + " of " +
                                f.relation + " expects a " +
                                (want == Kind::Obj ? "object" : "value") + " constant");
  }
  if (tid_index.count(f.tid)) throw Error("E_TID_REUSE", "tid " + f.tid + " already used");
  tid_index.emplace(f.tid, static_cast<int>(facts.size()));
  facts.push_back(std::move(f));
}

const Fact* Database::by_tid(const std::string& tid) const {
  auto it = tid_index.find(tid);
  return it == tid_index.end() ? nullptr : &facts[it->second];
}

std::string to_string(const Cell& c) { return c.tid + "." + std::to_string(c.pos); }

std::vector<Constant> obj_of(const Database& db) {
  std::set<Constant> out;
  for (const Fact& f : db.facts)
    for (const Constant& c : f.args)
      if (c.kind == Kind::Obj) out.insert(c);
  return {out.begin(), out.end()};
}

std::vector<Cell> cells_of(const Database& db) {
  std::vector<Cell> out;
  for (const Fact& f : db.facts) {
    const Relation& rel = db.schema.at(f.relation);
    for (size_t i = 0; i < rel.arity(); ++i)
      if (rel.types[i] == PosKind::Val) out.push_back({f.tid, static_cast<int>(i) + 1});
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<Constant> dom_of(const Database& db) {
  std::set<Constant> out;
  for (const Fact& f : db.facts) {
    out.insert(tid_const(f.tid));
    for (const Constant& c : f.args) out.insert(c);
  }
  return {out.begin(), out.end()};
}

std::vector<std::string> vals_of(const Database& db) {
  std::set<std::string> out;
  for (const Fact& f : db.facts)
    for (const Constant& c : f.args)
      if (c.kind == Kind::Val) out.insert(c.lexeme);
  return {out.begin(), out.end()};
}

template <class T>
Partition<T>::Partition(std::vector<T> universe) : universe_(std::move(universe)) {
  std::sort(universe_.begin(), universe_.end());
  universe_.erase(std::unique(universe_.begin(), universe_.end()), universe_.end());
  parent_.resize(universe_.size());
  rank_.assign(universe_.size(), 0);
  for (size_t i = 0; i < universe_.size(); ++i) {
    parent_[i] = static_cast<int>(i);
    index_.emplace(universe_[i], static_cast<int>(i));
  }
}

template <class T>
int Partition<T>::index_of(const T& x) const {
  auto it = index_.find(x);
  if (it == index_.end()) {
    if constexpr (std::is_same_v<T, Cell>)
      throw DomainError("element outside partition universe: " + to_string(x));
    else
      throw DomainError("element outside partition universe: " + x.lexeme);
  }
  return it->second;
}

template <class T>
int Partition<T>::root(int i) const {
  while (parent_[i] != i) {
    parent_[i] = parent_[parent_[i]];
    i = parent_[i];
  }
  return i;
}

template <class T>
bool Partition<T>::unite(const T& a, const T& b) {
  int ra = root(index_of(a)), rb = root(index_of(b));
  if (ra == rb) return false;
  if (rank_[ra] < rank_[rb]) std::swap(ra, rb);
  parent_[rb] = ra;
  if (rank_[ra] == rank_[rb]) ++rank_[ra];
  ++merges_;
  return true;
}

template <class T>
std::vector<std::vector<T>> Partition<T>::classes(bool include_singletons) const {
  std::map<int, std::vector<T>> groups;
  for (size_t i = 0; i < universe_.size(); ++i)
    groups[root(static_cast<int>(i))].push_back(universe_[i]);
  std::vector<std::vector<T>> out;
  for (auto& [_, members] : groups) {
    if (!include_singletons && members.size() < 2) continue;
    std::sort(members.begin(), members.end());
    out.push_back(std::move(members));
  }
  std::sort(out.begin(), out.end(),
            [](const auto& a, const auto& b) { return a.front() < b.front(); });
  return out;
}

template <class T>
std::vector<std::pair<T, T>> Partition<T>::pairs() const {
  std::vector<std::pair<T, T>> out;
  for (const auto& cls : classes(false))
    for (size_t i = 0; i < cls.size(); ++i)
      for (size_t j = i + 1; j < cls.size(); ++j) out.emplace_back(cls[i], cls[j]);
  std::sort(out.begin(), out.end());
  return out;
}

template <class T>
size_t Partition<T>::class_count() const {
  std::set<int> roots;
  for (size_t i = 0; i < universe_.size(); ++i) roots.insert(root(static_cast<int>(i)));
  return roots.size();
}

template <class T>
bool Partition<T>::refines(const Partition& other) const {
  for (const auto& cls : classes(false))
    for (size_t i = 1; i < cls.size(); ++i)
      if (!other.same(cls[0], cls[i])) return false;
  return true;
}

template <class T>
bool Partition<T>::operator==(const Partition& other) const {
  return universe_ == other.universe_ && refines(other) && other.refines(*this);
}

template <class T>
std::string Partition<T>::key() const {
  std::ostringstream os;
  for (const auto& cls : classes(false)) {
    os << '{';
    for (size_t i = 0; i < cls.size(); ++i) {
      if (i) os << ' ';
      if constexpr (std::is_same_v<T, Cell>)
        os << to_string(cls[i]);
      else
        os << cls[i].lexeme;
    }
    os << '}';
  }
  return os.str();
}

template class Partition<Constant>;
template class Partition<Cell>;

ObjectPartition trivial_objects(const Database& db) { return ObjectPartition(obj_of(db)); }
CellPartition trivial_cells(const Database& db) { return CellPartition(cells_of(db)); }

template <class T>
Partition<T> eqrel_close(const std::vector<std::pair<T, T>>& pairs, std::vector<T> universe) {
  Partition<T> p(std::move(universe));
  for (const auto& [a, b] : pairs) p.unite(a, b);
  return p;
}

template Partition<Constant> eqrel_close(const std::vector<std::pair<Constant, Constant>>&,
                                         std::vector<Constant>);
template Partition<Cell> eqrel_close(const std::vector<std::pair<Cell, Cell>>&, std::vector<Cell>);

void SimilarityOracle::add_pair(const std::string& a, const std::string& b) {
  table_.emplace(std::min(a, b), std::max(a, b));
}

void SimilarityOracle::set_threshold(double theta) {
  if (!(theta >= 0.0 && theta <= 1.0))
    throw DomainError("similarity threshold must lie in [0,1]");
  threshold_ = theta;
}

bool SimilarityOracle::sim(const std::string& a, const std::string& b) const {
  if (a == b) return true;
  if (table_.count({std::min(a, b), std::max(a, b)})) return true;
  if (threshold_) return normalized_edit_similarity(a, b) >= *threshold_;
  return false;
}

double normalized_edit_similarity(const std::string& a, const std::string& b) {
  if (a.empty() && b.empty()) return 1.0;
  const size_t n = a.size(), m = b.size();
  std::vector<size_t> prev(m + 1), cur(m + 1);
  for (size_t j = 0; j <= m; ++j) prev[j] = j;
  for (size_t i = 1; i <= n; ++i) {
    cur[0] = i;
    for (size_t j = 1; j <= m; ++j) {
      size_t sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
    }
    std::swap(prev, cur);
  }
  double lev = static_cast<double>(prev[m]);
  return 1.0 - lev / static_cast<double>(std::max(n, m));
}

ExtendedDatabase induce_extended_db(const Database& db, const ObjectPartition& e,
                                    const CellPartition& v) {
  if (e.universe() != obj_of(db))
    throw DomainError("object partition universe does not match the database");
  if (v.universe() != cells_of(db))
    throw DomainError("cell partition universe does not match the database");

  // Stored value of every cell, then one value set per merge class.
  std::map<Cell, Constant> stored;
  for (const Fact& f : db.facts) {
    const Relation& rel = db.schema.at(f.relation);
    for (size_t i = 0; i < rel.arity(); ++i)
      if (rel.types[i] == PosKind::Val)
        stored.emplace(Cell{f.tid, static_cast<int>(i) + 1}, f.args[i]);
  }
  std::map<Cell, std::vector<Constant>> class_vals;  // keyed by smallest class member
  for (const auto& cls : v.classes(true)) {
    std::set<Constant> vals;
    for (const Cell& c : cls) vals.insert(stored.at(c));
    class_vals.emplace(cls.front(), std::vector<Constant>(vals.begin(), vals.end()));
  }
  std::map<Cell, const std::vector<Constant>*> cell_vals;
  for (const auto& cls : v.classes(true)) {
    const auto* vals = &class_vals.at(cls.front());
    for (const Cell& c : cls) cell_vals.emplace(c, vals);
  }
  std::map<Constant, std::vector<Constant>> obj_class;
  for (const auto& cls : e.classes(true))
    for (const Constant& o : cls) obj_class.emplace(o, cls);

  ExtendedDatabase out;
  out.db = &db;
  out.facts.reserve(db.facts.size());
  for (size_t fi = 0; fi < db.facts.size(); ++fi) {
    const Fact& f = db.facts[fi];
    const Relation& rel = db.schema.at(f.relation);
    ExtendedFact xf;
    xf.fact_index = static_cast<int>(fi);
    xf.args.resize(rel.arity() + 1);
    xf.args[0] = {tid_const(f.tid)};
    for (size_t i = 0; i < rel.arity(); ++i) {
      if (rel.types[i] == PosKind::Obj)
        xf.args[i + 1] = obj_class.at(f.args[i]);
      else
        xf.args[i + 1] = *cell_vals.at(Cell{f.tid, static_cast<int>(i) + 1});
    }
    out.by_relation[f.relation].push_back(static_cast<int>(fi));
    out.facts.push_back(std::move(xf));
  }
  return out;
}

}  // namespace lace
