#include "lace/io.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <optional>
#include <set>
#include <sstream>

namespace lace {
namespace {

enum class Tok {
  Ident,
  Str,
  Int,
  Float,
  LParen,
  RParen,
  Comma,
  Colon,
  Dot,
  Tilde,
  At,
  Neq,
  HardArrow,   // =>
  SoftArrow,   // ~>
  DcArrow,     // ->
  End,
};

struct Token {
  Tok type = Tok::End;
  std::string text;
  long int_val = 0;
  double float_val = 0.0;
  int col = 0;
};

struct Lexer {
  const std::string& src;
  int line;
  size_t pos = 0;

  Lexer(const std::string& s, int line_no) : src(s), line(line_no) {}

  [[noreturn]] void fail(int col, const std::string& msg) const {
    throw ParseError("E_LEX", line, col, msg);
  }

  std::vector<Token> run() {
    std::vector<Token> out;
    for (;;) {
      skip_ws();
      if (pos >= src.size() || src[pos] == '#') break;
      out.push_back(next());
    }
    Token end;
    end.col = static_cast<int>(pos) + 1;
    out.push_back(end);
    return out;
  }

  void skip_ws() {
    while (pos < src.size() && (src[pos] == ' ' || src[pos] == '\t' || src[pos] == '\r')) ++pos;
  }

  Token next() {
    int col = static_cast<int>(pos) + 1;
    char c = src[pos];
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return ident(col);
    if (std::isdigit(static_cast<unsigned char>(c))) return number(col);
    if (c == '"') return str(col);
    ++pos;
    auto two = [&](char want, Tok t) -> std::optional<Token> {
      if (pos < src.size() && src[pos] == want) {
        ++pos;
        Token tok;
        tok.type = t;
        tok.col = col;
        return tok;
      }
      return std::nullopt;
    };
    Token tok;
    tok.col = col;
    switch (c) {
      case '(': tok.type = Tok::LParen; return tok;
      case ')': tok.type = Tok::RParen; return tok;
      case ',': tok.type = Tok::Comma; return tok;
      case ':': tok.type = Tok::Colon; return tok;
      case '.': tok.type = Tok::Dot; return tok;
      case '@': tok.type = Tok::At; return tok;
      case '~':
        if (auto t = two('>', Tok::SoftArrow)) return *t;
        tok.type = Tok::Tilde;
        return tok;
      case '=':
        if (auto t = two('>', Tok::HardArrow)) return *t;
        fail(col, "expected => after =");
      case '-':
        if (auto t = two('>', Tok::DcArrow)) return *t;
        fail(col, "expected -> after -");
      case '!':
        if (auto t = two('=', Tok::Neq)) return *t;
        fail(col, "expected != after !");
      default:
        fail(col, std::string("unexpected character '") + c + "'");
    }
  }

  Token ident(int col) {
    size_t start = pos;
    while (pos < src.size() &&
           (std::isalnum(static_cast<unsigned char>(src[pos])) || src[pos] == '_'))
      ++pos;
    Token t;
    t.type = Tok::Ident;
    t.text = src.substr(start, pos - start);
    t.col = col;
    return t;
  }

  Token number(int col) {
    size_t start = pos;
    while (pos < src.size() && std::isdigit(static_cast<unsigned char>(src[pos]))) ++pos;
    bool is_float = false;
    if (pos + 1 < src.size() && src[pos] == '.' &&
        std::isdigit(static_cast<unsigned char>(src[pos + 1]))) {
      is_float = true;
      ++pos;
      while (pos < src.size() && std::isdigit(static_cast<unsigned char>(src[pos]))) ++pos;
    }
    Token t;
    t.text = src.substr(start, pos - start);
    t.col = col;
    if (is_float) {
      t.type = Tok::Float;
      t.float_val = std::stod(t.text);
    } else {
      t.type = Tok::Int;
      t.int_val = std::stol(t.text);
    }
    return t;
  }

  Token str(int col) {
    ++pos;  // opening quote
    std::string out;
    while (pos < src.size() && src[pos] != '"') {
      char c = src[pos++];
      if (c == '\\') {
        if (pos >= src.size()) fail(col, "unterminated escape in string");
        char e = src[pos++];
        switch (e) {
          case '"': out.push_back('"'); break;
          case '\\': out.push_back('\\'); break;
          case 'n': out.push_back('\n'); break;
          case 't': out.push_back('\t'); break;
          default: fail(static_cast<int>(pos) - 1, std::string("unknown escape \\") + e);
        }
      } else {
        out.push_back(c);
      }
    }
    if (pos >= src.size()) fail(col, "unterminated string");
    ++pos;  // closing quote
    Token t;
    t.type = Tok::Str;
    t.text = std::move(out);
    t.col = col;
    return t;
  }
};

const char* tok_name(Tok t) {
  switch (t) {
    case Tok::Ident: return "identifier";
    case Tok::Str: return "string";
    case Tok::Int: return "integer";
    case Tok::Float: return "number";
    case Tok::LParen: return "'('";
    case Tok::RParen: return "')'";
    case Tok::Comma: return "','";
    case Tok::Colon: return "':'";
    case Tok::Dot: return "'.'";
    case Tok::Tilde: return "'~'";
    case Tok::At: return "'@'";
    case Tok::Neq: return "'!='";
    case Tok::HardArrow: return "'=>'";
    case Tok::SoftArrow: return "'~>'";
    case Tok::DcArrow: return "'->'";
    case Tok::End: return "end of line";
  }
  return "?";
}

// Cursor over one line's tokens.
struct Cursor {
  std::vector<Token> toks;
  size_t i = 0;
  int line;

  Cursor(const std::string& text, int line_no) : line(line_no) {
    Lexer lex(text, line_no);
    toks = lex.run();
  }

  const Token& peek(size_t ahead = 0) const {
    size_t j = i + ahead;
    return j < toks.size() ? toks[j] : toks.back();
  }
  bool at(Tok t) const { return peek().type == t; }
  Token take() { return toks[std::min(i++, toks.size() - 1)]; }

  Token expect(Tok t, const std::string& what) {
    if (!at(t)) {
      throw ParseError("E_SYNTAX", line, peek().col,
                       "expected " + what + ", found " + tok_name(peek().type));
    }
    return take();
  }

  void expect_end() {
    if (!at(Tok::End))
      throw ParseError("E_SYNTAX", line, peek().col,
                       std::string("unexpected ") + tok_name(peek().type) + " at end of line");
  }

  [[noreturn]] void fail(const std::string& code, const std::string& msg) const {
    throw ParseError(code, line, peek().col, msg);
  }
};

// Sim and inequality atoms have no relation position to fix a '@' constant's
// kind, so '@' means object there; tids are rejected by validation anyway.
Term parse_body_term(Cursor& cur, std::optional<Kind> at_kind) {
  if (cur.at(Tok::At)) {
    cur.take();
    Token name = cur.expect(Tok::Ident, "constant name after '@'");
    return Constant{at_kind.value_or(Kind::Obj), name.text};
  }
  if (cur.at(Tok::Str)) return Constant{Kind::Val, cur.take().text};
  Token v = cur.expect(Tok::Ident, "term");
  return Var{v.text};
}

RelAtom parse_rel_atom(Cursor& cur, const Schema& schema) {
  Token name = cur.expect(Tok::Ident, "relation name");
  const Relation* rel = schema.find(name.text);
  if (!rel) throw ParseError("E_UNKNOWN_RELATION", cur.line, name.col,
                             "unknown relation " + name.text);
  cur.expect(Tok::LParen, "'('");
  RelAtom atom;
  atom.relation = name.text;
  // Position 0 (the tid slot) is implicit in the surface syntax: the first
  // written term is position 0 of the stored atom.
  size_t pos = 0;
  for (;;) {
    std::optional<Kind> at_kind;
    if (pos == 0)
      at_kind = Kind::Tid;
    else if (pos <= rel->arity() && rel->types[pos - 1] == PosKind::Obj)
      at_kind = Kind::Obj;
    int col = cur.peek().col;
    Term t = parse_body_term(cur, at_kind);
    if (std::holds_alternative<Constant>(t)) {
      const Constant& c = std::get<Constant>(t);
      if (pos > 0 && pos <= rel->arity()) {
        PosKind want = rel->types[pos - 1];
        if (want == PosKind::Val && c.kind != Kind::Val)
          throw ParseError("E_TYPE", cur.line, col,
                           "value position " + std::to_string(pos) + " of " + name.text +
                               " needs a quoted string");
        if (want == PosKind::Obj && c.kind != Kind::Obj)
          throw ParseError("E_TYPE", cur.line, col,
                           "object position " + std::to_string(pos) + " of " + name.text +
                               " needs an @-constant");
      } else if (pos == 0 && c.kind != Kind::Tid) {
        throw ParseError("E_TYPE", cur.line, col, "position 0 of " + name.text + " holds a tid");
      }
    }
    atom.terms.push_back(std::move(t));
    ++pos;
    if (cur.at(Tok::Comma)) {
      cur.take();
      continue;
    }
    break;
  }
  cur.expect(Tok::RParen, "')'");
  if (atom.terms.size() != rel->arity() + 1)
    throw ParseError("E_ARITY", cur.line, name.col,
                     name.text + " takes " + std::to_string(rel->arity() + 1) + " terms, got " +
                         std::to_string(atom.terms.size()));
  return atom;
}

// body := atom (',' atom)*  where atom is relational, t1 ~ t2, or t1 != t2.
// A relational atom is recognized by IDENT '('.
void parse_body(Cursor& cur, const Schema& schema, Query& q) {
  for (;;) {
    if (cur.at(Tok::Ident) && cur.peek(1).type == Tok::LParen) {
      q.atoms.push_back(parse_rel_atom(cur, schema));
    } else {
      Term lhs = parse_body_term(cur, std::nullopt);
      if (cur.at(Tok::Tilde)) {
        cur.take();
        Term rhs = parse_body_term(cur, std::nullopt);
        q.sims.emplace_back(lhs, rhs);
      } else if (cur.at(Tok::Neq)) {
        cur.take();
        Term rhs = parse_body_term(cur, std::nullopt);
        q.ineqs.emplace_back(lhs, rhs);
      } else {
        cur.fail("E_SYNTAX", "expected '~' or '!=' after term");
      }
    }
    if (cur.at(Tok::Comma)) {
      cur.take();
      continue;
    }
    return;
  }
}

void parse_relation_line(Cursor& cur, Schema& schema) {
  cur.take();  // 'relation'
  Token name = cur.expect(Tok::Ident, "relation name");
  cur.expect(Tok::LParen, "'('");
  Relation rel;
  rel.name = name.text;
  for (;;) {
    Token pname = cur.expect(Tok::Ident, "position name");
    cur.expect(Tok::Colon, "':'");
    Token kind = cur.expect(Tok::Ident, "'obj' or 'val'");
    if (kind.text == "obj")
      rel.types.push_back(PosKind::Obj);
    else if (kind.text == "val")
      rel.types.push_back(PosKind::Val);
    else
      throw ParseError("E_TYPE", cur.line, kind.col, "position kind must be obj or val");
    rel.pos_names.push_back(pname.text);
    if (cur.at(Tok::Comma)) {
      cur.take();
      continue;
    }
    break;
  }
  cur.expect(Tok::RParen, "')'");
  cur.expect_end();
  try {
    schema.add(rel);
  } catch (const ParseError&) {
    throw;
  } catch (const Error& e) {
    throw ParseError(e.code, cur.line, name.col, e.what());
  }
}

void parse_fact_line(Cursor& cur, Database& db) {
  Token tid = cur.expect(Tok::Ident, "tid");
  cur.expect(Tok::Colon, "':'");
  Token name = cur.expect(Tok::Ident, "relation name");
  const Relation* rel = db.schema.find(name.text);
  if (!rel) throw ParseError("E_UNKNOWN_RELATION", cur.line, name.col,
                             "unknown relation " + name.text);
  cur.expect(Tok::LParen, "'('");
  Fact f;
  f.tid = tid.text;
  f.relation = name.text;
  size_t pos = 1;
  for (;;) {
    int col = cur.peek().col;
    if (cur.at(Tok::Str)) {
      if (pos <= rel->arity() && rel->types[pos - 1] != PosKind::Val)
        throw ParseError("E_TYPE", cur.line, col,
                         "object position " + std::to_string(pos) + " of " + name.text +
                             " needs a bare identifier");
      f.args.push_back(val_const(cur.take().text));
    } else {
      Token id = cur.expect(Tok::Ident, "constant");
      if (pos <= rel->arity() && rel->types[pos - 1] != PosKind::Obj)
        throw ParseError("E_TYPE", cur.line, col,
                         "value position " + std::to_string(pos) + " of " + name.text +
                             " needs a quoted string");
      f.args.push_back(obj_const(id.text));
    }
    ++pos;
    if (cur.at(Tok::Comma)) {
      cur.take();
      continue;
    }
    break;
  }
  cur.expect(Tok::RParen, "')'");
  cur.expect_end();
  try {
    db.add(f);
  } catch (const ParseError&) {
    throw;
  } catch (const Error& e) {
    throw ParseError(e.code, cur.line, tid.col, e.what());
  }
}

void parse_sim_line(Cursor& cur, SimilarityOracle& sim) {
  cur.take();  // 'sim'
  if (cur.at(Tok::Ident) && cur.peek().text == "threshold") {
    cur.take();
    double th;
    if (cur.at(Tok::Float))
      th = cur.take().float_val;
    else if (cur.at(Tok::Int))
      th = static_cast<double>(cur.take().int_val);
    else
      cur.fail("E_SYNTAX", "expected a number after 'sim threshold'");
    cur.expect_end();
    try {
      sim.set_threshold(th);
    } catch (const Error& e) {
      throw ParseError(e.code, cur.line, 1, e.what());
    }
    return;
  }
  Token a = cur.expect(Tok::Str, "quoted value");
  cur.expect(Tok::Tilde, "'~'");
  Token b = cur.expect(Tok::Str, "quoted value");
  cur.expect_end();
  sim.add_pair(a.text, b.text);
}

Rule parse_rule_line(Cursor& cur, const Schema& schema, int index) {
  bool hard = cur.take().text == "hard";
  Token kind = cur.expect(Tok::Ident, "'obj' or 'val'");
  bool obj_rule;
  if (kind.text == "obj")
    obj_rule = true;
  else if (kind.text == "val")
    obj_rule = false;
  else
    throw ParseError("E_SYNTAX", cur.line, kind.col, "rule kind must be obj or val");
  cur.expect(Tok::Colon, "':'");

  Rule r;
  r.hard = hard;
  r.head = obj_rule ? HeadKind::Obj : HeadKind::Val;
  r.name = std::string(hard ? "hard" : "soft") + (obj_rule ? " obj" : " val") + " rule #" +
           std::to_string(index);
  parse_body(cur, schema, r.body);

  if (hard)
    cur.expect(Tok::HardArrow, "'=>'");
  else
    cur.expect(Tok::SoftArrow, "'~>'");

  Token head = cur.expect(Tok::Ident, "EqO or EqV");
  if (obj_rule) {
    if (head.text != "EqO")
      throw ParseError("E_SYNTAX", cur.line, head.col, "object rule head must be EqO");
    cur.expect(Tok::LParen, "'('");
    Token x = cur.expect(Tok::Ident, "variable");
    cur.expect(Tok::Comma, "','");
    Token y = cur.expect(Tok::Ident, "variable");
    cur.expect(Tok::RParen, "')'");
    r.body.free_vars = {x.text, y.text};
  } else {
    if (head.text != "EqV")
      throw ParseError("E_SYNTAX", cur.line, head.col, "value rule head must be EqV");
    cur.expect(Tok::LParen, "'('");
    Token x = cur.expect(Tok::Ident, "variable");
    cur.expect(Tok::Dot, "'.'");
    Token i = cur.expect(Tok::Int, "position");
    cur.expect(Tok::Comma, "','");
    Token y = cur.expect(Tok::Ident, "variable");
    cur.expect(Tok::Dot, "'.'");
    Token j = cur.expect(Tok::Int, "position");
    cur.expect(Tok::RParen, "')'");
    r.body.free_vars = {x.text, y.text};
    r.pos_i = static_cast<int>(i.int_val);
    r.pos_j = static_cast<int>(j.int_val);
  }
  cur.expect_end();
  try {
    validate_rule(r, schema);
  } catch (const ParseError&) {
    throw;
  } catch (const Error& e) {
    throw ParseError(e.code, cur.line, 1, e.what());
  }
  return r;
}

DenialConstraint parse_dc_line(Cursor& cur, const Schema& schema, int index) {
  cur.take();  // 'dc'
  cur.expect(Tok::Colon, "':'");
  DenialConstraint dc;
  dc.name = "dc #" + std::to_string(index);
  parse_body(cur, schema, dc.body);
  cur.expect(Tok::DcArrow, "'->'");
  Token f = cur.expect(Tok::Ident, "'false'");
  if (f.text != "false")
    throw ParseError("E_SYNTAX", cur.line, f.col, "denial constraints end in -> false");
  cur.expect_end();
  try {
    validate_dc(dc, schema);
  } catch (const ParseError&) {
    throw;
  } catch (const Error& e) {
    throw ParseError(e.code, cur.line, 1, e.what());
  }
  return dc;
}

Cell parse_cell_tokens(Cursor& cur) {
  Token t = cur.expect(Tok::Ident, "tid");
  cur.expect(Tok::Dot, "'.'");
  Token p = cur.expect(Tok::Int, "position");
  return Cell{t.text, static_cast<int>(p.int_val)};
}

void parse_solution_line(Cursor& cur, const Database& db, SolutionDoc& doc,
                         std::set<Constant>& seen_objs, std::set<Cell>& seen_cells) {
  std::string which = cur.take().text;  // 'eqo' or 'eqv'
  cur.expect(Tok::Colon, "':'");
  if (which == "eqo") {
    std::vector<Constant> cls;
    auto uni = obj_of(db);
    std::set<Constant> objs(uni.begin(), uni.end());
    while (!cur.at(Tok::End)) {
      Token id = cur.expect(Tok::Ident, "object constant");
      Constant c = obj_const(id.text);
      if (!objs.count(c))
        throw ParseError("E_DOMAIN", cur.line, id.col, id.text + " is not an object of the data");
      if (!seen_objs.insert(c).second)
        throw ParseError("E_DOMAIN", cur.line, id.col, id.text + " appears in two classes");
      cls.push_back(c);
    }
    if (cls.size() < 2) cur.fail("E_SYNTAX", "a class needs at least two members");
    doc.eqo_classes.push_back(std::move(cls));
  } else {
    std::vector<Cell> cls;
    auto all = cells_of(db);
    std::set<Cell> cells(all.begin(), all.end());
    while (!cur.at(Tok::End)) {
      int col = cur.peek().col;
      Cell c = parse_cell_tokens(cur);
      if (!cells.count(c))
        throw ParseError("E_BAD_CELL", cur.line, col,
                         to_string(c) + " is not a value cell of the data");
      if (!seen_cells.insert(c).second)
        throw ParseError("E_DOMAIN", cur.line, col, to_string(c) + " appears in two classes");
      cls.push_back(c);
    }
    if (cls.size() < 2) cur.fail("E_SYNTAX", "a class needs at least two members");
    doc.eqv_classes.push_back(std::move(cls));
  }
}

bool blank_or_comment(const std::string& line) {
  for (char c : line) {
    if (c == '#') return true;
    if (c != ' ' && c != '\t' && c != '\r') return false;
  }
  return true;
}

std::vector<std::string> split_lines(const std::string& text) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : text) {
    if (c == '\n') {
      out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  return out;
}

enum class LineKind { Relation, Fact, Sim, Rule, Dc, Solution, Query };

LineKind classify(const Cursor& cur) {
  const Token& t0 = cur.peek(0);
  if (t0.type == Tok::Ident) {
    if (t0.text == "relation") return LineKind::Relation;
    if (t0.text == "sim") return LineKind::Sim;
    if (t0.text == "hard" || t0.text == "soft") return LineKind::Rule;
    if (t0.text == "dc") return LineKind::Dc;
    if (t0.text == "eqo" || t0.text == "eqv") return LineKind::Solution;
    if (cur.peek(1).type == Tok::Colon) return LineKind::Fact;
    if (cur.peek(1).type == Tok::LParen) return LineKind::Query;
  }
  throw ParseError("E_SYNTAX", cur.line, t0.col, "unrecognized line");
}

std::string quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      default: out.push_back(c);
    }
  }
  out.push_back('"');
  return out;
}

std::string render_term(const Term& t) {
  if (std::holds_alternative<Var>(t)) return std::get<Var>(t).name;
  const Constant& c = std::get<Constant>(t);
  if (c.kind == Kind::Val) return quote(c.lexeme);
  return "@" + c.lexeme;
}

std::string render_body(const Query& q) {
  std::string out;
  bool first = true;
  auto sep = [&] {
    if (!first) out += ", ";
    first = false;
  };
  for (const RelAtom& a : q.atoms) {
    sep();
    out += a.relation + "(";
    for (size_t i = 0; i < a.terms.size(); ++i) {
      if (i) out += ", ";
      out += render_term(a.terms[i]);
    }
    out += ")";
  }
  for (const auto& [l, r] : q.sims) {
    sep();
    out += render_term(l) + " ~ " + render_term(r);
  }
  for (const auto& [l, r] : q.ineqs) {
    sep();
    out += render_term(l) + " != " + render_term(r);
  }
  return out;
}

std::string float_text(double v) {
  std::ostringstream os;
  os << v;
  std::string s = os.str();
  if (s.find('.') == std::string::npos && s.find('e') == std::string::npos) s += ".0";
  return s;
}

}  // namespace

std::string ParseError::render() const {
  return code + ":" + std::to_string(line) + ":" + std::to_string(col) + ": " + message;
}

Schema parse_schema(const std::string& text) {
  Schema schema;
  auto lines = split_lines(text);
  for (size_t i = 0; i < lines.size(); ++i) {
    if (blank_or_comment(lines[i])) continue;
    Cursor cur(lines[i], static_cast<int>(i) + 1);
    if (classify(cur) != LineKind::Relation)
      cur.fail("E_SYNTAX", "only relation lines belong in a schema");
    parse_relation_line(cur, schema);
  }
  return schema;
}

Database parse_database(const std::string& text, const Schema& schema) {
  Database db;
  db.schema = schema;
  auto lines = split_lines(text);
  for (size_t i = 0; i < lines.size(); ++i) {
    if (blank_or_comment(lines[i])) continue;
    Cursor cur(lines[i], static_cast<int>(i) + 1);
    if (classify(cur) != LineKind::Fact) cur.fail("E_SYNTAX", "only facts belong in a data file");
    parse_fact_line(cur, db);
  }
  return db;
}

SimilarityOracle parse_sim(const std::string& text) {
  SimilarityOracle sim;
  auto lines = split_lines(text);
  for (size_t i = 0; i < lines.size(); ++i) {
    if (blank_or_comment(lines[i])) continue;
    Cursor cur(lines[i], static_cast<int>(i) + 1);
    if (classify(cur) != LineKind::Sim)
      cur.fail("E_SYNTAX", "only sim lines belong in a similarity file");
    parse_sim_line(cur, sim);
  }
  return sim;
}

Specification parse_spec(const std::string& text, const Schema& schema) {
  Specification spec;
  auto lines = split_lines(text);
  for (size_t i = 0; i < lines.size(); ++i) {
    if (blank_or_comment(lines[i])) continue;
    Cursor cur(lines[i], static_cast<int>(i) + 1);
    LineKind k = classify(cur);
    if (k == LineKind::Rule)
      spec.rules.push_back(
          parse_rule_line(cur, schema, static_cast<int>(spec.rules.size()) + 1));
    else if (k == LineKind::Dc)
      spec.dcs.push_back(parse_dc_line(cur, schema, static_cast<int>(spec.dcs.size()) + 1));
    else
      cur.fail("E_SYNTAX", "only rules and denial constraints belong in a rule file");
  }
  return spec;
}

Workspace parse_workspace(const std::string& text) {
  Workspace ws;
  auto lines = split_lines(text);
  // Relations first so facts and rules can appear in any order relative to them.
  for (size_t i = 0; i < lines.size(); ++i) {
    if (blank_or_comment(lines[i])) continue;
    Cursor cur(lines[i], static_cast<int>(i) + 1);
    if (classify(cur) == LineKind::Relation) parse_relation_line(cur, ws.db.schema);
  }
  for (size_t i = 0; i < lines.size(); ++i) {
    if (blank_or_comment(lines[i])) continue;
    Cursor cur(lines[i], static_cast<int>(i) + 1);
    switch (classify(cur)) {
      case LineKind::Relation: break;
      case LineKind::Fact: parse_fact_line(cur, ws.db); break;
      case LineKind::Sim: parse_sim_line(cur, ws.sim); break;
      case LineKind::Rule:
        ws.spec.rules.push_back(
            parse_rule_line(cur, ws.db.schema, static_cast<int>(ws.spec.rules.size()) + 1));
        break;
      case LineKind::Dc:
        ws.spec.dcs.push_back(
            parse_dc_line(cur, ws.db.schema, static_cast<int>(ws.spec.dcs.size()) + 1));
        break;
      case LineKind::Solution: cur.fail("E_SYNTAX", "merge classes belong in a solution file");
      case LineKind::Query: cur.fail("E_SYNTAX", "queries belong in a query file");
    }
  }
  return ws;
}

SolutionDoc parse_solution(const std::string& text, const Database& db) {
  SolutionDoc doc;
  std::set<Constant> seen_objs;
  std::set<Cell> seen_cells;
  auto lines = split_lines(text);
  for (size_t i = 0; i < lines.size(); ++i) {
    if (blank_or_comment(lines[i])) continue;
    Cursor cur(lines[i], static_cast<int>(i) + 1);
    if (classify(cur) != LineKind::Solution)
      cur.fail("E_SYNTAX", "only eqo/eqv lines belong in a solution file");
    parse_solution_line(cur, db, doc, seen_objs, seen_cells);
  }
  return doc;
}

Query parse_query(const std::string& text, const Schema& schema) {
  std::optional<Query> q;
  auto lines = split_lines(text);
  for (size_t i = 0; i < lines.size(); ++i) {
    if (blank_or_comment(lines[i])) continue;
    Cursor cur(lines[i], static_cast<int>(i) + 1);
    if (classify(cur) != LineKind::Query) cur.fail("E_SYNTAX", "expected a query line");
    if (q) cur.fail("E_SYNTAX", "a query file holds a single query");
    Query out;
    cur.take();  // query name, unused
    cur.expect(Tok::LParen, "'('");
    if (!cur.at(Tok::RParen)) {
      for (;;) {
        Token v = cur.expect(Tok::Ident, "answer variable");
        out.free_vars.push_back(v.text);
        if (cur.at(Tok::Comma)) {
          cur.take();
          continue;
        }
        break;
      }
    }
    cur.expect(Tok::RParen, "')'");
    cur.expect(Tok::Colon, "':'");
    parse_body(cur, schema, out);
    cur.expect_end();
    try {
      analyze_query(out, schema);
    } catch (const ParseError&) {
      throw;
    } catch (const Error& e) {
      throw ParseError(e.code, cur.line, 1, e.what());
    }
    q = std::move(out);
  }
  if (!q) throw ParseError("E_SYNTAX", 1, 1, "no query found");
  return *q;
}

std::pair<ObjectPartition, CellPartition> solution_partitions(const SolutionDoc& doc,
                                                              const Database& db) {
  std::vector<std::pair<Constant, Constant>> opairs;
  for (const auto& cls : doc.eqo_classes)
    for (size_t i = 1; i < cls.size(); ++i) opairs.emplace_back(cls[0], cls[i]);
  std::vector<std::pair<Cell, Cell>> cpairs;
  for (const auto& cls : doc.eqv_classes)
    for (size_t i = 1; i < cls.size(); ++i) cpairs.emplace_back(cls[0], cls[i]);
  return {eqrel_close(opairs, obj_of(db)), eqrel_close(cpairs, cells_of(db))};
}

std::string render_schema(const Schema& schema) {
  std::string out;
  for (const auto& [name, rel] : schema.relations) {
    out += "relation " + name + "(";
    for (size_t i = 0; i < rel.types.size(); ++i) {
      if (i) out += ", ";
      std::string pname =
          i < rel.pos_names.size() ? rel.pos_names[i] : "p" + std::to_string(i + 1);
      out += pname + ": " + (rel.types[i] == PosKind::Obj ? "obj" : "val");
    }
    out += ")\n";
  }
  return out;
}

std::string render_database(const Database& db) {
  std::string out;
  for (const Fact& f : db.facts) {
    out += f.tid + ": " + f.relation + "(";
    for (size_t i = 0; i < f.args.size(); ++i) {
      if (i) out += ", ";
      const Constant& c = f.args[i];
      out += c.kind == Kind::Val ? quote(c.lexeme) : c.lexeme;
    }
    out += ")\n";
  }
  return out;
}

std::string render_sim(const SimilarityOracle& sim) {
  std::string out;
  if (sim.threshold()) out += "sim threshold " + float_text(*sim.threshold()) + "\n";
  for (const auto& [a, b] : sim.table()) out += "sim " + quote(a) + " ~ " + quote(b) + "\n";
  return out;
}

std::string render_spec(const Specification& spec) {
  std::string out;
  for (const Rule& r : spec.rules) {
    out += std::string(r.hard ? "hard" : "soft");
    out += r.head == HeadKind::Obj ? " obj: " : " val: ";
    out += render_body(r.body);
    out += r.hard ? " => " : " ~> ";
    if (r.head == HeadKind::Obj) {
      out += "EqO(" + r.body.free_vars[0] + ", " + r.body.free_vars[1] + ")";
    } else {
      out += "EqV(" + r.body.free_vars[0] + "." + std::to_string(r.pos_i) + ", " +
             r.body.free_vars[1] + "." + std::to_string(r.pos_j) + ")";
    }
    out += "\n";
  }
  for (const DenialConstraint& dc : spec.dcs) {
    out += "dc: " + render_body(dc.body) + " -> false\n";
  }
  return out;
}

std::string render_workspace(const Workspace& ws) {
  std::string out = render_schema(ws.db.schema);
  out += "\n" + render_database(ws.db);
  std::string sim = render_sim(ws.sim);
  if (!sim.empty()) out += "\n" + sim;
  std::string spec = render_spec(ws.spec);
  if (!spec.empty()) out += "\n" + spec;
  return out;
}

std::string render_solution(const ObjectPartition& e, const CellPartition& v) {
  std::string out;
  for (const auto& cls : e.classes(false)) {
    out += "eqo:";
    for (const Constant& c : cls) out += " " + c.lexeme;
    out += "\n";
  }
  for (const auto& cls : v.classes(false)) {
    out += "eqv:";
    for (const Cell& c : cls) out += " " + to_string(c);
    out += "\n";
  }
  return out;
}

std::string render_query(const Query& q) {
  std::string out = "q(";
  for (size_t i = 0; i < q.free_vars.size(); ++i) {
    if (i) out += ", ";
    out += q.free_vars[i];
  }
  out += "): " + render_body(q) + "\n";
  return out;
}

}  // namespace lace
