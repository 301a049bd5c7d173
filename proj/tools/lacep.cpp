// lacep: file-driven front end for the resolution engine. Commands map 1:1
// onto the library operations; --json wraps every result in a RunReport
// envelope. Exit codes: 0 answered (positive), 1 answered negative, 2 usage
// or parse error, 3 search budget exhausted, 4 empty solution space.

#include <cctype>
#include <chrono>
#include <cstddef>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "lace/asp.hpp"
#include "lace/engine.hpp"
#include "lace/globalize.hpp"
#include "lace/io.hpp"

using nlohmann::json;

namespace {

constexpr int kYes = 0;
constexpr int kNo = 1;
constexpr int kUsage = 2;
constexpr int kBudget = 3;
constexpr int kNoSolution = 4;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw lace::Error("E_IO", "cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Workspace sources: one positional workspace file, or the workspace
// assembled from repeatable per-part flags (line numbers in diagnostics then
// count within the concatenation of that flag's files).
struct Inputs {
  std::vector<std::string> files;
  std::vector<std::string> schema, data, sim, spec;

  bool flagged() const {
    return !(schema.empty() && data.empty() && sim.empty() && spec.empty());
  }
};

void add_inputs(CLI::App* sub, Inputs& in, const char* extra) {
  std::string files_doc = extra ? std::string("workspace file, then ") + extra
                                : std::string("workspace file");
  sub->add_option("files", in.files, files_doc);
  sub->add_option("--schema", in.schema, "schema file (repeatable)");
  sub->add_option("--data", in.data, "fact file (repeatable)");
  sub->add_option("--sim", in.sim, "similarity file (repeatable)");
  sub->add_option("--spec", in.spec, "rule and constraint file (repeatable)");
}

std::string slurp_all(const std::vector<std::string>& paths) {
  std::string out;
  for (const auto& p : paths) {
    out += read_file(p);
    if (!out.empty() && out.back() != '\n') out += '\n';
  }
  return out;
}

// Returns the workspace and how many leading positionals it consumed.
lace::Workspace assemble(const Inputs& in, size_t& consumed) {
  if (in.flagged()) {
    consumed = 0;
    if (in.files.size() > 1 || (!in.files.empty() && in.schema.empty()))
      throw lace::Error("E_USAGE", "give one workspace file or per-part flags, not both");
    if (in.schema.empty())
      throw lace::Error("E_USAGE", "--data/--sim/--spec need --schema");
    lace::Workspace ws;
    lace::Schema schema = lace::parse_schema(slurp_all(in.schema));
    if (in.data.empty())
      ws.db.schema = schema;
    else
      ws.db = lace::parse_database(slurp_all(in.data), schema);
    if (!in.sim.empty()) ws.sim = lace::parse_sim(slurp_all(in.sim));
    if (!in.spec.empty()) ws.spec = lace::parse_spec(slurp_all(in.spec), schema);
    return ws;
  }
  if (in.files.empty()) throw lace::Error("E_USAGE", "no workspace given");
  consumed = 1;
  return lace::parse_workspace(read_file(in.files[0]));
}

// The one positional that must remain after the workspace is taken.
std::string sole_extra(const Inputs& in, size_t consumed, const char* what) {
  if (in.files.size() != consumed + 1)
    throw lace::Error("E_USAGE", std::string("expected exactly one ") + what);
  return in.files[consumed];
}

void no_extra(const Inputs& in, size_t consumed) {
  if (in.files.size() != consumed)
    throw lace::Error("E_USAGE", "unexpected extra file argument " + in.files[consumed]);
}

lace::MergePair parse_pair(const std::string& text) {
  std::istringstream ss(text);
  std::string kind, a, b, rest;
  ss >> kind >> a >> b;
  if (ss >> rest || a.empty() || b.empty())
    throw lace::Error("E_USAGE", "--pair wants \"obj A B\" or \"cell T.P U.Q\", got \"" + text + '"');
  if (kind == "obj") return lace::ObjPair{lace::obj_const(a), lace::obj_const(b)};
  if (kind != "cell")
    throw lace::Error("E_USAGE", "--pair kind must be obj or cell, got " + kind);
  auto cell = [](const std::string& s) {
    size_t dot = s.rfind('.');
    if (dot == std::string::npos || dot == 0 || dot + 1 == s.size())
      throw lace::Error("E_USAGE", "cell must look like tid.pos, got " + s);
    int pos = 0;
    for (size_t i = dot + 1; i < s.size(); ++i) {
      if (!isdigit(static_cast<unsigned char>(s[i])))
        throw lace::Error("E_USAGE", "cell position must be a number in " + s);
      pos = pos * 10 + (s[i] - '0');
    }
    return lace::Cell{s.substr(0, dot), pos};
  };
  return lace::CellPair{cell(a), cell(b)};
}

// Comma-separated answer tuple; an element may be double-quoted to protect
// commas and spaces. No escapes inside quotes.
std::vector<std::string> parse_tuple(const std::string& text) {
  std::vector<std::string> out;
  size_t i = 0;
  auto skip_ws = [&] { while (i < text.size() && text[i] == ' ') ++i; };
  while (true) {
    skip_ws();
    std::string elem;
    if (i < text.size() && text[i] == '"') {
      size_t close = text.find('"', i + 1);
      if (close == std::string::npos)
        throw lace::Error("E_USAGE", "unterminated quote in --tuple");
      elem = text.substr(i + 1, close - i - 1);
      i = close + 1;
    } else {
      size_t comma = text.find(',', i);
      size_t end = comma == std::string::npos ? text.size() : comma;
      elem = text.substr(i, end - i);
      while (!elem.empty() && elem.back() == ' ') elem.pop_back();
      i = end;
    }
    out.push_back(elem);
    skip_ws();
    if (i >= text.size()) break;
    if (text[i] != ',')
      throw lace::Error("E_USAGE", "expected ',' in --tuple near position " + std::to_string(i));
    ++i;
  }
  return out;
}

json classes_json(const std::vector<std::vector<lace::Constant>>& classes) {
  json out = json::array();
  for (const auto& cls : classes) {
    json members = json::array();
    for (const auto& c : cls) members.push_back(c.lexeme);
    out.push_back(std::move(members));
  }
  return out;
}

json solution_json(const lace::SolutionState& s) {
  json eqv = json::array();
  for (const auto& cls : s.v.classes(false)) {
    json members = json::array();
    for (const auto& c : cls) members.push_back(lace::to_string(c));
    eqv.push_back(std::move(members));
  }
  return json{{"eqo", classes_json(s.e.classes(false))}, {"eqv", eqv}};
}

const char* outcome_text(lace::Outcome o) {
  switch (o) {
    case lace::Outcome::Yes: return "yes";
    case lace::Outcome::No: return "no";
    case lace::Outcome::NoSolution: return "no-solution";
  }
  return "";
}

int outcome_exit(lace::Outcome o) {
  switch (o) {
    case lace::Outcome::Yes: return kYes;
    case lace::Outcome::No: return kNo;
    case lace::Outcome::NoSolution: return kNoSolution;
  }
  return kUsage;
}

struct Report {
  json result;
  std::string text;
  int exit_code = kYes;
};

// Runs one command body under the shared envelope: timing, explored-state
// accounting, budget handling, and the choice between plain and JSON output.
int run_command(const std::string& name, bool json_mode, size_t budget,
                const std::function<Report(const lace::EnumOptions&)>& body) {
  size_t explored = 0;
  lace::EnumOptions opts{budget, &explored};
  auto start = std::chrono::steady_clock::now();

  json envelope{{"command", name}};
  int code = kYes;
  std::string text;
  bool exceeded = false;
  try {
    Report r = body(opts);
    envelope["result"] = std::move(r.result);
    text = std::move(r.text);
    code = r.exit_code;
  } catch (const lace::BudgetError& e) {
    exceeded = true;
    envelope["result"] = nullptr;
    text.clear();
    code = kBudget;
    if (!json_mode) std::cerr << "error: " << e.what() << "\n";
  }

  auto elapsed = std::chrono::steady_clock::now() - start;
  envelope["elapsed_ms"] =
      std::chrono::duration_cast<std::chrono::milliseconds>(elapsed).count();
  envelope["explored"] = explored;
  envelope["budget"] = exceeded ? "exceeded" : "ok";

  if (json_mode)
    std::cout << envelope.dump() << "\n";
  else
    std::cout << text;
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"entity resolution workbench"};
  app.require_subcommand(1);

  bool json_mode = false;
  size_t budget = lace::EnumOptions{}.budget;
  unsigned seed = 0;
  app.add_flag("--json", json_mode, "print a RunReport envelope as JSON");
  app.add_option("--budget", budget, "search state budget");
  app.add_option("--seed", seed, "reserved; no command draws randomness yet");

  std::function<Report(const lace::EnumOptions&)> body;
  std::string command;

  auto sub = [&](const char* name, const char* desc) {
    CLI::App* s = app.add_subcommand(name, desc);
    s->fallthrough(true);
    return s;
  };

  // check <ws> <sol>
  auto in_check = std::make_shared<Inputs>();
  CLI::App* c_check = sub("check", "is the solution file a solution?");
  add_inputs(c_check, *in_check, "solution file");
  c_check->callback([&, in_check] {
    command = "check";
    body = [&, in_check](const lace::EnumOptions&) {
      size_t consumed = 0;
      lace::Workspace ws = assemble(*in_check, consumed);
      std::string sol = sole_extra(*in_check, consumed, "solution file");
      auto doc = lace::parse_solution(read_file(sol), ws.db);
      auto [e, v] = lace::solution_partitions(doc, ws.db);
      bool ok = lace::rec_check(ws, e, v);
      return Report{json{{"answer", ok}}, ok ? "yes\n" : "no\n", ok ? kYes : kNo};
    };
  });

  // maxcheck <ws> <sol>
  auto in_maxcheck = std::make_shared<Inputs>();
  CLI::App* c_maxcheck = sub("maxcheck", "is the solution file a maximal solution?");
  add_inputs(c_maxcheck, *in_maxcheck, "solution file");
  c_maxcheck->callback([&, in_maxcheck] {
    command = "maxcheck";
    body = [&, in_maxcheck](const lace::EnumOptions& opts) {
      size_t consumed = 0;
      lace::Workspace ws = assemble(*in_maxcheck, consumed);
      std::string sol = sole_extra(*in_maxcheck, consumed, "solution file");
      auto doc = lace::parse_solution(read_file(sol), ws.db);
      auto [e, v] = lace::solution_partitions(doc, ws.db);
      bool ok = lace::max_rec_check(ws, e, v, opts);
      return Report{json{{"answer", ok}}, ok ? "yes\n" : "no\n", ok ? kYes : kNo};
    };
  });

  // exists <ws>
  auto in_exists = std::make_shared<Inputs>();
  CLI::App* c_exists = sub("exists", "does any solution exist?");
  add_inputs(c_exists, *in_exists, nullptr);
  c_exists->callback([&, in_exists] {
    command = "exists";
    body = [&, in_exists](const lace::EnumOptions& opts) {
      size_t consumed = 0;
      lace::Workspace ws = assemble(*in_exists, consumed);
      no_extra(*in_exists, consumed);
      bool ok = lace::existence(ws, opts);
      return Report{json{{"answer", ok}}, ok ? "yes\n" : "no\n", ok ? kYes : kNo};
    };
  });

  // solve <ws> [--max] [--limit N]
  auto in_solve = std::make_shared<Inputs>();
  auto max_only = std::make_shared<bool>(false);
  auto limit = std::make_shared<size_t>(0);
  CLI::App* c_solve = sub("solve", "enumerate solutions as .sol blocks");
  add_inputs(c_solve, *in_solve, nullptr);
  c_solve->add_flag("--max", *max_only, "maximal solutions only");
  CLI::Option* limit_opt = c_solve->add_option("--limit", *limit, "print at most N solutions");
  c_solve->callback([&, in_solve, max_only, limit, limit_opt] {
    command = "solve";
    body = [&, in_solve, max_only, limit, limit_opt](const lace::EnumOptions& opts) {
      size_t consumed = 0;
      lace::Workspace ws = assemble(*in_solve, consumed);
      no_extra(*in_solve, consumed);
      auto sols = *max_only ? lace::enumerate_max_solutions(ws, opts)
                            : lace::enumerate_solutions(ws, opts);
      size_t shown = limit_opt->count() ? std::min(*limit, sols.size()) : sols.size();
      std::string text;
      json list = json::array();
      for (size_t i = 0; i < shown; ++i) {
        text += lace::render_solution(sols[i].e, sols[i].v);
        text += "---\n";
        list.push_back(solution_json(sols[i]));
      }
      json result{{"count", sols.size()}, {"shown", shown}, {"solutions", std::move(list)}};
      return Report{std::move(result), std::move(text), kYes};
    };
  });

  // merge <ws> --pair SPEC --mode possible|certain
  auto in_merge = std::make_shared<Inputs>();
  auto pair_text = std::make_shared<std::string>();
  auto merge_mode = std::make_shared<std::string>();
  CLI::App* c_merge = sub("merge", "is the pair merged in some / every maximal solution?");
  add_inputs(c_merge, *in_merge, nullptr);
  c_merge->add_option("--pair", *pair_text, "\"obj A B\" or \"cell T.P U.Q\"")->required();
  c_merge->add_option("--mode", *merge_mode, "possible or certain")
      ->required()
      ->check(CLI::IsMember({"possible", "certain"}));
  c_merge->callback([&, in_merge, pair_text, merge_mode] {
    command = "merge";
    body = [&, in_merge, pair_text, merge_mode](const lace::EnumOptions& opts) {
      size_t consumed = 0;
      lace::Workspace ws = assemble(*in_merge, consumed);
      no_extra(*in_merge, consumed);
      lace::MergePair pair = parse_pair(*pair_text);
      lace::Outcome o = *merge_mode == "possible" ? lace::poss_merge(ws, pair, opts)
                                                  : lace::cert_merge(ws, pair, opts);
      return Report{json{{"outcome", outcome_text(o)}},
                    std::string(outcome_text(o)) + "\n", outcome_exit(o)};
    };
  });

  // ask <ws> --query FILE [--tuple CSV] --mode possible|certain
  auto in_ask = std::make_shared<Inputs>();
  auto query_file = std::make_shared<std::string>();
  auto tuple_text = std::make_shared<std::string>();
  auto ask_mode = std::make_shared<std::string>();
  CLI::App* c_ask = sub("ask", "is the tuple an answer over some / every maximal solution?");
  add_inputs(c_ask, *in_ask, nullptr);
  c_ask->add_option("--query", *query_file, "query file")->required();
  CLI::Option* tuple_opt =
      c_ask->add_option("--tuple", *tuple_text, "comma-separated answer constants");
  c_ask->add_option("--mode", *ask_mode, "possible or certain")
      ->required()
      ->check(CLI::IsMember({"possible", "certain"}));
  c_ask->callback([&, in_ask, query_file, tuple_text, ask_mode, tuple_opt] {
    command = "ask";
    body = [&, in_ask, query_file, tuple_text, ask_mode, tuple_opt](
               const lace::EnumOptions& opts) {
      size_t consumed = 0;
      lace::Workspace ws = assemble(*in_ask, consumed);
      no_extra(*in_ask, consumed);
      lace::Query q = lace::parse_query(read_file(*query_file), ws.db.schema);
      auto kinds = lace::analyze_query(q, ws.db.schema);
      std::vector<std::string> given;
      if (tuple_opt->count()) given = parse_tuple(*tuple_text);
      if (given.size() != q.free_vars.size())
        throw lace::Error("E_USAGE", "query takes " + std::to_string(q.free_vars.size()) +
                                         " answer terms, got " + std::to_string(given.size()));
      std::vector<lace::Constant> tuple;
      for (size_t i = 0; i < given.size(); ++i)
        tuple.push_back(lace::Constant{kinds.at(q.free_vars[i]), given[i]});
      lace::Outcome o = *ask_mode == "possible" ? lace::poss_ans(ws, q, tuple, opts)
                                                : lace::cert_ans(ws, q, tuple, opts);
      return Report{json{{"outcome", outcome_text(o)}},
                    std::string(outcome_text(o)) + "\n", outcome_exit(o)};
    };
  });

  // globalize <ws>
  auto in_glob = std::make_shared<Inputs>();
  CLI::App* c_glob = sub("globalize", "compile object merges into value merges");
  add_inputs(c_glob, *in_glob, nullptr);
  c_glob->callback([&, in_glob] {
    command = "globalize";
    body = [&, in_glob](const lace::EnumOptions&) {
      size_t consumed = 0;
      lace::Workspace ws = assemble(*in_glob, consumed);
      no_extra(*in_glob, consumed);
      lace::Workspace g = lace::globalize_workspace(ws);
      std::string text = lace::render_workspace(g);
      return Report{json{{"text", text}}, std::move(text), kYes};
    };
  });

  // emit-asp <ws> [--out FILE]
  auto in_asp = std::make_shared<Inputs>();
  auto out_file = std::make_shared<std::string>();
  CLI::App* c_asp = sub("emit-asp", "print the workspace as a logic program");
  add_inputs(c_asp, *in_asp, nullptr);
  CLI::Option* out_opt = c_asp->add_option("--out", *out_file, "write the program here");
  c_asp->callback([&, in_asp, out_file, out_opt] {
    command = "emit-asp";
    body = [&, in_asp, out_file, out_opt](const lace::EnumOptions&) {
      size_t consumed = 0;
      lace::Workspace ws = assemble(*in_asp, consumed);
      no_extra(*in_asp, consumed);
      lace::AspProgram p = lace::emit_program(ws.db, ws.spec, ws.sim);
      lace::validate_program(p, ws.db);
      std::string text = p.render();
      json result{{"text", text}};
      if (out_opt->count()) {
        std::ofstream out(*out_file, std::ios::binary);
        if (!out) throw lace::Error("E_IO", "cannot write " + *out_file);
        out << text;
        result["path"] = *out_file;
        text.clear();  // the file carries the program
      }
      return Report{std::move(result), std::move(text), kYes};
    };
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    return run_command(command, json_mode, budget, body);
  } catch (const lace::ParseError& e) {
    std::cerr << "error: " << e.render() << "\n";
    return kUsage;
  } catch (const lace::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  }
}
