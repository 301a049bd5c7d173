#pragma once

#include <random>
#include <string>
#include <vector>

#include "lace/io.hpp"

namespace testsupport {

struct GenOptions {
  int max_r_facts = 6;   // R facts carry one value cell each
  int max_w_facts = 3;   // W facts carry none
  bool allow_ineq = true;
};

// Small random workspace over two relations, drawn to make rules fire often:
// a handful of objects and values, a similarity table over the value pool,
// one to three rules, up to two denial constraints. Returned through the
// parser so generated instances stay within the surface syntax.
inline lace::Workspace random_workspace(std::mt19937& rng, const GenOptions& opt = {}) {
  auto roll = [&](int lo, int hi) {
    return std::uniform_int_distribution<int>(lo, hi)(rng);
  };
  const std::vector<std::string> objs = {"b1", "b2", "b3", "b4"};
  const std::vector<std::string> vals = {"u", "v", "w", "x"};

  std::string text = "relation R(a: obj, v: val)\nrelation W(a: obj, b: obj)\n";
  int tid = 0;
  int n_r = roll(2, opt.max_r_facts);
  for (int i = 0; i < n_r; ++i)
    text += "t" + std::to_string(++tid) + ": R(" + objs[roll(0, 3)] + ", \"" +
            vals[roll(0, 3)] + "\")\n";
  int n_w = roll(0, opt.max_w_facts);
  for (int i = 0; i < n_w; ++i)
    text += "t" + std::to_string(++tid) + ": W(" + objs[roll(0, 3)] + ", " + objs[roll(0, 3)] +
            ")\n";

  for (int i = roll(0, 3); i > 0; --i) {
    int a = roll(0, 3), b = roll(0, 3);
    if (a != b) text += "sim \"" + vals[a] + "\" ~ \"" + vals[b] + "\"\n";
  }

  struct Tmpl {
    const char* body;
    bool value_head;
  };
  const std::vector<Tmpl> rules = {
      {"R(t, x, n), R(t2, y, n)", false},
      {"R(t, x, n), R(t2, y, m), n ~ m", false},
      {"W(t, x, z), W(t2, y, z)", false},
      {"R(x, a, n), R(y, a, m)", true},
      {"R(x, a, n), R(y, b, m), n ~ m", true},
  };
  int n_rules = roll(1, 3);
  for (int i = 0; i < n_rules; ++i) {
    const Tmpl& t = rules[roll(0, static_cast<int>(rules.size()) - 1)];
    bool hard = roll(0, 1) == 0;
    text += std::string(hard ? "hard " : "soft ") + (t.value_head ? "val: " : "obj: ") +
            t.body + (hard ? " => " : " ~> ") +
            (t.value_head ? "EqV(x.2, y.2)" : "EqO(x, y)") + "\n";
  }

  std::vector<std::string> dcs = {
      "dc: W(t, x, y), W(t2, y, x) -> false",
      "dc: R(t, a, \"u\"), W(t2, a, a) -> false",
  };
  if (opt.allow_ineq) {
    dcs.push_back("dc: R(t, a, n), R(t2, a, m), n != m -> false");
    dcs.push_back("dc: R(t, a, n), R(t2, b, n), a != b -> false");
  }
  int n_dcs = roll(0, 2);
  for (int i = 0; i < n_dcs; ++i) text += dcs[roll(0, static_cast<int>(dcs.size()) - 1)] + "\n";

  return lace::parse_workspace(text);
}

}  // namespace testsupport
