#include "ccmdp/io.hpp"

#include <algorithm>
#include <cstdio>
#include <map>
#include <set>
#include <sstream>
#include <tuple>
#include <vector>

#include "ccmdp/errors.hpp"

namespace ccmdp {

namespace {

struct Line {
  int no = 0;
  std::vector<std::string> tok;
};

[[noreturn]] void fail(int line_no, const std::string& what) {
  throw ParseError("line " + std::to_string(line_no) + ": " + what);
}

std::vector<std::string> tokenize(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == '#') break;
    if (c == ' ' || c == '\t' || c == '\r') {
      if (!cur.empty()) out.push_back(std::move(cur)), cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  return out;
}

double parse_double(const std::string& s, int line_no) {
  std::size_t pos = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &pos);
  } catch (const std::exception&) {
    fail(line_no, "expected a number, got '" + s + "'");
  }
  if (pos != s.size()) fail(line_no, "expected a number, got '" + s + "'");
  return v;
}

int parse_int(const std::string& s, int line_no) {
  std::size_t pos = 0;
  long v = 0;
  try {
    v = std::stol(s, &pos);
  } catch (const std::exception&) {
    fail(line_no, "expected an integer, got '" + s + "'");
  }
  if (pos != s.size()) fail(line_no, "expected an integer, got '" + s + "'");
  return static_cast<int>(v);
}

std::string fmt_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

int lookup(const std::map<std::string, int>& index, const std::string& name,
           const char* kind, int line_no) {
  auto it = index.find(name);
  if (it == index.end()) fail(line_no, std::string("unknown ") + kind + " '" + name + "'");
  return it->second;
}

}  // namespace

MdpInstance parse_instance(const std::string& text) {
  static const std::set<std::string> kSections = {
      "states", "actions", "transitions", "utility", "risk", "cost", "meta"};

  std::map<std::string, std::vector<Line>> sections;
  std::map<std::string, int> section_line;
  {
    std::istringstream in(text);
    std::string raw;
    std::string current;
    int no = 0;
    while (std::getline(in, raw)) {
      ++no;
      std::vector<std::string> tok = tokenize(raw);
      if (tok.empty()) continue;
      if (tok.front().size() >= 2 && tok.front().front() == '[' &&
          tok.front().back() == ']') {
        if (tok.size() != 1) fail(no, "unexpected tokens after section header");
        std::string name = tok.front().substr(1, tok.front().size() - 2);
        if (!kSections.count(name)) fail(no, "unknown section [" + name + "]");
        if (sections.count(name)) {
          fail(no, "duplicate section [" + name + "] (first at line " +
                       std::to_string(section_line[name]) + ")");
        }
        sections[name];
        section_line[name] = no;
        current = name;
        continue;
      }
      if (current.empty()) fail(no, "content before the first section header");
      Line ln;
      ln.no = no;
      ln.tok = std::move(tok);
      sections[current].push_back(std::move(ln));
    }
  }

  for (const char* required : {"states", "actions", "meta"}) {
    if (!sections.count(required)) {
      throw ParseError(std::string("missing required section [") + required + "]");
    }
  }

  MdpInstance inst;
  std::map<std::string, int> state_index;
  std::map<std::string, int> action_index;

  for (const Line& ln : sections["states"]) {
    if (ln.tok.size() != 1) fail(ln.no, "expected one state name per line");
    if (state_index.count(ln.tok[0])) fail(ln.no, "duplicate state '" + ln.tok[0] + "'");
    state_index[ln.tok[0]] = inst.add_state(ln.tok[0]);
  }
  for (const Line& ln : sections["actions"]) {
    if (ln.tok.size() != 1) fail(ln.no, "expected one action name per line");
    if (action_index.count(ln.tok[0])) fail(ln.no, "duplicate action '" + ln.tok[0] + "'");
    action_index[ln.tok[0]] = inst.add_action(ln.tok[0]);
  }

  // [meta] first: the risk/cost sections admissible below depend on the mode.
  std::map<std::string, Line> meta;
  for (const Line& ln : sections["meta"]) {
    if (ln.tok.size() != 2) fail(ln.no, "expected 'key value'");
    if (meta.count(ln.tok[0])) fail(ln.no, "duplicate meta key '" + ln.tok[0] + "'");
    meta.emplace(ln.tok[0], ln);
  }
  for (const char* key : {"horizon", "initial", "budget", "mode"}) {
    if (!meta.count(key)) {
      throw ParseError(std::string("missing meta key '") + key + "'");
    }
  }
  for (const auto& [key, ln] : meta) {
    if (key != "horizon" && key != "initial" && key != "budget" && key != "mode") {
      fail(ln.no, "unknown meta key '" + key + "'");
    }
  }
  inst.horizon = parse_int(meta.at("horizon").tok[1], meta.at("horizon").no);
  inst.initial = lookup(state_index, meta.at("initial").tok[1], "state",
                        meta.at("initial").no);
  inst.budget = parse_double(meta.at("budget").tok[1], meta.at("budget").no);
  {
    const Line& ln = meta.at("mode");
    const std::string& m = ln.tok[1];
    if (m == "chance-constrained" || m == "cc") {
      inst.mode = Mode::ChanceConstrained;
    } else if (m == "cost-constrained" || m == "c") {
      inst.mode = Mode::CostConstrained;
    } else {
      fail(ln.no, "unknown mode '" + m + "'");
    }
  }

  if (inst.mode == Mode::ChanceConstrained && sections.count("cost")) {
    fail(section_line["cost"], "[cost] section in a chance-constrained instance");
  }
  if (inst.mode == Mode::CostConstrained && sections.count("risk")) {
    fail(section_line["risk"], "[risk] section in a cost-constrained instance");
  }

  std::set<std::tuple<int, int, int>> seen_triples;
  std::set<std::pair<int, int>> seen_terminal;
  for (const Line& ln : sections["transitions"]) {
    if (ln.tok.size() != 3 && ln.tok.size() != 4) {
      fail(ln.no,
           "expected 'state action successor probability' or 'state action .'");
    }
    int s = lookup(state_index, ln.tok[0], "state", ln.no);
    int a = lookup(action_index, ln.tok[1], "action", ln.no);
    if (ln.tok.size() == 3) {
      if (ln.tok[2] != ".") {
        fail(ln.no, "expected '.' or a probability after the successor");
      }
      if (seen_terminal.count({s, a})) {
        fail(ln.no, "duplicate terminal declaration for (" + ln.tok[0] + ", " +
                        ln.tok[1] + ")");
      }
      if (!inst.transitions[s][a].empty()) {
        fail(ln.no, "terminal declaration for (" + ln.tok[0] + ", " + ln.tok[1] +
                        ") conflicts with earlier transitions");
      }
      seen_terminal.insert({s, a});
      inst.declare(s, a);
      continue;
    }
    int t = lookup(state_index, ln.tok[2], "state", ln.no);
    if (seen_terminal.count({s, a})) {
      fail(ln.no, "transition for (" + ln.tok[0] + ", " + ln.tok[1] +
                      ") conflicts with an earlier terminal declaration");
    }
    if (!seen_triples.insert({s, a, t}).second) {
      fail(ln.no, "duplicate transition (" + ln.tok[0] + ", " + ln.tok[1] + ", " +
                      ln.tok[2] + ")");
    }
    double p = parse_double(ln.tok[3], ln.no);
    inst.add_transition(s, a, t, p);
  }

  std::set<std::pair<int, int>> seen_utility;
  for (const Line& ln : sections["utility"]) {
    if (ln.tok.size() != 3) fail(ln.no, "expected 'state action value'");
    int s = lookup(state_index, ln.tok[0], "state", ln.no);
    int a = lookup(action_index, ln.tok[1], "action", ln.no);
    if (!seen_utility.insert({s, a}).second) {
      fail(ln.no, "duplicate utility entry for (" + ln.tok[0] + ", " + ln.tok[1] + ")");
    }
    inst.set_utility(s, a, parse_double(ln.tok[2], ln.no));
  }

  std::set<int> seen_risk;
  for (const Line& ln : sections["risk"]) {
    if (ln.tok.size() != 2) fail(ln.no, "expected 'state value'");
    int s = lookup(state_index, ln.tok[0], "state", ln.no);
    if (!seen_risk.insert(s).second) {
      fail(ln.no, "duplicate risk entry for state '" + ln.tok[0] + "'");
    }
    inst.state_risk[s] = parse_double(ln.tok[1], ln.no);
  }

  std::set<std::pair<int, int>> seen_cost;
  for (const Line& ln : sections["cost"]) {
    if (ln.tok.size() != 3) fail(ln.no, "expected 'state action value'");
    int s = lookup(state_index, ln.tok[0], "state", ln.no);
    int a = lookup(action_index, ln.tok[1], "action", ln.no);
    if (!seen_cost.insert({s, a}).second) {
      fail(ln.no, "duplicate cost entry for (" + ln.tok[0] + ", " + ln.tok[1] + ")");
    }
    inst.set_cost(s, a, parse_double(ln.tok[2], ln.no));
  }

  validate_instance(inst);
  return inst;
}

std::string serialize_instance(const MdpInstance& inst) {
  validate_instance(inst);

  std::vector<int> states(inst.state_names.size());
  std::vector<int> actions(inst.action_names.size());
  for (std::size_t i = 0; i < states.size(); ++i) states[i] = static_cast<int>(i);
  for (std::size_t i = 0; i < actions.size(); ++i) actions[i] = static_cast<int>(i);
  std::sort(states.begin(), states.end(), [&](int a, int b) {
    return inst.state_names[a] < inst.state_names[b];
  });
  std::sort(actions.begin(), actions.end(), [&](int a, int b) {
    return inst.action_names[a] < inst.action_names[b];
  });

  std::ostringstream out;
  out << "[states]\n";
  for (int s : states) out << inst.state_names[s] << "\n";
  out << "[actions]\n";
  for (int a : actions) out << inst.action_names[a] << "\n";

  out << "[transitions]\n";
  for (int s : states) {
    for (int a : actions) {
      if (!inst.declared[s][a]) continue;
      if (inst.transitions[s][a].empty()) {
        out << inst.state_names[s] << " " << inst.action_names[a] << " .\n";
        continue;
      }
      std::vector<Outcome> outs = inst.transitions[s][a];
      std::sort(outs.begin(), outs.end(), [&](const Outcome& x, const Outcome& y) {
        return inst.state_names[x.state] < inst.state_names[y.state];
      });
      for (const Outcome& o : outs) {
        out << inst.state_names[s] << " " << inst.action_names[a] << " "
            << inst.state_names[o.state] << " " << fmt_double(o.prob) << "\n";
      }
    }
  }

  out << "[utility]\n";
  for (int s : states) {
    for (int a : actions) {
      if (inst.utility[s][a] != 0.0) {
        out << inst.state_names[s] << " " << inst.action_names[a] << " "
            << fmt_double(inst.utility[s][a]) << "\n";
      }
    }
  }

  if (inst.mode == Mode::ChanceConstrained) {
    out << "[risk]\n";
    for (int s : states) {
      if (inst.state_risk[s] != 0.0) {
        out << inst.state_names[s] << " " << fmt_double(inst.state_risk[s]) << "\n";
      }
    }
  } else {
    out << "[cost]\n";
    for (int s : states) {
      for (int a : actions) {
        if (inst.action_cost[s][a] != 0.0) {
          out << inst.state_names[s] << " " << inst.action_names[a] << " "
              << fmt_double(inst.action_cost[s][a]) << "\n";
        }
      }
    }
  }

  out << "[meta]\n";
  out << "horizon " << inst.horizon << "\n";
  out << "initial " << inst.state_names[inst.initial] << "\n";
  out << "budget " << fmt_double(inst.budget) << "\n";
  out << "mode "
      << (inst.mode == Mode::ChanceConstrained ? "chance-constrained"
                                               : "cost-constrained")
      << "\n";
  return out.str();
}

std::string serialize_policy(const MdpInstance& inst, const Policy& policy) {
  std::vector<std::tuple<int, std::string, std::string>> rows;
  for (const auto& [key, a] : policy.at) {
    const auto& [k, s] = key;
    if (s < 0 || s >= static_cast<int>(inst.state_names.size()) || a < 0 ||
        a >= static_cast<int>(inst.action_names.size())) {
      throw ValidationError("policy references an unknown state or action");
    }
    rows.emplace_back(k, inst.state_names[s], inst.action_names[a]);
  }
  std::sort(rows.begin(), rows.end());
  std::ostringstream out;
  for (const auto& [k, s, a] : rows) out << s << " " << k << " " << a << "\n";
  return out.str();
}

Policy parse_policy(const MdpInstance& inst, const std::string& text) {
  std::map<std::string, int> state_index;
  std::map<std::string, int> action_index;
  for (std::size_t i = 0; i < inst.state_names.size(); ++i) {
    state_index[inst.state_names[i]] = static_cast<int>(i);
  }
  for (std::size_t i = 0; i < inst.action_names.size(); ++i) {
    action_index[inst.action_names[i]] = static_cast<int>(i);
  }

  Policy policy;
  std::istringstream in(text);
  std::string raw;
  int no = 0;
  while (std::getline(in, raw)) {
    ++no;
    std::vector<std::string> tok = tokenize(raw);
    if (tok.empty()) continue;
    if (tok.size() != 3) fail(no, "expected 'state step action'");
    int s = lookup(state_index, tok[0], "state", no);
    int k = parse_int(tok[1], no);
    if (k < 0 || k >= inst.horizon) {
      fail(no, "step " + tok[1] + " outside [0, " + std::to_string(inst.horizon - 1) + "]");
    }
    int a = lookup(action_index, tok[2], "action", no);
    if (policy.get(k, s)) fail(no, "duplicate assignment for (" + tok[0] + ", " + tok[1] + ")");
    policy.set(k, s, a);
  }
  return policy;
}

}  // namespace ccmdp
