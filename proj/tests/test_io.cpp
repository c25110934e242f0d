#include <doctest.h>

#include <set>
#include <string>

#include "ccmdp/errors.hpp"
#include "ccmdp/evaluate.hpp"
#include "ccmdp/generate.hpp"
#include "ccmdp/instance.hpp"
#include "ccmdp/io.hpp"
#include "ccmdp/layered_graph.hpp"
#include "ccmdp/policy.hpp"

using namespace ccmdp;

namespace {

MdpInstance small_cc() {
  MdpInstance m;
  int s0 = m.add_state("start");
  int s1 = m.add_state("mid");
  int s2 = m.add_state("end");
  int go = m.add_action("go");
  int stay = m.add_action("stay");
  m.add_transition(s0, go, s1, 0.75);
  m.add_transition(s0, go, s2, 0.25);
  m.add_transition(s0, stay, s0, 1.0);
  m.add_transition(s1, go, s2, 1.0);
  m.declare(s2, stay);  // terminal action so step-1 evaluation is defined
  m.set_utility(s0, go, 2.0);
  m.set_utility(s1, go, 0.5);
  m.state_risk[s1] = 0.1;
  m.initial = s0;
  m.horizon = 2;
  m.budget = 0.2;
  m.mode = Mode::ChanceConstrained;
  return m;
}

bool throws_at_line(const std::string& text, int line, const char* needle) {
  try {
    parse_instance(text);
  } catch (const ParseError& e) {
    std::string what = e.what();
    return what.find("line " + std::to_string(line) + ":") != std::string::npos &&
           what.find(needle) != std::string::npos;
  }
  return false;
}

template <class Fn>
bool throws_containing(Fn&& fn, const char* needle) {
  try {
    fn();
  } catch (const ParseError& e) {
    return std::string(e.what()).find(needle) != std::string::npos;
  }
  return false;
}

}  // namespace

TEST_CASE("serialize produces the canonical form and round-trips exactly") {
  MdpInstance m = small_cc();
  std::string text = serialize_instance(m);
  const std::string golden =
      "[states]\n"
      "end\n"
      "mid\n"
      "start\n"
      "[actions]\n"
      "go\n"
      "stay\n"
      "[transitions]\n"
      "end stay .\n"
      "mid go end 1\n"
      "start go end 0.25\n"
      "start go mid 0.75\n"
      "start stay start 1\n"
      "[utility]\n"
      "mid go 0.5\n"
      "start go 2\n"
      "[risk]\n"
      "mid 0.10000000000000001\n"
      "[meta]\n"
      "horizon 2\n"
      "initial start\n"
      "budget 0.20000000000000001\n"
      "mode chance-constrained\n";
  CHECK(text == golden);

  MdpInstance back = parse_instance(text);
  CHECK(serialize_instance(back) == text);
  CHECK(back.horizon == 2);
  CHECK(back.budget == m.budget);
  CHECK(back.state_names[back.initial] == "start");
  // Indices follow file order in the parsed copy, so locate states by name.
  // In the canonical text, states sort as [end, mid, start] and actions as
  // [go, stay].
  Policy p;
  p.set(0, back.initial, 0);
  p.set(1, 1, 0);  // mid: go
  p.set(1, 0, 1);  // end: terminal stay
  EvalReport r = evaluate_policy(back, build_layers(back), p);
  CHECK(r.value == doctest::Approx(2.0 + 0.75 * 0.5).epsilon(1e-12));
  CHECK(r.risk_or_cost == doctest::Approx(0.075).epsilon(1e-9));
}

TEST_CASE("parse tolerates comments, blank lines, and reordered sections") {
  const std::string messy =
      "# layered toy\n"
      "[meta]\n"
      "horizon 1\n"
      "initial  a   # extra spaces\n"
      "budget 1\n"
      "mode cc\n"
      "\n"
      "[actions]\n"
      "m\n"
      "[states]\n"
      "a\n"
      "b\n"
      "[transitions]\n"
      "a m b 1.0\n";
  MdpInstance m = parse_instance(messy);
  CHECK(m.horizon == 1);
  CHECK(m.mode == Mode::ChanceConstrained);
  CHECK(m.state_names[m.initial] == "a");
  std::string canon = serialize_instance(m);
  CHECK(serialize_instance(parse_instance(canon)) == canon);
}

TEST_CASE("terminal declarations round-trip") {
  const std::string text =
      "[states]\na\nb\n[actions]\nm\nstop\n[transitions]\n"
      "a m b 1\n"
      "a stop .\n"
      "[utility]\na stop 3\n"
      "[meta]\nhorizon 1\ninitial a\nbudget 1\nmode cc\n";
  MdpInstance m = parse_instance(text);
  int a = m.initial;
  CHECK(m.declared[a][1]);
  CHECK(m.transitions[a][1].empty());
  CHECK(m.utility[a][1] == 3.0);
  std::string canon = serialize_instance(m);
  CHECK(canon.find("a stop .\n") != std::string::npos);
  CHECK(serialize_instance(parse_instance(canon)) == canon);
}

TEST_CASE("cost-constrained instances serialize a cost section") {
  MdpInstance m;
  int s0 = m.add_state("x");
  int s1 = m.add_state("y");
  int a = m.add_action("m");
  m.add_transition(s0, a, s1, 1.0);
  m.set_utility(s0, a, 1.0);
  m.set_cost(s0, a, 0.5);
  m.initial = s0;
  m.horizon = 1;
  m.budget = 2.0;
  m.mode = Mode::CostConstrained;
  std::string text = serialize_instance(m);
  CHECK(text.find("[cost]\nx m 0.5\n") != std::string::npos);
  CHECK(text.find("[risk]") == std::string::npos);
  CHECK(text.find("mode cost-constrained") != std::string::npos);
  MdpInstance back = parse_instance(text);
  CHECK(back.mode == Mode::CostConstrained);
  CHECK(serialize_instance(back) == text);
}

TEST_CASE("parse errors carry line numbers and name the offender") {
  const std::string head =
      "[states]\na\nb\n[actions]\nm\n[meta]\nhorizon 1\ninitial a\nbudget 1\nmode cc\n";
  // Line numbering: head spans lines 1..10, so appended content starts at 11.
  CHECK(throws_at_line(head + "[transitions]\na m c 1\n", 12, "unknown state 'c'"));
  CHECK(throws_at_line(head + "[transitions]\na z b 1\n", 12, "unknown action 'z'"));
  CHECK(throws_at_line(head + "[transitions]\na m b 1\na m b 0.5\n", 13,
                       "duplicate transition (a, m, b)"));
  CHECK(throws_at_line(head + "[transitions]\na m b one\n", 12, "expected a number"));
  CHECK(throws_at_line(head + "[transitions]\na m b 0.5 extra\n", 12, "expected"));
  CHECK(throws_at_line(head + "[transitions]\na m .\na m b 1\n", 13,
                       "conflicts with an earlier terminal declaration"));
  CHECK(throws_at_line(head + "[transitions]\na m b 1\na m .\n", 13,
                       "conflicts with earlier transitions"));
  CHECK(throws_at_line(head + "[garbage]\n", 11, "unknown section"));
  CHECK(throws_at_line(head + "[states]\n", 11, "duplicate section"));
  CHECK(throws_at_line(head + "[cost]\na m 1\n", 11,
                       "[cost] section in a chance-constrained instance"));
  CHECK(throws_at_line("x\n" + head, 1, "content before the first section"));
  CHECK(throws_at_line(head + "[utility]\na m 1\na m 2\n", 13, "duplicate utility"));
  CHECK(throws_at_line(head + "[risk]\nb 0.1\nb 0.2\n", 13, "duplicate risk"));

  CHECK(throws_containing(
      [] {
        parse_instance(
            "[states]\na\n[actions]\nm\n[meta]\nhorizon 1\ninitial a\nmode cc\n");
      },
      "missing meta key 'budget'"));
  CHECK(throws_containing([] { parse_instance("[states]\na\n[actions]\nm\n"); },
                          "missing required section [meta]"));
  // Semantic problems surface as validation errors after parsing.
  CHECK_THROWS_AS(parse_instance(head + "[transitions]\na m b 0.4\n"), ValidationError);
}

TEST_CASE("duplicate meta keys and bad modes are rejected") {
  CHECK(throws_at_line(
      "[states]\na\n[actions]\nm\n[meta]\nhorizon 1\nhorizon 2\ninitial a\nbudget 1\nmode cc\n",
      7, "duplicate meta key 'horizon'"));
  CHECK(throws_at_line(
      "[states]\na\n[actions]\nm\n[meta]\nhorizon 1\ninitial a\nbudget 1\nmode maybe\n",
      9, "unknown mode 'maybe'"));
}

TEST_CASE("policy files round-trip sorted by step then state") {
  MdpInstance m = small_cc();
  Policy p;
  p.set(1, 1, 0);
  p.set(0, 0, 0);
  p.set(1, 0, 1);
  std::string text = serialize_policy(m, p);
  CHECK(text ==
        "start 0 go\n"
        "mid 1 go\n"
        "start 1 stay\n");
  Policy back = parse_policy(m, text);
  CHECK(back == p);

  CHECK(throws_containing([&] { parse_policy(m, "nope 0 go\n"); },
                          "unknown state 'nope'"));
  CHECK(throws_containing([&] { parse_policy(m, "start 2 go\n"); },
                          "outside [0, 1]"));
  CHECK(throws_containing([&] { parse_policy(m, "start 0 go\nstart 0 stay\n"); },
                          "duplicate assignment"));
}

TEST_CASE("layered generator: disjoint targets give disjoint futures") {
  for (std::uint64_t seed = 1; seed <= 25; ++seed) {
    LayeredParams p;
    p.n_states_per_level = 4;
    p.n_actions = 2;
    p.horizon = 3;
    p.gamma_target = 2;
    p.cluster_target = 1;
    p.seed = seed;
    MdpInstance inst = generate_layered(p);
    LayeredGraph g = build_layers(inst);
    CHECK(g.disjoint());
    CHECK(g.psi_exclusive == 0);
    CHECK(g.gamma <= 2);
    CHECK(static_cast<int>(g.levels.size()) == 4);
    for (const auto& lvl : g.levels) {
      CHECK(!lvl.empty());
      CHECK(static_cast<int>(lvl.size()) <= 4);
    }
    for (double r : inst.state_risk) {
      CHECK(r >= 0.0);
      CHECK(r <= 0.3);
    }
  }
}

TEST_CASE("layered generator: cluster targets give exactly that overlap") {
  for (std::uint64_t seed = 1; seed <= 25; ++seed) {
    LayeredParams p;
    p.n_states_per_level = 5;
    p.n_actions = 2;
    p.horizon = 3;
    p.gamma_target = 3;
    p.cluster_target = 2;
    p.seed = seed;
    MdpInstance inst = generate_layered(p);
    LayeredGraph g = build_layers(inst);
    CHECK(g.psi_inclusive == 2);
    CHECK(g.max_cluster_size() == 2);
    CHECK(!g.disjoint());
    CHECK(g.gamma <= 3);
  }
  LayeredParams p3;
  p3.n_states_per_level = 6;
  p3.horizon = 2;
  p3.gamma_target = 3;
  p3.cluster_target = 3;
  p3.seed = 7;
  LayeredGraph g = build_layers(generate_layered(p3));
  CHECK(g.psi_inclusive == 3);
  CHECK(g.max_cluster_size() == 3);
}

TEST_CASE("layered generator is deterministic in the seed") {
  LayeredParams p;
  p.cluster_target = 2;
  p.n_states_per_level = 4;
  p.gamma_target = 2;
  p.horizon = 3;
  p.seed = 42;
  std::string a = serialize_instance(generate_layered(p));
  std::string b = serialize_instance(generate_layered(p));
  CHECK(a == b);
  p.seed = 43;
  CHECK(serialize_instance(generate_layered(p)) != a);
}

TEST_CASE("layered generator: cost mode zeroes risks and draws costs") {
  LayeredParams p;
  p.mode = Mode::CostConstrained;
  p.risk_lo = 0.1;
  p.risk_hi = 0.5;
  p.budget = 1.5;
  p.seed = 3;
  MdpInstance inst = generate_layered(p);
  for (double r : inst.state_risk) CHECK(r == 0.0);
  bool any_cost = false;
  for (std::size_t s = 0; s < inst.state_names.size(); ++s) {
    for (std::size_t a = 0; a < inst.action_names.size(); ++a) {
      if (!inst.declared[s][a]) continue;
      CHECK(inst.action_cost[s][a] >= 0.1);
      CHECK(inst.action_cost[s][a] <= 0.5);
      any_cost = true;
    }
  }
  CHECK(any_cost);
  std::string text = serialize_instance(inst);
  CHECK(parse_instance(text).mode == Mode::CostConstrained);
}

TEST_CASE("layered generator rejects impossible parameter combinations") {
  LayeredParams p;
  p.cluster_target = 2;
  p.horizon = 1;
  CHECK_THROWS_AS(generate_layered(p), std::invalid_argument);
  LayeredParams q;
  q.cluster_target = 5;
  q.n_states_per_level = 3;
  CHECK_THROWS_AS(generate_layered(q), std::invalid_argument);
}

TEST_CASE("gridworld: deterministic moves, clamping, absorbing goal") {
  GridworldParams p;
  p.width = 2;
  p.height = 2;
  p.goal = {1, 1};
  p.cliffs = {{1, 0}};
  p.cliff_risk = 0.9;
  p.horizon = 2;
  p.budget = 0.05;
  MdpInstance m = generate_gridworld(p);
  CHECK(m.state_names.size() == 4);
  CHECK(m.action_names.size() == 4);
  auto id = [&](const std::string& n) {
    for (std::size_t i = 0; i < m.state_names.size(); ++i) {
      if (m.state_names[i] == n) return static_cast<int>(i);
    }
    return -1;
  };
  int c00 = id("c0_0"), c10 = id("c1_0"), c01 = id("c0_1"), c11 = id("c1_1");
  int up = 0, down = 1, left = 2, right = 3;
  REQUIRE(c00 == m.initial);
  // right from the start lands on the cliff cell deterministically
  REQUIRE(m.transitions[c00][right].size() == 1);
  CHECK(m.transitions[c00][right][0].state == c10);
  CHECK(m.transitions[c00][right][0].prob == 1.0);
  // moving off the left wall stays put
  REQUIRE(m.transitions[c00][left].size() == 1);
  CHECK(m.transitions[c00][left][0].state == c00);
  // goal is absorbing and pays one unit per step
  for (int a : {up, down, left, right}) {
    REQUIRE(m.transitions[c11][a].size() == 1);
    CHECK(m.transitions[c11][a][0].state == c11);
    CHECK(m.utility[c11][a] == 1.0);
  }
  CHECK(m.state_risk[c10] == 0.9);
  CHECK(m.state_risk[c01] == 0.0);

  // safe route: up then right reaches the goal with zero risk
  Policy pol;
  pol.set(0, c00, up);
  pol.set(1, c01, right);
  EvalReport r = evaluate_policy(m, build_layers(m), pol);
  CHECK(r.value == 0.0);  // arrives at the goal only at the terminal step
  CHECK(r.risk_or_cost == 0.0);
  CHECK(r.feasible);

  // risky route: right then up crosses the cliff
  Policy bad;
  bad.set(0, c00, right);
  bad.set(1, c10, up);
  EvalReport rb = evaluate_policy(m, build_layers(m), bad);
  CHECK(rb.risk_or_cost == doctest::Approx(0.9).epsilon(1e-12));
  CHECK(!rb.feasible);
}

TEST_CASE("gridworld: slip splits between perpendicular moves and merges on walls") {
  GridworldParams p;
  p.width = 3;
  p.height = 3;
  p.goal = {2, 2};
  p.slip = 0.2;
  p.horizon = 4;
  p.budget = 1.0;
  MdpInstance m = generate_gridworld(p);
  int c00 = m.initial;
  int right = 3;
  // From the corner, right's perpendicular slips are up (0,1) and down
  // (clamped back to the corner).
  const auto& outs = m.transitions[c00][right];
  REQUIRE(outs.size() == 3);
  auto id = [&](const std::string& n) {
    for (std::size_t i = 0; i < m.state_names.size(); ++i) {
      if (m.state_names[i] == n) return static_cast<int>(i);
    }
    return -1;
  };
  for (const auto& o : outs) {
    if (o.state == id("c1_0")) CHECK(o.prob == doctest::Approx(0.8).epsilon(1e-15));
    if (o.state == id("c0_1")) CHECK(o.prob == doctest::Approx(0.1).epsilon(1e-15));
    if (o.state == c00) CHECK(o.prob == doctest::Approx(0.1).epsilon(1e-15));
  }
  // structure is valid and fully layered
  LayeredGraph g = build_layers(m);
  CHECK(g.horizon == 4);
  CHECK(g.gamma >= 3);
}

TEST_CASE("gridworld rejects off-grid coordinates") {
  GridworldParams p;
  p.width = 2;
  p.height = 2;
  p.goal = {5, 5};
  CHECK_THROWS_AS(generate_gridworld(p), std::invalid_argument);
  GridworldParams q;
  q.cliffs = {{-1, 0}};
  CHECK_THROWS_AS(generate_gridworld(q), std::invalid_argument);
}
