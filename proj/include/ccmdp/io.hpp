#pragma once

#include <string>

#include "ccmdp/instance.hpp"
#include "ccmdp/policy.hpp"

namespace ccmdp {

// Line-oriented text format with sections [states], [actions], [transitions],
// [utility], [risk] (chance-constrained) or [cost] (cost-constrained), and
// [meta] (horizon, initial, budget, mode).  Transition lines are
// "state action successor probability"; "state action ." declares a terminal
// action.  '#' starts a comment.  Sections may appear in any order; state and
// action indices follow file order.
//
// Throws ParseError with a line number for structural problems and
// ValidationError (via validate_instance) for semantic ones.
MdpInstance parse_instance(const std::string& text);

// Canonical form: fixed section order, lexicographically sorted names and
// entries, zero-valued utility/risk/cost entries omitted, %.17g numbers (so
// serialize-parse round-trips are exact).
std::string serialize_instance(const MdpInstance& inst);

// Policy files: one "state step action" line per assignment, sorted by
// (step, state name).
std::string serialize_policy(const MdpInstance& inst, const Policy& policy);
Policy parse_policy(const MdpInstance& inst, const std::string& text);

}  // namespace ccmdp
