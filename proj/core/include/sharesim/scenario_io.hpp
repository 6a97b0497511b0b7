#pragma once

#include <string>
#include <string_view>

#include "sharesim/types.hpp"

namespace sharesim {

// Line-oriented scenario grammar. A section header may carry inline
// key=value pairs; further key=value lines extend the section:
//
//   [pool] total=100 capping=false
//   [group.DBMS] shares=60
//   [user.usrA] group=Users shares=6 cap=0.06
//   [workload.usrA] processes=10 demand_ms=500 think_ms=1000 demand_dist=fixed think_dist=exponential
//   [scheduler] policy=fs quantum_ms=10 tick_ms=10
//   [sim] duration_ms=600000 warmup_ms=60000 seed=42
//
// '#' starts a comment. Unknown sections or keys are errors (fail-closed).
Scenario parse_scenario_text(std::string_view text, const std::string& filename = "<string>");

// Reads and parses a scenario file. Throws ParseError on syntax problems;
// does not validate semantics (call validate_scenario for that).
Scenario load_scenario_file(const std::string& path);

// Canonical single-line-per-section form; parse(emit(s)) == s for any
// scenario emit accepts. Optional keys appear only when they differ from
// their defaults; floating-point values round-trip exactly.
std::string emit_scenario(const Scenario& s);

// Applies one "section.key=value" override, e.g. "scheduler.policy=fs" or
// "workload.usrA.think_ms=0". Throws std::invalid_argument for unknown
// keys or unparseable values (usage errors, not validation failures).
void apply_override(Scenario& s, std::string_view assignment);

}  // namespace sharesim
