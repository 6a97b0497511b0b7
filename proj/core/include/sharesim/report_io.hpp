#pragma once

#include <string>
#include <vector>

#include "sharesim/entitlements.hpp"
#include "sharesim/planner.hpp"
#include "sharesim/simcore.hpp"

namespace sharesim {

enum class Format { table, csv, structured };

// All emitters return deterministic bytes for a given report: no timestamps,
// doubles in shortest round-trip form (CSV/structured) or fixed columns
// (table). `header` controls the leading '#' comment lines carrying run
// metadata; data rows are identical either way.

std::string emit_entitlements(const EntitlementTable& t, Format f, bool header,
                              const std::string& scenario_label);
std::string emit_sim(const SimReport& r, Format f, bool header);
std::string emit_sweep(const std::vector<SimReport>& runs, Format f, bool header);
std::string emit_compare(const CompareReport& r, Format f, bool header);
std::string emit_plan(const PlanReport& r, Format f, bool header);
std::string emit_what_if(const WhatIfReport& r, Format f, bool header);
std::string emit_suggest(const SuggestReport& r, Format f, bool header);
std::string emit_fs_trace(const std::vector<FsTraceRow>& rows);  // always CSV

std::string format_name(Format f);
bool parse_format(const std::string& name, Format& out);

}  // namespace sharesim
