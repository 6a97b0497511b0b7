#include "sharesim/cli.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "sharesim/entitlements.hpp"
#include "sharesim/planner.hpp"
#include "sharesim/report_io.hpp"
#include "sharesim/scenario_io.hpp"
#include "sharesim/simcore.hpp"

namespace sharesim {

namespace {

// Names on the command line may be either a group (which expands to its
// members) or a single user; groups win when both exist.
std::vector<UserId> expand_name(const Scenario& s, const std::string& name) {
  if (s.alloc.find_group(name)) {
    std::vector<UserId> users;
    for (const auto& ua : s.alloc.users)
      if (ua.group == name) users.push_back(ua.user);
    return users;
  }
  if (s.alloc.find_user(name)) return {name};
  throw std::invalid_argument("unknown user or group '" + name + "'");
}

std::vector<UserId> expand_list(const Scenario& s, const std::string& csv) {
  std::vector<UserId> out;
  std::size_t pos = 0;
  while (pos <= csv.size()) {
    auto comma = csv.find(',', pos);
    if (comma == std::string::npos) comma = csv.size();
    const std::string name = csv.substr(pos, comma - pos);
    if (!name.empty())
      for (auto& u : expand_name(s, name)) out.push_back(std::move(u));
    pos = comma + 1;
  }
  return out;
}

Policy parse_policy_flag(const std::string& v) {
  if (v == "ts") return Policy::ts;
  if (v == "fs") return Policy::fs;
  throw std::invalid_argument("unknown policy '" + v + "' (expected ts or fs)");
}

std::pair<std::string, double> parse_name_value(const std::string& token, const char* what) {
  auto eq = token.find('=');
  if (eq == std::string::npos)
    throw std::invalid_argument(std::string(what) + " expects name=value, got '" + token + "'");
  const std::string name = token.substr(0, eq);
  const std::string vs = token.substr(eq + 1);
  double v = 0.0;
  auto r = std::from_chars(vs.data(), vs.data() + vs.size(), v);
  if (r.ec != std::errc{} || r.ptr != vs.data() + vs.size())
    throw std::invalid_argument(std::string(what) + ": bad number '" + vs + "'");
  return {name, v};
}

struct Common {
  std::string scenario_path;
  std::vector<std::string> overrides;
  std::string format_name = "table";
  std::string output_path;
  bool no_header = false;
};

void add_common(CLI::App* cmd, Common& c, bool needs_scenario = true) {
  auto* sc = cmd->add_option("--scenario", c.scenario_path, "scenario file to load");
  if (needs_scenario) sc->required();
  cmd->add_option("--set", c.overrides, "override a scenario key, e.g. scheduler.policy=fs");
  cmd->add_option("--format", c.format_name, "output format: table, csv, or structured")
      ->envname("SHARESIM_FORMAT");
  cmd->add_option("--output", c.output_path, "write data to this file instead of stdout");
  cmd->add_flag("--no-header", c.no_header, "suppress the '#' metadata comment lines");
}

Scenario load_with_overrides(const Common& c) {
  Scenario s = load_scenario_file(c.scenario_path);
  for (const auto& ov : c.overrides) apply_override(s, ov);
  return s;
}

Format resolve_format(const Common& c) {
  Format f{};
  if (!parse_format(c.format_name, f))
    throw std::invalid_argument("unknown format '" + c.format_name + "'");
  return f;
}

int deliver(const Common& c, const std::string& data, std::ostream& out, std::ostream& err) {
  if (c.output_path.empty()) {
    out << data;
    return 0;
  }
  std::ofstream file(c.output_path, std::ios::binary);
  if (!file || !(file << data) || !file.flush()) {
    err << "error: cannot write '" << c.output_path << "'\n";
    return 4;
  }
  return 0;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"CPU share scheduling simulator and capacity planner"};
  app.require_subcommand(1);

  Common c_entitle, c_sim, c_sweep, c_compare, c_plan, c_whatif, c_suggest;

  auto* entitle = app.add_subcommand("entitle", "print the entitlement table for an active set");
  add_common(entitle, c_entitle);
  std::vector<std::string> inactive;
  entitle->add_option("--inactive", inactive, "user or group to treat as idle (repeatable)");

  auto* simulate = app.add_subcommand("simulate", "run the scenario and report per-user metrics");
  add_common(simulate, c_sim);
  std::string sim_policy;
  simulate->add_option("--policy", sim_policy, "force the scheduling policy: ts or fs");
  std::string fs_trace_path;
  simulate->add_option("--fs-trace", fs_trace_path, "write the per-window usage trace CSV here");

  auto* sweep_cmd = app.add_subcommand("sweep", "rerun the scenario over a process-count range");
  add_common(sweep_cmd, c_sweep);
  std::string range = "1..10";
  sweep_cmd->add_option("--processes", range, "process counts per user, e.g. 1..50");
  std::string sweep_policy;
  sweep_cmd->add_option("--policy", sweep_policy, "force the scheduling policy: ts or fs");
  int jobs = 1;
  sweep_cmd->add_option("--jobs", jobs, "parallel sweep workers")->check(CLI::PositiveNumber);

  auto* compare = app.add_subcommand("compare", "run two policies and report degradation ratios");
  add_common(compare, c_compare);
  std::string first_policy = "ts", second_policy = "fs";
  compare->add_option("--first", first_policy, "baseline policy (default ts)");
  compare->add_option("--second", second_policy, "comparison policy (default fs)");

  auto* plan = app.add_subcommand("plan", "predict utilization and response without simulating");
  add_common(plan, c_plan);
  std::vector<std::string> plan_active;
  plan->add_option("--active", plan_active, "user or group to treat as active (repeatable)");

  auto* whatif = app.add_subcommand("what-if", "predict several active-set hypotheses");
  add_common(whatif, c_whatif);
  std::vector<std::string> hypotheses;
  whatif->add_option("--active", hypotheses,
                     "comma-separated users/groups for one hypothesis; first occurrence is the "
                     "baseline (repeatable)");

  auto* suggest = app.add_subcommand("suggest", "derive a share allocation from measurements");
  add_common(suggest, c_suggest, false);
  std::vector<std::string> measured_args, respmax_args;
  suggest->add_option("--measured", measured_args, "user=cpu_fraction observed under TS (repeatable)")
      ->required();
  std::int64_t pool = 100;
  suggest->add_option("--pool", pool, "total share pool (default 100)");
  suggest->add_option("--resp-max", respmax_args, "user=worst_response_ms seen under TS (repeatable)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return 2;
  }

  try {
    if (*entitle) {
      Scenario s = load_with_overrides(c_entitle);
      std::vector<UserId> idle;
      for (const auto& name : inactive)
        for (auto& u : expand_name(s, name)) idle.push_back(std::move(u));
      std::vector<UserId> active;
      for (const auto& ua : s.alloc.users)
        if (std::find(idle.begin(), idle.end(), ua.user) == idle.end())
          active.push_back(ua.user);
      EntitlementTable t = effective_entitlements(s.alloc, active);
      return deliver(c_entitle, emit_entitlements(t, resolve_format(c_entitle), !c_entitle.no_header,
                                                  s.sim.label),
                     out, err);
    }
    if (*simulate) {
      Scenario s = load_with_overrides(c_sim);
      if (!sim_policy.empty()) s.sched.policy = parse_policy_flag(sim_policy);
      std::vector<FsTraceRow> trace;
      SimReport r = fs_trace_path.empty() ? run(s) : run(s, &trace);
      if (!fs_trace_path.empty()) {
        std::ofstream file(fs_trace_path, std::ios::binary);
        if (!file || !(file << emit_fs_trace(trace)) || !file.flush()) {
          err << "error: cannot write '" << fs_trace_path << "'\n";
          return 4;
        }
      }
      return deliver(c_sim, emit_sim(r, resolve_format(c_sim), !c_sim.no_header), out, err);
    }
    if (*sweep_cmd) {
      Scenario s = load_with_overrides(c_sweep);
      if (!sweep_policy.empty()) s.sched.policy = parse_policy_flag(sweep_policy);
      auto dots = range.find("..");
      int lo = 0, hi = 0;
      auto parse_int = [&](std::string_view sv, int& v) {
        auto r = std::from_chars(sv.data(), sv.data() + sv.size(), v);
        return r.ec == std::errc{} && r.ptr == sv.data() + sv.size();
      };
      if (dots == std::string::npos || !parse_int(std::string_view(range).substr(0, dots), lo) ||
          !parse_int(std::string_view(range).substr(dots + 2), hi) || lo < 1 || hi < lo)
        throw std::invalid_argument("bad --processes range '" + range + "' (expected e.g. 1..50)");
      auto runs = sweep(s, lo, hi, jobs);
      return deliver(c_sweep, emit_sweep(runs, resolve_format(c_sweep), !c_sweep.no_header), out,
                     err);
    }
    if (*compare) {
      Scenario s = load_with_overrides(c_compare);
      CompareReport r =
          compare_policies(s, parse_policy_flag(first_policy), parse_policy_flag(second_policy));
      return deliver(c_compare, emit_compare(r, resolve_format(c_compare), !c_compare.no_header),
                     out, err);
    }
    if (*plan) {
      Scenario s = load_with_overrides(c_plan);
      PlanReport r;
      if (plan_active.empty()) {
        r = predict(s);
      } else {
        std::vector<UserId> active;
        for (const auto& name : plan_active)
          for (auto& u : expand_name(s, name)) active.push_back(std::move(u));
        r = predict(s, active);
      }
      return deliver(c_plan, emit_plan(r, resolve_format(c_plan), !c_plan.no_header), out, err);
    }
    if (*whatif) {
      Scenario s = load_with_overrides(c_whatif);
      std::vector<std::vector<UserId>> sets;
      for (const auto& h : hypotheses) sets.push_back(expand_list(s, h));
      WhatIfReport r = what_if(s, sets);
      return deliver(c_whatif, emit_what_if(r, resolve_format(c_whatif), !c_whatif.no_header), out,
                     err);
    }
    if (*suggest) {
      std::vector<std::pair<UserId, double>> measured, respmax;
      for (const auto& m : measured_args) measured.push_back(parse_name_value(m, "--measured"));
      for (const auto& m : respmax_args) respmax.push_back(parse_name_value(m, "--resp-max"));
      SuggestReport r = suggest_shares(measured, pool, respmax);
      return deliver(c_suggest, emit_suggest(r, resolve_format(c_suggest), !c_suggest.no_header),
                     out, err);
    }
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const ParseError& e) {
    err << "error: " << e.what() << "\n";
    return 3;
  } catch (const ValidationError& e) {
    err << "error: invalid scenario\n";
    for (const auto& v : e.violations()) err << "  " << v.code << ": " << v.message << "\n";
    return 3;
  } catch (const PlannerError& e) {
    err << "error: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 4;
  }
  return 0;
}

}  // namespace sharesim
