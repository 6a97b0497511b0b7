#include "sharesim/report_io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <sstream>

#include "json.hpp"

namespace sharesim {

namespace {

using ordered_json = nlohmann::ordered_json;

std::string shortest(double v) {
  char buf[64];
  auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

std::string fixed(double v, int prec) {
  char buf[64];
  auto r = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::fixed, prec);
  return std::string(buf, r.ptr);
}

std::string pct(double v) { return fixed(v * 100.0, 2) + "%"; }

std::string policy_name(Policy p) { return p == Policy::ts ? "ts" : "fs"; }

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

std::string csv_row(const std::vector<std::string>& fields) {
  std::string out;
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out += ',';
    out += csv_field(fields[i]);
  }
  out += '\n';
  return out;
}

// minimal aligned table: header, rule, rows; numeric columns right-aligned
struct Table {
  std::vector<std::string> head;
  std::vector<char> right;
  std::vector<std::vector<std::string>> rows;

  void col(const std::string& name, bool right_align) {
    head.push_back(name);
    right.push_back(right_align ? 1 : 0);
  }
  std::string render() const {
    std::vector<std::size_t> w(head.size());
    for (std::size_t i = 0; i < head.size(); ++i) w[i] = head[i].size();
    for (const auto& r : rows)
      for (std::size_t i = 0; i < r.size(); ++i) w[i] = std::max(w[i], r[i].size());
    auto line = [&](const std::vector<std::string>& r) {
      std::string out;
      for (std::size_t i = 0; i < r.size(); ++i) {
        if (i) out += "  ";
        const auto pad = w[i] - r[i].size();
        if (right[i]) out.append(pad, ' ');
        out += r[i];
        if (!right[i] && i + 1 < r.size()) out.append(pad, ' ');
      }
      while (!out.empty() && out.back() == ' ') out.pop_back();
      out += '\n';
      return out;
    };
    std::string out = line(head);
    std::size_t total = 0;
    for (std::size_t i = 0; i < w.size(); ++i) total += w[i] + (i ? 2 : 0);
    out.append(total, '-');
    out += '\n';
    for (const auto& r : rows) out += line(r);
    return out;
  }
};

std::string sim_header(const SimReport& r) {
  std::string out;
  out += "# scenario: " + (r.scenario_label.empty() ? "(unnamed)" : r.scenario_label) + "\n";
  out += "# policy: " + policy_name(r.policy) + "  seed: " + std::to_string(r.seed) +
         "  duration_ms: " + std::to_string(r.duration_ms) +
         "  warmup_ms: " + std::to_string(r.warmup_ms) + "\n";
  return out;
}

const std::vector<std::string> kSimCols = {
    "scenario", "policy", "user", "group", "processes", "shares", "entitlement_static",
    "entitlement_dynamic", "util", "tps", "work_tput_ms_per_s", "resp_mean_ms", "resp_p95_ms"};

std::vector<std::string> sim_csv_fields(const SimReport& r, const UserReport& u) {
  return {r.scenario_label,
          policy_name(r.policy),
          u.user,
          u.group,
          std::to_string(u.processes),
          shortest(u.shares),
          shortest(u.entitlement_static),
          shortest(u.entitlement_dynamic),
          shortest(u.utilization),
          shortest(u.tps),
          shortest(u.work_tput_ms_per_s),
          shortest(u.resp_mean_ms),
          shortest(u.resp_p95_ms)};
}

ordered_json user_json(const UserReport& u) {
  ordered_json j;
  j["user"] = u.user;
  j["group"] = u.group;
  j["processes"] = u.processes;
  j["shares"] = u.shares;
  j["entitlement_static"] = u.entitlement_static;
  j["entitlement_dynamic"] = u.entitlement_dynamic;
  j["util"] = u.utilization;
  j["tps"] = u.tps;
  j["work_tput_ms_per_s"] = u.work_tput_ms_per_s;
  j["resp_mean_ms"] = u.resp_mean_ms;
  j["resp_p95_ms"] = u.resp_p95_ms;
  j["avg_in_service"] = u.avg_in_service;
  j["preemptions"] = u.preemptions;
  j["max_ready_wait_ms"] = u.max_ready_wait_ms;
  j["busy_ms"] = u.busy_ms;
  j["transactions"] = u.transactions;
  return j;
}

ordered_json sim_json(const SimReport& r, bool with_windows) {
  ordered_json j;
  j["scenario"] = r.scenario_label;
  j["policy"] = policy_name(r.policy);
  j["seed"] = r.seed;
  j["duration_ms"] = r.duration_ms;
  j["warmup_ms"] = r.warmup_ms;
  j["measured_ms"] = r.measured_ms;
  j["total"] = {{"util", r.total_utilization},
                {"busy_ms", r.busy_ms},
                {"idle_ms", r.idle_ms},
                {"max_ready_wait_ms", r.max_ready_wait_ms}};
  j["users"] = ordered_json::array();
  for (const auto& u : r.users) j["users"].push_back(user_json(u));
  j["groups"] = ordered_json::array();
  for (const auto& g : r.groups) {
    ordered_json gj;
    gj["group"] = g.group;
    gj["util"] = g.utilization;
    gj["tps"] = g.tps;
    gj["work_tput_ms_per_s"] = g.work_tput_ms_per_s;
    gj["resp_mean_ms"] = g.resp_mean_ms;
    gj["resp_p95_ms"] = g.resp_p95_ms;
    j["groups"].push_back(std::move(gj));
  }
  if (with_windows) {
    j["windows"] = ordered_json::array();
    for (const auto& w : r.windows) {
      ordered_json wj;
      wj["entity"] = w.entity;
      wj["is_group"] = w.is_group;
      wj["window_start_ms"] = w.window_start_ms;
      wj["window_end_ms"] = w.window_end_ms;
      wj["busy_ms"] = w.busy_ms;
      wj["transactions"] = w.transactions;
      wj["resp_mean_ms"] =
          w.resp_samples.empty() && w.transactions == 0
              ? 0.0
              : w.resp_sum_ms / std::max<std::int64_t>(1, w.transactions);
      j["windows"].push_back(std::move(wj));
    }
  }
  return j;
}

std::string sim_table(const SimReport& r) {
  Table t;
  t.col("user", false);
  t.col("group", false);
  t.col("procs", true);
  t.col("shares", true);
  t.col("ent_stat", true);
  t.col("ent_dyn", true);
  t.col("util", true);
  t.col("tps", true);
  t.col("work_ms/s", true);
  t.col("resp_mean", true);
  t.col("resp_p95", true);
  t.col("max_wait", true);
  for (const auto& u : r.users)
    t.rows.push_back({u.user, u.group, std::to_string(u.processes), fixed(u.shares, 0),
                      pct(u.entitlement_static), pct(u.entitlement_dynamic), pct(u.utilization),
                      fixed(u.tps, 2), fixed(u.work_tput_ms_per_s, 1), fixed(u.resp_mean_ms, 1),
                      fixed(u.resp_p95_ms, 1), std::to_string(u.max_ready_wait_ms)});
  std::string out = t.render();
  out += "total util " + pct(r.total_utilization) + "  busy " + std::to_string(r.busy_ms) +
         " ms  idle " + std::to_string(r.idle_ms) + " ms\n";
  if (!r.groups.empty()) {
    Table g;
    g.col("group", false);
    g.col("util", true);
    g.col("tps", true);
    g.col("work_ms/s", true);
    g.col("resp_mean", true);
    g.col("resp_p95", true);
    for (const auto& gr : r.groups)
      g.rows.push_back({gr.group, pct(gr.utilization), fixed(gr.tps, 2),
                        fixed(gr.work_tput_ms_per_s, 1), fixed(gr.resp_mean_ms, 1),
                        fixed(gr.resp_p95_ms, 1)});
    out += "\n" + g.render();
  }
  return out;
}

}  // namespace

std::string format_name(Format f) {
  switch (f) {
    case Format::table: return "table";
    case Format::csv: return "csv";
    default: return "structured";
  }
}

bool parse_format(const std::string& name, Format& out) {
  if (name == "table") out = Format::table;
  else if (name == "csv") out = Format::csv;
  else if (name == "structured") out = Format::structured;
  else return false;
  return true;
}

std::string emit_entitlements(const EntitlementTable& t, Format f, bool header,
                              const std::string& scenario_label) {
  std::string out;
  if (f == Format::structured) {
    ordered_json j;
    j["scenario"] = scenario_label;
    j["users"] = ordered_json::array();
    for (const auto& r : t.rows) {
      ordered_json rj;
      rj["user"] = r.user;
      rj["group"] = r.group;
      rj["shares"] = r.shares;
      rj["static"] = r.static_e;
      rj["dynamic"] = r.dynamic_e;
      rj["effective"] = r.effective_e;
      rj["active"] = r.active;
      j["users"].push_back(std::move(rj));
    }
    j["groups"] = ordered_json::array();
    for (const auto& [group, e] : t.group_static)
      j["groups"].push_back({{"group", group}, {"static", e}});
    return j.dump(2) + "\n";
  }
  if (header) out += "# scenario: " + (scenario_label.empty() ? "(unnamed)" : scenario_label) + "\n";
  if (f == Format::csv) {
    out += csv_row({"user", "group", "shares", "entitlement_static", "entitlement_dynamic",
                    "entitlement_effective", "active"});
    for (const auto& r : t.rows)
      out += csv_row({r.user, r.group, shortest(r.shares), shortest(r.static_e),
                      shortest(r.dynamic_e), shortest(r.effective_e), r.active ? "1" : "0"});
    return out;
  }
  Table tab;
  tab.col("user", false);
  tab.col("group", false);
  tab.col("shares", true);
  tab.col("static", true);
  tab.col("dynamic", true);
  tab.col("effective", true);
  tab.col("active", false);
  for (const auto& r : t.rows)
    tab.rows.push_back({r.user, r.group, fixed(r.shares, 0), pct(r.static_e), pct(r.dynamic_e),
                        pct(r.effective_e), r.active ? "yes" : "no"});
  out += tab.render();
  if (!t.group_static.empty()) {
    Table g;
    g.col("group", false);
    g.col("static", true);
    for (const auto& [group, e] : t.group_static) g.rows.push_back({group, pct(e)});
    out += "\n" + g.render();
  }
  return out;
}

std::string emit_sim(const SimReport& r, Format f, bool header) {
  if (f == Format::structured) return sim_json(r, true).dump(2) + "\n";
  std::string out;
  if (header) out += sim_header(r);
  if (f == Format::csv) {
    out += csv_row(kSimCols);
    for (const auto& u : r.users) out += csv_row(sim_csv_fields(r, u));
    return out;
  }
  return out + sim_table(r);
}

std::string emit_sweep(const std::vector<SimReport>& runs, Format f, bool header) {
  if (f == Format::structured) {
    ordered_json j;
    j["points"] = ordered_json::array();
    for (const auto& r : runs) j["points"].push_back(sim_json(r, false));
    return j.dump(2) + "\n";
  }
  std::string out;
  if (header && !runs.empty()) out += sim_header(runs.front());
  if (f == Format::csv) {
    out += csv_row(kSimCols);
    for (const auto& r : runs)
      for (const auto& u : r.users) out += csv_row(sim_csv_fields(r, u));
    return out;
  }
  Table t;
  t.col("procs", true);
  t.col("user", false);
  t.col("util", true);
  t.col("tps", true);
  t.col("work_ms/s", true);
  t.col("resp_mean", true);
  t.col("resp_p95", true);
  for (const auto& r : runs)
    for (const auto& u : r.users)
      t.rows.push_back({std::to_string(u.processes), u.user, pct(u.utilization), fixed(u.tps, 2),
                        fixed(u.work_tput_ms_per_s, 1), fixed(u.resp_mean_ms, 1),
                        fixed(u.resp_p95_ms, 1)});
  return out + t.render();
}

std::string emit_compare(const CompareReport& r, Format f, bool header) {
  if (f == Format::structured) {
    ordered_json j;
    j["first"] = sim_json(r.ts_run, false);
    j["second"] = sim_json(r.fs_run, false);
    j["rows"] = ordered_json::array();
    for (const auto& row : r.rows) {
      ordered_json rj;
      rj["user"] = row.user;
      rj["group"] = row.group;
      rj["resp_first_ms"] = row.resp_ts_ms;
      rj["resp_second_ms"] = row.resp_fs_ms;
      rj["degradation"] = row.degradation;
      rj["util_first"] = row.util_ts;
      rj["util_second"] = row.util_fs;
      j["rows"].push_back(std::move(rj));
    }
    return j.dump(2) + "\n";
  }
  std::string out;
  if (header) {
    out += "# scenario: " +
           (r.ts_run.scenario_label.empty() ? "(unnamed)" : r.ts_run.scenario_label) + "\n";
    out += "# first: " + policy_name(r.ts_run.policy) + "  second: " + policy_name(r.fs_run.policy) +
           "  seed: " + std::to_string(r.ts_run.seed) + "\n";
  }
  if (f == Format::csv) {
    out += csv_row({"user", "group", "resp_first_ms", "resp_second_ms", "degradation",
                    "util_first", "util_second"});
    for (const auto& row : r.rows)
      out += csv_row({row.user, row.group, shortest(row.resp_ts_ms), shortest(row.resp_fs_ms),
                      shortest(row.degradation), shortest(row.util_ts), shortest(row.util_fs)});
    return out;
  }
  Table t;
  t.col("user", false);
  t.col("group", false);
  t.col("resp_first", true);
  t.col("resp_second", true);
  t.col("degradation", true);
  t.col("util_first", true);
  t.col("util_second", true);
  for (const auto& row : r.rows)
    t.rows.push_back({row.user, row.group, fixed(row.resp_ts_ms, 1), fixed(row.resp_fs_ms, 1),
                      std::isnan(row.degradation) ? "n/a" : fixed(row.degradation, 2),
                      pct(row.util_ts), pct(row.util_fs)});
  return out + t.render();
}

namespace {

ordered_json plan_json(const PlanReport& r) {
  ordered_json j;
  j["scenario"] = r.scenario_label;
  j["iterations"] = r.iterations;
  j["residual"] = r.residual;
  j["total_util"] = r.total_utilization;
  j["rows"] = ordered_json::array();
  for (const auto& row : r.rows) {
    ordered_json rj;
    rj["user"] = row.user;
    rj["group"] = row.group;
    rj["shares"] = row.shares;
    rj["processes"] = row.processes;
    rj["active"] = row.active;
    rj["entitlement"] = row.entitlement;
    rj["capacity"] = row.capacity;
    rj["util"] = row.utilization;
    rj["resp_mean_ms"] = row.resp_mean_ms;
    rj["tps"] = row.tps;
    j["rows"].push_back(std::move(rj));
  }
  return j;
}

const std::vector<std::string> kPlanCols = {"scenario", "user",         "group", "shares",
                                            "processes", "active",      "entitlement",
                                            "capacity",  "util",        "tps",
                                            "resp_mean_ms"};

std::vector<std::string> plan_csv_fields(const PlanReport& r, const PlanRow& row) {
  return {r.scenario_label, row.user, row.group, shortest(row.shares),
          std::to_string(row.processes), row.active ? "1" : "0", shortest(row.entitlement),
          shortest(row.capacity), shortest(row.utilization), shortest(row.tps),
          shortest(row.resp_mean_ms)};
}

std::string plan_table(const PlanReport& r) {
  Table t;
  t.col("user", false);
  t.col("group", false);
  t.col("shares", true);
  t.col("procs", true);
  t.col("active", false);
  t.col("entitlement", true);
  t.col("capacity", true);
  t.col("util", true);
  t.col("tps", true);
  t.col("resp_mean", true);
  for (const auto& row : r.rows)
    t.rows.push_back({row.user, row.group, fixed(row.shares, 0), std::to_string(row.processes),
                      row.active ? "yes" : "no", pct(row.entitlement), pct(row.capacity),
                      pct(row.utilization), fixed(row.tps, 2), fixed(row.resp_mean_ms, 1)});
  std::string out = t.render();
  out += "total util " + pct(r.total_utilization) + "  (" + std::to_string(r.iterations) +
         " iterations, residual " + shortest(r.residual) + ")\n";
  return out;
}

}  // namespace

std::string emit_plan(const PlanReport& r, Format f, bool header) {
  if (f == Format::structured) return plan_json(r).dump(2) + "\n";
  std::string out;
  if (header)
    out += "# scenario: " + (r.scenario_label.empty() ? "(unnamed)" : r.scenario_label) +
           "  iterations: " + std::to_string(r.iterations) + "\n";
  if (f == Format::csv) {
    out += csv_row(kPlanCols);
    for (const auto& row : r.rows) out += csv_row(plan_csv_fields(r, row));
    return out;
  }
  return out + plan_table(r);
}

std::string emit_what_if(const WhatIfReport& r, Format f, bool header) {
  if (f == Format::structured) {
    ordered_json j;
    j["hypotheses"] = ordered_json::array();
    for (const auto& rep : r.reports) j["hypotheses"].push_back(plan_json(rep));
    j["deltas"] = ordered_json::array();
    for (const auto& table : r.deltas) {
      ordered_json tj = ordered_json::array();
      for (const auto& d : table) {
        ordered_json dj;
        dj["user"] = d.user;
        dj["d_entitlement"] = d.d_entitlement;
        dj["d_util"] = d.d_utilization;
        dj["d_resp_mean_ms"] = d.d_resp_mean_ms;
        dj["d_tps"] = d.d_tps;
        dj["resp_ratio"] = d.resp_ratio;
        tj.push_back(std::move(dj));
      }
      j["deltas"].push_back(std::move(tj));
    }
    return j.dump(2) + "\n";
  }
  std::string out;
  if (header)
    out += "# hypotheses: " + std::to_string(r.reports.size()) + "  (set 0 is the baseline)\n";
  if (f == Format::csv) {
    auto cols = kPlanCols;
    cols.insert(cols.begin(), "set");
    cols.insert(cols.end(),
                {"d_entitlement", "d_util", "d_resp_mean_ms", "d_tps", "resp_ratio"});
    out += csv_row(cols);
    for (std::size_t h = 0; h < r.reports.size(); ++h) {
      const auto& rep = r.reports[h];
      for (std::size_t i = 0; i < rep.rows.size(); ++i) {
        auto fields = plan_csv_fields(rep, rep.rows[i]);
        fields.insert(fields.begin(), std::to_string(h));
        if (h == 0) {
          fields.insert(fields.end(), {"0", "0", "0", "0", "1"});
        } else {
          const auto& d = r.deltas[h - 1][i];
          fields.insert(fields.end(),
                        {shortest(d.d_entitlement), shortest(d.d_utilization),
                         shortest(d.d_resp_mean_ms), shortest(d.d_tps), shortest(d.resp_ratio)});
        }
        out += csv_row(fields);
      }
    }
    return out;
  }
  for (std::size_t h = 0; h < r.reports.size(); ++h) {
    out += (h == 0 ? "baseline\n" : "hypothesis " + std::to_string(h) + "\n");
    out += plan_table(r.reports[h]);
    if (h > 0) {
      Table t;
      t.col("user", false);
      t.col("d_entitlement", true);
      t.col("d_util", true);
      t.col("d_resp_mean", true);
      t.col("d_tps", true);
      t.col("resp_ratio", true);
      for (const auto& d : r.deltas[h - 1])
        t.rows.push_back({d.user, fixed(d.d_entitlement * 100.0, 2) + "pt",
                          fixed(d.d_utilization * 100.0, 2) + "pt", fixed(d.d_resp_mean_ms, 1),
                          fixed(d.d_tps, 2),
                          std::isnan(d.resp_ratio) ? "n/a" : fixed(d.resp_ratio, 2)});
      out += t.render();
    }
    if (h + 1 < r.reports.size()) out += "\n";
  }
  return out;
}

std::string emit_suggest(const SuggestReport& r, Format f, bool header) {
  if (f == Format::structured) {
    ordered_json j;
    j["pool"] = r.pool;
    j["pointless_precision"] = r.pointless_precision;
    j["rows"] = ordered_json::array();
    for (const auto& row : r.rows) {
      ordered_json rj;
      rj["user"] = row.user;
      rj["measured"] = row.measured;
      rj["shares"] = row.shares;
      rj["implied_entitlement"] = row.implied_entitlement;
      rj["wiggle_flag"] = row.wiggle_flag;
      j["rows"].push_back(std::move(rj));
    }
    return j.dump(2) + "\n";
  }
  std::string out;
  if (header) out += "# pool: " + std::to_string(r.pool) + "\n";
  if (f == Format::csv) {
    out += csv_row({"user", "measured", "shares", "implied_entitlement", "wiggle_flag"});
    for (const auto& row : r.rows)
      out += csv_row({row.user, shortest(row.measured), std::to_string(row.shares),
                      shortest(row.implied_entitlement), row.wiggle_flag ? "1" : "0"});
    return out;
  }
  Table t;
  t.col("user", false);
  t.col("measured", true);
  t.col("shares", true);
  t.col("entitlement", true);
  t.col("flag", false);
  for (const auto& row : r.rows)
    t.rows.push_back({row.user, pct(row.measured), std::to_string(row.shares),
                      pct(row.implied_entitlement), row.wiggle_flag ? "over-promise" : ""});
  out += t.render();
  if (r.pointless_precision)
    out += "note: a pool this large implies precision the scheduler cannot deliver; "
           "100 shares keeps entitlements readable\n";
  return out;
}

std::string emit_fs_trace(const std::vector<FsTraceRow>& rows) {
  std::string out = csv_row({"window_end_ms", "user", "usage", "cost", "p_active"});
  for (const auto& r : rows)
    out += csv_row({std::to_string(r.window_end_ms), r.user, shortest(r.usage), shortest(r.cost),
                    std::to_string(r.p_active)});
  return out;
}

}  // namespace sharesim
