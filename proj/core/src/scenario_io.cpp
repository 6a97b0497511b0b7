#include "sharesim/scenario_io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <vector>

namespace sharesim {

namespace {

struct Tok {
  std::string key;
  std::string value;
};

// --- value parsing -------------------------------------------------------

template <typename T>
bool from_chars_all(std::string_view s, T& out) {
  const char* b = s.data();
  const char* e = s.data() + s.size();
  auto [p, ec] = std::from_chars(b, e, out);
  return ec == std::errc{} && p == e;
}

std::int64_t parse_i64(const std::string& v, const std::string& file, int line, const std::string& key) {
  std::int64_t x{};
  if (!from_chars_all(v, x)) throw ParseError(file, line, "integer expected for " + key + ", got '" + v + "'");
  return x;
}

std::uint64_t parse_u64(const std::string& v, const std::string& file, int line, const std::string& key) {
  std::uint64_t x{};
  if (!from_chars_all(v, x)) throw ParseError(file, line, "unsigned integer expected for " + key + ", got '" + v + "'");
  return x;
}

int parse_int(const std::string& v, const std::string& file, int line, const std::string& key) {
  int x{};
  if (!from_chars_all(v, x)) throw ParseError(file, line, "integer expected for " + key + ", got '" + v + "'");
  return x;
}

double parse_double(const std::string& v, const std::string& file, int line, const std::string& key) {
  double x{};
  if (!from_chars_all(v, x)) throw ParseError(file, line, "number expected for " + key + ", got '" + v + "'");
  return x;
}

bool parse_bool(const std::string& v, const std::string& file, int line, const std::string& key) {
  if (v == "true") return true;
  if (v == "false") return false;
  throw ParseError(file, line, "true/false expected for " + key + ", got '" + v + "'");
}

Policy parse_policy(const std::string& v, const std::string& file, int line) {
  if (v == "ts") return Policy::ts;
  if (v == "fs") return Policy::fs;
  throw ParseError(file, line, "policy must be ts or fs, got '" + v + "'");
}

Dist parse_dist(const std::string& v, const std::string& file, int line, const std::string& key) {
  if (v == "fixed") return Dist::fixed;
  if (v == "exponential") return Dist::exponential;
  throw ParseError(file, line, key + " must be fixed or exponential, got '" + v + "'");
}

std::vector<std::string> split_ws(const std::string& line) {
  std::vector<std::string> out;
  std::istringstream is(line);
  std::string t;
  while (is >> t) out.push_back(t);
  return out;
}

Tok split_kv(const std::string& tok, const std::string& file, int line) {
  auto eq = tok.find('=');
  if (eq == std::string::npos || eq == 0)
    throw ParseError(file, line, "expected key=value, got '" + tok + "'");
  return {tok.substr(0, eq), tok.substr(eq + 1)};
}

// --- section sinks -------------------------------------------------------

struct ParseState {
  Scenario s;
  std::string file;
  // current section cursor
  enum class Sec { none, pool, group, user, workload, scheduler, sim } sec = Sec::none;
  std::size_t idx = 0;  // groups/users/workload index for the open section
  bool saw_pool = false, saw_sched = false, saw_sim = false;
};

void apply_kv(ParseState& st, const Tok& t, int line) {
  auto& s = st.s;
  const auto& file = st.file;
  switch (st.sec) {
    case ParseState::Sec::pool:
      if (t.key == "total") s.alloc.pool_total = parse_i64(t.value, file, line, t.key);
      else if (t.key == "capping") s.alloc.capping_enabled = parse_bool(t.value, file, line, t.key);
      else throw ParseError(file, line, "unknown key '" + t.key + "' in [pool]");
      break;
    case ParseState::Sec::group:
      if (t.key == "shares") s.alloc.groups[st.idx].shares = parse_i64(t.value, file, line, t.key);
      else throw ParseError(file, line, "unknown key '" + t.key + "' in [group.*]");
      break;
    case ParseState::Sec::user: {
      auto& u = s.alloc.users[st.idx];
      if (t.key == "group") u.group = t.value;
      else if (t.key == "shares") u.shares = parse_i64(t.value, file, line, t.key);
      else if (t.key == "cap") u.cap = parse_double(t.value, file, line, t.key);
      else throw ParseError(file, line, "unknown key '" + t.key + "' in [user.*]");
      break;
    }
    case ParseState::Sec::workload: {
      auto& w = s.workload.by_user[st.idx].second;
      if (t.key == "processes") w.processes = parse_int(t.value, file, line, t.key);
      else if (t.key == "demand_ms") w.demand_ms = parse_double(t.value, file, line, t.key);
      else if (t.key == "think_ms") w.think_ms = parse_double(t.value, file, line, t.key);
      else if (t.key == "demand_dist") w.demand_dist = parse_dist(t.value, file, line, t.key);
      else if (t.key == "think_dist") w.think_dist = parse_dist(t.value, file, line, t.key);
      else if (t.key == "nice") w.nice = parse_int(t.value, file, line, t.key);
      else throw ParseError(file, line, "unknown key '" + t.key + "' in [workload.*]");
      break;
    }
    case ParseState::Sec::scheduler: {
      auto& c = s.sched;
      if (t.key == "policy") c.policy = parse_policy(t.value, file, line);
      else if (t.key == "quantum_ms") c.quantum_ms = parse_i64(t.value, file, line, t.key);
      else if (t.key == "tick_ms") c.tick_ms = parse_i64(t.value, file, line, t.key);
      else if (t.key == "ts_levels") c.ts.levels = parse_int(t.value, file, line, t.key);
      else if (t.key == "ts_cpu_weight") c.ts.cpu_weight = parse_double(t.value, file, line, t.key);
      else if (t.key == "ts_decay_per_s") c.ts.decay_per_s = parse_double(t.value, file, line, t.key);
      else if (t.key == "ts_nice_weight") c.ts.nice_weight = parse_double(t.value, file, line, t.key);
      else if (t.key == "fs_usage_window_ms") c.fs.usage_window_ms = parse_i64(t.value, file, line, t.key);
      else if (t.key == "fs_pri_window_ms") c.fs.pri_window_ms = parse_i64(t.value, file, line, t.key);
      else if (t.key == "fs_decay_usage") c.fs.decay_usage = parse_double(t.value, file, line, t.key);
      else if (t.key == "fs_pri_a") c.fs.pri_a = parse_double(t.value, file, line, t.key);
      else if (t.key == "fs_pri_b") c.fs.pri_b = parse_double(t.value, file, line, t.key);
      else throw ParseError(file, line, "unknown key '" + t.key + "' in [scheduler]");
      break;
    }
    case ParseState::Sec::sim: {
      auto& c = s.sim;
      if (t.key == "duration_ms") c.duration_ms = parse_i64(t.value, file, line, t.key);
      else if (t.key == "warmup_ms") c.warmup_ms = parse_i64(t.value, file, line, t.key);
      else if (t.key == "seed") c.seed = parse_u64(t.value, file, line, t.key);
      else if (t.key == "metrics_window_ms") c.metrics_window_ms = parse_i64(t.value, file, line, t.key);
      else if (t.key == "label") c.label = t.value;
      else throw ParseError(file, line, "unknown key '" + t.key + "' in [sim]");
      break;
    }
    case ParseState::Sec::none:
      throw ParseError(file, line, "key=value before any [section]");
  }
}

void open_section(ParseState& st, const std::string& header, int line) {
  const auto& file = st.file;
  if (header.size() < 2 || header.front() != '[' || header.back() != ']')
    throw ParseError(file, line, "malformed section header '" + header + "'");
  std::string body = header.substr(1, header.size() - 2);
  std::string kind = body, name;
  if (auto dot = body.find('.'); dot != std::string::npos) {
    kind = body.substr(0, dot);
    name = body.substr(dot + 1);
  }
  auto named = [&](const char* what) {
    if (name.empty()) throw ParseError(file, line, std::string("[") + what + ".<name>] requires a name");
  };
  if (kind == "pool") {
    if (st.saw_pool) throw ParseError(file, line, "duplicate [pool] section");
    st.saw_pool = true;
    st.sec = ParseState::Sec::pool;
  } else if (kind == "group") {
    named("group");
    st.s.alloc.groups.push_back({name, 0});
    st.idx = st.s.alloc.groups.size() - 1;
    st.sec = ParseState::Sec::group;
  } else if (kind == "user") {
    named("user");
    st.s.alloc.users.push_back({name, "", 0, std::nullopt});
    st.idx = st.s.alloc.users.size() - 1;
    st.sec = ParseState::Sec::user;
  } else if (kind == "workload") {
    named("workload");
    st.s.workload.by_user.emplace_back(name, UserWorkload{});
    st.idx = st.s.workload.by_user.size() - 1;
    st.sec = ParseState::Sec::workload;
  } else if (kind == "scheduler") {
    if (st.saw_sched) throw ParseError(file, line, "duplicate [scheduler] section");
    st.saw_sched = true;
    st.sec = ParseState::Sec::scheduler;
  } else if (kind == "sim") {
    if (st.saw_sim) throw ParseError(file, line, "duplicate [sim] section");
    st.saw_sim = true;
    st.sec = ParseState::Sec::sim;
  } else {
    throw ParseError(file, line, "unknown section '" + kind + "'");
  }
}

}  // namespace

Scenario parse_scenario_text(std::string_view text, const std::string& filename) {
  ParseState st;
  st.file = filename;
  std::istringstream is{std::string(text)};
  std::string raw;
  int line = 0;
  while (std::getline(is, raw)) {
    ++line;
    if (auto hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
    auto toks = split_ws(raw);
    if (toks.empty()) continue;
    std::size_t first = 0;
    if (toks[0].front() == '[') {
      open_section(st, toks[0], line);
      first = 1;
    }
    for (std::size_t i = first; i < toks.size(); ++i)
      apply_kv(st, split_kv(toks[i], st.file, line), line);
  }
  return std::move(st.s);
}

Scenario load_scenario_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ParseError(path, 0, "cannot open scenario file");
  std::ostringstream buf;
  buf << f.rdbuf();
  return parse_scenario_text(buf.str(), path);
}

namespace {

// Shortest representation that parses back to the same double.
std::string fmt_double(double v) {
  char buf[64];
  auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
  (void)ec;
  return std::string(buf, p);
}

const TsParams kTsDefaults{};
const FsParams kFsDefaults{};

}  // namespace

std::string emit_scenario(const Scenario& s) {
  std::ostringstream os;
  os << "[pool] total=" << s.alloc.pool_total
     << " capping=" << (s.alloc.capping_enabled ? "true" : "false") << "\n";
  for (const auto& g : s.alloc.groups)
    os << "[group." << g.group << "] shares=" << g.shares << "\n";
  for (const auto& u : s.alloc.users) {
    os << "[user." << u.user << "] group=" << u.group << " shares=" << u.shares;
    if (u.cap) os << " cap=" << fmt_double(*u.cap);
    os << "\n";
  }
  for (const auto& [user, w] : s.workload.by_user) {
    os << "[workload." << user << "] processes=" << w.processes
       << " demand_ms=" << fmt_double(w.demand_ms)
       << " think_ms=" << fmt_double(w.think_ms)
       << " demand_dist=" << (w.demand_dist == Dist::fixed ? "fixed" : "exponential")
       << " think_dist=" << (w.think_dist == Dist::fixed ? "fixed" : "exponential");
    if (w.nice != 0) os << " nice=" << w.nice;
    os << "\n";
  }
  const auto& c = s.sched;
  os << "[scheduler] policy=" << (c.policy == Policy::ts ? "ts" : "fs")
     << " quantum_ms=" << c.quantum_ms << " tick_ms=" << c.tick_ms;
  if (c.ts.levels != kTsDefaults.levels) os << " ts_levels=" << c.ts.levels;
  if (c.ts.cpu_weight != kTsDefaults.cpu_weight) os << " ts_cpu_weight=" << fmt_double(c.ts.cpu_weight);
  if (c.ts.decay_per_s != kTsDefaults.decay_per_s) os << " ts_decay_per_s=" << fmt_double(c.ts.decay_per_s);
  if (c.ts.nice_weight != kTsDefaults.nice_weight) os << " ts_nice_weight=" << fmt_double(c.ts.nice_weight);
  if (c.fs.usage_window_ms != kFsDefaults.usage_window_ms) os << " fs_usage_window_ms=" << c.fs.usage_window_ms;
  if (c.fs.pri_window_ms != kFsDefaults.pri_window_ms) os << " fs_pri_window_ms=" << c.fs.pri_window_ms;
  if (c.fs.decay_usage != kFsDefaults.decay_usage) os << " fs_decay_usage=" << fmt_double(c.fs.decay_usage);
  if (c.fs.pri_a != kFsDefaults.pri_a) os << " fs_pri_a=" << fmt_double(c.fs.pri_a);
  if (c.fs.pri_b != kFsDefaults.pri_b) os << " fs_pri_b=" << fmt_double(c.fs.pri_b);
  os << "\n";
  os << "[sim] duration_ms=" << s.sim.duration_ms << " warmup_ms=" << s.sim.warmup_ms
     << " seed=" << s.sim.seed;
  if (s.sim.metrics_window_ms != 1000) os << " metrics_window_ms=" << s.sim.metrics_window_ms;
  if (!s.sim.label.empty()) os << " label=" << s.sim.label;
  os << "\n";
  return os.str();
}

void apply_override(Scenario& s, std::string_view assignment) {
  auto bad = [&](const std::string& why) {
    throw std::invalid_argument("override '" + std::string(assignment) + "': " + why);
  };
  auto eq = assignment.find('=');
  if (eq == std::string_view::npos) bad("expected section.key=value");
  std::string path(assignment.substr(0, eq));
  std::string value(assignment.substr(eq + 1));

  std::vector<std::string> parts;
  for (std::size_t pos = 0;;) {
    auto dot = path.find('.', pos);
    if (dot == std::string::npos) {
      parts.push_back(path.substr(pos));
      break;
    }
    parts.push_back(path.substr(pos, dot - pos));
    pos = dot + 1;
  }
  if (parts.size() < 2) bad("expected section.key=value");

  // Reuse the file-grammar parser by faking a one-line section. This keeps
  // override key names identical to scenario file key names.
  const std::string file = "<override>";
  ParseState st;
  st.file = file;
  st.s = std::move(s);
  try {
    if (parts.size() == 2 && (parts[0] == "pool" || parts[0] == "scheduler" || parts[0] == "sim")) {
      st.sec = parts[0] == "pool"        ? ParseState::Sec::pool
               : parts[0] == "scheduler" ? ParseState::Sec::scheduler
                                         : ParseState::Sec::sim;
      apply_kv(st, {parts[1], value}, 0);
    } else if (parts.size() == 3 && parts[0] == "group") {
      std::size_t i = 0;
      for (; i < st.s.alloc.groups.size(); ++i)
        if (st.s.alloc.groups[i].group == parts[1]) break;
      if (i == st.s.alloc.groups.size()) bad("unknown group '" + parts[1] + "'");
      st.sec = ParseState::Sec::group;
      st.idx = i;
      apply_kv(st, {parts[2], value}, 0);
    } else if (parts.size() == 3 && parts[0] == "user") {
      std::size_t i = 0;
      for (; i < st.s.alloc.users.size(); ++i)
        if (st.s.alloc.users[i].user == parts[1]) break;
      if (i == st.s.alloc.users.size()) bad("unknown user '" + parts[1] + "'");
      st.sec = ParseState::Sec::user;
      st.idx = i;
      apply_kv(st, {parts[2], value}, 0);
    } else if (parts.size() == 3 && parts[0] == "workload") {
      std::size_t i = 0;
      for (; i < st.s.workload.by_user.size(); ++i)
        if (st.s.workload.by_user[i].first == parts[1]) break;
      if (i == st.s.workload.by_user.size()) bad("unknown workload user '" + parts[1] + "'");
      st.sec = ParseState::Sec::workload;
      st.idx = i;
      apply_kv(st, {parts[2], value}, 0);
    } else {
      bad("unknown section '" + parts[0] + "'");
    }
  } catch (const ParseError& e) {
    s = std::move(st.s);
    bad(e.what());
  }
  s = std::move(st.s);
}

}  // namespace sharesim
