#include "vastzones/config.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

namespace vz {

namespace {

struct Entry {
  std::string key, value;
  int line = 0;
};

struct RawConfig {
  std::string name;
  std::vector<std::pair<std::string, std::vector<Entry>>> sections;

  std::vector<Entry>& section(const std::string& s) {
    for (auto& [n, entries] : sections)
      if (n == s) return entries;
    sections.emplace_back(s, std::vector<Entry>{});
    return sections.back().second;
  }
  const Entry* find(const std::string& s, const std::string& key) const {
    const Entry* hit = nullptr;
    for (const auto& [n, entries] : sections) {
      if (n != s) continue;
      for (const auto& e : entries)
        if (e.key == key) hit = &e;  // last occurrence wins
    }
    return hit;
  }
  std::vector<const Entry*> find_all(const std::string& s, const std::string& key) const {
    std::vector<const Entry*> out;
    for (const auto& [n, entries] : sections) {
      if (n != s) continue;
      for (const auto& e : entries)
        if (e.key == key) out.push_back(&e);
    }
    return out;
  }
  bool has_section(const std::string& s) const {
    for (const auto& [n, entries] : sections)
      if (n == s) return true;
    return false;
  }
};

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

[[noreturn]] void fail_at(const RawConfig& raw, const std::string& section, const Entry& e,
                          const std::string& msg) {
  throw ConfigError(raw.name + ":" + std::to_string(e.line) + ": [" + section + "] " +
                    e.key + ": " + msg);
}

RawConfig tokenize(const std::string& text, const std::string& name) {
  RawConfig raw;
  raw.name = name;
  std::istringstream in(text);
  std::string line, current = "";
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find_first_of("#;");
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw ConfigError(name + ":" + std::to_string(line_no) + ": malformed section header");
      current = trim(line.substr(1, line.size() - 2));
      raw.section(current);
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError(name + ":" + std::to_string(line_no) +
                        ": expected 'key = value', got '" + line + "'");
    Entry e;
    e.key = trim(line.substr(0, eq));
    e.value = trim(line.substr(eq + 1));
    e.line = line_no;
    if (e.key.empty())
      throw ConfigError(name + ":" + std::to_string(line_no) + ": empty key");
    raw.section(current).push_back(std::move(e));
  }
  return raw;
}

void apply_overrides(RawConfig& raw, const std::vector<std::string>& overrides) {
  for (const std::string& ov : overrides) {
    const auto eq = ov.find('=');
    if (eq == std::string::npos)
      throw ConfigError("override '" + ov + "': expected section.key=value");
    const std::string path = trim(ov.substr(0, eq));
    const auto dot = path.find('.');
    if (dot == std::string::npos)
      throw ConfigError("override '" + ov + "': key must be section.key");
    Entry e;
    e.key = trim(path.substr(dot + 1));
    e.value = trim(ov.substr(eq + 1));
    e.line = 0;
    raw.section(trim(path.substr(0, dot))).push_back(std::move(e));
  }
}

double as_double(const RawConfig& raw, const std::string& sec, const Entry& e) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(e.value, &pos);
    if (trim(e.value.substr(pos)).empty()) return v;
  } catch (...) {
  }
  fail_at(raw, sec, e, "expected a number, got '" + e.value + "'");
}

long long as_int(const RawConfig& raw, const std::string& sec, const Entry& e) {
  try {
    std::size_t pos = 0;
    const long long v = std::stoll(e.value, &pos);
    if (trim(e.value.substr(pos)).empty()) return v;
  } catch (...) {
  }
  fail_at(raw, sec, e, "expected an integer, got '" + e.value + "'");
}

bool as_bool(const RawConfig& raw, const std::string& sec, const Entry& e) {
  std::string v = e.value;
  std::transform(v.begin(), v.end(), v.begin(), ::tolower);
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  fail_at(raw, sec, e, "expected a boolean, got '" + e.value + "'");
}

Vec3 as_vec3(const RawConfig& raw, const std::string& sec, const Entry& e) {
  std::istringstream in(e.value);
  Vec3 v;
  if (in >> v[0] >> v[1] >> v[2]) {
    std::string rest;
    if (!(in >> rest)) return v;
  }
  fail_at(raw, sec, e, "expected three numbers, got '" + e.value + "'");
}

std::vector<double> as_double_list(const RawConfig& raw, const std::string& sec,
                                   const Entry& e) {
  std::string s = e.value;
  std::replace(s.begin(), s.end(), ',', ' ');
  std::istringstream in(s);
  std::vector<double> out;
  double v;
  while (in >> v) out.push_back(v);
  if (out.empty()) fail_at(raw, sec, e, "expected a list of numbers");
  return out;
}

SignalSpec parse_signal(const RawConfig& raw, const std::string& sec, const Entry& e) {
  SignalSpec spec;
  const std::string& v = e.value;
  if (v.rfind("noise:", 0) == 0) {
    spec.kind = SignalSpec::Kind::noise;
    try {
      spec.seconds = std::stod(v.substr(6));
    } catch (...) {
      fail_at(raw, sec, e, "expected noise:<seconds>");
    }
  } else if (v.rfind("tone:", 0) == 0) {
    spec.kind = SignalSpec::Kind::tone;
    const auto rest = v.substr(5);
    const auto colon = rest.find(':');
    try {
      spec.freq_hz = std::stod(rest.substr(0, colon));
      spec.seconds = colon == std::string::npos ? 6.0 : std::stod(rest.substr(colon + 1));
    } catch (...) {
      fail_at(raw, sec, e, "expected tone:<hz>:<seconds>");
    }
  } else {
    spec.kind = SignalSpec::Kind::wav;
    spec.path = v;
  }
  return spec;
}

std::vector<Vec3> square_grid(const Vec3& center, std::size_t side, double spacing) {
  std::vector<Vec3> pts;
  const double off = 0.5 * static_cast<double>(side - 1) * spacing;
  for (std::size_t i = 0; i < side; ++i)
    for (std::size_t j = 0; j < side; ++j)
      pts.push_back({center[0] - off + spacing * static_cast<double>(i),
                     center[1] - off + spacing * static_cast<double>(j), center[2]});
  return pts;
}

}  // namespace

ExperimentConfig parse_config_text(const std::string& text, const std::string& name,
                                   const std::vector<std::string>& overrides) {
  RawConfig raw = tokenize(text, name);
  apply_overrides(raw, overrides);

  ExperimentConfig cfg;
  cfg.source_name = name;

  // [room]
  if (const Entry* e = raw.find("room", "size")) {
    if (trim(e->value) == "unbounded") {
      cfg.room.bounded = false;
    } else {
      cfg.room.bounded = true;
      cfg.room.dimensions = as_vec3(raw, "room", *e);
    }
  }
  if (const Entry* e = raw.find("room", "t60")) cfg.room.t60 = as_double(raw, "room", *e);
  if (const Entry* e = raw.find("room", "fs"))
    cfg.room.sample_rate = as_double(raw, "room", *e);
  if (const Entry* e = raw.find("room", "c"))
    cfg.room.speed_of_sound = as_double(raw, "room", *e);

  // [scene]
  std::string array_mode = "explicit";
  if (const Entry* e = raw.find("scene", "array")) array_mode = trim(e->value);
  if (array_mode == "circle") {
    double radius = 2.0;
    std::size_t count = 8;
    Vec3 center{0.0, 0.0, 0.0};
    if (const Entry* e = raw.find("scene", "array_radius"))
      radius = as_double(raw, "scene", *e);
    if (const Entry* e = raw.find("scene", "array_count"))
      count = static_cast<std::size_t>(as_int(raw, "scene", *e));
    if (const Entry* e = raw.find("scene", "array_center"))
      center = as_vec3(raw, "scene", *e);
    for (std::size_t l = 0; l < count; ++l) {
      const double th = 2.0 * std::numbers::pi * static_cast<double>(l) /
                        static_cast<double>(count);
      cfg.scene.loudspeakers.push_back(
          {center[0] + radius * std::cos(th), center[1] + radius * std::sin(th), center[2]});
    }
    Vec3 za{center[0] - 0.5, center[1], center[2]};
    Vec3 zb{center[0] + 0.5, center[1], center[2]};
    if (const Entry* e = raw.find("scene", "zone_alpha_center"))
      za = as_vec3(raw, "scene", *e);
    if (const Entry* e = raw.find("scene", "zone_beta_center"))
      zb = as_vec3(raw, "scene", *e);
    std::size_t zone_grid = 5, monitor_grid = 4;
    double zone_spacing = 0.05, monitor_spacing = 0.06;
    if (const Entry* e = raw.find("scene", "zone_grid"))
      zone_grid = static_cast<std::size_t>(as_int(raw, "scene", *e));
    if (const Entry* e = raw.find("scene", "zone_spacing"))
      zone_spacing = as_double(raw, "scene", *e);
    if (const Entry* e = raw.find("scene", "monitor_grid"))
      monitor_grid = static_cast<std::size_t>(as_int(raw, "scene", *e));
    if (const Entry* e = raw.find("scene", "monitor_spacing"))
      monitor_spacing = as_double(raw, "scene", *e);
    cfg.scene.control_alpha = square_grid(za, zone_grid, zone_spacing);
    cfg.scene.control_beta = square_grid(zb, zone_grid, zone_spacing);
    if (monitor_grid > 0) {
      cfg.scene.monitor_alpha = square_grid(za, monitor_grid, monitor_spacing);
      cfg.scene.monitor_beta = square_grid(zb, monitor_grid, monitor_spacing);
    }
  } else if (array_mode == "explicit") {
    auto collect = [&](const char* key, std::vector<Vec3>& dst) {
      for (const Entry* e : raw.find_all("scene", key))
        dst.push_back(as_vec3(raw, "scene", *e));
    };
    collect("speaker", cfg.scene.loudspeakers);
    collect("control_alpha", cfg.scene.control_alpha);
    collect("control_beta", cfg.scene.control_beta);
    collect("monitor_alpha", cfg.scene.monitor_alpha);
    collect("monitor_beta", cfg.scene.monitor_beta);
  } else if (const Entry* e = raw.find("scene", "array")) {
    fail_at(raw, "scene", *e, "array must be 'circle' or 'explicit'");
  }
  if (const Entry* e = raw.find("scene", "virtual_source")) {
    const std::string v = trim(e->value);
    if (v.rfind("speaker:", 0) == 0) {
      std::size_t idx = 0;
      try {
        idx = static_cast<std::size_t>(std::stoul(v.substr(8)));
      } catch (...) {
        fail_at(raw, "scene", *e, "expected speaker:<index>");
      }
      if (idx >= cfg.scene.loudspeakers.size())
        fail_at(raw, "scene", *e, "speaker index out of range");
      cfg.scene.virtual_source = cfg.scene.loudspeakers[idx];
    } else {
      cfg.scene.virtual_source = as_vec3(raw, "scene", *e);
    }
  } else if (!cfg.scene.loudspeakers.empty()) {
    cfg.scene.virtual_source = cfg.scene.loudspeakers[0];
  }

  // [signals]
  if (const Entry* e = raw.find("signals", "alpha"))
    cfg.sig_alpha = parse_signal(raw, "signals", *e);
  if (const Entry* e = raw.find("signals", "beta"))
    cfg.sig_beta = parse_signal(raw, "signals", *e);
  if (const Entry* e = raw.find("signals", "calibrate_energy"))
    cfg.calibrate_energy = as_bool(raw, "signals", *e);

  // [method]
  if (const Entry* e = raw.find("method", "name")) {
    const std::string v = trim(e->value);
    if (v == "no_control")
      cfg.scenario.method = Method::no_control;
    else if (v == "vast")
      cfg.scenario.method = Method::vast;
    else if (v == "p_vast")
      cfg.scenario.method = Method::p_vast;
    else if (v == "ap_vast")
      cfg.scenario.method = Method::ap_vast;
    else
      fail_at(raw, "method", *e, "unknown method '" + v + "'");
  }
  if (const Entry* e = raw.find("method", "j"))
    cfg.scenario.j_len = static_cast<std::size_t>(as_int(raw, "method", *e));
  bool v_given = false;
  if (const Entry* e = raw.find("method", "v")) {
    if (trim(e->value) == "full") {
      v_given = false;  // resolved to LJ below
    } else {
      cfg.scenario.params.v = static_cast<std::size_t>(as_int(raw, "method", *e));
      v_given = true;
    }
  }
  if (!v_given)
    cfg.scenario.params.v = cfg.scene.loudspeakers.size() * cfg.scenario.j_len;
  if (const Entry* e = raw.find("method", "mu"))
    cfg.scenario.params.mu = as_double(raw, "method", *e);
  if (const Entry* e = raw.find("method", "n"))
    cfg.scenario.n_seg = static_cast<std::size_t>(as_int(raw, "method", *e));
  if (const Entry* e = raw.find("method", "eta"))
    cfg.scenario.eta = static_cast<std::size_t>(as_int(raw, "method", *e));
  if (const Entry* e = raw.find("method", "weighting"))
    cfg.scenario.weighting = as_bool(raw, "method", *e);
  if (const Entry* e = raw.find("method", "w_taps"))
    cfg.scenario.w_taps = static_cast<std::size_t>(as_int(raw, "method", *e));
  if (const Entry* e = raw.find("method", "regularization"))
    cfg.scenario.regularization = as_double(raw, "method", *e);
  if (const Entry* e = raw.find("method", "k"))
    cfg.k_taps = static_cast<std::size_t>(as_int(raw, "method", *e));
  if (const Entry* e = raw.find("method", "max_order"))
    cfg.max_order = static_cast<int>(as_int(raw, "method", *e));
  if (const Entry* e = raw.find("method", "metric_points")) {
    const std::string v = trim(e->value);
    if (v == "monitor")
      cfg.metric_on_monitor = true;
    else if (v == "control")
      cfg.metric_on_monitor = false;
    else
      fail_at(raw, "method", *e, "metric_points must be 'monitor' or 'control'");
  }

  // [sweep]
  cfg.has_sweep = raw.has_section("sweep");
  if (cfg.has_sweep) {
    cfg.mu_grid = default_mu_grid();
    if (const Entry* e = raw.find("sweep", "mu_grid"))
      cfg.mu_grid = as_double_list(raw, "sweep", *e);
    if (const Entry* e = raw.find("sweep", "v_grid")) {
      if (trim(e->value) != "auto") {
        for (double v : as_double_list(raw, "sweep", *e)) {
          if (v < 1.0) fail_at(raw, "sweep", *e, "V values must be >= 1");
          cfg.v_grid.push_back(static_cast<std::size_t>(std::llround(v)));
        }
      }
    }
  }

  // [output]
  if (const Entry* e = raw.find("output", "dir")) cfg.out_dir = trim(e->value);
  if (const Entry* e = raw.find("output", "seed"))
    cfg.seed = static_cast<std::uint64_t>(as_int(raw, "output", *e));

  return cfg;
}

ExperimentConfig parse_config_file(const std::string& path,
                                   const std::vector<std::string>& overrides) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str(), path, overrides);
}

namespace {

bool inside_room(const Vec3& p, const RoomSpec& room) {
  for (int i = 0; i < 3; ++i)
    if (p[i] < 0.0 || p[i] > room.dimensions[i]) return false;
  return true;
}

void check_positions(const ExperimentConfig& cfg, const std::vector<Vec3>& pts,
                     const std::string& what, std::vector<Finding>& out) {
  for (std::size_t i = 0; i < pts.size(); ++i)
    if (!inside_room(pts[i], cfg.room))
      out.push_back({true, what + " " + std::to_string(i) + " lies outside the room"});
}

}  // namespace

std::vector<Finding> validate_config(const ExperimentConfig& cfg) {
  std::vector<Finding> out;
  const std::size_t l = cfg.scene.loudspeakers.size();
  const std::size_t lj = l * cfg.scenario.j_len;

  if (cfg.room.bounded) {
    for (int i = 0; i < 3; ++i)
      if (cfg.room.dimensions[i] <= 0.0) {
        out.push_back({true, "room dimensions must be strictly positive"});
        break;
      }
    check_positions(cfg, cfg.scene.loudspeakers, "loudspeaker", out);
    check_positions(cfg, cfg.scene.control_alpha, "control_alpha point", out);
    check_positions(cfg, cfg.scene.control_beta, "control_beta point", out);
    check_positions(cfg, cfg.scene.monitor_alpha, "monitor_alpha point", out);
    check_positions(cfg, cfg.scene.monitor_beta, "monitor_beta point", out);
    check_positions(cfg, {cfg.scene.virtual_source}, "virtual source", out);
  } else if (cfg.room.t60 > 0.0) {
    out.push_back({true, "t60 > 0 requires a bounded room"});
  }
  if (cfg.room.t60 < 0.0) out.push_back({true, "t60 must be >= 0"});
  if (cfg.room.sample_rate <= 0.0) out.push_back({true, "fs must be > 0"});
  if (cfg.room.speed_of_sound <= 0.0) out.push_back({true, "c must be > 0"});

  if (l < 1) out.push_back({true, "at least one loudspeaker required"});
  if (cfg.scene.control_alpha.empty()) out.push_back({true, "zone alpha has no control points"});
  if (cfg.scene.control_beta.empty()) out.push_back({true, "zone beta has no control points"});

  if (cfg.sig_alpha.kind == SignalSpec::Kind::wav &&
      !std::filesystem::exists(cfg.sig_alpha.path))
    out.push_back({true, "signal file not found: " + cfg.sig_alpha.path});
  if (cfg.sig_beta.kind == SignalSpec::Kind::wav &&
      !std::filesystem::exists(cfg.sig_beta.path))
    out.push_back({true, "signal file not found: " + cfg.sig_beta.path});

  if (cfg.scenario.j_len < 1) out.push_back({true, "j must be >= 1"});
  if (cfg.k_taps < 1) out.push_back({true, "k must be >= 1"});
  if (cfg.scenario.params.mu < 0.0) out.push_back({true, "mu must be >= 0"});
  if (cfg.scenario.params.v < 1 || cfg.scenario.params.v > lj)
    out.push_back({true, "v must lie in [1, LJ] = [1, " + std::to_string(lj) + "]"});
  for (const std::size_t v : cfg.v_grid)
    if (v < 1 || v > lj)
      out.push_back({true, "sweep v = " + std::to_string(v) + " outside [1, " +
                               std::to_string(lj) + "]"});
  for (const double mu : cfg.mu_grid)
    if (mu < 0.0) out.push_back({true, "sweep mu values must be >= 0"});

  if (cfg.scenario.n_seg < 64 || cfg.scenario.n_seg % 2 != 0)
    out.push_back({true, "n must be even and >= 64"});
  if (cfg.scenario.eta >= cfg.scenario.n_seg)
    out.push_back({true, "eta must be < n"});
  if (cfg.scenario.method == Method::ap_vast &&
      cfg.scenario.eta * 2 != cfg.scenario.n_seg)
    out.push_back({true, "ap_vast requires eta = n/2"});
  if (cfg.scenario.w_taps % 2 == 0 || cfg.scenario.w_taps > cfg.scenario.n_seg)
    out.push_back({true, "w_taps must be odd and <= n"});
  if (cfg.scenario.regularization < 0.0)
    out.push_back({true, "regularization must be >= 0"});
  if (cfg.max_order < 0) out.push_back({true, "max_order must be >= 0"});

  // Rank condition M_D min(N, K+J-1) >= LJ; signal length bounds N from above.
  const std::size_t m_d = cfg.scene.control_beta.size();
  std::size_t n_bound = cfg.k_taps + cfg.scenario.j_len - 1;
  if (cfg.sig_alpha.kind != SignalSpec::Kind::wav) {
    const std::size_t n_sig = static_cast<std::size_t>(
        cfg.sig_alpha.seconds * cfg.room.sample_rate);
    n_bound = std::min(n_bound, n_sig);
  }
  if (m_d * n_bound < lj)
    out.push_back({false, "rank condition violated: M_D*min(N, K+J-1) = " +
                              std::to_string(m_d * n_bound) + " < LJ = " +
                              std::to_string(lj) + "; R_D may be singular"});
  return out;
}

}  // namespace vz
