#include "pulsega/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace pulsega::io {

using nlohmann::json;

namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    out.push_back(trim(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

std::vector<std::pair<int, std::string_view>> lines_of(std::string_view text) {
  std::vector<std::pair<int, std::string_view>> out;
  int n = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto pos = text.find('\n', start);
    const auto line = text.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start);
    ++n;
    out.emplace_back(n, line);
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

template <typename T>
bool parse_int(std::string_view s, T& out) {
  if (s.empty()) return false;
  const char* b = s.data();
  if (*b == '+') ++b;
  auto [p, ec] = std::from_chars(b, s.data() + s.size(), out);
  return ec == std::errc() && p == s.data() + s.size();
}

bool parse_double(std::string_view s, double& out) {
  if (s.empty()) return false;
  const char* b = s.data();
  if (*b == '+') ++b;
  auto [p, ec] = std::from_chars(b, s.data() + s.size(), out);
  return ec == std::errc() && p == s.data() + s.size() && std::isfinite(out);
}

json parse_value(const KeyValue& kv, const std::string& source, const std::string& key) {
  try {
    return json::parse(kv.value);
  } catch (const json::parse_error&) {
    throw ParseError(source, kv.line, "cannot parse value of '" + key + "': " + kv.value);
  }
}

double as_number(const json& j, const KeyValue& kv, const std::string& source, const std::string& key) {
  if (!j.is_number()) throw ParseError(source, kv.line, "'" + key + "' must be a number");
  return j.get<double>();
}

std::vector<double> as_list(const json& j, const KeyValue& kv, const std::string& source, const std::string& key) {
  if (!j.is_array()) throw ParseError(source, kv.line, "'" + key + "' must be a list [..]");
  std::vector<double> out;
  for (const auto& e : j) out.push_back(as_number(e, kv, source, key));
  return out;
}

std::string fmt_double(double v) {
  // Shortest representation that round-trips.
  char buf[64];
  auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return ec == std::errc() ? std::string(buf, p) : std::to_string(v);
}

}  // namespace

ParseError::ParseError(const std::string& source, int line, const std::string& what)
    : std::runtime_error(line > 0 ? source + ":" + std::to_string(line) + ": " + what : source + ": " + what),
      line_(line) {}

std::map<std::string, KeyValue> parse_key_values(std::string_view text, const std::string& source) {
  std::map<std::string, KeyValue> out;
  for (auto [n, raw] : lines_of(text)) {
    auto line = raw;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ParseError(source, n, "expected 'key = value'");
    const std::string key(trim(line.substr(0, eq)));
    const std::string value(trim(line.substr(eq + 1)));
    if (key.empty()) throw ParseError(source, n, "missing key");
    if (value.empty()) throw ParseError(source, n, "missing value for '" + key + "'");
    if (out.contains(key)) throw ParseError(source, n, "duplicate key '" + key + "'");
    out.emplace(key, KeyValue{value, n});
  }
  return out;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path + "' for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, std::string_view content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw std::runtime_error("failed writing '" + path + "'");
}

// --- spin system ------------------------------------------------------------

SpinSystem parse_spin_system(std::string_view text, const std::string& source) {
  const auto kv = parse_key_values(text, source);
  static const char* known[] = {"n_spins", "nu_hz", "nu_rf_hz", "j_hz", "omega_rad_s"};
  for (const auto& [k, v] : kv) {
    if (std::find(std::begin(known), std::end(known), k) == std::end(known)) {
      throw ParseError(source, v.line, "unknown key '" + k + "'");
    }
  }
  auto need = [&](const std::string& k) -> const KeyValue& {
    auto it = kv.find(k);
    if (it == kv.end()) throw ParseError(source, 0, "missing required key '" + k + "'");
    return it->second;
  };

  SpinSystem sys;
  {
    const auto& e = need("n_spins");
    std::size_t n = 0;
    if (!parse_int(std::string_view(e.value), n) || n == 0) {
      throw ParseError(source, e.line, "n_spins must be a positive integer");
    }
    sys.n_spins = n;
  }
  const auto n = sys.n_spins;
  {
    const auto& e = need("nu_hz");
    sys.chemical_shifts = as_list(parse_value(e, source, "nu_hz"), e, source, "nu_hz");
    if (sys.chemical_shifts.size() != n) throw ParseError(source, e.line, "nu_hz must have n_spins entries");
  }
  if (auto it = kv.find("nu_rf_hz"); it != kv.end()) {
    sys.frame_freqs = as_list(parse_value(it->second, source, "nu_rf_hz"), it->second, source, "nu_rf_hz");
    if (sys.frame_freqs.size() != n) throw ParseError(source, it->second.line, "nu_rf_hz must have n_spins entries");
  } else {
    sys.frame_freqs.assign(n, 0.0);
  }
  sys.couplings = RMatrix::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  if (auto it = kv.find("j_hz"); it != kv.end()) {
    const auto& e = it->second;
    const json j = parse_value(e, source, "j_hz");
    if (!j.is_array()) throw ParseError(source, e.line, "j_hz must be a list");
    const bool nested = !j.empty() && j.front().is_array();
    if (nested) {
      if (j.size() != n) throw ParseError(source, e.line, "j_hz matrix must be n_spins x n_spins");
      for (std::size_t r = 0; r < n; ++r) {
        const auto row = as_list(j[r], e, source, "j_hz");
        if (row.size() != n) throw ParseError(source, e.line, "j_hz matrix must be n_spins x n_spins");
        for (std::size_t c = 0; c < n; ++c) {
          sys.couplings(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = row[c];
        }
      }
    } else {
      const auto upper = as_list(j, e, source, "j_hz");
      if (upper.size() != n * (n - 1) / 2) {
        throw ParseError(source, e.line, "j_hz upper-triangle list must have n(n-1)/2 entries");
      }
      std::size_t k = 0;
      for (std::size_t r = 0; r < n; ++r) {
        for (std::size_t c = r + 1; c < n; ++c, ++k) {
          sys.couplings(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = upper[k];
          sys.couplings(static_cast<Eigen::Index>(c), static_cast<Eigen::Index>(r)) = upper[k];
        }
      }
    }
  }
  {
    const auto& e = need("omega_rad_s");
    sys.rf_amplitude = as_number(parse_value(e, source, "omega_rad_s"), e, source, "omega_rad_s");
  }
  try {
    sys.validate();
  } catch (const std::invalid_argument& ex) {
    throw ParseError(source, 0, ex.what());
  }
  return sys;
}

SpinSystem load_spin_system(const std::string& path) { return parse_spin_system(read_file(path), path); }

std::string format_spin_system(const SpinSystem& sys) {
  auto list = [](const std::vector<double>& v) {
    std::string s = "[";
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + fmt_double(v[i]);
    return s + "]";
  };
  std::string out = "n_spins = " + std::to_string(sys.n_spins) + "\n";
  out += "nu_hz = " + list(sys.chemical_shifts) + "\n";
  out += "nu_rf_hz = " + list(sys.frame_freqs) + "\n";
  out += "j_hz = [";
  for (Eigen::Index r = 0; r < sys.couplings.rows(); ++r) {
    std::vector<double> row(sys.couplings.row(r).begin(), sys.couplings.row(r).end());
    out += (r ? ", " : "") + list(row);
  }
  out += "]\nomega_rad_s = " + fmt_double(sys.rf_amplitude) + "\n";
  return out;
}

json to_json(const SpinSystem& sys) {
  json j;
  j["n_spins"] = sys.n_spins;
  j["nu_hz"] = sys.chemical_shifts;
  j["nu_rf_hz"] = sys.frame_freqs;
  json jm = json::array();
  for (Eigen::Index r = 0; r < sys.couplings.rows(); ++r) {
    jm.push_back(std::vector<double>(sys.couplings.row(r).begin(), sys.couplings.row(r).end()));
  }
  j["j_hz"] = jm;
  j["omega_rad_s"] = sys.rf_amplitude;
  return j;
}

SpinSystem spin_system_from_json(const json& j) {
  SpinSystem sys;
  sys.n_spins = j.at("n_spins").get<std::size_t>();
  sys.chemical_shifts = j.at("nu_hz").get<std::vector<double>>();
  sys.frame_freqs = j.at("nu_rf_hz").get<std::vector<double>>();
  const auto n = static_cast<Eigen::Index>(sys.n_spins);
  sys.couplings = RMatrix::Zero(n, n);
  const auto rows = j.at("j_hz").get<std::vector<std::vector<double>>>();
  if (static_cast<Eigen::Index>(rows.size()) != n) throw std::invalid_argument("j_hz has wrong shape");
  for (Eigen::Index r = 0; r < n; ++r) {
    if (static_cast<Eigen::Index>(rows[static_cast<std::size_t>(r)].size()) != n) {
      throw std::invalid_argument("j_hz has wrong shape");
    }
    for (Eigen::Index c = 0; c < n; ++c) {
      sys.couplings(r, c) = rows[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)];
    }
  }
  sys.rf_amplitude = j.at("omega_rad_s").get<double>();
  sys.validate();
  return sys;
}

// --- GA configuration -------------------------------------------------------

double parse_duration(std::string_view text) {
  auto s = trim(text);
  double mult = 1.0;
  if (!s.empty()) {
    switch (s.back()) {
      case 's': mult = 1.0; s.remove_suffix(1); break;
      case 'm': mult = 60.0; s.remove_suffix(1); break;
      case 'h': mult = 3600.0; s.remove_suffix(1); break;
      default: break;
    }
  }
  double v = 0.0;
  if (!parse_double(trim(s), v) || v < 0.0) {
    throw std::invalid_argument("bad duration '" + std::string(text) + "' (expected e.g. 90s, 5m, 1h)");
  }
  return v * mult;
}

AxisRange parse_range(std::string_view text) {
  const auto parts = split(text, ':');
  AxisRange r;
  if (parts.size() != 3 || !parse_double(parts[0], r.lo) || !parse_double(parts[1], r.hi) ||
      !parse_double(parts[2], r.step)) {
    throw std::invalid_argument("bad range '" + std::string(text) + "' (expected lo:hi:step)");
  }
  (void)r.values();
  return r;
}

namespace {

// Field table shared by the text parser and the JSON snapshot.
template <typename Visitor>
void visit_fields(GAConfig& c, Visitor&& v) {
  v("rows", c.rows);
  v("min_rows", c.min_rows);
  v("max_rows", c.max_rows);
  v("population", c.population);
  v("max_delay_us", c.max_delay_us);
  v("max_flip_rad", c.max_flip_rad);
  v("mutation_initial", c.mutation_initial);
  v("mutation_step", c.mutation_step);
  v("mutation_trigger", c.mutation_trigger);
  v("mutation_ceiling", c.mutation_ceiling);
  v("stagnation_tol", c.stagnation_tol);
  v("selection_pressure", c.selection_pressure);
  v("pressure_step", c.pressure_step);
  v("pressure_max", c.pressure_max);
  v("crossover_rate", c.crossover_rate);
  v("flip_rate", c.flip_rate);
  v("max_generations", c.max_generations);
  v("local_max_generations", c.local_max_generations);
  v("accept_threshold", c.accept_threshold);
  v("local_trigger", c.local_trigger);
  v("local_population", c.local_population);
  v("local_tau_width", c.local_tau_width);
  v("local_phase_width", c.local_phase_width);
  v("local_delay_fraction", c.local_delay_fraction);
  v("local_milestones", c.local_milestones);
  v("seed", c.seed);
}

}  // namespace

GAConfig parse_ga_config(std::string_view text, GAConfig cfg, const std::string& source) {
  auto kv = parse_key_values(text, source);
  auto take_duration = [&](const char* key, double& out) {
    if (auto it = kv.find(key); it != kv.end()) {
      try {
        out = parse_duration(it->second.value);
      } catch (const std::invalid_argument& e) {
        throw ParseError(source, it->second.line, e.what());
      }
      kv.erase(it);
    }
  };
  take_duration("budget_main", cfg.budget_main_s);
  take_duration("budget_local", cfg.budget_local_s);

  visit_fields(cfg, [&](const char* key, auto& field) {
    auto it = kv.find(key);
    if (it == kv.end()) return;
    const auto& e = it->second;
    using T = std::decay_t<decltype(field)>;
    if constexpr (std::is_same_v<T, std::vector<double>>) {
      field = as_list(parse_value(e, source, key), e, source, key);
    } else if constexpr (std::is_floating_point_v<T>) {
      if (!parse_double(std::string_view(e.value), field)) throw ParseError(source, e.line, std::string("'") + key + "' must be a number");
    } else {
      if (!parse_int(std::string_view(e.value), field)) throw ParseError(source, e.line, std::string("'") + key + "' must be an integer");
    }
    kv.erase(it);
  });
  if (!kv.empty()) {
    const auto& [k, e] = *kv.begin();
    throw ParseError(source, e.line, "unknown key '" + k + "'");
  }
  try {
    cfg.validate();
  } catch (const std::invalid_argument& e) {
    throw ParseError(source, 0, e.what());
  }
  return cfg;
}

GAConfig load_ga_config(const std::string& path, GAConfig base) {
  return parse_ga_config(read_file(path), std::move(base), path);
}

json to_json(const GAConfig& cfg) {
  json j;
  GAConfig c = cfg;
  visit_fields(c, [&](const char* key, auto& field) { j[key] = field; });
  j["budget_main_s"] = cfg.budget_main_s;
  j["budget_local_s"] = cfg.budget_local_s;
  return j;
}

GAConfig ga_config_from_json(const json& j) {
  GAConfig c;
  visit_fields(c, [&](const char* key, auto& field) {
    if (j.contains(key)) j.at(key).get_to(field);
  });
  if (j.contains("budget_main_s")) c.budget_main_s = j.at("budget_main_s").get<double>();
  if (j.contains("budget_local_s")) c.budget_local_s = j.at("budget_local_s").get<double>();
  c.validate();
  return c;
}

// --- pulse sequences --------------------------------------------------------

namespace {

PulseSequence parse_sequence_json(std::string_view text, const std::string& source) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(source, 0, std::string("invalid JSON: ") + e.what());
  }
  if (!j.is_object() || j.value("schema", "") != kSequenceSchema) {
    throw ParseError(source, 0, "expected a JSON object with schema \"" + std::string(kSequenceSchema) + "\"");
  }
  PulseSequence seq;
  const auto& rows = j.at("segments");
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& r = rows[i];
    PulseSegment s;
    try {
      s.tau_us = r.at("tau_us").get<std::int64_t>();
      s.sign_bit = r.at("sign").get<int>();
      s.phase_centideg = r.at("phi_centideg").get<std::int32_t>();
      s.delay_us = r.at("delta_us").get<std::int64_t>();
      if (r.at("l").get<std::size_t>() != i + 1) throw std::invalid_argument("segment numbering must start at 1");
      validate_segment(s);
    } catch (const std::exception& e) {
      throw ParseError(source, 0, "segment " + std::to_string(i + 1) + ": " + e.what());
    }
    seq.segments.push_back(s);
  }
  if (seq.empty()) throw ParseError(source, 0, "pulse sequence has no segments");
  return seq;
}

// "87.65" -> 8765; at most two decimals.
bool parse_centideg(std::string_view s, std::int32_t& out) {
  const auto dot = s.find('.');
  std::int64_t whole = 0;
  std::int64_t frac = 0;
  if (!parse_int(s.substr(0, dot), whole) || whole < 0) return false;
  if (dot != std::string_view::npos) {
    auto f = s.substr(dot + 1);
    if (f.empty() || f.size() > 2) return false;
    if (!parse_int(f, frac) || frac < 0) return false;
    if (f.size() == 1) frac *= 10;
  }
  out = static_cast<std::int32_t>(whole * 100 + frac);
  return true;
}

}  // namespace

PulseSequence parse_sequence(std::string_view text, const std::string& source) {
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first != std::string_view::npos && text[first] == '{') return parse_sequence_json(text, source);

  PulseSequence seq;
  bool resolved = false;
  bool header_seen = false;
  for (auto [n, raw] : lines_of(text)) {
    const auto line = trim(raw);
    if (line.empty() || line.front() == '#') continue;
    if (!header_seen) {
      if (line == kSequenceHeader) resolved = false;
      else if (line == kResolvedHeader) resolved = true;
      else {
        throw ParseError(source, n, "expected header '" + std::string(kSequenceHeader) + "' or '" +
                                        std::string(kResolvedHeader) + "'");
      }
      header_seen = true;
      continue;
    }
    const auto f = split(line, ',');
    const std::size_t want = resolved ? 4 : 5;
    if (f.size() != want) throw ParseError(source, n, "expected " + std::to_string(want) + " fields");
    std::size_t l = 0;
    if (!parse_int(f[0], l) || l != seq.size() + 1) {
      throw ParseError(source, n, "row number must be " + std::to_string(seq.size() + 1));
    }
    PulseSegment s;
    if (!parse_int(f[1], s.tau_us)) throw ParseError(source, n, "tau_us must be an integer");
    if (resolved) {
      if (!parse_centideg(f[2], s.phase_centideg)) throw ParseError(source, n, "phi_deg must have at most two decimals");
      if (!parse_int(f[3], s.delay_us)) throw ParseError(source, n, "delta_us must be an integer");
    } else {
      if (!parse_int(f[2], s.sign_bit)) throw ParseError(source, n, "sign must be 0 or 1");
      if (!parse_int(f[3], s.phase_centideg)) throw ParseError(source, n, "phi_centideg must be an integer");
      if (!parse_int(f[4], s.delay_us)) throw ParseError(source, n, "delta_us must be an integer");
    }
    try {
      validate_segment(s);
    } catch (const std::invalid_argument& e) {
      throw ParseError(source, n, e.what());
    }
    seq.segments.push_back(s);
  }
  if (!header_seen) throw ParseError(source, 0, "empty pulse sequence file");
  if (seq.empty()) throw ParseError(source, 0, "pulse sequence has no segments");
  return seq;
}

PulseSequence load_sequence(const std::string& path) { return parse_sequence(read_file(path), path); }

std::string format_sequence_csv(const PulseSequence& seq) {
  std::string out(kSequenceHeader);
  out += '\n';
  for (std::size_t i = 0; i < seq.size(); ++i) {
    const auto& s = seq.segments[i];
    out += std::to_string(i + 1) + "," + std::to_string(s.tau_us) + "," + std::to_string(s.sign_bit) + "," +
           std::to_string(s.phase_centideg) + "," + std::to_string(s.delay_us) + "\n";
  }
  return out;
}

std::string format_sequence_resolved(const PulseSequence& seq) {
  std::string out(kResolvedHeader);
  out += '\n';
  for (std::size_t i = 0; i < seq.size(); ++i) {
    const auto& s = seq.segments[i];
    const auto c = resolved_phase_centideg(s);
    char phase[32];
    std::snprintf(phase, sizeof phase, "%d.%02d", c / 100, c % 100);
    out += std::to_string(i + 1) + "," + std::to_string(s.tau_us) + "," + phase + "," + std::to_string(s.delay_us) +
           "\n";
  }
  return out;
}

std::string format_sequence_json(const PulseSequence& seq) {
  json j;
  j["schema"] = kSequenceSchema;
  j["segments"] = json::array();
  for (std::size_t i = 0; i < seq.size(); ++i) {
    const auto& s = seq.segments[i];
    j["segments"].push_back(
        {{"l", i + 1}, {"tau_us", s.tau_us}, {"sign", s.sign_bit}, {"phi_centideg", s.phase_centideg},
         {"delta_us", s.delay_us}});
  }
  return j.dump(2) + "\n";
}

// --- outputs ----------------------------------------------------------------

std::string format_run_record(const RunRecord& rec, bool timing) {
  std::string out = "generation,best_fitness,wall_ms,evals\n";
  char buf[128];
  for (const auto& g : rec.generations) {
    std::snprintf(buf, sizeof buf, "%lld,%.12f,%.3f,%lld\n", static_cast<long long>(g.generation), g.best_fitness,
                  timing ? g.wall_ms : 0.0, static_cast<long long>(g.evals));
    out += buf;
  }
  return out;
}

std::string format_grid_csv(const FidelityGrid& grid) {
  std::string out = "flip_deg\\offset_hz";
  for (double o : grid.offsets) out += "," + fmt_double(o);
  out += '\n';
  char buf[32];
  for (std::size_t i = 0; i < grid.flip_errors.size(); ++i) {
    out += fmt_double(grid.flip_errors[i]);
    for (std::size_t j = 0; j < grid.offsets.size(); ++j) {
      std::snprintf(buf, sizeof buf, ",%.6f", grid.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)));
      out += buf;
    }
    out += '\n';
  }
  return out;
}

}  // namespace pulsega::io
