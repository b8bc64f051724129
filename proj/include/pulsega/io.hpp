#pragma once

#include <iosfwd>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>

#include <json.hpp>

#include "pulsega/ga.hpp"
#include "pulsega/robustness.hpp"

namespace pulsega::io {

/// Parse failure carrying the 1-based line it refers to (0 if none).
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& source, int line, const std::string& what);
  int line() const { return line_; }

 private:
  int line_;
};

struct KeyValue {
  std::string value;
  int line = 0;
};

/// `key = value` lines; `#` starts a comment, blank lines are skipped.
std::map<std::string, KeyValue> parse_key_values(std::string_view text, const std::string& source);

std::string read_file(const std::string& path);
void write_file(const std::string& path, std::string_view content);

// --- spin system ------------------------------------------------------------

/// Keys: n_spins, nu_hz, nu_rf_hz, j_hz (full matrix or upper-triangle list
/// J12, J13, ..., J23, ...), omega_rad_s.
SpinSystem parse_spin_system(std::string_view text, const std::string& source = "<system>");
SpinSystem load_spin_system(const std::string& path);
std::string format_spin_system(const SpinSystem& sys);

nlohmann::json to_json(const SpinSystem& sys);
SpinSystem spin_system_from_json(const nlohmann::json& j);

// --- GA configuration -------------------------------------------------------

/// Overlays the keys found in `text` onto `base`. Durations accept s, m, h.
GAConfig parse_ga_config(std::string_view text, GAConfig base, const std::string& source = "<config>");
GAConfig load_ga_config(const std::string& path, GAConfig base);

nlohmann::json to_json(const GAConfig& cfg);
GAConfig ga_config_from_json(const nlohmann::json& j);

/// "90", "90s", "1.5m", "2h" -> seconds.
double parse_duration(std::string_view text);

/// "lo:hi:step".
AxisRange parse_range(std::string_view text);

// --- pulse sequences --------------------------------------------------------

inline constexpr std::string_view kSequenceHeader = "l,tau_us,sign,phi_centideg,delta_us";
inline constexpr std::string_view kResolvedHeader = "l,tau_us,phi_deg,delta_us";
inline constexpr std::string_view kSequenceSchema = "pulsega.sequence/1";

/// Reads the 4-column CSV, the resolved-phase CSV, or the JSON form.
PulseSequence parse_sequence(std::string_view text, const std::string& source = "<sequence>");
PulseSequence load_sequence(const std::string& path);

std::string format_sequence_csv(const PulseSequence& seq);
std::string format_sequence_resolved(const PulseSequence& seq);
std::string format_sequence_json(const PulseSequence& seq);

// --- outputs ----------------------------------------------------------------

/// `generation,best_fitness,wall_ms,evals`. With `timing` false the wall_ms
/// column is written as 0 so that repeated runs are byte-identical.
std::string format_run_record(const RunRecord& rec, bool timing);

/// First row: offsets; first column: flip errors; body to 6 decimals.
std::string format_grid_csv(const FidelityGrid& grid);

}  // namespace pulsega::io
