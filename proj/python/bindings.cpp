#include <pybind11/eigen.h>
#include <pybind11/operators.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "pulsega/gates.hpp"
#include "pulsega/io.hpp"

namespace py = pybind11;
using namespace pulsega;

namespace {

PulseSequence sequence_from_rows(const std::vector<std::tuple<std::int64_t, int, std::int32_t, std::int64_t>>& rows) {
  PulseSequence seq;
  for (const auto& [tau, sign, phase, delay] : rows) seq.segments.push_back({tau, sign, phase, delay});
  return seq;
}

PulseSequence as_sequence(const py::object& obj) {
  if (py::isinstance<PulseSequence>(obj)) return obj.cast<PulseSequence>();
  return sequence_from_rows(obj.cast<std::vector<std::tuple<std::int64_t, int, std::int32_t, std::int64_t>>>());
}

py::dict run_to_dict(const RunRecord& rec) {
  py::dict d;
  d["best_fitness"] = *rec.best.fitness;
  d["sequence"] = rec.best.decode();
  d["accepted"] = rec.accepted;
  d["refined"] = rec.refined;
  d["evals"] = rec.evals;
  d["trace"] = rec.best_trace();
  return d;
}

}  // namespace

PYBIND11_MODULE(_pulsega, m) {
  m.doc() = "Hard-pulse sequence synthesis for coupled spin-1/2 systems";
  m.attr("__version__") = PULSEGA_VERSION;

  py::class_<SpinSystem>(m, "SpinSystem")
      .def(py::init<>())
      .def_readwrite("n_spins", &SpinSystem::n_spins)
      .def_readwrite("chemical_shifts", &SpinSystem::chemical_shifts)
      .def_readwrite("frame_freqs", &SpinSystem::frame_freqs)
      .def_readwrite("couplings", &SpinSystem::couplings)
      .def_readwrite("rf_amplitude", &SpinSystem::rf_amplitude)
      .def("validate", [](const SpinSystem& s) { s.validate(); })
      .def("__repr__", [](const SpinSystem& s) { return io::format_spin_system(s); });

  m.def("uncoupled_system", &make_uncoupled_system, py::arg("n_spins"), py::arg("rf_amplitude"));
  m.def("load_spin_system", &io::load_spin_system, py::arg("path"));
  m.def("parse_spin_system", [](const std::string& text) { return io::parse_spin_system(text); }, py::arg("text"));

  py::class_<PulseSegment>(m, "PulseSegment")
      .def(py::init<std::int64_t, int, std::int32_t, std::int64_t>(), py::arg("tau_us"), py::arg("sign_bit") = 0,
           py::arg("phase_centideg") = 0, py::arg("delay_us") = 0)
      .def_readwrite("tau_us", &PulseSegment::tau_us)
      .def_readwrite("sign_bit", &PulseSegment::sign_bit)
      .def_readwrite("phase_centideg", &PulseSegment::phase_centideg)
      .def_readwrite("delay_us", &PulseSegment::delay_us)
      .def(py::self == py::self)
      .def("__repr__", [](const PulseSegment& s) {
        return "PulseSegment(" + std::to_string(s.tau_us) + ", " + std::to_string(s.sign_bit) + ", " +
               std::to_string(s.phase_centideg) + ", " + std::to_string(s.delay_us) + ")";
      });

  py::class_<PulseSequence>(m, "PulseSequence")
      .def(py::init<>())
      .def(py::init(&sequence_from_rows), py::arg("rows"))
      .def_readwrite("segments", &PulseSequence::segments)
      .def("__len__", &PulseSequence::size)
      .def(py::self == py::self)
      .def("duration_us", [](const PulseSequence& s) { return total_duration(s); })
      .def("to_csv", &io::format_sequence_csv)
      .def("to_resolved_csv", &io::format_sequence_resolved)
      .def("to_json", &io::format_sequence_json);

  m.def("load_sequence", &io::load_sequence, py::arg("path"));
  m.def("parse_sequence", [](const std::string& text) { return io::parse_sequence(text); }, py::arg("text"));

  m.def("gate", [](const std::string& name, std::size_t n) { return build_gate(parse_gate(name), n).matrix(); },
        py::arg("name"), py::arg("n"));
  m.def("gate_catalog", &gate_catalog);

  m.def("propagator",
        [](const SpinSystem& sys, const py::object& seq) { return sequence_propagator(sys, as_sequence(seq)).matrix(); },
        py::arg("system"), py::arg("sequence"));
  m.def("gate_fidelity", py::overload_cast<const CMatrix&, const CMatrix&>(&gate_fidelity), py::arg("target"),
        py::arg("actual"));
  m.def(
      "evaluate",
      [](const SpinSystem& sys, const py::object& seq, const std::string& gate) {
        const PulseSequence s = as_sequence(seq);
        validate_sequence(s, sys);
        return gate_fidelity(build_gate(parse_gate(gate), sys.n_spins), sequence_propagator(sys, s));
      },
      py::arg("system"), py::arg("sequence"), py::arg("gate"));

  py::class_<GAConfig>(m, "GAConfig")
      .def(py::init<>())
      .def_readwrite("rows", &GAConfig::rows)
      .def_readwrite("population", &GAConfig::population)
      .def_readwrite("max_delay_us", &GAConfig::max_delay_us)
      .def_readwrite("budget_main_s", &GAConfig::budget_main_s)
      .def_readwrite("budget_local_s", &GAConfig::budget_local_s)
      .def_readwrite("max_generations", &GAConfig::max_generations)
      .def_readwrite("local_max_generations", &GAConfig::local_max_generations)
      .def_readwrite("accept_threshold", &GAConfig::accept_threshold)
      .def_readwrite("local_trigger", &GAConfig::local_trigger)
      .def_readwrite("crossover_rate", &GAConfig::crossover_rate)
      .def_readwrite("flip_rate", &GAConfig::flip_rate)
      .def_readwrite("seed", &GAConfig::seed)
      .def_readwrite("threads", &GAConfig::threads)
      .def("validate", &GAConfig::validate)
      .def_static("parse", [](const std::string& text) { return io::parse_ga_config(text, GAConfig{}); });

  m.def("default_population", &default_population, py::arg("rows"));
  m.def(
      "optimize",
      [](const SpinSystem& sys, const std::string& gate, const GAConfig& cfg) {
        const Unitary target = build_gate(parse_gate(gate), sys.n_spins);
        RunRecord rec;
        {
          py::gil_scoped_release release;
          rec = evolve(cfg, sys, target);
        }
        return run_to_dict(rec);
      },
      py::arg("system"), py::arg("gate"), py::arg("config"));

  py::enum_<FlipErrorModel>(m, "FlipErrorModel")
      .value("MULTIPLICATIVE", FlipErrorModel::Multiplicative)
      .value("ADDITIVE", FlipErrorModel::Additive);

  m.def(
      "scan",
      [](const SpinSystem& sys, const py::object& seq, const std::string& gate, std::tuple<double, double, double> flip,
         std::tuple<double, double, double> offset, FlipErrorModel model, int threads) {
        const Unitary target = build_gate(parse_gate(gate), sys.n_spins);
        const PulseSequence s = as_sequence(seq);
        const AxisRange fr{std::get<0>(flip), std::get<1>(flip), std::get<2>(flip)};
        const AxisRange orng{std::get<0>(offset), std::get<1>(offset), std::get<2>(offset)};
        FidelityGrid g;
        {
          py::gil_scoped_release release;
          g = scan(sys, s, target, fr, orng, model, threads);
        }
        py::dict d;
        d["flip_errors"] = g.flip_errors;
        d["offsets"] = g.offsets;
        d["values"] = g.values;
        return d;
      },
      py::arg("system"), py::arg("sequence"), py::arg("gate"), py::arg("flip"), py::arg("offset"),
      py::arg("model") = FlipErrorModel::Multiplicative, py::arg("threads") = 1);

  py::register_exception<io::ParseError>(m, "ParseError", PyExc_ValueError);
}
