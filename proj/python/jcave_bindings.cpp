#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "jcave/game.hpp"
#include "jcave/recognizer.hpp"
#include "jcave/session.hpp"
#include "jcave/synth.hpp"

namespace py = pybind11;
using namespace jcave;

namespace {

py::object to_python(const nlohmann::json& j) { return py::module_::import("json").attr("loads")(j.dump()); }

RecognizerConfig recognizer_config(const std::string& exercise, const std::string& arm) {
  RecognizerConfig c;
  c.exercise = parse_exercise(exercise);
  c.arm = parse_arm(arm);
  return c;
}

}  // namespace

PYBIND11_MODULE(jcave, m) {
  m.doc() = "Repetition recognition and headless game sessions for arm rehabilitation exercises";

  m.def("jewel_value", &jewel_value, py::arg("index"), py::arg("size"));

  m.def(
      "evaluate_outcome",
      [](int nofer, int score, int n) { return std::string(to_string(evaluate_outcome(nofer, score, n))); },
      py::arg("nofer"), py::arg("collected_score"), py::arg("n"));

  m.def(
      "classify",
      [](const std::string& record, const std::string& exercise, const std::string& arm) {
        auto frames = parse_stream(record);
        if (frames.size() != 1) throw std::invalid_argument("expected exactly one stream record");
        auto c = recognizer_config(exercise, arm);
        return std::string(to_string(classify_pose(frames[0], c.exercise, c.arm, c.consts)));
      },
      py::arg("record"), py::arg("exercise") = "elbow", py::arg("arm") = "right");

  m.def(
      "synthesize",
      [](const std::string& exercise, const std::string& arm, int reps, std::array<double, 3> segments, double fps,
         double noise, std::uint64_t seed) {
        SynthSpec spec;
        spec.exercise = parse_exercise(exercise);
        spec.arm = parse_arm(arm);
        spec.repetitions = reps;
        spec.segment_durations = segments;
        spec.fps = fps;
        spec.noise_amp = noise;
        spec.seed = seed;
        return serialize_stream(synthesize(spec));
      },
      py::arg("exercise") = "elbow", py::arg("arm") = "right", py::arg("reps") = 1,
      py::arg("segments") = std::array<double, 3>{0.5, 1.5, 1.27}, py::arg("fps") = 30.0, py::arg("noise") = 0.0,
      py::arg("seed") = 0);

  m.def(
      "recognize",
      [](const std::string& stream, const std::string& exercise, const std::string& arm) {
        return to_python(recognize_report(recognizer_config(exercise, arm), parse_stream(stream)));
      },
      py::arg("stream"), py::arg("exercise") = "elbow", py::arg("arm") = "right");

  m.def(
      "simulate",
      [](const std::string& stream, const std::string& exercise, const std::string& arm, int n, std::uint64_t seed,
         const std::string& sublevel) {
        SessionConfig c;
        c.recognizer = recognizer_config(exercise, arm);
        c.repetitions_n = n;
        c.session_seed = seed;
        c.start = SubLevelId::parse(sublevel);
        return to_python(simulate_report(c, parse_stream(stream)));
      },
      py::arg("stream"), py::arg("exercise") = "elbow", py::arg("arm") = "right", py::arg("n") = 5,
      py::arg("seed") = 0, py::arg("sublevel") = "1-1");
}
