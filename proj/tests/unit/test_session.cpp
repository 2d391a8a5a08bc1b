#include <doctest.h>

#include "jcave/session.hpp"
#include "jcave/synth.hpp"
#include "oracles.hpp"

using namespace jcave;
using nlohmann::json;

namespace {

std::vector<SkeletonFrame> reps(int n, std::array<double, 3> durations = {0.5, 1.5, 1.27}) {
  SynthSpec spec;
  spec.repetitions = n;
  spec.segment_durations = durations;
  return synthesize(spec);
}

SessionConfig session(int n, SubLevelId start = {1, 1}, std::uint64_t seed = 0) {
  SessionConfig c;
  c.repetitions_n = n;
  c.start = start;
  c.session_seed = seed;
  return c;
}

// Recomputes an attempt's score from its drops and the layout it was played on.
int score_from_drops(const json& attempt, const std::vector<Jewel>& layout) {
  int total = 0;
  for (const auto& d : attempt["drops"]) {
    if (d["hit"].get<bool>()) {
      const auto& j = layout.at(d["jewel"].get<std::size_t>());
      total += oracle::kJewelTable[j.index][j.size];
      CHECK(d["points"] == oracle::kJewelTable[j.index][j.size]);
    } else {
      CHECK(d["points"] == 0);
    }
  }
  return total;
}

}  // namespace

TEST_CASE("recognize report for one 3.27 s repetition") {
  auto report = recognize_report(RecognizerConfig{}, reps(1));
  const auto& rec = report["recognition"];
  CHECK(rec["frames"] == 98);
  CHECK(rec["repetitions"] == 1);
  REQUIRE(rec["reps"].size() == 1);
  CHECK(rec["reps"][0]["status"] == "Succeeded");
  CHECK(rec["reps"][0]["t_s"].get<double>() == doctest::Approx(3.27).epsilon(0.005));
  CHECK(rec["reps"][0]["t_s"] == 3.267);
  CHECK(rec["reps"][0]["up_segment_s"] == 0.5);
  CHECK(rec["reps"][0]["return_segment_s"] == 1.5);
  CHECK(rec["aborts"].empty());
  CHECK(rec["warnings"].empty());
  CHECK(report["constants"]["window_size"] == 100);
}

TEST_CASE("recognize report edge cases") {
  auto empty = recognize_report(RecognizerConfig{}, std::vector<SkeletonFrame>{});
  CHECK(empty["recognition"]["frames"] == 0);
  CHECK(empty["recognition"]["repetitions"] == 0);
  CHECK(empty["recognition"]["aborts"].empty());

  auto slow = recognize_report(RecognizerConfig{}, reps(1, {0.5, 4.0, 1.27}));
  CHECK(slow["recognition"]["repetitions"] == 0);
  REQUIRE(slow["recognition"]["aborts"].size() == 1);
  CHECK(slow["recognition"]["aborts"][0]["reason"] == "timeout");

  auto frames = reps(1);
  for (auto& f : frames) f[JointId::HipCenter].z = 2.0;
  auto far = recognize_report(RecognizerConfig{}, frames);
  REQUIRE(far["recognition"]["warnings"].size() == 1);
  CHECK(far["recognition"]["warnings"][0]["code"] == "distance-recommended");
  CHECK(far["recognition"]["warnings"][0]["count"] == 98);
  // Placement warnings never change recognition.
  CHECK(far["recognition"]["repetitions"] == 1);

  std::swap(frames[1], frames[2]);
  CHECK_THROWS_AS(recognize_report(RecognizerConfig{}, frames), StreamError);
}

TEST_CASE("text rendering carries the same numbers") {
  auto report = recognize_report(RecognizerConfig{}, reps(1));
  auto text = render_text(report);
  CHECK(text.find("repetitions recognized: 1") != std::string::npos);
  CHECK(text.find("3.267") != std::string::npos);
  CHECK(text.find("Succeeded") != std::string::npos);
}

TEST_CASE("three correct repetitions over reachable jewels win") {
  auto config = session(3, {1, 4});
  auto report = simulate_report(config, reps(3));
  CHECK(report["outcome"] == "won");
  CHECK(report["nofer"] == 3);
  CHECK(report["score"].get<int>() >= 30);
  CHECK(report["sublevel"] == "1-4");
  CHECK(report["sublevel_reached"] == "1-5");
  const auto& first = report["attempts"][0];
  CHECK(score_from_drops(first, generate_layout({1, 4}, 0)) == first["score"].get<int>());
  CHECK(oracle::win_or_lose(first["score"], 3, first["nofer"]) == oracle::WinOrLose::Win);
}

TEST_CASE("six repetitions that all miss lose") {
  auto report = simulate_report(session(3, {1, 1}), reps(6));
  CHECK(report["outcome"] == "lost");
  CHECK(report["nofer"] == 6);
  CHECK(report["score"] == 0);
  const auto& first = report["attempts"][0];
  CHECK(first["drops"].size() == 6);
  for (const auto& d : first["drops"]) CHECK_FALSE(d["hit"].get<bool>());
  // The loss restarts the same sub-level.
  CHECK(report["sublevel_reached"] == "1-1");
  CHECK(report["attempts"].size() == 2);
}

TEST_CASE("stream ending before N exercises is ongoing") {
  auto report = simulate_report(session(3, {1, 4}), reps(2));
  CHECK(report["outcome"] == "ongoing");
  CHECK(report["nofer"] == 2);
  CHECK(report["attempts"].size() == 1);
  CHECK(report["attempts"][0]["drops"].size() == 2);
}

TEST_CASE("reports are reproducible and outcomes follow the literal procedure") {
  for (std::uint64_t seed = 0; seed < 12; ++seed) {
    for (int n : {1, 2, 3}) {
      auto config = session(n, {2, 1 + static_cast<int>(seed % 12)}, seed);
      auto frames = reps(2 * n);
      auto a = simulate_report(config, frames);
      CHECK(a.dump() == simulate_report(config, frames).dump());
      for (const auto& attempt : a["attempts"]) {
        auto expected = oracle::win_or_lose(attempt["score"], n, attempt["nofer"]);
        auto outcome = attempt["outcome"].get<std::string>();
        if (outcome == "won") CHECK(expected == oracle::WinOrLose::Win);
        if (outcome == "lost") CHECK(expected == oracle::WinOrLose::Lose);
      }
    }
  }
}

TEST_CASE("driver steps and settling") {
  SessionDriver driver(session(1, {1, 4}));
  int completed = 0;
  for (const auto& f : reps(1)) {
    auto step = driver.process_frame(f);
    if (step.event.kind == GestureEvent::Kind::Completed) ++completed;
  }
  CHECK(completed == 1);
  CHECK(driver.game().state().pending_drops == 1);
  auto steps = driver.settle();
  CHECK_FALSE(steps.empty());
  CHECK(steps.back().resolved.has_value());
  CHECK(driver.game().state().pending_drops == 0);
  CHECK_THROWS_AS(driver.process_frame(neutral_pose(100.0)), std::logic_error);
}

TEST_CASE("invalid session configs are rejected") {
  CHECK_THROWS_AS(SessionDriver(session(0)), std::invalid_argument);
  auto c = session(1);
  c.recognizer.consts.window_size = 0;
  CHECK_THROWS_AS(SessionDriver{c}, std::invalid_argument);
}
