// Prints one PASS/FAIL line per acceptance criterion and exits nonzero if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>

#include "cli.hpp"
#include "drive.hpp"
#include "jcave/game.hpp"
#include "jcave/profile_store.hpp"
#include "jcave/recognizer.hpp"
#include "jcave/rules.hpp"
#include "jcave/session.hpp"
#include "jcave/synth.hpp"
#include "oracles.hpp"

using namespace jcave;
using nlohmann::json;

namespace {

struct Verdict {
  bool ok = true;
  std::string detail;
};

int failures = 0;

void criterion(int id, const char* name, double limit_s, const std::function<Verdict()>& body) {
  auto start = std::chrono::steady_clock::now();
  Verdict v;
  try {
    v = body();
  } catch (const std::exception& e) {
    v = {false, std::string("exception: ") + e.what()};
  }
  double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  bool in_time = elapsed < limit_s;
  bool pass = v.ok && in_time;
  if (!pass) ++failures;
  std::printf("%s criterion %d: %s (%.3f s of %.0f s)%s%s\n", pass ? "PASS" : "FAIL", id, name, elapsed, limit_s,
              v.detail.empty() ? "" : " | ", v.detail.c_str());
  if (!in_time) std::printf("     time limit exceeded\n");
  std::fflush(stdout);
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

Verdict scoring_table() {
  int bad = 0;
  for (int i = 0; i < 6; ++i) {
    for (int s = 0; s < 3; ++s) bad += jewel_value(i, s) != oracle::kJewelTable[i][s];
  }
  return {bad == 0, fmt("%d of 18 cells differ", bad)};
}

Verdict win_lose_grid() {
  long cases = 0, bad = 0;
  for (int n = 1; n <= 20; ++n) {
    for (int nofer = 0; nofer <= 2 * n; ++nofer) {
      for (int score = 0; score <= 1600; score += 10) {
        ++cases;
        auto want = oracle::win_or_lose(score, n, nofer);
        auto got = evaluate_outcome(nofer, score, n);
        bool same = (want == oracle::WinOrLose::Win && got == Outcome::Won) ||
                    (want == oracle::WinOrLose::Lose && got == Outcome::Lost) ||
                    (want == oracle::WinOrLose::Neither && got == Outcome::Ongoing);
        bad += !same;
      }
    }
  }
  return {bad == 0, fmt("%ld cases, %ld disagreements", cases, bad)};
}

Verdict rule_oracle() {
  const RuleConstants consts{};
  long cases = 0, bad = 0, accepted = 0;
  std::uint64_t seed = 1;
  for (auto exercise : {ExerciseKind::ElbowFlexExt, ExerciseKind::ShoulderFlex}) {
    for (auto arm : {Arm::Right, Arm::Left}) {
      for (auto phase : {HandPhase::Down, HandPhase::Up}) {
        oracle::FrameGen gen(seed++);
        const bool right = arm == Arm::Right;
        const bool up = phase == HandPhase::Up;
        for (int i = 0; i < 10000; ++i) {
          auto f = gen.next();
          auto s = oracle::sample(f, right);
          bool want = exercise == ExerciseKind::ElbowFlexExt
                          ? oracle::elbow_table(s, right, up, consts.carrying_angle_deg, consts.k_offset)
                          : oracle::shoulder_table(s, right, up);
          bool got = exercise == ExerciseKind::ElbowFlexExt ? check_elbow_rules(f, arm, phase, consts)
                                                            : check_shoulder_rules(f, arm, phase);
          ++cases;
          bad += want != got;
          accepted += got;
        }
      }
    }
  }
  return {bad == 0, fmt("%ld cases, %ld accepted, %ld disagreements", cases, accepted, bad)};
}

Verdict mirror_symmetry() {
  std::mt19937_64 rng(20240611);
  auto u = [&](double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); };
  auto pick = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
  int bad = 0;
  long events = 0, completed = 0;
  for (int i = 0; i < 1000; ++i) {
    SynthSpec spec;
    spec.exercise = pick(0, 1) ? ExerciseKind::ElbowFlexExt : ExerciseKind::ShoulderFlex;
    spec.arm = pick(0, 1) ? Arm::Right : Arm::Left;
    spec.repetitions = pick(1, 3);
    spec.segment_durations = {u(0.1, 4.0), u(0.1, 4.0), u(0.1, 4.0)};
    spec.noise_amp = pick(0, 1) ? u(0.0, 0.03) : 0.0;
    spec.seed = rng();
    if (pick(0, 3) == 0) {
      const auto count = static_cast<int>(synth_timeline(spec).frame_count);
      const int first = pick(0, count - 1);
      const int last = std::min(count - 1, first + pick(0, 12));
      spec.defects.push_back(Defect::too_wide_x(static_cast<std::size_t>(first), static_cast<std::size_t>(last)));
    }
    auto frames = synthesize(spec);
    for (auto arm : {Arm::Right, Arm::Left}) {
      RecognizerConfig c{spec.exercise, arm, {}};
      RecognizerConfig m{spec.exercise, arm == Arm::Right ? Arm::Left : Arm::Right, {}};
      auto a = run_stream(c, frames);
      auto b = run_stream(m, mirror_stream(frames));
      bad += a != b;
      events += static_cast<long>(a.size());
      completed += static_cast<long>(count_completed(a));
    }
  }
  return {bad == 0, fmt("2000 stream/arm pairs, %ld events, %ld completions, %d mismatches", events, completed, bad)};
}

Verdict timing_window() {
  // Sweep one segment at a time; the others stay at 15 / 45 / 38 frames.
  const double fps = 30.0;
  const std::array<int, 3> base{15, 45, 38};
  const char* names[3] = {"down-hold", "up", "return"};
  std::array<int, 3> mismatched{}, over{}, total{};
  int short_fail = 0;
  for (auto exercise : {ExerciseKind::ElbowFlexExt, ExerciseKind::ShoulderFlex}) {
    for (auto arm : {Arm::Right, Arm::Left}) {
      for (int seg = 0; seg < 3; ++seg) {
        for (int len = 3; len <= 140; ++len) {
          auto frames_per = base;
          frames_per[seg] = len;
          SynthSpec spec;
          spec.exercise = exercise;
          spec.arm = arm;
          spec.fps = fps;
          for (int k = 0; k < 3; ++k) spec.segment_durations[k] = frames_per[k] / fps;
          auto tl = synth_timeline(spec);
          const auto& r = tl.reps.at(0);
          std::array<std::size_t, 3> got{r.up_begin - r.down_begin, r.return_begin - r.up_begin, r.end - r.return_begin};
          for (int k = 0; k < 3; ++k) {
            if (got[k] != static_cast<std::size_t>(frames_per[k])) {
              throw std::runtime_error(fmt("synth produced %zu frames for a %d-frame segment", got[k], frames_per[k]));
            }
          }
          bool within = len <= 100;
          auto events = run_stream({exercise, arm, {}}, synthesize(spec));
          bool completed = count_completed(events) == 1;
          ++total[seg];
          if (!within) ++over[seg];
          if (completed != within) {
            ++mismatched[seg];
            if (within) ++short_fail;
          }
        }
      }
    }
  }

  // Anchor: one correct 3.27 s elbow repetition.
  auto anchor = recognize_report({}, synthesize(SynthSpec{}));
  const auto& reps = anchor["recognition"]["reps"];
  bool anchor_ok = reps.size() == 1 && reps[0]["status"] == "Succeeded" &&
                   std::fabs(reps[0]["t_s"].get<double>() - 3.27) < 0.005;
  double anchor_t = reps.empty() ? 0.0 : reps[0]["t_s"].get<double>();

  // A 120-frame up segment is aborted and never completes.
  SynthSpec slow;
  slow.segment_durations = {0.5, 120 / fps, 1.27};
  auto slow_events = run_stream({}, synthesize(slow));
  bool slow_ok = count_completed(slow_events) == 0 &&
                 std::any_of(slow_events.begin(), slow_events.end(), [](const IndexedEvent& e) {
                   return e.event == GestureEvent::aborted(AbortReason::Timeout);
                 });

  std::string detail = fmt("anchor t=%.2f %s; 120-frame up %s", anchor_t, anchor_ok ? "Succeeded" : "wrong",
                           slow_ok ? "aborted" : "not aborted");
  int all_bad = 0;
  for (int seg = 0; seg < 3; ++seg) {
    detail += fmt("; %s >100 completed %d/%d", names[seg], mismatched[seg], over[seg]);
    all_bad += mismatched[seg];
  }
  detail += fmt("; <=100 failed %d", short_fail);
  return {all_bad == 0 && anchor_ok && slow_ok, detail};
}

// Runs one drop on a lone jewel at depth `depth` below the anchor and reports
// (hit, max steps reached, score).
std::tuple<bool, int, int> single_drop(double depth) {
  GameSession g("", 1, {1, 1}, std::vector<Jewel>{{2, 1, 0.0, kHookAnchorY - depth, false}});
  g.on_gesture_event(GestureEvent::completed());
  int max_steps = 0;
  for (int t = 0; t < 1000; ++t) {
    auto r = g.tick();
    max_steps = std::max(max_steps, g.state().hook.steps);
    if (r.resolved) return {r.resolved->hit, max_steps, g.state().collected_score};
  }
  throw std::runtime_error("drop never resolved");
}

Verdict hook_mechanics() {
  auto [hit19, steps19, score19] = single_drop(1.9);
  auto [hit21, steps21, score21] = single_drop(2.1);
  double max_ext = steps21 * kHookStep;
  bool ok = hit19 && !hit21 && steps21 == kHookMaxSteps && std::fabs(max_ext - 2.0) < 1e-12 &&
            score19 == jewel_value(2, 1) && score21 == 0 && steps19 == 190;
  return {ok, fmt("max extension %.2f; 1.9 %s (score %d); 2.1 %s (score %d)", max_ext, hit19 ? "hit" : "missed",
                  score19, hit21 ? "hit" : "missed", score21)};
}

struct WorstCaseRun {
  std::vector<DropResult> drops;
  Outcome outcome = Outcome::Ongoing;
  int nofer_at_decision = -1;
  int score = 0;
  int completions = 0;
};

// Frame clock shared by recogniser and game, as in a live session, on a fixed layout.
WorstCaseRun play_fixed_layout(const std::vector<SkeletonFrame>& frames, const std::vector<Jewel>& layout, int n) {
  GestureRecognizer rec(RecognizerConfig{});
  GameSession g("", n, {1, 1}, layout);
  WorstCaseRun out;
  auto step = [&](const GestureEvent* ev) {
    if (g.state().outcome != Outcome::Ongoing) return;
    if (ev) {
      if (ev->kind == GestureEvent::Kind::Completed) ++out.completions;
      g.on_gesture_event(*ev);
    }
    auto r = g.tick();
    if (r.resolved) out.drops.push_back(*r.resolved);
    if (r.decided) out.nofer_at_decision = g.state().nofer;
  };
  for (const auto& f : frames) {
    auto ev = rec.feed(f);
    step(&ev);
  }
  for (int t = 0; t < 100000 && g.state().outcome == Outcome::Ongoing && g.state().pending_drops > 0; ++t) step(nullptr);
  out.outcome = g.state().outcome;
  out.score = g.state().collected_score;
  return out;
}

Verdict worst_case() {
  const int n = 5;
  SynthSpec spec;
  spec.repetitions = n;
  auto frames = synthesize(spec);
  // Minimum-value jewels (index 0, size 0) under the anchor of each drop. Hits and
  // misses take different times, so iterate until the layout matches the anchors.
  std::vector<double> anchors(kJewelsPerLayout, 0.0);
  WorstCaseRun run;
  for (int iter = 0; iter < 10; ++iter) {
    std::vector<Jewel> layout;
    for (std::size_t i = 0; i < kJewelsPerLayout; ++i) {
      layout.push_back({0, 0, anchors[std::min(i, anchors.size() - 1)], 0.6, false});
    }
    run = play_fixed_layout(frames, layout, n);
    bool all_hit = run.drops.size() == static_cast<std::size_t>(n) &&
                   std::all_of(run.drops.begin(), run.drops.end(), [](const DropResult& d) { return d.hit; });
    if (all_hit) break;
    for (std::size_t i = 0; i < run.drops.size() && i < anchors.size(); ++i) anchors[i] = run.drops[i].anchor_x;
  }
  bool all_min = std::all_of(run.drops.begin(), run.drops.end(),
                             [](const DropResult& d) { return d.hit && d.points == oracle::kJewelTable[0][0]; });
  bool ok = run.completions == n && run.drops.size() == static_cast<std::size_t>(n) && all_min &&
            run.outcome == Outcome::Won && run.nofer_at_decision == n && run.score == 50;
  return {ok, fmt("%zu drops, all minimum hits: %s, outcome %s at Nofer %d, score %d", run.drops.size(),
                  all_min ? "yes" : "no", std::string(to_string(run.outcome)).c_str(), run.nofer_at_decision,
                  run.score)};
}

Verdict service_cli_equivalence() {
  std::random_device rd;
  auto dir = std::filesystem::temp_directory_path() / ("jcave-accept-" + std::to_string(rd()));
  std::filesystem::create_directories(dir);
  std::mt19937_64 rng(77);
  auto pick = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
  int same = 0, decided = 0;
  std::string first_diff;
  for (int i = 0; i < 20; ++i) {
    SynthSpec spec;
    spec.exercise = i % 2 ? ExerciseKind::ShoulderFlex : ExerciseKind::ElbowFlexExt;
    spec.arm = (i / 2) % 2 ? Arm::Left : Arm::Right;
    const int n = pick(1, 4);
    spec.repetitions = pick(1, 2 * n + 1);
    spec.noise_amp = 0.004 * pick(0, 2);
    spec.seed = rng();
    if (i % 5 == 4) spec.defects.push_back(Defect::stall_in_up(4.0, 0));
    auto frames = synthesize(spec);
    const auto seed = static_cast<std::uint64_t>(pick(0, 1000));
    const std::string sublevel = fmt("%d-%d", pick(1, 2), pick(1, 12));
    const std::string exercise(to_string(spec.exercise));
    const std::string arm(to_string(spec.arm));

    ServiceConnection conn;
    auto t = drive::run(conn, drive::start_inline(exercise, arm, n, seed, sublevel), frames);
    std::string service = t.report.dump(2) + "\n";

    auto path = (dir / fmt("s%02d.txt", i)).string();
    write_stream_file(path, frames);
    std::ostringstream out, err;
    int code = cli::run({"simulate", "--stream", path, "--exercise", exercise, "--arm", arm, "--n", std::to_string(n),
                         "--seed", std::to_string(seed), "--sublevel", sublevel, "--format", "machine"},
                        out, err);
    if (code == 0 && out.str() == service) {
      ++same;
    } else if (first_diff.empty()) {
      first_diff = fmt("stream %d differs (exit %d)", i, code);
    }
    for (const auto& a : t.report["attempts"]) decided += a["outcome"] != "ongoing";
  }
  std::filesystem::remove_all(dir);
  return {same == 20, fmt("%d/20 byte-identical, %d decided attempts%s%s", same, decided,
                          first_diff.empty() ? "" : "; ", first_diff.c_str())};
}

Verdict round_trips() {
  std::mt19937_64 rng(9);
  auto u = [&](double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); };
  int stream_bad = 0;
  for (int s = 0; s < 50; ++s) {
    std::vector<SkeletonFrame> frames;
    double t = u(0.0, 10.0);
    for (int i = 0; i < 40; ++i) {
      SkeletonFrame f;
      t += u(1e-6, 0.1);
      f.timestamp = t;
      for (auto id : all_joints()) f[id] = {u(-2, 2), u(-2, 2), u(0, 4)};
      frames.push_back(f);
    }
    stream_bad += parse_stream(serialize_stream(frames)) != frames;
  }

  std::random_device rd;
  auto path = std::filesystem::temp_directory_path() / ("jcave-accept-store-" + std::to_string(rd()) + ".json");
  int store_bad = 0;
  {
    ProfileStore store(path);
    for (int i = 0; i < 30; ++i) {
      ProfileFields f{fmt("player %d", i), static_cast<int>(u(5, 15)),
                      u(0, 1) < 0.5 ? ExerciseKind::ElbowFlexExt : ExerciseKind::ShoulderFlex,
                      u(0, 1) < 0.5 ? Arm::Left : Arm::Right, static_cast<int>(u(1, 10))};
      auto p = store.create(f);
      if (i % 3 == 0) store.record_progress(p.id, {1 + i % 2, 1 + i % 12});
    }
    auto before = store.list();
    ProfileStore reopened(path);
    store_bad += reopened.list() != before;
    for (const auto& p : before) store_bad += reopened.get(p.id) != p;
  }
  std::filesystem::remove(path);
  std::filesystem::remove(path.string() + ".lock");

  int synth_bad = 0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    SynthSpec spec;
    spec.repetitions = 2;
    spec.noise_amp = 0.01;
    spec.seed = seed;
    spec.defects.push_back(Defect::too_wide_x(20, 25));
    synth_bad += serialize_stream(synthesize(spec)) != serialize_stream(synthesize(spec));
    auto other = spec;
    other.seed = seed + 100;
    synth_bad += synthesize(spec) == synthesize(other);
  }
  return {stream_bad == 0 && store_bad == 0 && synth_bad == 0,
          fmt("stream %d, store %d, synth %d failures", stream_bad, store_bad, synth_bad)};
}

}  // namespace

int main() {
  criterion(1, "scoring table", 1, scoring_table);
  criterion(2, "win/lose oracle grid", 5, win_lose_grid);
  criterion(3, "rule engine vs table transcription", 10, rule_oracle);
  criterion(4, "mirror symmetry", 30, mirror_symmetry);
  criterion(5, "timing window", 10, timing_window);
  criterion(6, "hook mechanics", 1, hook_mechanics);
  criterion(7, "end-to-end worst case", 5, worst_case);
  criterion(8, "service/CLI equivalence", 60, service_cli_equivalence);
  criterion(9, "round-trips", 5, round_trips);
  std::printf("%d of 9 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
