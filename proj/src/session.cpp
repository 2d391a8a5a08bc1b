#include "jcave/session.hpp"

#include <cmath>
#include <iomanip>
#include <sstream>
#include <stdexcept>

namespace jcave {

using nlohmann::json;

namespace {

double round_milli(double v) { return std::round(v * 1000.0) / 1000.0; }

json drop_to_json(const DropResult& d) {
  json j;
  j["hit"] = d.hit;
  j["jewel"] = d.hit ? json(d.jewel) : json(nullptr);
  j["points"] = d.points;
  j["anchor_x"] = round_milli(d.anchor_x);
  return j;
}

json attempt_to_json(const AttemptRecord& a) {
  json j;
  j["sublevel"] = a.sublevel.to_string();
  j["outcome"] = std::string(to_string(a.outcome));
  j["score"] = a.score;
  j["nofer"] = a.nofer;
  j["drops"] = json::array();
  for (const auto& d : a.drops) {
    j["drops"].push_back(drop_to_json(d));
  }
  return j;
}

std::string fmt_seconds(const json& v) {
  std::ostringstream out;
  out << std::fixed << std::setprecision(3) << v.get<double>();
  return out.str();
}

}  // namespace

json constants_to_json(const RuleConstants& c) {
  json j;
  j["carrying_angle_deg"] = c.carrying_angle_deg;
  j["k_offset"] = c.k_offset;
  j["window_size"] = c.window_size;
  j["grace_frames"] = c.grace_frames;
  return j;
}

RecognitionTracker::RecognitionTracker(const RecognizerConfig& config) : recognizer_(config) {}

GestureEvent RecognitionTracker::feed(const SkeletonFrame& frame) {
  const std::size_t i = frame_count_++;
  timestamps_.push_back(frame.timestamp);

  auto validation = validate_frame(frame);
  for (const auto& note : validation.notes) {
    auto [it, inserted] = warnings_.try_emplace(note, WarningSummary{0, i});
    it->second.count += 1;
  }

  const Segment before = recognizer_.state().segment;
  const GestureEvent ev = recognizer_.feed(frame);
  const Segment after = recognizer_.state().segment;

  if (rep_open_) {
    if (recognizer_.last_pose() == PoseClass::Down) {
      reps_.back().last_down_frame = i;
    } else {
      close_open_rep();
    }
  }

  if (before == Segment::Idle && after == Segment::AwaitUp) {
    entry_frame_ = i;
  } else if (before == Segment::AwaitUp && after == Segment::AwaitDownAgain) {
    up_frame_ = i;
  }

  if (ev.kind == GestureEvent::Kind::Completed) {
    close_open_rep();
    RepetitionRecord rec;
    rec.entry_frame = entry_frame_;
    rec.up_frame = up_frame_;
    rec.complete_frame = i;
    rec.last_down_frame = i;
    reps_.push_back(rec);
    rep_open_ = true;
  } else if (ev.kind == GestureEvent::Kind::Aborted) {
    aborts_.push_back({i, ev.reason});
  }
  return ev;
}

void RecognitionTracker::close_open_rep() {
  if (!rep_open_) {
    return;
  }
  rep_open_ = false;
  auto& rec = reps_.back();
  const auto ts = [&](std::size_t k) { return timestamps_[k]; };
  const double period = rec.last_down_frame > 0 ? ts(rec.last_down_frame) - ts(rec.last_down_frame - 1) : 0.0;
  rec.up_segment_s = round_milli(ts(rec.up_frame) - ts(rec.entry_frame));
  rec.return_segment_s = round_milli(ts(rec.complete_frame) - ts(rec.up_frame));
  rec.t_s = round_milli(ts(rec.last_down_frame) - ts(rec.entry_frame) + period);
}

void RecognitionTracker::finish() { close_open_rep(); }

json RecognitionTracker::to_json() const {
  RecognitionTracker done = *this;
  done.finish();

  json j;
  j["frames"] = done.frame_count_;
  j["duration_s"] =
      done.timestamps_.size() > 1 ? round_milli(done.timestamps_.back() - done.timestamps_.front()) : 0.0;
  j["repetitions"] = done.reps_.size();
  j["reps"] = json::array();
  for (std::size_t k = 0; k < done.reps_.size(); ++k) {
    const auto& r = done.reps_[k];
    json rep;
    rep["index"] = k + 1;
    rep["status"] = "Succeeded";
    rep["entry_frame"] = r.entry_frame;
    rep["up_frame"] = r.up_frame;
    rep["complete_frame"] = r.complete_frame;
    rep["up_segment_s"] = r.up_segment_s;
    rep["return_segment_s"] = r.return_segment_s;
    rep["t_s"] = r.t_s;
    j["reps"].push_back(rep);
  }
  j["aborts"] = json::array();
  for (const auto& a : done.aborts_) {
    j["aborts"].push_back({{"frame", a.frame}, {"reason", std::string(to_string(a.reason))}});
  }
  j["warnings"] = json::array();
  for (const auto& [code, w] : done.warnings_) {
    j["warnings"].push_back({{"code", code}, {"count", w.count}, {"first_frame", w.first_frame}});
  }
  return j;
}

json recognize_report(const RecognizerConfig& config, std::span<const SkeletonFrame> frames) {
  RecognitionTracker tracker(config);
  for (std::size_t i = 0; i < frames.size(); ++i) {
    if (i > 0 && frames[i].timestamp <= frames[i - 1].timestamp) {
      throw StreamError(0, "frame " + std::to_string(i) + ": timestamp does not increase");
    }
    tracker.feed(frames[i]);
  }
  json j;
  j["command"] = "recognize";
  j["exercise"] = std::string(to_string(config.exercise));
  j["arm"] = std::string(to_string(config.arm));
  j["constants"] = constants_to_json(config.consts);
  j["recognition"] = tracker.to_json();
  return j;
}

SessionDriver::SessionDriver(SessionConfig config)
    : config_(std::move(config)),
      tracker_(config_.recognizer),
      game_(config_.profile_id, config_.repetitions_n, config_.start, config_.session_seed) {
  attempts_.push_back(AttemptRecord{config_.start, Outcome::Ongoing, 0, 0, {}});
}

SessionStep SessionDriver::process_frame(const SkeletonFrame& frame) {
  if (settled_) {
    throw std::logic_error("session already settled");
  }
  SessionStep step;
  step.event = tracker_.feed(frame);
  if (game_.state().game_complete) {
    step.snapshot = game_.state();
    return step;
  }
  if (step.event.kind != GestureEvent::Kind::InProgress) {
    game_.on_gesture_event(step.event);
  }
  return tick_and_resolve(std::move(step));
}

SessionStep SessionDriver::tick_and_resolve(SessionStep step) {
  auto result = game_.tick();
  auto& current = attempts_.back();
  if (result.resolved) {
    current.drops.push_back(*result.resolved);
    step.resolved = result.resolved;
  }
  current.score = game_.state().collected_score;
  current.nofer = game_.state().nofer;
  step.snapshot = game_.state();

  if (result.decided) {
    current.outcome = game_.state().outcome;
    step.decided = current.outcome;
    game_.advance_after_outcome();
    if (!game_.state().game_complete) {
      attempts_.push_back(AttemptRecord{game_.state().sublevel, Outcome::Ongoing, 0, 0, {}});
      step.advanced = true;
    }
  }
  return step;
}

std::vector<SessionStep> SessionDriver::settle() {
  std::vector<SessionStep> steps;
  settled_ = true;
  // Each queued drop needs at most one swing tick plus a 400-tick extend/retract cycle.
  const long budget = (2L * config_.repetitions_n + 2) * (2L * kHookMaxSteps + 2);
  for (long n = 0; n < budget; ++n) {
    const auto& st = game_.state();
    if (st.game_complete || st.outcome != Outcome::Ongoing) break;
    if (st.pending_drops == 0 && st.hook.phase == HookPhase::Swinging) break;
    steps.push_back(tick_and_resolve({}));
  }
  return steps;
}

json SessionDriver::report() const {
  json j;
  j["command"] = "simulate";
  j["exercise"] = std::string(to_string(config_.recognizer.exercise));
  j["arm"] = std::string(to_string(config_.recognizer.arm));
  j["constants"] = constants_to_json(config_.recognizer.consts);
  j["n"] = config_.repetitions_n;
  j["required_score"] = config_.repetitions_n * 10;
  j["start_sublevel"] = config_.start.to_string();
  j["session_seed"] = config_.session_seed;
  if (!config_.profile_id.empty()) {
    j["profile_id"] = config_.profile_id;
  }
  j["recognition"] = tracker_.to_json();

  j["attempts"] = json::array();
  const AttemptRecord* reference = &attempts_.back();
  for (const auto& a : attempts_) {
    j["attempts"].push_back(attempt_to_json(a));
    if (a.outcome != Outcome::Ongoing) {
      reference = &a;
    }
  }
  // Headline numbers: the latest decided attempt, or the open one if none was decided.
  j["outcome"] = std::string(to_string(reference->outcome));
  j["score"] = reference->score;
  j["nofer"] = reference->nofer;
  j["sublevel"] = reference->sublevel.to_string();
  j["sublevel_reached"] = game_.state().sublevel.to_string();
  j["game_complete"] = game_.state().game_complete;
  return j;
}

json simulate_report(const SessionConfig& config, std::span<const SkeletonFrame> frames) {
  SessionDriver driver(config);
  for (std::size_t i = 0; i < frames.size(); ++i) {
    if (i > 0 && frames[i].timestamp <= frames[i - 1].timestamp) {
      throw StreamError(0, "frame " + std::to_string(i) + ": timestamp does not increase");
    }
    driver.process_frame(frames[i]);
  }
  driver.settle();
  return driver.report();
}

std::string render_text(const json& report) {
  std::ostringstream out;
  const auto& rec = report.at("recognition");
  out << "exercise " << report.at("exercise").get<std::string>() << ", arm " << report.at("arm").get<std::string>()
      << ", window " << report.at("constants").at("window_size") << " frames, grace "
      << report.at("constants").at("grace_frames") << "\n";
  out << "frames " << rec.at("frames") << ", duration " << fmt_seconds(rec.at("duration_s")) << " s\n";
  out << "repetitions recognized: " << rec.at("repetitions") << "\n";
  if (!rec.at("reps").empty()) {
    out << "  #   t (s)    up (s)   return (s)  status\n";
    for (const auto& r : rec.at("reps")) {
      out << "  " << std::left << std::setw(4) << r.at("index").get<int>() << std::setw(9)
          << fmt_seconds(r.at("t_s")) << std::setw(9) << fmt_seconds(r.at("up_segment_s")) << std::setw(12)
          << fmt_seconds(r.at("return_segment_s")) << r.at("status").get<std::string>() << "\n";
    }
  }
  out << "aborts: " << rec.at("aborts").size() << "\n";
  for (const auto& a : rec.at("aborts")) {
    out << "  frame " << a.at("frame") << ": " << a.at("reason").get<std::string>() << "\n";
  }
  for (const auto& w : rec.at("warnings")) {
    out << "warning " << w.at("code").get<std::string>() << ": " << w.at("count") << " frames (first at frame "
        << w.at("first_frame") << ")\n";
  }

  if (report.at("command") == "simulate") {
    out << "N " << report.at("n") << ", required score " << report.at("required_score") << ", start "
        << report.at("start_sublevel").get<std::string>() << ", seed " << report.at("session_seed") << "\n";
    for (const auto& a : report.at("attempts")) {
      std::size_t hits = 0;
      for (const auto& d : a.at("drops")) {
        hits += d.at("hit").get<bool>() ? 1 : 0;
      }
      out << "attempt " << a.at("sublevel").get<std::string>() << ": " << a.at("outcome").get<std::string>()
          << ", score " << a.at("score") << ", Nofer " << a.at("nofer") << ", drops " << a.at("drops").size()
          << " (" << hits << " hit)\n";
    }
    out << "outcome " << report.at("outcome").get<std::string>() << ", score " << report.at("score") << ", Nofer "
        << report.at("nofer") << ", sub-level " << report.at("sublevel").get<std::string>() << ", reached "
        << report.at("sublevel_reached").get<std::string>()
        << (report.at("game_complete").get<bool>() ? " (game complete)" : "") << "\n";
  }
  return out.str();
}

}  // namespace jcave
