#include "jcave/recognizer.hpp"

#include <algorithm>

namespace jcave {

std::string_view to_string(Segment segment) {
  switch (segment) {
    case Segment::Idle: return "idle";
    case Segment::AwaitUp: return "await-up";
    case Segment::AwaitDownAgain: return "await-down-again";
  }
  return "?";
}

std::string_view to_string(AbortReason reason) {
  return reason == AbortReason::Timeout ? "timeout" : "invalid-movement";
}

std::string_view to_string(const GestureEvent& event) {
  switch (event.kind) {
    case GestureEvent::Kind::InProgress: return "in-progress";
    case GestureEvent::Kind::Completed: return "completed";
    case GestureEvent::Kind::Aborted: return to_string(event.reason);
  }
  return "?";
}

GestureRecognizer::GestureRecognizer(RecognizerConfig config) : config_(config) {
  config_.consts.validate();
}

GestureRecognizer::GestureRecognizer(ExerciseKind exercise, Arm arm, RuleConstants consts)
    : GestureRecognizer(RecognizerConfig{exercise, arm, consts}) {}

GestureEvent GestureRecognizer::feed(const SkeletonFrame& frame) {
  return feed_pose(classify_pose(frame, config_.exercise, config_.arm, config_.consts));
}

GestureEvent GestureRecognizer::feed_pose(PoseClass pose) {
  last_pose_ = pose;
  switch (state_.segment) {
    case Segment::Idle:
      if (pose == PoseClass::Down) {
        state_ = {Segment::AwaitUp, 0, 0};
      }
      return GestureEvent::in_progress();

    case Segment::AwaitUp:
      if (pose == PoseClass::Up) {
        state_ = {Segment::AwaitDownAgain, 0, 0};
        return GestureEvent::in_progress();
      }
      return hold(pose == PoseClass::Invalid);

    case Segment::AwaitDownAgain:
      if (pose == PoseClass::Down) {
        state_ = {};
        return GestureEvent::completed();
      }
      return hold(pose == PoseClass::Invalid);
  }
  return GestureEvent::in_progress();
}

GestureEvent GestureRecognizer::hold(bool invalid) {
  state_.invalid_run = invalid ? state_.invalid_run + 1 : 0;
  state_.frames_in_segment += 1;
  if (state_.invalid_run > config_.consts.grace_frames) {
    state_ = {};
    return GestureEvent::aborted(AbortReason::InvalidMovement);
  }
  if (state_.frames_in_segment >= config_.consts.window_size) {
    state_ = {};
    return GestureEvent::aborted(AbortReason::Timeout);
  }
  return GestureEvent::in_progress();
}

std::vector<IndexedEvent> run_stream(const RecognizerConfig& config, std::span<const SkeletonFrame> frames) {
  GestureRecognizer recognizer(config);
  std::vector<IndexedEvent> events;
  for (std::size_t i = 0; i < frames.size(); ++i) {
    if (i > 0 && frames[i].timestamp <= frames[i - 1].timestamp) {
      throw StreamError(0, "frame " + std::to_string(i) + ": timestamp does not increase");
    }
    auto ev = recognizer.feed(frames[i]);
    if (ev.kind != GestureEvent::Kind::InProgress) {
      events.push_back({i, ev});
    }
  }
  return events;
}

std::size_t count_completed(std::span<const IndexedEvent> events) {
  return static_cast<std::size_t>(std::count_if(events.begin(), events.end(), [](const IndexedEvent& e) {
    return e.event.kind == GestureEvent::Kind::Completed;
  }));
}

}  // namespace jcave
