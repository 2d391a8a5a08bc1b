#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "jcave/rules.hpp"
#include "jcave/skeleton.hpp"

namespace jcave {

enum class Segment { Idle, AwaitUp, AwaitDownAgain };
enum class AbortReason { Timeout, InvalidMovement };

std::string_view to_string(Segment segment);
std::string_view to_string(AbortReason reason);

struct GestureEvent {
  enum class Kind { InProgress, Completed, Aborted };

  Kind kind = Kind::InProgress;
  AbortReason reason = AbortReason::Timeout;  // meaningful only for Aborted

  static GestureEvent in_progress() { return {}; }
  static GestureEvent completed() { return {Kind::Completed, AbortReason::Timeout}; }
  static GestureEvent aborted(AbortReason r) { return {Kind::Aborted, r}; }

  friend bool operator==(const GestureEvent&, const GestureEvent&) = default;
};

std::string_view to_string(const GestureEvent& event);

struct RecognizerConfig {
  ExerciseKind exercise = ExerciseKind::ElbowFlexExt;
  Arm arm = Arm::Right;
  RuleConstants consts{};
};

struct RecognizerState {
  Segment segment = Segment::Idle;
  int frames_in_segment = 0;
  int invalid_run = 0;

  friend bool operator==(const RecognizerState&, const RecognizerState&) = default;
};

// The Down -> Up -> Down repetition recogniser. Entering AwaitUp on a Down pose
// satisfies the first segment; the up and return segments are each bounded by
// window_size frames, and more than grace_frames consecutive Invalid poses abort.
class GestureRecognizer {
 public:
  // Throws std::invalid_argument if config.consts is out of range.
  explicit GestureRecognizer(RecognizerConfig config);
  GestureRecognizer(ExerciseKind exercise, Arm arm, RuleConstants consts);

  GestureEvent feed(const SkeletonFrame& frame);
  GestureEvent feed_pose(PoseClass pose);

  const RecognizerState& state() const noexcept { return state_; }
  const RecognizerConfig& config() const noexcept { return config_; }
  PoseClass last_pose() const noexcept { return last_pose_; }
  void reset() noexcept { state_ = {}; }

 private:
  GestureEvent hold(bool invalid);

  RecognizerConfig config_;
  RecognizerState state_{};
  PoseClass last_pose_ = PoseClass::Invalid;
};

struct IndexedEvent {
  std::size_t frame_index = 0;
  GestureEvent event;

  friend bool operator==(const IndexedEvent&, const IndexedEvent&) = default;
};

/// Feeds every frame and returns the Completed and Aborted events with their frame
/// index. Throws StreamError if timestamps do not strictly increase.
std::vector<IndexedEvent> run_stream(const RecognizerConfig& config, std::span<const SkeletonFrame> frames);

std::size_t count_completed(std::span<const IndexedEvent> events);

}  // namespace jcave
