#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "jcave/game.hpp"
#include "jcave/recognizer.hpp"
#include "jcave/skeleton.hpp"

namespace jcave {

struct RepetitionRecord {
  std::size_t entry_frame = 0;
  std::size_t up_frame = 0;
  std::size_t complete_frame = 0;
  std::size_t last_down_frame = 0;  // end of the down run the repetition finished in
  double up_segment_s = 0.0;        // entry until the first up frame
  double return_segment_s = 0.0;    // first up frame until the return to down
  double t_s = 0.0;                 // whole exercise, including the final down run
};

struct AbortRecord {
  std::size_t frame = 0;
  AbortReason reason = AbortReason::Timeout;
};

struct WarningSummary {
  std::size_t count = 0;
  std::size_t first_frame = 0;
};

// Observes a recogniser frame by frame and keeps what the reports need: repetition
// timings, aborts and placement warnings.
class RecognitionTracker {
 public:
  explicit RecognitionTracker(const RecognizerConfig& config);

  GestureEvent feed(const SkeletonFrame& frame);
  void finish();

  const GestureRecognizer& recognizer() const noexcept { return recognizer_; }
  std::size_t frames() const noexcept { return frame_count_; }
  const std::vector<RepetitionRecord>& repetitions() const noexcept { return reps_; }
  const std::vector<AbortRecord>& aborts() const noexcept { return aborts_; }
  const std::map<std::string, WarningSummary>& warnings() const noexcept { return warnings_; }

  nlohmann::json to_json() const;

 private:
  void close_open_rep();

  GestureRecognizer recognizer_;
  std::size_t frame_count_ = 0;
  std::vector<double> timestamps_;
  std::size_t entry_frame_ = 0;
  std::size_t up_frame_ = 0;
  bool rep_open_ = false;  // last repetition still extending through its down run
  std::vector<RepetitionRecord> reps_;
  std::vector<AbortRecord> aborts_;
  std::map<std::string, WarningSummary> warnings_;
};

/// Report for `recognize`: the recognition summary of one stream.
nlohmann::json recognize_report(const RecognizerConfig& config, std::span<const SkeletonFrame> frames);

struct SessionConfig {
  RecognizerConfig recognizer{};
  int repetitions_n = 5;
  SubLevelId start{};
  std::uint64_t session_seed = 0;
  std::string profile_id;  // empty for inline configs
};

struct AttemptRecord {
  SubLevelId sublevel{};
  Outcome outcome = Outcome::Ongoing;
  int score = 0;
  int nofer = 0;
  std::vector<DropResult> drops;
};

struct SessionStep {
  GestureEvent event;
  SessionState snapshot;              // game state after this step, before any advance
  std::optional<DropResult> resolved;
  std::optional<Outcome> decided;     // attempt outcome decided on this step
  bool advanced = false;              // a new attempt started after the decision
};

// Binds a recogniser to a game session on one clock: each frame is one recogniser
// step followed by one hook tick. Shared by the CLI and the live service so both
// produce the same report for the same input.
class SessionDriver {
 public:
  // Throws std::invalid_argument on an invalid configuration.
  explicit SessionDriver(SessionConfig config);

  const SessionConfig& config() const noexcept { return config_; }
  const GameSession& game() const noexcept { return game_; }
  const RecognitionTracker& tracker() const noexcept { return tracker_; }

  SessionStep process_frame(const SkeletonFrame& frame);

  // Ticks the hook without new frames until every queued drop has resolved.
  std::vector<SessionStep> settle();

  std::optional<SubLevelId> highest_completed() const noexcept { return game_.highest_completed(); }

  nlohmann::json report() const;

 private:
  SessionStep tick_and_resolve(SessionStep step);

  SessionConfig config_;
  RecognitionTracker tracker_;
  GameSession game_;
  std::vector<AttemptRecord> attempts_;  // last entry is the current attempt
  bool settled_ = false;
};

/// Report for `simulate`: frames drive the session, then queued drops settle.
nlohmann::json simulate_report(const SessionConfig& config, std::span<const SkeletonFrame> frames);

// Human-readable rendering of either report kind; numbers match the JSON exactly.
std::string render_text(const nlohmann::json& report);

nlohmann::json constants_to_json(const RuleConstants& consts);

}  // namespace jcave
