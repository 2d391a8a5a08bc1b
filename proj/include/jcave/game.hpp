#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "jcave/recognizer.hpp"

namespace jcave {

// Playfield geometry. Only the extension step and its 200-step cap come from the
// hook algorithm itself; the rest is chosen so that wins stay attainable.
inline constexpr double kHookAnchorY = 2.5;
inline constexpr double kPendulumAmplitude = 1.0;
inline constexpr int kPendulumPeriodTicks = 120;
inline constexpr int kHookMaxSteps = 200;
inline constexpr double kHookStep = 0.01;
inline constexpr std::size_t kJewelsPerLayout = 8;
inline constexpr int kLevels = 2;
inline constexpr int kStagesPerLevel = 12;

struct SubLevelId {
  int level = 1;
  int stage = 1;

  auto operator<=>(const SubLevelId&) const = default;

  bool valid() const { return level >= 1 && level <= kLevels && stage >= 1 && stage <= kStagesPerLevel; }
  std::optional<SubLevelId> next() const;
  std::string to_string() const;  // "L-S"
  static SubLevelId parse(std::string_view text);
};

struct Jewel {
  int index = 0;  // jewel type, 0..5
  int size = 0;   // 0..2
  double x = 0.0;
  double y = 0.0;
  bool collected = false;

  friend bool operator==(const Jewel&, const Jewel&) = default;
};

/// Points for collecting a jewel: (size + 1) * 10 + index * 10.
/// Throws std::out_of_range unless index is in [0, 5] and size in [0, 2].
int jewel_value(int index, int size);

double hit_radius(int size);

/// Eight jewels for a sub-level. Level 1 layouts depend on the stage only; level 2
/// layouts also depend on session_seed. The summed value is always at least 200.
std::vector<Jewel> generate_layout(SubLevelId sublevel, std::uint64_t session_seed);

enum class HookPhase { Swinging, Extending, Retracting };
enum class Outcome { Ongoing, Won, Lost };

std::string_view to_string(HookPhase phase);
std::string_view to_string(Outcome outcome);

struct HookState {
  double anchor_x = 0.0;
  double anchor_y = kHookAnchorY;
  int steps = 0;  // extension in units of kHookStep
  HookPhase phase = HookPhase::Swinging;
  long tick = 0;  // pendulum clock, advances only while swinging

  double extension() const { return steps * kHookStep; }
  double tip_y() const { return anchor_y - extension(); }
};

Outcome evaluate_outcome(int nofer, int collected_score, int repetitions_n);

struct SessionState {
  std::string profile_id;
  int repetitions_n = 1;
  SubLevelId sublevel{};
  std::uint64_t session_seed = 0;
  std::vector<Jewel> jewels;
  HookState hook{};
  int collected_score = 0;
  int nofer = 0;
  int pending_drops = 0;
  Outcome outcome = Outcome::Ongoing;
  bool game_complete = false;
  std::vector<std::string> notes;

  int required_score() const { return repetitions_n * 10; }
};

struct DropResult {
  bool hit = false;
  int jewel = -1;  // layout index of the collected jewel
  int points = 0;
  double anchor_x = 0.0;
};

struct TickResult {
  std::optional<DropResult> resolved;  // set when a drop finished retracting
  bool decided = false;                // outcome left Ongoing on this tick
};

class GameSession {
 public:
  // Throws std::invalid_argument if repetitions_n < 1 or the sub-level is invalid.
  GameSession(std::string profile_id, int repetitions_n, SubLevelId sublevel, std::uint64_t session_seed);

  // Starts from an explicit jewel layout instead of the generated one.
  GameSession(std::string profile_id, int repetitions_n, SubLevelId sublevel, std::vector<Jewel> jewels);

  const SessionState& state() const noexcept { return state_; }

  // Completed queues a hook drop and counts the exercise; other events only leave a
  // note. Throws std::logic_error once the attempt is decided.
  void on_gesture_event(const GestureEvent& event);

  // One simulation step of the pendulum hook. Throws std::logic_error once decided.
  TickResult tick();

  // Moves to the next sub-level after a win or replays after a loss.
  // Throws std::logic_error while the attempt is still ongoing.
  void advance_after_outcome();

  std::optional<SubLevelId> highest_completed() const noexcept { return highest_completed_; }

 private:
  void reset_attempt();
  std::optional<int> find_hit() const;

  SessionState state_;
  std::optional<DropResult> current_drop_;
  std::optional<SubLevelId> highest_completed_;
  bool fixed_layout_ = false;
  std::vector<Jewel> initial_layout_;
};

}  // namespace jcave
