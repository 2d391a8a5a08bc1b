#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "jcave/rules.hpp"
#include "jcave/skeleton.hpp"

namespace jcave {

struct Defect {
  enum class Kind {
    TooWideX,         // hand leaves the permitted lateral window
    OverheadBeyondK,  // elbow exercise only: hand lifted past shoulder height + k
    StallInUp,        // up segment of one repetition held longer
  };

  Kind kind = Kind::TooWideX;
  std::size_t first_frame = 0;  // inclusive, range defects only
  std::size_t last_frame = 0;   // inclusive, range defects only
  int repetition = 0;           // StallInUp only
  double stall_seconds = 0.0;   // StallInUp only

  static Defect too_wide_x(std::size_t first, std::size_t last) { return {Kind::TooWideX, first, last, 0, 0.0}; }
  static Defect overhead_beyond_k(std::size_t first, std::size_t last) {
    return {Kind::OverheadBeyondK, first, last, 0, 0.0};
  }
  static Defect stall_in_up(double seconds, int repetition = 0) {
    return {Kind::StallInUp, 0, 0, repetition, seconds};
  }
};

struct BodyScale {
  double upper_arm = 0.28;
  double forearm = 0.25;
};

struct SynthSpec {
  ExerciseKind exercise = ExerciseKind::ElbowFlexExt;
  Arm arm = Arm::Right;
  double fps = 30.0;
  // Seconds spent in (down hold, up, down return). The down hold ends with the arm
  // just below horizontal, the up segment covers everything above it, and the
  // return starts just below horizontal and settles back at rest.
  std::array<double, 3> segment_durations{0.5, 1.5, 1.27};
  int repetitions = 1;
  BodyScale body{};
  double noise_amp = 0.0;
  std::vector<Defect> defects;
  std::uint64_t seed = 0;
  double start_time = 0.0;

  // Throws std::invalid_argument for out-of-range fields or contradictory defects.
  void validate() const;
};

struct SynthTimeline {
  struct Rep {
    std::size_t down_begin = 0;
    std::size_t up_begin = 0;
    std::size_t return_begin = 0;
    std::size_t end = 0;  // one past the last frame

    std::size_t up_frames() const { return return_begin - up_begin; }
  };

  std::vector<Rep> reps;
  std::size_t frame_count = 0;
};

// Frame counts per segment, without the stall defect's frames applied.
SynthTimeline synth_timeline(const SynthSpec& spec);

/// Generates the skeleton stream these synth parameters describe. The shoulder stays fixed; the elbow
/// exercise swings the forearm about the elbow inside the carrying-angle cone and
/// the shoulder exercise raises the straight arm about the shoulder. All other
/// joints hold a standing pose with HipCenter 1.4 m from the sensor.
std::vector<SkeletonFrame> synthesize(const SynthSpec& spec);

/// The pose each frame was generated to show, derived from the timeline and the
/// defect list alone, never from the rule engine.
std::vector<PoseClass> classify_synth_frames(const SynthSpec& spec);

SkeletonFrame neutral_pose(double timestamp);

}  // namespace jcave
