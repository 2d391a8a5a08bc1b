#pragma once

#include <string_view>

#include "jcave/skeleton.hpp"

namespace jcave {

enum class Arm { Left, Right };
enum class ExerciseKind { ElbowFlexExt, ShoulderFlex };
enum class HandPhase { Down, Up };
enum class PoseClass { Down, Up, Invalid };

std::string_view to_string(Arm arm);
std::string_view to_string(ExerciseKind kind);
std::string_view to_string(PoseClass pose);

// Accepts the CLI spellings ("left"/"right", "elbow"/"shoulder").
Arm parse_arm(std::string_view text);
ExerciseKind parse_exercise(std::string_view text);

struct RuleConstants {
  double carrying_angle_deg = 15.0;  // A
  double k_offset = 0.2;             // metres the hand may rise above the shoulder
  int window_size = 100;             // frames allowed per timed segment
  int grace_frames = 5;              // consecutive invalid frames tolerated
  double boundary_epsilon = 0.0;     // reserved

  // Throws std::invalid_argument when a field is out of range.
  void validate() const;
};

struct ArmJoints {
  JointId shoulder;
  JointId elbow;
  JointId wrist;
  JointId hand;
};

ArmJoints joints_for(Arm arm);

struct ElbowGeometry {
  double tilt_deg = 0.0;      // C, upper-arm deviation from vertical
  double forearm_len = 0.0;   // hand to elbow distance
  double max_deflect = 0.0;   // M
};

/// Upper-arm tilt and the largest lateral hand offset the elbow exercise allows.
///
/// The tilt is atan(|dx| / |dy|) between shoulder and elbow, taken as 90 degrees
/// when the vertical separation vanishes. M is forearm_len * sin(A + C), capped at
/// forearm_len once A + C reaches 90 degrees. This equals |Elbow.Y - Y3| * tan(A + C)
/// for the construction point Y3 where the tilted forearm meets the deflection limit.
ElbowGeometry compute_elbow_geometry(const SkeletonFrame& frame, Arm arm, const RuleConstants& consts);

bool check_elbow_rules(const SkeletonFrame& frame, Arm arm, HandPhase phase, const RuleConstants& consts);
bool check_shoulder_rules(const SkeletonFrame& frame, Arm arm, HandPhase phase);

bool check_rules(const SkeletonFrame& frame, ExerciseKind exercise, Arm arm, HandPhase phase,
                 const RuleConstants& consts);

PoseClass classify_pose(const SkeletonFrame& frame, ExerciseKind exercise, Arm arm, const RuleConstants& consts);

}  // namespace jcave
