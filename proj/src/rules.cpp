#include "jcave/rules.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace jcave {

namespace {

constexpr double kDegToRad = std::numbers::pi / 180.0;

}  // namespace

std::string_view to_string(Arm arm) { return arm == Arm::Left ? "left" : "right"; }

std::string_view to_string(ExerciseKind kind) {
  return kind == ExerciseKind::ElbowFlexExt ? "elbow" : "shoulder";
}

std::string_view to_string(PoseClass pose) {
  switch (pose) {
    case PoseClass::Down: return "down";
    case PoseClass::Up: return "up";
    case PoseClass::Invalid: return "invalid";
  }
  return "?";
}

Arm parse_arm(std::string_view text) {
  if (text == "left") return Arm::Left;
  if (text == "right") return Arm::Right;
  throw std::invalid_argument("unknown arm '" + std::string(text) + "' (expected left|right)");
}

ExerciseKind parse_exercise(std::string_view text) {
  if (text == "elbow") return ExerciseKind::ElbowFlexExt;
  if (text == "shoulder") return ExerciseKind::ShoulderFlex;
  throw std::invalid_argument("unknown exercise '" + std::string(text) + "' (expected elbow|shoulder)");
}

void RuleConstants::validate() const {
  if (!(carrying_angle_deg > 0.0 && carrying_angle_deg < 45.0)) {
    throw std::invalid_argument("carrying angle must lie in (0, 45) degrees");
  }
  if (!(k_offset > 0.0)) {
    throw std::invalid_argument("k offset must be positive");
  }
  if (window_size < 1) {
    throw std::invalid_argument("window size must be at least 1 frame");
  }
  if (grace_frames < 0) {
    throw std::invalid_argument("grace frames must be non-negative");
  }
  if (!(boundary_epsilon >= 0.0)) {
    throw std::invalid_argument("boundary epsilon must be non-negative");
  }
}

ArmJoints joints_for(Arm arm) {
  if (arm == Arm::Right) {
    return {JointId::ShoulderRight, JointId::ElbowRight, JointId::WristRight, JointId::HandRight};
  }
  return {JointId::ShoulderLeft, JointId::ElbowLeft, JointId::WristLeft, JointId::HandLeft};
}

ElbowGeometry compute_elbow_geometry(const SkeletonFrame& frame, Arm arm, const RuleConstants& consts) {
  auto j = joints_for(arm);
  const Vec3& shoulder = frame[j.shoulder];
  const Vec3& elbow = frame[j.elbow];
  const Vec3& hand = frame[j.hand];

  ElbowGeometry g;
  double dx = std::abs(shoulder.x - elbow.x);
  double dy = std::abs(shoulder.y - elbow.y);
  g.tilt_deg = dy == 0.0 ? 90.0 : std::atan2(dx, dy) / kDegToRad;
  g.forearm_len = norm(hand - elbow);

  double total = consts.carrying_angle_deg + g.tilt_deg;
  g.max_deflect = total < 90.0 ? g.forearm_len * std::sin(total * kDegToRad) : g.forearm_len;
  return g;
}

bool check_elbow_rules(const SkeletonFrame& frame, Arm arm, HandPhase phase, const RuleConstants& consts) {
  auto j = joints_for(arm);
  const Vec3& shoulder = frame[j.shoulder];
  const Vec3& elbow = frame[j.elbow];
  const Vec3& hand = frame[j.hand];
  const double m = compute_elbow_geometry(frame, arm, consts).max_deflect;

  // The permitted lateral window opens outward with the hand down and inward with
  // the hand up; outward is +x for the right arm.
  const bool outward = (phase == HandPhase::Down) == (arm == Arm::Right);
  const bool x_ok = outward ? (elbow.x <= hand.x && hand.x <= elbow.x + m)
                            : (elbow.x - m <= hand.x && hand.x <= elbow.x);

  if (phase == HandPhase::Down) {
    return x_ok && hand.y < elbow.y && hand.z <= elbow.z;
  }
  return hand.y > elbow.y && x_ok && elbow.z <= shoulder.z && hand.y <= shoulder.y + consts.k_offset;
}

bool check_shoulder_rules(const SkeletonFrame& frame, Arm arm, HandPhase phase) {
  auto j = joints_for(arm);
  const Vec3& shoulder = frame[j.shoulder];
  const Vec3& elbow = frame[j.elbow];
  const Vec3& hand = frame[j.hand];

  const bool x_ok = arm == Arm::Right
                        ? (hand.x >= elbow.x && hand.x >= shoulder.x && elbow.x >= shoulder.x)
                        : (hand.x <= elbow.x && hand.x <= shoulder.x && elbow.x <= shoulder.x);
  const bool y_ok = phase == HandPhase::Down
                        ? (hand.y <= elbow.y && hand.y <= shoulder.y && elbow.y <= shoulder.y)
                        : (hand.y > elbow.y && hand.y > shoulder.y && elbow.y > shoulder.y);
  return x_ok && y_ok && hand.z >= elbow.z;
}

bool check_rules(const SkeletonFrame& frame, ExerciseKind exercise, Arm arm, HandPhase phase,
                 const RuleConstants& consts) {
  return exercise == ExerciseKind::ElbowFlexExt ? check_elbow_rules(frame, arm, phase, consts)
                                                : check_shoulder_rules(frame, arm, phase);
}

PoseClass classify_pose(const SkeletonFrame& frame, ExerciseKind exercise, Arm arm, const RuleConstants& consts) {
  if (check_rules(frame, exercise, arm, HandPhase::Down, consts)) {
    return PoseClass::Down;
  }
  if (check_rules(frame, exercise, arm, HandPhase::Up, consts)) {
    return PoseClass::Up;
  }
  return PoseClass::Invalid;
}

}  // namespace jcave
