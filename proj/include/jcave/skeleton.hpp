#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace jcave {

// The twenty joints of the Kinect v1 skeleton.
enum class JointId : std::uint8_t {
  HipCenter,
  Spine,
  ShoulderCenter,
  Head,
  ShoulderLeft,
  ElbowLeft,
  WristLeft,
  HandLeft,
  ShoulderRight,
  ElbowRight,
  WristRight,
  HandRight,
  HipLeft,
  KneeLeft,
  AnkleLeft,
  FootLeft,
  HipRight,
  KneeRight,
  AnkleRight,
  FootRight,
};

inline constexpr std::size_t kJointCount = 20;

std::string_view joint_name(JointId id);
std::optional<JointId> joint_from_name(std::string_view name);

/// Left joints map to their right counterpart and vice versa; centre joints map to themselves.
JointId mirror_joint(JointId id);

constexpr std::array<JointId, kJointCount> all_joints() {
  std::array<JointId, kJointCount> ids{};
  for (std::size_t i = 0; i < kJointCount; ++i) {
    ids[i] = static_cast<JointId>(i);
  }
  return ids;
}

struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  friend bool operator==(const Vec3&, const Vec3&) = default;
};

Vec3 operator+(Vec3 a, Vec3 b);
Vec3 operator-(Vec3 a, Vec3 b);
Vec3 operator*(double s, Vec3 v);
double norm(Vec3 v);

// One timestamped skeleton sample in the analysis frame:
// +y up, +z from the sensor toward the user, +x toward the user's right.
struct SkeletonFrame {
  double timestamp = 0.0;
  std::array<Vec3, kJointCount> joints{};

  Vec3& operator[](JointId id) { return joints[static_cast<std::size_t>(id)]; }
  const Vec3& operator[](JointId id) const { return joints[static_cast<std::size_t>(id)]; }

  friend bool operator==(const SkeletonFrame&, const SkeletonFrame&) = default;
};

struct FrameValidation {
  enum class Status { Ok, Warn, Reject };

  Status status = Status::Ok;
  std::vector<std::string> notes;
};

std::string_view to_string(FrameValidation::Status status);

// Raised for malformed stream input. line() is 1-based; 0 when not tied to a line.
class StreamError : public std::runtime_error {
 public:
  StreamError(std::size_t line, const std::string& message);

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// Parses the line-delimited skeleton stream format.
///
/// Each record is `t=<seconds> <Joint>=<x>,<y>,<z> ...` carrying all twenty
/// joints in any order. Blank lines and lines starting with `#` are skipped.
/// Throws StreamError on a malformed record, a missing or duplicated joint, a
/// non-finite value, or a timestamp that does not strictly increase.
std::vector<SkeletonFrame> parse_stream(std::string_view text);

std::vector<SkeletonFrame> read_stream_file(const std::string& path);

// Shortest round-trip decimal form, so parse(serialize(frames)) == frames.
std::string serialize_frame(const SkeletonFrame& frame);
std::string serialize_stream(std::span<const SkeletonFrame> frames);

void write_stream_file(const std::string& path, std::span<const SkeletonFrame> frames);

// Placement advisories. HipCenter depth outside the sensor range warns "distance";
// inside the range but away from the recommended 1.4 m band warns "distance-recommended".
inline constexpr double kSensorMinDepth = 0.8;
inline constexpr double kSensorMaxDepth = 4.0;
inline constexpr double kRecommendedMinDepth = 1.3;
inline constexpr double kRecommendedMaxDepth = 1.5;

FrameValidation validate_frame(const SkeletonFrame& frame);

SkeletonFrame mirror_frame(const SkeletonFrame& frame);
std::vector<SkeletonFrame> mirror_stream(std::span<const SkeletonFrame> frames);

}  // namespace jcave
