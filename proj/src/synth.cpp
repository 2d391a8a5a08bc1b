#include "jcave/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "rng.hpp"

namespace jcave {

namespace {

constexpr double kDeg = std::numbers::pi / 180.0;
constexpr double kHorizontalDeg = 90.0;
constexpr double kCrossingMarginDeg = 3.0;
constexpr double kElbowTopDeg = 140.0;
constexpr double kShoulderTopDeg = 160.0;
constexpr double kForearmCarryDeg = 10.0;  // inside the 15 degree carrying cone
constexpr double kShoulderAbductDeg = 5.0;
constexpr double kDefaultK = 0.2;

double ease(double x) {
  x = std::clamp(x, 0.0, 1.0);
  return 0.5 * (1.0 - std::cos(std::numbers::pi * x));
}

std::size_t frames_for(double seconds, double fps) {
  return std::max<std::size_t>(1, static_cast<std::size_t>(std::lround(seconds * fps)));
}

double side_sign(Arm arm) { return arm == Arm::Right ? 1.0 : -1.0; }

struct SegmentPos {
  int segment = 0;  // 0 down hold, 1 up, 2 return
  std::size_t index = 0;
  std::size_t length = 0;
  std::size_t base_length = 0;  // up segment without stall frames
};

// Angle from hanging (0) through horizontal (90) to the top of the motion.
double arm_angle(const SegmentPos& pos, double top) {
  const double below = kHorizontalDeg - kCrossingMarginDeg;
  const double above = kHorizontalDeg + kCrossingMarginDeg;
  switch (pos.segment) {
    case 0: {
      double tau = static_cast<double>(pos.index + 1) / static_cast<double>(pos.length);
      return below * ease((tau - 0.6) / 0.4);
    }
    case 1: {
      std::size_t stall = pos.length - pos.base_length;
      std::size_t half = pos.base_length / 2;
      std::size_t i = pos.index;
      if (i >= half && i < half + stall) {
        return top;
      }
      if (i >= half + stall) {
        i -= stall;
      }
      double tau = pos.base_length > 1 ? static_cast<double>(i) / static_cast<double>(pos.base_length - 1) : 0.5;
      double p = tau < 0.35 ? ease(tau / 0.35) : tau > 0.65 ? ease((1.0 - tau) / 0.35) : 1.0;
      return above + (top - above) * p;
    }
    default: {
      double tau = pos.length > 1 ? static_cast<double>(pos.index) / static_cast<double>(pos.length - 1) : 1.0;
      return below * (1.0 - ease(tau / 0.4));
    }
  }
}

void place_resting_arm(SkeletonFrame& f, Arm arm, const BodyScale& body) {
  auto j = joints_for(arm);
  const double s = side_sign(arm);
  const Vec3 shoulder = f[j.shoulder];
  const Vec3 elbow = shoulder + Vec3{0.0, -body.upper_arm, 0.0};
  const Vec3 dir{s * std::sin(kForearmCarryDeg * kDeg), -std::cos(kForearmCarryDeg * kDeg), 0.0};
  f[j.elbow] = elbow;
  f[j.wrist] = elbow + (0.8 * body.forearm) * dir;
  f[j.hand] = elbow + body.forearm * dir;
}

}  // namespace

void SynthSpec::validate() const {
  if (!(fps > 0.0) || !std::isfinite(fps)) {
    throw std::invalid_argument("fps must be positive");
  }
  for (double d : segment_durations) {
    if (!(d > 0.0) || !std::isfinite(d)) {
      throw std::invalid_argument("segment durations must be positive");
    }
  }
  if (repetitions < 1) {
    throw std::invalid_argument("repetitions must be at least 1");
  }
  if (!(body.upper_arm > 0.0) || !(body.forearm > 0.0)) {
    throw std::invalid_argument("body scale must be positive");
  }
  if (!(noise_amp >= 0.0)) {
    throw std::invalid_argument("noise amplitude must be non-negative");
  }
  if (!(start_time >= 0.0)) {
    throw std::invalid_argument("start time must be non-negative");
  }

  for (const auto& d : defects) {
    if (d.kind == Defect::Kind::StallInUp) {
      if (!(d.stall_seconds > 0.0) || d.repetition < 0 || d.repetition >= repetitions) {
        throw std::invalid_argument("stall defect needs a positive duration and a valid repetition");
      }
      continue;
    }
    if (d.kind == Defect::Kind::OverheadBeyondK && exercise != ExerciseKind::ElbowFlexExt) {
      throw std::invalid_argument("overhead-beyond-k applies to the elbow exercise only");
    }
    if (d.first_frame > d.last_frame) {
      throw std::invalid_argument("defect frame range is reversed");
    }
  }

  const auto frame_count = synth_timeline(*this).frame_count;
  for (std::size_t a = 0; a < defects.size(); ++a) {
    const auto& da = defects[a];
    if (da.kind == Defect::Kind::StallInUp) continue;
    if (da.last_frame >= frame_count) {
      throw std::invalid_argument("defect frame range exceeds the stream (" + std::to_string(frame_count) +
                                  " frames)");
    }
    for (std::size_t b = a + 1; b < defects.size(); ++b) {
      const auto& db = defects[b];
      if (db.kind == Defect::Kind::StallInUp) continue;
      if (da.first_frame <= db.last_frame && db.first_frame <= da.last_frame) {
        throw std::invalid_argument("defect frame ranges overlap");
      }
    }
  }
}

SynthTimeline synth_timeline(const SynthSpec& spec) {
  SynthTimeline tl;
  std::size_t cursor = 0;
  const auto n1 = frames_for(spec.segment_durations[0], spec.fps);
  const auto n2 = frames_for(spec.segment_durations[1], spec.fps);
  const auto n3 = frames_for(spec.segment_durations[2], spec.fps);
  for (int r = 0; r < spec.repetitions; ++r) {
    std::size_t stall = 0;
    for (const auto& d : spec.defects) {
      if (d.kind == Defect::Kind::StallInUp && d.repetition == r) {
        stall += static_cast<std::size_t>(std::lround(d.stall_seconds * spec.fps));
      }
    }
    SynthTimeline::Rep rep;
    rep.down_begin = cursor;
    rep.up_begin = rep.down_begin + n1;
    rep.return_begin = rep.up_begin + n2 + stall;
    rep.end = rep.return_begin + n3;
    cursor = rep.end;
    tl.reps.push_back(rep);
  }
  tl.frame_count = cursor;
  return tl;
}

SkeletonFrame neutral_pose(double timestamp) {
  SkeletonFrame f;
  f.timestamp = timestamp;
  constexpr double z = 1.4;
  f[JointId::HipCenter] = {0.0, 0.10, z};
  f[JointId::Spine] = {0.0, 0.20, z};
  f[JointId::ShoulderCenter] = {0.0, 0.45, z};
  f[JointId::Head] = {0.0, 0.62, z};
  f[JointId::ShoulderLeft] = {-0.16, 0.42, z};
  f[JointId::ShoulderRight] = {0.16, 0.42, z};
  f[JointId::HipLeft] = {-0.09, 0.05, z};
  f[JointId::HipRight] = {0.09, 0.05, z};
  f[JointId::KneeLeft] = {-0.10, -0.35, z - 0.02};
  f[JointId::KneeRight] = {0.10, -0.35, z - 0.02};
  f[JointId::AnkleLeft] = {-0.10, -0.75, z};
  f[JointId::AnkleRight] = {0.10, -0.75, z};
  f[JointId::FootLeft] = {-0.11, -0.80, z - 0.08};
  f[JointId::FootRight] = {0.11, -0.80, z - 0.08};
  BodyScale body;
  place_resting_arm(f, Arm::Left, body);
  place_resting_arm(f, Arm::Right, body);
  return f;
}

std::vector<SkeletonFrame> synthesize(const SynthSpec& spec) {
  spec.validate();
  const auto tl = synth_timeline(spec);
  const auto j = joints_for(spec.arm);
  const double s = side_sign(spec.arm);
  const bool elbow_ex = spec.exercise == ExerciseKind::ElbowFlexExt;
  const double top = elbow_ex ? kElbowTopDeg : kShoulderTopDeg;
  const auto base_up = frames_for(spec.segment_durations[1], spec.fps);

  detail::SplitMix64 noise(detail::mix_seed({0x5EED, spec.seed}));

  std::vector<SkeletonFrame> frames;
  frames.reserve(tl.frame_count);
  for (const auto& rep : tl.reps) {
    for (std::size_t i = rep.down_begin; i < rep.end; ++i) {
      SegmentPos pos;
      if (i < rep.up_begin) {
        pos = {0, i - rep.down_begin, rep.up_begin - rep.down_begin, 0};
      } else if (i < rep.return_begin) {
        pos = {1, i - rep.up_begin, rep.return_begin - rep.up_begin, base_up};
      } else {
        pos = {2, i - rep.return_begin, rep.end - rep.return_begin, 0};
      }
      const double angle = arm_angle(pos, top) * kDeg;

      SkeletonFrame f = neutral_pose(spec.start_time + static_cast<double>(i) / spec.fps);
      place_resting_arm(f, spec.arm == Arm::Right ? Arm::Left : Arm::Right, spec.body);
      const Vec3 shoulder = f[j.shoulder];

      Vec3 elbow;
      Vec3 forearm_dir;
      if (elbow_ex) {
        // Upper arm hangs vertically; the forearm rotates forward (towards the
        // sensor, -z) from its carried rest direction.
        elbow = shoulder + Vec3{0.0, -spec.body.upper_arm, 0.0};
        const Vec3 rest{s * std::sin(kForearmCarryDeg * kDeg), -std::cos(kForearmCarryDeg * kDeg), 0.0};
        const Vec3 forward{0.0, 0.0, -1.0};
        forearm_dir = std::cos(angle) * rest + std::sin(angle) * forward;
      } else {
        const double ca = std::cos(kShoulderAbductDeg * kDeg);
        const Vec3 dir{s * std::sin(kShoulderAbductDeg * kDeg), -std::cos(angle) * ca, std::sin(angle) * ca};
        elbow = shoulder + spec.body.upper_arm * dir;
        forearm_dir = dir;
      }
      f[j.elbow] = elbow;
      f[j.wrist] = elbow + (0.8 * spec.body.forearm) * forearm_dir;
      f[j.hand] = elbow + spec.body.forearm * forearm_dir;

      for (const auto& d : spec.defects) {
        if (d.kind == Defect::Kind::StallInUp || i < d.first_frame || i > d.last_frame) continue;
        if (d.kind == Defect::Kind::TooWideX) {
          if (elbow_ex) {
            f[j.hand].x += s * spec.body.forearm;
          } else {
            f[j.hand].x = f[j.elbow].x - s * 0.10;
          }
        } else {
          f[j.hand].y = shoulder.y + kDefaultK + 0.15;
        }
      }

      if (spec.noise_amp > 0.0) {
        for (auto& p : f.joints) {
          p.x += noise.uniform(-spec.noise_amp, spec.noise_amp);
          p.y += noise.uniform(-spec.noise_amp, spec.noise_amp);
          p.z += noise.uniform(-spec.noise_amp, spec.noise_amp);
        }
      }
      frames.push_back(f);
    }
  }
  return frames;
}

std::vector<PoseClass> classify_synth_frames(const SynthSpec& spec) {
  spec.validate();
  const auto tl = synth_timeline(spec);
  std::vector<PoseClass> labels(tl.frame_count, PoseClass::Down);
  for (const auto& rep : tl.reps) {
    std::fill(labels.begin() + static_cast<long>(rep.up_begin), labels.begin() + static_cast<long>(rep.return_begin),
              PoseClass::Up);
  }
  for (const auto& d : spec.defects) {
    if (d.kind == Defect::Kind::StallInUp) continue;
    std::fill(labels.begin() + static_cast<long>(d.first_frame), labels.begin() + static_cast<long>(d.last_frame) + 1,
              PoseClass::Invalid);
  }
  return labels;
}

}  // namespace jcave
