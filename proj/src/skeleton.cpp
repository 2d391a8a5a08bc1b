#include "jcave/skeleton.hpp"

#include <bitset>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace jcave {

namespace {

constexpr std::array<std::string_view, kJointCount> kJointNames = {
    "HipCenter",  "Spine",      "ShoulderCenter", "Head",      "ShoulderLeft",
    "ElbowLeft",  "WristLeft",  "HandLeft",       "ShoulderRight", "ElbowRight",
    "WristRight", "HandRight",  "HipLeft",        "KneeLeft",  "AnkleLeft",
    "FootLeft",   "HipRight",   "KneeRight",      "AnkleRight", "FootRight",
};

bool parse_double(std::string_view text, double& out) {
  if (text.empty()) {
    return false;
  }
  // from_chars rejects a leading '+', which is harmless to accept.
  if (text.front() == '+') {
    text.remove_prefix(1);
  }
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, out);
  return ec == std::errc{} && ptr == end;
}

void append_double(std::string& out, double value) {
  std::array<char, 32> buf{};
  auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  out.append(buf.data(), ptr);
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t pos = 0;
  while (pos < line.size()) {
    while (pos < line.size() && (line[pos] == ' ' || line[pos] == '\t')) {
      ++pos;
    }
    std::size_t end = pos;
    while (end < line.size() && line[end] != ' ' && line[end] != '\t') {
      ++end;
    }
    if (end > pos) {
      fields.push_back(line.substr(pos, end - pos));
    }
    pos = end;
  }
  return fields;
}

SkeletonFrame parse_record(std::string_view line, std::size_t line_no) {
  auto fields = split_fields(line);
  if (fields.empty() || !fields.front().starts_with("t=")) {
    throw StreamError(line_no, "record must start with t=<seconds>");
  }

  SkeletonFrame frame;
  if (!parse_double(fields.front().substr(2), frame.timestamp)) {
    throw StreamError(line_no, "malformed timestamp '" + std::string(fields.front()) + "'");
  }
  if (!std::isfinite(frame.timestamp) || frame.timestamp < 0.0) {
    throw StreamError(line_no, "timestamp must be finite and non-negative");
  }

  std::bitset<kJointCount> seen;
  for (std::size_t i = 1; i < fields.size(); ++i) {
    auto field = fields[i];
    auto eq = field.find('=');
    if (eq == std::string_view::npos) {
      throw StreamError(line_no, "malformed field '" + std::string(field) + "'");
    }
    auto name = field.substr(0, eq);
    auto id = joint_from_name(name);
    if (!id) {
      throw StreamError(line_no, "unknown joint '" + std::string(name) + "'");
    }
    auto idx = static_cast<std::size_t>(*id);
    if (seen.test(idx)) {
      throw StreamError(line_no, "duplicate joint " + std::string(name));
    }
    seen.set(idx);

    auto coords = field.substr(eq + 1);
    std::array<double, 3> xyz{};
    for (std::size_t c = 0; c < 3; ++c) {
      auto comma = coords.find(',');
      auto part = c < 2 ? coords.substr(0, comma) : coords;
      if ((c < 2 && comma == std::string_view::npos) || !parse_double(part, xyz[c])) {
        throw StreamError(line_no, "malformed coordinates for " + std::string(name));
      }
      if (!std::isfinite(xyz[c])) {
        throw StreamError(line_no, "non-finite coordinate for " + std::string(name));
      }
      if (c < 2) {
        coords.remove_prefix(comma + 1);
      }
    }
    frame.joints[idx] = Vec3{xyz[0], xyz[1], xyz[2]};
  }

  if (!seen.all()) {
    for (std::size_t i = 0; i < kJointCount; ++i) {
      if (!seen.test(i)) {
        throw StreamError(line_no, "missing joint " + std::string(kJointNames[i]));
      }
    }
  }
  return frame;
}

}  // namespace

std::string_view joint_name(JointId id) { return kJointNames[static_cast<std::size_t>(id)]; }

std::optional<JointId> joint_from_name(std::string_view name) {
  for (std::size_t i = 0; i < kJointCount; ++i) {
    if (kJointNames[i] == name) {
      return static_cast<JointId>(i);
    }
  }
  return std::nullopt;
}

JointId mirror_joint(JointId id) {
  switch (id) {
    case JointId::ShoulderLeft: return JointId::ShoulderRight;
    case JointId::ElbowLeft: return JointId::ElbowRight;
    case JointId::WristLeft: return JointId::WristRight;
    case JointId::HandLeft: return JointId::HandRight;
    case JointId::HipLeft: return JointId::HipRight;
    case JointId::KneeLeft: return JointId::KneeRight;
    case JointId::AnkleLeft: return JointId::AnkleRight;
    case JointId::FootLeft: return JointId::FootRight;
    case JointId::ShoulderRight: return JointId::ShoulderLeft;
    case JointId::ElbowRight: return JointId::ElbowLeft;
    case JointId::WristRight: return JointId::WristLeft;
    case JointId::HandRight: return JointId::HandLeft;
    case JointId::HipRight: return JointId::HipLeft;
    case JointId::KneeRight: return JointId::KneeLeft;
    case JointId::AnkleRight: return JointId::AnkleLeft;
    case JointId::FootRight: return JointId::FootLeft;
    default: return id;
  }
}

Vec3 operator+(Vec3 a, Vec3 b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
Vec3 operator-(Vec3 a, Vec3 b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
Vec3 operator*(double s, Vec3 v) { return {s * v.x, s * v.y, s * v.z}; }
double norm(Vec3 v) { return std::sqrt(v.x * v.x + v.y * v.y + v.z * v.z); }

std::string_view to_string(FrameValidation::Status status) {
  switch (status) {
    case FrameValidation::Status::Ok: return "ok";
    case FrameValidation::Status::Warn: return "warn";
    case FrameValidation::Status::Reject: return "reject";
  }
  return "?";
}

StreamError::StreamError(std::size_t line, const std::string& message)
    : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + message : message),
      line_(line) {}

std::vector<SkeletonFrame> parse_stream(std::string_view text) {
  std::vector<SkeletonFrame> frames;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    auto nl = text.find('\n', pos);
    auto line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() : nl + 1;
    ++line_no;

    if (!line.empty() && line.back() == '\r') {
      line.remove_suffix(1);
    }
    auto first = line.find_first_not_of(" \t");
    if (first == std::string_view::npos || line[first] == '#') {
      continue;
    }

    auto frame = parse_record(line, line_no);
    if (!frames.empty() && frame.timestamp <= frames.back().timestamp) {
      throw StreamError(line_no, "timestamp does not increase");
    }
    frames.push_back(frame);
  }
  return frames;
}

std::vector<SkeletonFrame> read_stream_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw std::ios_base::failure("cannot open " + path);
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_stream(buf.str());
}

std::string serialize_frame(const SkeletonFrame& frame) {
  std::string out = "t=";
  append_double(out, frame.timestamp);
  for (auto id : all_joints()) {
    const auto& p = frame[id];
    out += ' ';
    out += joint_name(id);
    out += '=';
    append_double(out, p.x);
    out += ',';
    append_double(out, p.y);
    out += ',';
    append_double(out, p.z);
  }
  return out;
}

std::string serialize_stream(std::span<const SkeletonFrame> frames) {
  std::string out;
  for (const auto& f : frames) {
    out += serialize_frame(f);
    out += '\n';
  }
  return out;
}

void write_stream_file(const std::string& path, std::span<const SkeletonFrame> frames) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw std::ios_base::failure("cannot write " + path);
  }
  out << serialize_stream(frames);
  if (!out) {
    throw std::ios_base::failure("write failed for " + path);
  }
}

FrameValidation validate_frame(const SkeletonFrame& frame) {
  FrameValidation result;
  if (!std::isfinite(frame.timestamp) || frame.timestamp < 0.0) {
    result.status = FrameValidation::Status::Reject;
    result.notes.emplace_back("timestamp");
  }
  for (const auto& p : frame.joints) {
    if (!std::isfinite(p.x) || !std::isfinite(p.y) || !std::isfinite(p.z)) {
      result.status = FrameValidation::Status::Reject;
      result.notes.emplace_back("non-finite");
      break;
    }
  }
  if (result.status == FrameValidation::Status::Reject) {
    return result;
  }

  double depth = frame[JointId::HipCenter].z;
  if (depth < kSensorMinDepth || depth > kSensorMaxDepth) {
    result.status = FrameValidation::Status::Warn;
    result.notes.emplace_back("distance");
  } else if (depth < kRecommendedMinDepth || depth > kRecommendedMaxDepth) {
    result.status = FrameValidation::Status::Warn;
    result.notes.emplace_back("distance-recommended");
  }
  return result;
}

SkeletonFrame mirror_frame(const SkeletonFrame& frame) {
  SkeletonFrame out;
  out.timestamp = frame.timestamp;
  for (auto id : all_joints()) {
    const auto& p = frame[id];
    out[mirror_joint(id)] = Vec3{-p.x, p.y, p.z};
  }
  return out;
}

std::vector<SkeletonFrame> mirror_stream(std::span<const SkeletonFrame> frames) {
  std::vector<SkeletonFrame> out;
  out.reserve(frames.size());
  for (const auto& f : frames) {
    out.push_back(mirror_frame(f));
  }
  return out;
}

}  // namespace jcave
