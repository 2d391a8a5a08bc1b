#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>
#include <set>

#include "jcave/skeleton.hpp"
#include "jcave/synth.hpp"

using namespace jcave;

namespace {

SkeletonFrame random_frame(std::mt19937_64& rng, double t) {
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  SkeletonFrame f;
  f.timestamp = t;
  for (auto& p : f.joints) {
    p = {u(rng), u(rng), u(rng)};
  }
  return f;
}

}  // namespace

TEST_CASE("joint names are twenty distinct identifiers with left/right partners") {
  std::set<std::string_view> names;
  for (auto id : all_joints()) {
    names.insert(joint_name(id));
    CHECK(joint_from_name(joint_name(id)) == id);
    CHECK(mirror_joint(mirror_joint(id)) == id);
    auto n = std::string(joint_name(id));
    if (n.ends_with("Left")) {
      CHECK(joint_name(mirror_joint(id)) == n.substr(0, n.size() - 4) + "Right");
    }
  }
  CHECK(names.size() == kJointCount);
  CHECK_FALSE(joint_from_name("Tail").has_value());
}

TEST_CASE("empty and comment-only input parse to no frames") {
  CHECK(parse_stream("").empty());
  CHECK(parse_stream("# header\n\n   \n# another\n").empty());
}

TEST_CASE("one record parses to one frame and round-trips") {
  auto f = neutral_pose(0.25);
  auto text = serialize_frame(f);
  auto frames = parse_stream(text + "\n");
  REQUIRE(frames.size() == 1);
  CHECK(frames[0] == f);
}

TEST_CASE("joints may appear in any order, CRLF tolerated") {
  auto f = neutral_pose(1.0);
  std::string rec = "t=1";
  auto ids = all_joints();
  for (auto it = ids.rbegin(); it != ids.rend(); ++it) {
    const auto& p = f[*it];
    rec += " " + std::string(joint_name(*it)) + "=" + std::to_string(p.x) + "," + std::to_string(p.y) + "," +
           std::to_string(p.z);
  }
  auto frames = parse_stream(rec + "\r\n");
  REQUIRE(frames.size() == 1);
  CHECK(frames[0][JointId::HipCenter].z == doctest::Approx(1.4));
}

TEST_CASE("missing HandRight is rejected with joint and line") {
  auto text = "# fixture\n" + serialize_frame(neutral_pose(0.0));
  auto pos = text.find(" HandRight=");
  auto end = text.find(' ', pos + 1);
  text.erase(pos, end == std::string::npos ? std::string::npos : end - pos);
  try {
    parse_stream(text);
    FAIL("expected a StreamError");
  } catch (const StreamError& e) {
    CHECK(e.line() == 2);
    CHECK(std::string(e.what()).find("HandRight") != std::string::npos);
  }
}

TEST_CASE("malformed records are rejected") {
  auto good = serialize_frame(neutral_pose(0.0));
  auto replace = [&](std::string from, std::string to) {
    auto s = good;
    s.replace(s.find(from), from.size(), to);
    return s;
  };
  CHECK_THROWS_AS(parse_stream(replace("t=0", "t=abc")), StreamError);
  CHECK_THROWS_AS(parse_stream(replace("t=0", "x=0")), StreamError);
  CHECK_THROWS_AS(parse_stream(replace("Head=", "Tail=")), StreamError);
  CHECK_THROWS_AS(parse_stream(replace("Head=", "Spine=")), StreamError);  // duplicate
  CHECK_THROWS_AS(parse_stream(good + " Head=0,0"), StreamError);
  CHECK_THROWS_AS(parse_stream(replace("t=0", "t=nan")), StreamError);
  CHECK_THROWS_AS(parse_stream(replace("t=0", "t=-1")), StreamError);
}

TEST_CASE("timestamps must strictly increase") {
  auto a = serialize_frame(neutral_pose(1.0));
  auto b = serialize_frame(neutral_pose(1.0));
  auto c = serialize_frame(neutral_pose(0.5));
  CHECK_THROWS_AS(parse_stream(a + "\n" + b), StreamError);
  CHECK_THROWS_AS(parse_stream(a + "\n" + c), StreamError);
  try {
    parse_stream(a + "\n" + c);
  } catch (const StreamError& e) {
    CHECK(e.line() == 2);
  }
}

TEST_CASE("serialize then parse is the identity on random frames") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<SkeletonFrame> frames;
    double t = 0.0;
    int n = static_cast<int>(rng() % 20);
    for (int i = 0; i < n; ++i) {
      t += std::uniform_real_distribution<double>(1e-6, 0.1)(rng);
      frames.push_back(random_frame(rng, t));
    }
    CHECK(parse_stream(serialize_stream(frames)) == frames);
  }
}

TEST_CASE("validation follows the placement bands") {
  auto f = neutral_pose(0.0);
  CHECK(validate_frame(f).status == FrameValidation::Status::Ok);

  f[JointId::HipCenter].z = 0.5;
  auto v = validate_frame(f);
  CHECK(v.status == FrameValidation::Status::Warn);
  CHECK(v.notes == std::vector<std::string>{"distance"});

  f[JointId::HipCenter].z = 2.0;
  v = validate_frame(f);
  CHECK(v.status == FrameValidation::Status::Warn);
  CHECK(v.notes == std::vector<std::string>{"distance-recommended"});

  f[JointId::HipCenter].z = 4.5;
  CHECK(validate_frame(f).notes == std::vector<std::string>{"distance"});

  f[JointId::HipCenter].z = 1.3;
  CHECK(validate_frame(f).status == FrameValidation::Status::Ok);
  f[JointId::HipCenter].z = 0.8;
  CHECK(validate_frame(f).notes == std::vector<std::string>{"distance-recommended"});

  f[JointId::Head].y = std::numeric_limits<double>::quiet_NaN();
  CHECK(validate_frame(f).status == FrameValidation::Status::Reject);
}

TEST_CASE("mirroring negates x and swaps sides") {
  auto f = neutral_pose(0.0);
  f[JointId::HandRight] = {0.3, 0.1, 2.0};
  auto m = mirror_frame(f);
  CHECK(m[JointId::HandLeft] == Vec3{-0.3, 0.1, 2.0});
  CHECK(m.timestamp == f.timestamp);

  std::mt19937_64 rng(11);
  for (int i = 0; i < 200; ++i) {
    auto r = random_frame(rng, 0.1 * i);
    CHECK(mirror_frame(mirror_frame(r)) == r);
    auto mr = mirror_frame(r);
    for (auto id : all_joints()) {
      CHECK(mr[mirror_joint(id)].y == r[id].y);
      CHECK(mr[mirror_joint(id)].z == r[id].z);
    }
  }
}

TEST_CASE("a left/right symmetric frame is a fixed point of mirroring") {
  auto f = neutral_pose(0.0);
  CHECK(mirror_frame(f) == f);
}
