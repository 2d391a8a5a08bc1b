#include "jcave/protocol.hpp"

#include <cmath>
#include <stdexcept>

namespace jcave {

using nlohmann::json;

namespace {

json message(std::string_view type) {
  json j;
  j["v"] = kProtocolVersion;
  j["type"] = type;
  return j;
}

RuleConstants constants_from_json(const json& j) {
  RuleConstants c;
  if (j.is_null()) {
    return c;
  }
  if (!j.is_object()) {
    throw std::invalid_argument("constants must be an object");
  }
  c.carrying_angle_deg = j.value("carrying_angle_deg", c.carrying_angle_deg);
  c.k_offset = j.value("k_offset", c.k_offset);
  c.window_size = j.value("window_size", c.window_size);
  c.grace_frames = j.value("grace_frames", c.grace_frames);
  c.validate();
  return c;
}

}  // namespace

json error_message(std::string_view code, std::string_view text) {
  json j = message("error");
  j["code"] = code;
  j["text"] = text;
  return j;
}

json frame_to_json(const SkeletonFrame& frame) {
  json joints = json::object();
  for (auto id : all_joints()) {
    const auto& p = frame[id];
    joints[std::string(joint_name(id))] = {p.x, p.y, p.z};
  }
  return {{"t", frame.timestamp}, {"joints", joints}};
}

SkeletonFrame frame_from_json(const json& j) {
  if (!j.is_object()) {
    throw std::invalid_argument("frame must be an object");
  }
  if (auto rec = j.find("record"); rec != j.end()) {
    if (!rec->is_string()) {
      throw std::invalid_argument("record must be a string");
    }
    auto frames = parse_stream(rec->get<std::string>());
    if (frames.size() != 1) {
      throw std::invalid_argument("record must hold exactly one frame");
    }
    return frames.front();
  }

  SkeletonFrame f;
  const auto& t = j.at("t");
  if (!t.is_number()) {
    throw std::invalid_argument("t must be a number");
  }
  f.timestamp = t.get<double>();
  if (!std::isfinite(f.timestamp) || f.timestamp < 0.0) {
    throw std::invalid_argument("t must be finite and non-negative");
  }
  const auto& joints = j.at("joints");
  if (!joints.is_object() || joints.size() != kJointCount) {
    throw std::invalid_argument("joints must map all twenty joint names");
  }
  for (auto id : all_joints()) {
    auto it = joints.find(std::string(joint_name(id)));
    if (it == joints.end()) {
      throw std::invalid_argument("missing joint " + std::string(joint_name(id)));
    }
    if (!it->is_array() || it->size() != 3) {
      throw std::invalid_argument("joint " + std::string(joint_name(id)) + " must be [x, y, z]");
    }
    double xyz[3];
    for (std::size_t c = 0; c < 3; ++c) {
      if (!(*it)[c].is_number()) {
        throw std::invalid_argument("joint " + std::string(joint_name(id)) + " has a non-numeric coordinate");
      }
      xyz[c] = (*it)[c].get<double>();
      if (!std::isfinite(xyz[c])) {
        throw std::invalid_argument("joint " + std::string(joint_name(id)) + " has a non-finite coordinate");
      }
    }
    f[id] = Vec3{xyz[0], xyz[1], xyz[2]};
  }
  return f;
}

json layout_to_json(const std::vector<Jewel>& jewels) {
  json out = json::array();
  for (const auto& j : jewels) {
    out.push_back({{"index", j.index},
                   {"size", j.size},
                   {"x", j.x},
                   {"y", j.y},
                   {"value", jewel_value(j.index, j.size)},
                   {"collected", j.collected}});
  }
  return out;
}

ServiceConnection::ServiceConnection(std::shared_ptr<ProfileStore> store) : store_(std::move(store)) {}

Reply ServiceConnection::handle_text(std::string_view text) {
  json msg;
  try {
    msg = json::parse(text);
  } catch (const json::parse_error&) {
    return {{error_message("malformed-message", "message is not valid JSON")}, false};
  }
  return handle(msg);
}

Reply ServiceConnection::handle(const json& msg) {
  if (closed_) {
    return {{error_message("closed", "connection is closed")}, true};
  }
  if (!msg.is_object() || !msg.contains("type") || !msg["type"].is_string()) {
    return {{error_message("malformed-message", "message needs a string type field")}, false};
  }
  const auto type = msg["type"].get<std::string>();
  if (auto v = msg.find("v"); v != msg.end() && *v != kProtocolVersion) {
    return {{error_message("version-mismatch", "message version must be " + std::to_string(kProtocolVersion))},
            false};
  }

  if (type == "hello") {
    return on_hello(msg);
  }
  if (!greeted_) {
    return {{error_message("handshake-required", "send hello first")}, false};
  }
  if (type == "start_session") {
    return on_start(msg);
  }
  if (type == "frame") {
    return on_frame(msg);
  }
  if (type == "pause" || type == "resume") {
    if (!driver_) {
      return {{error_message("no-session", "no session has been started")}, false};
    }
    const bool want_pause = type == "pause";
    if (paused_ == want_pause) {
      return {{error_message(want_pause ? "already-paused" : "not-paused", "session is already in that state")},
              false};
    }
    paused_ = want_pause;
    json ack = message(want_pause ? "paused" : "resumed");
    return {{ack}, false};
  }
  if (type == "end_session") {
    return on_end();
  }
  return {{error_message("unknown-message", "unknown message type '" + type + "'")}, false};
}

Reply ServiceConnection::on_hello(const json& msg) {
  if (greeted_) {
    return {{error_message("protocol-order", "hello already received")}, false};
  }
  auto it = msg.find("protocol_version");
  if (it == msg.end() || !it->is_number_integer() || it->get<int>() != kProtocolVersion) {
    closed_ = true;
    return {{error_message("version-mismatch", "server speaks protocol version " + std::to_string(kProtocolVersion))},
            true};
  }
  greeted_ = true;
  json reply = message("hello");
  reply["protocol_version"] = kProtocolVersion;
  reply["service_version"] = kServiceVersion;
  return {{reply}, false};
}

Reply ServiceConnection::on_start(const json& msg) {
  if (driver_) {
    return {{error_message("session-active", "one session per connection")}, false};
  }
  SessionConfig config;
  try {
    config.session_seed = msg.value("session_seed", std::uint64_t{0});
    std::optional<SubLevelId> sublevel;
    if (auto it = msg.find("sublevel"); it != msg.end() && !it->is_null()) {
      sublevel = SubLevelId::parse(it->get<std::string>());
    }
    if (auto it = msg.find("profile_id"); it != msg.end() && !it->is_null()) {
      if (!store_) {
        return {{error_message("no-store", "service has no profile store")}, false};
      }
      auto profile = store_->get(it->get<std::string>());
      config.profile_id = profile.id;
      config.recognizer.exercise = profile.exercise;
      config.recognizer.arm = profile.arm;
      config.repetitions_n = profile.repetitions_n;
      config.start = sublevel.value_or(resume_sublevel(profile));
      config.recognizer.consts = constants_from_json(msg.value("constants", json()));
    } else {
      const auto& inline_cfg = msg.at("config");
      config.recognizer.exercise = parse_exercise(inline_cfg.at("exercise").get<std::string>());
      config.recognizer.arm = parse_arm(inline_cfg.at("arm").get<std::string>());
      config.repetitions_n = inline_cfg.at("n").get<int>();
      config.recognizer.consts = constants_from_json(inline_cfg.value("constants", json()));
      config.start = sublevel.value_or(SubLevelId{1, 1});
    }
    driver_.emplace(config);
  } catch (const UnknownProfile& e) {
    return {{error_message("unknown-profile", e.what())}, false};
  } catch (const std::exception& e) {
    return {{error_message("invalid-config", e.what())}, false};
  }
  return {{session_started()}, false};
}

json ServiceConnection::session_started() const {
  const auto& st = driver_->game().state();
  json j = message("session_started");
  j["sublevel"] = st.sublevel.to_string();
  j["layout"] = layout_to_json(st.jewels);
  j["required_score"] = st.required_score();
  j["n"] = st.repetitions_n;
  j["exercise"] = std::string(to_string(driver_->config().recognizer.exercise));
  j["arm"] = std::string(to_string(driver_->config().recognizer.arm));
  return j;
}

json ServiceConnection::state_message(const SessionStep& step) const {
  const auto& rec = driver_->tracker().recognizer();
  const auto& st = step.snapshot;
  json j = message("state");
  j["segment"] = std::string(to_string(rec.state().segment));
  j["frames_in_segment"] = rec.state().frames_in_segment;
  j["invalid_run"] = rec.state().invalid_run;
  j["pose"] = std::string(to_string(rec.last_pose()));
  j["hook"] = {{"anchor_x", st.hook.anchor_x},
               {"anchor_y", st.hook.anchor_y},
               {"extension", st.hook.extension()},
               {"phase", std::string(to_string(st.hook.phase))}};
  j["collected_score"] = st.collected_score;
  j["nofer"] = st.nofer;
  j["pending_drops"] = st.pending_drops;
  j["outcome"] = std::string(to_string(st.outcome));
  j["sublevel"] = st.sublevel.to_string();
  json collected = json::array();
  for (const auto& jw : st.jewels) {
    collected.push_back(jw.collected);
  }
  j["collected"] = collected;
  return j;
}

void ServiceConnection::append_step_messages(Reply& reply, const SessionStep& step, bool with_state) const {
  if (step.event.kind == GestureEvent::Kind::Completed) {
    json fb = message("gesture_feedback");
    fb["event"] = "completed";
    reply.messages.push_back(fb);
  } else if (step.event.kind == GestureEvent::Kind::Aborted) {
    json fb = message("gesture_feedback");
    fb["event"] = "aborted";
    fb["reason"] = std::string(to_string(step.event.reason));
    reply.messages.push_back(fb);
  }
  if (with_state) {
    reply.messages.push_back(state_message(step));
  }
  if (step.decided) {
    json banner = message("outcome_banner");
    banner["outcome"] = std::string(to_string(*step.decided));
    banner["sublevel"] = step.snapshot.sublevel.to_string();
    banner["score"] = step.snapshot.collected_score;
    banner["nofer"] = step.snapshot.nofer;
    banner["game_complete"] = driver_->game().state().game_complete;
    reply.messages.push_back(banner);
  }
}

Reply ServiceConnection::on_frame(const json& msg) {
  if (!driver_) {
    return {{error_message("no-session", "no session has been started")}, false};
  }
  if (paused_) {
    return {{error_message("paused", "session is paused")}, false};
  }
  SkeletonFrame frame;
  try {
    frame = frame_from_json(msg.at("frame"));
  } catch (const std::exception& e) {
    return {{error_message("malformed-frame", e.what())}, false};
  }
  if (last_timestamp_ && frame.timestamp <= *last_timestamp_) {
    return {{error_message("malformed-frame", "timestamp does not increase")}, false};
  }
  last_timestamp_ = frame.timestamp;

  Reply reply;
  auto step = driver_->process_frame(frame);
  append_step_messages(reply, step, true);
  if (step.advanced) {
    reply.messages.push_back(session_started());
  }
  return reply;
}

Reply ServiceConnection::on_end() {
  if (!driver_) {
    return {{error_message("no-session", "no session has been started")}, false};
  }
  Reply reply;
  for (const auto& step : driver_->settle()) {
    append_step_messages(reply, step, false);
  }
  json progress = nullptr;
  const auto& cfg = driver_->config();
  if (!cfg.profile_id.empty() && store_) {
    if (auto done = driver_->highest_completed()) {
      try {
        auto p = store_->record_progress(cfg.profile_id, *done);
        progress = p.progress ? json(p.progress->to_string()) : json(nullptr);
      } catch (const std::exception& e) {
        reply.messages.push_back(error_message("store-failure", e.what()));
      }
    }
  }
  json ended = message("session_ended");
  ended["report"] = driver_->report();
  ended["progress"] = progress;
  reply.messages.push_back(ended);
  reply.close = true;
  closed_ = true;
  return reply;
}

}  // namespace jcave
