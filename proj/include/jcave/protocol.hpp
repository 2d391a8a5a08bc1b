#pragma once

#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "jcave/profile_store.hpp"
#include "jcave/session.hpp"

namespace jcave {

inline constexpr int kProtocolVersion = 1;
inline constexpr std::string_view kServiceVersion = "0.1.0";

nlohmann::json frame_to_json(const SkeletonFrame& frame);

// Accepts {"t": s, "joints": {"HandRight": [x, y, z], ...}} or {"record": "<stream line>"}.
// Throws std::invalid_argument on anything else.
SkeletonFrame frame_from_json(const nlohmann::json& j);

nlohmann::json layout_to_json(const std::vector<Jewel>& jewels);

struct Reply {
  std::vector<nlohmann::json> messages;
  bool close = false;
};

// One client connection of the live session service, independent of transport.
// Messages are processed strictly in order; the game clock advances only when a
// frame arrives.
class ServiceConnection {
 public:
  // `store` may be null, in which case only inline session configs are accepted.
  explicit ServiceConnection(std::shared_ptr<ProfileStore> store = nullptr);

  Reply handle(const nlohmann::json& message);
  Reply handle_text(std::string_view text);

  bool greeted() const noexcept { return greeted_; }
  bool paused() const noexcept { return paused_; }
  bool closed() const noexcept { return closed_; }
  const SessionDriver* driver() const noexcept { return driver_ ? &*driver_ : nullptr; }

 private:
  Reply on_hello(const nlohmann::json& msg);
  Reply on_start(const nlohmann::json& msg);
  Reply on_frame(const nlohmann::json& msg);
  Reply on_end();

  nlohmann::json session_started() const;
  nlohmann::json state_message(const SessionStep& step) const;
  void append_step_messages(Reply& reply, const SessionStep& step, bool with_state) const;

  std::shared_ptr<ProfileStore> store_;
  bool greeted_ = false;
  bool paused_ = false;
  bool closed_ = false;
  std::optional<SessionDriver> driver_;
  std::optional<double> last_timestamp_;
};

nlohmann::json error_message(std::string_view code, std::string_view text);

}  // namespace jcave
