#include "jcave/game.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <numeric>
#include <stdexcept>

#include "rng.hpp"

namespace jcave {

namespace {

constexpr double kHitEpsilon = 1e-9;
constexpr std::array<double, 3> kHitRadius = {0.15, 0.25, 0.35};

double round_milli(double v) { return std::round(v * 1000.0) / 1000.0; }

}  // namespace

std::optional<SubLevelId> SubLevelId::next() const {
  if (stage < kStagesPerLevel) {
    return SubLevelId{level, stage + 1};
  }
  if (level < kLevels) {
    return SubLevelId{level + 1, 1};
  }
  return std::nullopt;
}

std::string SubLevelId::to_string() const { return std::to_string(level) + "-" + std::to_string(stage); }

SubLevelId SubLevelId::parse(std::string_view text) {
  auto dash = text.find('-');
  SubLevelId id{0, 0};
  try {
    if (dash == std::string_view::npos) {
      throw std::invalid_argument("");
    }
    std::size_t used = 0;
    std::string level(text.substr(0, dash));
    std::string stage(text.substr(dash + 1));
    id.level = std::stoi(level, &used);
    if (used != level.size()) throw std::invalid_argument("");
    id.stage = std::stoi(stage, &used);
    if (used != stage.size()) throw std::invalid_argument("");
  } catch (const std::exception&) {
    throw std::invalid_argument("malformed sub-level '" + std::string(text) + "' (expected L-S)");
  }
  if (!id.valid()) {
    throw std::invalid_argument("sub-level " + std::string(text) + " out of range");
  }
  return id;
}

int jewel_value(int index, int size) {
  if (index < 0 || index > 5 || size < 0 || size > 2) {
    throw std::out_of_range("jewel index must be 0..5 and size 0..2");
  }
  return (size + 1) * 10 + index * 10;
}

double hit_radius(int size) { return kHitRadius.at(static_cast<std::size_t>(size)); }

std::vector<Jewel> generate_layout(SubLevelId sublevel, std::uint64_t session_seed) {
  if (!sublevel.valid()) {
    throw std::invalid_argument("invalid sub-level " + sublevel.to_string());
  }
  auto seed = sublevel.level == 1
                  ? detail::mix_seed({1, static_cast<std::uint64_t>(sublevel.stage)})
                  : detail::mix_seed({2, static_cast<std::uint64_t>(sublevel.stage), session_seed});
  detail::SplitMix64 rng(seed);

  std::vector<Jewel> jewels;
  jewels.reserve(kJewelsPerLayout);
  const double slot = 2.0 / static_cast<double>(kJewelsPerLayout);
  for (std::size_t i = 0; i < kJewelsPerLayout; ++i) {
    Jewel j;
    j.index = rng.below(6);
    j.size = rng.below(3);
    double centre = -1.0 + slot * (static_cast<double>(i) + 0.5);
    j.x = round_milli(std::clamp(centre + rng.uniform(-0.4, 0.4) * slot, -1.0, 1.0));
    // Jewels deeper than y = 0.5 are out of the hook's reach; keep the edges reachable.
    j.y = std::abs(j.x) > 0.9 ? round_milli(rng.uniform(0.5, 0.6)) : round_milli(rng.uniform(0.3, 0.6));
    jewels.push_back(j);
  }

  auto total = [&] {
    return std::accumulate(jewels.begin(), jewels.end(), 0,
                           [](int acc, const Jewel& j) { return acc + jewel_value(j.index, j.size); });
  };
  while (total() < 200) {
    auto lowest = std::min_element(jewels.begin(), jewels.end(), [](const Jewel& a, const Jewel& b) {
      return jewel_value(a.index, a.size) < jewel_value(b.index, b.size);
    });
    if (lowest->index < 5) {
      ++lowest->index;
    } else {
      ++lowest->size;
    }
  }
  return jewels;
}

std::string_view to_string(HookPhase phase) {
  switch (phase) {
    case HookPhase::Swinging: return "swinging";
    case HookPhase::Extending: return "extending";
    case HookPhase::Retracting: return "retracting";
  }
  return "?";
}

std::string_view to_string(Outcome outcome) {
  switch (outcome) {
    case Outcome::Ongoing: return "ongoing";
    case Outcome::Won: return "won";
    case Outcome::Lost: return "lost";
  }
  return "?";
}

Outcome evaluate_outcome(int nofer, int collected_score, int repetitions_n) {
  const int required = repetitions_n * 10;
  if (nofer >= repetitions_n && collected_score >= required) {
    return Outcome::Won;
  }
  if (nofer == 2 * repetitions_n && collected_score < required) {
    return Outcome::Lost;
  }
  return Outcome::Ongoing;
}

GameSession::GameSession(std::string profile_id, int repetitions_n, SubLevelId sublevel,
                         std::uint64_t session_seed) {
  if (repetitions_n < 1) {
    throw std::invalid_argument("repetitions N must be at least 1");
  }
  if (!sublevel.valid()) {
    throw std::invalid_argument("invalid sub-level " + sublevel.to_string());
  }
  state_.profile_id = std::move(profile_id);
  state_.repetitions_n = repetitions_n;
  state_.sublevel = sublevel;
  state_.session_seed = session_seed;
  reset_attempt();
}

GameSession::GameSession(std::string profile_id, int repetitions_n, SubLevelId sublevel, std::vector<Jewel> jewels)
    : GameSession(std::move(profile_id), repetitions_n, sublevel, std::uint64_t{0}) {
  for (auto& j : jewels) {
    jewel_value(j.index, j.size);
    j.collected = false;
  }
  fixed_layout_ = true;
  initial_layout_ = std::move(jewels);
  state_.jewels = initial_layout_;
}

void GameSession::reset_attempt() {
  state_.jewels = fixed_layout_ ? initial_layout_ : generate_layout(state_.sublevel, state_.session_seed);
  state_.hook = HookState{};
  state_.collected_score = 0;
  state_.nofer = 0;
  state_.pending_drops = 0;
  state_.outcome = Outcome::Ongoing;
  state_.notes.clear();
  current_drop_.reset();
}

void GameSession::on_gesture_event(const GestureEvent& event) {
  if (state_.outcome != Outcome::Ongoing || state_.game_complete) {
    throw std::logic_error("gesture event after the attempt was decided");
  }
  switch (event.kind) {
    case GestureEvent::Kind::InProgress:
      break;
    case GestureEvent::Kind::Completed:
      if (state_.nofer >= 2 * state_.repetitions_n) {
        state_.notes.emplace_back("exercise-budget-exhausted");
        break;
      }
      state_.nofer += 1;
      state_.pending_drops += 1;
      break;
    case GestureEvent::Kind::Aborted:
      state_.notes.emplace_back(std::string("aborted:") + std::string(to_string(event.reason)));
      break;
  }
}

std::optional<int> GameSession::find_hit() const {
  const auto& hook = state_.hook;
  std::optional<int> best;
  for (std::size_t i = 0; i < state_.jewels.size(); ++i) {
    const auto& j = state_.jewels[i];
    if (j.collected) continue;
    double dx = std::abs(hook.anchor_x - j.x);
    if (dx > hit_radius(j.size) + kHitEpsilon || hook.tip_y() > j.y + kHitEpsilon) continue;
    if (!best) {
      best = static_cast<int>(i);
      continue;
    }
    const auto& b = state_.jewels[static_cast<std::size_t>(*best)];
    // The descending tip meets the highest jewel first; nearer wins a tie.
    if (j.y > b.y || (j.y == b.y && dx < std::abs(hook.anchor_x - b.x))) {
      best = static_cast<int>(i);
    }
  }
  return best;
}

TickResult GameSession::tick() {
  if (state_.outcome != Outcome::Ongoing || state_.game_complete) {
    throw std::logic_error("hook tick after the attempt was decided");
  }
  TickResult result;
  auto& hook = state_.hook;
  switch (hook.phase) {
    case HookPhase::Swinging: {
      double phase = 2.0 * std::numbers::pi * static_cast<double>(hook.tick) / kPendulumPeriodTicks;
      hook.anchor_x = kPendulumAmplitude * std::sin(phase);
      hook.tick += 1;
      if (state_.pending_drops > 0) {
        hook.phase = HookPhase::Extending;
        hook.steps = 0;
        current_drop_ = DropResult{false, -1, 0, hook.anchor_x};
      }
      break;
    }
    case HookPhase::Extending: {
      hook.steps += 1;
      if (auto hit = find_hit()) {
        auto& jewel = state_.jewels[static_cast<std::size_t>(*hit)];
        jewel.collected = true;
        int points = jewel_value(jewel.index, jewel.size);
        state_.collected_score += points;
        current_drop_->hit = true;
        current_drop_->jewel = *hit;
        current_drop_->points = points;
        hook.phase = HookPhase::Retracting;
      } else if (hook.steps >= kHookMaxSteps) {
        hook.phase = HookPhase::Retracting;
      }
      break;
    }
    case HookPhase::Retracting: {
      hook.steps -= 1;
      if (hook.steps <= 0) {
        hook.steps = 0;
        hook.phase = HookPhase::Swinging;
        state_.pending_drops -= 1;
        result.resolved = current_drop_;
        current_drop_.reset();

        auto outcome = evaluate_outcome(state_.nofer, state_.collected_score, state_.repetitions_n);
        // A loss is final only once every counted exercise has had its drop.
        if (outcome == Outcome::Lost && state_.pending_drops > 0) {
          outcome = Outcome::Ongoing;
        }
        if (outcome != Outcome::Ongoing) {
          state_.outcome = outcome;
          state_.pending_drops = 0;
          result.decided = true;
          if (outcome == Outcome::Won &&
              (!highest_completed_ || state_.sublevel > *highest_completed_)) {
            highest_completed_ = state_.sublevel;
          }
        }
      }
      break;
    }
  }
  return result;
}

void GameSession::advance_after_outcome() {
  if (state_.outcome == Outcome::Ongoing) {
    throw std::logic_error("advance requested while the attempt is ongoing");
  }
  if (state_.game_complete) {
    return;
  }
  if (state_.outcome == Outcome::Won) {
    auto next = state_.sublevel.next();
    if (!next) {
      state_.game_complete = true;
      return;
    }
    state_.sublevel = *next;
  }
  reset_attempt();
}

}  // namespace jcave
