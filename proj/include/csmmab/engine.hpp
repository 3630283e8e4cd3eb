#pragma once

// Slotted-time protocol engine: startup, super frames with initiator
// election and swap mini-frames, and plain sampling slots.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "csmmab/agent.hpp"
#include "csmmab/model.hpp"
#include "csmmab/rng.hpp"

namespace csmmab {

enum class SlotKind { startup, s1, s2, s3, s4, tail };

struct SlotLabel {
  SlotKind kind = SlotKind::startup;
  std::size_t mini_frame = 0;  // 1..K-1 for s3 / s4

  friend bool operator==(const SlotLabel&, const SlotLabel&) = default;
};

/// "CFL", "S1", "S2", "S3(m)", "S4(m)", "TAIL".
std::string to_string(SlotLabel label);

/// Super frame layout: S1, S2, then K-1 mini-frames (S3(m), S4(m)).
class SuperFrameSchedule {
 public:
  explicit SuperFrameSchedule(std::size_t n_channels);

  std::size_t length() const noexcept { return 2 * n_channels_; }
  std::size_t mini_frames() const noexcept { return n_channels_ - 1; }

  /// Kind of the slot at 1-based offset within the super frame.
  SlotLabel kind_at(std::size_t offset) const;

 private:
  std::size_t n_channels_;
};

struct EngineConfig {
  std::uint64_t horizon = 0;  // protocol slots after startup
  std::optional<double> epsilon;  // default 1/K
  bool oracle_stats = false;
  std::uint64_t cfl_max_slots = 100000;

  double epsilon_for(std::size_t n_channels) const;
  void validate(std::size_t n_channels) const;
};

/// A channel change. `partner` is set for a swap; empty for a relocation to a
/// free channel.
struct MoveEvent {
  std::uint64_t t = 0;         // global slot index in which the move took effect
  std::uint64_t super_frame = 0;  // 1-based
  std::size_t user = 0;
  std::size_t from = 0;
  std::size_t to = 0;
  std::optional<std::size_t> partner;

  friend bool operator==(const MoveEvent&, const MoveEvent&) = default;
};

/// Per super frame bookkeeping.
struct SuperFrameSummary {
  std::uint64_t index = 0;  // 1-based
  std::uint64_t first_slot = 0;
  std::size_t flag_raisers = 0;
  std::optional<std::size_t> initiator;
  std::optional<MoveEvent> move;
  std::size_t proposals = 0;  // mini-frames in which the initiator signalled
  // schedule accounting: one signalling transmission and one sensing action per slot
  std::uint64_t signalling_actions = 0;
  // learning samples reserved by the schedule: N - 2 learners per S4 slot
  std::uint64_t reserved_learning_samples = 0;
  // learning samples actually recorded across users (all slot kinds)
  std::uint64_t learning_samples = 0;
  std::uint64_t s4_learning_samples = 0;

  friend bool operator==(const SuperFrameSummary&, const SuperFrameSummary&) = default;
};

/// Receives every slot as it is executed.
class SimulationObserver {
 public:
  virtual ~SimulationObserver() = default;
  virtual void on_slot(const SlotRecord& /*record*/, SlotLabel /*label*/,
                       std::span<const std::size_t> /*assignment*/) {}
  virtual void on_move(const MoveEvent& /*event*/) {}
  virtual void on_super_frame(const SuperFrameSummary& /*summary*/) {}
};

struct StartupResult {
  std::vector<std::size_t> assignment;
  std::uint64_t slots = 0;
};

/// Collision-free-learning startup: every user transmits on her candidate
/// channel; collided users resample uniformly. Ends after the first slot with
/// no collision. Throws ErrorKind::startup_timeout past `max_slots`.
/// Sole-occupancy rewards are recorded into `agents`.
StartupResult run_cfl_startup(const RewardMatrix& matrix, std::span<AgentState> agents, Rng& rng,
                              std::uint64_t max_slots, std::uint64_t first_t = 1,
                              SimulationObserver* observer = nullptr);

/// The unique flag-raiser, if exactly one flag is set.
std::optional<std::size_t> elect_initiator(std::span<const std::uint8_t> flags);

/// What an observer of the S1 sensing vector concludes: the owner of the single
/// busy channel, if exactly one channel is busy.
std::optional<std::size_t> identify_initiator(std::span<const std::uint8_t> sensing,
                                              std::span<const std::size_t> assignment);

struct RunResult {
  std::uint64_t startup_slots = 0;
  std::vector<std::size_t> initial_assignment;
  std::vector<std::size_t> final_assignment;
  std::vector<MoveEvent> moves;
  std::vector<SuperFrameSummary> super_frames;
  std::uint64_t total_reward = 0;  // learning and signalling slots alike
};

class Engine {
 public:
  Engine(RewardMatrix matrix, EngineConfig config, std::uint64_t seed,
         SimulationObserver* observer = nullptr);

  const RewardMatrix& matrix() const noexcept { return matrix_; }
  const EngineConfig& config() const noexcept { return config_; }
  const SuperFrameSchedule& schedule() const noexcept { return schedule_; }
  std::span<const AgentState> agents() const noexcept { return agents_; }
  std::span<const std::size_t> assignment() const noexcept { return assignment_; }
  std::uint64_t slot() const noexcept { return t_; }
  bool started() const noexcept { return started_; }

  void startup();

  /// One full super frame. Returns its summary (move included, if any).
  SuperFrameSummary run_super_frame();

  /// One sampling slot where everyone transmits on her own channel.
  void run_regular_slot(SlotLabel label);

  /// Startup, floor(horizon / T_SF) super frames, then the remainder as tail slots.
  RunResult run();

 private:
  struct FrameContext;

  const SlotRecord& execute();
  void learn_own_channel(const SlotRecord& rec, FrameContext* frame, bool s4);
  void run_miniframe(std::size_t m, FrameContext& frame);
  void apply_move(const MoveEvent& event, FrameContext& frame);
  void check_orthogonal() const;

  RewardMatrix matrix_;
  EngineConfig config_;
  SuperFrameSchedule schedule_;
  Rng rng_;
  SimulationObserver* observer_;
  std::vector<AgentState> agents_;
  std::vector<std::size_t> assignment_;
  std::vector<std::uint8_t> occupancy_;  // sensed at the most recent regular slot
  std::vector<std::optional<std::size_t>> tx_;
  SlotRecord record_;
  std::vector<double> index_buffer_;
  std::uint64_t t_ = 0;
  std::uint64_t super_frames_ = 0;
  std::uint64_t startup_slots_ = 0;
  std::uint64_t total_reward_ = 0;
  bool started_ = false;
  std::vector<std::size_t> initial_assignment_;
  std::vector<MoveEvent> moves_;
};

}  // namespace csmmab
