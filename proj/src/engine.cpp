#include "csmmab/engine.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

#include "csmmab/error.hpp"

namespace csmmab {

std::string to_string(SlotLabel label) {
  switch (label.kind) {
    case SlotKind::startup: return "CFL";
    case SlotKind::s1: return "S1";
    case SlotKind::s2: return "S2";
    case SlotKind::s3: return "S3(" + std::to_string(label.mini_frame) + ")";
    case SlotKind::s4: return "S4(" + std::to_string(label.mini_frame) + ")";
    case SlotKind::tail: return "TAIL";
  }
  return "?";
}

SuperFrameSchedule::SuperFrameSchedule(std::size_t n_channels) : n_channels_(n_channels) {
  if (n_channels == 0) throw Error(ErrorKind::domain, "super frame needs K >= 1");
}

SlotLabel SuperFrameSchedule::kind_at(std::size_t offset) const {
  if (offset < 1 || offset > length()) {
    throw Error(ErrorKind::domain, "slot offset " + std::to_string(offset) + " outside 1.." +
                                       std::to_string(length()));
  }
  if (offset == 1) return {SlotKind::s1, 0};
  if (offset == 2) return {SlotKind::s2, 0};
  const std::size_t m = (offset - 1) / 2;
  return {offset % 2 == 1 ? SlotKind::s3 : SlotKind::s4, m};
}

double EngineConfig::epsilon_for(std::size_t n_channels) const {
  return epsilon.value_or(1.0 / static_cast<double>(n_channels));
}

void EngineConfig::validate(std::size_t n_channels) const {
  const double eps = epsilon_for(n_channels);
  if (!(eps > 0.0 && eps <= 1.0)) {
    throw Error(ErrorKind::domain, "epsilon must lie in (0, 1]");
  }
  if (horizon < 2 * n_channels) {
    throw Error(ErrorKind::domain, "horizon " + std::to_string(horizon) +
                                       " shorter than one super frame (" +
                                       std::to_string(2 * n_channels) + " slots)");
  }
  if (cfl_max_slots == 0) throw Error(ErrorKind::domain, "cfl_max_slots must be positive");
}

StartupResult run_cfl_startup(const RewardMatrix& matrix, std::span<AgentState> agents, Rng& rng,
                              std::uint64_t max_slots, std::uint64_t first_t,
                              SimulationObserver* observer) {
  const std::size_t n = matrix.users();
  const std::size_t k = matrix.channels();
  if (agents.size() != n) throw Error(ErrorKind::contract_violation, "one agent per user required");

  std::vector<std::size_t> candidate(n);
  for (auto& c : candidate) c = rng.index(k);
  std::vector<std::optional<std::size_t>> tx(n);
  SlotRecord rec;
  std::uint64_t slots = 0;
  for (;;) {
    if (slots == max_slots) {
      throw Error(ErrorKind::startup_timeout,
                  "startup did not reach an orthogonal configuration within " +
                      std::to_string(max_slots) + " slots");
    }
    const std::uint64_t t = first_t + slots;
    ++slots;
    for (std::size_t u = 0; u < n; ++u) tx[u] = candidate[u];
    resolve_slot_into(matrix, tx, rng, t, rec);
    bool any_collision = false;
    for (std::size_t u = 0; u < n; ++u) {
      if (rec.collided[u]) {
        any_collision = true;
      } else {
        agents[u].record(candidate[u], rec.rewards[u]);
      }
    }
    if (observer) observer->on_slot(rec, {SlotKind::startup, 0}, candidate);
    if (!any_collision) break;
    for (std::size_t u = 0; u < n; ++u) {
      if (rec.collided[u]) candidate[u] = rng.index(k);
    }
  }
  for (std::size_t u = 0; u < n; ++u) agents[u].move_to(candidate[u]);
  return {std::move(candidate), slots};
}

std::optional<std::size_t> elect_initiator(std::span<const std::uint8_t> flags) {
  std::optional<std::size_t> winner;
  for (std::size_t u = 0; u < flags.size(); ++u) {
    if (!flags[u]) continue;
    if (winner) return std::nullopt;
    winner = u;
  }
  return winner;
}

std::optional<std::size_t> identify_initiator(std::span<const std::uint8_t> sensing,
                                              std::span<const std::size_t> assignment) {
  std::optional<std::size_t> busy;
  for (std::size_t k = 0; k < sensing.size(); ++k) {
    if (!sensing[k]) continue;
    if (busy) return std::nullopt;
    busy = k;
  }
  if (!busy) return std::nullopt;
  const auto it = std::find(assignment.begin(), assignment.end(), *busy);
  if (it == assignment.end()) return std::nullopt;
  return static_cast<std::size_t>(it - assignment.begin());
}

struct Engine::FrameContext {
  SuperFrameSummary summary;
  std::optional<std::size_t> initiator;
  std::size_t initiator_channel = 0;
};

Engine::Engine(RewardMatrix matrix, EngineConfig config, std::uint64_t seed,
               SimulationObserver* observer)
    : matrix_(std::move(matrix)),
      config_(config),
      schedule_(matrix_.channels()),
      rng_(seed),
      observer_(observer),
      tx_(matrix_.users()),
      index_buffer_(matrix_.channels()) {
  config_.validate(matrix_.channels());
  agents_.reserve(matrix_.users());
  for (std::size_t u = 0; u < matrix_.users(); ++u) {
    agents_.emplace_back(u, matrix_.channels(), 0);
    if (config_.oracle_stats) agents_.back().use_oracle_means(matrix_.row(u));
  }
}

void Engine::startup() {
  if (started_) throw Error(ErrorKind::contract_violation, "startup already ran");
  const StartupResult res =
      run_cfl_startup(matrix_, agents_, rng_, config_.cfl_max_slots, t_ + 1, observer_);
  t_ += res.slots;
  startup_slots_ = res.slots;
  assignment_ = res.assignment;
  initial_assignment_ = res.assignment;
  occupancy_.assign(matrix_.channels(), 0);
  for (std::size_t c : assignment_) occupancy_[c] = 1;
  started_ = true;
  check_orthogonal();
}

const SlotRecord& Engine::execute() {
  ++t_;
  resolve_slot_into(matrix_, tx_, rng_, t_, record_);
  for (auto r : record_.rewards) total_reward_ += r;
  return record_;
}

void Engine::learn_own_channel(const SlotRecord& rec, FrameContext* frame, bool s4) {
  for (std::size_t u = 0; u < agents_.size(); ++u) {
    const auto& tx = rec.transmissions[u];
    if (!tx || *tx != assignment_[u] || rec.collided[u]) continue;
    agents_[u].record(*tx, rec.rewards[u]);
    if (frame) {
      ++frame->summary.learning_samples;
      if (s4) ++frame->summary.s4_learning_samples;
    }
  }
}

namespace {

void notify(SimulationObserver* observer, const SlotRecord& rec, SlotLabel label,
            std::span<const std::size_t> assignment) {
  if (observer) observer->on_slot(rec, label, assignment);
}

}  // namespace

void Engine::run_regular_slot(SlotLabel label) {
  if (!started_) throw Error(ErrorKind::contract_violation, "run startup first");
  for (std::size_t u = 0; u < agents_.size(); ++u) tx_[u] = assignment_[u];
  const SlotRecord& rec = execute();
  learn_own_channel(rec, nullptr, false);
  occupancy_ = rec.sensing;
  notify(observer_, rec, label, assignment_);
}

SuperFrameSummary Engine::run_super_frame() {
  if (!started_) throw Error(ErrorKind::contract_violation, "run startup first");
  const std::size_t n = agents_.size();
  FrameContext frame;
  frame.summary.index = ++super_frames_;
  frame.summary.first_slot = t_ + 1;
  const std::uint64_t t_start = t_ + 1;
  const double eps = config_.epsilon_for(matrix_.channels());

  std::vector<std::uint8_t> flags(n, 0);
  for (std::size_t u = 0; u < n; ++u) {
    AgentState& agent = agents_[u];
    agent.decision_indices(t_start, index_buffer_);
    agent.pref_list = rank_by_indices(index_buffer_, agent.current_channel());
    agent.pref_cursor = 0;
    agent.role = agent.pref_list.empty() ? Role::idle : Role::candidate;
    agent.flag = !agent.pref_list.empty() && draw_flag(agent, eps, rng_);
    flags[u] = agent.flag ? 1 : 0;
  }
  frame.summary.flag_raisers = static_cast<std::size_t>(std::count(flags.begin(), flags.end(), 1));

  // S1: flag raisers transmit on their own channels; a single busy channel names the initiator.
  for (std::size_t u = 0; u < n; ++u) {
    tx_[u] = flags[u] ? std::optional<std::size_t>(assignment_[u]) : std::nullopt;
  }
  {
    const SlotLabel label{SlotKind::s1, 0};
    const SlotRecord& rec = execute();
    frame.initiator = identify_initiator(rec.sensing, assignment_);
    if (frame.initiator != elect_initiator(flags)) {
      throw std::logic_error("S1 sensing disagrees with the flag vector");
    }
    frame.summary.signalling_actions += 2;
    notify(observer_, rec, label, assignment_);
  }

  // S2: the initiator transmits alone; everybody notes her channel.
  if (frame.initiator) {
    const std::size_t init = *frame.initiator;
    std::fill(tx_.begin(), tx_.end(), std::nullopt);
    tx_[init] = assignment_[init];
    const SlotLabel label{SlotKind::s2, 0};
    const SlotRecord& rec = execute();
    const auto busy = std::find(rec.sensing.begin(), rec.sensing.end(), 1);
    frame.initiator_channel = static_cast<std::size_t>(busy - rec.sensing.begin());
    agents_[init].role = Role::initiator;
    agents_[init].pref_cursor = 1;
    frame.summary.initiator = init;
    notify(observer_, rec, label, assignment_);
  } else {
    for (std::size_t u = 0; u < n; ++u) tx_[u] = assignment_[u];
    const SlotLabel label{SlotKind::s2, 0};
    const SlotRecord& rec = execute();
    learn_own_channel(rec, &frame, false);
    occupancy_ = rec.sensing;
    notify(observer_, rec, label, assignment_);
  }
  frame.summary.signalling_actions += 2;

  const std::uint64_t reserved_per_s4 = n >= 2 ? n - 2 : 0;
  for (std::size_t m = 1; m <= schedule_.mini_frames(); ++m) {
    frame.summary.signalling_actions += 4;
    frame.summary.reserved_learning_samples += reserved_per_s4;
    const bool proposing = frame.initiator && agents_[*frame.initiator].pref_cursor >= 1 &&
                           agents_[*frame.initiator].pref_cursor <= agents_[*frame.initiator].pref_list.size();
    if (proposing) {
      run_miniframe(m, frame);
      continue;
    }
    for (const SlotKind kind : {SlotKind::s3, SlotKind::s4}) {
      for (std::size_t u = 0; u < n; ++u) tx_[u] = assignment_[u];
      const SlotLabel label{kind, m};
      const SlotRecord& rec = execute();
      learn_own_channel(rec, &frame, kind == SlotKind::s4);
      occupancy_ = rec.sensing;
      notify(observer_, rec, label, assignment_);
    }
  }

  for (auto& agent : agents_) {
    agent.role = Role::idle;
    agent.flag = false;
    agent.pref_cursor = 0;
  }
  if (observer_) observer_->on_super_frame(frame.summary);
  return frame.summary;
}

void Engine::run_miniframe(std::size_t m, FrameContext& frame) {
  const std::size_t n = agents_.size();
  const std::size_t init = *frame.initiator;
  AgentState& initiator = agents_[init];
  const std::size_t target = initiator.pref_list[initiator.pref_cursor - 1];
  ++frame.summary.proposals;

  // S3: the initiator signals on her target; everyone else holds her own channel,
  // so an occupant of the target sees a collision.
  for (std::size_t u = 0; u < n; ++u) tx_[u] = assignment_[u];
  tx_[init] = target;
  const SlotLabel s3{SlotKind::s3, m};
  const SlotRecord& rec3 = execute();
  const std::uint64_t t_s3 = rec3.t;

  if (!occupancy_[target]) {
    // channel is available
    if (rec3.collided[init]) throw std::logic_error("occupancy snapshot out of date");
    initiator.record(target, rec3.rewards[init]);
    ++frame.summary.learning_samples;
    apply_move({t_s3, frame.summary.index, init, assignment_[init], target, std::nullopt}, frame);
    initiator.pref_cursor = 0;
    notify(observer_, rec3, s3, assignment_);

    for (std::size_t u = 0; u < n; ++u) tx_[u] = assignment_[u];
    const SlotLabel s4{SlotKind::s4, m};
    const SlotRecord& rec4 = execute();
    learn_own_channel(rec4, &frame, true);
    occupancy_ = rec4.sensing;
    notify(observer_, rec4, s4, assignment_);
    return;
  }

  std::optional<std::size_t> responder;
  for (std::size_t u = 0; u < n; ++u) {
    if (u != init && rec3.collided[u]) responder = u;
  }
  if (!responder) throw std::logic_error("occupied target produced no collision");
  notify(observer_, rec3, s3, assignment_);

  AgentState& resp = agents_[*responder];
  resp.role = Role::responder;
  const bool accept = respond_to_proposal(resp, frame.initiator_channel, t_s3);

  // S4: acceptance is the responder transmitting on the initiator's channel.
  for (std::size_t u = 0; u < n; ++u) tx_[u] = assignment_[u];
  tx_[init] = std::nullopt;
  tx_[*responder] = accept ? std::optional<std::size_t>(frame.initiator_channel) : std::nullopt;
  const SlotLabel s4{SlotKind::s4, m};
  const SlotRecord& rec4 = execute();
  learn_own_channel(rec4, &frame, true);
  const bool accepted = rec4.sensing[frame.initiator_channel] != 0;
  if (accepted) {
    apply_move({rec4.t, frame.summary.index, init, assignment_[init], target, *responder}, frame);
    initiator.pref_cursor = 0;
  } else {
    ++initiator.pref_cursor;
  }
  resp.role = Role::idle;
  notify(observer_, rec4, s4, assignment_);
}

void Engine::apply_move(const MoveEvent& event, FrameContext& frame) {
  if (event.partner) {
    assignment_[*event.partner] = event.from;
    agents_[*event.partner].move_to(event.from);
  }
  assignment_[event.user] = event.to;
  agents_[event.user].move_to(event.to);
  check_orthogonal();
  moves_.push_back(event);
  frame.summary.move = event;
  if (observer_) observer_->on_move(event);
}

void Engine::check_orthogonal() const {
  std::vector<std::uint8_t> used(matrix_.channels(), 0);
  for (std::size_t c : assignment_) {
    if (used[c]) throw std::logic_error("assignment lost orthogonality");
    used[c] = 1;
  }
}

RunResult Engine::run() {
  if (!started_) startup();
  RunResult result;
  result.startup_slots = startup_slots_;
  result.initial_assignment = initial_assignment_;
  const std::uint64_t frames = config_.horizon / schedule_.length();
  const std::uint64_t tail = config_.horizon % schedule_.length();
  result.super_frames.reserve(frames);
  for (std::uint64_t f = 0; f < frames; ++f) result.super_frames.push_back(run_super_frame());
  for (std::uint64_t s = 0; s < tail; ++s) run_regular_slot({SlotKind::tail, 0});
  result.final_assignment = assignment_;
  result.moves = moves_;
  result.total_reward = total_reward_;
  return result;
}

}  // namespace csmmab
