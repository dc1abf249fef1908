#pragma once

#include "liftreach/core.hpp"
#include "liftreach/csv.hpp"
#include "liftreach/idm.hpp"
#include "liftreach/target.hpp"

#include <cmath>
#include <functional>
#include <memory>
#include <random>
#include <stdexcept>
#include <vector>

namespace liftreach {

struct RingConfig {
  double track_length = 230.0;
  int n_vehicles = 21;
  double vehicle_length = 5.0;
  int av_index = 0;
  int adversary_index = 1;     // must be the vehicle directly ahead of the AV
  double av_headway_scale = 1.2;

  void validate() const {
    if (n_vehicles < 3) throw std::invalid_argument("ring: need at least 3 vehicles");
    if (!(track_length > n_vehicles * vehicle_length))
      throw std::invalid_argument("ring: track shorter than the vehicles on it");
    if (av_index < 0 || av_index >= n_vehicles)
      throw std::invalid_argument("ring: av_index out of range");
    if (adversary_index != (av_index + 1) % n_vehicles)
      throw std::invalid_argument("ring: adversary must be directly ahead of the AV");
    if (!(av_headway_scale >= 1.0))
      throw std::invalid_argument("ring: av_headway_scale must be >= 1");
  }
};

struct BackdoorConfig {
  bool enabled = true;
  TriggerSpec trigger;
};

/// Vehicle i follows vehicle (i+1) % n. Positions are unwrapped front-bumper
/// coordinates (monotone in time, index order preserved); they are reduced to
/// [0, track_length) only when logged.
struct RingState {
  std::vector<double> positions;
  std::vector<double> speeds;
  double t = 0.0;
  int step_count = 0;
  bool collided = false;
  int collision_step = -1;
  int latch_remaining = 0;     // backdoor override steps left on the AV
  int first_trigger_step = -1;
  int n_triggers = 0;
};

inline double ring_wrap(double pos, const RingConfig& cfg) {
  double p = std::fmod(pos, cfg.track_length);
  return p < 0.0 ? p + cfg.track_length : p;
}

/// Bumper-to-bumper gap between vehicle i and the vehicle ahead of it;
/// negative once they overlap.
inline double net_gap(const RingState& st, const RingConfig& cfg, int i) {
  int lead = (i + 1) % cfg.n_vehicles;
  double d = st.positions[static_cast<std::size_t>(lead)] - st.positions[static_cast<std::size_t>(i)];
  if (lead <= i) d += cfg.track_length;  // the pair that closes the ring
  return d - cfg.vehicle_length;
}

inline StateVec observe(const RingState& st, const RingConfig& cfg) {
  return StateVec(st.speeds[static_cast<std::size_t>(cfg.av_index)],
                  st.speeds[static_cast<std::size_t>(cfg.adversary_index)],
                  net_gap(st, cfg, cfg.av_index));
}

inline bool detect_collision(const RingState& st, const RingConfig& cfg) {
  for (int i = 0; i < cfg.n_vehicles; ++i)
    if (net_gap(st, cfg, i) <= 0.0) return true;
  return false;
}

/// Victim controller: IDM with a stretched headway unless the backdoor
/// latch is active. Entering the trigger set arms a latch of
/// ceil(t_adv / dt) override steps; the latch can re-arm after it expires.
inline double av_controller(const StateVec& obs, RingState& st, const IDMParams& idm,
                            const RingConfig& cfg, const BackdoorConfig& bd, double dt) {
  if (st.latch_remaining > 0) {
    --st.latch_remaining;
    return bd.trigger.a_adv;
  }
  if (bd.enabled && in_trigger_set(obs, bd.trigger)) {
    st.latch_remaining = static_cast<int>(std::ceil(bd.trigger.t_adv / dt)) - 1;
    if (st.first_trigger_step < 0) st.first_trigger_step = st.step_count;
    ++st.n_triggers;
    return bd.trigger.a_adv;
  }
  IDMParams av = idm;
  av.T *= cfg.av_headway_scale;
  return idm_accel(obs(0), obs(1), obs(2), av);
}

/// One simulator step: IDM for human drivers, the victim controller for the
/// AV, the external input for the adversary applied as commanded (attack
/// authority limits live at the attack interfaces, not in the plant);
/// semi-implicit Euler; speeds never go negative. A collision freezes the
/// ring.
inline void step_ring(RingState& st, const RingConfig& cfg, const IDMParams& idm,
                      const BackdoorConfig& bd, double u, double dt) {
  if (st.collided) return;
  const int n = cfg.n_vehicles;
  std::vector<double> accel(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    if (i == cfg.adversary_index) {
      accel[static_cast<std::size_t>(i)] = u;
    } else if (i == cfg.av_index) {
      accel[static_cast<std::size_t>(i)] = av_controller(observe(st, cfg), st, idm, cfg, bd, dt);
    } else {
      accel[static_cast<std::size_t>(i)] = idm_accel(
          st.speeds[static_cast<std::size_t>(i)], st.speeds[static_cast<std::size_t>((i + 1) % n)],
          net_gap(st, cfg, i), idm);
    }
  }
  for (int i = 0; i < n; ++i) {
    auto k = static_cast<std::size_t>(i);
    st.speeds[k] = std::max(0.0, st.speeds[k] + accel[k] * dt);
    st.positions[k] += st.speeds[k] * dt;
  }
  ++st.step_count;
  st.t += dt;
  if (detect_collision(st, cfg)) {
    st.collided = true;
    st.collision_step = st.step_count;
    for (double& v : st.speeds) v = 0.0;
  }
}

/// Evenly spaced ring at the IDM equilibrium speed for that spacing.
inline RingState init_ring_uniform(const RingConfig& cfg, const IDMParams& idm) {
  cfg.validate();
  RingState st;
  double sp = cfg.track_length / cfg.n_vehicles;
  double v_eq = idm_equilibrium_speed(sp - cfg.vehicle_length, idm);
  for (int i = 0; i < cfg.n_vehicles; ++i) {
    st.positions.push_back(sp * i);
    st.speeds.push_back(v_eq);
  }
  return st;
}

/// Uniform ring with seeded position and speed jitter, keeping every gap at
/// least min_gap and the index order intact.
inline RingState init_ring_perturbed(const RingConfig& cfg, const IDMParams& idm,
                                     std::mt19937_64& rng, double pos_jitter = 2.0,
                                     double speed_jitter = 1.0, double min_gap = 0.5) {
  RingState st = init_ring_uniform(cfg, idm);
  double sp = cfg.track_length / cfg.n_vehicles;
  double max_shift =
      std::max(0.0, std::min(pos_jitter, 0.5 * (sp - cfg.vehicle_length - min_gap)));
  std::uniform_real_distribution<double> dp(-max_shift, max_shift);
  std::uniform_real_distribution<double> dv(-speed_jitter, speed_jitter);
  for (int i = 0; i < cfg.n_vehicles; ++i) {
    auto k = static_cast<std::size_t>(i);
    st.positions[k] += dp(rng);
    st.speeds[k] = std::max(0.0, st.speeds[k] + dv(rng));
  }
  return st;
}

/// Place the AV and its leader so the observation equals x, then spread the
/// remaining vehicles evenly ahead of the leader at their equilibrium speed.
inline RingState realize_ring_state(const StateVec& x, const RingConfig& cfg,
                                    const IDMParams& idm) {
  cfg.validate();
  if (!(x(2) > 0.0)) throw std::invalid_argument("realize: gap must be positive");
  if (!(x(0) >= 0.0 && x(1) >= 0.0)) throw std::invalid_argument("realize: speeds must be >= 0");
  const int n = cfg.n_vehicles;
  const int rest = n - 2;
  double sp = (cfg.track_length - x(2) - cfg.vehicle_length) / (rest + 1);
  if (!(sp > cfg.vehicle_length))
    throw std::invalid_argument("realize: gap too large for the ring population");
  RingState st;
  st.positions.assign(static_cast<std::size_t>(n), 0.0);
  st.speeds.assign(static_cast<std::size_t>(n), 0.0);
  double v_rest = idm_equilibrium_speed(sp - cfg.vehicle_length, idm);
  st.positions[static_cast<std::size_t>(cfg.av_index)] = 0.0;
  st.speeds[static_cast<std::size_t>(cfg.av_index)] = x(0);
  st.positions[static_cast<std::size_t>(cfg.adversary_index)] = x(2) + cfg.vehicle_length;
  st.speeds[static_cast<std::size_t>(cfg.adversary_index)] = x(1);
  for (int j = 1; j <= rest; ++j) {
    int idx = (cfg.adversary_index + j) % n;
    st.positions[static_cast<std::size_t>(idx)] = x(2) + cfg.vehicle_length + sp * j;
    st.speeds[static_cast<std::size_t>(idx)] = v_rest;
  }
  return st;
}

using AdversaryPolicy = std::function<double(int step, const RingState&)>;

struct EpisodeResult {
  Trajectory obs;                     // (x1, x2, x3) with the applied adversary input
  std::vector<VehicleLogRow> log;
  bool collided = false;
  int collision_step = -1;
  int first_trigger_step = -1;
  int n_triggers = 0;
  RingState final_state;
};

inline void append_log(std::vector<VehicleLogRow>& log, const RingState& st,
                       const RingConfig& cfg) {
  for (int i = 0; i < cfg.n_vehicles; ++i)
    log.push_back({st.t, i, ring_wrap(st.positions[static_cast<std::size_t>(i)], cfg),
                   st.speeds[static_cast<std::size_t>(i)]});
}

inline EpisodeResult run_episode(RingState st, const RingConfig& cfg, const IDMParams& idm,
                                 const BackdoorConfig& bd, const AdversaryPolicy& policy,
                                 int n_steps, double dt, bool keep_log = true) {
  cfg.validate();
  idm.validate();
  EpisodeResult out;
  out.obs.dt = dt;
  out.obs.states.push_back(observe(st, cfg));
  if (keep_log) append_log(out.log, st, cfg);
  for (int k = 0; k < n_steps && !st.collided; ++k) {
    double u = policy(k, st);
    step_ring(st, cfg, idm, bd, u, dt);
    out.obs.inputs.push_back(u);
    out.obs.states.push_back(observe(st, cfg));
    if (keep_log) append_log(out.log, st, cfg);
  }
  out.collided = st.collided;
  out.collision_step = st.collision_step;
  out.first_trigger_step = st.first_trigger_step;
  out.n_triggers = st.n_triggers;
  out.final_state = std::move(st);
  return out;
}

/// Adversary mimics a human IDM driver (used for baseline episodes).
inline AdversaryPolicy idm_adversary_policy(const RingConfig& cfg, const IDMParams& idm) {
  return [cfg, idm](int, const RingState& st) {
    return idm_accel(st.speeds[static_cast<std::size_t>(cfg.adversary_index)],
                     st.speeds[static_cast<std::size_t>((cfg.adversary_index + 1) % cfg.n_vehicles)],
                     net_gap(st, cfg, cfg.adversary_index), idm);
  };
}

/// Fresh-step uniform excitation over the admissible accelerations.
inline AdversaryPolicy random_adversary_policy(std::mt19937_64& rng, const InputBounds& ib) {
  return [&rng, ib](int, const RingState&) {
    return std::uniform_real_distribution<double>(ib.a_min, ib.a_max)(rng);
  };
}

/// AV and adversary realized at a seeded random point of the state box, with
/// the rest of the platoon evenly spaced; used to cover the whole fitting
/// domain rather than just the neighbourhood of equilibrium flow.
inline RingState init_ring_sampled(const RingConfig& cfg, const IDMParams& idm,
                                   const StateBounds& sb, std::mt19937_64& rng,
                                   double min_gap = 0.5) {
  std::uniform_real_distribution<double> sv(0.0, sb.v_max);
  std::uniform_real_distribution<double> sg(std::max(min_gap, sb.dd_min), sb.dd_max);
  StateVec x(sv(rng), sv(rng), sg(rng));
  return realize_ring_state(x, cfg, idm);
}

/// Short excitation episodes with the backdoor disabled, each starting at a
/// random point of the state box and driven by per-step uniform adversary
/// accelerations. Collided steps are discarded and the episode restarts;
/// transitions are kept only when both endpoints are inside the state bounds.
inline Dataset collect_dataset(const RingConfig& cfg, const IDMParams& idm,
                               const StateBounds& sb, const InputBounds& ib, int n_samples,
                               std::uint64_t seed, double dt, int episode_steps = 25) {
  cfg.validate();
  idm.validate();
  if (n_samples < 1) throw std::invalid_argument("collect: need a positive sample count");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> du(ib.a_min, ib.a_max);
  BackdoorConfig off;
  off.enabled = false;
  Dataset data;
  data.reserve(static_cast<std::size_t>(n_samples));
  while (static_cast<int>(data.size()) < n_samples) {
    RingState st = init_ring_sampled(cfg, idm, sb, rng);
    StateVec x = observe(st, cfg);
    for (int k = 0; k < episode_steps && static_cast<int>(data.size()) < n_samples; ++k) {
      double u = du(rng);
      step_ring(st, cfg, idm, off, u, dt);
      if (st.collided) break;
      StateVec xp = observe(st, cfg);
      if (in_bounds(x, sb) && in_bounds(xp, sb)) data.push_back({x, u, xp});
      x = xp;
    }
  }
  return data;
}

/// View the ring as the three-state plant the surrogate is trained on:
/// the returned system holds its own ring state and steps it with the
/// externally supplied adversary input (clamped to the attack authority).
/// Refuses to advance once collided.
inline BlackBoxSystem ring_black_box(const RingState& init, const RingConfig& cfg,
                                     const IDMParams& idm, const BackdoorConfig& bd,
                                     const InputBounds& ib) {
  auto st = std::make_shared<RingState>(init);
  BlackBoxSystem sys;
  sys.step = [st, cfg, idm, bd, ib](const StateVec&, double u, double dt)
      -> std::optional<StateVec> {
    if (st->collided) return std::nullopt;
    step_ring(*st, cfg, idm, bd, clamp_input(u, ib), dt);
    return observe(*st, cfg);
  };
  return sys;
}

}  // namespace liftreach
