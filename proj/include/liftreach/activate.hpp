#pragma once

#include "liftreach/brs.hpp"
#include "liftreach/model.hpp"
#include "liftreach/ring.hpp"
#include "liftreach/target.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

namespace liftreach {

struct ActivationConfig {
  int samples_per_horizon = 200;
  std::array<double, 2> box_x1{1.0, 6.0};   // sampling box for initial states
  std::array<double, 2> box_x2{1.0, 6.0};
  std::array<double, 2> box_x3{0.5, 10.0};
  double follow_through_s = 2.5;            // extra sim time to observe the crash
  double terminal_tol = 0.5;                // per-coordinate prediction tolerance
  int max_rejection = 2000000;
};

struct ActivationSample {
  StateVec x0;
  int plan_steps = 0;          // length of the synthesized input sequence
  bool triggered = false;
  int trigger_step = -1;       // simulator step at which the backdoor latched
  bool collided = false;
  int collision_step = -1;
  StateVec predicted_terminal = StateVec::Zero();
  StateVec simulated_terminal = StateVec::Zero();
  std::array<double, 3> terminal_err{0.0, 0.0, 0.0};
  bool within_tol = false;
};

struct ActivationReport {
  double t_abs = 0.0;
  int K = 0;
  int n_samples = 0;
  int n_activated = 0;
  double rate = 0.0;
  double mean_steps_to_trigger = 0.0;
  int n_collisions = 0;
};

struct ActivationResult {
  ActivationReport report;
  std::vector<ActivationSample> samples;
};

/// Closed-loop check of one BRS horizon: rejection-sample initial states
/// from the set, realize each on the ring, replay the synthesized bang-bang
/// inputs against the full simulator with the backdoor armed, and record
/// whether the trigger actually fired, where the surrogate predicted the
/// state at that moment, and whether the crash followed.
inline ActivationResult validate_activation(const LiftedModel& model, const BRSChain& chain,
                                            const TriggerSpec& trigger, const RingConfig& ring,
                                            const IDMParams& idm, const InputBounds& ib,
                                            const ActivationConfig& cfg, std::uint64_t seed) {
  model.validate();
  chain.validate();
  MonomialBasis basis = model.basis();
  HalfspaceTarget target = lifted_target(trigger, basis);
  BackdoorConfig bd;
  bd.enabled = true;
  bd.trigger = trigger;

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> d1(cfg.box_x1[0], cfg.box_x1[1]);
  std::uniform_real_distribution<double> d2(cfg.box_x2[0], cfg.box_x2[1]);
  std::uniform_real_distribution<double> d3(cfg.box_x3[0], cfg.box_x3[1]);

  const double dt = model.dt;
  const int follow_steps = static_cast<int>(std::ceil(cfg.follow_through_s / dt));

  ActivationResult out;
  out.report.t_abs = chain.K * dt;
  out.report.K = chain.K;
  out.report.n_samples = cfg.samples_per_horizon;

  long rejections = 0;
  double steps_sum = 0.0;
  for (int s = 0; s < cfg.samples_per_horizon; ++s) {
    StateVec x0;
    bool found = false;
    while (rejections < cfg.max_rejection) {
      ++rejections;
      x0 = StateVec(d1(rng), d2(rng), d3(rng));
      if (chain.margin(basis.lift(x0), chain.K) <= 0.0) {
        found = true;
        break;
      }
    }
    if (!found)
      throw std::runtime_error(
          "activation: rejection sampling found no reachable state in the sampling box");

    ActivationSample rec;
    rec.x0 = x0;
    rec.plan_steps = chain.best_step(basis.lift(x0), chain.K);
    std::vector<double> plan = optimal_inputs(model, target, rec.plan_steps, ib);
    std::vector<double> inputs(static_cast<std::size_t>(chain.K), 0.0);
    std::copy(plan.begin(), plan.end(), inputs.begin());
    Trajectory predicted = predict(model, x0, inputs);

    RingState st = realize_ring_state(x0, ring, idm);
    Trajectory sim;
    sim.dt = dt;
    sim.states.push_back(observe(st, ring));
    for (int k = 0; k < chain.K + follow_steps && !st.collided; ++k) {
      double u = k < chain.K ? clamp_input(inputs[static_cast<std::size_t>(k)], ib) : 0.0;
      step_ring(st, ring, idm, bd, u, dt);
      sim.inputs.push_back(u);
      sim.states.push_back(observe(st, ring));
    }

    rec.triggered = st.first_trigger_step >= 0 && st.first_trigger_step <= chain.K;
    rec.trigger_step = st.first_trigger_step;
    rec.collided = st.collided;
    rec.collision_step = st.collision_step;
    if (rec.triggered) {
      int cmp = std::min<int>(rec.trigger_step, chain.K);
      rec.predicted_terminal = predicted.states[static_cast<std::size_t>(cmp)];
      rec.simulated_terminal = sim.states[static_cast<std::size_t>(cmp)];
      bool ok = true;
      for (int c = 0; c < 3; ++c) {
        rec.terminal_err[static_cast<std::size_t>(c)] =
            std::abs(rec.predicted_terminal(c) - rec.simulated_terminal(c));
        ok = ok && rec.terminal_err[static_cast<std::size_t>(c)] <= cfg.terminal_tol;
      }
      rec.within_tol = ok;
      ++out.report.n_activated;
      steps_sum += rec.trigger_step;
      if (rec.collided) ++out.report.n_collisions;
    }
    out.samples.push_back(rec);
  }
  out.report.rate =
      static_cast<double>(out.report.n_activated) / static_cast<double>(out.report.n_samples);
  out.report.mean_steps_to_trigger =
      out.report.n_activated > 0 ? steps_sum / out.report.n_activated : 0.0;
  return out;
}

inline ordered_json activation_report_to_json(const ActivationReport& r) {
  ordered_json j;
  j["t_abs"] = r.t_abs;
  j["n_samples"] = r.n_samples;
  j["n_activated"] = r.n_activated;
  j["rate"] = r.rate;
  j["mean_steps_to_trigger"] = r.mean_steps_to_trigger;
  j["n_collisions"] = r.n_collisions;
  return j;
}

/// Fraction of activated samples whose crash arrived within window_s of the
/// trigger.
inline double collision_follow_rate(const ActivationResult& res, double window_s, double dt) {
  int activated = 0, crashed = 0;
  int window_steps = static_cast<int>(std::ceil(window_s / dt));
  for (const ActivationSample& s : res.samples) {
    if (!s.triggered) continue;
    ++activated;
    if (s.collided && s.collision_step - s.trigger_step <= window_steps) ++crashed;
  }
  return activated > 0 ? static_cast<double>(crashed) / activated : 0.0;
}

inline double terminal_agreement_rate(const ActivationResult& res) {
  int activated = 0, within = 0;
  for (const ActivationSample& s : res.samples) {
    if (!s.triggered) continue;
    ++activated;
    if (s.within_tol) ++within;
  }
  return activated > 0 ? static_cast<double>(within) / activated : 0.0;
}

}  // namespace liftreach
