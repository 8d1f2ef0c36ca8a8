#include "tacsim/gripper_sim.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "tacsim/errors.hpp"
#include "tacsim/estimation.hpp"

namespace tacsim::grasp {

double GripperGeometry::travel_per_increment_mm() const {
  return pinion_radius_mm * kMotorIncrementDeg * M_PI / 180.0;
}

double GripperGeometry::opening_at(int increments_a, int increments_b) const {
  return opening_mm - travel_per_increment_mm() * (increments_a + increments_b);
}

ObjectModel ObjectModel::none() { return {}; }

ObjectModel ObjectModel::egg(double size_mm, double stiffness_n_per_mm, double crush_force_n) {
  ObjectModel m;
  m.kind = ObjectKind::Egg;
  m.size_mm = size_mm;
  m.stiffness_n_per_mm = stiffness_n_per_mm;
  m.crush_force_n = crush_force_n;
  return m;
}

ObjectModel ObjectModel::tweezers(double object_size_mm, double object_stiffness_n_per_mm) {
  ObjectModel m;
  m.kind = ObjectKind::Tweezers;
  m.size_mm = object_size_mm;
  m.stiffness_n_per_mm = object_stiffness_n_per_mm;
  return m;
}

ObjectModel ObjectModel::rigid(double size_mm, double stiffness_n_per_mm) {
  ObjectModel m;
  m.kind = ObjectKind::Rigid;
  m.size_mm = size_mm;
  m.stiffness_n_per_mm = stiffness_n_per_mm;
  return m;
}

void ObjectModel::validate() const {
  if (kind == ObjectKind::None) return;
  if (!(stiffness_n_per_mm > 0.0)) throw InvalidArgument("object stiffness must be > 0");
  if (!(crush_force_n >= 0.0)) throw InvalidArgument("crush force must be >= 0");
  if (!(size_mm > 0.0)) throw InvalidArgument("object size must be > 0");
  if (kind == ObjectKind::Tweezers) {
    if (!(spring_n_per_mm > 0.0)) throw InvalidArgument("tweezers spring rate must be > 0");
    if (!(size_mm < tip_opening_mm)) throw InvalidArgument("object does not fit between the tweezers tips");
    if (!(arm_width_mm > 0.0)) throw InvalidArgument("tweezers arm width must be > 0");
  }
}

double ObjectModel::contact_width_mm() const {
  switch (kind) {
    case ObjectKind::None: return -1.0;
    case ObjectKind::Tweezers: return arm_width_mm;
    default: return size_mm;
  }
}

double ObjectModel::compression_mm(double force_n) const {
  if (kind != ObjectKind::Tweezers) return force_n / stiffness_n_per_mm;
  const double free_travel = tip_opening_mm - size_mm;
  const double touch_force = spring_n_per_mm * free_travel;
  if (force_n <= touch_force) return force_n / spring_n_per_mm;
  return free_travel + (force_n - touch_force) / (spring_n_per_mm + stiffness_n_per_mm);
}

double contact_force_n(const ObjectModel& object, double opening_mm, double pad_mm_per_n) {
  if (object.kind == ObjectKind::None) return 0.0;
  const double closure = object.contact_width_mm() - opening_mm;
  if (closure <= 0.0) return 0.0;
  auto total = [&](double f) { return object.compression_mm(f) + 2.0 * pad_mm_per_n * f; };
  double lo = 0.0;
  double hi = 1.0;
  while (total(hi) < closure) hi *= 2.0;
  for (int i = 0; i < 200 && hi - lo > 1e-15 * hi; ++i) {
    const double mid = 0.5 * (lo + hi);
    (total(mid) < closure ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

double noise_free_signal(const sensor::UnitConfig& unit, double force_n, double a) {
  sensor::ContactStimulus stim;
  stim.location_mm = face_center_mm(unit.pitch_mm);
  stim.force_n = {0.0, 0.0, force_n};
  pipeline::RelativeFrame rel;
  rel.fa1 = sensor::fa1_response(stim, unit.fa1_layer, unit.pitch_mm);
  Vec3 d = sensor::bone_displacement_mm(stim.force_n, unit.sa2);
  if (unit.hysteresis) d.z() = sensor::soft_onset(d.z(), unit.sa2.layer.onset_mm);
  rel.sa2_ut = sensor::own_magnet_field_ut(d, unit.sa2) - sensor::own_magnet_field_ut(Vec3::Zero(), unit.sa2);
  return leveraged_signal(rel, a);
}

std::string event_log_header() { return "tick,phase,finger,motor_deg,g,contact_force_n,event"; }

std::string to_csv_row(const TraceRow& r) {
  return fmt::format("{},{},{},{},{},{},{}", r.tick, to_string(r.phase), r.finger, r.motor_deg, r.g,
                     r.contact_force_n, r.event);
}

GraspResult run_grasp(const GraspScenario& sc) {
  sc.object.validate();
  sc.policy.validate();
  sc.stream.validate();
  const int n = sc.stream.fingers;
  const double pad = sensor::compliance_mm_per_n(sc.unit.sa2.layer, sc.unit.sa2.bone_area_mm2);

  std::vector<sensor::SensorUnit> units;
  std::vector<pipeline::StreamProcessor> procs;
  for (int i = 0; i < n; ++i) {
    units.emplace_back(sc.unit, static_cast<std::uint8_t>(i));
    procs.emplace_back(sc.stream);
  }
  ControllerLimits limits;
  limits.max_increments = sc.geometry.max_increments;
  limits.settle_ticks = sc.stream.ma_window;
  limits.rate_hz = sc.stream.rate_hz;

  GraspResult res;
  GripperState state = initial_state(n);
  std::vector<double> g(static_cast<std::size_t>(n), 0.0);
  // Increments of every finger just before each finger's last closing step.
  std::vector<std::vector<int>> before_last_close(static_cast<std::size_t>(n));
  const bool single = std::holds_alternative<SingleThreshold>(sc.policy.mode);
  const auto max_ticks = static_cast<std::int64_t>(std::llround(sc.max_s * sc.stream.rate_hz));
  const auto post_hold = static_cast<std::int64_t>(std::llround(sc.post_hold_s * sc.stream.rate_hz));

  auto increments_of = [&state] {
    std::vector<int> v;
    for (const auto& f : state.fingers) v.push_back(f.increments);
    return v;
  };
  auto opening_of = [&](const std::vector<int>& inc) {
    return sc.geometry.opening_at(inc[0], n > 1 ? inc[1] : inc[0]);
  };

  auto quantum_at = [&](const std::vector<int>& now) {
    const double g_now = noise_free_signal(sc.unit, contact_force_n(sc.object, opening_of(now), pad), sc.policy.a);
    std::vector<double> q;
    for (const auto& prev : before_last_close) {
      if (prev.empty()) {
        q.push_back(0.0);
        continue;
      }
      const double f_prev = contact_force_n(sc.object, opening_of(prev), pad);
      q.push_back(g_now - noise_free_signal(sc.unit, f_prev, sc.policy.a));
    }
    return q;
  };

  std::int64_t tick = 0;
  for (; tick < max_ticks; ++tick) {
    const double force = contact_force_n(sc.object, opening_of(increments_of()), pad);
    res.max_force_n = std::max(res.max_force_n, force);
    if (sc.object.crush_force_n > 0.0 && force > sc.object.crush_force_n)
      throw CrushDetected(fmt::format("contact force {:.3f} N exceeds crush force {:.3f} N at tick {}", force,
                                      sc.object.crush_force_n, tick));

    sensor::ContactStimulus stim;
    stim.location_mm = face_center_mm(sc.unit.pitch_mm);
    stim.force_n = {0.0, 0.0, force};
    bool ready = true;
    for (int i = 0; i < n; ++i) {
      const auto frame = units[static_cast<std::size_t>(i)].sample(stim, tick * sc.stream.period_us());
      const auto rel = procs[static_cast<std::size_t>(i)].feed(frame);
      if (rel) g[static_cast<std::size_t>(i)] = leveraged_signal(*rel, sc.policy.a);
      else ready = false;
    }

    const GripperState before = state;
    std::vector<ControllerEvent> events;
    if (ready && state.phase != Phase::Done) {
      const std::vector<int> inc_before = increments_of();
      StepResult step = controller_step(state, sc.policy, g, limits);
      state = std::move(step.state);
      events = std::move(step.events);
      for (int i = 0; i < n; ++i)
        if (step.commands[static_cast<std::size_t>(i)] == Command::Close)
          before_last_close[static_cast<std::size_t>(i)] = inc_before;
    }

    for (int i = 0; i < n; ++i) {
      TraceRow row;
      row.tick = tick;
      row.phase = state.phase;
      row.finger = i;
      row.motor_deg = before.fingers[static_cast<std::size_t>(i)].motor_deg();
      row.g = g[static_cast<std::size_t>(i)];
      row.contact_force_n = force;
      for (const auto& e : events) {
        if (e.finger != -1 && e.finger != i) continue;
        if (!row.event.empty()) row.event += ';';
        row.event += to_string(e.kind);
      }
      res.trace.push_back(std::move(row));
    }
    for (const auto& e : events) {
      switch (e.kind) {
        case EventKind::HoldStart:
          res.hold_start_tick = tick;
          res.hold_opening_mm = opening_of(increments_of());
          res.hold_g = g;
          res.signal_quantum = quantum_at(increments_of());
          break;
        case EventKind::ReleaseStart: res.release_start_tick = tick; break;
        case EventKind::Done: res.done_tick = tick; break;
        case EventKind::MechanicalLimit: res.mechanical_limit = true; break;
        default: break;
      }
    }
    res.final_force_n = force;
    if (state.phase == Phase::Done) break;
    if (single && res.hold_start_tick >= 0 && tick - res.hold_start_tick >= post_hold) break;
  }

  res.final_phase = state.phase;
  res.final_g = g;
  for (const auto& f : state.fingers) res.final_motor_deg.push_back(f.motor_deg());
  if (res.signal_quantum.empty()) res.signal_quantum = quantum_at(increments_of());
  return res;
}

LinearityReport tweezers_linearity_study(const GraspScenario& base, std::span<const double> sizes_mm) {
  if (sizes_mm.size() < 2) throw RankDeficientFit("linearity study needs at least two object sizes");
  if (!std::holds_alternative<Hysteresis>(base.policy.mode))
    throw InvalidArgument("linearity study runs the hysteresis policy");
  LinearityReport rep;
  for (std::size_t i = 0; i < sizes_mm.size(); ++i) {
    GraspScenario sc = base;
    const ObjectModel shape = base.object;
    sc.object = ObjectModel::tweezers(sizes_mm[i], shape.kind == ObjectKind::Tweezers ? shape.stiffness_n_per_mm : 3.0);
    if (shape.kind == ObjectKind::Tweezers) {
      sc.object.arm_width_mm = shape.arm_width_mm;
      sc.object.tip_opening_mm = shape.tip_opening_mm;
      sc.object.spring_n_per_mm = shape.spring_n_per_mm;
    }
    sc.unit.env.seed = derive_seed(base.unit.env.seed, 100 + i);
    const GraspResult r = run_grasp(sc);
    if (r.hold_start_tick < 0)
      throw GraspFailed(fmt::format("tweezers grasp of a {} mm object never reached Holding", sizes_mm[i]));
    rep.sizes_mm.push_back(sizes_mm[i]);
    rep.gaps_mm.push_back(r.hold_opening_mm);
  }
  const estimation::LineFit fit = estimation::fit_line(rep.sizes_mm, rep.gaps_mm);
  rep.slope = fit.slope;
  rep.intercept = fit.intercept;
  rep.r_squared = fit.r_squared;
  return rep;
}

}  // namespace tacsim::grasp
