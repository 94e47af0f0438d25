#include "coopmitl/scenario.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <random>
#include <set>
#include <sstream>

#define TOML_ENABLE_FORMATTERS 0
#include <toml.hpp>

#include "coopmitl/errors.hpp"

namespace coopmitl {

grid::Partition Scenario::build_partition() const { return grid::Partition(partition); }

plan::TransitionSystem Scenario::build_wts() const {
  return plan::TransitionSystem(build_partition(), labels, transition_duration,
                                duration_overrides, {initial_region});
}

std::vector<GraspOffset> Scenario::grasps() const {
  std::vector<GraspOffset> out;
  for (const auto& a : agents) out.push_back(a.grasp);
  return out;
}

void Scenario::validate() const {
  const grid::Partition p = build_partition();
  if (!p.valid(initial_region)) throw Error(ErrorCode::InvalidConfig, "unknown initial region");
  if (agents.empty()) throw Error(ErrorCode::InvalidConfig, "at least one agent is required");
  if (gains.shares.size() != agents.size()) {
    throw Error(ErrorCode::InvalidConfig, "one load share per agent is required");
  }
  if (!(dt > 0.0 && dt <= 1e-2)) throw Error(ErrorCode::InvalidConfig, "dt must lie in (0, 0.01]");
  if (std::abs(envelopes.l0 - partition.l0) > 0.0) {
    throw Error(ErrorCode::InvalidConfig, "controller l0 must match the partition l0");
  }
  for (const auto& a : agents) {
    if (a.grasp.offset.norm() > partition.l_hat) {
      throw Error(ErrorCode::InvalidConfig, "grasp point lies farther than L_hat from the object");
    }
  }
  // The remaining checks run when the objects are constructed.
  (void)dyn::CoupledModel(object, agents);
  (void)ppc::Controller(gains, envelopes, grasps());
  (void)build_wts();
}

namespace {

class Reader {
 public:
  Reader(const toml::table& table, std::string path) : table_(table), path_(std::move(path)) {}

  [[noreturn]] void fail(const std::string& key, const std::string& what) const {
    throw Error(ErrorCode::InvalidConfig, where(key) + ": " + what);
  }

  [[nodiscard]] std::string where(const std::string& key) const {
    return path_.empty() ? key : path_ + "." + key;
  }

  void allow(std::initializer_list<std::string_view> keys) const {
    const std::set<std::string_view> allowed(keys);
    for (const auto& [k, v] : table_) {
      if (!allowed.count(k.str())) fail(std::string(k.str()), "unknown key");
    }
  }

  [[nodiscard]] bool has(const std::string& key) const { return table_.contains(key); }

  [[nodiscard]] double number(const std::string& key, double fallback) const {
    if (!has(key)) return fallback;
    return require_number(key);
  }

  [[nodiscard]] double require_number(const std::string& key) const {
    const auto* node = table_.get(key);
    if (node == nullptr) fail(key, "missing");
    if (auto v = node->value<double>(); v && node->is_number()) return *v;
    fail(key, "expected a number");
  }

  [[nodiscard]] std::int64_t integer(const std::string& key, std::int64_t fallback) const {
    const auto* node = table_.get(key);
    if (node == nullptr) return fallback;
    if (auto v = node->as_integer()) return v->get();
    fail(key, "expected an integer");
  }

  [[nodiscard]] bool boolean(const std::string& key, bool fallback) const {
    const auto* node = table_.get(key);
    if (node == nullptr) return fallback;
    if (auto v = node->as_boolean()) return v->get();
    fail(key, "expected true or false");
  }

  [[nodiscard]] std::string string(const std::string& key, const std::string& fallback) const {
    const auto* node = table_.get(key);
    if (node == nullptr) return fallback;
    if (auto v = node->as_string()) return v->get();
    fail(key, "expected a string");
  }

  [[nodiscard]] std::vector<double> numbers(const std::string& key) const {
    const auto* arr = table_.get_as<toml::array>(key);
    if (arr == nullptr) fail(key, "expected an array of numbers");
    std::vector<double> out;
    for (const auto& n : *arr) {
      const auto v = n.value<double>();
      if (!v || !n.is_number()) fail(key, "expected an array of numbers");
      out.push_back(*v);
    }
    return out;
  }

  template <int N>
  [[nodiscard]] Eigen::Matrix<double, N, 1> vec(const std::string& key,
                                                const Eigen::Matrix<double, N, 1>& fallback) const {
    if (!has(key)) return fallback;
    const auto v = numbers(key);
    if (v.size() == 1) return Eigen::Matrix<double, N, 1>::Constant(v[0]);
    if (v.size() != static_cast<std::size_t>(N)) {
      fail(key, "expected " + std::to_string(N) + " numbers (or a single one)");
    }
    return Eigen::Map<const Eigen::Matrix<double, N, 1>>(v.data());
  }

  [[nodiscard]] std::vector<std::int64_t> integers(const std::string& key) const {
    const auto* arr = table_.get_as<toml::array>(key);
    if (arr == nullptr) fail(key, "expected an array of integers");
    std::vector<std::int64_t> out;
    for (const auto& n : *arr) {
      const auto* v = n.as_integer();
      if (v == nullptr) fail(key, "expected an array of integers");
      out.push_back(v->get());
    }
    return out;
  }

  [[nodiscard]] const toml::table* sub(const std::string& key) const {
    const auto* node = table_.get(key);
    if (node == nullptr) return nullptr;
    if (const auto* t = node->as_table()) return t;
    fail(key, "expected a table");
  }

  [[nodiscard]] const toml::table& table() const { return table_; }
  [[nodiscard]] const std::string& path() const { return path_; }

 private:
  const toml::table& table_;
  std::string path_;
};

const toml::table& empty_table() {
  static const toml::table t;
  return t;
}

Reader child(const Reader& parent, const std::string& key) {
  const auto* t = parent.sub(key);
  return Reader(t != nullptr ? *t : empty_table(), parent.where(key));
}

EulerAngles euler(const Reader& r, const std::string& key, const EulerAngles& fallback) {
  return EulerAngles::from_vector(r.vec<3>(key, fallback.vector()));
}

Mat3 inertia3(const Reader& r, const std::string& key, const Mat3& fallback) {
  if (!r.has(key)) return fallback;
  const auto v = r.numbers(key);
  if (v.size() == 1) return v[0] * Mat3::Identity();
  if (v.size() == 3) return Vec3(v[0], v[1], v[2]).asDiagonal();
  if (v.size() == 9) return Eigen::Map<const Eigen::Matrix<double, 3, 3, Eigen::RowMajor>>(v.data());
  r.fail(key, "expected 1, 3 (diagonal) or 9 (row-major) numbers");
}

dyn::Sinusoid sinusoid(const Reader& r, const std::string& prefix) {
  dyn::Sinusoid s;
  s.amplitude = r.vec<6>(prefix + "_amplitude", Vec6::Zero());
  s.frequency = r.vec<6>(prefix + "_frequency", Vec6::Ones());
  if (s.amplitude.minCoeff() < 0.0) r.fail(prefix + "_amplitude", "must be non-negative");
  return s;
}

RegionId region(const Reader& r, const std::string& key, std::int64_t value) {
  if (value < 1 || value > 1'000'000) r.fail(key, "region indices start at 1");
  return RegionId{static_cast<int>(value)};
}

Scenario from_table(const toml::table& root) {
  Scenario s;
  const Reader top(root, "");
  top.allow({"format", "name", "formula", "partition", "labels", "transitions", "simulation",
             "initial_state", "object", "agents", "controller", "integrator"});
  const std::string format = top.string("format", "coopmitl-scenario v1");
  if (format != "coopmitl-scenario v1") top.fail("format", "unsupported version '" + format + "'");
  s.name = top.string("name", s.name);
  if (!top.has("formula")) top.fail("formula", "missing");
  s.formula = top.string("formula", "");

  {
    const Reader p = child(top, "partition");
    p.allow({"l_hat", "l0", "cells", "first_center"});
    s.partition.l_hat = p.number("l_hat", s.partition.l_hat);
    s.partition.l0 = p.number("l0", s.partition.l0);
    if (p.has("cells")) {
      const auto cells = p.integers("cells");
      if (cells.size() != 3) p.fail("cells", "expected three integers");
      for (int k = 0; k < 3; ++k) {
        if (cells[static_cast<std::size_t>(k)] < 1 || cells[static_cast<std::size_t>(k)] > 10000) {
          p.fail("cells", "extents must be positive");
        }
        s.partition.cells[static_cast<std::size_t>(k)] =
            static_cast<int>(cells[static_cast<std::size_t>(k)]);
      }
    }
    s.partition.first_center = p.vec<3>("first_center", s.partition.first_center);
  }

  {
    const Reader l = child(top, "labels");
    for (const auto& [key, node] : l.table()) {
      const std::string name(key.str());
      for (std::int64_t id : l.integers(name)) s.labels.add(region(l, name, id), name);
    }
  }

  {
    const Reader t = child(top, "transitions");
    t.allow({"duration", "initial_region", "overrides"});
    s.transition_duration = t.number("duration", s.transition_duration);
    s.initial_region = region(t, "initial_region", t.integer("initial_region", 1));
    if (const auto* arr = t.table().get_as<toml::array>("overrides")) {
      for (const auto& item : *arr) {
        const auto* tbl = item.as_table();
        if (tbl == nullptr) t.fail("overrides", "expected an array of tables");
        const Reader o(*tbl, t.where("overrides"));
        o.allow({"from", "to", "duration"});
        const RegionId from = region(o, "from", o.integer("from", 0));
        const RegionId to = region(o, "to", o.integer("to", 0));
        s.duration_overrides[{from, to}] = o.require_number("duration");
      }
    } else if (t.has("overrides")) {
      t.fail("overrides", "expected an array of tables");
    }
  }

  {
    const Reader sim = child(top, "simulation");
    sim.allow({"dt", "seed", "loop_periods", "saturation_threshold"});
    s.dt = sim.number("dt", s.dt);
    const auto seed = sim.integer("seed", static_cast<std::int64_t>(s.seed));
    if (seed < 0) sim.fail("seed", "must be non-negative");
    s.seed = static_cast<std::uint64_t>(seed);
    const auto loops = sim.integer("loop_periods", static_cast<std::int64_t>(s.loop_periods));
    if (loops < 0) sim.fail("loop_periods", "must be non-negative");
    s.loop_periods = static_cast<std::size_t>(loops);
    s.saturation_threshold = sim.number("saturation_threshold", s.saturation_threshold);
  }

  {
    const Reader init = child(top, "initial_state");
    init.allow({"position", "orientation", "velocity"});
    s.initial_state.pose.position = init.vec<3>("position", s.partition.first_center);
    s.initial_state.pose.orientation = euler(init, "orientation", {});
    s.initial_state.velocity = init.vec<6>("velocity", Vec6::Zero());
    s.initial_state.time = 0.0;
  }

  {
    const Reader o = child(top, "object");
    o.allow({"mass", "inertia", "gravity", "disturbance_amplitude", "disturbance_frequency"});
    s.object.mass = o.number("mass", s.object.mass);
    s.object.inertia = inertia3(o, "inertia", s.object.inertia);
    s.object.gravity = o.number("gravity", s.object.gravity);
    s.object.disturbance = sinusoid(o, "disturbance");
  }

  if (const auto* arr = root.get_as<toml::array>("agents")) {
    std::size_t index = 0;
    for (const auto& item : *arr) {
      const auto* tbl = item.as_table();
      if (tbl == nullptr) top.fail("agents", "expected an array of tables ([[agents]])");
      const Reader a(*tbl, "agents[" + std::to_string(index++) + "]");
      a.allow({"offset", "angular_offset", "share", "inertia_diagonal", "mass",
               "uncertainty_amplitude", "uncertainty_frequency", "disturbance_amplitude",
               "disturbance_frequency"});
      dyn::AgentParams agent;
      agent.grasp.offset = a.vec<3>("offset", Vec3::Zero());
      agent.grasp.angular_offset = euler(a, "angular_offset", {});
      Vec6 diag;
      diag << 2.0, 2.0, 2.0, 0.5, 0.5, 0.5;
      agent.inertia = a.vec<6>("inertia_diagonal", diag).asDiagonal();
      const double mass = a.number("mass", agent.inertia(0, 0));
      agent.gravity = Vec6::Zero();
      agent.gravity.z() = mass * s.object.gravity;
      agent.uncertainty = sinusoid(a, "uncertainty");
      agent.disturbance = sinusoid(a, "disturbance");
      s.agents.push_back(agent);
      s.gains.shares.push_back(a.number("share", 0.0));
    }
  } else if (top.has("agents")) {
    top.fail("agents", "expected an array of tables ([[agents]])");
  }

  {
    const Reader c = child(top, "controller");
    c.allow({"position_gains", "velocity_gain", "desired_orientation", "paper_faithful_envelopes",
             "position_rho_inf", "position_decay", "orientation_rho0", "orientation_rho_inf",
             "orientation_decay", "velocity_rho0_gain", "velocity_rho0_offset", "velocity_rho_inf",
             "velocity_decay"});
    s.gains.position = c.vec<6>("position_gains", s.gains.position);
    s.gains.velocity = c.number("velocity_gain", s.gains.velocity);
    s.desired_orientation = euler(c, "desired_orientation", {});
    auto& e = s.envelopes;
    e.l0 = s.partition.l0;
    e.paper_faithful = c.boolean("paper_faithful_envelopes", e.paper_faithful);
    e.position_rho_inf = c.number("position_rho_inf", e.position_rho_inf);
    e.position_decay = c.number("position_decay", e.position_decay);
    e.orientation_rho0 = c.number("orientation_rho0", e.orientation_rho0);
    e.orientation_rho_inf = c.number("orientation_rho_inf", e.orientation_rho_inf);
    e.orientation_decay = c.number("orientation_decay", e.orientation_decay);
    e.velocity_rho0_gain = c.number("velocity_rho0_gain", e.velocity_rho0_gain);
    e.velocity_rho0_offset = c.number("velocity_rho0_offset", e.velocity_rho0_offset);
    e.velocity_rho_inf = c.number("velocity_rho_inf", e.velocity_rho_inf);
    e.velocity_decay = c.number("velocity_decay", e.velocity_decay);
  }

  {
    const Reader i = child(top, "integrator");
    i.allow({"relative_tolerance", "absolute_tolerance", "min_step"});
    s.integrator.relative_tolerance = i.number("relative_tolerance", s.integrator.relative_tolerance);
    s.integrator.absolute_tolerance = i.number("absolute_tolerance", s.integrator.absolute_tolerance);
    s.integrator.min_step = i.number("min_step", s.integrator.min_step);
  }

  apply_seed(s, s.seed);
  s.validate();
  return s;
}

}  // namespace

Scenario parse_scenario(std::string_view toml_text, const std::string& source) {
  toml::table root;
  try {
    root = toml::parse(toml_text, source);
  } catch (const toml::parse_error& e) {
    std::ostringstream os;
    os << source << ":" << e.source().begin.line << ":" << e.source().begin.column << ": "
       << e.description();
    throw Error(ErrorCode::InvalidConfig, os.str());
  }
  return from_table(root);
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open scenario file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str(), path.string());
}

void apply_seed(Scenario& scenario, std::uint64_t seed) {
  scenario.seed = seed;
  std::mt19937_64 rng(seed);
  constexpr double two_pi = 2.0 * std::numbers::pi;
  // Top 53 bits of each draw mapped to [0, 1); fixed so traces are portable.
  const auto draw = [&] {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53 * two_pi;
  };
  const auto fill = [&](dyn::Sinusoid& s) {
    for (int k = 0; k < 6; ++k) s.phase(k) = draw();
  };
  fill(scenario.object.disturbance);
  for (auto& a : scenario.agents) {
    fill(a.uncertainty);
    fill(a.disturbance);
  }
}

}  // namespace coopmitl
