#include "coopmitl/trace_io.hpp"

#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "coopmitl/errors.hpp"

namespace coopmitl::io {

using nlohmann::json;

namespace {

constexpr const char* kPlanFormat = "coopmitl-plan v1";
constexpr const char* kTraceFormat = "coopmitl-trace v1";
constexpr const char* kReportFormat = "coopmitl-report v1";

std::ofstream open_for_writing(const std::filesystem::path& path) {
  std::error_code ec;
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::Io, "cannot write " + path.string());
  return out;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out = open_for_writing(path);
  out << text;
  if (!out) throw Error(ErrorCode::Io, "write failed for " + path.string());
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

// JSON cannot hold infinities; margins that never got a sample become null.
json number(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

}  // namespace

std::string plan_to_json(const plan::Plan& plan, const std::string& formula) {
  json j;
  j["format"] = kPlanFormat;
  j["formula"] = formula;
  j["loop_start"] = plan.loop_start;
  j["steps"] = json::array();
  for (const auto& s : plan.steps) {
    j["steps"].push_back({{"region", s.region.value}, {"t", s.time}});
  }
  return j.dump(2) + "\n";
}

plan::Plan plan_from_json(const std::string& text) {
  try {
    const json j = json::parse(text);
    if (j.value("format", std::string()) != kPlanFormat) {
      throw Error(ErrorCode::InvalidConfig, "plan file is not 'coopmitl-plan v1'");
    }
    plan::Plan p;
    p.loop_start = j.at("loop_start").get<std::size_t>();
    for (const auto& s : j.at("steps")) {
      p.steps.push_back({RegionId{s.at("region").get<int>()}, s.at("t").get<double>()});
    }
    if (p.steps.empty() || p.loop_start >= p.steps.size()) {
      throw Error(ErrorCode::InvalidConfig, "plan needs steps and a loop start inside them");
    }
    return p;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::InvalidConfig, std::string("malformed plan JSON: ") + e.what());
  }
}

void write_plan(const std::filesystem::path& path, const plan::Plan& plan,
                const std::string& formula) {
  write_text(path, plan_to_json(plan, formula));
}

plan::Plan read_plan(const std::filesystem::path& path) { return plan_from_json(read_text(path)); }

namespace {

void put(std::string& line, double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  line += ',';
  line += buf;
}

template <typename V>
void put_all(std::string& line, const V& v) {
  for (Eigen::Index k = 0; k < v.size(); ++k) put(line, v(k));
}

std::string header_row(std::size_t agents) {
  std::string h = "t";
  const auto group = [&](const std::string& prefix, std::initializer_list<const char*> names) {
    for (const char* n : names) h += "," + prefix + n;
  };
  const auto axes6 = {"1", "2", "3", "4", "5", "6"};
  group("", {"px", "py", "pz", "roll", "pitch", "yaw"});
  group("v_", {"px", "py", "pz", "roll", "pitch", "yaw"});
  group("d_", {"px", "py", "pz", "roll", "pitch", "yaw"});
  group("es", axes6);
  group("rhos", axes6);
  group("ev", axes6);
  group("rhov", axes6);
  for (std::size_t i = 1; i <= agents; ++i) group("u" + std::to_string(i) + "_", axes6);
  for (std::size_t i = 1; i <= agents; ++i) group("lambda" + std::to_string(i) + "_", axes6);
  h += ",from,to,transition";
  return h;
}

}  // namespace

void write_trace(std::ostream& out, const exec::ExecutionTrace& trace) {
  char head[160];
  std::snprintf(head, sizeof head, "# %s seed=%" PRIu64 " dt=%.17g agents=%zu\n", kTraceFormat,
                trace.seed, trace.dt, trace.agents);
  out << head << header_row(trace.agents) << '\n';
  std::string line;
  for (const auto& r : trace.records) {
    char t[32];
    std::snprintf(t, sizeof t, "%.17g", r.t);
    line = t;
    put_all(line, r.pose);
    put_all(line, r.velocity);
    put_all(line, r.desired_pose);
    put_all(line, r.e_s);
    put_all(line, r.rho_s);
    put_all(line, r.e_v);
    put_all(line, r.rho_v);
    put_all(line, r.u);
    put_all(line, r.lambda);
    line += ',' + std::to_string(r.from.value) + ',' + std::to_string(r.to.value) + ',' +
            std::to_string(r.transition);
    out << line << '\n';
  }
}

exec::ExecutionTrace read_trace(std::istream& in) {
  exec::ExecutionTrace trace;
  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorCode::InvalidConfig, "empty trace file");
  {
    char fmt[32] = {0};
    std::uint64_t seed = 0;
    double dt = 0.0;
    std::size_t agents = 0;
    if (std::sscanf(line.c_str(), "# %31s v1 seed=%" SCNu64 " dt=%lf agents=%zu", fmt, &seed, &dt,
                    &agents) != 4 ||
        std::string(fmt) != "coopmitl-trace") {
      throw Error(ErrorCode::InvalidConfig, "trace header is not 'coopmitl-trace v1'");
    }
    trace.seed = seed;
    trace.dt = dt;
    trace.agents = agents;
  }
  if (!std::getline(in, line) || line != header_row(trace.agents)) {
    throw Error(ErrorCode::InvalidConfig, "trace column header does not match the format");
  }
  const std::size_t reals = 1 + 7 * 6 + 12 * trace.agents;
  std::size_t line_no = 2;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::vector<double> v;
    v.reserve(reals + 3);
    const char* p = line.c_str();
    while (true) {
      char* end = nullptr;
      const double x = std::strtod(p, &end);
      if (end == p) break;
      v.push_back(x);
      p = end;
      if (*p != ',') break;
      ++p;
    }
    if (v.size() != reals + 3 || *p != '\0') {
      throw Error(ErrorCode::InvalidConfig,
                  "malformed trace row at line " + std::to_string(line_no));
    }
    exec::TraceRecord r;
    std::size_t k = 0;
    const auto take = [&](auto& vec, std::size_t n) {
      vec.resize(static_cast<Eigen::Index>(n));
      for (std::size_t i = 0; i < n; ++i) vec(static_cast<Eigen::Index>(i)) = v[k++];
    };
    r.t = v[k++];
    take(r.pose, 6);
    take(r.velocity, 6);
    take(r.desired_pose, 6);
    take(r.e_s, 6);
    take(r.rho_s, 6);
    take(r.e_v, 6);
    take(r.rho_v, 6);
    take(r.u, 6 * trace.agents);
    take(r.lambda, 6 * trace.agents);
    r.from = RegionId{static_cast<int>(v[k++])};
    r.to = RegionId{static_cast<int>(v[k++])};
    r.transition = static_cast<std::size_t>(v[k++]);
    trace.records.push_back(std::move(r));
  }
  return trace;
}

void write_trace(const std::filesystem::path& path, const exec::ExecutionTrace& trace) {
  std::ofstream out = open_for_writing(path);
  write_trace(out, trace);
  if (!out) throw Error(ErrorCode::Io, "write failed for " + path.string());
}

exec::ExecutionTrace read_trace(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
  return read_trace(in);
}

std::string report_to_json(const exec::Report& report) {
  json j;
  j["format"] = kReportFormat;
  j["satisfied"] = report.satisfied;
  j["formula_satisfied"] = report.formula_satisfied;
  j["complete"] = report.complete;
  j["violation_count"] = report.violation_count;
  j["violations"] = json::array();
  for (const auto& v : report.violations) {
    j["violations"].push_back({{"t", v.t}, {"kind", v.kind}, {"detail", v.detail}});
  }
  j["observed_run"] = json::array();
  for (const auto& s : report.observed_run) {
    j["observed_run"].push_back({{"region", s.region.value}, {"t", s.time}});
  }
  j["transitions"] = json::array();
  for (const auto& t : report.transitions) {
    j["transitions"].push_back({{"index", t.index},
                                {"from", t.from.value},
                                {"to", t.to.value},
                                {"t_start", t.t_start},
                                {"t_end", t.t_end},
                                {"samples", t.samples},
                                {"position_margin", number(t.position_margin)},
                                {"velocity_margin", number(t.velocity_margin)},
                                {"tube_margin", number(t.tube_margin)},
                                {"containment_margin", number(t.containment_margin)},
                                {"max_input", t.max_input},
                                {"reached", t.reached}});
  }
  j["load_sharing_error"] = report.load_sharing_error;
  j["max_input"] = report.max_input;
  j["saturation_threshold"] = report.saturation_threshold;
  j["saturation_samples"] = report.saturation_samples;
  return j.dump(2) + "\n";
}

void write_report(const std::filesystem::path& path, const exec::Report& report) {
  write_text(path, report_to_json(report));
}

}  // namespace coopmitl::io
