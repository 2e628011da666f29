#include "commands.hpp"

#include <atomic>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <sstream>
#include <thread>
#include <vector>

#include "gss/closedform.hpp"
#include "gss/flow.hpp"
#include "gss/section.hpp"

namespace gss::cli {

using nlohmann::json;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

json vec_json(const Vec& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

json phase_json(const PhasePoint& p) { return {{"x", vec_json(p.x)}, {"y", vec_json(p.y)}}; }

// Shortest representation that round-trips.
std::string num(double v) {
  char buf[32];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

class Output {
 public:
  Output(const RunConfig& config, std::string command) : config_(config), command_(std::move(command)) {
    std::filesystem::create_directories(config.output.directory);
  }

  std::filesystem::path path(const std::string& file) const {
    return std::filesystem::path(config_.output.directory) / file;
  }

  json document() const {
    return {{"format_version", kFormatVersion}, {"command", command_}, {"config", config_.resolved}};
  }

  void write_json(const std::string& file, const json& doc, std::ostream& log) const {
    if (!config_.output.has("json")) return;
    std::ofstream os(path(file));
    os << doc.dump(2) << '\n';
    log << "wrote " << path(file).string() << '\n';
  }

  /// CSV with `#` header lines carrying the format version and resolved config.
  void write_csv(const std::string& file, const std::function<void(std::ostream&)>& body, std::ostream& log) const {
    if (!config_.output.has("csv")) return;
    std::ofstream os(path(file));
    os << "# format_version=" << kFormatVersion << '\n';
    os << "# command=" << command_ << '\n';
    os << "# config=" << config_.resolved.dump() << '\n';
    body(os);
    log << "wrote " << path(file).string() << '\n';
  }

 private:
  const RunConfig& config_;
  std::string command_;
};

/// Evaluates rows 0..n−1 on a thread pool; results come back in row order.
template <class Row>
std::vector<Row> parallel_rows(std::size_t n, std::size_t threads, const std::function<Row(std::size_t)>& fn) {
  std::vector<Row> rows(n);
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = std::min(threads, n);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++) rows[i] = fn(i);
  };
  std::vector<std::jthread> pool;
  for (std::size_t t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  return rows;
}

json symmetry_json(const SymmetryFinding& s) {
  return {{"ok", s.ok},
          {"max_value_violation", s.max_value_violation},
          {"max_slope_violation", s.max_slope_violation},
          {"tolerance", s.tolerance},
          {"strip_halfwidth", s.strip_halfwidth},
          {"samples", s.samples},
          {"witness", s.witness ? vec_json(*s.witness) : json(nullptr)}};
}

json definiteness_json(const DefinitenessFinding& d) {
  json j = {{"kind", to_string(d.kind)},
            {"min_eigenvalue", d.min_eigenvalue},
            {"max_eigenvalue", d.max_eigenvalue},
            {"samples", d.samples}};
  if (d.kind == Definiteness::indefinite && d.witness_point.size() > 0)
    j["witness"] = {{"point", vec_json(d.witness_point)},
                    {"eigenvector", vec_json(d.witness_vector)},
                    {"eigenvalue", d.witness_eigenvalue}};
  return j;
}

json report_json(const AuditReport& r) {
  return {{"passed", r.passed()},
          {"sample_count", r.sample_count},
          {"symmetry", symmetry_json(r.symmetry)},
          {"definiteness", definiteness_json(r.definiteness)},
          {"curvature_range",
           {{"min", r.min_curvature},
            {"max", r.max_curvature},
            {"min_point", r.curvature_witness ? vec_json(*r.curvature_witness) : json(nullptr)}}},
          {"epsilon_estimate", r.epsilon_estimate}};
}

// ---------------------------------------------------------------------------

int cmd_audit(const RunConfig& config, std::ostream& log) {
  const Output out(config, "audit");
  json doc = out.document();
  const DefiningSurface surface = config.build_surface();
  doc["surface"] = surface.description();
  AuditOutcome a;
  try {
    a = run_audit(surface, config.audit);
  } catch (const Error& e) {
    doc["error"] = e.what();
    out.write_json("audit.json", doc, log);
    log << "audit FAILED: " << e.what() << '\n';
    return exit_code_for(e.kind());
  }
  doc["report"] = report_json(a.report);
  doc["sign_normalized"] = a.normalized && a.normalized->sign_normalized();
  out.write_json("audit.json", doc, log);
  out.write_csv(
      "audit.csv",
      [&](std::ostream& os) {
        os << "check,passed,value\n";
        os << "symmetry," << a.report.symmetry.ok << ','
           << num(std::max(a.report.symmetry.max_value_violation, a.report.symmetry.max_slope_violation)) << '\n';
        os << "definiteness," << (a.report.definiteness.kind != Definiteness::indefinite) << ','
           << to_string(a.report.definiteness.kind) << '\n';
        os << "curvature," << (a.report.min_curvature > 0.0) << ',' << num(a.report.min_curvature) << '\n';
        os << "epsilon," << (a.report.epsilon_estimate > 0.0) << ',' << num(a.report.epsilon_estimate) << '\n';
      },
      log);
  log << (a.report.passed() ? "audit passed" : "audit FAILED") << " at " << a.report.sample_count << " samples\n";
  return a.report.passed() ? kOk : kVerification;
}

int cmd_epsilon(const RunConfig& config, std::ostream& log) {
  const Output out(config, "epsilon");
  const DefiningSurface surface = config.build_surface();
  const EpsilonEstimate e = estimate_epsilon(surface, config.audit.epsilon_samples);
  json doc = out.document();
  doc["surface"] = surface.description();
  doc["epsilon"] = e.epsilon;
  doc["theta_bound"] = e.theta_bound();
  doc["return_time_bound"] = e.return_time_bound();
  doc["samples"] = e.samples;
  doc["argmin"] = phase_json(e.argmin);
  out.write_json("epsilon.json", doc, log);
  out.write_csv(
      "epsilon.csv",
      [&](std::ostream& os) {
        os << "epsilon,theta_bound,return_time_bound,samples\n";
        os << num(e.epsilon) << ',' << num(e.theta_bound()) << ',' << num(e.return_time_bound()) << ','
           << e.samples << '\n';
      },
      log);
  log << "epsilon = " << num(e.epsilon) << "\n";
  return kOk;
}

int cmd_flow(const RunConfig& config, std::ostream& log) {
  const Output out(config, "flow");
  const DefiningSurface surface = config.build_surface();
  PhasePoint start;
  if (config.flow.x) {
    const auto to_vec = [](const std::vector<double>& v) { return Vec(Eigen::Map<const Vec>(v.data(), v.size())); };
    start = project_to_surface(surface, to_vec(*config.flow.x), to_vec(*config.flow.y));
  } else {
    Rng rng(config.sweep.seed);
    start = random_page_start(surface, rng);
  }
  const std::vector<FlowState> states = trajectory(surface, start, config.flow.t_end, config.integrator);
  double max_residual = 0.0, max_drift = 0.0;
  for (const FlowState& s : states) {
    max_residual = std::max(max_residual, residuals(surface, s.phase).max());
    max_drift = std::max(max_drift, s.drift);
  }
  json doc = out.document();
  doc["surface"] = surface.description();
  doc["start"] = phase_json(start);
  doc["end"] = phase_json(states.back().phase);
  doc["t_end"] = states.back().time;
  doc["steps"] = states.size() - 1;
  doc["unwrapped_angle_change"] = states.back().unwrapped_angle - states.front().unwrapped_angle;
  doc["max_constraint_residual"] = max_residual;
  doc["max_drift"] = max_drift;
  out.write_json("flow.json", doc, log);
  out.write_csv("flow.csv", [&](std::ostream& os) { write_trajectory_csv(os, surface, states); }, log);
  log << states.size() - 1 << " steps, max residual " << num(max_residual) << '\n';
  return max_residual < config.integrator.constraint_tolerance ? kOk : kVerification;
}

struct SectionRow {
  PhasePoint start, end;
  double tau = 0.0, angle_total = 0.0, max_drift = 0.0;
  std::size_t steps = 0;
  std::string error;
  int error_code = kOk;
};

int cmd_section(const RunConfig& config, const CommandOptions& options, std::ostream& log) {
  const Output out(config, "section");
  const DefiningSurface raw = config.build_surface();
  const AuditOutcome audit = run_audit(raw, config.audit);
  json doc = out.document();
  doc["surface"] = raw.description();
  doc["audit"] = report_json(audit.report);
  if (!audit.report.passed() && !options.force) {
    out.write_json("section.json", doc, log);
    log << "audit failed; rerun with --force to sweep anyway\n";
    return kVerification;
  }
  const DefiningSurface surface = audit.normalized ? *audit.normalized : raw;
  const double epsilon = audit.report.epsilon_estimate;
  const double bound = epsilon > 0.0 ? kTwoPi / std::min(epsilon, 1.0) : INFINITY;

  const Rng root(config.sweep.seed);
  const auto rows = parallel_rows<SectionRow>(config.sweep.starts, config.sweep.threads, [&](std::size_t i) {
    SectionRow row;
    try {
      Rng rng = root.split(i);
      row.start = random_page_start(surface, rng);
      const ReturnRecord r = return_map(surface, row.start, config.integrator);
      row.start = r.start;
      row.end = r.end;
      row.tau = r.tau;
      row.angle_total = r.angle_total;
      row.max_drift = r.max_drift;
      row.steps = r.steps;
    } catch (const Error& e) {
      row.error = e.what();
      row.error_code = exit_code_for(e.kind());
    }
    return row;
  });

  const std::size_t dim = surface.ambient_dim();
  double max_tau = 0.0, max_drift = 0.0;
  int code = kOk;
  std::size_t over_bound = 0;
  json table = json::array();
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const SectionRow& r = rows[i];
    if (!r.error.empty()) {
      code = std::max(code, r.error_code == kNumerical ? kNumerical : r.error_code);
      table.push_back({{"row", i}, {"error", r.error}});
      continue;
    }
    max_tau = std::max(max_tau, r.tau);
    max_drift = std::max(max_drift, r.max_drift);
    if (!(r.tau <= bound * (1.0 + 1e-6))) ++over_bound;
    table.push_back({{"row", i},
                     {"start", phase_json(r.start)},
                     {"end", phase_json(r.end)},
                     {"tau", r.tau},
                     {"angle_total", r.angle_total},
                     {"max_drift", r.max_drift},
                     {"steps", r.steps}});
  }
  if (over_bound > 0 && code == kOk) code = kVerification;

  doc["rows"] = table;
  doc["summary"] = {{"max_tau", max_tau},
                    {"max_drift", max_drift},
                    {"epsilon", epsilon},
                    {"tau_bound", bound},
                    {"rows_over_bound", over_bound}};
  out.write_json("section.json", doc, log);
  out.write_csv(
      "section.csv",
      [&](std::ostream& os) {
        os << "row";
        for (const char* part : {"start_x", "start_y", "end_x", "end_y"})
          for (std::size_t k = 0; k < dim; ++k) os << ',' << part << k;
        os << ",tau,angle_total,max_drift,steps,tau_bound,error\n";
        for (std::size_t i = 0; i < rows.size(); ++i) {
          const SectionRow& r = rows[i];
          os << i;
          for (const PhasePoint* p : {&r.start, &r.end})
            for (const Vec* v : {&p->x, &p->y})
              for (std::size_t k = 0; k < dim; ++k) os << ',' << (r.error.empty() ? num((*v)(k)) : "");
          if (r.error.empty())
            os << ',' << num(r.tau) << ',' << num(r.angle_total) << ',' << num(r.max_drift) << ',' << r.steps;
          else
            os << ",,,,";
          os << ',' << num(bound) << ",\"" << r.error << "\"\n";
        }
        os << "summary";
        for (std::size_t k = 0; k < 4 * dim; ++k) os << ',';
        os << ',' << num(max_tau) << ",," << num(max_drift) << ",," << num(bound) << ",\n";
      },
      log);
  log << rows.size() << " returns, max tau " << num(max_tau) << " (bound " << num(bound) << ")\n";
  return code;
}

struct CompareRow {
  double t = 0.0, g = 0.0, tau = 0.0, diff = 0.0, billiard_diff = 0.0;
  PhasePoint numeric, closed;
  std::string error;
  int error_code = kOk;
};

int cmd_compare(const RunConfig& config, std::ostream& log) {
  const Output out(config, "compare");
  const DefiningSurface surface = config.build_surface();
  std::string profile_text;
  switch (surface.family()) {
    case SurfaceFamily::sphere: profile_text = num(surface.semiaxes()[0]) + "*sin(phi)"; break;
    case SurfaceFamily::ellipsoid: profile_text = num(surface.semiaxes()[0]) + "*sin(phi)"; break;
    case SurfaceFamily::revolution: profile_text = surface.profile()->text; break;
    case SurfaceFamily::expression:
      throw Error(ErrorKind::unsupported_surface, "compare needs a sphere, ellipsoid or revolution surface");
  }
  // Probe support before sweeping (ellipsoids must be (a0, 1, ..., 1)).
  closed_form_angle(surface, 0.5);
  if (surface.family() == SurfaceFamily::sphere && surface.semiaxes()[0] != 1.0)
    throw Error(ErrorKind::unsupported_surface, "compare needs the unit sphere");
  const RevolutionProfile profile(profile_text);

  const std::size_t n = surface.n();
  const Rng root(config.sweep.seed);
  const auto rows = parallel_rows<CompareRow>(config.sweep.starts, config.sweep.threads, [&](std::size_t i) {
    CompareRow row;
    try {
      Rng rng = root.split(i);
      const PhasePoint start = random_page_start(surface, rng);
      const ReturnRecord r = return_map(surface, start, config.integrator);
      row.numeric = r.end;
      row.closed = closed_form_return(surface, r.start);
      row.tau = r.tau;
      row.t = r.start.y.tail(n).norm();
      row.g = row.t > 1e-15 ? closed_form_angle(surface, row.t) : kTwoPi;
      row.diff = std::max((row.numeric.x - row.closed.x).cwiseAbs().maxCoeff(),
                          (row.numeric.y - row.closed.y).cwiseAbs().maxCoeff());
      if (row.t > 1e-15) {
        const Vec xhat = r.start.x.tail(n).normalized();
        const BilliardPoint b = billiard_second_iterate(xhat, r.start.y.tail(n));
        row.billiard_diff = (row.numeric.x.tail(n).normalized() - b.xhat).norm();
      }
    } catch (const Error& e) {
      row.error = e.what();
      row.error_code = exit_code_for(e.kind());
    }
    return row;
  });

  struct GRow {
    double t, closed, clairaut;
  };
  std::vector<GRow> grid;
  for (double t : config.compare.t_values) {
    const double closed = surface.family() == SurfaceFamily::revolution ? billiard_g(t) : closed_form_angle(surface, t);
    grid.push_back({t, closed, clairaut_g(t, profile)});
  }

  int code = kOk;
  double max_diff = 0.0, max_billiard = 0.0;
  json table = json::array();
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const CompareRow& r = rows[i];
    if (!r.error.empty()) {
      code = std::max(code, r.error_code);
      table.push_back({{"row", i}, {"error", r.error}});
      continue;
    }
    max_diff = std::max(max_diff, r.diff);
    max_billiard = std::max(max_billiard, r.billiard_diff);
    table.push_back({{"row", i},
                     {"t", r.t},
                     {"G", r.g},
                     {"tau", r.tau},
                     {"numeric", phase_json(r.numeric)},
                     {"closed_form", phase_json(r.closed)},
                     {"max_abs_diff", r.diff},
                     {"billiard_diff", r.billiard_diff}});
  }
  const bool within = max_diff <= config.compare.tolerance;
  if (!within && code == kOk) code = kVerification;

  json g_table = json::array();
  for (const GRow& g : grid)
    g_table.push_back({{"t", g.t}, {"profile", profile_text}, {"G_closed", g.closed}, {"G_clairaut", g.clairaut},
                       {"abs_diff", std::abs(g.closed - g.clairaut)}});

  json doc = out.document();
  doc["surface"] = surface.description();
  doc["rows"] = table;
  doc["g_table"] = g_table;
  doc["summary"] = {{"max_abs_diff", max_diff},
                    {"tolerance", config.compare.tolerance},
                    {"within_tolerance", within},
                    {"max_billiard_diff", max_billiard}};
  out.write_json("compare.json", doc, log);
  out.write_csv(
      "compare.csv",
      [&](std::ostream& os) {
        os << "row,t,G,tau,max_abs_diff,billiard_diff,error\n";
        for (std::size_t i = 0; i < rows.size(); ++i) {
          const CompareRow& r = rows[i];
          if (r.error.empty())
            os << i << ',' << num(r.t) << ',' << num(r.g) << ',' << num(r.tau) << ',' << num(r.diff) << ','
               << num(r.billiard_diff) << ",\n";
          else
            os << i << ",,,,,,\"" << r.error << "\"\n";
        }
      },
      log);
  out.write_csv(
      "compare_g.csv",
      [&](std::ostream& os) {
        os << "t,profile,G_closed,G_clairaut,abs_diff\n";
        for (const GRow& g : grid)
          os << num(g.t) << ",\"" << profile_text << "\"," << num(g.closed) << ',' << num(g.clairaut) << ','
             << num(std::abs(g.closed - g.clairaut)) << '\n';
      },
      log);
  log << rows.size() << " starts, max |numeric - closed form| = " << num(max_diff) << '\n';
  return code;
}

}  // namespace

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::syntax:
    case ErrorKind::unknown_identifier:
    case ErrorKind::dimension_mismatch:
    case ErrorKind::non_smooth_function:
    case ErrorKind::unsupported_surface:
    case ErrorKind::config: return kUsage;
    case ErrorKind::indefinite:
    case ErrorKind::regularity:
    case ErrorKind::non_positive_epsilon: return kVerification;
    default: return kNumerical;
  }
}

AuditOutcome run_audit(const DefiningSurface& surface, const AuditBlock& block) {
  AuditOutcome out;
  AuditReport& r = out.report;
  r.sample_count = block.samples;
  const double strip = block.strip_halfwidth ? *block.strip_halfwidth : default_strip_halfwidth(surface);
  r.symmetry = audit_symmetry(surface, strip, block.samples);
  r.definiteness = classify_definiteness(surface, block.samples);
  if (r.definiteness.kind == Definiteness::indefinite) return out;
  out.normalized = r.definiteness.kind == Definiteness::negative ? surface.negated() : surface;
  const CurvatureRange k = curvature_range(*out.normalized, block.samples);
  r.min_curvature = k.min;
  r.max_curvature = k.max;
  r.curvature_witness = k.min_point;
  if (r.symmetry.ok) {
    try {
      r.epsilon_estimate = estimate_epsilon(*out.normalized, block.epsilon_samples).epsilon;
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::non_positive_epsilon) throw;
    }
  }
  return out;
}

int run_command(const std::string& name, const RunConfig& config, const CommandOptions& options, std::ostream& log) {
  if (name == "audit") return cmd_audit(config, log);
  if (name == "epsilon") return cmd_epsilon(config, log);
  if (name == "flow") return cmd_flow(config, log);
  if (name == "section") return cmd_section(config, options, log);
  if (name == "compare") return cmd_compare(config, log);
  throw Error(ErrorKind::config, "unknown command '" + name + "'");
}

}  // namespace gss::cli
