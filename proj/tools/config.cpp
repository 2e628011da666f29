#include "config.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "gss/error.hpp"

namespace gss::cli {

using nlohmann::json;

namespace {

[[noreturn]] void bad(const std::string& path, const std::string& what) {
  throw Error(ErrorKind::config, path + ": " + what);
}

void allow_keys(const json& obj, const std::string& path, std::initializer_list<const char*> keys) {
  if (!obj.is_object()) bad(path, "expected an object");
  const std::set<std::string> allowed(keys.begin(), keys.end());
  for (const auto& [key, value] : obj.items())
    if (!allowed.count(key)) bad(path.empty() ? key : path + "." + key, "unknown key");
}

std::string join(const std::string& path, const char* key) { return path.empty() ? key : path + "." + key; }

double number(const json& obj, const std::string& path, const char* key, double fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_number()) bad(join(path, key), "expected a number");
  const double d = v.get<double>();
  if (!std::isfinite(d)) bad(join(path, key), "must be finite");
  return d;
}

double positive(const json& obj, const std::string& path, const char* key, double fallback) {
  const double d = number(obj, path, key, fallback);
  if (!(d > 0.0)) bad(join(path, key), "must be positive");
  return d;
}

std::uint64_t count(const json& obj, const std::string& path, const char* key, std::uint64_t fallback,
                    std::uint64_t minimum) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_number_integer()) bad(join(path, key), "expected an integer");
  if (v.is_number_unsigned()) {
    const auto u = v.get<std::uint64_t>();
    if (u < minimum) bad(join(path, key), "must be at least " + std::to_string(minimum));
    return u;
  }
  const auto i = v.get<std::int64_t>();
  if (i < static_cast<std::int64_t>(minimum)) bad(join(path, key), "must be at least " + std::to_string(minimum));
  return static_cast<std::uint64_t>(i);
}

std::string text(const json& obj, const std::string& path, const char* key) {
  const json& v = obj.at(key);
  if (!v.is_string()) bad(join(path, key), "expected a string");
  return v.get<std::string>();
}

std::vector<double> numbers(const json& obj, const std::string& path, const char* key) {
  const json& v = obj.at(key);
  if (!v.is_array() || v.empty()) bad(join(path, key), "expected a non-empty array of numbers");
  std::vector<double> out;
  for (const json& e : v) {
    if (!e.is_number()) bad(join(path, key), "expected a non-empty array of numbers");
    out.push_back(e.get<double>());
  }
  return out;
}

SurfaceBlock load_surface(const json& s) {
  SurfaceBlock out;
  allow_keys(s, "surface", {"family", "dimension", "radius", "semiaxes", "profile", "expression"});
  if (s.contains("family")) out.family = text(s, "surface", "family");
  else if (s.contains("expression")) out.family = "expression";
  else bad("surface", "needs 'family' or 'expression'");

  auto dimension = [&](std::size_t fallback) {
    const auto d = count(s, "surface", "dimension", fallback, 3);
    if (d > kMaxVariables) bad("surface.dimension", "at most " + std::to_string(kMaxVariables));
    return static_cast<std::size_t>(d);
  };
  auto forbid = [&](std::initializer_list<const char*> keys) {
    for (const char* k : keys)
      if (s.contains(k)) bad(join("surface", k), "not used by family '" + out.family + "'");
  };

  if (out.family == "sphere") {
    forbid({"semiaxes", "profile", "expression"});
    out.dimension = dimension(3);
    out.radius = positive(s, "surface", "radius", 1.0);
  } else if (out.family == "ellipsoid") {
    forbid({"radius", "profile", "expression"});
    if (!s.contains("semiaxes")) bad("surface.semiaxes", "required for an ellipsoid");
    out.semiaxes = numbers(s, "surface", "semiaxes");
    for (double a : out.semiaxes)
      if (!(a > 0.0)) bad("surface.semiaxes", "must be positive");
    if (out.semiaxes.size() < 3 || out.semiaxes.size() > kMaxVariables)
      bad("surface.semiaxes", "needs between 3 and " + std::to_string(kMaxVariables) + " entries");
    out.dimension = dimension(out.semiaxes.size());
    if (out.dimension != out.semiaxes.size()) bad("surface.dimension", "does not match the number of semiaxes");
  } else if (out.family == "revolution") {
    forbid({"radius", "semiaxes", "expression"});
    if (!s.contains("profile")) bad("surface.profile", "required for a revolution surface");
    out.profile = text(s, "surface", "profile");
    out.dimension = dimension(3);
  } else if (out.family == "expression") {
    forbid({"radius", "semiaxes", "profile"});
    if (!s.contains("expression")) bad("surface.expression", "required");
    out.expression = text(s, "surface", "expression");
    if (!s.contains("dimension")) bad("surface.dimension", "required for an expression");
    out.dimension = dimension(3);
  } else {
    bad("surface.family", "unknown family '" + out.family + "'");
  }
  return out;
}

json surface_json(const SurfaceBlock& s) {
  json j = {{"family", s.family}, {"dimension", s.dimension}};
  if (s.family == "sphere") j["radius"] = s.radius;
  if (s.family == "ellipsoid") j["semiaxes"] = s.semiaxes;
  if (s.family == "revolution") j["profile"] = s.profile;
  if (s.family == "expression") j["expression"] = s.expression;
  return j;
}

}  // namespace

bool OutputBlock::has(const std::string& format) const {
  return std::find(formats.begin(), formats.end(), format) != formats.end();
}

DefiningSurface RunConfig::build_surface() const {
  if (surface.family == "sphere") return DefiningSurface::sphere(surface.dimension, surface.radius);
  if (surface.family == "ellipsoid") return DefiningSurface::ellipsoid(surface.semiaxes);
  if (surface.family == "revolution") return DefiningSurface::revolution(surface.profile, surface.dimension);
  return DefiningSurface::expression(surface.expression, surface.dimension);
}

json parse_json_text(const std::string& text, const std::string& origin) {
  try {
    return json::parse(text, nullptr, true, false);
  } catch (const json::parse_error& e) {
    // Translate the byte offset into line and column.
    std::size_t line = 1, column = 1;
    for (std::size_t i = 0; i + 1 < e.byte && i < text.size(); ++i) {
      if (text[i] == '\n') {
        ++line;
        column = 1;
      } else {
        ++column;
      }
    }
    std::ostringstream os;
    os << origin << ":" << line << ":" << column << ": malformed JSON (" << e.what() << ")";
    throw Error(ErrorKind::config, os.str());
  }
}

void apply_override(json& doc, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) throw Error(ErrorKind::config, "--set expects path=value, got '" + assignment + "'");
  const std::string path = assignment.substr(0, eq);
  const std::string raw = assignment.substr(eq + 1);
  json value;
  try {
    value = json::parse(raw, nullptr, true, false);
  } catch (const json::parse_error&) {
    value = raw;
  }
  json* node = &doc;
  std::size_t start = 0;
  for (;;) {
    const auto dot = path.find('.', start);
    const std::string key = path.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
    if (key.empty()) throw Error(ErrorKind::config, "--set path '" + path + "' has an empty component");
    if (!node->is_object()) {
      if (!node->is_null()) throw Error(ErrorKind::config, "--set path '" + path + "' crosses a non-object value");
      *node = json::object();
    }
    if (dot == std::string::npos) {
      (*node)[key] = value;
      return;
    }
    node = &(*node)[key];
    start = dot + 1;
  }
}

RunConfig load_config(const json& doc) {
  allow_keys(doc, "", {"surface", "integrator", "sweep", "audit", "flow", "compare", "output"});
  if (!doc.contains("surface")) bad("surface", "required");
  RunConfig c;
  c.surface = load_surface(doc.at("surface"));

  const json empty = json::object();
  auto block = [&](const char* key) -> const json& { return doc.contains(key) ? doc.at(key) : empty; };

  const json& ig = block("integrator");
  allow_keys(ig, "integrator", {"base_step", "max_angle_per_step", "constraint_tolerance", "max_steps"});
  c.integrator.base_step = positive(ig, "integrator", "base_step", c.integrator.base_step);
  c.integrator.max_angle_per_step = positive(ig, "integrator", "max_angle_per_step", c.integrator.max_angle_per_step);
  c.integrator.constraint_tolerance =
      positive(ig, "integrator", "constraint_tolerance", c.integrator.constraint_tolerance);
  c.integrator.max_steps = count(ig, "integrator", "max_steps", c.integrator.max_steps, 1);
  c.integrator.validate();

  const json& sw = block("sweep");
  allow_keys(sw, "sweep", {"starts", "seed", "threads"});
  c.sweep.starts = count(sw, "sweep", "starts", c.sweep.starts, 1);
  c.sweep.seed = count(sw, "sweep", "seed", c.sweep.seed, 0);
  c.sweep.threads = count(sw, "sweep", "threads", c.sweep.threads, 0);

  const json& au = block("audit");
  allow_keys(au, "audit", {"samples", "strip_halfwidth", "epsilon_samples"});
  c.audit.samples = count(au, "audit", "samples", c.audit.samples, 16);
  if (au.contains("strip_halfwidth") && !au.at("strip_halfwidth").is_null())
    c.audit.strip_halfwidth = positive(au, "audit", "strip_halfwidth", 1.0);
  c.audit.epsilon_samples = count(au, "audit", "epsilon_samples", c.audit.epsilon_samples, 16);

  const json& fl = block("flow");
  allow_keys(fl, "flow", {"t_end", "x", "y"});
  c.flow.t_end = number(fl, "flow", "t_end", c.flow.t_end);
  if (fl.contains("x") != fl.contains("y")) bad("flow", "give both 'x' and 'y' or neither");
  if (fl.contains("x")) {
    c.flow.x = numbers(fl, "flow", "x");
    c.flow.y = numbers(fl, "flow", "y");
    if (c.flow.x->size() != c.surface.dimension || c.flow.y->size() != c.surface.dimension)
      bad("flow", "start vectors must have " + std::to_string(c.surface.dimension) + " entries");
  }

  const json& cp = block("compare");
  allow_keys(cp, "compare", {"tolerance", "t_values"});
  c.compare.tolerance = positive(cp, "compare", "tolerance", c.compare.tolerance);
  if (cp.contains("t_values")) {
    c.compare.t_values = numbers(cp, "compare", "t_values");
    for (double t : c.compare.t_values)
      if (!(t >= 1e-3 && t <= 1.0)) bad("compare.t_values", "entries must lie in [1e-3, 1]");
  }

  const json& out = block("output");
  allow_keys(out, "output", {"directory", "formats"});
  if (out.contains("directory")) c.output.directory = text(out, "output", "directory");
  if (out.contains("formats")) {
    const json& f = out.at("formats");
    if (!f.is_array() || f.empty()) bad("output.formats", "expected a non-empty array");
    c.output.formats.clear();
    for (const json& e : f) {
      if (!e.is_string() || (e != "json" && e != "csv")) bad("output.formats", "entries must be \"json\" or \"csv\"");
      c.output.formats.push_back(e.get<std::string>());
    }
  }

  json flow = {{"t_end", c.flow.t_end}};
  if (c.flow.x) {
    flow["x"] = *c.flow.x;
    flow["y"] = *c.flow.y;
  }
  c.resolved = {
      {"surface", surface_json(c.surface)},
      {"integrator",
       {{"base_step", c.integrator.base_step},
        {"max_angle_per_step", c.integrator.max_angle_per_step},
        {"constraint_tolerance", c.integrator.constraint_tolerance},
        {"max_steps", c.integrator.max_steps}}},
      {"sweep", {{"starts", c.sweep.starts}, {"seed", c.sweep.seed}, {"threads", c.sweep.threads}}},
      {"audit",
       {{"samples", c.audit.samples},
        {"strip_halfwidth", c.audit.strip_halfwidth ? json(*c.audit.strip_halfwidth) : json(nullptr)},
        {"epsilon_samples", c.audit.epsilon_samples}}},
      {"flow", flow},
      {"compare", {{"tolerance", c.compare.tolerance}, {"t_values", c.compare.t_values}}},
      {"output", {{"directory", c.output.directory}, {"formats", c.output.formats}}},
  };
  return c;
}

}  // namespace gss::cli
