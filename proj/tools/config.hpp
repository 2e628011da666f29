#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "gss/flow.hpp"
#include "gss/surface.hpp"

namespace gss::cli {

inline constexpr int kFormatVersion = 1;

struct SurfaceBlock {
  std::string family;  // sphere | ellipsoid | revolution | expression
  std::size_t dimension = 3;
  double radius = 1.0;
  std::vector<double> semiaxes;
  std::string profile;
  std::string expression;
};

struct SweepBlock {
  std::size_t starts = 10;
  std::uint64_t seed = 1;
  std::size_t threads = 0;  // 0: hardware concurrency
};

struct AuditBlock {
  std::size_t samples = 4096;
  std::optional<double> strip_halfwidth;
  std::size_t epsilon_samples = 4096;
};

struct FlowBlock {
  double t_end = 6.283185307179586;
  std::optional<std::vector<double>> x;
  std::optional<std::vector<double>> y;
};

struct CompareBlock {
  double tolerance = 1e-6;
  std::vector<double> t_values = {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};
};

struct OutputBlock {
  std::string directory = ".";
  std::vector<std::string> formats = {"json", "csv"};
  bool has(const std::string& format) const;
};

struct RunConfig {
  SurfaceBlock surface;
  IntegratorConfig integrator;
  SweepBlock sweep;
  AuditBlock audit;
  FlowBlock flow;
  CompareBlock compare;
  OutputBlock output;
  nlohmann::json resolved;  // every field, defaults filled in

  DefiningSurface build_surface() const;
};

/// Parses strict JSON text. Throws ConfigError naming the line and column of
/// malformed input.
nlohmann::json parse_json_text(const std::string& text, const std::string& origin);

/// Applies a dotted-path override `a.b.c=value`. The value is read as JSON
/// when it parses, otherwise as a string.
void apply_override(nlohmann::json& doc, const std::string& assignment);

/// Validates and resolves a config document. Unknown keys, wrong types and
/// out-of-range values throw ConfigError.
RunConfig load_config(const nlohmann::json& doc);

}  // namespace gss::cli
