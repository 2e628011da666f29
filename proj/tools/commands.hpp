#pragma once

#include <iosfwd>
#include <optional>
#include <string>

#include "config.hpp"
#include "gss/error.hpp"
#include "gss/surface.hpp"

namespace gss::cli {

enum ExitCode : int { kOk = 0, kUsage = 1, kVerification = 2, kNumerical = 3 };

/// Usage/config errors map to 1, audit findings to 2, numerical failures to 3.
int exit_code_for(ErrorKind kind);

struct AuditOutcome {
  AuditReport report;
  std::optional<DefiningSurface> normalized;  // set unless the Hessian is indefinite
};

/// Symmetry, definiteness (with sign normalisation), curvature range and ε.
AuditOutcome run_audit(const DefiningSurface& surface, const AuditBlock& block);

struct CommandOptions {
  bool force = false;  // run `section` even if the audit fails
};

/// Runs one subcommand, writes its files into config.output.directory and
/// returns the process exit code. Human-readable progress goes to `log`.
int run_command(const std::string& name, const RunConfig& config, const CommandOptions& options, std::ostream& log);

}  // namespace gss::cli
