#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "commands.hpp"

namespace {

std::string read_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw gss::Error(gss::ErrorKind::config, "cannot read config file '" + path + "'");
  std::ostringstream os;
  os << is.rdbuf();
  return os.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Global hypersurfaces of section for geodesic flows on convex hypersurfaces"};
  app.require_subcommand(1);

  std::string config_path;
  std::vector<std::string> overrides;
  std::string out_dir;
  bool force = false;
  bool quiet = false;

  const std::vector<std::pair<const char*, const char*>> commands = {
      {"audit", "Check symmetry, Hessian definiteness, curvature and the angular bound"},
      {"flow", "Integrate one geodesic and write the trajectory"},
      {"section", "Sweep seeded page starts through the first-return map"},
      {"compare", "Compare numeric return maps with the closed forms"},
      {"epsilon", "Estimate the lower bound of A and the return-time bound"},
  };
  for (const auto& [name, help] : commands) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("-c,--config", config_path, "JSON config file")->required();
    sub->add_option("--set", overrides, "Override a config value, e.g. integrator.base_step=1e-4");
    sub->add_option("-o,--out", out_dir, "Output directory (overrides output.directory)");
    sub->add_flag("-q,--quiet", quiet, "Suppress progress messages");
    if (std::string(name) == "section") sub->add_flag("--force", force, "Sweep even if the audit fails");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : gss::cli::kUsage;
  }

  const std::string command = app.get_subcommands().front()->get_name();
  try {
    nlohmann::json doc = gss::cli::parse_json_text(read_file(config_path), config_path);
    for (const std::string& o : overrides) gss::cli::apply_override(doc, o);
    if (!out_dir.empty()) gss::cli::apply_override(doc, "output.directory=\"" + out_dir + "\"");
    const gss::cli::RunConfig config = gss::cli::load_config(doc);
    std::ostringstream sink;
    return gss::cli::run_command(command, config, {force}, quiet ? static_cast<std::ostream&>(sink) : std::cerr);
  } catch (const gss::Error& e) {
    std::cerr << "gss " << command << ": " << e.what() << '\n';
    return gss::cli::exit_code_for(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "gss " << command << ": " << e.what() << '\n';
    return gss::cli::kNumerical;
  }
}
