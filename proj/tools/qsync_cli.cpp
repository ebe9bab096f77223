#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "qsync/commands.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Synchronization of oscillators coupled through a dissipative two-level system"};
  app.require_subcommand(1, 1);

  std::string config_path;
  qsync::CommandOptions opts;
  long n_max = -1;

  for (const char* name : {"analyze", "simulate", "compare", "sweep"}) {
    CLI::App* sub = app.add_subcommand(name);
    sub->add_option("config", config_path, "Scenario file")->required();
    sub->add_flag("--strict", opts.strict, "Exit 2 when the sufficient conditions fail (analyze)");
    sub->add_option("--out", opts.out_dir, "Directory for relative output paths");
    sub->add_option("--nmax", n_max, "Override the Fock truncation")->check(CLI::PositiveNumber);
    sub->add_flag("--convergence-check", opts.convergence_check, "Rerun at n_max + 2 and report deviations");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : qsync::kExitConfig;
  }
  if (n_max > 0) opts.n_max = n_max;
  const std::string command = app.get_subcommands().front()->get_name();
  return qsync::run_command(command, config_path, opts, std::cout, std::cerr);
}
