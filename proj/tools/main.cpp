#include <iostream>

#include <CLI11.hpp>

#include "commands.hpp"

namespace fs = std::filesystem;
using namespace flexduplex::cli;

int main(int argc, char** argv) {
  CLI::App app{"Flexible duplex small-cell simulator"};
  app.require_subcommand(1);

  std::optional<fs::path> out_dir;
  RunOptions run;
  auto* run_cmd = app.add_subcommand("run", "Simulate one configuration and write report.csv / report.txt");
  run_cmd->add_option("config", run.config, "Configuration file")->required()->check(CLI::ExistingFile);
  run_cmd->add_option("-o,--out", out_dir, std::string("Output directory (default $") + kOutDirEnv + " or .)");
  run_cmd->add_flag("--layout", run.write_layout, "Also write layout.csv for replication 0");
  run_cmd->add_flag("--raw-log", run.write_raw_log, "Also write the per-subframe raw_log.csv of replication 0");

  SweepOptions sweep;
  auto* sweep_cmd = app.add_subcommand("sweep", "Run the [sweep] axes and write table2.csv / table2.txt");
  sweep_cmd->add_option("config", sweep.config, "Configuration file")->required()->check(CLI::ExistingFile);
  sweep_cmd->add_option("-o,--out", out_dir, "Output directory");

  ProvisionOptions prov;
  auto* prov_cmd = app.add_subcommand("provision", "Size resources from a demands CSV");
  prov_cmd->add_option("demands", prov.demands, "CSV: cell,direction,lambda,packet_bits,efficiency")
      ->required()
      ->check(CLI::ExistingFile);
  prov_cmd->add_option("--total", prov.total, "Pool size per direction; min-max split");
  prov_cmd->add_option("--rho-max", prov.rho_max, "Target utilization");
  prov_cmd->add_option("--w-target", prov.w_target, "Target mean queue, bits");

  auto* bands_cmd = app.add_subcommand("bands", "FDD band reuse table; prints it as CSV without a subcommand");
  int band = 0;
  auto* lookup_cmd = bands_cmd->add_subcommand("lookup", "TDD bands able to reuse an FDD band");
  lookup_cmd->add_option("band", band, "FDD band number")->required();
  std::string direction, scheme = "fma";
  bool json = false;
  auto* check_cmd = bands_cmd->add_subcommand("check", "Reuse verdict for one band direction");
  check_cmd->add_option("band", band, "FDD band number")->required();
  check_cmd->add_option("direction", direction, "ul or dl")->required();
  check_cmd->add_option("--scheme", scheme, "tma or fma")->check(CLI::IsMember({"tma", "fma", "TMA", "FMA"}));
  check_cmd->add_flag("--json", json, "Machine-readable verdict");

  fs::path cfg_path;
  auto* cfg_cmd = app.add_subcommand("config", "Print the effective configuration with all defaults");
  cfg_cmd->add_option("config", cfg_path, "Configuration file")->required()->check(CLI::ExistingFile);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kOk : kUsage;
  }

  if (*run_cmd) {
    run.out_dir = output_dir(out_dir);
    return cmd_run(run, std::cout, std::cerr);
  }
  if (*sweep_cmd) {
    sweep.out_dir = output_dir(out_dir);
    return cmd_sweep(sweep, std::cout, std::cerr);
  }
  if (*prov_cmd) return cmd_provision(prov, std::cout, std::cerr);
  if (*bands_cmd) {
    if (*lookup_cmd) return cmd_bands_lookup(band, std::cout, std::cerr);
    if (*check_cmd) return cmd_bands_check(band, direction, scheme, json, std::cout, std::cerr);
    return cmd_bands_list(std::cout);
  }
  if (*cfg_cmd) return cmd_print_config(cfg_path, std::cout, std::cerr);
  return kUsage;
}
