#include <CLI11.hpp>
#include <iostream>

#include "thickobs/cli.hpp"

int main(int argc, char** argv)
{
  CLI::App app{"Thick-set observability toolkit"};
  std::string config_path;
  std::string out = ".";
  std::uint64_t seed = 0;
  int threads = 0;
  app.add_option("--config", config_path, "JSON config file")->required();
  app.add_option("--out", out, "output directory");
  auto* seed_opt = app.add_option("--seed", seed, "64-bit seed (overrides the config)");
  app.add_option("--threads", threads, "worker threads, 0 for all cores")->check(CLI::NonNegativeNumber);
  app.require_subcommand(1);
  for (const auto& name : thickobs::subcommands()) app.add_subcommand(name)->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : thickobs::kExitDomain;
  }

  thickobs::RunOptions opts;
  opts.subcommand = app.get_subcommands().front()->get_name();
  opts.out = out;
  opts.threads = threads;
  if (seed_opt->count() > 0) opts.seed = seed;
  opts.config_path = config_path;
  const int rc = thickobs::run_command(opts);
  if (rc != 0)
    std::cerr << "thickobs " << opts.subcommand << ": exit code " << rc << ", see "
              << (opts.out / "error.json").string() << '\n';
  return rc;
}
