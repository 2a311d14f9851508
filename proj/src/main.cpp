#include <cstdint>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "prgamp/harness.hpp"

namespace {

int run_and_emit(prgamp::ExperimentSpec spec, const std::string& out_path,
                 bool seed_given, std::uint64_t seed, std::size_t workers,
                 const std::string& recon_path,
                 prgamp::RunReport (*runner)(const prgamp::ExperimentSpec&, std::size_t)) {
  if (seed_given) spec.master_seed = seed;
  if (!recon_path.empty()) spec.recon_path = recon_path;
  const prgamp::RunReport report = runner(spec, workers);
  for (const auto& note : report.notices) std::cout << note << "\n";
  prgamp::write_csv(out_path, report.records);
  const auto summary = prgamp::render_summary(prgamp::summarize(report.records));
  std::cout << summary.text;
  std::cout << "wrote " << report.records.size() << " trial records to " << out_path
            << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Monte-Carlo harness for sparse phase retrieval"};
  app.require_subcommand(1);

  std::string spec_path;
  std::string out_path = "records.csv";
  std::string in_path;
  std::string recon_path;
  std::uint64_t seed = 0;
  std::size_t workers = 1;
  bool fail_on_empty = false;

  auto add_run_options = [&](CLI::App* cmd) {
    cmd->add_option("--spec", spec_path, "experiment spec (JSON)")->required();
    cmd->add_option("--out", out_path, "per-trial CSV output path");
    cmd->add_option("--seed", seed, "override the spec's master seed");
    cmd->add_option("--workers", workers, "concurrent trial workers")
        ->check(CLI::PositiveNumber);
  };

  CLI::App* pt = app.add_subcommand("phase-transition",
                                    "success-rate grid over sparsity and measurements");
  add_run_options(pt);
  CLI::App* ns = app.add_subcommand(
      "noise-sweep", "paired magnitude-measurement vs phase-oracle sweep over SNR");
  add_run_options(ns);
  CLI::App* im = app.add_subcommand("image", "recover a sparsified grayscale image");
  add_run_options(im);
  im->add_option("--recon", recon_path, "write the recovered image (PGM) here");
  CLI::App* su = app.add_subcommand("summarize", "aggregate a per-trial CSV");
  su->add_option("--in", in_path, "per-trial CSV to aggregate")->required();
  su->add_flag("--fail-on-empty", fail_on_empty,
               "exit nonzero when the summary grid has empty cells");

  CLI11_PARSE(app, argc, argv);

  try {
    if (su->parsed()) {
      const auto records = prgamp::read_csv(in_path);
      const auto summary = prgamp::render_summary(prgamp::summarize(records));
      std::cout << summary.text;
      if (fail_on_empty && summary.empty_cells > 0) {
        std::cerr << "error: " << summary.empty_cells << " empty grid cell(s)\n";
        return 2;
      }
      return 0;
    }
    const bool seed_given = pt->count("--seed") || ns->count("--seed") ||
                            im->count("--seed");
    auto spec = prgamp::load_spec(spec_path);
    if (pt->parsed())
      return run_and_emit(spec, out_path, seed_given, seed, workers, "",
                          &prgamp::run_phase_transition);
    if (ns->parsed())
      return run_and_emit(spec, out_path, seed_given, seed, workers, "",
                          &prgamp::run_noise_sweep);
    return run_and_emit(spec, out_path, seed_given, seed, workers, recon_path,
                        &prgamp::run_image_recovery);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
