#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "prgamp/linops.hpp"
#include "prgamp/priors.hpp"
#include "prgamp/types.hpp"

namespace prgamp {

// Complete description of one Monte-Carlo experiment: operator family,
// (K, M, SNR) grid, prior and solver knobs, trial budget.  Loaded from a
// versioned flat-key JSON file; unknown keys are rejected.
struct ExperimentSpec {
  int schema_version = 1;
  OperatorKind op_kind = OperatorKind::dense_complex;
  std::size_t n = 0;     // signal length (side*side for 2-D kinds)
  std::size_t side = 0;  // grid side, 2-D kinds only
  std::vector<std::size_t> k_grid;
  std::vector<std::size_t> m_grid;
  dvec snr_db_grid;
  FieldKind field = FieldKind::complex_field;
  double prior_phi = 1.0;  // active-coefficient variance for synthetic draws
  std::size_t trials = 100;
  std::uint64_t master_seed = 1;
  double success_threshold = 1e-6;

  // solver knobs
  std::size_t max_attempts = 10;
  std::size_t max_iters = 500;
  double damping = 0.25;
  bool uniform_variance = false;
  std::string noise_learning = "em";  // "em" learns nu_w; "oracle" uses the drawn value
  std::size_t em_update_every = 1;

  // image runs only
  std::string image_path;
  std::string recon_path;  // optional: where to write the recovered image
};

ExperimentSpec load_spec(const std::string& path);
void validate_spec(const ExperimentSpec& spec);

// One row of the per-trial CSV.  Every column except wall_ms is reproducible
// from the spec and master seed.
struct TrialRecord {
  std::string algorithm;  // "pr" (magnitude measurements) or "po" (phase oracle)
  std::size_t k = 0;
  std::size_t m = 0;
  double snr_db = 0.0;
  std::size_t trial = 0;
  std::uint64_t seed = 0;
  double nmse_db = 0.0;  // +inf when every attempt diverged
  double nres = 0.0;
  bool success = false;
  std::size_t attempts = 0;
  std::size_t iterations = 0;  // summed over attempts
  double wall_ms = 0.0;
};

struct RunReport {
  std::vector<TrialRecord> records;  // sorted by (k, m, snr, trial, algorithm)
  std::vector<std::string> notices;  // skipped cells, noise-energy outliers, ...
};

RunReport run_phase_transition(const ExperimentSpec& spec, std::size_t workers);
RunReport run_noise_sweep(const ExperimentSpec& spec, std::size_t workers);
RunReport run_image_recovery(const ExperimentSpec& spec, std::size_t workers);

void write_csv(const std::string& path, const std::vector<TrialRecord>& records);
std::vector<TrialRecord> read_csv(const std::string& path);

struct CellSummary {
  std::string algorithm;
  std::size_t k = 0;
  std::size_t m = 0;
  double snr_db = 0.0;
  std::size_t count = 0;
  double success_rate = 0.0;
  double median_nmse_db = 0.0;  // lower medians
  double median_wall_ms = 0.0;
};

std::vector<CellSummary> summarize(const std::vector<TrialRecord>& records);

struct SummaryText {
  std::string text;
  std::size_t empty_cells = 0;  // (K, M) combinations with no rows in a ragged grid
};

// Success-rate and median grids (rows K, columns M) per algorithm and SNR;
// combinations absent from the records render as "n/a".
SummaryText render_summary(const std::vector<CellSummary>& cells);

}  // namespace prgamp
