#include "prgamp/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <ctime>
#include <exception>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <mutex>
#include <set>
#include <sstream>
#include <stdexcept>
#include <thread>
#include <tuple>

#include "json.hpp"
#include "prgamp/driver.hpp"
#include "prgamp/metrics.hpp"
#include "prgamp/pgm.hpp"
#include "prgamp/rng.hpp"

namespace prgamp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double energy(const cvec& v) {
  double e = 0.0;
  for (const auto& z : v) e += std::norm(z);
  return e;
}

// ---------------------------------------------------------------------------
// trial scheduling

void parallel_for(std::size_t count, std::size_t workers,
                  const std::function<void(std::size_t)>& body) {
  workers = std::max<std::size_t>(1, std::min(workers, count));
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::mutex err_mutex;
  std::exception_ptr first_error;
  auto work = [&] {
    while (true) {
      const std::size_t i = next.fetch_add(1);
      if (i >= count) break;
      try {
        body(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(err_mutex);
        if (!first_error) first_error = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

std::uint64_t cell_trial_seed(std::uint64_t master, std::size_t k, std::size_t m,
                              double snr_db, std::size_t trial) {
  std::uint64_t snr_bits = 0;
  static_assert(sizeof snr_bits == sizeof snr_db);
  std::memcpy(&snr_bits, &snr_db, sizeof snr_bits);
  std::uint64_t s = mix_seed(master, k);
  s = mix_seed(s, m);
  s = mix_seed(s, snr_bits);
  return mix_seed(s, trial);
}

// ---------------------------------------------------------------------------
// one synthetic trial: planted signal, operator, exact-variance noise

struct TrialData {
  std::unique_ptr<MeasurementOperator> op;
  cvec x;          // planted signal
  cvec u;          // complex measurements A x + w
  dvec y;          // magnitudes |A x + w|
  double nu_w = 0.0;
  double noise_ratio = 0.0;  // ||w||^2 * SNR / ||A x||^2, should sit near 1
};

cvec draw_signal(std::size_t n, std::size_t k, FieldKind field, double phi,
                 std::uint64_t seed) {
  Rng rng(seed);
  cvec x(n, cd{});
  const double scale = std::sqrt(phi);
  for (std::size_t idx : rng.sample_without_replacement(n, k)) {
    x[idx] = (field == FieldKind::real_field) ? cd{scale * rng.gaussian(), 0.0}
                                              : scale * rng.cgaussian();
  }
  return x;
}

TrialData make_trial(std::unique_ptr<MeasurementOperator> op, const cvec& x,
                     double snr_db, std::uint64_t noise_seed) {
  TrialData data;
  data.op = std::move(op);
  data.x = x;
  const cvec z = data.op->forward(x);
  const double z2 = energy(z);
  if (!(z2 > 0.0))
    throw std::runtime_error("trial draw produced zero measurement energy");
  const double snr = std::pow(10.0, snr_db / 10.0);
  data.nu_w = z2 / (double(z.size()) * snr);
  Rng rng(noise_seed);
  data.u.resize(z.size());
  double w2 = 0.0;
  for (std::size_t i = 0; i < z.size(); ++i) {
    const cd w = std::sqrt(data.nu_w) * rng.cgaussian();
    w2 += std::norm(w);
    data.u[i] = z[i] + w;
  }
  data.noise_ratio = w2 * snr / z2;
  data.y.resize(data.u.size());
  for (std::size_t i = 0; i < data.u.size(); ++i) data.y[i] = std::abs(data.u[i]);
  return data;
}

TrialData draw_trial(const ExperimentSpec& spec, std::size_t n, std::size_t k,
                     std::size_t m, double snr_db, std::uint64_t seed) {
  OperatorConfig ocfg;
  ocfg.kind = spec.op_kind;
  ocfg.m = m;
  ocfg.n = n;
  ocfg.side = spec.side;
  ocfg.seed = mix_seed(seed, 2);
  auto op = build_operator(ocfg);
  const cvec x = draw_signal(n, k, spec.field, spec.prior_phi, mix_seed(seed, 1));
  return make_trial(std::move(op), x, snr_db, mix_seed(seed, 3));
}

// ---------------------------------------------------------------------------
// solvers -> records

DriverConfig driver_config(const ExperimentSpec& spec, double snr_db, double oracle_nuw,
                           std::uint64_t seed) {
  DriverConfig cfg;
  cfg.max_attempts = spec.max_attempts;
  cfg.seed = mix_seed(seed, 4);
  cfg.nres_stop = default_nres_stop(snr_db);
  cfg.gamp.damping = spec.damping;
  cfg.gamp.max_iters = spec.max_iters;
  cfg.gamp.uniform_variance = spec.uniform_variance;
  if (spec.noise_learning == "oracle") {
    cfg.em_enabled = false;
    cfg.oracle_nuw = oracle_nuw;
  } else {
    cfg.em_enabled = true;
    cfg.em.update_every = spec.em_update_every;
  }
  return cfg;
}

template <typename Solve>
TrialRecord scored_trial(const char* algorithm, const TrialData& data,
                         const AmbiguitySet& amb, double success_threshold,
                         std::size_t k, double snr_db, std::size_t trial,
                         std::uint64_t seed, const Solve& solve,
                         cvec* x_out = nullptr) {
  TrialRecord rec;
  rec.algorithm = algorithm;
  rec.k = k;
  rec.m = data.op->rows();
  rec.snr_db = snr_db;
  rec.trial = trial;
  rec.seed = seed;
  const auto start = std::chrono::steady_clock::now();
  try {
    const RecoveryResult res = solve();
    rec.nres = res.nres_best;
    rec.attempts = res.attempts_used;
    for (const auto& a : res.attempts) rec.iterations += a.iterations;
    const double v = nmse(data.x, res.x_best, amb);
    rec.nmse_db = nmse_db(v);
    rec.success = is_success(v, success_threshold);
    if (x_out) *x_out = res.x_best;
  } catch (const AllAttemptsDiverged& e) {
    rec.nres = kInf;
    rec.nmse_db = kInf;
    rec.success = false;
    rec.attempts = e.attempts().size();
    for (const auto& a : e.attempts()) rec.iterations += a.iterations;
  }
  rec.wall_ms = std::chrono::duration<double, std::milli>(
                    std::chrono::steady_clock::now() - start)
                    .count();
  return rec;
}

std::string noise_ratio_notice(const TrialRecord& rec, double ratio) {
  char buf[160];
  std::snprintf(buf, sizeof buf,
                "notice: %s k=%zu m=%zu snr_db=%g trial=%zu: drawn-noise energy ratio "
                "%.3f outside [0.5, 2]",
                rec.algorithm.c_str(), rec.k, rec.m, rec.snr_db, rec.trial, ratio);
  return buf;
}

struct Job {
  std::size_t k = 0;
  std::size_t m = 0;
  double snr_db = 0.0;
  std::size_t trial = 0;
};

void sort_records(std::vector<TrialRecord>& records) {
  auto rank = [](const std::string& alg) { return alg == "pr" ? 0 : 1; };
  std::stable_sort(records.begin(), records.end(),
                   [&](const TrialRecord& a, const TrialRecord& b) {
                     return std::make_tuple(a.k, a.m, a.snr_db, a.trial, rank(a.algorithm)) <
                            std::make_tuple(b.k, b.m, b.snr_db, b.trial, rank(b.algorithm));
                   });
}

std::vector<Job> build_jobs(const ExperimentSpec& spec, std::size_t n,
                            std::vector<std::string>& notices) {
  std::vector<Job> jobs;
  for (std::size_t k : spec.k_grid) {
    if (k == 0) {
      notices.push_back("notice: skipped k=0 cells: a zero signal leaves nothing to "
                        "recover and its error is undefined");
      continue;
    }
    if (k > n)
      throw std::invalid_argument("spec: sparsity k exceeds signal length");
    for (std::size_t m : spec.m_grid)
      for (double snr_db : spec.snr_db_grid)
        for (std::size_t t = 0; t < spec.trials; ++t) jobs.push_back({k, m, snr_db, t});
  }
  return jobs;
}

std::size_t effective_length(const ExperimentSpec& spec) {
  const bool two_d = spec.op_kind == OperatorKind::dft_2d ||
                     spec.op_kind == OperatorKind::masked_fourier ||
                     spec.op_kind == OperatorKind::blurred_masked_fourier;
  if (two_d) {
    if (spec.side == 0) throw std::invalid_argument("spec: 2-D operator needs side > 0");
    if (spec.n != 0 && spec.n != spec.side * spec.side)
      throw std::invalid_argument("spec: n must equal side*side for 2-D operators");
    return spec.side * spec.side;
  }
  if (spec.n == 0) throw std::invalid_argument("spec: signal length n must be positive");
  return spec.n;
}

void gather_notices(std::vector<std::string>& notices,
                    const std::vector<std::string>& per_trial) {
  for (const auto& s : per_trial)
    if (!s.empty()) notices.push_back(s);
}

}  // namespace

// ---------------------------------------------------------------------------
// runners

RunReport run_phase_transition(const ExperimentSpec& spec, std::size_t workers) {
  validate_spec(spec);
  const std::size_t n = effective_length(spec);
  RunReport report;
  const std::vector<Job> jobs = build_jobs(spec, n, report.notices);
  report.records.resize(jobs.size());
  std::vector<std::string> trial_notices(jobs.size());

  parallel_for(jobs.size(), workers, [&](std::size_t i) {
    const Job& job = jobs[i];
    const std::uint64_t seed =
        cell_trial_seed(spec.master_seed, job.k, job.m, job.snr_db, job.trial);
    const TrialData data = draw_trial(spec, n, job.k, job.m, job.snr_db, seed);
    BernoulliGaussianPrior prior{spec.field, double(job.k) / double(n), spec.prior_phi};
    const DriverConfig cfg = driver_config(spec, job.snr_db, data.nu_w, seed);
    const AmbiguitySet amb = ambiguity_for(spec.op_kind, spec.field, spec.side);
    report.records[i] = scored_trial(
        "pr", data, amb, spec.success_threshold, job.k, job.snr_db, job.trial, seed,
        [&] { return pr_gamp(data.y, *data.op, prior, cfg); });
    if (data.noise_ratio < 0.5 || data.noise_ratio > 2.0)
      trial_notices[i] = noise_ratio_notice(report.records[i], data.noise_ratio);
  });

  gather_notices(report.notices, trial_notices);
  sort_records(report.records);
  return report;
}

RunReport run_noise_sweep(const ExperimentSpec& spec, std::size_t workers) {
  validate_spec(spec);
  const std::size_t n = effective_length(spec);
  RunReport report;
  const std::vector<Job> jobs = build_jobs(spec, n, report.notices);
  report.records.resize(2 * jobs.size());
  std::vector<std::string> trial_notices(jobs.size());

  parallel_for(jobs.size(), workers, [&](std::size_t i) {
    const Job& job = jobs[i];
    const std::uint64_t seed =
        cell_trial_seed(spec.master_seed, job.k, job.m, job.snr_db, job.trial);
    // one draw feeds both solvers, so the comparison is paired exactly
    const TrialData data = draw_trial(spec, n, job.k, job.m, job.snr_db, seed);
    BernoulliGaussianPrior prior{spec.field, double(job.k) / double(n), spec.prior_phi};
    const AmbiguitySet amb = ambiguity_for(spec.op_kind, spec.field, spec.side);

    const DriverConfig pr_cfg = driver_config(spec, job.snr_db, data.nu_w, seed);
    report.records[2 * i] = scored_trial(
        "pr", data, amb, spec.success_threshold, job.k, job.snr_db, job.trial, seed,
        [&] { return pr_gamp(data.y, *data.op, prior, pr_cfg); });

    // The phase oracle always knows the true noise variance; its stop rule is
    // scaled for the full complex residual, whose floor is ~(M-K)/M * 1/SNR.
    DriverConfig po_cfg = driver_config(spec, job.snr_db, data.nu_w, mix_seed(seed, 5));
    po_cfg.em_enabled = false;
    po_cfg.oracle_nuw = data.nu_w;
    po_cfg.nres_stop = 10.0 * std::pow(10.0, -job.snr_db / 10.0);
    report.records[2 * i + 1] = scored_trial(
        "po", data, amb, spec.success_threshold, job.k, job.snr_db, job.trial, seed,
        [&] { return po_gamp(data.u, data.nu_w, *data.op, prior, po_cfg); });

    if (data.noise_ratio < 0.5 || data.noise_ratio > 2.0)
      trial_notices[i] = noise_ratio_notice(report.records[2 * i], data.noise_ratio);
  });

  gather_notices(report.notices, trial_notices);
  sort_records(report.records);
  return report;
}

RunReport run_image_recovery(const ExperimentSpec& spec, std::size_t workers) {
  validate_spec(spec);
  if (spec.image_path.empty())
    throw std::invalid_argument("spec: image runs need image_path");
  const PgmImage img = pgm_read(spec.image_path);
  if (img.width != img.height)
    throw std::invalid_argument("spec: 2-D transforms need a square image");
  ExperimentSpec local = spec;
  local.side = img.width;
  local.n = img.width * img.height;
  local.field = FieldKind::real_field;
  local.uniform_variance = true;  // FFT-only operators carry no entrywise |a|^2
  const std::size_t n = effective_length(local);

  // order pixels once: by magnitude descending, index ascending for ties
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return img.pixels[a] > img.pixels[b];
  });
  std::size_t nonzero = 0;
  for (std::size_t i = 0; i < n; ++i)
    if (img.pixels[i] != 0) ++nonzero;
  if (nonzero == 0) throw std::invalid_argument("image is all zero: nothing to recover");

  RunReport report;
  std::vector<Job> jobs;
  for (std::size_t k : local.k_grid) {
    if (k == 0) {
      report.notices.push_back("notice: skipped k=0 cells: a zero signal leaves nothing "
                               "to recover and its error is undefined");
      continue;
    }
    std::size_t k_eff = std::min(k, nonzero);
    if (k_eff < k) {
      std::ostringstream msg;
      msg << "notice: image has only " << nonzero << " nonzero pixels; k=" << k
          << " reduced to " << k_eff;
      report.notices.push_back(msg.str());
    }
    for (std::size_t m : local.m_grid)
      for (double snr_db : local.snr_db_grid)
        for (std::size_t t = 0; t < local.trials; ++t) jobs.push_back({k_eff, m, snr_db, t});
  }
  report.records.resize(jobs.size());
  std::vector<std::string> trial_notices(jobs.size());
  cvec recon_signal;
  cvec recon_truth;
  std::mutex recon_mutex;

  parallel_for(jobs.size(), workers, [&](std::size_t i) {
    const Job& job = jobs[i];
    // keep the job.k_eff largest-magnitude pixels
    cvec x_true(n, cd{});
    for (std::size_t r = 0; r < job.k; ++r)
      x_true[order[r]] = cd{double(img.pixels[order[r]]), 0.0};

    const std::uint64_t seed =
        cell_trial_seed(local.master_seed, job.k, job.m, job.snr_db, job.trial);
    OperatorConfig ocfg;
    ocfg.kind = local.op_kind;
    ocfg.m = job.m;
    ocfg.n = n;
    ocfg.side = local.side;
    ocfg.seed = mix_seed(seed, 2);
    const TrialData data =
        make_trial(build_operator(ocfg), x_true, job.snr_db, mix_seed(seed, 3));

    // prior scale estimated from the measurements: E||A x||^2 = ||A||_F^2 lambda phi
    const double lambda = double(job.k) / double(n);
    double y2 = 0.0;
    for (double v : data.y) y2 += v * v;
    const double phi = y2 / (lambda * data.op->frobenius_sq());
    BernoulliGaussianPrior prior{FieldKind::real_field, lambda, phi};

    const DriverConfig cfg = driver_config(local, job.snr_db, data.nu_w, seed);
    const AmbiguitySet amb = ambiguity_for(local.op_kind, FieldKind::real_field, local.side);

    const bool keep_estimate = (i == 0 && !local.recon_path.empty());
    cvec estimate;
    report.records[i] = scored_trial(
        "pr", data, amb, local.success_threshold, job.k, job.snr_db, job.trial, seed,
        [&] { return pr_gamp(data.y, *data.op, prior, cfg); },
        keep_estimate ? &estimate : nullptr);
    if (keep_estimate && !estimate.empty()) {
      std::lock_guard<std::mutex> lock(recon_mutex);
      recon_signal = std::move(estimate);
      recon_truth = x_true;
    }
    if (data.noise_ratio < 0.5 || data.noise_ratio > 2.0)
      trial_notices[i] = noise_ratio_notice(report.records[i], data.noise_ratio);
  });

  gather_notices(report.notices, trial_notices);
  sort_records(report.records);

  if (!local.recon_path.empty() && !recon_signal.empty()) {
    // undo the unobservable sign/phase before rendering
    cd corr{};
    for (std::size_t i = 0; i < n; ++i) corr += recon_truth[i] * std::conj(recon_signal[i]);
    const cd rot = (std::abs(corr) > 0.0) ? std::polar(1.0, std::arg(corr)) : cd{1.0, 0.0};
    PgmImage out;
    out.width = local.side;
    out.height = local.side;
    out.pixels.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      const double v = std::round((rot * recon_signal[i]).real());
      out.pixels[i] = static_cast<std::uint8_t>(std::clamp(v, 0.0, 255.0));
    }
    pgm_write(local.recon_path, out);
  }
  return report;
}

// ---------------------------------------------------------------------------
// CSV

namespace {

const char* kCsvHeader =
    "algorithm,k,m,snr_db,trial,seed,nmse_db,nres,success,attempts,iterations,wall_ms";

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      fields.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  fields.push_back(cur);
  return fields;
}

}  // namespace

void write_csv(const std::string& path, const std::vector<TrialRecord>& records) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("csv: cannot open '" + path + "' for writing");
  std::time_t now = std::time(nullptr);
  char stamp[32] = "unknown";
  if (std::tm* tm = std::gmtime(&now))
    std::strftime(stamp, sizeof stamp, "%Y-%m-%dT%H:%M:%SZ", tm);
  out << "# monte-carlo trial records (schema 1)\n";
  out << "# generated: " << stamp << "\n";
  out << "# wall_ms varies between runs; every other column is seed-deterministic\n";
  out << kCsvHeader << "\n";
  for (const auto& r : records) {
    out << r.algorithm << ',' << r.k << ',' << r.m << ',' << format_double(r.snr_db)
        << ',' << r.trial << ',' << r.seed << ',' << format_double(r.nmse_db) << ','
        << format_double(r.nres) << ',' << (r.success ? 1 : 0) << ',' << r.attempts
        << ',' << r.iterations << ',' << format_double(r.wall_ms) << "\n";
  }
  if (!out) throw std::runtime_error("csv: write to '" + path + "' failed");
}

std::vector<TrialRecord> read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("csv: cannot open '" + path + "' for reading");
  std::vector<TrialRecord> records;
  std::string line;
  std::size_t lineno = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    if (!header_seen) {
      if (line != kCsvHeader)
        throw std::runtime_error("csv: unexpected header at line " +
                                 std::to_string(lineno));
      header_seen = true;
      continue;
    }
    const auto fields = split_fields(line);
    if (fields.size() != 12)
      throw std::runtime_error("csv: wrong field count at line " + std::to_string(lineno));
    try {
      TrialRecord r;
      r.algorithm = fields[0];
      r.k = std::stoull(fields[1]);
      r.m = std::stoull(fields[2]);
      r.snr_db = std::stod(fields[3]);
      r.trial = std::stoull(fields[4]);
      r.seed = std::stoull(fields[5]);
      r.nmse_db = std::stod(fields[6]);
      r.nres = std::stod(fields[7]);
      r.success = std::stoi(fields[8]) != 0;
      r.attempts = std::stoull(fields[9]);
      r.iterations = std::stoull(fields[10]);
      r.wall_ms = std::stod(fields[11]);
      records.push_back(std::move(r));
    } catch (const std::exception&) {
      throw std::runtime_error("csv: malformed row at line " + std::to_string(lineno));
    }
  }
  if (!header_seen) throw std::runtime_error("csv: '" + path + "' has no header row");
  return records;
}

// ---------------------------------------------------------------------------
// summaries

std::vector<CellSummary> summarize(const std::vector<TrialRecord>& records) {
  auto rank = [](const std::string& alg) { return alg == "pr" ? 0 : 1; };
  std::map<std::tuple<int, std::size_t, std::size_t, double, std::string>,
           std::vector<const TrialRecord*>>
      cells;
  for (const auto& r : records)
    cells[{rank(r.algorithm), r.k, r.m, r.snr_db, r.algorithm}].push_back(&r);
  std::vector<CellSummary> out;
  for (const auto& [key, rows] : cells) {
    CellSummary c;
    c.algorithm = std::get<4>(key);
    c.k = std::get<1>(key);
    c.m = std::get<2>(key);
    c.snr_db = std::get<3>(key);
    c.count = rows.size();
    dvec nmses, walls;
    std::size_t wins = 0;
    for (const TrialRecord* r : rows) {
      nmses.push_back(r->nmse_db);
      walls.push_back(r->wall_ms);
      if (r->success) ++wins;
    }
    c.success_rate = double(wins) / double(rows.size());
    c.median_nmse_db = lower_median(nmses);
    c.median_wall_ms = lower_median(walls);
    out.push_back(std::move(c));
  }
  return out;
}

SummaryText render_summary(const std::vector<CellSummary>& cells) {
  SummaryText result;
  std::ostringstream out;
  // one block per (algorithm, snr); tables are K rows x M columns
  std::vector<std::pair<std::string, double>> blocks;
  for (const auto& c : cells) {
    std::pair<std::string, double> b{c.algorithm, c.snr_db};
    if (std::find(blocks.begin(), blocks.end(), b) == blocks.end()) blocks.push_back(b);
  }
  for (const auto& [alg, snr] : blocks) {
    std::set<std::size_t> ks, ms;
    std::map<std::pair<std::size_t, std::size_t>, const CellSummary*> grid;
    for (const auto& c : cells) {
      if (c.algorithm != alg || c.snr_db != snr) continue;
      ks.insert(c.k);
      ms.insert(c.m);
      grid[{c.k, c.m}] = &c;
    }
    out << "## algorithm=" << alg << " snr_db=" << format_double(snr) << "\n";
    struct Field {
      const char* label;
      std::function<std::string(const CellSummary&)> fmt;
    };
    const Field fields[] = {
        {"success rate", [](const CellSummary& c) {
           char buf[16];
           std::snprintf(buf, sizeof buf, "%.2f", c.success_rate);
           return std::string(buf);
         }},
        {"median nmse_db", [](const CellSummary& c) {
           char buf[24];
           std::snprintf(buf, sizeof buf, "%.2f", c.median_nmse_db);
           return std::string(buf);
         }},
        {"median wall_ms", [](const CellSummary& c) {
           char buf[24];
           std::snprintf(buf, sizeof buf, "%.1f", c.median_wall_ms);
           return std::string(buf);
         }},
    };
    for (std::size_t fi = 0; fi < std::size(fields); ++fi) {
      out << fields[fi].label << " (rows K, cols M):\n";
      out << "K\\M";
      for (std::size_t m : ms) out << "," << m;
      out << "\n";
      for (std::size_t k : ks) {
        out << k;
        for (std::size_t m : ms) {
          auto it = grid.find({k, m});
          if (it == grid.end()) {
            out << ",n/a";
            if (fi == 0) ++result.empty_cells;  // count each hole once
          } else {
            out << "," << fields[fi].fmt(*it->second);
          }
        }
        out << "\n";
      }
    }
    out << "\n";
  }
  result.text = out.str();
  return result;
}

// ---------------------------------------------------------------------------
// spec files

void validate_spec(const ExperimentSpec& spec) {
  if (spec.schema_version != 1)
    throw std::invalid_argument("spec: unsupported schema_version " +
                                std::to_string(spec.schema_version));
  if (spec.trials < 1) throw std::invalid_argument("spec: trials must be >= 1");
  if (spec.k_grid.empty() || spec.m_grid.empty() || spec.snr_db_grid.empty())
    throw std::invalid_argument("spec: k_grid, m_grid, snr_db_grid must be non-empty");
  for (double s : spec.snr_db_grid)
    if (!std::isfinite(s)) throw std::invalid_argument("spec: snr_db values must be finite");
  for (std::size_t m : spec.m_grid)
    if (m == 0) throw std::invalid_argument("spec: m values must be positive");
  if (!(spec.prior_phi > 0.0)) throw std::invalid_argument("spec: prior_phi must be positive");
  if (!(spec.success_threshold > 0.0))
    throw std::invalid_argument("spec: success_threshold must be positive");
  if (spec.max_attempts < 1) throw std::invalid_argument("spec: max_attempts must be >= 1");
  if (spec.max_iters < 1) throw std::invalid_argument("spec: max_iters must be >= 1");
  if (!(spec.damping > 0.0) || spec.damping > 1.0)
    throw std::invalid_argument("spec: damping must lie in (0, 1]");
  if (spec.noise_learning != "em" && spec.noise_learning != "oracle")
    throw std::invalid_argument("spec: noise_learning must be \"em\" or \"oracle\"");
  if (spec.em_update_every < 1)
    throw std::invalid_argument("spec: em_update_every must be >= 1");
}

ExperimentSpec load_spec(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("spec: cannot open '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw std::runtime_error("spec: '" + path + "' is not valid JSON: " + e.what());
  }
  if (!j.is_object()) throw std::runtime_error("spec: top level must be an object");

  static const std::set<std::string> known = {
      "schema_version", "operator", "n", "side", "k_grid", "m_grid", "snr_db_grid",
      "field", "prior_phi", "trials", "master_seed", "success_threshold",
      "max_attempts", "max_iters", "damping", "uniform_variance", "noise_learning",
      "em_update_every", "image_path", "recon_path"};
  for (const auto& [key, value] : j.items()) {
    (void)value;
    if (!known.count(key)) throw std::runtime_error("spec: unknown key '" + key + "'");
  }

  ExperimentSpec spec;
  try {
    spec.schema_version = j.value("schema_version", 0);
    if (j.contains("operator")) spec.op_kind = kind_from_name(j.at("operator"));
    spec.n = j.value("n", std::size_t{0});
    spec.side = j.value("side", std::size_t{0});
    spec.k_grid = j.value("k_grid", std::vector<std::size_t>{});
    spec.m_grid = j.value("m_grid", std::vector<std::size_t>{});
    spec.snr_db_grid = j.value("snr_db_grid", dvec{});
    const std::string field = j.value("field", std::string("complex"));
    if (field == "complex") {
      spec.field = FieldKind::complex_field;
    } else if (field == "real") {
      spec.field = FieldKind::real_field;
    } else {
      throw std::runtime_error("field must be \"complex\" or \"real\"");
    }
    spec.prior_phi = j.value("prior_phi", 1.0);
    spec.trials = j.value("trials", std::size_t{100});
    spec.master_seed = j.value("master_seed", std::uint64_t{1});
    spec.success_threshold = j.value("success_threshold", 1e-6);
    spec.max_attempts = j.value("max_attempts", std::size_t{10});
    spec.max_iters = j.value("max_iters", std::size_t{500});
    spec.damping = j.value("damping", 0.25);
    spec.uniform_variance = j.value("uniform_variance", false);
    spec.noise_learning = j.value("noise_learning", std::string("em"));
    spec.em_update_every = j.value("em_update_every", std::size_t{1});
    spec.image_path = j.value("image_path", std::string());
    spec.recon_path = j.value("recon_path", std::string());
  } catch (const std::exception& e) {
    throw std::runtime_error("spec: '" + path + "': " + e.what());
  }
  validate_spec(spec);
  return spec;
}

}  // namespace prgamp
