#ifndef SBIWSS_TOOLS_SWEEP_HPP
#define SBIWSS_TOOLS_SWEEP_HPP

//! Sweep engine: executes the full pipeline (truth solve, voxel sampling,
//! noise, direct voxel postprocessing, inflow fitting, error metrics) for
//! every cell of the configured grid.  Meshes, truth solves, sampling
//! operators, and truth profiles are cached and shared read-only across
//! worker threads; each run owns its optimizer workspace.

#include <cstdint>
#include <future>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <utility>
#include <vector>

#include "harness/config.hpp"
#include "sbiwss/flow_solution.hpp"
#include "sbiwss/mesh.hpp"
#include "sbiwss/metrics.hpp"
#include "sbiwss/psf.hpp"
#include "sbiwss/sbi.hpp"
#include "sbiwss/wss_profile.hpp"

namespace sbiwss::tools {

struct Cell {
  double re = 1000.0;
  double kappa = 0.0;
  int vpd = 9;
  MeshResolution sbi_mesh = MeshResolution::Medium;
  int seed_index = 0;
};

struct RunRecord {
  Cell cell;
  std::string geometry;
  std::uint64_t stream_seed = 0;
  bool ok = false;
  std::string status;         // optimizer status, or "failed"
  std::string failure_stage;  // empty when the pipeline completed
  std::string message;        // diagnostics for failures
  double e_sbi = 0.0, e_mri = 0.0;
  double theta_star = 0.0, theta_plugin = 0.0;
  double cost = 0.0, grad_norm = 0.0;
  int iterations = 0, n_forward = 0, n_adjoint = 0;
  double seconds = 0.0;
  std::vector<std::pair<std::string, std::string>> artifacts;  // kind, path
};

// File tag for one cell, e.g. stenosis_re1000_k0p05_vpd9_medium_s0.
std::string cell_tag(const std::string& geometry, const Cell& cell);

// One results.csv line (no newline); byte-stable for identical inputs.
std::string results_csv_row(const RunRecord& record);
extern const char* const kResultsCsvHeader;

nlohmann::json record_to_json(const RunRecord& record);

class SweepEngine {
 public:
  explicit SweepEngine(const SweepConfig& config);

  const SweepConfig& config() const { return cfg_; }
  const std::string& geometry() const { return geom_tag_; }

  // Cartesian product of the configured lists, in results-table order.
  std::vector<Cell> cells() const;

  // Stable per-cell noise stream: a hash of the master seed and the cell
  // coordinates, so streams do not depend on which other cells run.
  std::uint64_t stream_seed(const Cell& cell) const;

  // Full pipeline for one cell; never throws, failures are recorded.
  RunRecord run_single(const Cell& cell);

  // All cells on a bounded worker pool; writes results.csv, summary.csv,
  // records.jsonl and the config echo under config().out.
  std::vector<RunRecord> run_sweep();

  // Shared read-only building blocks (also used by the check suites).
  std::shared_ptr<const Mesh> mesh(MeshResolution res);
  std::shared_ptr<const FlowSolution> truth_solution(double re);
  std::shared_ptr<const PsfOperator> psf(MeshResolution res, int vpd);
  std::shared_ptr<const WssProfile> truth_profile(double re);
  const GammaSamples& gamma() const { return gamma_; }
  sbiwss::SbiSettings sbi_settings() const;
  double theta_of(double re) const;

 private:
  template <class K, class V>
  class Shared {
   public:
    std::shared_ptr<const V> get(const K& key,
                                 std::function<std::shared_ptr<const V>()> make);

   private:
    std::map<K, std::shared_future<std::shared_ptr<const V>>> map_;
    std::mutex mu_;
  };

  void write_outputs(const std::vector<RunRecord>& records) const;

  SweepConfig cfg_;
  std::string geom_tag_;
  GammaSamples gamma_;
  Shared<int, Mesh> meshes_;
  Shared<double, FlowSolution> truths_;
  Shared<std::pair<int, int>, PsfOperator> psfs_;
  Shared<double, WssProfile> truth_profiles_;
};

// Mean/std aggregation used for summary.csv; exposed for the check suites.
struct CellStats {
  double re = 0.0, kappa = 0.0;
  int vpd = 0;
  MeshResolution sbi_mesh = MeshResolution::Medium;
  int n = 0;
  double e_sbi_mean = 0.0, e_sbi_std = 0.0;
  double e_mri_mean = 0.0, e_mri_std = 0.0;
};

std::vector<CellStats> summarize(const std::vector<RunRecord>& records);

}  // namespace sbiwss::tools

#endif
