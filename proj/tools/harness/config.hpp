#ifndef SBIWSS_TOOLS_CONFIG_HPP
#define SBIWSS_TOOLS_CONFIG_HPP

//! Sweep configuration: a JSON file with full defaulting.  Every resolved
//! value is echoed back into the output directory so a run documents itself.

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "sbiwss/geometry.hpp"
#include "sbiwss/meshing.hpp"
#include "sbiwss/voxels.hpp"

namespace sbiwss::tools {

enum class ArtifactLevel { None, Profiles, Full };

struct SweepConfig {
  ChannelSpec geometry;
  ScanRegion scan;
  std::vector<double> re{100.0, 500.0, 1000.0};
  std::vector<double> kappa{0.0, 0.05, 0.10, 0.15, 0.20};
  std::vector<int> vpd{3, 9, 15, 28};
  std::vector<MeshResolution> sbi_mesh{MeshResolution::Medium};
  MeshResolution truth_mesh = MeshResolution::Fine;
  int seeds = 1;
  std::uint64_t master_seed = 1;
  int gamma_points = 200;
  int metric_quad_order = 5;
  int psf_quad_order = 18;
  double newton_tol = 1e-10;
  double grad_tol = 1e-8;
  int max_iterations = 100;
  ArtifactLevel artifacts = ArtifactLevel::Profiles;
  bool disk_cache = true;
  std::string out = "sweep_out";
  int workers = 8;

  // throws std::invalid_argument on out-of-range values or empty lists
  void validate() const;
};

// FNV-1a; the stable hash behind geometry tags and per-cell seed streams.
std::uint64_t stable_hash64(const std::string& key);

MeshResolution parse_mesh_resolution(const std::string& name);
const char* mesh_resolution_name(MeshResolution res);
ArtifactLevel parse_artifact_level(const std::string& name);
const char* artifact_level_name(ArtifactLevel level);

// Short geometry label used in file names, results rows, and cache keys:
// the two reference shapes keep their names, anything else is hashed.
std::string geometry_tag(const ChannelSpec& spec);

// Defaults overlaid with the JSON object; unknown keys are rejected so that
// typos cannot silently fall back to defaults.
SweepConfig config_from_json(const nlohmann::json& j);
SweepConfig load_config(const std::string& path);

// The fully resolved configuration as JSON (the echo format).
nlohmann::json config_to_json(const SweepConfig& config);

}  // namespace sbiwss::tools

#endif
