#include "harness/config.hpp"

#include <cstdio>
#include <fstream>
#include <set>
#include <stdexcept>

namespace sbiwss::tools {

std::uint64_t stable_hash64(const std::string& key) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : key) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

namespace {

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

MeshResolution parse_mesh_resolution(const std::string& name) {
  if (name == "coarse") return MeshResolution::Coarse;
  if (name == "medium") return MeshResolution::Medium;
  if (name == "fine") return MeshResolution::Fine;
  throw std::invalid_argument("unknown mesh resolution: " + name);
}

const char* mesh_resolution_name(MeshResolution res) {
  switch (res) {
    case MeshResolution::Coarse:
      return "coarse";
    case MeshResolution::Medium:
      return "medium";
    case MeshResolution::Fine:
      return "fine";
  }
  return "unknown";
}

ArtifactLevel parse_artifact_level(const std::string& name) {
  if (name == "none") return ArtifactLevel::None;
  if (name == "profiles") return ArtifactLevel::Profiles;
  if (name == "full") return ArtifactLevel::Full;
  throw std::invalid_argument("unknown artifact level: " + name);
}

const char* artifact_level_name(ArtifactLevel level) {
  switch (level) {
    case ArtifactLevel::None:
      return "none";
    case ArtifactLevel::Profiles:
      return "profiles";
    case ArtifactLevel::Full:
      return "full";
  }
  return "unknown";
}

std::string geometry_tag(const ChannelSpec& spec) {
  const ChannelSpec ref;
  auto same = [](double a, double b) { return a == b; };
  const bool base = same(spec.half_width0, ref.half_width0) &&
                    same(spec.bump_center, ref.bump_center) &&
                    same(spec.bump_sigma, ref.bump_sigma) &&
                    same(spec.x_min, ref.x_min) && same(spec.x_max, ref.x_max);
  if (base && spec.bump_area == ref.bump_area) return "stenosis";
  if (base && spec.bump_area == 0.0) return "straight";
  const std::string key = num(spec.half_width0) + "," + num(spec.bump_area) +
                          "," + num(spec.bump_center) + "," +
                          num(spec.bump_sigma) + "," + num(spec.x_min) + "," +
                          num(spec.x_max);
  char buf[20];
  std::snprintf(buf, sizeof buf, "%08llx",
                static_cast<unsigned long long>(fnv1a(key) & 0xffffffffull));
  return std::string("channel-") + buf;
}

void SweepConfig::validate() const {
  geometry.validate();
  if (re.empty() || kappa.empty() || vpd.empty() || sbi_mesh.empty())
    throw std::invalid_argument("config: empty sweep list");
  for (double r : re)
    if (!(r > 0.0)) throw std::invalid_argument("config: Re must be positive");
  for (double k : kappa)
    if (k < 0.0 || k > 1.0)
      throw std::invalid_argument("config: kappa must lie in [0, 1]");
  for (int v : vpd)
    if (v < 1) throw std::invalid_argument("config: vpd must be at least 1");
  if (seeds < 1) throw std::invalid_argument("config: seeds must be >= 1");
  if (!(scan.x1 > scan.x0) || !(scan.y1 > scan.y0))
    throw std::invalid_argument("config: empty scan region");
  if (gamma_points < 2)
    throw std::invalid_argument("config: gamma_points must be >= 2");
  if (metric_quad_order < 1 || psf_quad_order < 2)
    throw std::invalid_argument("config: bad quadrature order");
  if (!(newton_tol > 0.0) || !(grad_tol > 0.0))
    throw std::invalid_argument("config: tolerances must be positive");
  if (max_iterations < 0)
    throw std::invalid_argument("config: max_iterations must be >= 0");
  if (workers < 1) throw std::invalid_argument("config: workers must be >= 1");
  if (out.empty()) throw std::invalid_argument("config: empty output path");
}

namespace {

void check_keys(const nlohmann::json& j, const std::set<std::string>& known,
                const std::string& where) {
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!known.count(it.key()))
      throw std::invalid_argument("config: unknown key \"" + it.key() +
                                  "\" in " + where);
}

}  // namespace

SweepConfig config_from_json(const nlohmann::json& j) {
  SweepConfig c;
  check_keys(j,
             {"geometry", "scan", "re", "kappa", "vpd", "sbi_mesh",
              "truth_mesh", "seeds", "master_seed", "gamma_points",
              "metric_quad_order", "psf_quad_order", "newton_tol", "grad_tol",
              "max_iterations", "artifacts", "disk_cache", "out", "workers"},
             "top level");
  if (j.contains("geometry")) {
    const auto& g = j.at("geometry");
    check_keys(g,
               {"half_width0", "bump_area", "bump_center", "bump_sigma",
                "x_min", "x_max"},
               "geometry");
    c.geometry.half_width0 = g.value("half_width0", c.geometry.half_width0);
    c.geometry.bump_area = g.value("bump_area", c.geometry.bump_area);
    c.geometry.bump_center = g.value("bump_center", c.geometry.bump_center);
    c.geometry.bump_sigma = g.value("bump_sigma", c.geometry.bump_sigma);
    c.geometry.x_min = g.value("x_min", c.geometry.x_min);
    c.geometry.x_max = g.value("x_max", c.geometry.x_max);
  }
  if (j.contains("scan")) {
    const auto& s = j.at("scan");
    check_keys(s, {"x0", "x1", "y0", "y1"}, "scan");
    c.scan.x0 = s.value("x0", c.scan.x0);
    c.scan.x1 = s.value("x1", c.scan.x1);
    c.scan.y0 = s.value("y0", c.scan.y0);
    c.scan.y1 = s.value("y1", c.scan.y1);
  }
  if (j.contains("re")) c.re = j.at("re").get<std::vector<double>>();
  if (j.contains("kappa")) c.kappa = j.at("kappa").get<std::vector<double>>();
  if (j.contains("vpd")) c.vpd = j.at("vpd").get<std::vector<int>>();
  if (j.contains("sbi_mesh")) {
    c.sbi_mesh.clear();
    for (const auto& m : j.at("sbi_mesh"))
      c.sbi_mesh.push_back(parse_mesh_resolution(m.get<std::string>()));
  }
  if (j.contains("truth_mesh"))
    c.truth_mesh = parse_mesh_resolution(j.at("truth_mesh").get<std::string>());
  c.seeds = j.value("seeds", c.seeds);
  c.master_seed = j.value("master_seed", c.master_seed);
  c.gamma_points = j.value("gamma_points", c.gamma_points);
  c.metric_quad_order = j.value("metric_quad_order", c.metric_quad_order);
  c.psf_quad_order = j.value("psf_quad_order", c.psf_quad_order);
  c.newton_tol = j.value("newton_tol", c.newton_tol);
  c.grad_tol = j.value("grad_tol", c.grad_tol);
  c.max_iterations = j.value("max_iterations", c.max_iterations);
  if (j.contains("artifacts"))
    c.artifacts = parse_artifact_level(j.at("artifacts").get<std::string>());
  c.disk_cache = j.value("disk_cache", c.disk_cache);
  c.out = j.value("out", c.out);
  c.workers = j.value("workers", c.workers);
  c.validate();
  return c;
}

SweepConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("config: cannot open " + path);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in, nullptr, true, true);  // allow comments
  } catch (const nlohmann::json::parse_error& e) {
    throw std::invalid_argument("config: " + std::string(e.what()));
  }
  return config_from_json(j);
}

nlohmann::json config_to_json(const SweepConfig& c) {
  nlohmann::json j;
  j["geometry"] = {{"half_width0", c.geometry.half_width0},
                   {"bump_area", c.geometry.bump_area},
                   {"bump_center", c.geometry.bump_center},
                   {"bump_sigma", c.geometry.bump_sigma},
                   {"x_min", c.geometry.x_min},
                   {"x_max", c.geometry.x_max}};
  j["scan"] = {{"x0", c.scan.x0},
               {"x1", c.scan.x1},
               {"y0", c.scan.y0},
               {"y1", c.scan.y1}};
  j["re"] = c.re;
  j["kappa"] = c.kappa;
  j["vpd"] = c.vpd;
  std::vector<std::string> meshes;
  for (MeshResolution m : c.sbi_mesh) meshes.push_back(mesh_resolution_name(m));
  j["sbi_mesh"] = meshes;
  j["truth_mesh"] = mesh_resolution_name(c.truth_mesh);
  j["seeds"] = c.seeds;
  j["master_seed"] = c.master_seed;
  j["gamma_points"] = c.gamma_points;
  j["metric_quad_order"] = c.metric_quad_order;
  j["psf_quad_order"] = c.psf_quad_order;
  j["newton_tol"] = c.newton_tol;
  j["grad_tol"] = c.grad_tol;
  j["max_iterations"] = c.max_iterations;
  j["artifacts"] = artifact_level_name(c.artifacts);
  j["disk_cache"] = c.disk_cache;
  j["out"] = c.out;
  j["workers"] = c.workers;
  return j;
}

}  // namespace sbiwss::tools
