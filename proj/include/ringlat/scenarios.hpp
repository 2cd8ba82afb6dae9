#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "ringlat/config.hpp"

namespace ringlat {

// Execution context handed to a scenario. Scenarios write their data files
// under outdir and register them; the runner adds the manifest.
class ScenarioContext {
 public:
  ScenarioContext(Config cfg, std::filesystem::path outdir, std::uint64_t seed)
      : cfg_(std::move(cfg)), outdir_(std::move(outdir)), seed_(seed) {}

  const Config& cfg() const { return cfg_; }
  const std::filesystem::path& outdir() const { return outdir_; }
  std::uint64_t seed() const { return seed_; }

  std::filesystem::path file(const std::string& name) {
    recorded_.push_back(name);
    return outdir_ / name;
  }
  const std::vector<std::string>& recorded_files() const { return recorded_; }

  // standard '#' header lines for emitted CSVs
  std::vector<std::string> csv_comments(const std::string& scenario) const;

 private:
  Config cfg_;
  std::filesystem::path outdir_;
  std::uint64_t seed_;
  std::vector<std::string> recorded_;
};

struct ScenarioInfo {
  std::string name;
  std::string description;
  std::function<void(ScenarioContext&)> run;
};

const std::vector<ScenarioInfo>& scenarios();
const ScenarioInfo* find_scenario(const std::string& name);

// Runs the scenario, writes manifest.json (resolved config, version, seed,
// duration, per-file digests). Returns the manifest path.
std::filesystem::path run_scenario(const std::string& name, const Config& cfg,
                                   const std::filesystem::path& outdir,
                                   std::uint64_t seed);

// Worker cap for scenario-internal parallel runs; reads RINGLAT_THREADS.
unsigned max_threads();

// Runs fn(i) for i in [0, n) on up to max_threads() workers. Tasks must be
// independent; results land in caller-owned slots so the output is
// deterministic regardless of scheduling.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace ringlat
