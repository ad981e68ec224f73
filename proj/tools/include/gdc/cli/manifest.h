//
// Copyright 2026 The gdc Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//


#ifndef GDC_CLI_MANIFEST_H_
#define GDC_CLI_MANIFEST_H_

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace gdc::cli {

// Creates <out>/run-<UTC timestamp>-<seed hash>/, adding a numeric suffix
// when that directory already exists.
std::filesystem::path make_run_dir(const std::filesystem::path& out, std::uint64_t seed);

struct ArtifactRecord {
  std::string path;  // relative to the run directory for outputs
  std::string crc32;
  std::uint64_t bytes = 0;
};

// Bookkeeping for one command invocation, saved as manifest.json.
class RunManifest {
 public:
  RunManifest(std::string command, std::filesystem::path run_dir);

  const std::filesystem::path& run_dir() const { return run_dir_; }

  void set_config(nlohmann::ordered_json config);
  void add_seed(std::uint64_t seed) { seeds_.push_back(seed); }
  void add_input(const std::filesystem::path& path);

  // Writes `bytes` to run_dir/name and records its checksum.
  void write_artifact(std::string_view name, std::string_view bytes);

  // Records the wall time since the previous mark (or construction).
  void mark(std::string_view stage);

  const std::vector<ArtifactRecord>& outputs() const { return outputs_; }
  std::string config_hash() const;

  void save() const;
  nlohmann::ordered_json to_json() const;

 private:
  using Clock = std::chrono::steady_clock;

  std::string command_;
  std::filesystem::path run_dir_;
  nlohmann::ordered_json config_ = nlohmann::ordered_json::object();
  std::vector<std::uint64_t> seeds_;
  std::vector<ArtifactRecord> inputs_;
  std::vector<ArtifactRecord> outputs_;
  std::vector<std::pair<std::string, double>> timings_;
  Clock::time_point start_;
  Clock::time_point last_;
};

}  // namespace gdc::cli

#endif  // GDC_CLI_MANIFEST_H_
