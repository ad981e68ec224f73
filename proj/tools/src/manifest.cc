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


#include "gdc/cli/manifest.h"

#include <ctime>
#include <fstream>
#include <utility>

#include "gdc/checksum.h"
#include "gdc/error.h"

namespace gdc::cli {

namespace fs = std::filesystem;

fs::path make_run_dir(const fs::path& out, std::uint64_t seed) {
  const std::time_t now = std::time(nullptr);
  std::tm utc{};
  gmtime_r(&now, &utc);
  char stamp[32];
  std::strftime(stamp, sizeof stamp, "%Y%m%dT%H%M%SZ", &utc);
  const std::string base =
      std::string("run-") + stamp + "-" + crc32_hex(crc32(std::to_string(seed)));

  std::error_code ec;
  fs::create_directories(out, ec);
  if (ec) throw Error(ErrorCode::kIo, "cannot create output directory " + out.string());
  for (int attempt = 0;; ++attempt) {
    fs::path dir = out / (attempt == 0 ? base : base + "-" + std::to_string(attempt));
    if (fs::create_directory(dir, ec)) return dir;
    if (ec) throw Error(ErrorCode::kIo, "cannot create run directory " + dir.string());
  }
}

RunManifest::RunManifest(std::string command, fs::path run_dir)
    : command_(std::move(command)),
      run_dir_(std::move(run_dir)),
      start_(Clock::now()),
      last_(start_) {}

void RunManifest::set_config(nlohmann::ordered_json config) { config_ = std::move(config); }

void RunManifest::add_input(const fs::path& path) {
  std::error_code ec;
  const auto size = fs::file_size(path, ec);
  inputs_.push_back({path.string(), crc32_hex(file_crc32(path)),
                     ec ? 0 : static_cast<std::uint64_t>(size)});
}

void RunManifest::write_artifact(std::string_view name, std::string_view bytes) {
  const fs::path path = run_dir_ / name;
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw Error(ErrorCode::kIo, "cannot write " + path.string());
  f.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!f) throw Error(ErrorCode::kIo, "short write to " + path.string());
  outputs_.push_back({std::string(name), crc32_hex(crc32(bytes)), bytes.size()});
}

void RunManifest::mark(std::string_view stage) {
  const auto now = Clock::now();
  timings_.emplace_back(std::string(stage), std::chrono::duration<double>(now - last_).count());
  last_ = now;
}

std::string RunManifest::config_hash() const { return crc32_hex(crc32(config_.dump())); }

nlohmann::ordered_json RunManifest::to_json() const {
  nlohmann::ordered_json j;
  j["format"] = "gdc-manifest";
  j["version"] = 1;
  j["command"] = command_;
  j["config"] = config_;
  j["config_hash"] = config_hash();
  j["seeds"] = seeds_;
  auto records = [](const std::vector<ArtifactRecord>& rs) {
    auto arr = nlohmann::ordered_json::array();
    for (const auto& r : rs) {
      arr.push_back({{"path", r.path}, {"crc32", r.crc32}, {"bytes", r.bytes}});
    }
    return arr;
  };
  j["inputs"] = records(inputs_);
  j["outputs"] = records(outputs_);
  auto t = nlohmann::ordered_json::object();
  for (const auto& [stage, seconds] : timings_) t[stage] = seconds;
  t["total"] = std::chrono::duration<double>(Clock::now() - start_).count();
  j["timings_seconds"] = t;
  return j;
}

void RunManifest::save() const {
  const fs::path path = run_dir_ / "manifest.json";
  std::ofstream f(path, std::ios::trunc);
  if (!f) throw Error(ErrorCode::kIo, "cannot write " + path.string());
  f << to_json().dump(2) << '\n';
}

}  // namespace gdc::cli
