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

#ifndef GDC_LOSS_TRACE_H_
#define GDC_LOSS_TRACE_H_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace gdc {

// The T x N epoch-sample loss matrix. Row t (1-based) holds the per-sample
// negative log-likelihood (nats) evaluated under the parameters reached at the
// end of epoch t. Immutable once constructed; safe to share across threads.
class LossTrace {
 public:
  // Validates every invariant: T >= 2, N >= 1, unique ids, T*N cells, every
  // present cell finite and >= 0. `present` is either empty (complete trace)
  // or has T*N entries.
  LossTrace(std::vector<std::string> sample_ids, std::size_t epochs,
            std::vector<double> values, std::vector<std::uint8_t> present = {});

  std::size_t epochs() const { return epochs_; }
  std::size_t samples() const { return sample_ids_.size(); }
  const std::vector<std::string>& sample_ids() const { return sample_ids_; }

  // `epoch` is 1-based, `sample` is 0-based.
  double at(std::size_t epoch, std::size_t sample) const {
    return values_[(epoch - 1) * samples() + sample];
  }
  bool present(std::size_t epoch, std::size_t sample) const {
    return present_.empty() || present_[(epoch - 1) * samples() + sample] != 0;
  }
  bool complete() const { return present_.empty(); }

  std::span<const double> values() const { return values_; }
  std::span<const double> row(std::size_t epoch) const {
    return std::span<const double>(values_).subspan((epoch - 1) * samples(),
                                                    samples());
  }
  // Per-cell presence mask, empty for complete traces.
  std::span<const std::uint8_t> presence() const { return present_; }

  // Fraction of epochs with a present cell for `sample`.
  double coverage(std::size_t sample) const;

  std::optional<std::size_t> index_of(std::string_view sample_id) const;

  friend bool operator==(const LossTrace& a, const LossTrace& b);

 private:
  std::size_t epochs_;
  std::vector<std::string> sample_ids_;
  std::vector<double> values_;
  std::vector<std::uint8_t> present_;
  std::unordered_map<std::string, std::size_t> index_;
};

// Accumulates cells one at a time (single writer). Duplicate writes to a cell
// overwrite the earlier value and bump `duplicates()`.
class TraceBuilder {
 public:
  // Schema locked up front: every id is known.
  explicit TraceBuilder(std::vector<std::string> sample_ids);
  // Schema fills in first-seen order and locks once `expected_samples` ids
  // have been seen.
  explicit TraceBuilder(std::size_t expected_samples);

  void record(std::size_t epoch, std::string_view sample_id, double loss);
  void mark_missing(std::size_t epoch, std::string_view sample_id);

  std::size_t duplicates() const { return duplicates_; }
  std::size_t expected_samples() const { return expected_; }
  std::size_t epochs_seen() const { return rows_.size(); }
  bool schema_locked() const { return ids_.size() == expected_; }

  // Fails with kIncompleteEpoch unless each epoch 1..T (T = highest epoch
  // touched, or `epochs` when given) has every cell recorded or marked missing.
  LossTrace finalize(std::optional<std::size_t> epochs = std::nullopt) const;

 private:
  enum : std::uint8_t { kUnset = 0, kSet = 1, kMissing = 2 };
  std::size_t resolve(std::size_t epoch, std::string_view sample_id);
  void ensure_row(std::size_t epoch);

  std::size_t expected_;
  std::vector<std::string> ids_;
  std::unordered_map<std::string, std::size_t> index_;
  std::vector<std::vector<double>> rows_;
  std::vector<std::vector<std::uint8_t>> state_;
  std::size_t duplicates_ = 0;
};

// Rows from..to (1-based, inclusive) with identical sample ids.
LossTrace slice_epochs(const LossTrace& trace, std::size_t from, std::size_t to);

}  // namespace gdc

#endif  // GDC_LOSS_TRACE_H_
