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

#include "gdc/loss_trace.h"

#include <cmath>
#include <string>

#include "gdc/error.h"

namespace gdc {
namespace {

std::string cell_name(std::size_t epoch, std::string_view id) {
  return "cell (epoch " + std::to_string(epoch) + ", sample '" +
         std::string(id) + "')";
}

void check_loss(std::size_t epoch, std::string_view id, double loss) {
  if (!std::isfinite(loss)) {
    throw Error(ErrorCode::kNonFiniteLoss,
                "non-finite loss at " + cell_name(epoch, id));
  }
  if (loss < 0.0) {
    throw Error(ErrorCode::kNegativeLoss,
                "negative loss " + std::to_string(loss) + " at " +
                    cell_name(epoch, id));
  }
}

}  // namespace

LossTrace::LossTrace(std::vector<std::string> sample_ids, std::size_t epochs,
                     std::vector<double> values,
                     std::vector<std::uint8_t> presence)
    : epochs_(epochs),
      sample_ids_(std::move(sample_ids)),
      values_(std::move(values)),
      present_(std::move(presence)) {
  const std::size_t n = sample_ids_.size();
  if (epochs_ < 2) {
    throw Error(ErrorCode::kDimensionMismatch,
                "a trace needs at least 2 epochs, got " + std::to_string(epochs_));
  }
  if (n == 0) throw Error(ErrorCode::kEmptyInput, "a trace needs at least 1 sample");
  if (values_.size() != epochs_ * n) {
    throw Error(ErrorCode::kDimensionMismatch,
                "expected " + std::to_string(epochs_ * n) + " cells, got " +
                    std::to_string(values_.size()));
  }
  if (!present_.empty() && present_.size() != values_.size()) {
    throw Error(ErrorCode::kDimensionMismatch, "presence mask size mismatch");
  }
  index_.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!index_.emplace(sample_ids_[i], i).second) {
      throw Error(ErrorCode::kDuplicateCell,
                  "duplicate sample id '" + sample_ids_[i] + "'");
    }
  }
  bool all_present = true;
  for (std::size_t t = 1; t <= epochs_; ++t) {
    for (std::size_t i = 0; i < n; ++i) {
      if (!present(t, i)) {
        all_present = false;
        values_[(t - 1) * n + i] = 0.0;
        continue;
      }
      check_loss(t, sample_ids_[i], at(t, i));
    }
  }
  if (all_present) present_.clear();
}

double LossTrace::coverage(std::size_t sample) const {
  if (present_.empty()) return 1.0;
  std::size_t hits = 0;
  for (std::size_t t = 1; t <= epochs_; ++t) hits += present(t, sample) ? 1 : 0;
  return static_cast<double>(hits) / static_cast<double>(epochs_);
}

std::optional<std::size_t> LossTrace::index_of(std::string_view sample_id) const {
  auto it = index_.find(std::string(sample_id));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

bool operator==(const LossTrace& a, const LossTrace& b) {
  return a.epochs_ == b.epochs_ && a.sample_ids_ == b.sample_ids_ &&
         a.values_ == b.values_ && a.present_ == b.present_;
}

TraceBuilder::TraceBuilder(std::vector<std::string> sample_ids)
    : expected_(sample_ids.size()), ids_(std::move(sample_ids)) {
  for (std::size_t i = 0; i < ids_.size(); ++i) {
    if (!index_.emplace(ids_[i], i).second) {
      throw Error(ErrorCode::kDuplicateCell, "duplicate sample id '" + ids_[i] + "'");
    }
  }
}

TraceBuilder::TraceBuilder(std::size_t expected_samples)
    : expected_(expected_samples) {
  index_.reserve(expected_samples);
  ids_.reserve(expected_samples);
}

void TraceBuilder::ensure_row(std::size_t epoch) {
  while (rows_.size() < epoch) {
    rows_.emplace_back(expected_, 0.0);
    state_.emplace_back(expected_, kUnset);
  }
}

std::size_t TraceBuilder::resolve(std::size_t epoch, std::string_view sample_id) {
  if (epoch == 0) {
    throw Error(ErrorCode::kBadRange, "epochs are 1-based, got 0 for sample '" +
                                          std::string(sample_id) + "'");
  }
  auto it = index_.find(std::string(sample_id));
  if (it != index_.end()) return it->second;
  if (schema_locked()) {
    throw Error(ErrorCode::kUnknownSample,
                "unknown sample id at " + cell_name(epoch, sample_id) +
                    " (schema locked at " + std::to_string(expected_) +
                    " samples)");
  }
  const std::size_t idx = ids_.size();
  ids_.emplace_back(sample_id);
  index_.emplace(ids_.back(), idx);
  return idx;
}

void TraceBuilder::record(std::size_t epoch, std::string_view sample_id,
                          double loss) {
  if (epoch == 0) {
    throw Error(ErrorCode::kBadRange, "epochs are 1-based, got 0 for sample '" +
                                          std::string(sample_id) + "'");
  }
  check_loss(epoch, sample_id, loss);
  const std::size_t idx = resolve(epoch, sample_id);
  ensure_row(epoch);
  auto& state = state_[epoch - 1][idx];
  if (state != kUnset) ++duplicates_;
  state = kSet;
  rows_[epoch - 1][idx] = loss;
}

void TraceBuilder::mark_missing(std::size_t epoch, std::string_view sample_id) {
  const std::size_t idx = resolve(epoch, sample_id);
  ensure_row(epoch);
  auto& state = state_[epoch - 1][idx];
  if (state != kUnset) ++duplicates_;
  state = kMissing;
}

LossTrace TraceBuilder::finalize(std::optional<std::size_t> epochs) const {
  const std::size_t t_count = epochs.value_or(rows_.size());
  if (ids_.size() != expected_) {
    throw Error(ErrorCode::kIncompleteEpoch,
                "expected " + std::to_string(expected_) + " samples, saw " +
                    std::to_string(ids_.size()));
  }
  if (rows_.size() > t_count) {
    throw Error(ErrorCode::kDimensionMismatch,
                "epoch " + std::to_string(rows_.size()) + " exceeds T=" +
                    std::to_string(t_count));
  }
  std::vector<double> values;
  values.reserve(t_count * expected_);
  std::vector<std::uint8_t> present(t_count * expected_, 1);
  for (std::size_t t = 0; t < t_count; ++t) {
    if (t >= rows_.size()) {
      throw Error(ErrorCode::kIncompleteEpoch,
                  "epoch " + std::to_string(t + 1) + " has no cells");
    }
    for (std::size_t i = 0; i < expected_; ++i) {
      switch (state_[t][i]) {
        case kUnset:
          throw Error(ErrorCode::kIncompleteEpoch,
                      "epoch " + std::to_string(t + 1) + " is missing " +
                          cell_name(t + 1, ids_[i]));
        case kMissing:
          present[t * expected_ + i] = 0;
          break;
        default:
          break;
      }
      values.push_back(rows_[t][i]);
    }
  }
  return LossTrace(ids_, t_count, std::move(values), std::move(present));
}

LossTrace slice_epochs(const LossTrace& trace, std::size_t from, std::size_t to) {
  if (from < 1 || from > to || to > trace.epochs()) {
    throw Error(ErrorCode::kBadRange,
                "epoch slice [" + std::to_string(from) + ", " +
                    std::to_string(to) + "] outside 1.." +
                    std::to_string(trace.epochs()));
  }
  const std::size_t n = trace.samples();
  const auto first = trace.values().begin() + static_cast<std::ptrdiff_t>((from - 1) * n);
  const auto last = trace.values().begin() + static_cast<std::ptrdiff_t>(to * n);
  std::vector<std::uint8_t> present;
  if (!trace.complete()) {
    const auto mask = trace.presence();
    present.assign(mask.begin() + static_cast<std::ptrdiff_t>((from - 1) * n),
                   mask.begin() + static_cast<std::ptrdiff_t>(to * n));
  }
  return LossTrace(trace.sample_ids(), to - from + 1,
                   std::vector<double>(first, last), std::move(present));
}

}  // namespace gdc
