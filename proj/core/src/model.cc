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

#include "gdc/model.h"

#include <algorithm>
#include <fstream>
#include <iterator>

#include "byte_io.h"
#include "gdc/checksum.h"
#include "gdc/convex_lm.h"
#include "gdc/error.h"
#include "gdc/tiny_rnn.h"

namespace gdc {
namespace {

constexpr std::string_view kModelMagic = "GDCP";
constexpr std::uint16_t kModelVersion = 1;

}  // namespace

std::string_view model_family_name(ModelFamily family) {
  switch (family) {
    case ModelFamily::kConvexLM: return "convex";
    case ModelFamily::kTinyRNN: return "rnn";
  }
  return "unknown";
}

ModelFamily parse_model_family(std::string_view name) {
  if (name == "convex") return ModelFamily::kConvexLM;
  if (name == "rnn") return ModelFamily::kTinyRNN;
  throw Error(ErrorCode::kInvalidConfig, "unknown model family '" + std::string(name) +
                                             "' (expected convex or rnn)");
}

void Model::set_parameters(std::span<const double> theta) {
  auto dst = parameters();
  if (theta.size() != dst.size()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "parameter vector has " + std::to_string(theta.size()) + " entries, model has " +
                    std::to_string(dst.size()));
  }
  std::copy(theta.begin(), theta.end(), dst.begin());
}

double mean_token_nll(const Model& model, std::span<const TokenSpan> sequences) {
  if (sequences.empty()) throw Error(ErrorCode::kEmptyInput, "no sequences to score");
  double nll = 0.0;
  std::size_t tokens = 0;
  for (TokenSpan seq : sequences) {
    nll += model.sequence_loss(seq) * static_cast<double>(seq.size());
    tokens += seq.size();
  }
  return nll / static_cast<double>(tokens);
}

std::vector<Token> greedy_decode(const Model& model, TokenSpan prefix, std::size_t count) {
  std::vector<Token> context(prefix.begin(), prefix.end());
  std::vector<Token> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    const auto lp = model.next_token_log_probs(context);
    const auto best = static_cast<Token>(std::max_element(lp.begin(), lp.end()) - lp.begin());
    out.push_back(best);
    context.push_back(best);
  }
  return out;
}

std::string serialize_model(const Model& model) {
  internal::ByteWriter w;
  w.bytes(kModelMagic);
  w.u16(kModelVersion);
  w.u8(static_cast<std::uint8_t>(model.family()));
  const auto dims = model.dimensions();
  w.u64(dims.size());
  for (auto d : dims) w.u64(d);
  const auto aux = model.auxiliary();
  w.u64(aux.size());
  for (auto a : aux) w.u64(a);
  const auto theta = model.parameters();
  w.u64(theta.size());
  for (double x : theta) w.f64(x);
  w.u32(crc32(w.data()));
  return w.take();
}

std::unique_ptr<Model> deserialize_model(std::string_view bytes) {
  internal::ByteReader r(bytes);
  if (r.bytes(4, "magic") != kModelMagic) {
    throw Error(ErrorCode::kMalformedHeader, "bad parameter blob magic at byte 0");
  }
  if (r.u16("version") != kModelVersion) {
    throw Error(ErrorCode::kMalformedHeader, "unsupported parameter blob version at byte 4");
  }
  const auto family = static_cast<ModelFamily>(r.u8("family"));
  auto read_u64s = [&](const char* what) {
    const std::uint64_t n = r.u64(what);
    if (n > r.remaining() / 8) {
      throw Error(ErrorCode::kDimensionMismatch,
                  std::string(what) + " count exceeds the blob at byte " + std::to_string(r.offset()));
    }
    std::vector<std::uint64_t> v(n);
    for (auto& x : v) x = r.u64(what);
    return v;
  };
  const auto dims = read_u64s("dimensions");
  const auto aux = read_u64s("auxiliary");
  const std::uint64_t n = r.u64("parameter count");
  if (n > r.remaining() / 8) {
    throw Error(ErrorCode::kDimensionMismatch, "parameter count exceeds the blob");
  }
  std::vector<double> theta(n);
  for (auto& x : theta) x = r.f64("parameter");
  const std::size_t payload_end = r.offset();
  const std::uint32_t stored = r.u32("checksum");
  if (stored != crc32(bytes.substr(0, payload_end))) {
    throw Error(ErrorCode::kChecksumMismatch,
                "parameter blob CRC-32 mismatch at byte " + std::to_string(payload_end));
  }
  if (r.remaining() != 0) {
    throw Error(ErrorCode::kMalformedHeader, "trailing bytes after parameter blob checksum");
  }
  if (dims.size() != 2) throw Error(ErrorCode::kMalformedHeader, "expected 2 dimensions");
  const int vocab = static_cast<int>(dims[0]);
  switch (family) {
    case ModelFamily::kConvexLM:
      return std::make_unique<ConvexLM>(vocab, static_cast<int>(dims[1]), aux, std::move(theta));
    case ModelFamily::kTinyRNN:
      return std::make_unique<TinyRNN>(vocab, static_cast<int>(dims[1]), std::move(theta));
  }
  throw Error(ErrorCode::kMalformedHeader, "unknown model family tag at byte 6");
}

void save_model(const Model& model, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIo, "cannot write parameters '" + path.string() + "'");
  const std::string bytes = serialize_model(model);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

std::unique_ptr<Model> load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open parameters '" + path.string() + "'");
  std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return deserialize_model(bytes);
}

}  // namespace gdc
