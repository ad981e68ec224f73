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

#include "gdc/trace_io.h"

#include <cmath>
#include <fstream>
#include <iterator>
#include <sstream>
#include <unordered_set>

#include "byte_io.h"
#include "gdc/checksum.h"
#include "gdc/error.h"
#include "text_util.h"

namespace gdc {
namespace {

using internal::ByteReader;
using internal::ByteWriter;
using internal::format_double;
using internal::parse_double;
using internal::parse_int;
using internal::trim;

constexpr std::uint16_t kBinaryVersion = 1;

Error at_line(std::size_t line, const Error& e) {
  return Error(e.code(), "line " + std::to_string(line) + ": " + e.detail());
}

// "#gendatacarto-trace v1 T=<T> N=<N>"
std::pair<std::size_t, std::size_t> parse_text_header(std::string_view line) {
  auto bad = [&](const std::string& why) {
    return Error(ErrorCode::kMalformedHeader, "line 1: " + why + " in header '" +
                                                  std::string(line) + "'");
  };
  std::istringstream in{std::string(trim(line))};
  std::string tag, version, t_field, n_field, extra;
  in >> tag >> version >> t_field >> n_field;
  if (tag != kTraceTextTag) throw bad("missing tag");
  if (version != "v1") throw bad("unsupported version");
  if (in >> extra) throw bad("trailing fields");
  auto field = [&](const std::string& f, char key) -> std::size_t {
    if (f.size() < 3 || f[0] != key || f[1] != '=') {
      throw bad(std::string("expected ") + key + "=<count>");
    }
    auto v = parse_int<std::size_t>(std::string_view(f).substr(2));
    if (!v) throw bad(std::string("bad ") + key + " value");
    return *v;
  };
  const std::size_t t = field(t_field, 'T');
  const std::size_t n = field(n_field, 'N');
  if (t < 2) throw bad("T must be at least 2");
  if (n < 1) throw bad("N must be at least 1");
  return {t, n};
}

LossTrace ingest_text(std::string_view bytes) {
  std::size_t line_no = 0;
  std::size_t pos = 0;
  auto next_line = [&](std::string_view& out) {
    if (pos >= bytes.size()) return false;
    std::size_t end = bytes.find('\n', pos);
    if (end == std::string_view::npos) end = bytes.size();
    out = bytes.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    return true;
  };

  std::string_view line;
  if (!next_line(line)) throw Error(ErrorCode::kMalformedHeader, "empty input");
  const auto [t_count, n_count] = parse_text_header(line);
  TraceBuilder builder(n_count);

  while (next_line(line)) {
    line = trim(line);
    if (line.empty()) continue;
    if (line == "epoch,sample_id,loss") continue;
    const std::size_t first = line.find(',');
    const std::size_t last = line.rfind(',');
    if (first == std::string_view::npos || first == last) {
      throw Error(ErrorCode::kMalformedHeader,
                  "line " + std::to_string(line_no) +
                      ": expected 'epoch,sample_id,loss'");
    }
    const auto epoch = parse_int<std::size_t>(trim(line.substr(0, first)));
    const std::string_view id = trim(line.substr(first + 1, last - first - 1));
    const std::string_view loss_field = trim(line.substr(last + 1));
    if (!epoch || *epoch == 0) {
      throw Error(ErrorCode::kMalformedHeader,
                  "line " + std::to_string(line_no) + ": bad epoch field");
    }
    if (*epoch > t_count) {
      throw Error(ErrorCode::kDimensionMismatch,
                  "line " + std::to_string(line_no) + ": epoch " +
                      std::to_string(*epoch) + " exceeds header T=" +
                      std::to_string(t_count));
    }
    if (id.empty()) {
      throw Error(ErrorCode::kMalformedHeader,
                  "line " + std::to_string(line_no) + ": empty sample id");
    }
    try {
      if (loss_field == "NA") {
        builder.mark_missing(*epoch, id);
        continue;
      }
      std::optional<double> loss = parse_double(loss_field);
      if (!loss) {
        if (loss_field == "nan" || loss_field == "inf" || loss_field == "-inf") {
          loss = loss_field == "nan" ? std::nan("") : (loss_field == "inf" ? HUGE_VAL : -HUGE_VAL);
        } else {
          throw Error(ErrorCode::kMalformedHeader,
                      "line " + std::to_string(line_no) + ": bad loss '" +
                          std::string(loss_field) + "'");
        }
      }
      builder.record(*epoch, id, *loss);
    } catch (const Error& e) {
      if (e.code() == ErrorCode::kMalformedHeader) throw;
      throw at_line(line_no, e);
    }
  }
  try {
    return builder.finalize(t_count);
  } catch (const Error& e) {
    throw at_line(line_no, e);
  }
}

LossTrace ingest_binary(std::string_view bytes) {
  ByteReader r(bytes);
  if (r.bytes(4, "magic") != kTraceMagic) {
    throw Error(ErrorCode::kMalformedHeader, "bad magic at byte 0");
  }
  const std::uint16_t version = r.u16("version");
  if (version != kBinaryVersion) {
    throw Error(ErrorCode::kMalformedHeader,
                "unsupported version " + std::to_string(version) + " at byte 4");
  }
  const std::uint64_t t_count = r.u64("T");
  const std::uint64_t n_count = r.u64("N");
  if (t_count < 2 || n_count < 1) {
    throw Error(ErrorCode::kMalformedHeader,
                "invalid dimensions T=" + std::to_string(t_count) +
                    " N=" + std::to_string(n_count) + " at byte 6");
  }
  // Each id needs at least its length prefix; each cell 8 bytes.
  if (n_count > r.remaining() / 4 || t_count > r.remaining() / 8 / n_count) {
    throw Error(ErrorCode::kDimensionMismatch,
                "header claims T=" + std::to_string(t_count) + " N=" +
                    std::to_string(n_count) + " but only " +
                    std::to_string(r.remaining()) + " bytes follow");
  }
  std::vector<std::string> ids;
  ids.reserve(n_count);
  std::unordered_set<std::string> seen;
  for (std::uint64_t i = 0; i < n_count; ++i) {
    const std::size_t at = r.offset();
    ids.push_back(r.str("sample id"));
    if (!seen.insert(ids.back()).second) {
      throw Error(ErrorCode::kDuplicateCell, "duplicate sample id '" + ids.back() +
                                                 "' at byte " + std::to_string(at));
    }
  }
  const std::size_t cells = t_count * n_count;
  if (r.remaining() != cells * 8 + 4) {
    throw Error(ErrorCode::kDimensionMismatch,
                "expected " + std::to_string(cells * 8 + 4) +
                    " bytes of cells and checksum at byte " +
                    std::to_string(r.offset()) + ", found " +
                    std::to_string(r.remaining()));
  }
  std::vector<double> values(cells);
  for (std::size_t c = 0; c < cells; ++c) {
    const std::size_t at = r.offset();
    values[c] = r.f64("cell");
    if (!std::isfinite(values[c])) {
      throw Error(ErrorCode::kNonFiniteLoss,
                  "non-finite cell (epoch " + std::to_string(c / n_count + 1) +
                      ", sample '" + ids[c % n_count] + "') at byte " +
                      std::to_string(at));
    }
  }
  const std::size_t payload_end = r.offset();
  const std::uint32_t stored = r.u32("checksum");
  const std::uint32_t actual = crc32(bytes.substr(0, payload_end));
  if (stored != actual) {
    throw Error(ErrorCode::kChecksumMismatch,
                "CRC-32 " + crc32_hex(actual) + " does not match stored " +
                    crc32_hex(stored) + " at byte " + std::to_string(payload_end));
  }
  try {
    return LossTrace(std::move(ids), t_count, std::move(values));
  } catch (const Error& e) {
    throw Error(e.code(), e.detail() + " (binary payload)");
  }
}

}  // namespace

LossTrace ingest(std::string_view bytes, TraceFormat format) {
  return format == TraceFormat::kText ? ingest_text(bytes) : ingest_binary(bytes);
}

LossTrace ingest(std::istream& in, TraceFormat format) {
  std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return ingest(bytes, format);
}

std::string emit(const LossTrace& trace, TraceFormat format) {
  const std::size_t n = trace.samples();
  if (format == TraceFormat::kText) {
    std::string out = std::string(kTraceTextTag) + " v1 T=" +
                      std::to_string(trace.epochs()) + " N=" + std::to_string(n) +
                      "\nepoch,sample_id,loss\n";
    for (std::size_t t = 1; t <= trace.epochs(); ++t) {
      const std::string epoch = std::to_string(t);
      for (std::size_t i = 0; i < n; ++i) {
        out += epoch;
        out += ',';
        out += trace.sample_ids()[i];
        out += ',';
        out += trace.present(t, i) ? format_double(trace.at(t, i)) : std::string("NA");
        out += '\n';
      }
    }
    return out;
  }
  if (!trace.complete()) {
    throw Error(ErrorCode::kInvalidConfig,
                "binary traces cannot carry missing cells; use the text format");
  }
  ByteWriter w;
  w.bytes(kTraceMagic);
  w.u16(kBinaryVersion);
  w.u64(trace.epochs());
  w.u64(n);
  for (const auto& id : trace.sample_ids()) w.str(id);
  for (double v : trace.values()) w.f64(v);
  w.u32(crc32(w.data()));
  return w.take();
}

void emit(const LossTrace& trace, std::ostream& out, TraceFormat format) {
  const std::string bytes = emit(trace, format);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

LossTrace read_trace_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open trace '" + path.string() + "'");
  std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  const bool binary = bytes.starts_with(kTraceMagic);
  try {
    return ingest(bytes, binary ? TraceFormat::kBinary : TraceFormat::kText);
  } catch (const Error& e) {
    throw Error(e.code(), path.string() + ": " + e.detail());
  }
}

void write_trace_file(const LossTrace& trace, const std::filesystem::path& path,
                      TraceFormat format) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIo, "cannot write trace '" + path.string() + "'");
  emit(trace, out, format);
  if (!out) throw Error(ErrorCode::kIo, "short write to '" + path.string() + "'");
}

}  // namespace gdc
