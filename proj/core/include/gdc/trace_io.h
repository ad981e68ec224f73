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

#ifndef GDC_TRACE_IO_H_
#define GDC_TRACE_IO_H_

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>

#include "gdc/loss_trace.h"

namespace gdc {

// Text: a `#gendatacarto-trace v1 T=<T> N=<N>` header, an optional
// `epoch,sample_id,loss` column line, then one `epoch,sample_id,loss` row per
// cell. A loss of `NA` marks a missing cell. Duplicate rows overwrite.
//
// Binary: "GDCT", u16 version (1), u64 T, u64 N, N u32-length-prefixed ids,
// T*N float64 cells row-major, then a u32 CRC-32 of every preceding byte.
// All integers and floats little-endian. Missing cells are not representable.
enum class TraceFormat { kText, kBinary };

inline constexpr std::string_view kTraceMagic = "GDCT";
inline constexpr std::string_view kTraceTextTag = "#gendatacarto-trace";

LossTrace ingest(std::string_view bytes, TraceFormat format);
LossTrace ingest(std::istream& in, TraceFormat format);

std::string emit(const LossTrace& trace, TraceFormat format);
void emit(const LossTrace& trace, std::ostream& out, TraceFormat format);

// Format sniffed from the first bytes.
LossTrace read_trace_file(const std::filesystem::path& path);
void write_trace_file(const LossTrace& trace, const std::filesystem::path& path,
                      TraceFormat format);

}  // namespace gdc

#endif  // GDC_TRACE_IO_H_
