// Copyright 2025 The Orca Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// Self-contained Apache Parquet subset: flat schemas, PLAIN and
// dictionary-encoded pages (v1 and v2), RLE/bit-packed definition levels,
// and the common compression codecs. The writer emits PLAIN v1 pages that
// the reference implementations read back unchanged; interop against
// pyarrow is exercised in the test suite.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "orca/errors.hpp"

namespace orca::parquet {

enum class PhysicalType { Boolean, Int32, Int64, Float, Double, ByteArray };

enum class Codec { Uncompressed, Snappy, Gzip, Brotli, Lz4Raw, Zstd };

std::string_view codec_name(Codec codec);
std::optional<Codec> codec_from_name(std::string_view name);
bool codec_can_read(Codec codec);
bool codec_can_write(Codec codec);

// A decoded column. Value vectors are row-aligned: entry i belongs to row i,
// with `defined[i] == 0` marking a null (the value slot holds 0 / "").
// Int32 and Boolean widen into `ints`; Float widens into `doubles`.
struct Column {
  std::string name;
  PhysicalType type = PhysicalType::Int64;
  bool optional = false;
  std::vector<uint8_t> defined;
  std::vector<int64_t> ints;
  std::vector<double> doubles;
  std::vector<std::string> strings;

  size_t num_rows() const { return defined.size(); }
  bool is_integer() const {
    return type == PhysicalType::Int32 || type == PhysicalType::Int64 ||
           type == PhysicalType::Boolean;
  }
  bool is_floating() const {
    return type == PhysicalType::Float || type == PhysicalType::Double;
  }
};

struct Table {
  int64_t num_rows = 0;
  std::vector<Column> columns;
  // Columns the reader had to skip (nested or unsupported type), with reasons.
  std::vector<std::string> warnings;

  const Column* find(std::string_view name) const;
  // Case-insensitive lookup, also treating '.', '-' and '_' as equal.
  const Column* find_relaxed(std::string_view name) const;
};

// Loads an entire Parquet file. Throws Error(FileNotReadable) on missing or
// structurally corrupt files.
Table read_table(const std::string& path);

struct WriteOptions {
  Codec codec = Codec::Uncompressed;
  int64_t page_rows = 65536;
};

// Writes a single-row-group flat Parquet file. All columns must have the
// same number of rows.
void write_table(const std::string& path, const Table& table,
                 const WriteOptions& options = {});

}  // namespace orca::parquet
