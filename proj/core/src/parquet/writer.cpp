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

#include <algorithm>
#include <cstring>
#include <fstream>
#include <set>

#include "orca/parquet/parquet.hpp"
#include "parquet/codec.hpp"
#include "parquet/format_internal.hpp"
#include "parquet/rle.hpp"
#include "parquet/thrift_compact.hpp"

namespace orca::parquet {

namespace {

int32_t wire_type_of(PhysicalType t) {
  switch (t) {
    case PhysicalType::Boolean: return wire::kBoolean;
    case PhysicalType::Int32: return wire::kInt32;
    case PhysicalType::Int64: return wire::kInt64;
    case PhysicalType::Float: return wire::kFloat;
    case PhysicalType::Double: return wire::kDouble;
    case PhysicalType::ByteArray: return wire::kByteArray;
  }
  return wire::kInt64;
}

int32_t wire_codec_of(Codec c) {
  switch (c) {
    case Codec::Uncompressed: return wire::kUncompressed;
    case Codec::Snappy: return wire::kSnappy;
    case Codec::Gzip: return wire::kGzip;
    case Codec::Brotli: return wire::kBrotli;
    case Codec::Lz4Raw: return wire::kLz4Raw;
    case Codec::Zstd: return wire::kZstd;
  }
  return wire::kUncompressed;
}

void append_u32le(std::string& out, uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

void append_u64le(std::string& out, uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

// PLAIN-encodes the defined values of rows [begin, end).
std::string encode_plain(const Column& col, size_t begin, size_t end) {
  std::string out;
  switch (col.type) {
    case PhysicalType::Boolean: {
      uint8_t acc = 0;
      int nbits = 0;
      for (size_t i = begin; i < end; ++i) {
        if (!col.defined[i]) continue;
        if (col.ints[i] != 0) acc |= static_cast<uint8_t>(1u << nbits);
        if (++nbits == 8) {
          out.push_back(static_cast<char>(acc));
          acc = 0;
          nbits = 0;
        }
      }
      if (nbits > 0) out.push_back(static_cast<char>(acc));
      break;
    }
    case PhysicalType::Int32: {
      for (size_t i = begin; i < end; ++i) {
        if (!col.defined[i]) continue;
        append_u32le(out, static_cast<uint32_t>(static_cast<int32_t>(col.ints[i])));
      }
      break;
    }
    case PhysicalType::Int64: {
      for (size_t i = begin; i < end; ++i) {
        if (!col.defined[i]) continue;
        append_u64le(out, static_cast<uint64_t>(col.ints[i]));
      }
      break;
    }
    case PhysicalType::Float: {
      for (size_t i = begin; i < end; ++i) {
        if (!col.defined[i]) continue;
        float v = static_cast<float>(col.doubles[i]);
        uint32_t bits;
        std::memcpy(&bits, &v, 4);
        append_u32le(out, bits);
      }
      break;
    }
    case PhysicalType::Double: {
      for (size_t i = begin; i < end; ++i) {
        if (!col.defined[i]) continue;
        uint64_t bits;
        std::memcpy(&bits, &col.doubles[i], 8);
        append_u64le(out, bits);
      }
      break;
    }
    case PhysicalType::ByteArray: {
      for (size_t i = begin; i < end; ++i) {
        if (!col.defined[i]) continue;
        append_u32le(out, static_cast<uint32_t>(col.strings[i].size()));
        out.append(col.strings[i]);
      }
      break;
    }
  }
  return out;
}

void validate_column_storage(const Column& col) {
  const size_t rows = col.defined.size();
  size_t have = 0;
  if (col.is_integer()) {
    have = col.ints.size();
  } else if (col.is_floating()) {
    have = col.doubles.size();
  } else {
    have = col.strings.size();
  }
  if (have != rows) {
    throw Error(ErrorCode::InvalidConfig,
                "column '" + col.name + "' value vector not row aligned");
  }
}

}  // namespace

void write_table(const std::string& path, const Table& table,
                 const WriteOptions& options) {
  if (!codec_can_write(options.codec)) {
    throw Error(ErrorCode::InvalidConfig,
                std::string(codec_name(options.codec)) +
                    " codec has no compressor available");
  }
  if (options.page_rows <= 0) {
    throw Error(ErrorCode::InvalidConfig, "page_rows must be positive");
  }
  const size_t rows = table.columns.empty() ? static_cast<size_t>(table.num_rows)
                                            : table.columns[0].num_rows();
  std::set<std::string> seen_names;
  for (const auto& col : table.columns) {
    if (col.name.empty())
      throw Error(ErrorCode::InvalidConfig, "column with empty name");
    if (!seen_names.insert(col.name).second)
      throw Error(ErrorCode::InvalidConfig, "duplicate column '" + col.name + "'");
    if (col.num_rows() != rows)
      throw Error(ErrorCode::InvalidConfig,
                  "column '" + col.name + "' row count mismatch");
    validate_column_storage(col);
  }

  std::string out("PAR1");
  wire::FileMetaData meta;
  meta.version = 1;
  meta.num_rows = static_cast<int64_t>(rows);
  meta.created_by = "orca-parquet 0.1.0";

  wire::SchemaElement root;
  root.name = "schema";
  root.repetition = wire::kRequired;
  root.num_children = static_cast<int32_t>(table.columns.size());
  meta.schema.push_back(root);

  wire::RowGroup group;
  group.num_rows = static_cast<int64_t>(rows);

  for (const auto& col : table.columns) {
    const bool has_nulls =
        std::find(col.defined.begin(), col.defined.end(), uint8_t{0}) !=
        col.defined.end();
    const bool optional = col.optional || has_nulls;

    wire::SchemaElement leaf;
    leaf.type = wire_type_of(col.type);
    leaf.repetition = optional ? wire::kOptional : wire::kRequired;
    leaf.name = col.name;
    if (col.type == PhysicalType::ByteArray) leaf.converted_type = wire::kUtf8;
    meta.schema.push_back(leaf);

    wire::ColumnMetaData m;
    m.type = *leaf.type;
    m.encodings = {wire::kPlain, wire::kRle};
    m.path_in_schema = {col.name};
    m.codec = wire_codec_of(options.codec);
    m.num_values = static_cast<int64_t>(rows);
    m.data_page_offset = static_cast<int64_t>(out.size());

    const size_t page_rows = static_cast<size_t>(options.page_rows);
    size_t begin = 0;
    do {
      const size_t end = std::min(rows, begin + page_rows);
      std::string body;
      if (optional) {
        std::vector<uint32_t> defs;
        defs.reserve(end - begin);
        for (size_t i = begin; i < end; ++i)
          defs.push_back(col.defined[i] ? 1u : 0u);
        std::string levels = rle_encode(defs, 1);
        append_u32le(body, static_cast<uint32_t>(levels.size()));
        body.append(levels);
      }
      body.append(encode_plain(col, begin, end));

      std::string compressed = options.codec == Codec::Uncompressed
                                   ? body
                                   : codec_compress(options.codec, body);
      wire::PageHeader h;
      h.type = wire::kDataPage;
      h.uncompressed_page_size = static_cast<int32_t>(body.size());
      h.compressed_page_size = static_cast<int32_t>(compressed.size());
      wire::DataPageHeader dh;
      dh.num_values = static_cast<int32_t>(end - begin);
      dh.encoding = wire::kPlain;
      dh.definition_level_encoding = wire::kRle;
      dh.repetition_level_encoding = wire::kRle;
      h.data_page_header = dh;
      const std::string header_bytes = thrift::encode_page_header(h);

      m.total_uncompressed_size +=
          static_cast<int64_t>(header_bytes.size() + body.size());
      m.total_compressed_size +=
          static_cast<int64_t>(header_bytes.size() + compressed.size());
      out.append(header_bytes);
      out.append(compressed);
      begin = end;
    } while (begin < rows);

    wire::ColumnChunk chunk;
    chunk.file_offset = m.data_page_offset;
    group.total_byte_size += m.total_compressed_size;
    chunk.meta_data = std::move(m);
    group.columns.push_back(std::move(chunk));
  }

  if (!table.columns.empty()) meta.row_groups.push_back(std::move(group));
  const std::string footer = thrift::encode_file_metadata(meta);
  out.append(footer);
  append_u32le(out, static_cast<uint32_t>(footer.size()));
  out.append("PAR1");

  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw Error(ErrorCode::Internal, path + ": cannot open for writing");
  f.write(out.data(), static_cast<std::streamsize>(out.size()));
  f.close();
  if (!f) throw Error(ErrorCode::Internal, path + ": write failed");
}

}  // namespace orca::parquet
