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
#include <cctype>
#include <cstring>
#include <fstream>
#include <map>

#include "orca/parquet/parquet.hpp"
#include "parquet/codec.hpp"
#include "parquet/format_internal.hpp"
#include "parquet/rle.hpp"
#include "parquet/thrift_compact.hpp"

namespace orca::parquet {

namespace {

constexpr char kMagic[4] = {'P', 'A', 'R', '1'};

[[noreturn]] void read_fail(const std::string& path, const std::string& msg) {
  throw Error(ErrorCode::FileNotReadable, path + ": " + msg);
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) read_fail(path, "cannot open file");
  std::string buf((std::istreambuf_iterator<char>(in)),
                  std::istreambuf_iterator<char>());
  if (!in.good() && !in.eof()) read_fail(path, "read error");
  return buf;
}

std::optional<PhysicalType> map_phys_type(int32_t t) {
  switch (t) {
    case wire::kBoolean: return PhysicalType::Boolean;
    case wire::kInt32: return PhysicalType::Int32;
    case wire::kInt64: return PhysicalType::Int64;
    case wire::kFloat: return PhysicalType::Float;
    case wire::kDouble: return PhysicalType::Double;
    case wire::kByteArray: return PhysicalType::ByteArray;
    default: return std::nullopt;
  }
}

Codec codec_from_wire(int32_t c, const std::string& path) {
  switch (c) {
    case wire::kUncompressed: return Codec::Uncompressed;
    case wire::kSnappy: return Codec::Snappy;
    case wire::kGzip: return Codec::Gzip;
    case wire::kBrotli: return Codec::Brotli;
    case wire::kZstd: return Codec::Zstd;
    case wire::kLz4Raw: return Codec::Lz4Raw;
    default:
      read_fail(path, "unsupported compression codec id " + std::to_string(c));
  }
}

uint32_t read_u32le(const uint8_t* p) {
  return static_cast<uint32_t>(p[0]) | static_cast<uint32_t>(p[1]) << 8 |
         static_cast<uint32_t>(p[2]) << 16 | static_cast<uint32_t>(p[3]) << 24;
}

// PLAIN-decoded values of one physical type.
struct PlainValues {
  std::vector<int64_t> ints;
  std::vector<double> doubles;
  std::vector<std::string> strings;
};

PlainValues decode_plain(PhysicalType type, const uint8_t* data, size_t size,
                         size_t count, const std::string& path) {
  PlainValues out;
  switch (type) {
    case PhysicalType::Boolean: {
      if (size < (count + 7) / 8) read_fail(path, "truncated boolean page");
      out.ints.reserve(count);
      for (size_t i = 0; i < count; ++i)
        out.ints.push_back((data[i / 8] >> (i % 8)) & 1);
      break;
    }
    case PhysicalType::Int32: {
      if (size < count * 4) read_fail(path, "truncated int32 page");
      out.ints.reserve(count);
      for (size_t i = 0; i < count; ++i) {
        int32_t v;
        std::memcpy(&v, data + i * 4, 4);
        out.ints.push_back(v);
      }
      break;
    }
    case PhysicalType::Int64: {
      if (size < count * 8) read_fail(path, "truncated int64 page");
      out.ints.reserve(count);
      for (size_t i = 0; i < count; ++i) {
        int64_t v;
        std::memcpy(&v, data + i * 8, 8);
        out.ints.push_back(v);
      }
      break;
    }
    case PhysicalType::Float: {
      if (size < count * 4) read_fail(path, "truncated float page");
      out.doubles.reserve(count);
      for (size_t i = 0; i < count; ++i) {
        float v;
        std::memcpy(&v, data + i * 4, 4);
        out.doubles.push_back(v);
      }
      break;
    }
    case PhysicalType::Double: {
      if (size < count * 8) read_fail(path, "truncated double page");
      out.doubles.reserve(count);
      for (size_t i = 0; i < count; ++i) {
        double v;
        std::memcpy(&v, data + i * 8, 8);
        out.doubles.push_back(v);
      }
      break;
    }
    case PhysicalType::ByteArray: {
      out.strings.reserve(count);
      size_t pos = 0;
      for (size_t i = 0; i < count; ++i) {
        if (pos + 4 > size) read_fail(path, "truncated byte array page");
        uint32_t len = read_u32le(data + pos);
        pos += 4;
        if (pos + len > size) read_fail(path, "byte array overruns page");
        out.strings.emplace_back(reinterpret_cast<const char*>(data + pos), len);
        pos += len;
      }
      break;
    }
  }
  return out;
}

void append_value(Column& col, const PlainValues& vals, size_t idx) {
  col.defined.push_back(1);
  if (col.is_integer()) {
    col.ints.push_back(vals.ints[idx]);
  } else if (col.is_floating()) {
    col.doubles.push_back(vals.doubles[idx]);
  } else {
    col.strings.push_back(vals.strings[idx]);
  }
}

void append_null(Column& col) {
  col.defined.push_back(0);
  if (col.is_integer()) {
    col.ints.push_back(0);
  } else if (col.is_floating()) {
    col.doubles.push_back(0.0);
  } else {
    col.strings.emplace_back();
  }
}

void append_rows(Column& col, const std::vector<uint32_t>& defs, uint32_t max_def,
                 const PlainValues& vals) {
  size_t k = 0;
  for (uint32_t d : defs) {
    if (d == max_def) {
      append_value(col, vals, k++);
    } else {
      append_null(col);
    }
  }
}

PlainValues dict_lookup(const Column& col, const PlainValues& dict,
                        const std::vector<uint32_t>& idxs,
                        const std::string& path) {
  PlainValues out;
  auto check = [&](size_t dict_size) {
    for (uint32_t i : idxs)
      if (i >= dict_size) read_fail(path, "dictionary index out of range");
  };
  if (col.is_integer()) {
    check(dict.ints.size());
    out.ints.reserve(idxs.size());
    for (uint32_t i : idxs) out.ints.push_back(dict.ints[i]);
  } else if (col.is_floating()) {
    check(dict.doubles.size());
    out.doubles.reserve(idxs.size());
    for (uint32_t i : idxs) out.doubles.push_back(dict.doubles[i]);
  } else {
    check(dict.strings.size());
    out.strings.reserve(idxs.size());
    for (uint32_t i : idxs) out.strings.push_back(dict.strings[i]);
  }
  return out;
}

size_t count_subtree(const std::vector<wire::SchemaElement>& schema, size_t idx) {
  if (idx >= schema.size()) return 1;
  const auto& e = schema[idx];
  size_t n = 1;
  int32_t children = e.num_children.value_or(0);
  for (int32_t i = 0; i < children; ++i) n += count_subtree(schema, idx + n);
  return n;
}

struct ChunkTarget {
  size_t column_index = 0;
  uint32_t max_def = 0;
};

void decode_chunk(const std::string& buf, const wire::ColumnMetaData& m,
                  Column& col, uint32_t max_def, const std::string& path) {
  Codec codec = codec_from_wire(m.codec, path);
  if (!codec_can_read(codec)) {
    read_fail(path, std::string(codec_name(codec)) + " codec not available");
  }
  int64_t offset = m.data_page_offset;
  if (m.dictionary_page_offset && *m.dictionary_page_offset < offset)
    offset = *m.dictionary_page_offset;
  int64_t values_seen = 0;
  PlainValues dict;
  bool have_dict = false;
  const uint32_t def_width = bit_width_for(max_def);

  while (values_seen < m.num_values) {
    if (offset < 0 || static_cast<size_t>(offset) >= buf.size())
      read_fail(path, "page offset out of range");
    size_t consumed = 0;
    wire::PageHeader h = thrift::decode_page_header(
        reinterpret_cast<const uint8_t*>(buf.data()) + offset,
        buf.size() - static_cast<size_t>(offset), consumed);
    const size_t body_off = static_cast<size_t>(offset) + consumed;
    const size_t body_len = static_cast<size_t>(h.compressed_page_size);
    if (body_off + body_len > buf.size()) read_fail(path, "page overruns file");
    std::string_view body(buf.data() + body_off, body_len);

    switch (h.type) {
      case wire::kDictionaryPage: {
        if (!h.dictionary_page_header) read_fail(path, "missing dictionary header");
        const auto& dh = *h.dictionary_page_header;
        if (dh.encoding != wire::kPlain && dh.encoding != wire::kPlainDictionary)
          read_fail(path, "unsupported dictionary encoding");
        std::string raw = codec_decompress(
            codec, body, static_cast<size_t>(h.uncompressed_page_size));
        dict = decode_plain(col.type, reinterpret_cast<const uint8_t*>(raw.data()),
                            raw.size(), static_cast<size_t>(dh.num_values), path);
        have_dict = true;
        break;
      }
      case wire::kDataPage: {
        if (!h.data_page_header) read_fail(path, "missing data page header");
        const auto& dh = *h.data_page_header;
        std::string raw = codec_decompress(
            codec, body, static_cast<size_t>(h.uncompressed_page_size));
        const uint8_t* p = reinterpret_cast<const uint8_t*>(raw.data());
        size_t n = raw.size();
        const size_t nvals = static_cast<size_t>(dh.num_values);
        std::vector<uint32_t> defs;
        if (max_def > 0) {
          if (dh.definition_level_encoding != wire::kRle)
            read_fail(path, "unsupported definition level encoding");
          if (n < 4) read_fail(path, "truncated definition levels");
          uint32_t len = read_u32le(p);
          p += 4;
          n -= 4;
          if (len > n) read_fail(path, "definition levels overrun page");
          defs = rle_decode(p, len, static_cast<int>(def_width), nvals);
          p += len;
          n -= len;
        } else {
          defs.assign(nvals, 0);
        }
        size_t defined_count = 0;
        for (uint32_t d : defs) defined_count += (d == max_def);

        if (dh.encoding == wire::kPlain) {
          PlainValues vals = decode_plain(col.type, p, n, defined_count, path);
          append_rows(col, defs, max_def, vals);
        } else if (dh.encoding == wire::kRleDictionary ||
                   dh.encoding == wire::kPlainDictionary) {
          if (!have_dict) read_fail(path, "dictionary page missing");
          if (n < 1) read_fail(path, "truncated dictionary indices");
          int bw = *p++;
          --n;
          auto idxs = rle_decode(p, n, bw, defined_count);
          append_rows(col, defs, max_def, dict_lookup(col, dict, idxs, path));
        } else if (dh.encoding == wire::kRle &&
                   col.type == PhysicalType::Boolean) {
          if (n < 4) read_fail(path, "truncated rle booleans");
          uint32_t len = read_u32le(p);
          p += 4;
          n -= 4;
          if (len > n) read_fail(path, "rle booleans overrun page");
          auto bits = rle_decode(p, len, 1, defined_count);
          PlainValues vals;
          vals.ints.assign(bits.begin(), bits.end());
          append_rows(col, defs, max_def, vals);
        } else {
          read_fail(path, "unsupported data encoding id " +
                              std::to_string(dh.encoding));
        }
        values_seen += dh.num_values;
        break;
      }
      case wire::kDataPageV2: {
        if (!h.data_page_header_v2) read_fail(path, "missing data page header");
        const auto& dh = *h.data_page_header_v2;
        const size_t rep_len =
            static_cast<size_t>(dh.repetition_levels_byte_length);
        const size_t def_len =
            static_cast<size_t>(dh.definition_levels_byte_length);
        if (rep_len + def_len > body.size())
          read_fail(path, "levels overrun page");
        const size_t nvals = static_cast<size_t>(dh.num_values);
        std::vector<uint32_t> defs;
        if (max_def > 0) {
          defs = rle_decode(
              reinterpret_cast<const uint8_t*>(body.data()) + rep_len, def_len,
              static_cast<int>(def_width), nvals);
        } else {
          defs.assign(nvals, 0);
        }
        size_t defined_count = 0;
        for (uint32_t d : defs) defined_count += (d == max_def);

        std::string_view enc_values = body.substr(rep_len + def_len);
        std::string raw;
        if (dh.is_compressed && codec != Codec::Uncompressed) {
          raw = codec_decompress(
              codec, enc_values,
              static_cast<size_t>(h.uncompressed_page_size) - rep_len - def_len);
        } else {
          raw.assign(enc_values);
        }
        const uint8_t* p = reinterpret_cast<const uint8_t*>(raw.data());
        size_t n = raw.size();
        if (dh.encoding == wire::kPlain) {
          PlainValues vals = decode_plain(col.type, p, n, defined_count, path);
          append_rows(col, defs, max_def, vals);
        } else if (dh.encoding == wire::kRleDictionary ||
                   dh.encoding == wire::kPlainDictionary) {
          if (!have_dict) read_fail(path, "dictionary page missing");
          if (n < 1) read_fail(path, "truncated dictionary indices");
          int bw = *p++;
          --n;
          auto idxs = rle_decode(p, n, bw, defined_count);
          append_rows(col, defs, max_def, dict_lookup(col, dict, idxs, path));
        } else if (dh.encoding == wire::kRle &&
                   col.type == PhysicalType::Boolean) {
          // RLE values (unlike v2 levels) keep their 4-byte length prefix.
          if (n < 4) read_fail(path, "truncated rle booleans");
          uint32_t len = read_u32le(p);
          p += 4;
          n -= 4;
          if (len > n) read_fail(path, "rle booleans overrun page");
          auto bits = rle_decode(p, len, 1, defined_count);
          PlainValues vals;
          vals.ints.assign(bits.begin(), bits.end());
          append_rows(col, defs, max_def, vals);
        } else {
          read_fail(path, "unsupported data encoding id " +
                              std::to_string(dh.encoding));
        }
        values_seen += dh.num_values;
        break;
      }
      default:
        break;  // index pages and unknown page types carry no row data
    }
    offset = static_cast<int64_t>(body_off + body_len);
  }
}

}  // namespace

const Column* Table::find(std::string_view name) const {
  for (const auto& c : columns)
    if (c.name == name) return &c;
  return nullptr;
}

namespace {
std::string relax_name(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (char ch : s) {
    if (ch == '.' || ch == '-') {
      out.push_back('_');
    } else {
      out.push_back(static_cast<char>(
          std::tolower(static_cast<unsigned char>(ch))));
    }
  }
  return out;
}
}  // namespace

const Column* Table::find_relaxed(std::string_view name) const {
  const std::string want = relax_name(name);
  for (const auto& c : columns)
    if (relax_name(c.name) == want) return &c;
  return nullptr;
}

Table read_table(const std::string& path) {
  const std::string buf = slurp(path);
  if (buf.size() < 12 || std::memcmp(buf.data(), kMagic, 4) != 0 ||
      std::memcmp(buf.data() + buf.size() - 4, kMagic, 4) != 0) {
    read_fail(path, "not a parquet file");
  }
  const uint32_t meta_len =
      read_u32le(reinterpret_cast<const uint8_t*>(buf.data()) + buf.size() - 8);
  if (static_cast<uint64_t>(meta_len) + 12 > buf.size())
    read_fail(path, "metadata length out of range");
  const size_t meta_off = buf.size() - 8 - meta_len;
  wire::FileMetaData meta = thrift::decode_file_metadata(
      reinterpret_cast<const uint8_t*>(buf.data()) + meta_off, meta_len);

  if (meta.schema.empty()) read_fail(path, "empty schema");
  const int32_t root_children = meta.schema[0].num_children.value_or(0);

  Table table;
  table.num_rows = meta.num_rows;
  std::map<std::string, ChunkTarget> targets;

  size_t idx = 1;
  for (int32_t i = 0; i < root_children; ++i) {
    if (idx >= meta.schema.size()) read_fail(path, "schema tree truncated");
    const auto& e = meta.schema[idx];
    const size_t subtree = count_subtree(meta.schema, idx);
    if (e.num_children.value_or(0) > 0) {
      table.warnings.push_back("column '" + e.name + "' skipped: nested schema");
      idx += subtree;
      continue;
    }
    if (e.repetition.value_or(wire::kRequired) == wire::kRepeated) {
      table.warnings.push_back("column '" + e.name + "' skipped: repeated field");
      idx += subtree;
      continue;
    }
    auto mapped = e.type ? map_phys_type(*e.type) : std::nullopt;
    if (!mapped) {
      table.warnings.push_back("column '" + e.name +
                               "' skipped: unsupported physical type");
      idx += subtree;
      continue;
    }
    Column col;
    col.name = e.name;
    col.type = *mapped;
    col.optional = e.repetition.value_or(wire::kRequired) == wire::kOptional;
    targets[e.name] = ChunkTarget{table.columns.size(),
                                  col.optional ? 1u : 0u};
    table.columns.push_back(std::move(col));
    idx += subtree;
  }

  for (const auto& rg : meta.row_groups) {
    for (const auto& chunk : rg.columns) {
      if (!chunk.meta_data) read_fail(path, "column chunk missing metadata");
      const auto& m = *chunk.meta_data;
      if (m.path_in_schema.size() != 1) continue;  // nested, already warned
      auto it = targets.find(m.path_in_schema[0]);
      if (it == targets.end()) continue;  // unsupported leaf, already warned
      Column& col = table.columns[it->second.column_index];
      decode_chunk(buf, m, col, it->second.max_def, path);
    }
  }

  for (const auto& col : table.columns) {
    if (static_cast<int64_t>(col.num_rows()) != table.num_rows) {
      read_fail(path, "column '" + col.name + "' has " +
                          std::to_string(col.num_rows()) + " rows, expected " +
                          std::to_string(table.num_rows));
    }
  }
  return table;
}

}  // namespace orca::parquet
