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

#include "parquet/thrift_compact.hpp"

#include "orca/errors.hpp"

namespace orca::parquet::thrift {

void Reader::fail(const char* what) const {
  throw Error(ErrorCode::FileNotReadable,
              std::string("parquet metadata: ") + what);
}

uint8_t Reader::read_byte() {
  if (p_ >= end_) fail("unexpected end of buffer");
  return *p_++;
}

uint64_t Reader::read_varint() {
  uint64_t result = 0;
  int shift = 0;
  while (true) {
    uint8_t b = read_byte();
    result |= static_cast<uint64_t>(b & 0x7F) << shift;
    if ((b & 0x80) == 0) break;
    shift += 7;
    if (shift > 63) fail("varint overflow");
  }
  return result;
}

int64_t Reader::read_zigzag() {
  uint64_t u = read_varint();
  return static_cast<int64_t>(u >> 1) ^ -static_cast<int64_t>(u & 1);
}

std::string Reader::read_binary() {
  uint64_t len = read_varint();
  if (len > remaining()) fail("binary length exceeds buffer");
  std::string out(reinterpret_cast<const char*>(p_), len);
  p_ += len;
  return out;
}

Reader::Field Reader::read_field(int16_t& last_id) {
  Field f;
  uint8_t b = read_byte();
  if (b == kStop) {
    f.stop = true;
    return f;
  }
  uint8_t delta = b >> 4;
  f.type = b & 0x0F;
  if (delta != 0) {
    f.id = static_cast<int16_t>(last_id + delta);
  } else {
    f.id = static_cast<int16_t>(read_zigzag());
  }
  last_id = f.id;
  if (f.type == kBoolTrue) f.bool_value = true;
  return f;
}

Reader::ListHeader Reader::read_list_header() {
  ListHeader h;
  uint8_t b = read_byte();
  h.elem_type = b & 0x0F;
  uint8_t short_size = b >> 4;
  h.size = (short_size == 0x0F) ? static_cast<uint32_t>(read_varint()) : short_size;
  return h;
}

void Reader::skip(uint8_t type) {
  switch (type) {
    case kBoolTrue:
    case kBoolFalse:
      return;  // value lives in the field header
    case kI8:
      read_byte();
      return;
    case kI16:
    case kI32:
    case kI64:
      read_zigzag();
      return;
    case kDouble:
      for (int i = 0; i < 8; ++i) read_byte();
      return;
    case kBinary:
      read_binary();
      return;
    case kList:
    case kSet: {
      ListHeader h = read_list_header();
      for (uint32_t i = 0; i < h.size; ++i) {
        // list elements encode bools as one byte
        if (h.elem_type == kBoolTrue || h.elem_type == kBoolFalse) {
          read_byte();
        } else {
          skip(h.elem_type);
        }
      }
      return;
    }
    case kMap: {
      uint32_t size = static_cast<uint32_t>(read_varint());
      if (size > 0) {
        uint8_t kv = read_byte();
        uint8_t kt = kv >> 4, vt = kv & 0x0F;
        for (uint32_t i = 0; i < size; ++i) {
          skip(kt);
          skip(vt);
        }
      }
      return;
    }
    case kStruct: {
      int16_t last_id = 0;
      while (true) {
        Field f = read_field(last_id);
        if (f.stop) return;
        skip(f.type);
      }
    }
    default:
      fail("unknown wire type in skip");
  }
}

void Writer::write_varint(uint64_t v) {
  while (v >= 0x80) {
    write_byte(static_cast<uint8_t>(v) | 0x80);
    v >>= 7;
  }
  write_byte(static_cast<uint8_t>(v));
}

void Writer::write_zigzag(int64_t v) {
  write_varint((static_cast<uint64_t>(v) << 1) ^ static_cast<uint64_t>(v >> 63));
}

void Writer::field_header(int16_t id, uint8_t type, int16_t& last_id) {
  int delta = id - last_id;
  if (delta > 0 && delta <= 15) {
    write_byte(static_cast<uint8_t>((delta << 4) | type));
  } else {
    write_byte(type);
    write_zigzag(id);
  }
  last_id = id;
}

void Writer::field_i32(int16_t id, int32_t v, int16_t& last_id) {
  field_header(id, kI32, last_id);
  write_zigzag(v);
}

void Writer::field_i64(int16_t id, int64_t v, int16_t& last_id) {
  field_header(id, kI64, last_id);
  write_zigzag(v);
}

void Writer::field_binary(int16_t id, std::string_view v, int16_t& last_id) {
  field_header(id, kBinary, last_id);
  write_varint(v.size());
  buf_.append(v.data(), v.size());
}

void Writer::field_bool(int16_t id, bool v, int16_t& last_id) {
  field_header(id, v ? kBoolTrue : kBoolFalse, last_id);
}

void Writer::list_header(uint32_t size, uint8_t elem_type) {
  if (size < 15) {
    write_byte(static_cast<uint8_t>((size << 4) | elem_type));
  } else {
    write_byte(static_cast<uint8_t>(0xF0 | elem_type));
    write_varint(size);
  }
}

namespace {

using wire::ColumnChunk;
using wire::ColumnMetaData;
using wire::DataPageHeader;
using wire::DataPageHeaderV2;
using wire::DictionaryPageHeader;
using wire::FileMetaData;
using wire::KeyValue;
using wire::PageHeader;
using wire::RowGroup;
using wire::SchemaElement;

SchemaElement decode_schema_element(Reader& r) {
  SchemaElement e;
  int16_t last = 0;
  while (true) {
    auto f = r.read_field(last);
    if (f.stop) break;
    switch (f.id) {
      case 1: e.type = r.read_i32(); break;
      case 2: e.type_length = r.read_i32(); break;
      case 3: e.repetition = r.read_i32(); break;
      case 4: e.name = r.read_binary(); break;
      case 5: e.num_children = r.read_i32(); break;
      case 6: e.converted_type = r.read_i32(); break;
      default: r.skip(f.type); break;
    }
  }
  return e;
}

ColumnMetaData decode_column_meta(Reader& r) {
  ColumnMetaData m;
  int16_t last = 0;
  while (true) {
    auto f = r.read_field(last);
    if (f.stop) break;
    switch (f.id) {
      case 1: m.type = r.read_i32(); break;
      case 2: {
        auto h = r.read_list_header();
        for (uint32_t i = 0; i < h.size; ++i) m.encodings.push_back(r.read_i32());
        break;
      }
      case 3: {
        auto h = r.read_list_header();
        for (uint32_t i = 0; i < h.size; ++i)
          m.path_in_schema.push_back(r.read_binary());
        break;
      }
      case 4: m.codec = r.read_i32(); break;
      case 5: m.num_values = r.read_i64(); break;
      case 6: m.total_uncompressed_size = r.read_i64(); break;
      case 7: m.total_compressed_size = r.read_i64(); break;
      case 9: m.data_page_offset = r.read_i64(); break;
      case 10: m.index_page_offset = r.read_i64(); break;
      case 11: m.dictionary_page_offset = r.read_i64(); break;
      default: r.skip(f.type); break;
    }
  }
  return m;
}

ColumnChunk decode_column_chunk(Reader& r) {
  ColumnChunk c;
  int16_t last = 0;
  while (true) {
    auto f = r.read_field(last);
    if (f.stop) break;
    switch (f.id) {
      case 1: c.file_path = r.read_binary(); break;
      case 2: c.file_offset = r.read_i64(); break;
      case 3: c.meta_data = decode_column_meta(r); break;
      default: r.skip(f.type); break;
    }
  }
  return c;
}

RowGroup decode_row_group(Reader& r) {
  RowGroup g;
  int16_t last = 0;
  while (true) {
    auto f = r.read_field(last);
    if (f.stop) break;
    switch (f.id) {
      case 1: {
        auto h = r.read_list_header();
        for (uint32_t i = 0; i < h.size; ++i)
          g.columns.push_back(decode_column_chunk(r));
        break;
      }
      case 2: g.total_byte_size = r.read_i64(); break;
      case 3: g.num_rows = r.read_i64(); break;
      default: r.skip(f.type); break;
    }
  }
  return g;
}

KeyValue decode_key_value(Reader& r) {
  KeyValue kv;
  int16_t last = 0;
  while (true) {
    auto f = r.read_field(last);
    if (f.stop) break;
    switch (f.id) {
      case 1: kv.key = r.read_binary(); break;
      case 2: kv.value = r.read_binary(); break;
      default: r.skip(f.type); break;
    }
  }
  return kv;
}

DataPageHeader decode_data_page_header(Reader& r) {
  DataPageHeader h;
  int16_t last = 0;
  while (true) {
    auto f = r.read_field(last);
    if (f.stop) break;
    switch (f.id) {
      case 1: h.num_values = r.read_i32(); break;
      case 2: h.encoding = r.read_i32(); break;
      case 3: h.definition_level_encoding = r.read_i32(); break;
      case 4: h.repetition_level_encoding = r.read_i32(); break;
      default: r.skip(f.type); break;
    }
  }
  return h;
}

DataPageHeaderV2 decode_data_page_header_v2(Reader& r) {
  DataPageHeaderV2 h;
  int16_t last = 0;
  while (true) {
    auto f = r.read_field(last);
    if (f.stop) break;
    switch (f.id) {
      case 1: h.num_values = r.read_i32(); break;
      case 2: h.num_nulls = r.read_i32(); break;
      case 3: h.num_rows = r.read_i32(); break;
      case 4: h.encoding = r.read_i32(); break;
      case 5: h.definition_levels_byte_length = r.read_i32(); break;
      case 6: h.repetition_levels_byte_length = r.read_i32(); break;
      case 7: h.is_compressed = f.bool_value; break;
      default: r.skip(f.type); break;
    }
  }
  return h;
}

DictionaryPageHeader decode_dict_page_header(Reader& r) {
  DictionaryPageHeader h;
  int16_t last = 0;
  while (true) {
    auto f = r.read_field(last);
    if (f.stop) break;
    switch (f.id) {
      case 1: h.num_values = r.read_i32(); break;
      case 2: h.encoding = r.read_i32(); break;
      default: r.skip(f.type); break;
    }
  }
  return h;
}

}  // namespace

wire::FileMetaData decode_file_metadata(const uint8_t* data, size_t size) {
  Reader r(data, size);
  FileMetaData meta;
  int16_t last = 0;
  while (true) {
    auto f = r.read_field(last);
    if (f.stop) break;
    switch (f.id) {
      case 1: meta.version = r.read_i32(); break;
      case 2: {
        auto h = r.read_list_header();
        for (uint32_t i = 0; i < h.size; ++i)
          meta.schema.push_back(decode_schema_element(r));
        break;
      }
      case 3: meta.num_rows = r.read_i64(); break;
      case 4: {
        auto h = r.read_list_header();
        for (uint32_t i = 0; i < h.size; ++i)
          meta.row_groups.push_back(decode_row_group(r));
        break;
      }
      case 5: {
        auto h = r.read_list_header();
        for (uint32_t i = 0; i < h.size; ++i)
          meta.key_value_metadata.push_back(decode_key_value(r));
        break;
      }
      case 6: meta.created_by = r.read_binary(); break;
      default: r.skip(f.type); break;
    }
  }
  return meta;
}

wire::PageHeader decode_page_header(const uint8_t* data, size_t size,
                                    size_t& consumed) {
  Reader r(data, size);
  PageHeader h;
  int16_t last = 0;
  while (true) {
    auto f = r.read_field(last);
    if (f.stop) break;
    switch (f.id) {
      case 1: h.type = r.read_i32(); break;
      case 2: h.uncompressed_page_size = r.read_i32(); break;
      case 3: h.compressed_page_size = r.read_i32(); break;
      case 5: h.data_page_header = decode_data_page_header(r); break;
      case 7: h.dictionary_page_header = decode_dict_page_header(r); break;
      case 8: h.data_page_header_v2 = decode_data_page_header_v2(r); break;
      default: r.skip(f.type); break;
    }
  }
  consumed = size - r.remaining();
  return h;
}

std::string encode_file_metadata(const wire::FileMetaData& meta) {
  Writer w;
  int16_t last = 0;
  w.field_i32(1, meta.version, last);

  w.field_header(2, kList, last);
  w.list_header(static_cast<uint32_t>(meta.schema.size()), kStruct);
  for (const auto& e : meta.schema) {
    int16_t el = 0;
    if (e.type) w.field_i32(1, *e.type, el);
    if (e.repetition) w.field_i32(3, *e.repetition, el);
    w.field_binary(4, e.name, el);
    if (e.num_children) w.field_i32(5, *e.num_children, el);
    if (e.converted_type) w.field_i32(6, *e.converted_type, el);
    w.stop();
  }

  w.field_i64(3, meta.num_rows, last);

  w.field_header(4, kList, last);
  w.list_header(static_cast<uint32_t>(meta.row_groups.size()), kStruct);
  for (const auto& g : meta.row_groups) {
    int16_t gl = 0;
    w.field_header(1, kList, gl);
    w.list_header(static_cast<uint32_t>(g.columns.size()), kStruct);
    for (const auto& c : g.columns) {
      int16_t cl = 0;
      w.field_i64(2, c.file_offset, cl);
      if (c.meta_data) {
        const auto& m = *c.meta_data;
        w.field_header(3, kStruct, cl);
        int16_t ml = 0;
        w.field_i32(1, m.type, ml);
        w.field_header(2, kList, ml);
        w.list_header(static_cast<uint32_t>(m.encodings.size()), kI32);
        for (int32_t enc : m.encodings) w.write_zigzag(enc);
        w.field_header(3, kList, ml);
        w.list_header(static_cast<uint32_t>(m.path_in_schema.size()), kBinary);
        for (const auto& p : m.path_in_schema) {
          w.write_varint(p.size());
          for (char ch : p) w.write_byte(static_cast<uint8_t>(ch));
        }
        w.field_i32(4, m.codec, ml);
        w.field_i64(5, m.num_values, ml);
        w.field_i64(6, m.total_uncompressed_size, ml);
        w.field_i64(7, m.total_compressed_size, ml);
        w.field_i64(9, m.data_page_offset, ml);
        if (m.dictionary_page_offset)
          w.field_i64(11, *m.dictionary_page_offset, ml);
        w.stop();
      }
      w.stop();
    }
    w.field_i64(2, g.total_byte_size, gl);
    w.field_i64(3, g.num_rows, gl);
    w.stop();
  }

  if (!meta.key_value_metadata.empty()) {
    w.field_header(5, kList, last);
    w.list_header(static_cast<uint32_t>(meta.key_value_metadata.size()), kStruct);
    for (const auto& kv : meta.key_value_metadata) {
      int16_t kl = 0;
      w.field_binary(1, kv.key, kl);
      if (kv.value) w.field_binary(2, *kv.value, kl);
      w.stop();
    }
  }
  if (meta.created_by) w.field_binary(6, *meta.created_by, last);
  w.stop();
  return w.take();
}

std::string encode_page_header(const wire::PageHeader& h) {
  Writer w;
  int16_t last = 0;
  w.field_i32(1, h.type, last);
  w.field_i32(2, h.uncompressed_page_size, last);
  w.field_i32(3, h.compressed_page_size, last);
  if (h.data_page_header) {
    const auto& d = *h.data_page_header;
    w.field_header(5, kStruct, last);
    int16_t dl = 0;
    w.field_i32(1, d.num_values, dl);
    w.field_i32(2, d.encoding, dl);
    w.field_i32(3, d.definition_level_encoding, dl);
    w.field_i32(4, d.repetition_level_encoding, dl);
    w.stop();
  }
  if (h.dictionary_page_header) {
    const auto& d = *h.dictionary_page_header;
    w.field_header(7, kStruct, last);
    int16_t dl = 0;
    w.field_i32(1, d.num_values, dl);
    w.field_i32(2, d.encoding, dl);
    w.stop();
  }
  w.stop();
  return w.take();
}

}  // namespace orca::parquet::thrift
