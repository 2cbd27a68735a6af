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

// Thrift compact-protocol primitives, just enough for Parquet metadata.

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>

#include "parquet/format_internal.hpp"

namespace orca::parquet::thrift {

// Compact-protocol wire types.
enum WireType : uint8_t {
  kStop = 0,
  kBoolTrue = 1,
  kBoolFalse = 2,
  kI8 = 3,
  kI16 = 4,
  kI32 = 5,
  kI64 = 6,
  kDouble = 7,
  kBinary = 8,
  kList = 9,
  kSet = 10,
  kMap = 11,
  kStruct = 12,
};

class Reader {
 public:
  Reader(const uint8_t* data, size_t size) : p_(data), end_(data + size) {}

  size_t remaining() const { return static_cast<size_t>(end_ - p_); }
  const uint8_t* pos() const { return p_; }

  uint8_t read_byte();
  uint64_t read_varint();
  int64_t read_zigzag();
  int32_t read_i32() { return static_cast<int32_t>(read_zigzag()); }
  int64_t read_i64() { return read_zigzag(); }
  std::string read_binary();

  struct Field {
    bool stop = false;
    int16_t id = 0;
    uint8_t type = kStop;
    bool bool_value = false;  // set when type is kBoolTrue/kBoolFalse
  };
  // Reads the next field header of the current struct; updates last_id.
  Field read_field(int16_t& last_id);

  struct ListHeader {
    uint32_t size = 0;
    uint8_t elem_type = kStop;
  };
  ListHeader read_list_header();

  // Skips a value of the given wire type, including nested containers.
  void skip(uint8_t type);

 private:
  [[noreturn]] void fail(const char* what) const;
  const uint8_t* p_;
  const uint8_t* end_;
};

class Writer {
 public:
  const std::string& buffer() const { return buf_; }
  std::string take() { return std::move(buf_); }

  void write_byte(uint8_t b) { buf_.push_back(static_cast<char>(b)); }
  void write_varint(uint64_t v);
  void write_zigzag(int64_t v);

  void field_header(int16_t id, uint8_t type, int16_t& last_id);
  void field_i32(int16_t id, int32_t v, int16_t& last_id);
  void field_i64(int16_t id, int64_t v, int16_t& last_id);
  void field_binary(int16_t id, std::string_view v, int16_t& last_id);
  void field_bool(int16_t id, bool v, int16_t& last_id);
  void list_header(uint32_t size, uint8_t elem_type);
  void stop() { write_byte(kStop); }

 private:
  std::string buf_;
};

// Parquet metadata (de)serialization on top of the primitives.
wire::FileMetaData decode_file_metadata(const uint8_t* data, size_t size);
// Decodes a PageHeader starting at `data`; `consumed` receives the header's
// encoded length.
wire::PageHeader decode_page_header(const uint8_t* data, size_t size,
                                    size_t& consumed);

std::string encode_file_metadata(const wire::FileMetaData& meta);
std::string encode_page_header(const wire::PageHeader& header);

}  // namespace orca::parquet::thrift
