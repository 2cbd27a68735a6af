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

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include <doctest.h>

#include "orca/parquet/parquet.hpp"
#include "parquet/codec.hpp"
#include "parquet/rle.hpp"
#include "parquet/thrift_compact.hpp"

using namespace orca;
using namespace orca::parquet;

namespace {

std::string temp_path(const std::string& stem) {
  return (std::filesystem::temp_directory_path() / stem).string();
}

Column make_int64(const std::string& name, std::vector<int64_t> vals,
                  std::vector<uint8_t> defined = {}) {
  Column c;
  c.name = name;
  c.type = PhysicalType::Int64;
  if (defined.empty()) defined.assign(vals.size(), 1);
  c.optional = false;
  for (uint8_t d : defined) c.optional |= (d == 0);
  c.defined = std::move(defined);
  c.ints = std::move(vals);
  return c;
}

Column make_double(const std::string& name, std::vector<double> vals,
                   std::vector<uint8_t> defined = {}) {
  Column c;
  c.name = name;
  c.type = PhysicalType::Double;
  if (defined.empty()) defined.assign(vals.size(), 1);
  c.defined = std::move(defined);
  c.doubles = std::move(vals);
  return c;
}

Column make_string(const std::string& name, std::vector<std::string> vals,
                   std::vector<uint8_t> defined = {}) {
  Column c;
  c.name = name;
  c.type = PhysicalType::ByteArray;
  if (defined.empty()) defined.assign(vals.size(), 1);
  c.defined = std::move(defined);
  c.strings = std::move(vals);
  return c;
}

void check_tables_equal(const Table& a, const Table& b) {
  REQUIRE(a.num_rows == b.num_rows);
  REQUIRE(a.columns.size() == b.columns.size());
  for (size_t i = 0; i < a.columns.size(); ++i) {
    const Column& x = a.columns[i];
    const Column& y = b.columns[i];
    CHECK(x.name == y.name);
    CHECK(x.type == y.type);
    REQUIRE(x.defined == y.defined);
    CHECK(x.ints == y.ints);
    CHECK(x.strings == y.strings);
    // Round trips are bit exact, so plain equality is the right check.
    CHECK(x.doubles == y.doubles);
  }
}

}  // namespace

TEST_CASE("bit_width_for covers boundaries") {
  CHECK(bit_width_for(0) == 0);
  CHECK(bit_width_for(1) == 1);
  CHECK(bit_width_for(2) == 2);
  CHECK(bit_width_for(3) == 2);
  CHECK(bit_width_for(7) == 3);
  CHECK(bit_width_for(8) == 4);
  CHECK(bit_width_for(255) == 8);
  CHECK(bit_width_for(256) == 9);
  CHECK(bit_width_for(0xFFFFFFFFu) == 32);
}

TEST_CASE("rle round trip on random sequences") {
  std::mt19937_64 rng(20250825);
  for (int iter = 0; iter < 200; ++iter) {
    const int bit_width = 1 + static_cast<int>(rng() % 20);
    const uint32_t max_value =
        bit_width == 32 ? 0xFFFFFFFFu : ((1u << bit_width) - 1);
    const size_t n = rng() % 500;
    std::vector<uint32_t> values;
    values.reserve(n);
    while (values.size() < n) {
      if (rng() % 2 == 0) {
        // repeated stretch
        uint32_t v = static_cast<uint32_t>(rng()) & max_value;
        size_t run = 1 + rng() % 40;
        for (size_t i = 0; i < run && values.size() < n; ++i) values.push_back(v);
      } else {
        values.push_back(static_cast<uint32_t>(rng()) & max_value);
      }
    }
    std::string encoded = rle_encode(values, bit_width);
    auto decoded = rle_decode(reinterpret_cast<const uint8_t*>(encoded.data()),
                              encoded.size(), bit_width, values.size());
    REQUIRE(decoded == values);
  }
}

TEST_CASE("rle handles zero bit width") {
  std::vector<uint32_t> zeros(100, 0);
  std::string encoded = rle_encode(zeros, 0);
  auto decoded = rle_decode(reinterpret_cast<const uint8_t*>(encoded.data()),
                            encoded.size(), 0, zeros.size());
  CHECK(decoded == zeros);
}

TEST_CASE("rle rejects truncated input") {
  std::vector<uint32_t> values(64, 7);
  std::string encoded = rle_encode(values, 3);
  encoded.resize(encoded.size() / 2);
  CHECK_THROWS_AS(rle_decode(reinterpret_cast<const uint8_t*>(encoded.data()),
                             encoded.size(), 3, values.size()),
                  Error);
}

TEST_CASE("thrift file metadata round trip") {
  wire::FileMetaData meta;
  meta.version = 1;
  meta.num_rows = 42;
  meta.created_by = "probe";

  wire::SchemaElement root;
  root.name = "schema";
  root.repetition = wire::kRequired;
  root.num_children = 2;
  meta.schema.push_back(root);

  wire::SchemaElement a;
  a.name = "ts";
  a.type = wire::kInt64;
  a.repetition = wire::kOptional;
  meta.schema.push_back(a);

  wire::SchemaElement b;
  b.name = "msg";
  b.type = wire::kByteArray;
  b.repetition = wire::kRequired;
  b.converted_type = wire::kUtf8;
  meta.schema.push_back(b);

  wire::RowGroup g;
  g.num_rows = 42;
  g.total_byte_size = 1000;
  wire::ColumnChunk c;
  c.file_offset = 4;
  wire::ColumnMetaData m;
  m.type = wire::kInt64;
  m.encodings = {wire::kPlain, wire::kRle};
  m.path_in_schema = {"ts"};
  m.codec = wire::kGzip;
  m.num_values = 42;
  m.total_uncompressed_size = 500;
  m.total_compressed_size = 300;
  m.data_page_offset = 4;
  m.dictionary_page_offset = 2;
  c.meta_data = m;
  g.columns.push_back(c);
  meta.row_groups.push_back(g);

  std::string bytes = thrift::encode_file_metadata(meta);
  wire::FileMetaData back = thrift::decode_file_metadata(
      reinterpret_cast<const uint8_t*>(bytes.data()), bytes.size());

  CHECK(back.version == 1);
  CHECK(back.num_rows == 42);
  REQUIRE(back.schema.size() == 3);
  CHECK(back.schema[0].num_children == 2);
  CHECK(back.schema[1].name == "ts");
  CHECK(back.schema[1].type == wire::kInt64);
  CHECK(back.schema[1].repetition == wire::kOptional);
  CHECK(back.schema[2].converted_type == wire::kUtf8);
  REQUIRE(back.row_groups.size() == 1);
  REQUIRE(back.row_groups[0].columns.size() == 1);
  const auto& mm = back.row_groups[0].columns[0].meta_data;
  REQUIRE(mm.has_value());
  CHECK(mm->codec == wire::kGzip);
  CHECK(mm->num_values == 42);
  CHECK(mm->path_in_schema == std::vector<std::string>{"ts"});
  CHECK(mm->dictionary_page_offset == 2);
  CHECK(back.created_by == "probe");
}

TEST_CASE("thrift page header round trip") {
  wire::PageHeader h;
  h.type = wire::kDataPage;
  h.uncompressed_page_size = 99;
  h.compressed_page_size = 55;
  wire::DataPageHeader dh;
  dh.num_values = 10;
  dh.encoding = wire::kPlain;
  h.data_page_header = dh;

  std::string bytes = thrift::encode_page_header(h);
  size_t consumed = 0;
  wire::PageHeader back = thrift::decode_page_header(
      reinterpret_cast<const uint8_t*>(bytes.data()), bytes.size(), consumed);
  CHECK(consumed == bytes.size());
  CHECK(back.type == wire::kDataPage);
  CHECK(back.uncompressed_page_size == 99);
  CHECK(back.compressed_page_size == 55);
  REQUIRE(back.data_page_header.has_value());
  CHECK(back.data_page_header->num_values == 10);
}

TEST_CASE("write and read round trip across all physical types") {
  Table t;
  t.num_rows = 5;

  Column b;
  b.name = "flag";
  b.type = PhysicalType::Boolean;
  b.defined = {1, 1, 0, 1, 1};
  b.ints = {1, 0, 0, 1, 0};
  t.columns.push_back(b);

  Column i32;
  i32.name = "small";
  i32.type = PhysicalType::Int32;
  i32.defined = {1, 1, 1, 1, 1};
  i32.ints = {-1, 0, 1, 2147483647, -2147483648LL};
  t.columns.push_back(i32);

  t.columns.push_back(make_int64("ts", {0, -5, 1717610705000000LL, 7, 8},
                                 {1, 1, 1, 0, 1}));

  Column f;
  f.name = "ratio32";
  f.type = PhysicalType::Float;
  f.defined = {1, 0, 1, 1, 1};
  f.doubles = {0.5, 0.0, -1.25, 3.0, 100.0};
  t.columns.push_back(f);

  t.columns.push_back(make_double("value", {0.1, -2.5, 1e308, 0.0, -0.0}));
  t.columns.push_back(make_string("msg", {"a", "", "hello world", "\x01\x02", "z"},
                                  {1, 1, 1, 1, 0}));

  const std::string path = temp_path("orca_parquet_roundtrip.parquet");
  write_table(path, t);
  Table back = read_table(path);

  // Nulls zero out value slots on read; normalize expectations the same way.
  t.columns[0].ints[2] = 0;
  t.columns[2].ints[3] = 0;
  t.columns[3].doubles[1] = 0.0;
  t.columns[5].strings[4].clear();
  check_tables_equal(t, back);
  CHECK(back.find("ts") != nullptr);
  CHECK(back.find("nope") == nullptr);
  std::remove(path.c_str());
}

TEST_CASE("multi page files reassemble in order") {
  const size_t n = 1000;
  std::vector<int64_t> vals;
  std::vector<uint8_t> defined;
  for (size_t i = 0; i < n; ++i) {
    vals.push_back(static_cast<int64_t>(i) * 3 - 500);
    defined.push_back(i % 7 == 0 ? 0 : 1);
  }
  Table t;
  t.num_rows = static_cast<int64_t>(n);
  t.columns.push_back(make_int64("v", vals, defined));

  const std::string path = temp_path("orca_parquet_pages.parquet");
  WriteOptions opts;
  opts.page_rows = 64;
  write_table(path, t, opts);
  Table back = read_table(path);
  REQUIRE(back.num_rows == static_cast<int64_t>(n));
  const Column* col = back.find("v");
  REQUIRE(col != nullptr);
  for (size_t i = 0; i < n; ++i) {
    CHECK(col->defined[i] == defined[i]);
    if (defined[i]) CHECK(col->ints[i] == vals[i]);
  }
  std::remove(path.c_str());
}

TEST_CASE("compression codecs round trip when available") {
  std::vector<int64_t> vals;
  std::vector<std::string> text;
  for (int i = 0; i < 400; ++i) {
    vals.push_back(i % 10);
    text.push_back("repetitive payload " + std::to_string(i % 5));
  }
  Table t;
  t.num_rows = 400;
  t.columns.push_back(make_int64("v", vals));
  t.columns.push_back(make_string("s", text));

  for (Codec codec : {Codec::Gzip, Codec::Snappy, Codec::Zstd, Codec::Lz4Raw}) {
    CAPTURE(codec_name(codec));
    if (!codec_can_write(codec)) continue;
    const std::string path = temp_path("orca_parquet_codec.parquet");
    WriteOptions opts;
    opts.codec = codec;
    write_table(path, t, opts);
    Table back = read_table(path);
    check_tables_equal(t, back);
    std::remove(path.c_str());
  }
}

TEST_CASE("gzip codec always available and inverse") {
  std::string payload(10000, 'x');
  for (size_t i = 0; i < payload.size(); i += 7) payload[i] = char('a' + i % 13);
  CHECK(codec_can_read(Codec::Gzip));
  CHECK(codec_can_write(Codec::Gzip));
  std::string packed = codec_compress(Codec::Gzip, payload);
  CHECK(packed.size() < payload.size());
  CHECK(codec_decompress(Codec::Gzip, packed, payload.size()) == payload);
}

TEST_CASE("reader rejects structurally broken files") {
  const std::string path = temp_path("orca_parquet_broken.parquet");

  SUBCASE("missing file") {
    std::remove(path.c_str());
    CHECK_THROWS_WITH_AS(read_table(path), doctest::Contains("cannot open"),
                         Error);
  }
  SUBCASE("bad magic") {
    std::ofstream(path, std::ios::binary) << "NOTPARQUETDATA";
    CHECK_THROWS_WITH_AS(read_table(path), doctest::Contains("not a parquet"),
                         Error);
    std::remove(path.c_str());
  }
  SUBCASE("truncated footer") {
    Table t;
    t.num_rows = 3;
    t.columns.push_back(make_int64("v", {1, 2, 3}));
    write_table(path, t);
    std::error_code ec;
    auto size = std::filesystem::file_size(path, ec);
    REQUIRE(!ec);
    std::filesystem::resize_file(path, size - 6, ec);
    REQUIRE(!ec);
    CHECK_THROWS_AS(read_table(path), Error);
    std::remove(path.c_str());
  }
  SUBCASE("metadata length out of range") {
    std::string blob = "PAR1";
    blob += std::string(4, '\xFF');
    blob += "PAR1";
    std::ofstream(path, std::ios::binary) << blob;
    CHECK_THROWS_AS(read_table(path), Error);
    std::remove(path.c_str());
  }
}

TEST_CASE("writer validates input tables") {
  Table t;
  t.num_rows = 2;
  t.columns.push_back(make_int64("a", {1, 2}));
  t.columns.push_back(make_int64("a", {3, 4}));
  CHECK_THROWS_WITH_AS(write_table(temp_path("dup.parquet"), t),
                       doctest::Contains("duplicate"), Error);

  Table mismatch;
  mismatch.num_rows = 2;
  mismatch.columns.push_back(make_int64("a", {1, 2}));
  mismatch.columns.push_back(make_int64("b", {3}));
  CHECK_THROWS_WITH_AS(write_table(temp_path("mismatch.parquet"), mismatch),
                       doctest::Contains("row count"), Error);
}

TEST_CASE("relaxed column lookup ignores case and separator style") {
  Table t;
  t.num_rows = 1;
  t.columns.push_back(make_int64("Start.Time", {1}));
  CHECK(t.find("Start.Time") != nullptr);
  CHECK(t.find("start_time") == nullptr);
  CHECK(t.find_relaxed("start_time") != nullptr);
  CHECK(t.find_relaxed("START-TIME") != nullptr);
  CHECK(t.find_relaxed("starttime") == nullptr);
}

TEST_CASE("codec names map both directions") {
  for (Codec c : {Codec::Uncompressed, Codec::Snappy, Codec::Gzip, Codec::Brotli,
                  Codec::Lz4Raw, Codec::Zstd}) {
    auto parsed = codec_from_name(codec_name(c));
    REQUIRE(parsed.has_value());
    CHECK(*parsed == c);
  }
  CHECK(!codec_from_name("bzip2").has_value());
  CHECK(codec_from_name("lz4") == Codec::Lz4Raw);
}

TEST_CASE("empty tables write and read") {
  Table t;
  t.num_rows = 0;
  t.columns.push_back(make_int64("v", {}));
  const std::string path = temp_path("orca_parquet_empty.parquet");
  write_table(path, t);
  Table back = read_table(path);
  CHECK(back.num_rows == 0);
  REQUIRE(back.columns.size() == 1);
  CHECK(back.columns[0].num_rows() == 0);
  std::remove(path.c_str());
}
