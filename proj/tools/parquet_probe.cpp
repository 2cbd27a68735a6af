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

// Debugging and interop utility around the parquet layer.
//
//   parquet_probe dump <file>                     print file contents as JSON
//   parquet_probe roundtrip <in> <out> [codec]    read <in>, rewrite as <out>

#include <cstdio>
#include <iostream>
#include <string>

#include <json.hpp>

#include "orca/parquet/parquet.hpp"

namespace {

using orca::parquet::Column;
using orca::parquet::PhysicalType;
using orca::parquet::Table;

const char* type_name(PhysicalType t) {
  switch (t) {
    case PhysicalType::Boolean: return "boolean";
    case PhysicalType::Int32: return "int32";
    case PhysicalType::Int64: return "int64";
    case PhysicalType::Float: return "float";
    case PhysicalType::Double: return "double";
    case PhysicalType::ByteArray: return "byte_array";
  }
  return "unknown";
}

nlohmann::json column_to_json(const Column& col) {
  nlohmann::json values = nlohmann::json::array();
  for (size_t i = 0; i < col.num_rows(); ++i) {
    if (!col.defined[i]) {
      values.push_back(nullptr);
    } else if (col.type == PhysicalType::Boolean) {
      values.push_back(col.ints[i] != 0);
    } else if (col.is_integer()) {
      values.push_back(col.ints[i]);
    } else if (col.is_floating()) {
      values.push_back(col.doubles[i]);
    } else {
      values.push_back(col.strings[i]);
    }
  }
  return {{"name", col.name},
          {"type", type_name(col.type)},
          {"optional", col.optional},
          {"values", std::move(values)}};
}

int cmd_dump(const std::string& path) {
  Table table = orca::parquet::read_table(path);
  nlohmann::json out;
  out["num_rows"] = table.num_rows;
  out["warnings"] = table.warnings;
  out["columns"] = nlohmann::json::array();
  for (const auto& col : table.columns) out["columns"].push_back(column_to_json(col));
  std::cout << out.dump(2) << "\n";
  return 0;
}

int cmd_roundtrip(const std::string& in, const std::string& out,
                  const std::string& codec_name) {
  Table table = orca::parquet::read_table(in);
  orca::parquet::WriteOptions options;
  if (!codec_name.empty()) {
    auto codec = orca::parquet::codec_from_name(codec_name);
    if (!codec) {
      std::cerr << "unknown codec: " << codec_name << "\n";
      return 2;
    }
    options.codec = *codec;
  }
  orca::parquet::write_table(out, table, options);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    if (argc >= 3 && std::string(argv[1]) == "dump") {
      return cmd_dump(argv[2]);
    }
    if (argc >= 4 && std::string(argv[1]) == "roundtrip") {
      return cmd_roundtrip(argv[2], argv[3], argc >= 5 ? argv[4] : "");
    }
  } catch (const orca::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  std::cerr << "usage: parquet_probe dump <file>\n"
               "       parquet_probe roundtrip <in> <out> [codec]\n";
  return 2;
}
