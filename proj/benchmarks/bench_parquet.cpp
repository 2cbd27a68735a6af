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

#include <benchmark/benchmark.h>

#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

#include "orca/parquet/parquet.hpp"

namespace {

using orca::parquet::Column;
using orca::parquet::PhysicalType;
using orca::parquet::Table;

Table sample_table(int64_t rows) {
  Table t;
  t.num_rows = rows;
  Column ts;
  ts.name = "timestamp";
  ts.type = PhysicalType::Int64;
  Column value;
  value.name = "value";
  value.type = PhysicalType::Double;
  Column name;
  name.name = "component";
  name.type = PhysicalType::ByteArray;
  for (int64_t i = 0; i < rows; ++i) {
    ts.defined.push_back(1);
    ts.ints.push_back(1717610705000000LL + i * 1000);
    value.defined.push_back(1);
    value.doubles.push_back(static_cast<double>(i % 997) * 0.25);
    name.defined.push_back(1);
    name.strings.push_back("cartservice-" + std::to_string(i % 3));
  }
  t.columns.push_back(std::move(ts));
  t.columns.push_back(std::move(value));
  t.columns.push_back(std::move(name));
  return t;
}

std::string bench_path() {
  return (std::filesystem::temp_directory_path() / "orca_bench.parquet").string();
}

void BM_ParquetWrite(benchmark::State& state) {
  Table t = sample_table(state.range(0));
  const std::string path = bench_path();
  for (auto _ : state) {
    orca::parquet::write_table(path, t);
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
  std::remove(path.c_str());
}
BENCHMARK(BM_ParquetWrite)->Arg(10000)->Arg(100000);

void BM_ParquetRead(benchmark::State& state) {
  Table t = sample_table(state.range(0));
  const std::string path = bench_path();
  orca::parquet::write_table(path, t);
  for (auto _ : state) {
    Table back = orca::parquet::read_table(path);
    benchmark::DoNotOptimize(back);
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
  std::remove(path.c_str());
}
BENCHMARK(BM_ParquetRead)->Arg(10000)->Arg(100000);

}  // namespace

BENCHMARK_MAIN();
