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

#include "parquet/rle.hpp"

#include <algorithm>

#include "orca/errors.hpp"

namespace orca::parquet {

namespace {

[[noreturn]] void fail(const char* msg) {
  throw Error(ErrorCode::FileNotReadable, std::string("parquet rle: ") + msg);
}

uint64_t read_varint(const uint8_t*& p, const uint8_t* end) {
  uint64_t v = 0;
  int shift = 0;
  while (p < end) {
    uint8_t b = *p++;
    v |= static_cast<uint64_t>(b & 0x7F) << shift;
    if ((b & 0x80) == 0) return v;
    shift += 7;
    if (shift > 63) break;
  }
  fail("truncated run header");
}

void write_varint(std::string& out, uint64_t v) {
  while (v >= 0x80) {
    out.push_back(static_cast<char>((v & 0x7F) | 0x80));
    v >>= 7;
  }
  out.push_back(static_cast<char>(v));
}

void flush_literals(std::string& out, std::vector<uint32_t>& lits, int bit_width) {
  if (lits.empty()) return;
  while (lits.size() % 8 != 0) lits.push_back(0);
  size_t groups = lits.size() / 8;
  write_varint(out, (groups << 1) | 1);
  uint64_t acc = 0;
  int nbits = 0;
  for (uint32_t v : lits) {
    acc |= static_cast<uint64_t>(v) << nbits;
    nbits += bit_width;
    while (nbits >= 8) {
      out.push_back(static_cast<char>(acc & 0xFF));
      acc >>= 8;
      nbits -= 8;
    }
  }
  lits.clear();
}

}  // namespace

int bit_width_for(uint32_t max_value) {
  int w = 0;
  while (max_value != 0) {
    ++w;
    max_value >>= 1;
  }
  return w;
}

std::vector<uint32_t> rle_decode(const uint8_t* data, size_t size, int bit_width,
                                 size_t count) {
  if (bit_width < 0 || bit_width > 32) fail("unsupported bit width");
  std::vector<uint32_t> out;
  out.reserve(count);
  const uint8_t* p = data;
  const uint8_t* end = data + size;
  const int byte_width = (bit_width + 7) / 8;
  const uint64_t mask = bit_width == 0 ? 0 : (uint64_t{1} << bit_width) - 1;
  while (out.size() < count) {
    uint64_t header = read_varint(p, end);
    if (header & 1) {
      size_t groups = static_cast<size_t>(header >> 1);
      size_t nbytes = groups * static_cast<size_t>(bit_width);
      if (static_cast<size_t>(end - p) < nbytes) fail("truncated literal run");
      const uint8_t* run_start = p;
      uint64_t acc = 0;
      int nbits = 0;
      size_t want = std::min(groups * 8, count - out.size());
      for (size_t i = 0; i < want; ++i) {
        while (nbits < bit_width) {
          acc |= static_cast<uint64_t>(*p++) << nbits;
          nbits += 8;
        }
        out.push_back(static_cast<uint32_t>(acc & mask));
        acc >>= bit_width;
        nbits -= bit_width;
      }
      p = run_start + nbytes;
    } else {
      size_t repeat = static_cast<size_t>(header >> 1);
      if (static_cast<size_t>(end - p) < static_cast<size_t>(byte_width))
        fail("truncated repeated run");
      uint64_t value = 0;
      for (int i = 0; i < byte_width; ++i)
        value |= static_cast<uint64_t>(p[i]) << (8 * i);
      p += byte_width;
      size_t take = std::min(repeat, count - out.size());
      out.insert(out.end(), take, static_cast<uint32_t>(value & mask));
    }
  }
  return out;
}

std::string rle_encode(const std::vector<uint32_t>& values, int bit_width) {
  if (bit_width < 0 || bit_width > 32)
    throw Error(ErrorCode::Internal, "parquet rle: unsupported bit width");
  std::string out;
  const int byte_width = (bit_width + 7) / 8;
  std::vector<uint32_t> lits;
  size_t i = 0;
  const size_t n = values.size();
  while (i < n) {
    size_t run = 1;
    while (i + run < n && values[i + run] == values[i]) ++run;
    if (run >= 8 && lits.size() % 8 == 0) {
      flush_literals(out, lits, bit_width);
      write_varint(out, run << 1);
      uint64_t v = values[i];
      for (int b = 0; b < byte_width; ++b)
        out.push_back(static_cast<char>((v >> (8 * b)) & 0xFF));
      i += run;
    } else {
      lits.push_back(values[i]);
      ++i;
    }
  }
  flush_literals(out, lits, bit_width);
  if (out.empty()) {
    // Zero-length encodings confuse some readers; emit an empty repeated run.
    write_varint(out, 0);
    for (int b = 0; b < byte_width; ++b) out.push_back('\0');
  }
  return out;
}

}  // namespace orca::parquet
