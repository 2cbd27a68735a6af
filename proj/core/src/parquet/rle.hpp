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

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace orca::parquet {

// RLE / bit-packed hybrid encoding, as used for definition levels and
// dictionary indices. Runs start with a varint header: even headers are
// repeated runs (count = header >> 1, value in ceil(bit_width/8) bytes LE),
// odd headers are literal runs of (header >> 1) groups of 8 values packed
// LSB first.

std::vector<uint32_t> rle_decode(const uint8_t* data, size_t size, int bit_width,
                                 size_t count);

std::string rle_encode(const std::vector<uint32_t>& values, int bit_width);

// Minimum number of bits needed to represent values in [0, max_value].
int bit_width_for(uint32_t max_value);

}  // namespace orca::parquet
