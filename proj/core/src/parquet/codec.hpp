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

#include <string>
#include <string_view>

#include "orca/parquet/parquet.hpp"

namespace orca::parquet {

// Decompresses `input` to exactly `uncompressed_size` bytes. Throws
// Error(FileNotReadable) on codec failure or unavailable codec.
std::string codec_decompress(Codec codec, std::string_view input,
                             size_t uncompressed_size);

// Throws Error(InvalidConfig) when the codec has no compressor available.
std::string codec_compress(Codec codec, std::string_view input);

}  // namespace orca::parquet
