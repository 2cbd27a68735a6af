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

#include "parquet/codec.hpp"

#include <dlfcn.h>
#include <zlib.h>

#include <cstring>
#include <mutex>

#include "orca/errors.hpp"

// zlib is linked directly; snappy/zstd/lz4/brotli ship as runtime libraries
// without dev headers in typical images, so they are bound lazily via dlopen
// and degrade to "codec unavailable" when missing.

namespace orca::parquet {

namespace {

[[noreturn]] void read_fail(const std::string& msg) {
  throw Error(ErrorCode::FileNotReadable, "parquet codec: " + msg);
}

void* load_lib(const char* const* names) {
  for (const char* const* n = names; *n; ++n) {
    if (void* h = dlopen(*n, RTLD_NOW | RTLD_GLOBAL)) return h;
  }
  return nullptr;
}

// --- snappy (C bindings) ---
struct SnappyApi {
  int (*compress)(const char*, size_t, char*, size_t*) = nullptr;
  int (*uncompress)(const char*, size_t, char*, size_t*) = nullptr;
  size_t (*max_compressed_length)(size_t) = nullptr;

  static const SnappyApi& get() {
    static SnappyApi api = [] {
      SnappyApi a;
      static const char* names[] = {"libsnappy.so.1", "libsnappy.so", nullptr};
      if (void* h = load_lib(names)) {
        a.compress = reinterpret_cast<decltype(a.compress)>(dlsym(h, "snappy_compress"));
        a.uncompress =
            reinterpret_cast<decltype(a.uncompress)>(dlsym(h, "snappy_uncompress"));
        a.max_compressed_length = reinterpret_cast<decltype(a.max_compressed_length)>(
            dlsym(h, "snappy_max_compressed_length"));
      }
      return a;
    }();
    return api;
  }
  bool ok() const { return compress && uncompress && max_compressed_length; }
};

// --- zstd ---
struct ZstdApi {
  size_t (*compress)(void*, size_t, const void*, size_t, int) = nullptr;
  size_t (*decompress)(void*, size_t, const void*, size_t) = nullptr;
  size_t (*compress_bound)(size_t) = nullptr;
  unsigned (*is_error)(size_t) = nullptr;

  static const ZstdApi& get() {
    static ZstdApi api = [] {
      ZstdApi a;
      static const char* names[] = {"libzstd.so.1", "libzstd.so", nullptr};
      if (void* h = load_lib(names)) {
        a.compress = reinterpret_cast<decltype(a.compress)>(dlsym(h, "ZSTD_compress"));
        a.decompress =
            reinterpret_cast<decltype(a.decompress)>(dlsym(h, "ZSTD_decompress"));
        a.compress_bound =
            reinterpret_cast<decltype(a.compress_bound)>(dlsym(h, "ZSTD_compressBound"));
        a.is_error = reinterpret_cast<decltype(a.is_error)>(dlsym(h, "ZSTD_isError"));
      }
      return a;
    }();
    return api;
  }
  bool ok() const { return compress && decompress && compress_bound && is_error; }
};

// --- lz4 (raw block format) ---
struct Lz4Api {
  int (*compress_default)(const char*, char*, int, int) = nullptr;
  int (*decompress_safe)(const char*, char*, int, int) = nullptr;
  int (*compress_bound)(int) = nullptr;

  static const Lz4Api& get() {
    static Lz4Api api = [] {
      Lz4Api a;
      static const char* names[] = {"liblz4.so.1", "liblz4.so", nullptr};
      if (void* h = load_lib(names)) {
        a.compress_default = reinterpret_cast<decltype(a.compress_default)>(
            dlsym(h, "LZ4_compress_default"));
        a.decompress_safe = reinterpret_cast<decltype(a.decompress_safe)>(
            dlsym(h, "LZ4_decompress_safe"));
        a.compress_bound =
            reinterpret_cast<decltype(a.compress_bound)>(dlsym(h, "LZ4_compressBound"));
      }
      return a;
    }();
    return api;
  }
  bool ok() const { return compress_default && decompress_safe && compress_bound; }
};

// --- brotli (decoder only; parquet writers rarely emit it and we never do) ---
struct BrotliApi {
  // BROTLI_DECODER_RESULT_SUCCESS == 1
  int (*decompress)(size_t, const uint8_t*, size_t*, uint8_t*) = nullptr;

  static const BrotliApi& get() {
    static BrotliApi api = [] {
      BrotliApi a;
      static const char* names[] = {"libbrotlidec.so.1", "libbrotlidec.so", nullptr};
      if (void* h = load_lib(names)) {
        a.decompress =
            reinterpret_cast<decltype(a.decompress)>(dlsym(h, "BrotliDecoderDecompress"));
      }
      return a;
    }();
    return api;
  }
  bool ok() const { return decompress != nullptr; }
};

std::string gzip_decompress(std::string_view in, size_t out_size) {
  std::string out(out_size, '\0');
  z_stream strm{};
  // 15+32: accept both gzip- and zlib-wrapped streams
  if (inflateInit2(&strm, 15 + 32) != Z_OK) read_fail("inflateInit failed");
  strm.next_in = reinterpret_cast<Bytef*>(const_cast<char*>(in.data()));
  strm.avail_in = static_cast<uInt>(in.size());
  strm.next_out = reinterpret_cast<Bytef*>(out.data());
  strm.avail_out = static_cast<uInt>(out.size());
  int rc = inflate(&strm, Z_FINISH);
  inflateEnd(&strm);
  if (rc != Z_STREAM_END) read_fail("gzip inflate failed");
  out.resize(out.size() - strm.avail_out);
  return out;
}

std::string gzip_compress(std::string_view in) {
  z_stream strm{};
  // 15+16: emit a gzip wrapper, which is what the parquet GZIP codec means
  if (deflateInit2(&strm, Z_DEFAULT_COMPRESSION, Z_DEFLATED, 15 + 16, 8,
                   Z_DEFAULT_STRATEGY) != Z_OK) {
    throw Error(ErrorCode::Internal, "deflateInit failed");
  }
  std::string out(deflateBound(&strm, static_cast<uLong>(in.size())), '\0');
  strm.next_in = reinterpret_cast<Bytef*>(const_cast<char*>(in.data()));
  strm.avail_in = static_cast<uInt>(in.size());
  strm.next_out = reinterpret_cast<Bytef*>(out.data());
  strm.avail_out = static_cast<uInt>(out.size());
  int rc = deflate(&strm, Z_FINISH);
  deflateEnd(&strm);
  if (rc != Z_STREAM_END) throw Error(ErrorCode::Internal, "gzip deflate failed");
  out.resize(out.size() - strm.avail_out);
  return out;
}

}  // namespace

std::string_view codec_name(Codec codec) {
  switch (codec) {
    case Codec::Uncompressed: return "uncompressed";
    case Codec::Snappy: return "snappy";
    case Codec::Gzip: return "gzip";
    case Codec::Brotli: return "brotli";
    case Codec::Lz4Raw: return "lz4_raw";
    case Codec::Zstd: return "zstd";
  }
  return "unknown";
}

std::optional<Codec> codec_from_name(std::string_view name) {
  if (name == "uncompressed" || name == "none") return Codec::Uncompressed;
  if (name == "snappy") return Codec::Snappy;
  if (name == "gzip") return Codec::Gzip;
  if (name == "brotli") return Codec::Brotli;
  if (name == "lz4_raw" || name == "lz4") return Codec::Lz4Raw;
  if (name == "zstd") return Codec::Zstd;
  return std::nullopt;
}

bool codec_can_read(Codec codec) {
  switch (codec) {
    case Codec::Uncompressed:
    case Codec::Gzip:
      return true;
    case Codec::Snappy: return SnappyApi::get().ok();
    case Codec::Zstd: return ZstdApi::get().ok();
    case Codec::Lz4Raw: return Lz4Api::get().ok();
    case Codec::Brotli: return BrotliApi::get().ok();
  }
  return false;
}

bool codec_can_write(Codec codec) {
  if (codec == Codec::Brotli) return false;
  return codec_can_read(codec);
}

std::string codec_decompress(Codec codec, std::string_view input,
                             size_t uncompressed_size) {
  switch (codec) {
    case Codec::Uncompressed:
      return std::string(input);
    case Codec::Gzip:
      return gzip_decompress(input, uncompressed_size);
    case Codec::Snappy: {
      const auto& api = SnappyApi::get();
      if (!api.ok()) read_fail("snappy library not available");
      std::string out(uncompressed_size, '\0');
      size_t out_len = uncompressed_size;
      if (api.uncompress(input.data(), input.size(), out.data(), &out_len) != 0 ||
          out_len != uncompressed_size) {
        read_fail("snappy decompression failed");
      }
      return out;
    }
    case Codec::Zstd: {
      const auto& api = ZstdApi::get();
      if (!api.ok()) read_fail("zstd library not available");
      std::string out(uncompressed_size, '\0');
      size_t rc = api.decompress(out.data(), out.size(), input.data(), input.size());
      if (api.is_error(rc) || rc != uncompressed_size) read_fail("zstd decompression failed");
      return out;
    }
    case Codec::Lz4Raw: {
      const auto& api = Lz4Api::get();
      if (!api.ok()) read_fail("lz4 library not available");
      std::string out(uncompressed_size, '\0');
      int rc = api.decompress_safe(input.data(), out.data(),
                                   static_cast<int>(input.size()),
                                   static_cast<int>(out.size()));
      if (rc < 0 || static_cast<size_t>(rc) != uncompressed_size) {
        read_fail("lz4 decompression failed");
      }
      return out;
    }
    case Codec::Brotli: {
      const auto& api = BrotliApi::get();
      if (!api.ok()) read_fail("brotli library not available");
      std::string out(uncompressed_size, '\0');
      size_t out_len = uncompressed_size;
      if (api.decompress(input.size(),
                         reinterpret_cast<const uint8_t*>(input.data()), &out_len,
                         reinterpret_cast<uint8_t*>(out.data())) != 1 ||
          out_len != uncompressed_size) {
        read_fail("brotli decompression failed");
      }
      return out;
    }
  }
  read_fail("unknown codec");
}

std::string codec_compress(Codec codec, std::string_view input) {
  switch (codec) {
    case Codec::Uncompressed:
      return std::string(input);
    case Codec::Gzip:
      return gzip_compress(input);
    case Codec::Snappy: {
      const auto& api = SnappyApi::get();
      if (!api.ok())
        throw Error(ErrorCode::InvalidConfig, "snappy compressor not available");
      std::string out(api.max_compressed_length(input.size()), '\0');
      size_t out_len = out.size();
      if (api.compress(input.data(), input.size(), out.data(), &out_len) != 0)
        throw Error(ErrorCode::Internal, "snappy compression failed");
      out.resize(out_len);
      return out;
    }
    case Codec::Zstd: {
      const auto& api = ZstdApi::get();
      if (!api.ok())
        throw Error(ErrorCode::InvalidConfig, "zstd compressor not available");
      std::string out(api.compress_bound(input.size()), '\0');
      size_t rc = api.compress(out.data(), out.size(), input.data(), input.size(), 3);
      if (api.is_error(rc)) throw Error(ErrorCode::Internal, "zstd compression failed");
      out.resize(rc);
      return out;
    }
    case Codec::Lz4Raw: {
      const auto& api = Lz4Api::get();
      if (!api.ok())
        throw Error(ErrorCode::InvalidConfig, "lz4 compressor not available");
      std::string out(api.compress_bound(static_cast<int>(input.size())), '\0');
      int rc = api.compress_default(input.data(), out.data(),
                                    static_cast<int>(input.size()),
                                    static_cast<int>(out.size()));
      if (rc <= 0) throw Error(ErrorCode::Internal, "lz4 compression failed");
      out.resize(static_cast<size_t>(rc));
      return out;
    }
    case Codec::Brotli:
      throw Error(ErrorCode::InvalidConfig, "brotli compressor not available");
  }
  throw Error(ErrorCode::InvalidConfig, "unknown codec");
}

}  // namespace orca::parquet
