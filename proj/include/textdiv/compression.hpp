#pragma once

// Compression-ratio diversity: size(D+) / compressed size(D+). Higher means
// more redundant text.

#include <array>
#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include <zlib.h>

#if defined(TEXTDIV_HAVE_ZSTD)
#include <zstd.h>
#endif

#include "textdiv/corpus.hpp"
#include "textdiv/error.hpp"
#include "textdiv/pos_tagger.hpp"

namespace textdiv {

enum class Compressor { DeflateGzip, Zstd };

struct CompressionConfig {
  Compressor algorithm = Compressor::DeflateGzip;
  int level = 6;
  /// gzip only: write a fixed 10-byte header (mtime 0, no name, OS 255)
  /// instead of zlib's platform-dependent one.
  bool fixed_header = true;
};

inline std::string_view compressor_name(Compressor c) {
  return c == Compressor::Zstd ? "zstd" : "gzip";
}

inline Compressor parse_compressor(std::string_view name) {
  if (name == "gzip" || name == "deflate" || name == "deflate-gzip") return Compressor::DeflateGzip;
  if (name == "zstd") return Compressor::Zstd;
  throw InputError("unknown compressor '" + std::string(name) + "'");
}

/// Whether this build can use zstd.
inline constexpr bool kHaveZstd =
#if defined(TEXTDIV_HAVE_ZSTD)
    true;
#else
    false;
#endif

namespace detail {

inline void put_le32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

inline std::vector<std::uint8_t> deflate_stream(std::string_view data, int level, int window_bits) {
  z_stream zs{};
  if (deflateInit2(&zs, level, Z_DEFLATED, window_bits, 8, Z_DEFAULT_STRATEGY) != Z_OK) {
    throw Error("deflateInit2 failed");
  }
  std::vector<std::uint8_t> out(deflateBound(&zs, static_cast<uLong>(data.size())));
  zs.next_in = reinterpret_cast<Bytef*>(const_cast<char*>(data.data()));
  zs.avail_in = static_cast<uInt>(data.size());
  zs.next_out = out.data();
  zs.avail_out = static_cast<uInt>(out.size());
  const int rc = deflate(&zs, Z_FINISH);
  const std::size_t written = zs.total_out;
  deflateEnd(&zs);
  if (rc != Z_STREAM_END) throw Error("deflate did not finish");
  out.resize(written);
  return out;
}

inline std::vector<std::uint8_t> gzip(std::string_view data, int level, bool fixed_header) {
  if (!fixed_header) return deflate_stream(data, level, 15 + 16);

  // RFC 1952 member: header, raw deflate body, CRC-32, input size mod 2^32.
  const std::uint8_t xfl = level == 9 ? 2 : (level == 1 ? 4 : 0);
  std::vector<std::uint8_t> out{0x1f, 0x8b, 0x08, 0x00, 0x00, 0x00, 0x00, 0x00, xfl, 0xff};
  const std::vector<std::uint8_t> body = deflate_stream(data, level, -15);
  out.insert(out.end(), body.begin(), body.end());
  const uLong crc = crc32(crc32(0L, Z_NULL, 0), reinterpret_cast<const Bytef*>(data.data()),
                          static_cast<uInt>(data.size()));
  put_le32(out, static_cast<std::uint32_t>(crc));
  put_le32(out, static_cast<std::uint32_t>(data.size()));
  return out;
}

}  // namespace detail

/// Compressed bytes of `data`. Deterministic for a given config.
inline std::vector<std::uint8_t> compress(std::string_view data, const CompressionConfig& config = {}) {
  switch (config.algorithm) {
    case Compressor::DeflateGzip:
      if (config.level < 0 || config.level > 9) throw PreconditionError("gzip level must be in [0, 9]");
      return detail::gzip(data, config.level, config.fixed_header);
    case Compressor::Zstd:
#if defined(TEXTDIV_HAVE_ZSTD)
    {
      std::vector<std::uint8_t> out(ZSTD_compressBound(data.size()));
      const std::size_t n = ZSTD_compress(out.data(), out.size(), data.data(), data.size(), config.level);
      if (ZSTD_isError(n)) throw Error(std::string("zstd: ") + ZSTD_getErrorName(n));
      out.resize(n);
      return out;
    }
#else
      throw UnsupportedError("this build has no zstd support");
#endif
  }
  throw UnsupportedError("unknown compressor");
}

/// Ratio for an arbitrary byte string.
inline double compression_ratio(std::string_view data, const CompressionConfig& config = {}) {
  if (data.empty()) throw PreconditionError("cannot compute a compression ratio of empty input");
  return static_cast<double>(data.size()) / static_cast<double>(compress(data, config).size());
}

/// CR(D) over the newline-joined documents.
inline double compression_ratio(const Corpus& corpus, const CompressionConfig& config = {}) {
  return compression_ratio(concat(corpus), config);
}

/// Tags of each document joined by spaces, documents joined by newlines.
inline std::string pos_stream(const Corpus& corpus, const Tagger& tagger) {
  if (corpus.empty()) throw PreconditionError("POS stream requires a non-empty corpus");
  std::string out;
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    if (i) out += '\n';
    const std::vector<std::string> tags = tags_for(corpus[i], tagger);
    for (std::size_t t = 0; t < tags.size(); ++t) {
      if (t) out += ' ';
      out += tags[t];
    }
  }
  return out;
}

/// CR:POS, the compression ratio of the tag stream.
inline double pos_compression_ratio(const Corpus& corpus, const Tagger& tagger,
                                    const CompressionConfig& config = {}) {
  return compression_ratio(pos_stream(corpus, tagger), config);
}

/// Below this many bytes the container overhead dominates the ratio.
inline constexpr std::size_t kTinyInputBytes = 1024;

}  // namespace textdiv
