#pragma once

#include <cstddef>
#include <span>
#include <string_view>

namespace tsawf {

struct CbdParams {
  /// 0 selects default_sax_word_length of each input.
  std::size_t word_length = 0;
  std::size_t alphabet = 8;
};

/// Byte length of the raw-deflate (zlib, level 6) compression of `text`.
/// Uses a per-thread reusable stream.
std::size_t compressed_size(std::string_view text);

/// Compression-based dissimilarity of two symbol strings: C(x+y) / (C(x) + C(y)).
double cbd_symbols(std::string_view x, std::string_view y);

/// SAX-encode both series, then cbd_symbols. Order-dependent.
double cbd(std::span<const double> a, std::span<const double> b, const CbdParams& params = {});

/// Mean of both concatenation orders.
double cbd_symmetric(std::span<const double> a, std::span<const double> b, const CbdParams& params = {});

}  // namespace tsawf
