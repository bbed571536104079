#include "tsawf/cbd.hpp"

#include <zlib.h>

#include <string>
#include <vector>

#include "tsawf/error.hpp"
#include "tsawf/sax.hpp"

namespace tsawf {

namespace {

class Deflater {
 public:
  Deflater() {
    if (deflateInit2(&stream_, 6, Z_DEFLATED, -15, 8, Z_DEFAULT_STRATEGY) != Z_OK)
      fail(Errc::InvariantViolation, "deflateInit2 failed");
  }
  ~Deflater() { deflateEnd(&stream_); }
  Deflater(const Deflater&) = delete;
  Deflater& operator=(const Deflater&) = delete;

  std::size_t size(std::string_view text) {
    deflateReset(&stream_);
    buffer_.resize(deflateBound(&stream_, static_cast<uLong>(text.size())));
    stream_.next_in = reinterpret_cast<Bytef*>(const_cast<char*>(text.data()));
    stream_.avail_in = static_cast<uInt>(text.size());
    stream_.next_out = buffer_.data();
    stream_.avail_out = static_cast<uInt>(buffer_.size());
    if (deflate(&stream_, Z_FINISH) != Z_STREAM_END) fail(Errc::InvariantViolation, "deflate did not finish");
    return buffer_.size() - stream_.avail_out;
  }

 private:
  z_stream stream_{};
  std::vector<Bytef> buffer_;
};

std::string encode(std::span<const double> a, const CbdParams& p) {
  const std::size_t w = p.word_length ? p.word_length : default_sax_word_length(a.size());
  return sax_encode(a, w, p.alphabet);
}

}  // namespace

std::size_t compressed_size(std::string_view text) {
  thread_local Deflater deflater;
  return deflater.size(text);
}

double cbd_symbols(std::string_view x, std::string_view y) {
  std::string xy;
  xy.reserve(x.size() + y.size());
  xy.append(x).append(y);
  const double cx = static_cast<double>(compressed_size(x));
  const double cy = static_cast<double>(compressed_size(y));
  return static_cast<double>(compressed_size(xy)) / (cx + cy);
}

double cbd(std::span<const double> a, std::span<const double> b, const CbdParams& params) {
  if (a.empty() || b.empty()) fail(Errc::InvalidLength, "cbd on an empty sequence");
  return cbd_symbols(encode(a, params), encode(b, params));
}

double cbd_symmetric(std::span<const double> a, std::span<const double> b, const CbdParams& params) {
  if (a.empty() || b.empty()) fail(Errc::InvalidLength, "cbd on an empty sequence");
  const std::string x = encode(a, params), y = encode(b, params);
  return 0.5 * (cbd_symbols(x, y) + cbd_symbols(y, x));
}

}  // namespace tsawf
