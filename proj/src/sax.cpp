#include "tsawf/sax.hpp"

#include <boost/math/distributions/normal.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <mutex>

#include "tsawf/error.hpp"

namespace tsawf {

const std::vector<double>& sax_breakpoints(std::size_t alphabet) {
  if (alphabet < 2 || alphabet > 26) fail(Errc::InvalidConfig, "SAX alphabet must be in [2, 26]");
  static std::array<std::vector<double>, 27> table;
  static std::once_flag once;
  std::call_once(once, [] {
    const boost::math::normal_distribution<double> unit;
    for (std::size_t a = 2; a <= 26; ++a) {
      for (std::size_t i = 1; i < a; ++i)
        table[a].push_back(boost::math::quantile(unit, static_cast<double>(i) / static_cast<double>(a)));
    }
  });
  return table[alphabet];
}

std::size_t default_sax_word_length(std::size_t m) { return std::min(m, std::max<std::size_t>(4, m / 8)); }

std::string sax_encode(std::span<const double> a, std::size_t word_length, std::size_t alphabet) {
  if (word_length < 1) fail(Errc::InvalidConfig, "SAX word length must be >= 1");
  const auto& breaks = sax_breakpoints(alphabet);
  if (a.empty()) fail(Errc::InvalidLength, "SAX encoding of an empty series");
  const std::size_t n = a.size();
  const std::size_t w = std::min(word_length, n);

  long double sum = 0.0L, sumsq = 0.0L;
  for (double v : a) {
    sum += v;
    sumsq += static_cast<long double>(v) * v;
  }
  const long double mean = sum / static_cast<long double>(n);
  long double var = 0.0L;
  for (double v : a) var += (v - mean) * (v - mean);
  var /= static_cast<long double>(n);
  if (var <= 1e-12L * std::max(1.0L, sumsq / static_cast<long double>(n)))
    return std::string(w, static_cast<char>('a' + alphabet / 2));
  const long double sd = std::sqrt(var);

  std::string word(w, 'a');
  for (std::size_t j = 0; j < w; ++j) {
    const std::size_t lo = j * n / w;
    const std::size_t hi = (j + 1) * n / w;
    long double seg = 0.0L;
    for (std::size_t i = lo; i < hi; ++i) seg += (a[i] - mean) / sd;
    const double v = static_cast<double>(seg / static_cast<long double>(hi - lo));
    const auto bin = std::upper_bound(breaks.begin(), breaks.end(), v) - breaks.begin();
    word[j] = static_cast<char>('a' + bin);
  }
  return word;
}

}  // namespace tsawf
