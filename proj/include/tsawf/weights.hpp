#pragma once

#include <cstddef>
#include <string_view>
#include <vector>

namespace tsawf {

/// Position weighting for weighted euclidean distance. All schemes favour the
/// start of a trace, where most of the identifying signal lives.
enum class WeightScheme { Exponential, Linear, Logarithmic, ReflectedLogarithmic };

std::string_view weight_scheme_name(WeightScheme s);
WeightScheme parse_weight_scheme(std::string_view s);

struct WeightVector {
  WeightScheme scheme = WeightScheme::ReflectedLogarithmic;
  std::vector<double> values;
};

/// For positions k = 1..l (S = l(l+1)/2):
///   Exponential           base^(k-1)
///   Linear                (l-k) / S
///   Logarithmic           log(l-k+1), normalized to sum 1
///   ReflectedLogarithmic  -log(k/S),  normalized to sum 1
/// The two logarithmic schemes are identically zero before normalization at
/// l = 1; that case yields [1].
WeightVector make_weights(WeightScheme scheme, std::size_t l, double exp_base = 0.5);

}  // namespace tsawf
