#include "tsawf/weights.hpp"

#include <cmath>
#include <string>

#include "tsawf/error.hpp"

namespace tsawf {

std::string_view weight_scheme_name(WeightScheme s) {
  switch (s) {
    case WeightScheme::Exponential: return "exponential";
    case WeightScheme::Linear: return "linear";
    case WeightScheme::Logarithmic: return "logarithmic";
    case WeightScheme::ReflectedLogarithmic: return "reflected_logarithmic";
  }
  return "?";
}

WeightScheme parse_weight_scheme(std::string_view s) {
  if (s == "exponential" || s == "exp") return WeightScheme::Exponential;
  if (s == "linear") return WeightScheme::Linear;
  if (s == "logarithmic" || s == "log") return WeightScheme::Logarithmic;
  if (s == "reflected_logarithmic" || s == "reflected_log") return WeightScheme::ReflectedLogarithmic;
  fail(Errc::InvalidConfig, "unknown weight scheme '" + std::string(s) + "'");
}

namespace {

void normalize(std::vector<double>& w) {
  double sum = 0.0;
  for (double x : w) sum += x;
  if (sum <= 0.0) {
    // Only reachable at l = 1 where both log schemes vanish.
    for (auto& x : w) x = 1.0 / static_cast<double>(w.size());
    return;
  }
  for (auto& x : w) x /= sum;
}

}  // namespace

WeightVector make_weights(WeightScheme scheme, std::size_t l, double exp_base) {
  if (l < 1) fail(Errc::InvalidLength, "weight vector length must be >= 1");
  if (scheme == WeightScheme::Exponential && !(exp_base > 0.0 && exp_base <= 1.0))
    fail(Errc::InvalidConfig, "exponential weight base must be in (0,1]");
  WeightVector wv{scheme, std::vector<double>(l)};
  auto& w = wv.values;
  const double L = static_cast<double>(l);
  const double S = L * (L + 1.0) / 2.0;
  switch (scheme) {
    case WeightScheme::Exponential: {
      double v = 1.0;
      for (std::size_t k = 0; k < l; ++k, v *= exp_base) w[k] = v;
      break;
    }
    case WeightScheme::Linear:
      for (std::size_t k = 1; k <= l; ++k) w[k - 1] = (L - static_cast<double>(k)) / S;
      break;
    case WeightScheme::Logarithmic:
      for (std::size_t k = 1; k <= l; ++k) w[k - 1] = std::log(L - static_cast<double>(k) + 1.0);
      normalize(w);
      break;
    case WeightScheme::ReflectedLogarithmic:
      for (std::size_t k = 1; k <= l; ++k) w[k - 1] = -std::log(static_cast<double>(k) / S);
      normalize(w);
      break;
  }
  return wv;
}

}  // namespace tsawf
