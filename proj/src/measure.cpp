#include "tsawf/measure.hpp"

#include "tsawf/error.hpp"
#include "tsawf/trace.hpp"

namespace tsawf {

std::string_view measure_kind_name(MeasureKind k) {
  switch (k) {
    case MeasureKind::MatrixProfile: return "matrix_profile";
    case MeasureKind::Euclidean: return "euclidean";
    case MeasureKind::WeightedEuclidean: return "weighted_euclidean";
    case MeasureKind::CBD: return "cbd";
    case MeasureKind::DTW: return "dtw";
  }
  return "?";
}

MeasureKind parse_measure_kind(std::string_view s) {
  if (s == "matrix_profile" || s == "mp") return MeasureKind::MatrixProfile;
  if (s == "euclidean") return MeasureKind::Euclidean;
  if (s == "weighted_euclidean" || s == "wed") return MeasureKind::WeightedEuclidean;
  if (s == "cbd") return MeasureKind::CBD;
  if (s == "dtw") return MeasureKind::DTW;
  fail(Errc::InvalidConfig, "unknown measure '" + std::string(s) + "'");
}

Measure Measure::matrix_profile(bool normalized) {
  Measure m;
  m.kind = MeasureKind::MatrixProfile;
  m.normalized = normalized;
  return m;
}

Measure Measure::euclidean() {
  Measure m;
  m.kind = MeasureKind::Euclidean;
  m.normalized = false;
  return m;
}

Measure Measure::weighted_euclidean(WeightScheme scheme, double exp_base) {
  Measure m;
  m.kind = MeasureKind::WeightedEuclidean;
  m.normalized = false;
  m.weights = scheme;
  m.exp_base = exp_base;
  return m;
}

Measure Measure::cbd(std::size_t alphabet, std::size_t word_length) {
  Measure m;
  m.kind = MeasureKind::CBD;
  m.normalized = false;
  m.alphabet = alphabet;
  m.word_length = word_length;
  return m;
}

Measure Measure::dtw(std::optional<std::size_t> window) {
  Measure m;
  m.kind = MeasureKind::DTW;
  m.normalized = false;
  m.window = window;
  return m;
}

Measure Measure::of(MeasureKind kind) {
  switch (kind) {
    case MeasureKind::MatrixProfile: return matrix_profile();
    case MeasureKind::Euclidean: return euclidean();
    case MeasureKind::WeightedEuclidean: return weighted_euclidean();
    case MeasureKind::CBD: return cbd();
    case MeasureKind::DTW: return dtw();
  }
  return {};
}

void Measure::validate() const {
  switch (kind) {
    case MeasureKind::WeightedEuclidean:
      if (normalized) fail(Errc::InvalidConfig, "weighted_euclidean cannot be normalized");
      if (weights == WeightScheme::Exponential && !(exp_base > 0.0 && exp_base <= 1.0))
        fail(Errc::InvalidConfig, "exponential weight base must be in (0,1]");
      break;
    case MeasureKind::CBD:
      if (alphabet < 2 || alphabet > 26) fail(Errc::InvalidConfig, "cbd alphabet must be in [2, 26]");
      break;
    default:
      break;
  }
}

std::string Measure::key() const {
  std::string k(measure_kind_name(kind));
  switch (kind) {
    case MeasureKind::MatrixProfile:
    case MeasureKind::Euclidean:
      k += normalized ? "(normalized)" : "(raw)";
      break;
    case MeasureKind::WeightedEuclidean:
      k += "(" + std::string(weight_scheme_name(weights));
      if (weights == WeightScheme::Exponential) k += "," + format_double(exp_base);
      k += ")";
      break;
    case MeasureKind::CBD:
      k += "(" + std::to_string(alphabet) + "," + std::to_string(word_length) + ")";
      break;
    case MeasureKind::DTW:
      k += "(" + (window ? std::to_string(*window) : std::string("none")) + ")";
      break;
  }
  return k;
}

nlohmann::json Measure::to_json() const {
  nlohmann::json j{{"kind", measure_kind_name(kind)}};
  switch (kind) {
    case MeasureKind::MatrixProfile:
    case MeasureKind::Euclidean:
      j["normalized"] = normalized;
      break;
    case MeasureKind::WeightedEuclidean:
      j["weights"] = weight_scheme_name(weights);
      j["exp_base"] = exp_base;
      break;
    case MeasureKind::CBD:
      j["alphabet"] = alphabet;
      j["word_length"] = word_length;
      break;
    case MeasureKind::DTW:
      j["window"] = window ? nlohmann::json(*window) : nlohmann::json(nullptr);
      break;
  }
  return j;
}

Measure Measure::from_json(const nlohmann::json& j) {
  try {
    if (j.is_string()) return of(parse_measure_kind(j.get<std::string>()));
    if (!j.is_object() || !j.contains("kind")) fail(Errc::InvalidConfig, "measure must be a name or an object with 'kind'");
    Measure m = of(parse_measure_kind(j.at("kind").get<std::string>()));
    for (const auto& [key, value] : j.items()) {
      if (key == "kind") continue;
      if (key == "normalized") m.normalized = value.get<bool>();
      else if (key == "weights") m.weights = parse_weight_scheme(value.get<std::string>());
      else if (key == "exp_base") m.exp_base = value.get<double>();
      else if (key == "alphabet") m.alphabet = value.get<std::size_t>();
      else if (key == "word_length") m.word_length = value.get<std::size_t>();
      else if (key == "window") m.window = value.is_null() ? std::nullopt : std::optional(value.get<std::size_t>());
      else fail(Errc::InvalidConfig, "unknown measure parameter '" + key + "'");
    }
    m.validate();
    return m;
  } catch (const nlohmann::json::exception& e) {
    fail(Errc::InvalidConfig, std::string("bad measure description: ") + e.what());
  }
}

std::vector<Measure> all_measures() {
  return {Measure::matrix_profile(), Measure::euclidean(), Measure::weighted_euclidean(), Measure::cbd(),
          Measure::dtw()};
}

std::vector<Measure> parse_measure_list(std::string_view text) {
  std::vector<Measure> out;
  while (!text.empty()) {
    const auto comma = text.find(',');
    const auto item = text.substr(0, comma);
    if (!item.empty()) out.push_back(Measure::of(parse_measure_kind(item)));
    if (comma == std::string_view::npos) break;
    text.remove_prefix(comma + 1);
  }
  if (out.empty()) fail(Errc::InvalidConfig, "empty measure list");
  return out;
}

}  // namespace tsawf
