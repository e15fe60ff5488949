#include "dysalign/gestural/scores.hpp"

#include <algorithm>

#include <json.hpp>

#include "dysalign/core/error.hpp"

namespace dysalign::gestural {

GesturalScores::GesturalScores(int k, int t) : k_(k), t_(t), rows_(k < 0 ? 0 : k) {
  if (k < 0 || t < 0) throw InvalidArgument("gestural scores need non-negative K and T");
}

void GesturalScores::set_row(int i, std::vector<ScoreSpan> spans) {
  if (i < 0 || i >= k_) throw InvalidArgument("gesture row " + std::to_string(i) + " out of range");
  if (static_cast<int>(spans.size()) > max_spans_per_row())
    throw InvalidArgument("row " + std::to_string(i) + " has more than ceil(T/4) spans");
  int prev_end = -2;
  for (const ScoreSpan& sp : spans) {
    if (sp.start < 0 || sp.end >= t_ || sp.start > sp.end)
      throw InvalidArgument("span [" + std::to_string(sp.start) + ", " + std::to_string(sp.end) + "] outside frames");
    if (sp.start <= prev_end + 1) throw InvalidArgument("spans must be sorted, disjoint and non-adjacent");
    if (static_cast<int>(sp.values.size()) != sp.length()) throw ShapeError("span value count != span length");
    prev_end = sp.end;
  }
  rows_[i] = std::move(spans);
}

double GesturalScores::at(int i, int t) const {
  for (const ScoreSpan& sp : rows_.at(i))
    if (t >= sp.start && t <= sp.end) return sp.values[t - sp.start];
  return 0.0;
}

std::size_t GesturalScores::nonzero_bound() const {
  std::size_t n = 0;
  for (const auto& row : rows_)
    for (const ScoreSpan& sp : row) n += sp.length();
  return n;
}

std::vector<double> GesturalScores::to_dense() const {
  std::vector<double> out(std::size_t(k_) * t_, 0.0);
  for (int i = 0; i < k_; ++i)
    for (const ScoreSpan& sp : rows_[i])
      std::copy(sp.values.begin(), sp.values.end(), out.begin() + std::size_t(i) * t_ + sp.start);
  return out;
}

GesturalScores GesturalScores::from_dense(int k, int t, const std::vector<double>& dense) {
  if (dense.size() != std::size_t(k) * t) throw ShapeError("dense gestural scores have the wrong size");
  GesturalScores out(k, t);
  for (int i = 0; i < k; ++i) {
    std::vector<ScoreSpan> spans;
    for (int f = 0; f < t; ++f) {
      const double v = dense[std::size_t(i) * t + f];
      if (v == 0.0) continue;
      if (spans.empty() || spans.back().end != f - 1) spans.push_back(ScoreSpan{f, f, {}});
      spans.back().end = f;
      spans.back().values.push_back(v);
    }
    out.rows_[i] = std::move(spans);
  }
  return out;
}

FeatureMatrix GesturalScores::to_matrix() const {
  const std::vector<double> dense = to_dense();
  return FeatureMatrix(k_, t_, std::vector<float>(dense.begin(), dense.end()));
}

std::string GesturalScores::to_json() const {
  nlohmann::ordered_json j;
  j["gestures"] = k_;
  j["frames"] = t_;
  j["rows"] = nlohmann::ordered_json::array();
  for (const auto& row : rows_) {
    auto jr = nlohmann::ordered_json::array();
    for (const ScoreSpan& sp : row) jr.push_back({{"start", sp.start}, {"end", sp.end}, {"values", sp.values}});
    j["rows"].push_back(jr);
  }
  return j.dump();
}

GesturalScores GesturalScores::from_json(const std::string& text) {
  try {
    const auto j = nlohmann::json::parse(text);
    GesturalScores out(j.at("gestures").get<int>(), j.at("frames").get<int>());
    const auto& rows = j.at("rows");
    if (!rows.is_array() || static_cast<int>(rows.size()) != out.k_) throw FormatError("row count mismatch");
    for (int i = 0; i < out.k_; ++i) {
      std::vector<ScoreSpan> spans;
      for (const auto& js : rows[i])
        spans.push_back({js.at("start").get<int>(), js.at("end").get<int>(), js.at("values").get<std::vector<double>>()});
      out.set_row(i, std::move(spans));
    }
    return out;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("gestural scores JSON: ") + e.what());
  } catch (const InvalidArgument& e) {
    throw FormatError(std::string("gestural scores JSON: ") + e.what());
  } catch (const ShapeError& e) {
    throw FormatError(std::string("gestural scores JSON: ") + e.what());
  }
}

std::vector<std::pair<int, int>> generate_spans(std::vector<std::pair<int, int>> draws) {
  for (auto& [s, e] : draws)
    if (s > e) std::swap(s, e);
  std::sort(draws.begin(), draws.end());
  std::vector<std::pair<int, int>> out;
  for (const auto& d : draws) {
    if (!out.empty() && d.first <= out.back().second + 1)
      out.back().second = std::max(out.back().second, d.second);
    else
      out.push_back(d);
  }
  return out;
}

}  // namespace dysalign::gestural
