#include "dysalign/core/annotation.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "dysalign/core/error.hpp"
#include "dysalign/core/time.hpp"

namespace dysalign {

using ordered_json = nlohmann::ordered_json;

std::string_view to_string(DysfluencyType t) {
  switch (t) {
    case DysfluencyType::Repetition: return "repetition";
    case DysfluencyType::Missing: return "missing";
    case DysfluencyType::Block: return "block";
    case DysfluencyType::Replacement: return "replacement";
    case DysfluencyType::Prolongation: return "prolongation";
    case DysfluencyType::Insertion: return "insertion";
  }
  return "unknown";
}

DysfluencyType parse_dysfluency_type(std::string_view name) {
  for (DysfluencyType t : kAllDysfluencyTypes)
    if (to_string(t) == name) return t;
  throw FormatError("unknown dysfluency type '" + std::string(name) + "'");
}

double DysfluencyAnnotation::start_seconds() const { return frames_to_seconds(start); }

std::optional<double> DysfluencyAnnotation::end_seconds() const {
  if (!end) return std::nullopt;
  return frames_to_seconds(*end);
}

DysfluencyAnnotation DysfluencyAnnotation::canonical() const {
  DysfluencyAnnotation out = *this;
  if (out.end && *out.end - out.start < kShortEventFrames) out.end.reset();
  return out;
}

void DysfluencyAnnotation::validate() const {
  if (start < 0) throw InvalidArgument("annotation for '" + word + "' starts before 0");
  if (end && *end < start) throw InvalidArgument("annotation for '" + word + "' ends before it starts");
}

std::string serialize_annotations(const std::vector<DysfluencyAnnotation>& annotations) {
  ordered_json array = ordered_json::array();
  for (const auto& raw : annotations) {
    raw.validate();
    const DysfluencyAnnotation a = raw.canonical();
    ordered_json entry;
    entry["word"] = a.word;
    entry["dysfluency"] = std::string(to_string(a.type));
    entry["time_start"] = a.start_seconds();
    if (a.end)
      entry["time_end"] = *a.end_seconds();
    else
      entry["time_end"] = nullptr;
    array.push_back(std::move(entry));
  }
  return array.dump(2);
}

std::vector<DysfluencyAnnotation> parse_annotations(std::string_view text) {
  ordered_json doc;
  try {
    doc = ordered_json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("annotation JSON: ") + e.what());
  }
  if (!doc.is_array()) throw FormatError("annotation JSON must be an array");
  std::vector<DysfluencyAnnotation> out;
  for (const auto& entry : doc) {
    if (!entry.is_object()) throw FormatError("annotation entry must be an object");
    for (const char* key : {"word", "dysfluency", "time_start", "time_end"})
      if (!entry.contains(key)) throw FormatError(std::string("annotation entry lacks '") + key + "'");
    if (!entry["word"].is_string() || !entry["dysfluency"].is_string() || !entry["time_start"].is_number())
      throw FormatError("annotation entry has mistyped fields");
    DysfluencyAnnotation a;
    a.word = entry["word"].get<std::string>();
    a.type = parse_dysfluency_type(entry["dysfluency"].get<std::string>());
    a.start = seconds_to_frames(entry["time_start"].get<double>());
    if (entry["time_end"].is_number())
      a.end = seconds_to_frames(entry["time_end"].get<double>());
    else if (!entry["time_end"].is_null())
      throw FormatError("time_end must be a number or null");
    try {
      a.validate();
    } catch (const InvalidArgument& e) {
      throw FormatError(e.what());
    }
    out.push_back(std::move(a));
  }
  return out;
}

std::vector<DysfluencyAnnotation> read_annotations(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open annotation file " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_annotations(buffer.str());
}

void write_annotations(const std::string& path, const std::vector<DysfluencyAnnotation>& annotations) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot write annotation file " + path);
  out << serialize_annotations(annotations) << '\n';
  if (!out) throw IoError("failed writing annotation file " + path);
}

}  // namespace dysalign
