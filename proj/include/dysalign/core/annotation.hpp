#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace dysalign {

enum class DysfluencyType { Repetition, Missing, Block, Replacement, Prolongation, Insertion };

inline constexpr DysfluencyType kAllDysfluencyTypes[] = {
    DysfluencyType::Repetition,  DysfluencyType::Missing,      DysfluencyType::Block,
    DysfluencyType::Replacement, DysfluencyType::Prolongation, DysfluencyType::Insertion};

// Lower-case name used in JSON ("repetition", ...).
std::string_view to_string(DysfluencyType t);
DysfluencyType parse_dysfluency_type(std::string_view name);

// Events shorter than this many frames (0.1 s) carry no end time on the wire.
inline constexpr std::int64_t kShortEventFrames = 5;

// A typed, time-stamped dysfluency attached to a word. Times are frame
// indices and the event covers frames [start, end).
struct DysfluencyAnnotation {
  std::string word;
  DysfluencyType type = DysfluencyType::Repetition;
  std::int64_t start = 0;
  std::optional<std::int64_t> end;

  double start_seconds() const;
  std::optional<double> end_seconds() const;

  // Copy with `end` dropped when the event is shorter than 0.1 s. This is the
  // form that survives a serialize/parse round trip.
  DysfluencyAnnotation canonical() const;
  // Throws InvalidArgument when start < 0 or end < start.
  void validate() const;

  friend bool operator==(const DysfluencyAnnotation&, const DysfluencyAnnotation&) = default;
};

// JSON array with fields word, dysfluency, time_start, time_end (null when
// absent or shorter than 0.1 s). Indented by two spaces.
std::string serialize_annotations(const std::vector<DysfluencyAnnotation>& annotations);
// Throws FormatError on malformed input.
std::vector<DysfluencyAnnotation> parse_annotations(std::string_view json);

std::vector<DysfluencyAnnotation> read_annotations(const std::string& path);
void write_annotations(const std::string& path, const std::vector<DysfluencyAnnotation>& annotations);

}  // namespace dysalign
