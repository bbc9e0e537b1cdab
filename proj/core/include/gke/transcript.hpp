#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "gke/protocol.hpp"
#include "gke/wire.hpp"

namespace gke {

enum class Direction { kPublish, kUnicast, kBroadcast };

std::string_view to_string(Direction d);
Direction parse_direction(std::string_view text);

/// One line of a transcript. `sender` is empty for records produced by the
/// simulated eavesdropper (attack demonstrations); `receiver` is empty for
/// messages addressed to everyone.
struct TranscriptRecord {
  std::uint64_t seq = 0;
  std::uint64_t epoch = 0;
  Direction direction = Direction::kPublish;
  std::optional<MemberId> sender;
  std::optional<MemberId> receiver;
  std::string kind;
  Json payload;
  Json oracle;  // null when the record carries no oracle section
};

Json to_json(const TranscriptRecord& record, bool include_oracle = true);
/// `line` is only used to label parse errors.
TranscriptRecord transcript_record_from_json(const Json& j, std::size_t line);

struct Transcript {
  std::vector<TranscriptRecord> records;

  /// One canonical JSON object per line, each terminated by '\n'.
  std::string to_jsonl() const;
  /// Drops every "oracle" key.
  Transcript without_oracle() const;

  /// Throws kParse naming the offending line.
  static Transcript from_jsonl(std::string_view text);
};

Transcript read_transcript(const std::string& path);
void write_transcript(const Transcript& transcript, const std::string& path);

}  // namespace gke
