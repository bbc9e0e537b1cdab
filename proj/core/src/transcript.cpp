#include "gke/transcript.hpp"

#include <fstream>
#include <sstream>

#include "gke/error.hpp"

namespace gke {

std::string_view to_string(Direction d) {
  switch (d) {
    case Direction::kPublish: return "publish";
    case Direction::kUnicast: return "unicast";
    case Direction::kBroadcast: return "broadcast";
  }
  return "?";
}

Direction parse_direction(std::string_view text) {
  if (text == "publish") return Direction::kPublish;
  if (text == "unicast") return Direction::kUnicast;
  if (text == "broadcast") return Direction::kBroadcast;
  throw Error(ErrorCode::kParse, "unknown direction '" + std::string(text) + "'");
}

Json to_json(const TranscriptRecord& record, bool include_oracle) {
  Json j;
  j["seq"] = record.seq;
  j["epoch"] = record.epoch;
  j["direction"] = to_string(record.direction);
  j["sender"] = record.sender ? Json(record.sender->value) : Json("ADV");
  j["receiver"] = record.receiver ? Json(record.receiver->value) : Json("ALL");
  j["kind"] = record.kind;
  j["payload"] = record.payload;
  if (include_oracle && !record.oracle.is_null()) j["oracle"] = record.oracle;
  return j;
}

TranscriptRecord transcript_record_from_json(const Json& j, std::size_t line) {
  auto fail = [line](const std::string& why) {
    return Error(ErrorCode::kParse, "transcript line " + std::to_string(line) + ": " + why);
  };
  if (!j.is_object()) throw fail("record is not a JSON object");
  for (const char* name : {"seq", "epoch", "direction", "sender", "receiver", "kind", "payload"}) {
    if (!j.contains(name)) throw fail(std::string("missing field '") + name + "'");
  }
  try {
    TranscriptRecord record;
    record.seq = j.at("seq").get<std::uint64_t>();
    record.epoch = j.at("epoch").get<std::uint64_t>();
    record.direction = parse_direction(j.at("direction").get<std::string>());
    if (const Json& s = j.at("sender"); !(s.is_string() && s.get<std::string>() == "ADV")) {
      record.sender = member_id_from_json(s);
    }
    if (const Json& r = j.at("receiver"); !(r.is_string() && r.get<std::string>() == "ALL")) {
      record.receiver = member_id_from_json(r);
    }
    record.kind = j.at("kind").get<std::string>();
    record.payload = j.at("payload");
    if (j.contains("oracle")) record.oracle = j.at("oracle");
    return record;
  } catch (const nlohmann::json::exception& e) {
    throw fail(e.what());
  } catch (const Error& e) {
    throw fail(e.what());
  }
}

std::string Transcript::to_jsonl() const {
  std::string out;
  for (const auto& record : records) {
    out += canonical(to_json(record));
    out += '\n';
  }
  return out;
}

Transcript Transcript::without_oracle() const {
  Transcript view = *this;
  for (auto& record : view.records) record.oracle = nullptr;
  return view;
}

Transcript Transcript::from_jsonl(std::string_view text) {
  Transcript t;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    const std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string_view::npos) continue;
    Json j;
    try {
      j = Json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw Error(ErrorCode::kParse,
                  "transcript line " + std::to_string(line_no) + ": invalid JSON: " + e.what());
    }
    TranscriptRecord record = transcript_record_from_json(j, line_no);
    if (!t.records.empty() && record.seq <= t.records.back().seq) {
      throw Error(ErrorCode::kParse,
                  "transcript line " + std::to_string(line_no) + ": seq is not increasing");
    }
    t.records.push_back(std::move(record));
  }
  return t;
}

Transcript read_transcript(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kParse, "cannot open transcript '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return Transcript::from_jsonl(buffer.str());
}

void write_transcript(const Transcript& transcript, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kParse, "cannot open '" + path + "' for writing");
  out << transcript.to_jsonl();
  if (!out) throw Error(ErrorCode::kParse, "failed while writing '" + path + "'");
}

}  // namespace gke
