#include "xrouter/common/wire.h"

#include <cctype>

#include "json.hpp"
#include "xrouter/common/error.h"

namespace xrouter::wire {

namespace {

using ordered_json = nlohmann::ordered_json;

[[noreturn]] void malformed(const std::string& why) {
  throw Error(ErrorCode::kMalformedFrame, "malformed frame: " + why);
}

const ordered_json& field(const ordered_json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end()) malformed(std::string("missing field '") + key + "'");
  return *it;
}

std::string string_field(const ordered_json& j, const char* key) {
  const auto& v = field(j, key);
  if (!v.is_string()) malformed(std::string("field '") + key + "' not a string");
  return v.get<std::string>();
}

int64_t int_field(const ordered_json& j, const char* key) {
  const auto& v = field(j, key);
  if (!v.is_number_integer())
    malformed(std::string("field '") + key + "' not an integer");
  return v.get<int64_t>();
}

}  // namespace

std::string_view to_string(FrameType type) {
  switch (type) {
    case FrameType::kReq: return "req";
    case FrameType::kTok: return "tok";
    case FrameType::kEnd: return "end";
    case FrameType::kErr: return "err";
  }
  return "?";
}

Frame make_req(std::string id, std::string prompt, int64_t max_tokens) {
  Frame f;
  f.type = FrameType::kReq;
  f.id = std::move(id);
  f.prompt = std::move(prompt);
  f.max_tokens = max_tokens;
  return f;
}

Frame make_tok(std::string id, int64_t index, std::string text, int64_t t_ns) {
  Frame f;
  f.type = FrameType::kTok;
  f.id = std::move(id);
  f.index = index;
  f.text = std::move(text);
  f.t_ns = t_ns;
  return f;
}

Frame make_end(std::string id, int64_t n, std::string reason) {
  Frame f;
  f.type = FrameType::kEnd;
  f.id = std::move(id);
  f.n = n;
  f.reason = std::move(reason);
  return f;
}

Frame make_err(std::string id, std::string_view code, std::string msg) {
  Frame f;
  f.type = FrameType::kErr;
  f.id = std::move(id);
  f.code = std::string(code);
  f.msg = std::move(msg);
  return f;
}

std::string encode(const Frame& frame) {
  ordered_json j;
  j["v"] = kVersion;
  j["type"] = to_string(frame.type);
  j["id"] = frame.id;
  switch (frame.type) {
    case FrameType::kReq:
      j["prompt"] = frame.prompt;
      j["max_tokens"] = frame.max_tokens;
      if (frame.cluster) j["cluster"] = *frame.cluster;
      break;
    case FrameType::kTok:
      j["i"] = frame.index;
      j["text"] = frame.text;
      j["t_ns"] = frame.t_ns;
      break;
    case FrameType::kEnd:
      j["n"] = frame.n;
      j["reason"] = frame.reason;
      break;
    case FrameType::kErr:
      j["code"] = frame.code;
      j["msg"] = frame.msg;
      break;
  }
  // Invalid UTF-8 in a string is replaced rather than thrown; the input side
  // already rejects it.
  std::string out = j.dump(-1, ' ', false, ordered_json::error_handler_t::replace);
  out.push_back('\n');
  return out;
}

Frame decode(std::string_view line) {
  if (!line.empty() && line.back() == '\n') line.remove_suffix(1);
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  ordered_json j;
  try {
    j = ordered_json::parse(line);
  } catch (const ordered_json::exception& e) {
    malformed(e.what());
  }
  if (!j.is_object()) malformed("not an object");
  if (int_field(j, "v") != kVersion) malformed("unsupported version");

  Frame f;
  const std::string type = string_field(j, "type");
  f.id = string_field(j, "id");
  if (type == "req") {
    f.type = FrameType::kReq;
    f.prompt = string_field(j, "prompt");
    f.max_tokens = int_field(j, "max_tokens");
    if (f.max_tokens < 1) malformed("max_tokens must be >= 1");
    if (j.contains("cluster")) f.cluster = static_cast<int>(int_field(j, "cluster"));
  } else if (type == "tok") {
    f.type = FrameType::kTok;
    f.index = int_field(j, "i");
    f.text = string_field(j, "text");
    f.t_ns = int_field(j, "t_ns");
  } else if (type == "end") {
    f.type = FrameType::kEnd;
    f.n = int_field(j, "n");
    f.reason = string_field(j, "reason");
    if (f.reason != "eos" && f.reason != "cap") malformed("bad end reason");
  } else if (type == "err") {
    f.type = FrameType::kErr;
    f.code = string_field(j, "code");
    f.msg = string_field(j, "msg");
  } else {
    malformed("unknown type '" + type + "'");
  }
  return f;
}

int64_t count_words(std::string_view text) {
  int64_t n = 0;
  bool in_word = false;
  for (unsigned char c : text) {
    const bool space = std::isspace(c) != 0;
    if (!space && !in_word) ++n;
    in_word = !space;
  }
  return n;
}

}  // namespace xrouter::wire
