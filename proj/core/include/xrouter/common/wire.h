#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace xrouter::wire {

/// Newline-delimited JSON frames shared by every hop
/// (client, balancer, gateway, backend). One frame per line, version 1.
inline constexpr int kVersion = 1;

enum class FrameType { kReq, kTok, kEnd, kErr };

std::string_view to_string(FrameType type);

namespace errc {
inline constexpr std::string_view kBadRequest = "bad_request";
inline constexpr std::string_view kNoRoute = "no_route";
inline constexpr std::string_view kUpstreamUnavailable = "upstream_unavailable";
inline constexpr std::string_view kOverloaded = "overloaded";
inline constexpr std::string_view kKvOverflow = "kv_overflow";
}  // namespace errc

struct Frame {
  FrameType type = FrameType::kReq;
  std::string id;

  // req
  std::string prompt;
  int64_t max_tokens = 0;
  std::optional<int> cluster;

  // tok
  int64_t index = 0;
  std::string text;
  int64_t t_ns = 0;

  // end
  int64_t n = 0;
  std::string reason;  // "eos" | "cap"

  // err
  std::string code;
  std::string msg;

  bool is_terminal() const {
    return type == FrameType::kEnd || type == FrameType::kErr;
  }
};

Frame make_req(std::string id, std::string prompt, int64_t max_tokens);
Frame make_tok(std::string id, int64_t index, std::string text, int64_t t_ns);
Frame make_end(std::string id, int64_t n, std::string reason);
Frame make_err(std::string id, std::string_view code, std::string msg);

/// Serializes a frame as one JSON line including the trailing '\n'.
std::string encode(const Frame& frame);

/// Parses one line (trailing '\n' optional). Rejects invalid JSON, invalid
/// UTF-8, wrong version, unknown type, and missing or mistyped fields with
/// ErrorCode::kMalformedFrame.
Frame decode(std::string_view line);

/// Number of whitespace-delimited words; the simulated token count of a prompt.
int64_t count_words(std::string_view text);

}  // namespace xrouter::wire
