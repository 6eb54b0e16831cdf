#pragma once

#include <string>

#include "groupfeed/metrics/types.hpp"
#include "groupfeed/session/messages.hpp"
#include "json.hpp"

namespace groupfeed::session::detail {

using nlohmann::json;

template <typename T>
inline T required(const json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end()) throw ProtocolError(std::string("missing field \"") + key + "\"");
  try {
    return it->template get<T>();
  } catch (const json::exception&) {
    throw ProtocolError(std::string("field \"") + key + "\" has the wrong type");
  }
}

inline double required_number(const json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end()) throw ProtocolError(std::string("missing field \"") + key + "\"");
  if (!it->is_number()) throw ProtocolError(std::string("field \"") + key + "\" must be a number");
  return it->get<double>();
}

inline std::uint64_t required_uint(const json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end()) throw ProtocolError(std::string("missing field \"") + key + "\"");
  if (!it->is_number_unsigned() && !(it->is_number_integer() && it->get<std::int64_t>() >= 0))
    throw ProtocolError(std::string("field \"") + key + "\" must be a non-negative integer");
  return it->get<std::uint64_t>();
}

inline metrics::ParticipantId required_pid(const json& j, const char* key) {
  auto s = required<std::string>(j, key);
  if (s.empty()) throw ProtocolError(std::string("field \"") + key + "\" must not be empty");
  return metrics::ParticipantId(std::move(s));
}

inline void maybe(const json& j, const char* key, double& out) {
  if (auto it = j.find(key); it != j.end()) {
    if (!it->is_number()) throw ProtocolError(std::string("config field \"") + key + "\" must be a number");
    out = it->get<double>();
  }
}

}  // namespace groupfeed::session::detail
