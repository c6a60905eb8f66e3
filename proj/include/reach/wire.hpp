#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "reach/engine.hpp"

// Wire protocol for the inter-process next-state interface. A frame is a
// 4-byte big-endian length prefix followed by a UTF-8 JSON body. Bodies are
// single self-describing objects keyed by "kind"; value indices travel as
// integers, with null standing in for the dummy value at read-independent
// positions of a NEXT_REQ state. Protocol version is 1.

namespace reach::wire {

inline constexpr int kProtocolVersion = 1;
inline constexpr uint32_t kMaxFrameBytes = 64u << 20;

enum class MsgKind { InitReq, InitResp, NextReq, NextResp, Term, Error };

inline const char* kind_name(MsgKind k) {
  switch (k) {
    case MsgKind::InitReq: return "INIT_REQ";
    case MsgKind::InitResp: return "INIT_RESP";
    case MsgKind::NextReq: return "NEXT_REQ";
    case MsgKind::NextResp: return "NEXT_RESP";
    case MsgKind::Term: return "TERM";
    case MsgKind::Error: return "ERROR";
  }
  return "?";
}

inline MsgKind kind_from_name(const std::string& s) {
  if (s == "INIT_REQ") return MsgKind::InitReq;
  if (s == "INIT_RESP") return MsgKind::InitResp;
  if (s == "NEXT_REQ") return MsgKind::NextReq;
  if (s == "NEXT_RESP") return MsgKind::NextResp;
  if (s == "TERM") return MsgKind::Term;
  if (s == "ERROR") return MsgKind::Error;
  throw ProtocolError("unknown message kind '" + s + "'");
}

// One variable's value as opaque bytes: the value index as a minimal
// big-endian unsigned integer, the empty string for index 0. Equal values
// always encode to identical bytes.
struct Chunk {
  static std::string encode(uint32_t idx) {
    std::string out;
    while (idx != 0) {
      out.insert(out.begin(), static_cast<char>(idx & 0xFF));
      idx >>= 8;
    }
    return out;
  }

  static uint32_t decode(const std::string& bytes) {
    if (bytes.size() > 4) throw ProtocolError("chunk longer than 4 bytes");
    if (!bytes.empty() && bytes.front() == '\0')
      throw ProtocolError("chunk has a leading zero byte");
    uint32_t v = 0;
    for (unsigned char c : bytes) v = (v << 8) | c;
    return v;
  }
};

struct WireMessage {
  MsgKind kind = MsgKind::Term;
  int protocol = kProtocolVersion;                 // INIT_REQ
  ModelInfo model;                                 // INIT_RESP
  uint32_t group = 0;                              // NEXT_REQ
  std::vector<std::optional<uint32_t>> state;      // NEXT_REQ; null = dummy
  std::vector<StateVector> successors;             // NEXT_RESP
  std::string message;                             // ERROR

  bool operator==(const WireMessage& o) const {
    if (kind != o.kind) return false;
    switch (kind) {
      case MsgKind::InitReq: return protocol == o.protocol;
      case MsgKind::InitResp: return model == o.model;
      case MsgKind::NextReq: return group == o.group && state == o.state;
      case MsgKind::NextResp: return successors == o.successors;
      case MsgKind::Term: return true;
      case MsgKind::Error: return message == o.message;
    }
    return false;
  }
};

namespace detail {

inline nlohmann::ordered_json domain_json(const Domain& d) {
  nlohmann::ordered_json j;
  switch (d.kind) {
    case Domain::Kind::Bool:
      j["type"] = "bool";
      break;
    case Domain::Kind::Range:
      j["type"] = "range";
      j["lo"] = d.lo;
      j["hi"] = d.hi;
      break;
    case Domain::Kind::Enum:
      j["type"] = "enum";
      j["labels"] = d.labels;
      break;
  }
  return j;
}

inline Domain domain_from_json(const nlohmann::json& j) {
  Domain d;
  std::string t = j.at("type").get<std::string>();
  if (t == "bool") {
    d.kind = Domain::Kind::Bool;
  } else if (t == "range") {
    d.kind = Domain::Kind::Range;
    d.lo = j.at("lo").get<long>();
    d.hi = j.at("hi").get<long>();
    if (d.lo > d.hi) throw ProtocolError("empty range domain on the wire");
  } else if (t == "enum") {
    d.kind = Domain::Kind::Enum;
    d.labels = j.at("labels").get<std::vector<std::string>>();
    if (d.labels.empty()) throw ProtocolError("empty enum domain on the wire");
  } else {
    throw ProtocolError("unknown domain type '" + t + "'");
  }
  return d;
}

inline std::vector<std::vector<bool>> matrix_from_json(const nlohmann::json& j) {
  std::vector<std::vector<bool>> m;
  for (const auto& row : j) {
    std::vector<bool> r;
    for (const auto& cell : row) {
      int v = cell.get<int>();
      if (v != 0 && v != 1) throw ProtocolError("matrix cell must be 0 or 1");
      r.push_back(v == 1);
    }
    m.push_back(std::move(r));
  }
  return m;
}

inline nlohmann::ordered_json matrix_json(const std::vector<std::vector<bool>>& m) {
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  for (const auto& row : m) {
    nlohmann::ordered_json r = nlohmann::ordered_json::array();
    for (bool b : row) r.push_back(b ? 1 : 0);
    rows.push_back(std::move(r));
  }
  return rows;
}

}  // namespace detail

inline std::string encode(const WireMessage& msg) {
  nlohmann::ordered_json j;
  j["kind"] = kind_name(msg.kind);
  switch (msg.kind) {
    case MsgKind::InitReq:
      j["protocol"] = msg.protocol;
      break;
    case MsgKind::InitResp: {
      nlohmann::ordered_json vars = nlohmann::ordered_json::array();
      for (size_t i = 0; i < msg.model.var_names.size(); ++i) {
        nlohmann::ordered_json v;
        v["name"] = msg.model.var_names[i];
        v["domain"] = detail::domain_json(msg.model.domains[i]);
        vars.push_back(std::move(v));
      }
      j["variables"] = std::move(vars);
      j["groups"] = msg.model.group_names;
      j["rm"] = detail::matrix_json(msg.model.rm);
      j["wm"] = detail::matrix_json(msg.model.wm);
      j["initial"] = msg.model.initial;
      break;
    }
    case MsgKind::NextReq: {
      j["group"] = msg.group;
      nlohmann::ordered_json st = nlohmann::ordered_json::array();
      for (const auto& v : msg.state) {
        if (v)
          st.push_back(*v);
        else
          st.push_back(nullptr);
      }
      j["state"] = std::move(st);
      break;
    }
    case MsgKind::NextResp:
      j["successors"] = msg.successors;
      break;
    case MsgKind::Term:
      break;
    case MsgKind::Error:
      j["message"] = msg.message;
      break;
  }
  return j.dump();
}

inline WireMessage decode(std::string_view body) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(body);
  } catch (const nlohmann::json::exception& e) {
    throw ProtocolError(std::string("malformed frame body: ") + e.what());
  }
  try {
    WireMessage msg;
    msg.kind = kind_from_name(j.at("kind").get<std::string>());
    switch (msg.kind) {
      case MsgKind::InitReq:
        msg.protocol = j.at("protocol").get<int>();
        break;
      case MsgKind::InitResp: {
        for (const auto& v : j.at("variables")) {
          msg.model.var_names.push_back(v.at("name").get<std::string>());
          msg.model.domains.push_back(detail::domain_from_json(v.at("domain")));
        }
        msg.model.group_names =
            j.at("groups").get<std::vector<std::string>>();
        msg.model.rm = detail::matrix_from_json(j.at("rm"));
        msg.model.wm = detail::matrix_from_json(j.at("wm"));
        for (const auto& row : j.at("initial"))
          msg.model.initial.push_back(row.get<StateVector>());
        size_t n = msg.model.var_names.size();
        size_t m = msg.model.group_names.size();
        if (msg.model.rm.size() != m || msg.model.wm.size() != m)
          throw ProtocolError("matrix row count does not match group count");
        for (const auto& mat : {&msg.model.rm, &msg.model.wm})
          for (const auto& row : *mat)
            if (row.size() != n)
              throw ProtocolError("matrix width does not match variable count");
        for (const auto& s : msg.model.initial)
          if (s.size() != n)
            throw ProtocolError("initial state has the wrong length");
        break;
      }
      case MsgKind::NextReq: {
        msg.group = j.at("group").get<uint32_t>();
        for (const auto& v : j.at("state")) {
          if (v.is_null())
            msg.state.push_back(std::nullopt);
          else
            msg.state.push_back(v.get<uint32_t>());
        }
        break;
      }
      case MsgKind::NextResp:
        for (const auto& row : j.at("successors"))
          msg.successors.push_back(row.get<StateVector>());
        break;
      case MsgKind::Term:
        break;
      case MsgKind::Error:
        msg.message = j.at("message").get<std::string>();
        break;
    }
    return msg;
  } catch (const nlohmann::json::exception& e) {
    throw ProtocolError(std::string("malformed frame body: ") + e.what());
  }
}

// --- framing over a byte sink/source ----------------------------------------

inline void put_u32_be(std::string& out, uint32_t v) {
  out.push_back(static_cast<char>((v >> 24) & 0xFF));
  out.push_back(static_cast<char>((v >> 16) & 0xFF));
  out.push_back(static_cast<char>((v >> 8) & 0xFF));
  out.push_back(static_cast<char>(v & 0xFF));
}

inline uint32_t get_u32_be(const unsigned char* p) {
  return (uint32_t(p[0]) << 24) | (uint32_t(p[1]) << 16) |
         (uint32_t(p[2]) << 8) | uint32_t(p[3]);
}

inline std::string frame(const WireMessage& msg) {
  std::string body = encode(msg);
  if (body.size() > kMaxFrameBytes) throw ProtocolError("frame too large");
  std::string out;
  out.reserve(4 + body.size());
  put_u32_be(out, static_cast<uint32_t>(body.size()));
  out += body;
  return out;
}

}  // namespace reach::wire
