#pragma once

#include <arpa/inet.h>
#include <fcntl.h>
#include <netdb.h>
#include <poll.h>
#include <sys/socket.h>
#include <sys/un.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <memory>
#include <string>

#include "reach/wire.hpp"

// Socket transport for the next-state protocol. One server exposes one
// elaborated machine; communication is strictly request/response with a
// single client at a time. Endpoints are "ipc:<path>" (a filesystem socket)
// or "tcp:<host>:<port>"; REACH_ENDPOINT supplies a default.

namespace reach {

struct Endpoint {
  enum class Kind { Ipc, Tcp };
  Kind kind = Kind::Ipc;
  std::string path;  // ipc
  std::string host;  // tcp
  uint16_t port = 0; // tcp
};

inline Endpoint parse_endpoint(const std::string& s) {
  Endpoint e;
  if (s.rfind("ipc:", 0) == 0) {
    e.kind = Endpoint::Kind::Ipc;
    e.path = s.substr(4);
    if (e.path.empty()) throw ProtocolError("ipc endpoint needs a path");
    if (e.path.size() >= sizeof(sockaddr_un{}.sun_path))
      throw ProtocolError("ipc endpoint path too long");
    return e;
  }
  if (s.rfind("tcp:", 0) == 0) {
    std::string rest = s.substr(4);
    size_t colon = rest.rfind(':');
    if (colon == std::string::npos)
      throw ProtocolError("tcp endpoint must be tcp:<host>:<port>");
    e.kind = Endpoint::Kind::Tcp;
    e.host = rest.substr(0, colon);
    std::string port = rest.substr(colon + 1);
    if (e.host.empty() || port.empty())
      throw ProtocolError("tcp endpoint must be tcp:<host>:<port>");
    int p;
    try {
      p = std::stoi(port);
    } catch (const std::exception&) {
      throw ProtocolError("bad tcp port '" + port + "'");
    }
    if (p < 0 || p > 65535) throw ProtocolError("tcp port out of range");
    e.port = static_cast<uint16_t>(p);
    return e;
  }
  throw ProtocolError("endpoint must start with ipc: or tcp:");
}

namespace detail {

class Fd {
 public:
  Fd() = default;
  explicit Fd(int fd) : fd_(fd) {}
  ~Fd() { reset(); }
  Fd(Fd&& o) noexcept : fd_(o.fd_) { o.fd_ = -1; }
  Fd& operator=(Fd&& o) noexcept {
    if (this != &o) {
      reset();
      fd_ = o.fd_;
      o.fd_ = -1;
    }
    return *this;
  }
  Fd(const Fd&) = delete;
  Fd& operator=(const Fd&) = delete;

  int get() const { return fd_; }
  bool valid() const { return fd_ >= 0; }
  void reset() {
    if (fd_ >= 0) ::close(fd_);
    fd_ = -1;
  }
  int release() {
    int f = fd_;
    fd_ = -1;
    return f;
  }

 private:
  int fd_ = -1;
};

inline void write_all(int fd, const char* data, size_t len) {
  while (len > 0) {
    ssize_t n = ::send(fd, data, len, MSG_NOSIGNAL);
    if (n < 0) {
      if (errno == EINTR) continue;
      throw ProtocolError(std::string("send failed: ") + std::strerror(errno));
    }
    data += n;
    len -= static_cast<size_t>(n);
  }
}

struct PeerClosed : ProtocolError {
  PeerClosed() : ProtocolError("connection closed by peer") {}
};

inline void read_exact(int fd, char* data, size_t len) {
  while (len > 0) {
    ssize_t n = ::recv(fd, data, len, 0);
    if (n == 0) throw PeerClosed();
    if (n < 0) {
      if (errno == EINTR) continue;
      throw ProtocolError(std::string("recv failed: ") + std::strerror(errno));
    }
    data += n;
    len -= static_cast<size_t>(n);
  }
}

inline void write_frame(int fd, const wire::WireMessage& msg) {
  std::string f = wire::frame(msg);
  write_all(fd, f.data(), f.size());
}

inline wire::WireMessage read_frame(int fd) {
  unsigned char hdr[4];
  read_exact(fd, reinterpret_cast<char*>(hdr), 4);
  uint32_t len = wire::get_u32_be(hdr);
  if (len > wire::kMaxFrameBytes) throw ProtocolError("oversized frame");
  std::string body(len, '\0');
  read_exact(fd, body.data(), len);
  return wire::decode(body);
}

inline Fd connect_endpoint(const Endpoint& ep, int timeout_ms) {
  Fd fd;
  sockaddr_storage addr{};
  socklen_t addr_len = 0;
  if (ep.kind == Endpoint::Kind::Ipc) {
    fd = Fd(::socket(AF_UNIX, SOCK_STREAM, 0));
    auto* sa = reinterpret_cast<sockaddr_un*>(&addr);
    sa->sun_family = AF_UNIX;
    std::strncpy(sa->sun_path, ep.path.c_str(), sizeof(sa->sun_path) - 1);
    addr_len = sizeof(sockaddr_un);
  } else {
    addrinfo hints{};
    hints.ai_family = AF_INET;
    hints.ai_socktype = SOCK_STREAM;
    addrinfo* res = nullptr;
    int rc = ::getaddrinfo(ep.host.c_str(), std::to_string(ep.port).c_str(),
                           &hints, &res);
    if (rc != 0)
      throw ProtocolError("cannot resolve '" + ep.host +
                          "': " + gai_strerror(rc));
    fd = Fd(::socket(res->ai_family, res->ai_socktype, res->ai_protocol));
    std::memcpy(&addr, res->ai_addr, res->ai_addrlen);
    addr_len = res->ai_addrlen;
    ::freeaddrinfo(res);
  }
  if (!fd.valid())
    throw ProtocolError(std::string("socket failed: ") + std::strerror(errno));

  int flags = ::fcntl(fd.get(), F_GETFL, 0);
  ::fcntl(fd.get(), F_SETFL, flags | O_NONBLOCK);
  int rc = ::connect(fd.get(), reinterpret_cast<sockaddr*>(&addr), addr_len);
  if (rc < 0 && errno != EINPROGRESS)
    throw ProtocolError(std::string("connect failed: ") + std::strerror(errno));
  if (rc < 0) {
    pollfd pf{fd.get(), POLLOUT, 0};
    int pr = ::poll(&pf, 1, timeout_ms);
    if (pr == 0) throw ProtocolError("connect timed out");
    if (pr < 0)
      throw ProtocolError(std::string("poll failed: ") + std::strerror(errno));
    int err = 0;
    socklen_t len = sizeof(err);
    ::getsockopt(fd.get(), SOL_SOCKET, SO_ERROR, &err, &len);
    if (err != 0)
      throw ProtocolError(std::string("connect failed: ") + std::strerror(err));
  }
  ::fcntl(fd.get(), F_SETFL, flags);
  return fd;
}

}  // namespace detail

// Serves one machine until a TERM frame arrives. A client that disconnects
// without TERM does not stop the server; the next client is accepted.
class Server {
 public:
  Server(const ElaboratedMachine& em, const DependencyMatrices& dm,
         const std::string& endpoint)
      : em_(em), info_(model_info(em, dm)), ep_(parse_endpoint(endpoint)) {
    if (ep_.kind == Endpoint::Kind::Ipc) {
      ::unlink(ep_.path.c_str());
      listen_fd_ = detail::Fd(::socket(AF_UNIX, SOCK_STREAM, 0));
      if (!listen_fd_.valid())
        throw ProtocolError(std::string("socket failed: ") +
                            std::strerror(errno));
      sockaddr_un sa{};
      sa.sun_family = AF_UNIX;
      std::strncpy(sa.sun_path, ep_.path.c_str(), sizeof(sa.sun_path) - 1);
      if (::bind(listen_fd_.get(), reinterpret_cast<sockaddr*>(&sa),
                 sizeof(sa)) < 0)
        throw ProtocolError("cannot bind '" + ep_.path +
                            "': " + std::strerror(errno));
    } else {
      listen_fd_ = detail::Fd(::socket(AF_INET, SOCK_STREAM, 0));
      if (!listen_fd_.valid())
        throw ProtocolError(std::string("socket failed: ") +
                            std::strerror(errno));
      int one = 1;
      ::setsockopt(listen_fd_.get(), SOL_SOCKET, SO_REUSEADDR, &one,
                   sizeof(one));
      sockaddr_in sa{};
      sa.sin_family = AF_INET;
      sa.sin_port = htons(ep_.port);
      if (ep_.host == "*" || ep_.host == "0.0.0.0") {
        sa.sin_addr.s_addr = INADDR_ANY;
      } else if (::inet_pton(AF_INET, ep_.host.c_str(), &sa.sin_addr) != 1) {
        addrinfo hints{};
        hints.ai_family = AF_INET;
        hints.ai_socktype = SOCK_STREAM;
        addrinfo* res = nullptr;
        if (::getaddrinfo(ep_.host.c_str(), nullptr, &hints, &res) != 0)
          throw ProtocolError("cannot resolve '" + ep_.host + "'");
        sa.sin_addr = reinterpret_cast<sockaddr_in*>(res->ai_addr)->sin_addr;
        ::freeaddrinfo(res);
      }
      if (::bind(listen_fd_.get(), reinterpret_cast<sockaddr*>(&sa),
                 sizeof(sa)) < 0)
        throw ProtocolError("cannot bind tcp endpoint: " +
                            std::string(std::strerror(errno)));
      sockaddr_in bound{};
      socklen_t blen = sizeof(bound);
      ::getsockname(listen_fd_.get(), reinterpret_cast<sockaddr*>(&bound),
                    &blen);
      port_ = ntohs(bound.sin_port);
    }
    if (::listen(listen_fd_.get(), 1) < 0)
      throw ProtocolError(std::string("listen failed: ") +
                          std::strerror(errno));
  }

  ~Server() {
    listen_fd_.reset();
    if (ep_.kind == Endpoint::Kind::Ipc) ::unlink(ep_.path.c_str());
  }

  // Bound TCP port (useful when the endpoint asked for port 0).
  uint16_t port() const { return port_; }

  uint64_t next_requests() const { return next_requests_; }

  // Blocks until TERM. One client at a time; requests are answered in
  // arrival order, strictly one response per request.
  void run() {
    while (true) {
      detail::Fd conn(::accept(listen_fd_.get(), nullptr, nullptr));
      if (!conn.valid()) {
        if (errno == EINTR) continue;
        return;  // listener closed
      }
      if (!serve_connection(conn.get())) return;  // TERM received
    }
  }

 private:
  // Returns false when the client asked the server to terminate.
  bool serve_connection(int fd) {
    while (true) {
      wire::WireMessage req;
      try {
        req = detail::read_frame(fd);
      } catch (const detail::PeerClosed&) {
        return true;  // client went away; wait for the next one
      } catch (const ProtocolError& e) {
        try {
          wire::WireMessage err;
          err.kind = wire::MsgKind::Error;
          err.message = e.what();
          detail::write_frame(fd, err);
        } catch (const ProtocolError&) {
        }
        return true;  // malformed framing: drop the connection
      }
      try {
        switch (req.kind) {
          case wire::MsgKind::InitReq: {
            if (req.protocol != wire::kProtocolVersion) {
              reply_error(fd, "unsupported protocol version " +
                                  std::to_string(req.protocol));
              break;
            }
            wire::WireMessage resp;
            resp.kind = wire::MsgKind::InitResp;
            resp.model = info_;
            detail::write_frame(fd, resp);
            break;
          }
          case wire::MsgKind::NextReq:
            handle_next(fd, req);
            break;
          case wire::MsgKind::Term:
            return false;
          default:
            reply_error(fd, std::string("unexpected message kind ") +
                                wire::kind_name(req.kind));
            break;
        }
      } catch (const ProtocolError&) {
        return true;  // write failed; connection is gone
      }
    }
  }

  void handle_next(int fd, const wire::WireMessage& req) {
    if (req.group >= info_.group_count()) {
      reply_error(fd, "unknown group " + std::to_string(req.group));
      return;
    }
    if (req.state.size() != info_.var_count()) {
      reply_error(fd, "state has the wrong length");
      return;
    }
    // Dummy (null) values at read-independent positions become the domain
    // minimum; read independence makes the choice irrelevant.
    StateVector rep(info_.var_count(), 0);
    for (size_t j = 0; j < req.state.size(); ++j) {
      if (!req.state[j]) continue;
      if (*req.state[j] >= info_.domains[j].size()) {
        reply_error(fd, "value index out of domain at position " +
                            std::to_string(j));
        return;
      }
      rep[j] = *req.state[j];
    }
    ++next_requests_;
    wire::WireMessage resp;
    try {
      resp.kind = wire::MsgKind::NextResp;
      resp.successors = successors(em_, req.group, rep);
    } catch (const Error& e) {
      reply_error(fd, e.what());
      return;
    }
    detail::write_frame(fd, resp);
  }

  void reply_error(int fd, const std::string& msg) {
    wire::WireMessage err;
    err.kind = wire::MsgKind::Error;
    err.message = msg;
    detail::write_frame(fd, err);
  }

  const ElaboratedMachine& em_;
  ModelInfo info_;
  Endpoint ep_;
  detail::Fd listen_fd_;
  uint16_t port_ = 0;
  uint64_t next_requests_ = 0;
};

inline void serve(const ElaboratedMachine& em, const DependencyMatrices& dm,
                  const std::string& endpoint) {
  Server(em, dm, endpoint).run();
}

// Client-side provider over a socket. Strictly synchronous: one request in
// flight, blocked until its response arrives. init() may be called again to
// start another run over the same connection; the server resends the full
// model description.
class RemoteProvider final : public NextStateProvider {
 public:
  explicit RemoteProvider(const std::string& endpoint, int timeout_ms = 10'000,
                          bool term_on_close = true)
      : ep_(parse_endpoint(endpoint)), timeout_ms_(timeout_ms),
        term_on_close_(term_on_close) {}

  ~RemoteProvider() override {
    if (fd_.valid() && term_on_close_) {
      try {
        wire::WireMessage term;
        term.kind = wire::MsgKind::Term;
        detail::write_frame(fd_.get(), term);
      } catch (const ProtocolError&) {
      }
    }
  }

  const ModelInfo& init() override {
    if (!fd_.valid()) fd_ = detail::connect_endpoint(ep_, timeout_ms_);
    wire::WireMessage req;
    req.kind = wire::MsgKind::InitReq;
    req.protocol = wire::kProtocolVersion;
    wire::WireMessage resp = roundtrip(req);
    if (resp.kind != wire::MsgKind::InitResp)
      throw ProtocolError(std::string("expected INIT_RESP, got ") +
                          wire::kind_name(resp.kind));
    info_ = resp.model;
    reset_counters(info_.group_count());
    return info_;
  }

 protected:
  std::vector<StateVector> next_state_impl(size_t group,
                                           const StateVector& src) override {
    wire::WireMessage req;
    req.kind = wire::MsgKind::NextReq;
    req.group = static_cast<uint32_t>(group);
    req.state.assign(info_.var_count(), std::nullopt);
    size_t k = 0;
    for (size_t j = 0; j < info_.var_count(); ++j)
      if (info_.rm[group][j]) req.state[j] = src[k++];
    if (k != src.size())
      throw ProtocolError("projected state has the wrong length");

    wire::WireMessage resp = roundtrip(req);
    if (resp.kind != wire::MsgKind::NextResp)
      throw ProtocolError(std::string("expected NEXT_RESP, got ") +
                          wire::kind_name(resp.kind));
    std::vector<StateVector> out;
    for (const auto& full : resp.successors) {
      if (full.size() != info_.var_count())
        throw ProtocolError("successor state has the wrong length");
      StateVector proj;
      for (size_t j = 0; j < info_.var_count(); ++j) {
        if (full[j] >= info_.domains[j].size())
          throw ProtocolError("successor value out of domain");
        if (info_.wm[group][j]) proj.push_back(full[j]);
      }
      out.push_back(std::move(proj));
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
  }

 private:
  wire::WireMessage roundtrip(const wire::WireMessage& req) {
    if (!fd_.valid()) throw ProtocolError("not connected");
    detail::write_frame(fd_.get(), req);
    wire::WireMessage resp = detail::read_frame(fd_.get());
    if (resp.kind == wire::MsgKind::Error)
      throw ProtocolError("server error: " + resp.message);
    return resp;
  }

  Endpoint ep_;
  int timeout_ms_;
  bool term_on_close_;
  detail::Fd fd_;
  ModelInfo info_;
};

inline std::unique_ptr<NextStateProvider> connect(const std::string& endpoint,
                                                  int timeout_ms = 10'000) {
  return std::make_unique<RemoteProvider>(endpoint, timeout_ms);
}

}  // namespace reach
