#include "coopgame/transport.hpp"

#include <arpa/inet.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <cstring>
#include <regex>

#include "coopgame/errors.hpp"

namespace coopgame {

using nlohmann::json;

namespace {

// Nonnegative integer, whether the parser stored it signed or unsigned.
bool is_nonneg_integer(const json& v) {
  return v.is_number_unsigned() || (v.is_number_integer() && v.get<std::int64_t>() >= 0);
}


constexpr std::uint64_t kMaxSampleCount = std::uint64_t{1} << 26;

const char* const kKindNames[] = {"SAMPLE_REQUEST", "SAMPLE_BATCH", "SCHEMA_REQUEST", "SCHEMA_RESPONSE", "ERROR"};

bool is_hex16(const std::string& s) {
  static const std::regex re("^[0-9a-f]{16}$");
  return std::regex_match(s, re);
}

void require_fields(const json& obj, std::initializer_list<const char*> names, const std::string& where) {
  if (!obj.is_object()) throw SchemaError(where + ": expected an object");
  for (const char* n : names)
    if (!obj.contains(n)) throw SchemaError(where + ": missing field '" + n + "'");
  for (const auto& [key, _] : obj.items())
    if (std::find_if(names.begin(), names.end(), [&](const char* n) { return key == n; }) == names.end())
      throw SchemaError(where + ": unexpected field '" + key + "'");
}

std::uint64_t get_u64(const json& obj, const char* name) {
  const json& v = obj.at(name);
  if (!is_nonneg_integer(v)) throw SchemaError(std::string("field '") + name + "' must be an unsigned integer");
  return v.get<std::uint64_t>();
}

std::uint32_t get_u32(const json& obj, const char* name) {
  const std::uint64_t v = get_u64(obj, name);
  if (v > 0xffffffffULL) throw SchemaError(std::string("field '") + name + "' exceeds 32 bits");
  return static_cast<std::uint32_t>(v);
}

std::int64_t get_i64(const json& obj, const char* name) {
  const json& v = obj.at(name);
  if (is_nonneg_integer(v)) {
    if (v.get<std::uint64_t>() > static_cast<std::uint64_t>(INT64_MAX))
      throw SchemaError(std::string("field '") + name + "' exceeds 63 bits");
    return static_cast<std::int64_t>(v.get<std::uint64_t>());
  }
  if (!v.is_number_integer()) throw SchemaError(std::string("field '") + name + "' must be an integer");
  return v.get<std::int64_t>();
}

json payload_to_json(const SampleRequest& r) {
  return {{"target_player", r.target_player}, {"count", r.count}, {"seed_tag", r.seed_tag}};
}
json payload_to_json(const SampleChunk& c) {
  return {{"space_id", c.batch.space_id},       {"outcomes", c.batch.outcomes},
          {"source_player", c.batch.source_player}, {"seed_tag", c.batch.seed_tag},
          {"chunk_index", c.chunk_index},        {"chunk_count", c.chunk_count}};
}
json payload_to_json(const SchemaRequest& r) { return {{"target_player", r.target_player}}; }
json payload_to_json(const SchemaResponse& r) { return {{"player", r.player}, {"space", r.space}}; }
json payload_to_json(const ErrorPayload& e) { return {{"code", e.code}, {"reason", to_string(e.reason)}}; }

constexpr ErrorReason kReasons[] = {ErrorReason::MalformedFrame, ErrorReason::FrameTooLarge, ErrorReason::UnknownPlayer,
                                    ErrorReason::CountTooLarge, ErrorReason::UnexpectedRequest};

Message error_reply(std::uint64_t request_id, std::int64_t code, ErrorReason reason) {
  return Message{request_id, ErrorPayload{code, reason}};
}

std::string describe(const ErrorPayload& e) {
  return "peer replied with error " + std::to_string(e.code) + " (" + to_string(e.reason) + ")";
}

// --- socket helpers -------------------------------------------------------

bool write_all(int fd, const char* data, std::size_t n) {
  while (n > 0) {
    const ssize_t w = ::send(fd, data, n, MSG_NOSIGNAL);
    if (w < 0) {
      if (errno == EINTR) continue;
      return false;
    }
    data += w;
    n -= static_cast<std::size_t>(w);
  }
  return true;
}

bool read_all(int fd, char* data, std::size_t n) {
  while (n > 0) {
    const ssize_t r = ::recv(fd, data, n, 0);
    if (r == 0) return false;
    if (r < 0) {
      if (errno == EINTR) continue;
      return false;
    }
    data += r;
    n -= static_cast<std::size_t>(r);
  }
  return true;
}

std::uint32_t read_be32(const char* p) {
  return (std::uint32_t{static_cast<unsigned char>(p[0])} << 24) |
         (std::uint32_t{static_cast<unsigned char>(p[1])} << 16) |
         (std::uint32_t{static_cast<unsigned char>(p[2])} << 8) | std::uint32_t{static_cast<unsigned char>(p[3])};
}

bool send_message(int fd, const Message& m) {
  const std::string frame = encode_frame(m);
  return write_all(fd, frame.data(), frame.size());
}

}  // namespace

const char* to_string(MessageKind kind) { return kKindNames[static_cast<std::size_t>(kind)]; }

const char* to_string(ErrorReason reason) {
  switch (reason) {
    case ErrorReason::MalformedFrame: return "malformed_frame";
    case ErrorReason::FrameTooLarge: return "frame_too_large";
    case ErrorReason::UnknownPlayer: return "unknown_player";
    case ErrorReason::CountTooLarge: return "count_too_large";
    case ErrorReason::UnexpectedRequest: return "unexpected_request";
  }
  return "?";
}

json to_json(const Message& message) {
  json payload = std::visit([](const auto& p) { return payload_to_json(p); }, message.payload);
  return {{"kind", to_string(message.kind())}, {"request_id", message.request_id}, {"payload", std::move(payload)}};
}

Message message_from_json(const json& j) {
  require_fields(j, {"kind", "request_id", "payload"}, "message");
  if (!j.at("kind").is_string()) throw SchemaError("message: 'kind' must be a string");
  const std::string kind = j.at("kind").get<std::string>();
  Message m;
  m.request_id = get_u64(j, "request_id");
  const json& p = j.at("payload");

  if (kind == "SAMPLE_REQUEST") {
    require_fields(p, {"target_player", "count", "seed_tag"}, "SAMPLE_REQUEST");
    m.payload = SampleRequest{get_u64(p, "target_player"), get_u64(p, "count"), get_u64(p, "seed_tag")};
  } else if (kind == "SAMPLE_BATCH") {
    require_fields(p, {"space_id", "outcomes", "source_player", "seed_tag", "chunk_index", "chunk_count"},
                   "SAMPLE_BATCH");
    SampleChunk c;
    const json& id = p.at("space_id");
    if (!id.is_string() || !is_hex16(id.get<std::string>()))
      throw SchemaError("SAMPLE_BATCH: 'space_id' must be 16 lowercase hex digits");
    c.batch.space_id = id.get<std::string>();
    const json& outs = p.at("outcomes");
    if (!outs.is_array()) throw SchemaError("SAMPLE_BATCH: 'outcomes' must be an array");
    c.batch.outcomes.reserve(outs.size());
    for (const json& o : outs) {
      if (!is_nonneg_integer(o) || o.get<std::uint64_t>() > 0xffffffffULL)
        throw SchemaError("SAMPLE_BATCH: outcomes must be unsigned 32-bit integers");
      c.batch.outcomes.push_back(o.get<std::uint32_t>());
    }
    c.batch.source_player = get_i64(p, "source_player");
    c.batch.seed_tag = get_u64(p, "seed_tag");
    c.chunk_index = get_u32(p, "chunk_index");
    c.chunk_count = get_u32(p, "chunk_count");
    if (c.chunk_count == 0 || c.chunk_index >= c.chunk_count)
      throw SchemaError("SAMPLE_BATCH: chunk index out of range");
    m.payload = std::move(c);
  } else if (kind == "SCHEMA_REQUEST") {
    require_fields(p, {"target_player"}, "SCHEMA_REQUEST");
    m.payload = SchemaRequest{get_u64(p, "target_player")};
  } else if (kind == "SCHEMA_RESPONSE") {
    require_fields(p, {"player", "space"}, "SCHEMA_RESPONSE");
    const FiniteSpace space = FiniteSpace::from_json(p.at("space"));
    m.payload = SchemaResponse{get_u64(p, "player"), space.to_json()};
  } else if (kind == "ERROR") {
    require_fields(p, {"code", "reason"}, "ERROR");
    const json& r = p.at("reason");
    const auto* reason = std::find_if(std::begin(kReasons), std::end(kReasons),
                                      [&](ErrorReason x) { return r.is_string() && r.get<std::string>() == to_string(x); });
    if (reason == std::end(kReasons)) throw SchemaError("ERROR: unknown reason");
    m.payload = ErrorPayload{get_i64(p, "code"), *reason};
  } else {
    throw SchemaError("unknown message kind '" + kind + "'");
  }
  return m;
}

std::string encode_frame(const Message& message) {
  const std::string body = to_json(message).dump();
  if (body.size() > kMaxFrameBytes) throw TransportError("message exceeds the frame size limit");
  const auto n = static_cast<std::uint32_t>(body.size());
  std::string frame;
  frame.reserve(4 + body.size());
  frame.push_back(static_cast<char>((n >> 24) & 0xff));
  frame.push_back(static_cast<char>((n >> 16) & 0xff));
  frame.push_back(static_cast<char>((n >> 8) & 0xff));
  frame.push_back(static_cast<char>(n & 0xff));
  frame += body;
  return frame;
}

Message decode_frame(std::string_view frame) {
  if (frame.size() < 4) throw SchemaError("frame shorter than its length prefix");
  const std::uint32_t n = read_be32(frame.data());
  if (n > kMaxFrameBytes) throw SchemaError("frame length exceeds the limit");
  if (frame.size() - 4 != n) throw SchemaError("frame length prefix does not match the payload");
  json j = json::parse(frame.substr(4), nullptr, false);
  if (j.is_discarded()) throw SchemaError("frame payload is not valid JSON");
  return message_from_json(j);
}

std::vector<SchemaField> message_schema() {
  return {
      {"*", "kind", "enum"},
      {"*", "request_id", "u64"},
      {"SAMPLE_REQUEST", "target_player", "u64"},
      {"SAMPLE_REQUEST", "count", "u64"},
      {"SAMPLE_REQUEST", "seed_tag", "u64"},
      {"SAMPLE_BATCH", "space_id", "hex16"},
      {"SAMPLE_BATCH", "outcomes", "u32[]"},
      {"SAMPLE_BATCH", "source_player", "i64"},
      {"SAMPLE_BATCH", "seed_tag", "u64"},
      {"SAMPLE_BATCH", "chunk_index", "u32"},
      {"SAMPLE_BATCH", "chunk_count", "u32"},
      {"SCHEMA_REQUEST", "target_player", "u64"},
      {"SCHEMA_RESPONSE", "player", "u64"},
      {"SCHEMA_RESPONSE", "space", "space"},
      {"ERROR", "code", "i64"},
      {"ERROR", "reason", "enum"},
  };
}

// --- NodeService ----------------------------------------------------------

NodeService::NodeService(std::uint64_t player, FiniteSpace space, std::shared_ptr<ModelHandle> model,
                         std::size_t chunk_cap)
    : player_(player), space_(std::move(space)), model_(std::move(model)), chunk_cap_(chunk_cap) {
  if (chunk_cap_ == 0) throw ValidationError("chunk cap must be positive");
}

std::vector<Message> NodeService::handle(const Message& request) const {
  if (const auto* r = std::get_if<SampleRequest>(&request.payload)) {
    if (r->target_player != player_)
      return {error_reply(request.request_id, 404, ErrorReason::UnknownPlayer)};
    if (r->count > kMaxSampleCount) return {error_reply(request.request_id, 413, ErrorReason::CountTooLarge)};

    const auto snapshot = model_->snapshot();
    Rng rng(r->seed_tag);
    SampleBatch full = snapshot->sample(static_cast<std::size_t>(r->count), rng);

    const std::size_t n = full.outcomes.size();
    const std::size_t chunks = n == 0 ? 1 : (n + chunk_cap_ - 1) / chunk_cap_;
    std::vector<Message> out;
    out.reserve(chunks);
    for (std::size_t c = 0; c < chunks; ++c) {
      SampleChunk chunk;
      chunk.batch.space_id = full.space_id;
      chunk.batch.source_player = static_cast<std::int64_t>(player_);
      chunk.batch.seed_tag = r->seed_tag;
      const std::size_t lo = c * chunk_cap_, hi = std::min(n, lo + chunk_cap_);
      chunk.batch.outcomes.assign(full.outcomes.begin() + static_cast<std::ptrdiff_t>(lo),
                                  full.outcomes.begin() + static_cast<std::ptrdiff_t>(hi));
      chunk.chunk_index = static_cast<std::uint32_t>(c);
      chunk.chunk_count = static_cast<std::uint32_t>(chunks);
      out.push_back(Message{request.request_id, std::move(chunk)});
    }
    return out;
  }
  if (const auto* r = std::get_if<SchemaRequest>(&request.payload)) {
    if (r->target_player != player_)
      return {error_reply(request.request_id, 404, ErrorReason::UnknownPlayer)};
    return {Message{request.request_id, SchemaResponse{player_, space_.to_json()}}};
  }
  return {error_reply(request.request_id, 400, ErrorReason::UnexpectedRequest)};
}

void ServiceDirectory::add(std::shared_ptr<const NodeService> service) {
  const auto id = service->player();
  if (!services_.emplace(id, std::move(service)).second)
    throw ValidationError("player " + std::to_string(id) + " registered twice");
}

std::vector<Message> ServiceDirectory::handle(const Message& request) const {
  std::uint64_t target = 0;
  if (const auto* r = std::get_if<SampleRequest>(&request.payload))
    target = r->target_player;
  else if (const auto* s = std::get_if<SchemaRequest>(&request.payload))
    target = s->target_player;
  else
    return {error_reply(request.request_id, 400, ErrorReason::UnexpectedRequest)};
  auto it = services_.find(target);
  if (it == services_.end()) return {error_reply(request.request_id, 404, ErrorReason::UnknownPlayer)};
  return it->second->handle(request);
}

// --- reassembly -----------------------------------------------------------

SampleBatch reassemble(const std::vector<Message>& responses, std::uint64_t request_id,
                       std::uint64_t expected_count) {
  if (responses.empty()) throw TransportError("no response");
  std::vector<const SampleChunk*> chunks;
  for (const Message& m : responses) {
    if (m.request_id != request_id) throw TransportError("response carries a foreign request id");
    if (const auto* e = std::get_if<ErrorPayload>(&m.payload))
      throw TransportError(describe(*e));
    const auto* c = std::get_if<SampleChunk>(&m.payload);
    if (!c) throw TransportError(std::string("expected SAMPLE_BATCH, got ") + to_string(m.kind()));
    chunks.push_back(c);
  }
  std::sort(chunks.begin(), chunks.end(),
            [](const SampleChunk* a, const SampleChunk* b) { return a->chunk_index < b->chunk_index; });
  const SampleChunk& head = *chunks.front();
  if (chunks.size() != head.chunk_count) throw TransportError("missing sample chunks");
  SampleBatch out;
  out.space_id = head.batch.space_id;
  out.source_player = head.batch.source_player;
  out.seed_tag = head.batch.seed_tag;
  for (std::size_t k = 0; k < chunks.size(); ++k) {
    const SampleChunk& c = *chunks[k];
    if (c.chunk_count != head.chunk_count || c.chunk_index != k || c.batch.space_id != out.space_id ||
        c.batch.source_player != out.source_player || c.batch.seed_tag != out.seed_tag)
      throw TransportError("inconsistent sample chunks");
    out.outcomes.insert(out.outcomes.end(), c.batch.outcomes.begin(), c.batch.outcomes.end());
  }
  if (out.outcomes.size() != expected_count)
    throw TransportError("peer returned " + std::to_string(out.outcomes.size()) + " outcomes, expected " +
                         std::to_string(expected_count));
  return out;
}

namespace {

FiniteSpace schema_from(const std::vector<Message>& responses, std::uint64_t request_id) {
  if (responses.size() != 1) throw TransportError("expected a single schema response");
  const Message& m = responses.front();
  if (m.request_id != request_id) throw TransportError("response carries a foreign request id");
  if (const auto* e = std::get_if<ErrorPayload>(&m.payload))
    throw TransportError(describe(*e));
  const auto* s = std::get_if<SchemaResponse>(&m.payload);
  if (!s) throw TransportError(std::string("expected SCHEMA_RESPONSE, got ") + to_string(m.kind()));
  return FiniteSpace::from_json(s->space);
}

}  // namespace

// --- InProcessTransport ---------------------------------------------------

SampleBatch InProcessTransport::request_samples(std::uint64_t target_player, std::uint64_t count,
                                                std::uint64_t seed_tag) {
  const std::uint64_t id = next_id_++;
  ++round_trips_;
  const Message request{id, SampleRequest{target_player, count, seed_tag}};
  try {
    return reassemble(directory_->handle(request), id, count);
  } catch (const TransportError& e) {
    throw TransportError("player " + std::to_string(target_player) + ": " + e.what());
  }
}

FiniteSpace InProcessTransport::request_schema(std::uint64_t target_player) {
  const std::uint64_t id = next_id_++;
  ++round_trips_;
  try {
    return schema_from(directory_->handle(Message{id, SchemaRequest{target_player}}), id);
  } catch (const TransportError& e) {
    throw TransportError("player " + std::to_string(target_player) + ": " + e.what());
  }
}

// --- SocketServer ---------------------------------------------------------

SocketServer::SocketServer(std::shared_ptr<const ServiceDirectory> directory, std::string host, std::uint16_t port)
    : directory_(std::move(directory)), host_(std::move(host)) {
  listen_fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
  if (listen_fd_ < 0) throw TransportError(std::string("socket: ") + std::strerror(errno));
  int one = 1;
  ::setsockopt(listen_fd_, SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_port = htons(port);
  if (::inet_pton(AF_INET, host_.c_str(), &addr.sin_addr) != 1) {
    ::close(listen_fd_);
    throw TransportError("invalid listen address '" + host_ + "'");
  }
  if (::bind(listen_fd_, reinterpret_cast<sockaddr*>(&addr), sizeof addr) < 0 || ::listen(listen_fd_, 64) < 0) {
    const std::string why = std::strerror(errno);
    ::close(listen_fd_);
    throw TransportError("cannot listen on " + host_ + ":" + std::to_string(port) + ": " + why);
  }
  socklen_t len = sizeof addr;
  ::getsockname(listen_fd_, reinterpret_cast<sockaddr*>(&addr), &len);
  port_ = ntohs(addr.sin_port);
  acceptor_ = std::thread([this] { accept_loop(); });
}

SocketServer::~SocketServer() { stop(); }

void SocketServer::stop() {
  if (stopping_.exchange(true)) return;
  ::shutdown(listen_fd_, SHUT_RDWR);
  if (acceptor_.joinable()) acceptor_.join();
  ::close(listen_fd_);
  std::vector<std::thread> threads;
  {
    std::lock_guard lock(connections_mutex_);
    for (int fd : connection_fds_) ::shutdown(fd, SHUT_RDWR);
    threads.swap(connections_);
  }
  for (auto& t : threads) t.join();
}

void SocketServer::accept_loop() {
  while (!stopping_) {
    pollfd pfd{listen_fd_, POLLIN, 0};
    const int ready = ::poll(&pfd, 1, 100);
    if (ready <= 0) continue;
    const int fd = ::accept(listen_fd_, nullptr, nullptr);
    if (fd < 0) continue;
    int one = 1;
    ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);
    std::lock_guard lock(connections_mutex_);
    if (stopping_) {
      ::close(fd);
      break;
    }
    connection_fds_.push_back(fd);
    connections_.emplace_back([this, fd] { serve_connection(fd); });
  }
}

void SocketServer::serve_connection(int fd) {
  int malformed = 0;
  std::string body;
  while (!stopping_) {
    char prefix[4];
    if (!read_all(fd, prefix, 4)) break;
    const std::uint32_t n = read_be32(prefix);
    if (n > kMaxFrameBytes) {
      send_message(fd, error_reply(0, 413, ErrorReason::FrameTooLarge));
      break;
    }
    body.resize(n);
    if (!read_all(fd, body.data(), n)) break;

    Message request;
    try {
      json j = json::parse(body, nullptr, false);
      if (j.is_discarded()) throw SchemaError("payload is not valid JSON");
      request = message_from_json(j);
    } catch (const Error&) {
      if (!send_message(fd, error_reply(0, 400, ErrorReason::MalformedFrame))) break;
      if (++malformed >= 3) break;
      continue;
    }
    bool ok = true;
    for (const Message& reply : directory_->handle(request)) ok = ok && send_message(fd, reply);
    if (!ok) break;
  }
  std::lock_guard lock(connections_mutex_);
  ::close(fd);
  connection_fds_.erase(std::remove(connection_fds_.begin(), connection_fds_.end(), fd), connection_fds_.end());
}

// --- SocketTransport ------------------------------------------------------

struct SocketTransport::Connection {
  NodeEndpoint endpoint;
  int fd = -1;
  std::mutex mutex;

  ~Connection() { close(); }
  void close() {
    if (fd >= 0) ::close(fd);
    fd = -1;
  }
};

SocketTransport::SocketTransport(std::vector<NodeEndpoint> endpoints, std::chrono::milliseconds timeout)
    : timeout_(timeout) {
  for (auto& e : endpoints) {
    if (e.kind != NodeEndpoint::Kind::Socket) throw ValidationError("socket transport given a non-socket endpoint");
    auto conn = std::make_unique<Connection>();
    conn->endpoint = e;
    if (!connections_.emplace(e.player, std::move(conn)).second)
      throw ValidationError("player " + std::to_string(e.player) + " listed twice");
  }
}

SocketTransport::~SocketTransport() = default;

SocketTransport::Connection& SocketTransport::connection(std::uint64_t player) {
  auto it = connections_.find(player);
  if (it == connections_.end()) throw TransportError("no endpoint for player " + std::to_string(player));
  return *it->second;
}

std::vector<Message> SocketTransport::exchange(std::uint64_t target_player, const Message& request) {
  Connection& conn = connection(target_player);
  std::lock_guard lock(conn.mutex);
  const std::string who = "player " + std::to_string(target_player) + " at " + conn.endpoint.host + ":" +
                          std::to_string(conn.endpoint.port);

  if (conn.fd < 0) {
    conn.fd = ::socket(AF_INET, SOCK_STREAM, 0);
    if (conn.fd < 0) throw TransportError(who + ": socket: " + std::strerror(errno));
    timeval tv{};
    tv.tv_sec = static_cast<time_t>(timeout_.count() / 1000);
    tv.tv_usec = static_cast<suseconds_t>((timeout_.count() % 1000) * 1000);
    ::setsockopt(conn.fd, SOL_SOCKET, SO_RCVTIMEO, &tv, sizeof tv);
    ::setsockopt(conn.fd, SOL_SOCKET, SO_SNDTIMEO, &tv, sizeof tv);
    int one = 1;
    ::setsockopt(conn.fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);
    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_port = htons(conn.endpoint.port);
    if (::inet_pton(AF_INET, conn.endpoint.host.c_str(), &addr.sin_addr) != 1) {
      conn.close();
      throw TransportError(who + ": invalid address");
    }
    if (::connect(conn.fd, reinterpret_cast<sockaddr*>(&addr), sizeof addr) < 0) {
      const std::string why = std::strerror(errno);
      conn.close();
      throw TransportError(who + ": connect failed: " + why);
    }
  }

  auto fail = [&](const std::string& what) -> TransportError {
    conn.close();
    return TransportError(who + ": " + what);
  };

  if (!send_message(conn.fd, request)) throw fail("send failed");
  std::vector<Message> responses;
  std::string body;
  for (;;) {
    char prefix[4];
    if (!read_all(conn.fd, prefix, 4)) throw fail(errno == EAGAIN || errno == EWOULDBLOCK ? "timed out" : "connection lost");
    const std::uint32_t n = read_be32(prefix);
    if (n > kMaxFrameBytes) throw fail("oversized response frame");
    body.resize(n);
    if (!read_all(conn.fd, body.data(), n)) throw fail("connection lost mid-frame");
    json j = json::parse(body, nullptr, false);
    if (j.is_discarded()) throw fail("malformed response frame");
    try {
      responses.push_back(message_from_json(j));
    } catch (const SchemaError& e) {
      throw fail(std::string("malformed response: ") + e.what());
    }
    const Message& m = responses.back();
    if (const auto* c = std::get_if<SampleChunk>(&m.payload)) {
      if (c->chunk_index + 1 < c->chunk_count) continue;
    }
    break;
  }
  return responses;
}

SampleBatch SocketTransport::request_samples(std::uint64_t target_player, std::uint64_t count,
                                             std::uint64_t seed_tag) {
  const std::uint64_t id = next_id_++;
  ++round_trips_;
  auto responses = exchange(target_player, Message{id, SampleRequest{target_player, count, seed_tag}});
  try {
    return reassemble(responses, id, count);
  } catch (const TransportError& e) {
    throw TransportError("player " + std::to_string(target_player) + ": " + e.what());
  }
}

FiniteSpace SocketTransport::request_schema(std::uint64_t target_player) {
  const std::uint64_t id = next_id_++;
  ++round_trips_;
  auto responses = exchange(target_player, Message{id, SchemaRequest{target_player}});
  try {
    return schema_from(responses, id);
  } catch (const TransportError& e) {
    throw TransportError("player " + std::to_string(target_player) + ": " + e.what());
  }
}

}  // namespace coopgame
