#pragma once

#include <atomic>
#include <chrono>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <string_view>
#include <thread>
#include <variant>
#include <vector>

#include <json.hpp>

#include "coopgame/model.hpp"
#include "coopgame/sample_batch.hpp"

namespace coopgame {

// ---------------------------------------------------------------------------
// Messages
//
// Wire frame: 4-byte big-endian payload length, then a JSON object
//   {"kind": "...", "request_id": <u64>, "payload": {...}}
// Decoding is strict: unknown kinds, unknown fields and wrongly typed fields
// are rejected. A SAMPLE_BATCH payload holds only unsigned integers and a
// 16-hex-digit space id, so it has no field able to carry model parameters
// or free-form provenance.

enum class MessageKind { SampleRequest, SampleBatch, SchemaRequest, SchemaResponse, Error };

struct SampleRequest {
  std::uint64_t target_player = 0;
  std::uint64_t count = 0;
  std::uint64_t seed_tag = 0;
  friend bool operator==(const SampleRequest&, const SampleRequest&) = default;
};

struct SampleChunk {
  SampleBatch batch;
  std::uint32_t chunk_index = 0;
  std::uint32_t chunk_count = 1;
  friend bool operator==(const SampleChunk&, const SampleChunk&) = default;
};

struct SchemaRequest {
  std::uint64_t target_player = 0;
  friend bool operator==(const SchemaRequest&, const SchemaRequest&) = default;
};

struct SchemaResponse {
  std::uint64_t player = 0;
  nlohmann::json space;  // canonical FiniteSpace JSON
  friend bool operator==(const SchemaResponse&, const SchemaResponse&) = default;
};

/// Fixed vocabulary, so an ERROR cannot smuggle free-form content.
enum class ErrorReason { MalformedFrame, FrameTooLarge, UnknownPlayer, CountTooLarge, UnexpectedRequest };

const char* to_string(ErrorReason reason);

struct ErrorPayload {
  std::int64_t code = 0;
  ErrorReason reason = ErrorReason::MalformedFrame;
  friend bool operator==(const ErrorPayload&, const ErrorPayload&) = default;
};

struct Message {
  std::uint64_t request_id = 0;
  std::variant<SampleRequest, SampleChunk, SchemaRequest, SchemaResponse, ErrorPayload> payload;

  MessageKind kind() const { return static_cast<MessageKind>(payload.index()); }
  friend bool operator==(const Message&, const Message&) = default;
};

const char* to_string(MessageKind kind);

nlohmann::json to_json(const Message& message);
/// Throws SchemaError on anything that is not a well-formed message.
Message message_from_json(const nlohmann::json& j);

inline constexpr std::size_t kMaxFrameBytes = 64u << 20;
inline constexpr std::size_t kDefaultChunkCap = 1u << 14;

std::string encode_frame(const Message& message);
/// Decodes one complete frame (length prefix included).
Message decode_frame(std::string_view frame);

/// Field-by-field description of every message kind, as (kind, field, type)
/// rows. Types: "u64", "u32", "i64", "u32[]", "hex16", "space", "enum".
struct SchemaField {
  std::string kind;
  std::string field;
  std::string type;
};
std::vector<SchemaField> message_schema();

// ---------------------------------------------------------------------------
// Serving side

/// Answers requests addressed to one player from its published model.
class NodeService {
 public:
  NodeService(std::uint64_t player, FiniteSpace space, std::shared_ptr<ModelHandle> model,
              std::size_t chunk_cap = kDefaultChunkCap);

  std::uint64_t player() const { return player_; }
  const FiniteSpace& space() const { return space_; }

  /// Responses for one request. Sample requests are drawn from a snapshot
  /// taken on arrival with Rng(seed_tag), then split into chunks.
  std::vector<Message> handle(const Message& request) const;

 private:
  std::uint64_t player_;
  FiniteSpace space_;
  std::shared_ptr<ModelHandle> model_;
  std::size_t chunk_cap_;
};

/// Routes requests to the service of the addressed player; unknown players
/// get an ERROR with code 404.
class ServiceDirectory {
 public:
  void add(std::shared_ptr<const NodeService> service);
  std::vector<Message> handle(const Message& request) const;

 private:
  std::map<std::uint64_t, std::shared_ptr<const NodeService>> services_;
};

/// TCP responder. One thread accepts, one thread per connection serves
/// frames in order. Malformed frames get an ERROR reply; the third malformed
/// frame on a connection closes it.
class SocketServer {
 public:
  explicit SocketServer(std::shared_ptr<const ServiceDirectory> directory, std::string host = "127.0.0.1",
                        std::uint16_t port = 0);
  ~SocketServer();
  SocketServer(const SocketServer&) = delete;
  SocketServer& operator=(const SocketServer&) = delete;

  std::uint16_t port() const { return port_; }
  const std::string& host() const { return host_; }
  void stop();

 private:
  void accept_loop();
  void serve_connection(int fd);

  std::shared_ptr<const ServiceDirectory> directory_;
  std::string host_;
  std::uint16_t port_ = 0;
  int listen_fd_ = -1;
  std::atomic<bool> stopping_{false};
  std::thread acceptor_;
  std::mutex connections_mutex_;
  std::vector<std::thread> connections_;
  std::vector<int> connection_fds_;
};

// ---------------------------------------------------------------------------
// Requesting side

struct NodeEndpoint {
  std::uint64_t player = 0;
  enum class Kind { InProcess, Socket } kind = Kind::InProcess;
  std::string host;
  std::uint16_t port = 0;
};

class Transport {
 public:
  virtual ~Transport() = default;
  /// Exactly `count` outcomes from the target's current snapshot; equal
  /// (model state, seed_tag) give equal batches. Throws TransportError.
  virtual SampleBatch request_samples(std::uint64_t target_player, std::uint64_t count,
                                      std::uint64_t seed_tag) = 0;
  virtual FiniteSpace request_schema(std::uint64_t target_player) = 0;
  /// Request/response round trips issued so far.
  virtual std::size_t round_trips() const = 0;
};

class InProcessTransport final : public Transport {
 public:
  explicit InProcessTransport(std::shared_ptr<const ServiceDirectory> directory)
      : directory_(std::move(directory)) {}

  SampleBatch request_samples(std::uint64_t target_player, std::uint64_t count, std::uint64_t seed_tag) override;
  FiniteSpace request_schema(std::uint64_t target_player) override;
  std::size_t round_trips() const override { return round_trips_; }

 private:
  std::shared_ptr<const ServiceDirectory> directory_;
  std::atomic<std::uint64_t> next_id_{1};
  std::atomic<std::size_t> round_trips_{0};
};

class SocketTransport final : public Transport {
 public:
  explicit SocketTransport(std::vector<NodeEndpoint> endpoints,
                           std::chrono::milliseconds timeout = std::chrono::seconds(30));
  ~SocketTransport() override;

  SampleBatch request_samples(std::uint64_t target_player, std::uint64_t count, std::uint64_t seed_tag) override;
  FiniteSpace request_schema(std::uint64_t target_player) override;
  std::size_t round_trips() const override { return round_trips_; }

 private:
  struct Connection;
  std::vector<Message> exchange(std::uint64_t target_player, const Message& request);
  Connection& connection(std::uint64_t player);

  std::map<std::uint64_t, std::unique_ptr<Connection>> connections_;
  std::chrono::milliseconds timeout_;
  std::atomic<std::uint64_t> next_id_{1};
  std::atomic<std::size_t> round_trips_{0};
};

/// Merges the chunked SAMPLE_BATCH responses of one request; throws
/// TransportError on ERROR replies, missing chunks or a wrong total.
SampleBatch reassemble(const std::vector<Message>& responses, std::uint64_t request_id, std::uint64_t expected_count);

}  // namespace coopgame
