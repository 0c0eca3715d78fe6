#pragma once

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <deque>
#include <map>
#include <memory>
#include <mutex>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include "jetflow/field.hpp"
#include "jetflow/partition.hpp"

namespace jetflow {

/// Channel tags. Faces use the Face values 0..3.
namespace tag {
inline constexpr std::uint8_t barrier_arrive = 16;
inline constexpr std::uint8_t barrier_release = 17;
inline constexpr std::uint8_t gather = 18;
inline constexpr std::uint8_t control = 19;
}  // namespace tag

/// Wire header, little-endian: seq u64, source u32, face u8, payload bytes u64.
struct MessageHeader {
  std::uint64_t sequence = 0;
  std::uint32_t source = 0;
  std::uint8_t face = 0;
  std::uint64_t payload_bytes = 0;

  static constexpr std::size_t wire_size = 21;
};

struct Message {
  MessageHeader header;
  std::vector<double> payload;
};

std::vector<std::uint8_t> encode_frame(const Message& m);
/// Throws TransportError on a short buffer or a payload size that is not a whole number of doubles.
Message decode_frame(std::span<const std::uint8_t> bytes);
MessageHeader decode_header(std::span<const std::uint8_t> bytes);

using Clock = std::chrono::steady_clock;
using Millis = std::chrono::milliseconds;

/// Point-to-point transport between the workers of one run.
class Transport {
 public:
  virtual ~Transport() = default;
  virtual int rank() const = 0;
  virtual int size() const = 0;
  /// Non-blocking: the payload is owned by the transport from here on.
  virtual void send(int dest, std::uint8_t face, std::uint64_t seq, std::vector<double> payload) = 0;
  /// Next message from `source` on channel `face`. Throws DeadlockError on timeout
  /// and AbortedError when the group was aborted.
  virtual Message receive(int source, std::uint8_t face, Millis timeout) = 0;
  /// True when a message from `source` on `face` is already queued.
  virtual bool probe(int source, std::uint8_t face) = 0;
  /// Wakes every blocked receive in the group with AbortedError.
  virtual void abort(const std::string& reason) = 0;
};

/// Queued incoming messages of one worker, keyed by (source, channel).
class Mailbox {
 public:
  void push(Message m);
  Message pop(int source, std::uint8_t face, Clock::time_point deadline, const std::atomic<bool>& aborted,
              const std::string& abort_reason_prefix);
  bool contains(int source, std::uint8_t face);
  void wake();

 private:
  std::mutex mutex_;
  std::condition_variable cv_;
  std::map<std::pair<int, std::uint8_t>, std::deque<Message>> queues_;
};

/// In-process transport: worker threads share one hub of mailboxes.
class SharedHub {
 public:
  explicit SharedHub(int workers);
  std::unique_ptr<Transport> connect(int rank);
  int size() const { return static_cast<int>(boxes_.size()); }
  void abort(const std::string& reason);
  bool aborted() const { return aborted_.load(); }
  std::string abort_reason() const;

 private:
  friend class SharedTransport;
  std::vector<std::unique_ptr<Mailbox>> boxes_;
  std::atomic<bool> aborted_{false};
  mutable std::mutex reason_mutex_;
  std::string reason_;
};

struct Endpoint {
  std::string host = "127.0.0.1";
  int port = 0;
};

/// Listening socket bound before the transport starts, so port 0 can be used
/// and the chosen port published to peers.
class SocketListener {
 public:
  SocketListener(const std::string& host, int port);
  ~SocketListener();
  SocketListener(const SocketListener&) = delete;
  SocketListener& operator=(const SocketListener&) = delete;
  SocketListener(SocketListener&& other) noexcept;

  int port() const { return port_; }
  int release();

 private:
  int fd_ = -1;
  int port_ = 0;
};

/// Length-prefixed frames over TCP. Outgoing connections are opened lazily and
/// retried until `connect_timeout`; one receiver thread runs per accepted peer.
class SocketTransport : public Transport {
 public:
  SocketTransport(int rank, std::vector<Endpoint> endpoints, SocketListener listener,
                  Millis connect_timeout = Millis(10000));
  ~SocketTransport() override;

  int rank() const override { return rank_; }
  int size() const override { return static_cast<int>(endpoints_.size()); }
  void send(int dest, std::uint8_t face, std::uint64_t seq, std::vector<double> payload) override;
  Message receive(int source, std::uint8_t face, Millis timeout) override;
  bool probe(int source, std::uint8_t face) override;
  void abort(const std::string& reason) override;

 private:
  void accept_loop();
  void read_loop(int fd);
  int connection(int dest);

  int rank_;
  std::vector<Endpoint> endpoints_;
  int listen_fd_;
  Millis connect_timeout_;
  std::vector<int> out_fds_;
  std::mutex out_mutex_;
  Mailbox inbox_;
  std::atomic<bool> aborted_{false};
  std::atomic<bool> stopping_{false};
  std::string reason_;
  std::thread acceptor_;
  std::mutex readers_mutex_;
  std::vector<std::thread> readers_;
  std::vector<int> in_fds_;
};

/// Blocks until every worker of the transport's group has entered. Rank 0
/// gathers arrivals and releases everyone. On timeout the message lists the
/// workers that never arrived.
void barrier(Transport& t, std::uint64_t phase, Millis timeout);

/// All-gather among the partitions of one azimuthal ring. Every member passes
/// its owned span [k_begin, k_end) of distinct stations and a payload; the result
/// is the concatenation in ring order. Throws PartitionError when the spans
/// overlap or leave a gap.
std::vector<double> azimuthal_gather(Transport& t, const std::vector<int>& ring, int k_begin, int k_end,
                                     int distinct_stations, std::span<const double> local, std::uint64_t seq,
                                     Millis timeout);

/// In-flight halo exchange token.
class ExchangeHandle {
 public:
  bool completed() const { return completed_; }

 private:
  friend class HaloExchanger;
  ConservativeField* field_ = nullptr;
  std::uint64_t sequence_ = 0;
  bool completed_ = true;
};

/// Two-layer ghost exchange of one partition.
///
/// post() packs and sends the axial faces; complete() receives them and then
/// exchanges the azimuthal faces over the full local axial range, which fills
/// the corner ghosts. With one azimuthal partition the periodic images are
/// copied locally instead.
class HaloExchanger {
 public:
  HaloExchanger(const PartitionTopology& topology, int partition_id, Transport& transport,
                Millis timeout = Millis(60000));

  ExchangeHandle post(ConservativeField& field);
  /// Idempotent. Throws DeadlockError naming the pending neighbours on timeout.
  void complete(ExchangeHandle& handle);
  void exchange(ConservativeField& field);

 private:
  std::vector<double> pack(const ConservativeField& f, const Partition& receiver, Face receiver_face) const;
  void unpack(ConservativeField& f, Face my_face, std::span<const double> payload) const;
  Message receive_from(Face face, std::uint64_t seq);

  const PartitionTopology* topology_;
  const Partition* self_;
  Transport* transport_;
  Millis timeout_;
  std::uint64_t next_sequence_ = 1;
};

/// Sequential reference: fills every ghost of every block from the owned data
/// of all blocks, as a completed exchange would.
void reference_exchange(const PartitionTopology& topology, std::vector<ConservativeField>& fields);

}  // namespace jetflow
