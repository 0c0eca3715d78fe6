#include "jetflow/exchange.hpp"

#include <arpa/inet.h>
#include <netdb.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <sys/socket.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <cstring>
#include <sstream>

namespace jetflow {

// ---------------------------------------------------------------- framing

namespace {

void put_le(std::vector<std::uint8_t>& out, std::uint64_t v, int bytes) {
  for (int b = 0; b < bytes; ++b) out.push_back(static_cast<std::uint8_t>(v >> (8 * b)));
}

std::uint64_t get_le(const std::uint8_t* p, int bytes) {
  std::uint64_t v = 0;
  for (int b = 0; b < bytes; ++b) v |= static_cast<std::uint64_t>(p[b]) << (8 * b);
  return v;
}

}  // namespace

std::vector<std::uint8_t> encode_frame(const Message& m) {
  std::vector<std::uint8_t> out;
  out.reserve(MessageHeader::wire_size + m.payload.size() * 8);
  put_le(out, m.header.sequence, 8);
  put_le(out, m.header.source, 4);
  put_le(out, m.header.face, 1);
  put_le(out, m.payload.size() * 8, 8);
  for (double v : m.payload) {
    std::uint64_t bits;
    std::memcpy(&bits, &v, 8);
    put_le(out, bits, 8);
  }
  return out;
}

MessageHeader decode_header(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < MessageHeader::wire_size) throw TransportError("truncated frame header");
  MessageHeader h;
  h.sequence = get_le(bytes.data(), 8);
  h.source = static_cast<std::uint32_t>(get_le(bytes.data() + 8, 4));
  h.face = static_cast<std::uint8_t>(bytes[12]);
  h.payload_bytes = get_le(bytes.data() + 13, 8);
  if (h.payload_bytes % 8 != 0) throw TransportError("payload of " + std::to_string(h.payload_bytes) + " bytes is not a whole number of doubles");
  return h;
}

Message decode_frame(std::span<const std::uint8_t> bytes) {
  Message m;
  m.header = decode_header(bytes);
  if (bytes.size() != MessageHeader::wire_size + m.header.payload_bytes) {
    throw TransportError("frame size " + std::to_string(bytes.size()) + " does not match header");
  }
  m.payload.resize(m.header.payload_bytes / 8);
  const std::uint8_t* p = bytes.data() + MessageHeader::wire_size;
  for (std::size_t i = 0; i < m.payload.size(); ++i) {
    const std::uint64_t bits = get_le(p + 8 * i, 8);
    std::memcpy(&m.payload[i], &bits, 8);
  }
  return m;
}

// ---------------------------------------------------------------- mailbox

void Mailbox::push(Message m) {
  {
    std::lock_guard lock(mutex_);
    queues_[{static_cast<int>(m.header.source), m.header.face}].push_back(std::move(m));
  }
  cv_.notify_all();
}

Message Mailbox::pop(int source, std::uint8_t face, Clock::time_point deadline, const std::atomic<bool>& aborted,
                     const std::string& abort_reason_prefix) {
  std::unique_lock lock(mutex_);
  const auto key = std::make_pair(source, face);
  for (;;) {
    if (aborted.load()) throw AbortedError(abort_reason_prefix);
    auto it = queues_.find(key);
    if (it != queues_.end() && !it->second.empty()) {
      Message m = std::move(it->second.front());
      it->second.pop_front();
      return m;
    }
    if (cv_.wait_until(lock, deadline) == std::cv_status::timeout) {
      it = queues_.find(key);
      if (it != queues_.end() && !it->second.empty()) continue;
      if (aborted.load()) throw AbortedError(abort_reason_prefix);
      throw DeadlockError("timed out waiting for worker " + std::to_string(source) + " on channel " +
                          std::to_string(face));
    }
  }
}

bool Mailbox::contains(int source, std::uint8_t face) {
  std::lock_guard lock(mutex_);
  auto it = queues_.find({source, face});
  return it != queues_.end() && !it->second.empty();
}

void Mailbox::wake() {
  { std::lock_guard lock(mutex_); }
  cv_.notify_all();
}

// ---------------------------------------------------------------- shared memory

class SharedTransport : public Transport {
 public:
  SharedTransport(SharedHub& hub, int rank) : hub_(hub), rank_(rank) {}
  int rank() const override { return rank_; }
  int size() const override { return hub_.size(); }

  void send(int dest, std::uint8_t face, std::uint64_t seq, std::vector<double> payload) override {
    if (dest < 0 || dest >= size()) throw TransportError("send from worker " + std::to_string(rank_) + " to unknown worker " + std::to_string(dest));
    if (hub_.aborted()) throw AbortedError("run aborted: " + hub_.abort_reason());
    Message m;
    m.header = {seq, static_cast<std::uint32_t>(rank_), face, payload.size() * 8};
    m.payload = std::move(payload);
    hub_.boxes_[static_cast<std::size_t>(dest)]->push(std::move(m));
  }

  Message receive(int source, std::uint8_t face, Millis timeout) override {
    try {
      return hub_.boxes_[static_cast<std::size_t>(rank_)]->pop(source, face, Clock::now() + timeout, hub_.aborted_,
                                                               "run aborted");
    } catch (const AbortedError&) {
      throw AbortedError("run aborted: " + hub_.abort_reason());
    }
  }

  bool probe(int source, std::uint8_t face) override {
    return hub_.boxes_[static_cast<std::size_t>(rank_)]->contains(source, face);
  }

  void abort(const std::string& reason) override { hub_.abort(reason); }

 private:
  SharedHub& hub_;
  int rank_;
};

SharedHub::SharedHub(int workers) {
  for (int r = 0; r < workers; ++r) boxes_.push_back(std::make_unique<Mailbox>());
}

std::unique_ptr<Transport> SharedHub::connect(int rank) { return std::make_unique<SharedTransport>(*this, rank); }

void SharedHub::abort(const std::string& reason) {
  {
    std::lock_guard lock(reason_mutex_);
    if (!aborted_.load()) reason_ = reason;
  }
  aborted_.store(true);
  for (auto& b : boxes_) b->wake();
}

std::string SharedHub::abort_reason() const {
  std::lock_guard lock(reason_mutex_);
  return reason_;
}

// ---------------------------------------------------------------- sockets

namespace {

std::string errno_text() { return std::strerror(errno); }

bool write_all(int fd, const std::uint8_t* p, std::size_t n) {
  while (n > 0) {
    const ssize_t w = ::send(fd, p, n, MSG_NOSIGNAL);
    if (w < 0) {
      if (errno == EINTR) continue;
      return false;
    }
    p += w;
    n -= static_cast<std::size_t>(w);
  }
  return true;
}

bool read_all(int fd, std::uint8_t* p, std::size_t n) {
  while (n > 0) {
    const ssize_t r = ::recv(fd, p, n, 0);
    if (r < 0 && errno == EINTR) continue;
    if (r <= 0) return false;
    p += r;
    n -= static_cast<std::size_t>(r);
  }
  return true;
}

sockaddr_in resolve(const std::string& host, int port) {
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_port = htons(static_cast<std::uint16_t>(port));
  if (::inet_pton(AF_INET, host.c_str(), &addr.sin_addr) != 1) {
    addrinfo hints{};
    hints.ai_family = AF_INET;
    addrinfo* res = nullptr;
    if (::getaddrinfo(host.c_str(), nullptr, &hints, &res) != 0 || res == nullptr) {
      throw TransportError("cannot resolve host '" + host + "'");
    }
    addr.sin_addr = reinterpret_cast<sockaddr_in*>(res->ai_addr)->sin_addr;
    ::freeaddrinfo(res);
  }
  return addr;
}

}  // namespace

SocketListener::SocketListener(const std::string& host, int port) {
  fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
  if (fd_ < 0) throw TransportError("socket: " + errno_text());
  int one = 1;
  ::setsockopt(fd_, SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);
  sockaddr_in addr = resolve(host, port);
  if (::bind(fd_, reinterpret_cast<sockaddr*>(&addr), sizeof addr) != 0) {
    const std::string why = errno_text();
    ::close(fd_);
    throw TransportError("bind " + host + ":" + std::to_string(port) + ": " + why);
  }
  if (::listen(fd_, 64) != 0) {
    const std::string why = errno_text();
    ::close(fd_);
    throw TransportError("listen: " + why);
  }
  socklen_t len = sizeof addr;
  ::getsockname(fd_, reinterpret_cast<sockaddr*>(&addr), &len);
  port_ = ntohs(addr.sin_port);
}

SocketListener::~SocketListener() {
  if (fd_ >= 0) ::close(fd_);
}

SocketListener::SocketListener(SocketListener&& other) noexcept : fd_(other.fd_), port_(other.port_) {
  other.fd_ = -1;
}

int SocketListener::release() {
  const int fd = fd_;
  fd_ = -1;
  return fd;
}

SocketTransport::SocketTransport(int rank, std::vector<Endpoint> endpoints, SocketListener listener,
                                 Millis connect_timeout)
    : rank_(rank),
      endpoints_(std::move(endpoints)),
      listen_fd_(listener.release()),
      connect_timeout_(connect_timeout),
      out_fds_(endpoints_.size(), -1) {
  acceptor_ = std::thread([this] { accept_loop(); });
}

SocketTransport::~SocketTransport() {
  stopping_.store(true);
  ::shutdown(listen_fd_, SHUT_RDWR);
  ::close(listen_fd_);
  if (acceptor_.joinable()) acceptor_.join();
  {
    std::lock_guard lock(out_mutex_);
    for (int fd : out_fds_)
      if (fd >= 0) ::close(fd);
  }
  {
    std::lock_guard lock(readers_mutex_);
    for (int fd : in_fds_) ::shutdown(fd, SHUT_RDWR);
  }
  for (auto& t : readers_)
    if (t.joinable()) t.join();
  for (int fd : in_fds_) ::close(fd);
}

void SocketTransport::accept_loop() {
  while (!stopping_.load()) {
    const int fd = ::accept(listen_fd_, nullptr, nullptr);
    if (fd < 0) {
      if (errno == EINTR) continue;
      return;
    }
    int one = 1;
    ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);
    std::lock_guard lock(readers_mutex_);
    if (stopping_.load()) {
      ::close(fd);
      return;
    }
    in_fds_.push_back(fd);
    readers_.emplace_back([this, fd] { read_loop(fd); });
  }
}

void SocketTransport::read_loop(int fd) {
  std::vector<std::uint8_t> head(MessageHeader::wire_size);
  while (!stopping_.load()) {
    if (!read_all(fd, head.data(), head.size())) return;
    MessageHeader h;
    try {
      h = decode_header(head);
    } catch (const TransportError&) {
      return;
    }
    std::vector<std::uint8_t> frame(head);
    frame.resize(MessageHeader::wire_size + h.payload_bytes);
    if (!read_all(fd, frame.data() + MessageHeader::wire_size, h.payload_bytes)) return;
    inbox_.push(decode_frame(frame));
  }
}

int SocketTransport::connection(int dest) {
  if (out_fds_[static_cast<std::size_t>(dest)] >= 0) return out_fds_[static_cast<std::size_t>(dest)];
  const Endpoint& ep = endpoints_[static_cast<std::size_t>(dest)];
  const sockaddr_in addr = resolve(ep.host, ep.port);
  const auto deadline = Clock::now() + connect_timeout_;
  for (;;) {
    const int fd = ::socket(AF_INET, SOCK_STREAM, 0);
    if (fd < 0) throw TransportError("socket: " + errno_text());
    if (::connect(fd, reinterpret_cast<const sockaddr*>(&addr), sizeof addr) == 0) {
      int one = 1;
      ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);
      out_fds_[static_cast<std::size_t>(dest)] = fd;
      return fd;
    }
    const std::string why = errno_text();
    ::close(fd);
    if (aborted_.load()) throw AbortedError("run aborted: " + reason_);
    if (Clock::now() > deadline) {
      throw TransportError("worker " + std::to_string(rank_) + " cannot connect to worker " + std::to_string(dest) +
                           " at " + ep.host + ":" + std::to_string(ep.port) + ": " + why);
    }
    std::this_thread::sleep_for(Millis(20));
  }
}

void SocketTransport::send(int dest, std::uint8_t face, std::uint64_t seq, std::vector<double> payload) {
  if (dest < 0 || dest >= size()) throw TransportError("send to unknown worker " + std::to_string(dest));
  if (aborted_.load()) throw AbortedError("run aborted: " + reason_);
  Message m;
  m.header = {seq, static_cast<std::uint32_t>(rank_), face, payload.size() * 8};
  m.payload = std::move(payload);
  if (dest == rank_) {
    inbox_.push(std::move(m));
    return;
  }
  const std::vector<std::uint8_t> frame = encode_frame(m);
  std::lock_guard lock(out_mutex_);
  const int fd = connection(dest);
  if (!write_all(fd, frame.data(), frame.size())) {
    throw TransportError("connection from worker " + std::to_string(rank_) + " to worker " + std::to_string(dest) +
                         " failed: " + errno_text());
  }
}

Message SocketTransport::receive(int source, std::uint8_t face, Millis timeout) {
  try {
    return inbox_.pop(source, face, Clock::now() + timeout, aborted_, "run aborted");
  } catch (const AbortedError&) {
    throw AbortedError("run aborted: " + reason_);
  }
}

bool SocketTransport::probe(int source, std::uint8_t face) { return inbox_.contains(source, face); }

void SocketTransport::abort(const std::string& reason) {
  if (!aborted_.exchange(true)) reason_ = reason;
  inbox_.wake();
}

// ---------------------------------------------------------------- collectives

void barrier(Transport& t, std::uint64_t phase, Millis timeout) {
  const int n = t.size();
  if (n == 1) return;
  if (t.rank() != 0) {
    t.send(0, tag::barrier_arrive, phase, {});
    const Message m = t.receive(0, tag::barrier_release, timeout);
    if (m.header.sequence != phase) {
      throw TransportError("barrier phase mismatch: expected " + std::to_string(phase) + ", got " +
                           std::to_string(m.header.sequence));
    }
    return;
  }
  const auto deadline = Clock::now() + timeout;
  for (int r = 1; r < n; ++r) {
    const auto left = std::chrono::duration_cast<Millis>(deadline - Clock::now());
    try {
      const Message m = t.receive(r, tag::barrier_arrive, std::max(left, Millis(0)));
      if (m.header.sequence != phase) {
        throw TransportError("barrier phase mismatch from worker " + std::to_string(r) + ": expected " +
                             std::to_string(phase) + ", got " + std::to_string(m.header.sequence));
      }
    } catch (const DeadlockError&) {
      std::ostringstream absent;
      absent << "barrier " << phase << " timed out; absent workers:";
      for (int s = r; s < n; ++s)
        if (s == r || !t.probe(s, tag::barrier_arrive)) absent << ' ' << s;
      throw DeadlockError(absent.str());
    }
  }
  for (int r = 1; r < n; ++r) t.send(r, tag::barrier_release, phase, {});
}

std::vector<double> azimuthal_gather(Transport& t, const std::vector<int>& ring, int k_begin, int k_end,
                                     int distinct_stations, std::span<const double> local, std::uint64_t seq,
                                     Millis timeout) {
  const int me = t.rank();
  std::vector<double> tagged;
  tagged.reserve(local.size() + 2);
  tagged.push_back(static_cast<double>(k_begin));
  tagged.push_back(static_cast<double>(k_end));
  tagged.insert(tagged.end(), local.begin(), local.end());
  if (ring.size() == 1) {
    if (k_begin != 0 || k_end != distinct_stations) {
      throw PartitionError("single-member ring spans [" + std::to_string(k_begin) + ", " + std::to_string(k_end) +
                           ") instead of all " + std::to_string(distinct_stations) + " stations");
    }
    return {local.begin(), local.end()};
  }
  for (int r : ring)
    if (r != me) t.send(r, tag::gather, seq, tagged);

  std::vector<double> out;
  int expected_begin = 0;
  for (int r : ring) {
    std::vector<double> part;
    if (r == me) {
      part = tagged;
    } else {
      Message m = t.receive(r, tag::gather, timeout);
      if (m.header.sequence != seq) {
        throw TransportError("gather sequence mismatch from worker " + std::to_string(r));
      }
      part = std::move(m.payload);
    }
    if (part.size() < 2) throw TransportError("gather payload from worker " + std::to_string(r) + " too short");
    const int b = static_cast<int>(part[0]);
    const int e = static_cast<int>(part[1]);
    if (b != expected_begin || e < b) {
      throw PartitionError("azimuthal spans corrupt: worker " + std::to_string(r) + " holds [" + std::to_string(b) +
                           ", " + std::to_string(e) + "), expected start " + std::to_string(expected_begin));
    }
    expected_begin = e;
    out.insert(out.end(), part.begin() + 2, part.end());
  }
  if (expected_begin != distinct_stations) {
    throw PartitionError("azimuthal spans end at " + std::to_string(expected_begin) + " instead of " +
                         std::to_string(distinct_stations));
  }
  return out;
}

// ---------------------------------------------------------------- halo exchange

namespace {

Face opposite(Face f) {
  switch (f) {
    case Face::West:
      return Face::East;
    case Face::East:
      return Face::West;
    case Face::South:
      return Face::North;
    case Face::North:
      return Face::South;
  }
  return f;
}

/// Global indices of the two ghost layers behind `face`, innermost last for West/South.
std::array<int, 2> ghost_globals(const BlockLayout& b, Face face) {
  switch (face) {
    case Face::West:
      return {b.i_begin - 2, b.i_begin - 1};
    case Face::East:
      return {b.i_end, b.i_end + 1};
    case Face::South:
      return {b.k_begin - 2, b.k_begin - 1};
    case Face::North:
      return {b.k_end, b.k_end + 1};
  }
  return {0, 0};
}

bool axial(Face f) { return f == Face::West || f == Face::East; }

/// Visits the receiver's ghost block behind `face` in payload order (k, i, j),
/// handing both the receiver's local node and the sender's local node.
template <class F>
void visit_ghosts(const BlockLayout& receiver, const BlockLayout& sender, Face face, F f) {
  const std::array<int, 2> g = ghost_globals(receiver, face);
  if (axial(face)) {
    for (int lk = BlockLayout::ghost; lk < receiver.nk() - BlockLayout::ghost; ++lk) {
      const int gk = receiver.global_k(lk);
      for (int gi : g) {
        for (int j = 0; j < receiver.nj(); ++j) {
          f(receiver.index(receiver.local_i(gi), j, lk), sender.index(sender.local_i(gi), j, sender.local_k(gk)));
        }
      }
    }
  } else {
    for (int gk : g) {
      const int canonical = receiver.dims.wrap_k(gk);
      const int slk = sender.local_k(canonical);
      for (int li = 0; li < receiver.ni(); ++li) {
        if (!receiver.valid_i(li)) continue;
        const int gi = receiver.global_i(li);
        for (int j = 0; j < receiver.nj(); ++j) {
          f(receiver.index(li, j, receiver.local_k(gk)), sender.index(sender.local_i(gi), j, slk));
        }
      }
    }
  }
}

void check_sender_owns(const BlockLayout& receiver, const BlockLayout& sender, Face face) {
  const std::array<int, 2> g = ghost_globals(receiver, face);
  for (int x : g) {
    const bool ok = axial(face) ? (x >= sender.i_begin && x < sender.i_end)
                                : (receiver.dims.wrap_k(x) >= sender.k_begin && receiver.dims.wrap_k(x) < sender.k_end);
    if (!ok) {
      throw PartitionError("ghost station " + std::to_string(x) + " behind the " + to_string(face) +
                           " face is not owned by the neighbouring partition");
    }
  }
}

void local_periodic_ghosts(ConservativeField& f) {
  const BlockLayout& b = f.layout();
  if (!b.dims.periodic_k) return;
  for (int lk = 0; lk < b.nk(); ++lk) {
    if (b.owns_k(lk)) continue;
    const int src = b.local_k(b.dims.wrap_k(b.global_k(lk)));
    for (int li = 0; li < b.ni(); ++li) {
      if (!b.valid_i(li)) continue;
      const double* s = f.at(li, 0, src);
      std::copy(s, s + 5 * static_cast<std::size_t>(b.nj()), f.at(li, 0, lk));
    }
  }
}

}  // namespace

HaloExchanger::HaloExchanger(const PartitionTopology& topology, int partition_id, Transport& transport,
                             Millis timeout)
    : topology_(&topology),
      self_(&topology.parts.at(static_cast<std::size_t>(partition_id))),
      transport_(&transport),
      timeout_(timeout) {
  for (Face f : {Face::West, Face::East, Face::South, Face::North}) {
    if (auto n = self_->neighbor(f)) {
      check_sender_owns(self_->layout, topology.parts[static_cast<std::size_t>(*n)].layout, f);
    }
  }
}

std::vector<double> HaloExchanger::pack(const ConservativeField& f, const Partition& receiver,
                                        Face receiver_face) const {
  std::vector<std::size_t> nodes;
  visit_ghosts(receiver.layout, self_->layout, receiver_face, [&](std::size_t, std::size_t s) { nodes.push_back(s); });
  std::vector<double> payload(nodes.size() * 5);
  for (int c = 0; c < 5; ++c)
    for (std::size_t m = 0; m < nodes.size(); ++m) payload[c * nodes.size() + m] = f.at(nodes[m])[c];
  return payload;
}

void HaloExchanger::unpack(ConservativeField& f, Face my_face, std::span<const double> payload) const {
  const Partition& sender = topology_->parts[static_cast<std::size_t>(*self_->neighbor(my_face))];
  std::vector<std::size_t> nodes;
  visit_ghosts(self_->layout, sender.layout, my_face, [&](std::size_t r, std::size_t) { nodes.push_back(r); });
  if (payload.size() != nodes.size() * 5) {
    throw TransportError("partition " + std::to_string(self_->id) + " received " + std::to_string(payload.size()) +
                         " values from partition " + std::to_string(sender.id) + " on the " + to_string(my_face) +
                         " face, expected " + std::to_string(nodes.size() * 5));
  }
  for (int c = 0; c < 5; ++c)
    for (std::size_t m = 0; m < nodes.size(); ++m) f.at(nodes[m])[c] = payload[c * nodes.size() + m];
}

Message HaloExchanger::receive_from(Face face, std::uint64_t seq) {
  const int source = *self_->neighbor(face);
  // The sender tags a message with the face it fills on the receiver.
  Message m;
  try {
    m = transport_->receive(source, static_cast<std::uint8_t>(face), timeout_);
  } catch (const DeadlockError&) {
    throw DeadlockError("partition " + std::to_string(self_->id) + " timed out in halo exchange " +
                        std::to_string(seq) + "; pending neighbour: partition " + std::to_string(source) + " (" +
                        to_string(face) + ")");
  }
  if (m.header.sequence != seq) {
    throw TransportError("partition " + std::to_string(self_->id) + " got sequence " +
                         std::to_string(m.header.sequence) + " from partition " + std::to_string(source) +
                         ", expected " + std::to_string(seq));
  }
  return m;
}

ExchangeHandle HaloExchanger::post(ConservativeField& field) {
  ExchangeHandle h;
  h.field_ = &field;
  h.sequence_ = next_sequence_++;
  h.completed_ = false;
  for (Face f : {Face::West, Face::East}) {
    if (auto n = self_->neighbor(f)) {
      const Partition& receiver = topology_->parts[static_cast<std::size_t>(*n)];
      const Face rf = opposite(f);
      transport_->send(*n, static_cast<std::uint8_t>(rf), h.sequence_, pack(field, receiver, rf));
    }
  }
  return h;
}

void HaloExchanger::complete(ExchangeHandle& h) {
  if (h.completed_) return;
  ConservativeField& field = *h.field_;
  for (Face f : {Face::West, Face::East}) {
    if (self_->neighbor(f)) unpack(field, f, receive_from(f, h.sequence_).payload);
  }
  if (topology_->spec.npz > 1) {
    for (Face f : {Face::South, Face::North}) {
      const int n = *self_->neighbor(f);
      const Partition& receiver = topology_->parts[static_cast<std::size_t>(n)];
      const Face rf = opposite(f);
      transport_->send(n, static_cast<std::uint8_t>(rf), h.sequence_, pack(field, receiver, rf));
    }
    for (Face f : {Face::South, Face::North}) unpack(field, f, receive_from(f, h.sequence_).payload);
  } else {
    local_periodic_ghosts(field);
  }
  h.completed_ = true;
}

void HaloExchanger::exchange(ConservativeField& field) {
  ExchangeHandle h = post(field);
  complete(h);
}

void reference_exchange(const PartitionTopology& topology, std::vector<ConservativeField>& fields) {
  ConservativeField global(BlockLayout::whole(topology.dims));
  for (const ConservativeField& f : fields) copy_owned(f, global);
  for (ConservativeField& f : fields) {
    const BlockLayout& b = f.layout();
    for (int lk = 0; lk < b.nk(); ++lk) {
      if (!b.valid_k(lk)) continue;
      // Stations inside the grid are copied as held, superposed one included.
      const int raw_k = b.global_k(lk);
      const int gk = global.layout().local_k(raw_k >= 0 && raw_k < b.dims.nk ? raw_k : b.dims.wrap_k(raw_k));
      for (int li = 0; li < b.ni(); ++li) {
        if (!b.valid_i(li) || (b.owns_i(li) && b.owns_k(lk))) continue;
        const double* s = global.at(global.layout().local_i(b.global_i(li)), 0, gk);
        std::copy(s, s + 5 * static_cast<std::size_t>(b.nj()), f.at(li, 0, lk));
      }
    }
  }
}

}  // namespace jetflow
