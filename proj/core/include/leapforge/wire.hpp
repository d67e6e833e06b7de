#pragma once

#include <cstdint>
#include <stdexcept>
#include <string_view>
#include <variant>

#include "leapforge/bytes.hpp"
#include "leapforge/crypto.hpp"

namespace leapforge {

// Wire layouts, all multi-byte integers big-endian:
//   HELLO       0x01 | sender(2) | nonce(8)                                       11 bytes
//   ACK         0x02 | sender(2) | dest(2) | nonce(8) | tag(8)                    21 bytes
//   CLUSTER_KEY 0x03 | sender(2) | dest(2) | blob(24)                             29 bytes
//   SEQ_REQ     0x04 | sender(2)=0 | round(4) | chain_elem(16)                    23 bytes
//   SEQ_RESP    0x05 | sender(2) | round(4) | blob(24)                            31 bytes
//   REVOKE      0x06 | sender(2)=0 | revoked(2) | round(4) | chain_elem(16) | tag(8)  33 bytes

enum class MsgType : std::uint8_t {
  Hello = 0x01,
  Ack = 0x02,
  ClusterKey = 0x03,
  SeqRequest = 0x04,
  SeqResponse = 0x05,
  Revoke = 0x06,
};

std::string_view to_string(MsgType type);

struct Hello {
  NodeId sender = 0;
  Nonce nonce;
  friend bool operator==(const Hello&, const Hello&) = default;
};

struct Ack {
  NodeId sender = 0;
  NodeId dest = 0;
  Nonce nonce;
  MacTag tag;
  friend bool operator==(const Ack&, const Ack&) = default;
};

struct ClusterKeyMsg {
  NodeId sender = 0;
  NodeId dest = 0;
  WrappedBlock blob{};
  friend bool operator==(const ClusterKeyMsg&, const ClusterKeyMsg&) = default;
};

struct SeqRequest {
  std::uint32_t round = 0;
  Block16 chain_element{};
  friend bool operator==(const SeqRequest&, const SeqRequest&) = default;
};

struct SeqResponse {
  NodeId sender = 0;
  std::uint32_t round = 0;
  WrappedBlock blob{};
  friend bool operator==(const SeqResponse&, const SeqResponse&) = default;
};

struct Revoke {
  NodeId revoked = 0;
  std::uint32_t round = 0;
  Block16 chain_element{};
  MacTag tag;
  friend bool operator==(const Revoke&, const Revoke&) = default;
};

using WireMessage = std::variant<Hello, Ack, ClusterKeyMsg, SeqRequest, SeqResponse, Revoke>;

MsgType type_of(const WireMessage& msg);
/// Sender field as it appears on the wire (0 for base-station messages).
NodeId sender_of(const WireMessage& msg);
std::size_t wire_size(MsgType type);

enum class MalformedReason : std::uint8_t {
  TooShort,
  UnknownType,
  BadLength,
  BadSender,
};

std::string_view to_string(MalformedReason reason);

class MalformedMessage : public std::runtime_error {
 public:
  explicit MalformedMessage(MalformedReason reason);
  MalformedReason reason() const { return reason_; }

 private:
  MalformedReason reason_;
};

Bytes encode(const WireMessage& msg);
/// Throws MalformedMessage on short input, unknown type, wrong length
/// (including trailing bytes) or a non-zero sender on base-station messages.
WireMessage decode(ByteView bytes);

// Authenticated portions. The tag of an ACK covers its first 13 bytes; the
// tag of a REVOKE its first 25.
Bytes ack_body(const Ack& ack);
Bytes revoke_body(const Revoke& revoke);

}  // namespace leapforge
