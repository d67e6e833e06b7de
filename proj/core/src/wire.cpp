#include "leapforge/wire.hpp"

#include <algorithm>

namespace leapforge {

namespace {

template <std::size_t N>
void put_array(Bytes& out, const std::array<std::uint8_t, N>& a) {
  out.insert(out.end(), a.begin(), a.end());
}

template <std::size_t N>
std::array<std::uint8_t, N> get_array(ByteView in, std::size_t offset) {
  std::array<std::uint8_t, N> out{};
  std::copy_n(in.begin() + static_cast<std::ptrdiff_t>(offset), N, out.begin());
  return out;
}

void put_header(Bytes& out, MsgType type, NodeId sender) {
  out.push_back(static_cast<std::uint8_t>(type));
  put_u16_be(out, sender);
}

}  // namespace

std::string_view to_string(MsgType type) {
  switch (type) {
    case MsgType::Hello: return "HELLO";
    case MsgType::Ack: return "ACK";
    case MsgType::ClusterKey: return "CLUSTER_KEY";
    case MsgType::SeqRequest: return "SEQ_REQ";
    case MsgType::SeqResponse: return "SEQ_RESP";
    case MsgType::Revoke: return "REVOKE";
  }
  return "UNKNOWN";
}

std::string_view to_string(MalformedReason reason) {
  switch (reason) {
    case MalformedReason::TooShort: return "too-short";
    case MalformedReason::UnknownType: return "unknown-type";
    case MalformedReason::BadLength: return "bad-length";
    case MalformedReason::BadSender: return "bad-sender";
  }
  return "unknown";
}

MalformedMessage::MalformedMessage(MalformedReason reason)
    : std::runtime_error("malformed message: " + std::string(to_string(reason))), reason_(reason) {}

MsgType type_of(const WireMessage& msg) {
  return static_cast<MsgType>(msg.index() + 1);
}

NodeId sender_of(const WireMessage& msg) {
  return std::visit(
      [](const auto& m) -> NodeId {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, SeqRequest> || std::is_same_v<T, Revoke>) {
          return kBaseStationId;
        } else {
          return m.sender;
        }
      },
      msg);
}

std::size_t wire_size(MsgType type) {
  switch (type) {
    case MsgType::Hello: return 11;
    case MsgType::Ack: return 21;
    case MsgType::ClusterKey: return 29;
    case MsgType::SeqRequest: return 23;
    case MsgType::SeqResponse: return 31;
    case MsgType::Revoke: return 33;
  }
  return 0;
}

Bytes ack_body(const Ack& ack) {
  Bytes out;
  put_header(out, MsgType::Ack, ack.sender);
  put_u16_be(out, ack.dest);
  put_array(out, ack.nonce.bytes);
  return out;
}

Bytes revoke_body(const Revoke& revoke) {
  Bytes out;
  put_header(out, MsgType::Revoke, kBaseStationId);
  put_u16_be(out, revoke.revoked);
  put_u32_be(out, revoke.round);
  put_array(out, revoke.chain_element);
  return out;
}

Bytes encode(const WireMessage& msg) {
  Bytes out;
  out.reserve(wire_size(type_of(msg)));
  std::visit(
      [&out](const auto& m) {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, Hello>) {
          put_header(out, MsgType::Hello, m.sender);
          put_array(out, m.nonce.bytes);
        } else if constexpr (std::is_same_v<T, Ack>) {
          out = ack_body(m);
          put_array(out, m.tag.bytes);
        } else if constexpr (std::is_same_v<T, ClusterKeyMsg>) {
          put_header(out, MsgType::ClusterKey, m.sender);
          put_u16_be(out, m.dest);
          put_array(out, m.blob);
        } else if constexpr (std::is_same_v<T, SeqRequest>) {
          put_header(out, MsgType::SeqRequest, kBaseStationId);
          put_u32_be(out, m.round);
          put_array(out, m.chain_element);
        } else if constexpr (std::is_same_v<T, SeqResponse>) {
          put_header(out, MsgType::SeqResponse, m.sender);
          put_u32_be(out, m.round);
          put_array(out, m.blob);
        } else {
          out = revoke_body(m);
          put_array(out, m.tag.bytes);
        }
      },
      msg);
  return out;
}

WireMessage decode(ByteView bytes) {
  if (bytes.size() < 3) throw MalformedMessage(MalformedReason::TooShort);
  const std::uint8_t raw_type = bytes[0];
  if (raw_type < 0x01 || raw_type > 0x06) throw MalformedMessage(MalformedReason::UnknownType);
  const auto type = static_cast<MsgType>(raw_type);
  if (bytes.size() != wire_size(type)) throw MalformedMessage(MalformedReason::BadLength);
  const NodeId sender = get_u16_be(bytes, 1);

  switch (type) {
    case MsgType::Hello:
      return Hello{sender, Nonce{get_array<8>(bytes, 3)}};
    case MsgType::Ack:
      return Ack{sender, get_u16_be(bytes, 3), Nonce{get_array<8>(bytes, 5)},
                 MacTag{get_array<8>(bytes, 13)}};
    case MsgType::ClusterKey:
      return ClusterKeyMsg{sender, get_u16_be(bytes, 3), get_array<24>(bytes, 5)};
    case MsgType::SeqRequest:
      if (sender != kBaseStationId) throw MalformedMessage(MalformedReason::BadSender);
      return SeqRequest{get_u32_be(bytes, 3), get_array<16>(bytes, 7)};
    case MsgType::SeqResponse:
      return SeqResponse{sender, get_u32_be(bytes, 3), get_array<24>(bytes, 7)};
    case MsgType::Revoke:
      if (sender != kBaseStationId) throw MalformedMessage(MalformedReason::BadSender);
      return Revoke{get_u16_be(bytes, 3), get_u32_be(bytes, 5), get_array<16>(bytes, 9),
                    MacTag{get_array<8>(bytes, 25)}};
  }
  throw MalformedMessage(MalformedReason::UnknownType);
}

}  // namespace leapforge
