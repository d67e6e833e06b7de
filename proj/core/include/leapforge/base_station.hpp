#pragma once

#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "leapforge/crypto.hpp"
#include "leapforge/keying.hpp"
#include "leapforge/sim_time.hpp"
#include "leapforge/wire.hpp"

namespace leapforge {

enum class AuditStatus : std::uint8_t { Unverified, Verified, Flagged, Revoked };
enum class FlagReason : std::uint8_t { Mismatch, Missing, Duplicate };

std::string_view to_string(AuditStatus status);
std::string_view to_string(FlagReason reason);

/// begin_audit while a round is open, or close_audit before its deadline.
class AuditSequenceError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

struct AuditVerdict {
  std::uint32_t round = 0;
  std::set<NodeId> verified;
  std::map<NodeId, FlagReason> flagged;
};

/// One row of audit.csv: round,node_id,status,reason,sim_time_ms
struct AuditLogLine {
  std::uint32_t round = 0;
  NodeId node = 0;
  AuditStatus status = AuditStatus::Unverified;
  std::optional<FlagReason> reason;
  SimTime at{};
};

std::string audit_csv_header();
std::string to_csv_row(const AuditLogLine& line);

struct AuditClose {
  AuditVerdict verdict;
  std::vector<Revoke> revocations;
};

/// Base-station state: expected sequence numbers, per-node status, the
/// global key and the broadcast-authentication chain.
///
/// Rounds are identified by the chain index revealed in their SEQ_REQ;
/// revocations consume further chain elements.
class AuditRegistry {
 public:
  AuditRegistry(RegistrySeed seed, HashChain chain, SimTime response_deadline);

  /// Opens a round. Throws AuditSequenceError if a round is still open and
  /// ChainExhausted when no chain element is left.
  SeqRequest begin_audit(SimTime now);

  /// Late responses and responses for another round are ignored (returns false).
  bool ingest_response(const SeqResponse& resp, SimTime now);

  /// Throws AuditSequenceError before the deadline or without an open round.
  AuditClose close_audit(SimTime now);

  SymKey recompute_individual_key(NodeId u) const;

  bool round_open() const { return open_; }
  std::uint32_t current_round() const { return current_round_; }
  std::uint32_t audits_started() const { return audits_started_; }
  SimTime deadline() const { return deadline_; }
  SimTime round_started_at() const { return round_started_; }
  AuditStatus status(NodeId u) const;
  const std::map<NodeId, AuditStatus>& statuses() const { return status_; }
  const Block16& chain_commitment() const { return chain_.commitment(); }
  const std::vector<AuditLogLine>& log() const { return log_; }

 private:
  void transition(NodeId u, AuditStatus next);
  void flag(NodeId u, FlagReason reason, SimTime now);

  SymKey global_key_;
  std::map<NodeId, SequenceNumber> expected_;
  std::map<NodeId, AuditStatus> status_;
  HashChain chain_;
  SimTime response_deadline_;

  bool open_ = false;
  std::uint32_t current_round_ = 0;
  std::uint32_t audits_started_ = 0;
  SimTime round_started_{};
  SimTime deadline_{};
  std::set<NodeId> responded_;                 // valid responses this round
  std::map<NodeId, FlagReason> flagged_round_;  // flagged during this round
  std::vector<AuditLogLine> log_;
};

}  // namespace leapforge
