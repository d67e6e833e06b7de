#include "leapforge/base_station.hpp"

#include <sstream>

#include "leapforge/node.hpp"

namespace leapforge {

std::string_view to_string(AuditStatus status) {
  switch (status) {
    case AuditStatus::Unverified: return "Unverified";
    case AuditStatus::Verified: return "Verified";
    case AuditStatus::Flagged: return "Flagged";
    case AuditStatus::Revoked: return "Revoked";
  }
  return "Unknown";
}

std::string_view to_string(FlagReason reason) {
  switch (reason) {
    case FlagReason::Mismatch: return "Mismatch";
    case FlagReason::Missing: return "Missing";
    case FlagReason::Duplicate: return "Duplicate";
  }
  return "Unknown";
}

std::string audit_csv_header() { return "round,node_id,status,reason,sim_time_ms"; }

std::string to_csv_row(const AuditLogLine& line) {
  std::ostringstream os;
  os << line.round << ',' << line.node << ',' << to_string(line.status) << ','
     << (line.reason ? to_string(*line.reason) : std::string_view{}) << ',' << to_ms(line.at);
  return os.str();
}

AuditRegistry::AuditRegistry(RegistrySeed seed, HashChain chain, SimTime response_deadline)
    : global_key_(seed.global_key),
      expected_(std::move(seed.expected)),
      chain_(std::move(chain)),
      response_deadline_(response_deadline) {
  require_role(global_key_, KeyRole::Global, "AuditRegistry");
  for (const auto& [id, seq] : expected_) status_.emplace(id, AuditStatus::Unverified);
}

AuditStatus AuditRegistry::status(NodeId u) const {
  const auto it = status_.find(u);
  return it == status_.end() ? AuditStatus::Unverified : it->second;
}

void AuditRegistry::transition(NodeId u, AuditStatus next) {
  AuditStatus& cur = status_.at(u);
  const bool ok = (cur == AuditStatus::Unverified &&
                   (next == AuditStatus::Verified || next == AuditStatus::Flagged)) ||
                  (cur == AuditStatus::Verified && next == AuditStatus::Flagged) ||
                  (cur == AuditStatus::Flagged && next == AuditStatus::Revoked) || cur == next;
  if (!ok) {
    throw InvariantViolation("audit status cannot go from " + std::string(to_string(cur)) +
                             " to " + std::string(to_string(next)));
  }
  cur = next;
}

void AuditRegistry::flag(NodeId u, FlagReason reason, SimTime now) {
  if (flagged_round_.contains(u)) return;
  if (status(u) == AuditStatus::Flagged || status(u) == AuditStatus::Revoked) return;
  transition(u, AuditStatus::Flagged);
  flagged_round_.emplace(u, reason);
  log_.push_back(AuditLogLine{current_round_, u, AuditStatus::Flagged, reason, now});
}

SymKey AuditRegistry::recompute_individual_key(NodeId u) const {
  return derive_individual_key(global_key_, u);
}

SeqRequest AuditRegistry::begin_audit(SimTime now) {
  if (open_) throw AuditSequenceError("previous audit round is still open");
  const HashChain::Reveal reveal = chain_.reveal();
  open_ = true;
  ++audits_started_;
  current_round_ = reveal.index;
  round_started_ = now;
  deadline_ = now + response_deadline_;
  responded_.clear();
  flagged_round_.clear();
  return SeqRequest{reveal.index, reveal.element};
}

bool AuditRegistry::ingest_response(const SeqResponse& resp, SimTime now) {
  if (!open_ || now > deadline_ || resp.round != current_round_) return false;
  const NodeId u = resp.sender;
  if (u == kBaseStationId) return false;
  if (!expected_.contains(u)) {
    // Never preloaded: an injected node under an invented id.
    status_.try_emplace(u, AuditStatus::Unverified);
    flag(u, FlagReason::Mismatch, now);
    return true;
  }
  if (status(u) == AuditStatus::Revoked) return false;

  std::optional<SequenceNumber> reported;
  try {
    const Block16 plain = unwrap_block(recompute_individual_key(u), resp.blob,
                                       seq_response_context(u, resp.round));
    SequenceNumber seq{};
    std::copy_n(plain.begin(), seq.size(), seq.begin());
    if (pad_sequence(seq) == plain) reported = seq;
  } catch (const AuthenticationFailure&) {
    // wrong key means wrong node
  }

  if (!reported || *reported != expected_.at(u)) {
    flag(u, FlagReason::Mismatch, now);
    return true;
  }
  if (responded_.contains(u)) {
    // A second correct answer for the same id in one round: two devices hold
    // the same store.
    flag(u, FlagReason::Duplicate, now);
    return true;
  }
  responded_.insert(u);
  if (!flagged_round_.contains(u) && status(u) != AuditStatus::Flagged) {
    transition(u, AuditStatus::Verified);
    log_.push_back(AuditLogLine{current_round_, u, AuditStatus::Verified, std::nullopt, now});
  }
  return true;
}

AuditClose AuditRegistry::close_audit(SimTime now) {
  if (!open_) throw AuditSequenceError("no audit round is open");
  if (now < deadline_) throw AuditSequenceError("audit deadline has not passed");

  for (const auto& [u, st] : status_) {
    if (st == AuditStatus::Revoked || st == AuditStatus::Flagged) continue;
    if (!responded_.contains(u)) flag(u, FlagReason::Missing, now);
  }

  AuditClose out;
  out.verdict.round = current_round_;
  out.verdict.flagged = flagged_round_;
  for (NodeId u : responded_) {
    if (!flagged_round_.contains(u)) out.verdict.verified.insert(u);
  }

  for (const auto& [u, reason] : flagged_round_) {
    // Without chain elements left, remaining nodes stay Flagged.
    if (chain_.exhausted()) break;
    const HashChain::Reveal reveal = chain_.reveal();
    Revoke revoke{u, reveal.index, reveal.element, MacTag{}};
    revoke.tag = mac(global_key_, revoke_body(revoke));
    out.revocations.push_back(revoke);
    transition(u, AuditStatus::Revoked);
    log_.push_back(AuditLogLine{current_round_, u, AuditStatus::Revoked, reason, now});
  }
  open_ = false;
  return out;
}

}  // namespace leapforge
