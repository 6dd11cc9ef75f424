// Copyright 2026 The Thinkey Simulator Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "thinkey/consensus/consensus.h"

#include <algorithm>
#include <cmath>
#include <set>
#include <utility>

#include "absl/strings/str_cat.h"
#include "json.hpp"

namespace thinkey::consensus {
namespace {

// Salt namespaces for latency draws, so that the same logical message sees
// the same delay across runs that differ elsewhere.
enum : std::uint64_t {
  kSaltProposal = 1,
  kSaltPrepare = 2,
  kSaltPackage = 3,
  kSaltDecision = 4,
  kSaltImpostor = 5,
};

std::string Short(const Hash256& h) { return h.ToHex().substr(0, 8); }

std::string VoteLabel(const Hash256& payload) {
  return payload == FaultMarker() ? std::string("FAULT") : Short(payload);
}

Hash256 PackageDigest(const std::vector<SignedMessage>& votes) {
  Sha256Hasher h;
  h.Update("thinkey-package");
  for (const SignedMessage& v : votes) {
    h.UpdateU64(v.signer);
    h.Update(v.payload);
    h.Update(v.tag);
  }
  return h.Finish();
}

}  // namespace

const char* StageName(Stage s) {
  switch (s) {
    case Stage::kProposal:
      return "proposal";
    case Stage::kPreparation:
      return "preparation";
    case Stage::kConfirmation:
      return "confirmation";
    case Stage::kDecided:
      return "decided";
  }
  return "unknown";
}

const char* StrategyName(Strategy s) {
  switch (s) {
    case Strategy::kHonest:
      return "honest";
    case Strategy::kSilent:
      return "silent";
    case Strategy::kEquivocate:
      return "equivocate";
    case Strategy::kRandomVote:
      return "random_vote";
    case Strategy::kSelective:
      return "selective";
    case Strategy::kImpostor:
      return "impostor";
  }
  return "unknown";
}

std::optional<Strategy> ParseStrategy(const std::string& name) {
  for (Strategy s : {Strategy::kHonest, Strategy::kSilent, Strategy::kEquivocate,
                     Strategy::kRandomVote, Strategy::kSelective,
                     Strategy::kImpostor}) {
    if (name == StrategyName(s)) return s;
  }
  return std::nullopt;
}

const Hash256& FaultMarker() {
  static const Hash256 marker = Sha256("thinkey-leader-faulty");
  return marker;
}

Hash256 Signer::Key(NodeId node) const {
  return Sha256Hasher()
      .Update("thinkey-node-key")
      .UpdateU64(key_seed_)
      .UpdateU64(node)
      .Finish();
}

SignedMessage Signer::Sign(NodeId signer, std::uint64_t round, Stage stage,
                           const Hash256& payload) const {
  SignedMessage m{signer, round, stage, payload, {}};
  m.tag = Sha256Hasher()
              .Update(Key(signer))
              .UpdateU64(round)
              .UpdateU64(static_cast<std::uint64_t>(stage))
              .Update(payload)
              .Finish();
  return m;
}

bool Signer::Verify(const SignedMessage& m) const {
  return Sign(m.signer, m.round, m.stage, m.payload).tag == m.tag;
}

void WriteRoundTraceJsonl(std::ostream& out,
                          const std::vector<RoundTraceRecord>& trace) {
  for (const RoundTraceRecord& r : trace) {
    nlohmann::ordered_json j;
    j["round"] = r.round;
    j["stage"] = StageName(r.stage);
    j["member"] = r.member;
    j["action"] = r.action;
    j["t"] = r.t;
    out << j.dump() << '\n';
  }
}

SimTime ConsensusConfig::proposal_timeout() const {
  return (proposal_timeout_factor * latency.mean() + max_block_allowance_ms) *
         std::ldexp(1.0, static_cast<int>(backoff_exponent));
}

SimTime ConsensusConfig::stage_timeout() const {
  return (stage_timeout_factor * latency.mean() + max_block_allowance_ms) *
         std::ldexp(1.0, static_cast<int>(backoff_exponent));
}

SimTime ConsensusConfig::round_budget() const {
  return proposal_timeout() + 2.0 * stage_timeout() + max_block_allowance_ms;
}

std::optional<Hash256> RoundResult::agreed() const {
  for (const auto& [node, d] : decisions) {
    if (d.outcome == Outcome::kAgreedBlock) return d.block_hash;
  }
  return std::nullopt;
}

std::vector<Offense> RoundResult::punished() const {
  std::set<std::pair<NodeId, Stage>> seen;
  std::vector<Offense> out;
  for (const auto& [node, d] : decisions) {
    for (const Offense& o : d.punished) {
      if (seen.insert({o.node, o.stage}).second) out.push_back(o);
    }
  }
  std::sort(out.begin(), out.end(), [](const Offense& a, const Offense& b) {
    return std::pair(a.node, a.stage) < std::pair(b.node, b.stage);
  });
  return out;
}

bool RoundResult::safety_violated() const {
  std::optional<Hash256> first;
  for (const auto& [node, d] : decisions) {
    if (d.outcome != Outcome::kAgreedBlock) continue;
    if (first && *first != d.block_hash) return true;
    first = d.block_hash;
  }
  return false;
}

struct RoundEngine::Member {
  NodeId id = 0;
  Strategy strategy = Strategy::kHonest;
  Stage stage = Stage::kProposal;
  bool validating = false;
  std::optional<SignedMessage> proposal;
  std::optional<Proposal> proposal_info;
  std::vector<SignedMessage> proposals_seen;  // leader-signed, distinct
  std::vector<SignedMessage> discarded;
  std::map<NodeId, SignedMessage> direct_votes;
  std::map<NodeId, std::vector<SignedMessage>> known_votes;
  std::map<NodeId, SignedMessage> packages;
  std::vector<Evidence> evidence;
  std::set<std::pair<NodeId, Stage>> convicted;
  std::optional<sim::EventHandle> timer;
  std::optional<Decision> decision;
  // Byzantine bookkeeping.
  bool acted = false;
  std::vector<SignedMessage> seen_votes;
};

RoundEngine::RoundEngine(sim::Simulator& sim,
                         const committee::Committee& committee,
                         std::uint64_t round, ConsensusConfig config,
                         std::map<NodeId, Strategy> byzantine,
                         ProposalSource source, std::uint64_t adversary_seed)
    : sim_(sim),
      committee_(committee),
      round_(round),
      config_(config),
      byzantine_(std::move(byzantine)),
      source_(std::move(source)),
      adversary_rng_(MixKey(adversary_seed, {config.chain_id, round})),
      signer_(config.key_seed),
      latency_(config.network_seed, config.latency) {
  for (NodeId id : committee_.members) {
    auto m = std::make_unique<Member>();
    m->id = id;
    auto it = byzantine_.find(id);
    m->strategy = it == byzantine_.end() ? Strategy::kHonest : it->second;
    members_.emplace(id, std::move(m));
  }
  result_.round = round_;
  result_.leader = committee_.leader(round_);
}

RoundEngine::~RoundEngine() {
  for (const sim::EventHandle& h : handles_) sim_.Cancel(h);
}

bool RoundEngine::IsHonest(NodeId node) const {
  return members_.at(node)->strategy == Strategy::kHonest;
}

void RoundEngine::Trace(Stage stage, NodeId member, std::string action) {
  if (!config_.record_trace) return;
  result_.trace.push_back(
      RoundTraceRecord{round_, stage, member, std::move(action), sim_.now()});
}

void RoundEngine::Send(NodeId from, NodeId to, std::size_t bytes,
                       std::uint64_t salt, std::function<void()> deliver) {
  if (completed_) return;
  SimTime delay = 0;
  if (from != to) {
    delay = latency_.Draw(from, to, MixKey(config_.chain_id, {round_, salt})) +
            static_cast<double>(bytes) / config_.bandwidth_bytes_per_ms;
    ++result_.messages_sent;
    result_.bytes_sent += bytes;
  }
  handles_.push_back(sim_.After(delay, to, "consensus", std::move(deliver)));
}

void RoundEngine::Broadcast(NodeId from, std::size_t bytes, std::uint64_t salt,
                            const std::function<void(NodeId)>& deliver) {
  for (NodeId to : committee_.members) {
    Send(from, to, bytes, salt, [deliver, to] { deliver(to); });
  }
}

std::size_t RoundEngine::PackageBytes(std::size_t votes) const {
  if (!config_.aggregate_signatures) return votes * config_.vote_bytes;
  // One aggregate signature plus a signer bitmap for each of the (at most
  // two meaningful) vote payloads.
  return 2 * (config_.vote_bytes + 32 + (committee_.members.size() + 7) / 8);
}

void RoundEngine::Start(CompletionCallback on_complete) {
  on_complete_ = std::move(on_complete);
  result_.started_at = sim_.now();
  const NodeId leader = committee_.leader(round_);
  Trace(Stage::kProposal, leader, "round-start");

  bool any_honest = false;
  for (auto& [id, m] : members_) {
    if (m->strategy == Strategy::kHonest) any_honest = true;
    if (m->strategy == Strategy::kSilent) continue;
    NodeId node = id;
    m->timer = sim_.After(config_.proposal_timeout(), node, "proposal-timeout",
                          [this, node] { OnProposalTimeout(node); });
    handles_.push_back(*m->timer);
    if (m->strategy == Strategy::kImpostor && node != leader) {
      StartByzantineImpostor(node);
    }
  }
  if (!any_honest) {
    MaybeComplete();
    return;
  }
  StartLeader();
}

void RoundEngine::StartLeader() {
  const NodeId leader = committee_.leader(round_);
  Member& lm = *members_.at(leader);
  if (lm.strategy == Strategy::kSilent) return;

  Proposal p0 = source_(round_, leader, 0);
  auto ship = [this, leader](const Proposal& p, const std::vector<NodeId>& to) {
    SignedMessage msg = signer_.Sign(leader, round_, Stage::kProposal,
                                     p.block_hash);
    for (NodeId dst : to) {
      Send(leader, dst, p.bytes + config_.vote_bytes, kSaltProposal,
           [this, dst, msg, p] { OnProposal(dst, msg, p); });
    }
  };
  const std::vector<NodeId>& all = committee_.members;

  auto after_build = [this, leader, p0, ship, all, &lm]() mutable {
    switch (lm.strategy) {
      case Strategy::kHonest:
      case Strategy::kImpostor:
        Trace(Stage::kProposal, leader, absl::StrCat("propose ", Short(p0.block_hash)));
        ship(p0, all);
        break;
      case Strategy::kEquivocate: {
        Proposal p1 = source_(round_, leader, 1);
        std::vector<NodeId> a, b;
        for (std::size_t i = 0; i < all.size(); ++i) {
          (i < all.size() / 2 ? a : b).push_back(all[i]);
        }
        Trace(Stage::kProposal, leader,
              absl::StrCat("equivocate ", Short(p0.block_hash), " ",
                           Short(p1.block_hash)));
        ship(p0, a);
        ship(p1, b);
        break;
      }
      case Strategy::kRandomVote: {
        Proposal p = p0;
        if (adversary_rng_.Bernoulli(0.5)) {
          p.valid = false;
          p.block_hash = Sha256Hasher()
                             .Update("thinkey-invalid-proposal")
                             .UpdateU64(round_)
                             .UpdateU64(adversary_rng_.NextU64())
                             .Finish();
        }
        Trace(Stage::kProposal, leader, absl::StrCat("propose ", Short(p.block_hash)));
        ship(p, all);
        break;
      }
      case Strategy::kSelective: {
        std::vector<NodeId> to;
        for (NodeId n : all) {
          if (n == leader || adversary_rng_.Bernoulli(0.5)) to.push_back(n);
        }
        Trace(Stage::kProposal, leader, absl::StrCat("propose-partial ", Short(p0.block_hash)));
        ship(p0, to);
        break;
      }
      case Strategy::kSilent:
        break;
    }
  };
  handles_.push_back(
      sim_.After(p0.build_ms, leader, "build", std::move(after_build)));
}

void RoundEngine::StartByzantineImpostor(NodeId node) {
  Proposal fake{Sha256Hasher()
                    .Update("thinkey-impostor")
                    .UpdateU64(node)
                    .UpdateU64(round_)
                    .Finish(),
                256, 0.0, 0.0, true};
  SignedMessage msg = signer_.Sign(node, round_, Stage::kProposal,
                                   fake.block_hash);
  Trace(Stage::kProposal, node, "impostor-propose");
  for (NodeId dst : committee_.members) {
    if (dst == node) continue;
    Send(node, dst, fake.bytes, kSaltImpostor,
         [this, dst, msg, fake] { OnProposal(dst, msg, fake); });
  }
}

void RoundEngine::OnProposal(NodeId to, const SignedMessage& msg,
                             const Proposal& p) {
  Member& m = *members_.at(to);
  if (!signer_.Verify(msg) || msg.round != round_) return;
  const NodeId leader = committee_.leader(round_);
  if (msg.signer != leader) {
    m.discarded.push_back(msg);
    Trace(m.stage, to, absl::StrCat("discard-proposal from ", msg.signer));
    return;
  }
  if (m.strategy != Strategy::kHonest) {
    ByzantineOnProposal(to, msg.payload);
    return;
  }
  NoteProposal(m, msg);
  if (m.stage != Stage::kProposal || m.validating) return;
  m.validating = true;
  m.proposal = msg;
  m.proposal_info = p;
  if (m.timer) sim_.Cancel(*m.timer);
  Trace(Stage::kProposal, to, absl::StrCat("receive-proposal ", Short(p.block_hash)));
  SimTime cost = to == leader ? 0.0 : p.validate_ms;
  handles_.push_back(sim_.After(cost, to, "validate", [this, to, p] {
    CastPrepare(to, p.valid ? p.block_hash : FaultMarker());
  }));
}

void RoundEngine::NoteProposal(Member& m, const SignedMessage& msg) {
  const NodeId leader = committee_.leader(round_);
  if (msg.signer != leader || msg.stage != Stage::kProposal ||
      msg.round != round_ || !signer_.Verify(msg)) {
    return;
  }
  for (const SignedMessage& s : m.proposals_seen) {
    if (s.payload == msg.payload) return;
  }
  m.proposals_seen.push_back(msg);
  if (m.proposals_seen.size() == 2 &&
      m.convicted.insert({leader, Stage::kProposal}).second) {
    m.evidence.push_back(Evidence{m.proposals_seen[0], m.proposals_seen[1]});
    Trace(m.stage, m.id, absl::StrCat("evidence proposal ", leader));
  }
}

void RoundEngine::OnProposalTimeout(NodeId node) {
  Member& m = *members_.at(node);
  if (m.strategy != Strategy::kHonest) {
    if (!m.acted) ByzantineOnProposal(node, FaultMarker());
    return;
  }
  if (m.stage != Stage::kProposal || m.validating) return;
  Trace(Stage::kProposal, node, "proposal-timeout");
  CastPrepare(node, FaultMarker());
}

void RoundEngine::CastPrepare(NodeId node, const Hash256& payload) {
  Member& m = *members_.at(node);
  m.stage = Stage::kPreparation;
  SignedMessage vote = signer_.Sign(node, round_, Stage::kPreparation, payload);
  Trace(Stage::kPreparation, node, absl::StrCat("prepare ", VoteLabel(payload)));
  // The vote carries the leader-signed header it endorses, so conflicting
  // proposals sent to different members surface as evidence.
  std::optional<SignedMessage> header = m.proposal;
  Broadcast(node, 2 * config_.vote_bytes, kSaltPrepare,
            [this, vote, header](NodeId to) { OnPrepare(to, vote, header); });
  m.timer = sim_.After(config_.stage_timeout(), node, "prepare-timeout",
                       [this, node] { EndPreparation(node); });
  handles_.push_back(*m.timer);
}

void RoundEngine::RecordVote(Member& m, const SignedMessage& vote) {
  std::vector<SignedMessage>& mine = m.known_votes[vote.signer];
  for (const SignedMessage& v : mine) {
    if (v.payload == vote.payload) return;
  }
  mine.push_back(vote);
  if (mine.size() >= 2 &&
      m.convicted.insert({vote.signer, Stage::kPreparation}).second) {
    m.evidence.push_back(Evidence{mine[0], mine[1]});
    Trace(m.stage, m.id, absl::StrCat("evidence prepare ", vote.signer));
  }
}

void RoundEngine::OnPrepare(NodeId to, const SignedMessage& vote,
                            const std::optional<SignedMessage>& header) {
  Member& m = *members_.at(to);
  if (!signer_.Verify(vote) || vote.round != round_ ||
      vote.stage != Stage::kPreparation || !committee_.contains(vote.signer)) {
    return;
  }
  if (m.strategy != Strategy::kHonest) {
    m.seen_votes.push_back(vote);
    return;
  }
  if (header) NoteProposal(m, *header);
  RecordVote(m, vote);
  m.direct_votes.try_emplace(vote.signer, vote);
  if (m.stage == Stage::kPreparation &&
      m.direct_votes.size() == committee_.members.size()) {
    EndPreparation(to);
  }
}

void RoundEngine::EndPreparation(NodeId node) {
  Member& m = *members_.at(node);
  if (m.stage != Stage::kPreparation) return;
  if (m.timer) sim_.Cancel(*m.timer);
  m.stage = Stage::kConfirmation;

  std::map<Hash256, std::vector<SignedMessage>> by_payload;
  for (const auto& [signer, v] : m.direct_votes) by_payload[v.payload].push_back(v);
  for (const auto& [payload, votes] : by_payload) {
    if (payload == FaultMarker() || votes.size() < committee_.quorum) continue;
    result_.early_outputs[node] = EarlyOutput{payload, votes, sim_.now()};
    Trace(Stage::kPreparation, node, absl::StrCat("early-output ", Short(payload)));
  }

  std::vector<SignedMessage> votes;
  for (const auto& [signer, v] : m.direct_votes) votes.push_back(v);
  SignedMessage pkg = signer_.Sign(node, round_, Stage::kConfirmation,
                                   PackageDigest(votes));
  Trace(Stage::kConfirmation, node,
        absl::StrCat("package ", votes.size(), " votes"));
  Broadcast(node, PackageBytes(votes.size()), kSaltPackage,
            [this, pkg, votes](NodeId to) { OnPackage(to, pkg, votes); });
  m.timer = sim_.After(config_.stage_timeout(), node, "confirm-timeout",
                       [this, node] { Decide(node); });
  handles_.push_back(*m.timer);
}

void RoundEngine::OnPackage(NodeId to, const SignedMessage& pkg,
                            const std::vector<SignedMessage>& votes) {
  Member& m = *members_.at(to);
  if (m.strategy != Strategy::kHonest) return;
  if (!signer_.Verify(pkg) || pkg.round != round_ ||
      pkg.stage != Stage::kConfirmation || !committee_.contains(pkg.signer) ||
      pkg.payload != PackageDigest(votes)) {
    return;
  }
  if (!m.packages.try_emplace(pkg.signer, pkg).second) return;
  for (const SignedMessage& v : votes) {
    if (signer_.Verify(v) && v.round == round_ &&
        v.stage == Stage::kPreparation && committee_.contains(v.signer)) {
      RecordVote(m, v);
    }
  }
  if (m.stage == Stage::kConfirmation &&
      m.packages.size() == committee_.members.size()) {
    Decide(to);
  }
}

std::optional<Hash256> RoundEngine::Certificate(
    const Member& m, std::vector<SignedMessage>* proof) const {
  std::map<Hash256, std::vector<SignedMessage>> by_payload;
  for (const auto& [signer, votes] : m.known_votes) {
    for (const SignedMessage& v : votes) by_payload[v.payload].push_back(v);
  }
  for (const auto& [payload, votes] : by_payload) {
    if (payload == FaultMarker() || votes.size() < committee_.quorum) continue;
    if (proof != nullptr) *proof = votes;
    return payload;
  }
  return std::nullopt;
}

void RoundEngine::Decide(NodeId node) {
  Member& m = *members_.at(node);
  if (m.stage != Stage::kConfirmation) return;
  if (m.timer) sim_.Cancel(*m.timer);
  m.stage = Stage::kDecided;

  Decision d;
  d.round = round_;
  d.decided_at = sim_.now();
  d.evidence = m.evidence;
  for (const auto& [offender, stage] : m.convicted) {
    d.punished.push_back(Offense{offender, stage});
  }
  const NodeId leader = committee_.leader(round_);
  if (auto cert = Certificate(m, &d.proof)) {
    d.outcome = Outcome::kAgreedBlock;
    d.block_hash = *cert;
    d.justification = absl::StrCat("certificate of ", d.proof.size(), " votes");
  } else {
    d.outcome = Outcome::kEmptyBlock;
    std::size_t faults = 0;
    for (const auto& [signer, votes] : m.known_votes) {
      for (const SignedMessage& v : votes) {
        if (v.payload == FaultMarker()) {
          d.proof.push_back(v);
          ++faults;
        }
      }
    }
    if (m.convicted.contains({leader, Stage::kProposal})) {
      d.justification = absl::StrCat("leader ", leader, " equivocated");
    } else if (faults >= committee_.quorum) {
      d.justification = absl::StrCat(faults, " fault votes against leader ", leader);
    } else {
      d.justification = "no quorum certificate";
    }
  }
  Trace(Stage::kDecided, node,
        d.outcome == Outcome::kAgreedBlock
            ? absl::StrCat("decide agreed ", Short(d.block_hash))
            : absl::StrCat("decide empty: ", d.justification));
  for (const Offense& o : d.punished) {
    Trace(Stage::kDecided, node,
          absl::StrCat("punish ", o.node, " ", StageName(o.stage)));
  }
  std::size_t decision_bytes = PackageBytes(d.proof.size()) +
                               2 * config_.vote_bytes * d.evidence.size();
  Broadcast(node, decision_bytes, kSaltDecision, [](NodeId) {});
  m.decision = d;
  result_.decisions[node] = std::move(d);
  MaybeComplete();
}

void RoundEngine::ByzantineOnProposal(NodeId node, const Hash256& block_hash) {
  Member& m = *members_.at(node);
  if (m.acted) return;
  m.acted = true;
  if (m.timer) sim_.Cancel(*m.timer);
  auto send_vote = [this, node](const Hash256& payload,
                                const std::vector<NodeId>& to) {
    SignedMessage vote = signer_.Sign(node, round_, Stage::kPreparation, payload);
    Trace(Stage::kPreparation, node,
          absl::StrCat("byzantine-prepare ", VoteLabel(payload), " to ",
                       to.size()));
    for (NodeId dst : to) {
      Send(node, dst, config_.vote_bytes, kSaltPrepare,
           [this, dst, vote] { OnPrepare(dst, vote, std::nullopt); });
    }
  };
  const std::vector<NodeId>& all = committee_.members;
  switch (m.strategy) {
    case Strategy::kHonest:
    case Strategy::kSilent:
      return;
    case Strategy::kEquivocate: {
      std::vector<NodeId> a, b;
      for (std::size_t i = 0; i < all.size(); ++i) {
        (i < all.size() / 2 ? a : b).push_back(all[i]);
      }
      Hash256 other = block_hash == FaultMarker()
                          ? Sha256Hasher()
                                .Update("thinkey-junk-vote")
                                .UpdateU64(node)
                                .UpdateU64(round_)
                                .Finish()
                          : FaultMarker();
      send_vote(block_hash, a);
      send_vote(other, b);
      break;
    }
    case Strategy::kRandomVote: {
      Hash256 payload;
      switch (adversary_rng_.Uniform(3)) {
        case 0:
          payload = block_hash;
          break;
        case 1:
          payload = FaultMarker();
          break;
        default:
          payload = Sha256Hasher()
                        .Update("thinkey-junk-vote")
                        .UpdateU64(adversary_rng_.NextU64())
                        .Finish();
      }
      send_vote(payload, all);
      break;
    }
    case Strategy::kSelective: {
      std::vector<NodeId> to;
      for (NodeId n : all) {
        if (adversary_rng_.Bernoulli(0.5)) to.push_back(n);
      }
      send_vote(block_hash, to);
      break;
    }
    case Strategy::kImpostor:
      send_vote(block_hash, all);
      break;
  }
  SimTime delay = adversary_rng_.UniformReal(0.0, config_.stage_timeout());
  handles_.push_back(sim_.After(delay, node, "byzantine-package",
                                [this, node] { ByzantinePackage(node); }));
}

void RoundEngine::ByzantinePackage(NodeId node) {
  Member& m = *members_.at(node);
  std::map<NodeId, SignedMessage> first;
  for (const SignedMessage& v : m.seen_votes) first.try_emplace(v.signer, v);
  std::vector<SignedMessage> votes;
  for (const auto& [signer, v] : first) votes.push_back(v);
  SignedMessage pkg = signer_.Sign(node, round_, Stage::kConfirmation,
                                   PackageDigest(votes));
  for (NodeId dst : committee_.members) {
    if (m.strategy == Strategy::kSelective && !adversary_rng_.Bernoulli(0.5)) {
      continue;
    }
    Send(node, dst, PackageBytes(votes.size()), kSaltPackage,
         [this, dst, pkg, votes] { OnPackage(dst, pkg, votes); });
  }
}

void RoundEngine::MaybeComplete() {
  if (completed_) return;
  SimTime last = result_.started_at;
  for (const auto& [id, m] : members_) {
    if (m->strategy != Strategy::kHonest) continue;
    if (!m->decision) return;
    last = std::max(last, m->decision->decided_at);
  }
  completed_ = true;
  result_.completed_at = last;
  for (const sim::EventHandle& h : handles_) sim_.Cancel(h);
  handles_.clear();
  if (on_complete_) {
    // Deferred so the callback may destroy this engine.
    sim_.After(0.0, committee_.leader(round_), "round-complete",
               [cb = on_complete_, r = result_] { cb(r); });
  }
}

RoundResult RunSingleRound(const committee::Committee& committee,
                           std::uint64_t round, const ConsensusConfig& config,
                           const std::map<NodeId, Strategy>& byzantine,
                           ProposalSource source,
                           std::uint64_t adversary_seed) {
  sim::Simulator sim(/*record_log=*/false);
  RoundEngine engine(sim, committee, round, config, byzantine,
                     std::move(source), adversary_seed);
  engine.Start(nullptr);
  sim.RunAll();
  return engine.result();
}

}  // namespace thinkey::consensus
