#pragma once

// The authentication session state machine: a verifier (Trent) and r users
// share secret identity numbers; one session distributes N GHZ states,
// runs the sampled eavesdropping check, forms M groups of two states,
// encodes key bits as local operators, blinds with the verifier's random
// operator, and recovers the users' bits from pairwise Bell measurements.
// All classical messages are recorded in an append-only transcript; the
// machine-readable result is a SessionReport with a stable JSON form (see
// docs/session_report.schema.json).

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "ghzauth/adversary.hpp"
#include "ghzauth/authkey.hpp"
#include "ghzauth/entanglement.hpp"
#include "ghzauth/rng.hpp"
#include "ghzauth/statevec.hpp"

namespace ghzauth {

struct UserCredential {
  IdentityNumber id;
  std::uint64_t counter = 0;
  int counter_bits = 64;
};

struct SessionConfig {
  int r = 2;                      // number of users
  int n_states = 0;               // N, GHZ states prepared
  double sample_fraction = 0.25;  // fraction of N consumed by the check
  int m_groups = 0;               // M, groups formed after the check
  std::uint64_t seed = 0;
  AttackModel attack = NoAttack{};
  double check_threshold = 0.0;  // max tolerated mismatch fraction
  std::vector<UserCredential> users;  // defaults derived from the user index when empty

  int check_samples() const {
    return static_cast<int>(std::llround(sample_fraction * n_states));
  }

  void validate() const {
    if (r < 2 || r > 7) throw std::invalid_argument("user count r must be in 2..7");
    if (n_states < 0) throw std::invalid_argument("n_states must be nonnegative");
    if (m_groups < 1) throw std::invalid_argument("m_groups must be at least 1");
    if (!(sample_fraction > 0.0 && sample_fraction < 1.0))
      throw std::invalid_argument("sample_fraction must lie strictly between 0 and 1");
    if (check_threshold < 0.0 || check_threshold > 1.0)
      throw std::invalid_argument("check_threshold must lie in [0, 1]");
    if (!users.empty() && static_cast<int>(users.size()) != r)
      throw std::invalid_argument("users list must match r when given");
    if (const auto* gc = std::get_if<GeneralCollective>(&attack)) gc->coeffs.validate();
  }
};

struct S2Result {
  int k = 0;
  int mismatches = 0;
  double rate = 0.0;
  bool pass = false;
};

struct GroupRecord {
  int p_index = -1;  // position of the transformed state in the prepared order
  int q_index = -1;  // position of the reference state
  PauliChoice trent_op = PauliChoice::Identity;  // never published
  std::vector<int> user_bits_applied;
  std::vector<BellOutcome> outcomes;  // position 0 = verifier's (T,T') pair
  std::vector<int> deduced_bits;
  bool consistent = false;
};

struct AuthVerdict {
  int user = 0;  // 1-based
  bool accepted = false;
  int mismatching_groups = 0;
  int inconsistent_groups = 0;
};

using Transcript = std::vector<nlohmann::json>;

struct SessionReport {
  SessionConfig config;
  S2Result s2;
  std::vector<GroupRecord> groups;
  std::vector<AuthVerdict> verdicts;  // empty when the session aborted at the check
  Transcript transcript;
  std::vector<std::uint64_t> final_counters;
  int discarded_states = 0;
};

// Fills deduced bits and consistency flags from the recorded Bell outcomes,
// then compares against the users' stretched keys. keys[j] holds user j+1's
// key bits, one per group. Strict policy: a single mismatching or
// inconsistent group rejects.
inline std::vector<AuthVerdict> judge_groups(std::vector<GroupRecord>& groups,
                                             const std::vector<std::vector<std::uint8_t>>& keys) {
  const int r = static_cast<int>(keys.size());
  std::vector<AuthVerdict> verdicts(r);
  for (int j = 0; j < r; ++j) verdicts[j].user = j + 1;

  int inconsistent = 0;
  for (std::size_t g = 0; g < groups.size(); ++g) {
    GroupRecord& group = groups[g];
    const DeduceResult deduced = deduce_ops(group.outcomes, group.trent_op);
    group.deduced_bits = deduced.user_bits;
    group.consistent = deduced.consistent;
    if (!group.consistent) ++inconsistent;
    for (int j = 0; j < r; ++j) {
      if (group.deduced_bits[j] != static_cast<int>(keys[j][g])) ++verdicts[j].mismatching_groups;
    }
  }
  for (int j = 0; j < r; ++j) {
    verdicts[j].inconsistent_groups = inconsistent;
    verdicts[j].accepted =
        verdicts[j].mismatching_groups == 0 && verdicts[j].inconsistent_groups == 0;
  }
  return verdicts;
}

class Session {
 public:
  explicit Session(SessionConfig cfg) : cfg_(std::move(cfg)), rng_(cfg_.seed) {
    cfg_.validate();
    if (cfg_.users.empty()) {
      for (int j = 0; j < cfg_.r; ++j) {
        cfg_.users.push_back(
            UserCredential{IdentityNumber::from_value(splitmix64(static_cast<std::uint64_t>(j) + 1)),
                           0, 64});
      }
    }
  }

  const SessionConfig& config() const { return cfg_; }
  const Transcript& transcript() const { return transcript_; }

  // Prepares the N ordered GHZ states and routes the user-bound qubits
  // through the (possibly attacking) channel; the verifier keeps his qubits.
  void distribute() {
    require_stage(Stage::Fresh, "distribute");
    const ChannelState prototype = channel_transform(cfg_.attack, cfg_.r);
    states_.assign(cfg_.n_states, prototype);
    consumed_.assign(cfg_.n_states, false);
    stage_ = Stage::Distributed;
  }

  // Sampled correlation check. The verifier picks k positions and a random
  // basis per position; everyone measures; users publish first, the verifier
  // compares and only then reveals his own results. Sampled states are
  // consumed.
  S2Result eavesdrop_check() {
    require_stage(Stage::Distributed, "eavesdrop_check");
    const int k = cfg_.check_samples();
    if (k <= 0) throw std::invalid_argument("eavesdropping check needs at least one sample");

    std::vector<int> order(cfg_.n_states);
    std::iota(order.begin(), order.end(), 0);
    shuffle(order);
    std::vector<int> positions(order.begin(), order.begin() + k);
    std::sort(positions.begin(), positions.end());

    std::vector<MeasBasis> bases;
    bases.reserve(k);
    for (int i = 0; i < k; ++i) bases.push_back(rng_.bit() ? MeasBasis::X : MeasBasis::Z);

    // Outcomes indexed [party][sample]; party 0 is the verifier.
    std::vector<std::vector<int>> outcomes(cfg_.r + 1, std::vector<int>(k));
    for (int i = 0; i < k; ++i) {
      ChannelState& cs = states_[positions[i]];
      auto [trent_outcome, after_trent] = measure_qubit(cs.state, cs.trent_qubit, bases[i], rng_);
      outcomes[0][i] = trent_outcome;
      cs.state = std::move(after_trent);
      for (int j = 0; j < cfg_.r; ++j) {
        auto [user_outcome, after_user] =
            measure_qubit(cs.state, cs.user_qubits[j], bases[i], rng_);
        outcomes[j + 1][i] = user_outcome;
        cs.state = std::move(after_user);
      }
      consumed_[positions[i]] = true;
    }

    nlohmann::json basis_names = nlohmann::json::array();
    for (const MeasBasis b : bases) basis_names.push_back(basis_name(b));
    transcript_.push_back(
        {{"type", "s2_announce"}, {"positions", positions}, {"bases", basis_names}});
    for (int j = 1; j <= cfg_.r; ++j) {
      transcript_.push_back({{"type", "s2_user_results"}, {"user", j}, {"results", outcomes[j]}});
    }

    int mismatches = 0;
    std::vector<int> sample(cfg_.r + 1);
    for (int i = 0; i < k; ++i) {
      for (int p = 0; p <= cfg_.r; ++p) sample[p] = outcomes[p][i];
      if (correlation_violated(bases[i], sample)) ++mismatches;
    }

    s2_.k = k;
    s2_.mismatches = mismatches;
    s2_.rate = static_cast<double>(mismatches) / k;
    s2_.pass = s2_.rate <= cfg_.check_threshold + 1e-12;

    transcript_.push_back({{"type", "s2_trent_verdict"},
                           {"mismatches", mismatches},
                           {"rate", s2_.rate},
                           {"pass", s2_.pass}});
    if (s2_.pass) {
      // Only a passing check is followed by the verifier's own results, which
      // let the users confirm the correlation from their side.
      transcript_.push_back({{"type", "s2_trent_results"}, {"results", outcomes[0]}});
      transcript_.push_back({{"type", "s2_users_confirm"}, {"confirmed", true}});
    }

    stage_ = s2_.pass ? Stage::Checked : Stage::Aborted;
    return s2_;
  }

  // Randomly pairs the unconsumed states into M ordered groups (P, Q);
  // leftovers are discarded and logged.
  void partition_groups() {
    require_stage(Stage::Checked, "partition_groups");
    std::vector<int> remaining;
    for (int i = 0; i < cfg_.n_states; ++i) {
      if (!consumed_[i]) remaining.push_back(i);
    }
    if (static_cast<int>(remaining.size()) < 2 * cfg_.m_groups)
      throw std::runtime_error("not enough unconsumed states to form the requested groups");

    shuffle(remaining);
    groups_.clear();
    nlohmann::json pairs = nlohmann::json::array();
    for (int g = 0; g < cfg_.m_groups; ++g) {
      GroupRecord record;
      record.p_index = remaining[2 * g];
      record.q_index = remaining[2 * g + 1];
      groups_.push_back(std::move(record));
      pairs.push_back({groups_[g].p_index, groups_[g].q_index});
    }
    discarded_ = static_cast<int>(remaining.size()) - 2 * cfg_.m_groups;

    transcript_.push_back({{"type", "groups_formed"}, {"pairs", pairs}, {"discarded", discarded_}});
    stage_ = Stage::Partitioned;
  }

  // Each user stretches their key to M bits and applies I (bit 0) or
  // i sigma_y (bit 1) to their qubit of each group's P state. The users only
  // announce that they are done; the bits themselves stay private.
  void encode_keys() {
    require_stage(Stage::Partitioned, "encode_keys");
    keys_.clear();
    final_counters_.clear();
    for (int j = 0; j < cfg_.r; ++j) {
      const UserCredential& user = cfg_.users[j];
      const AuthKey key = extend_key(user.id, Counter(user.counter, user.counter_bits),
                                     static_cast<std::size_t>(cfg_.m_groups));
      keys_.push_back(key.bits);
      final_counters_.push_back(user.counter + blocks_for(static_cast<std::size_t>(cfg_.m_groups)));
    }

    for (int g = 0; g < cfg_.m_groups; ++g) {
      GroupRecord& group = groups_[g];
      ChannelState& p_state = states_[group.p_index];
      for (int j = 0; j < cfg_.r; ++j) {
        const int bit = keys_[j][g];
        group.user_bits_applied.push_back(bit);
        p_state.state = apply_pauli(p_state.state, p_state.user_qubits[j], pauli_from_bit(bit));
      }
    }
    for (int j = 1; j <= cfg_.r; ++j) {
      transcript_.push_back({{"type", "user_transformed"}, {"user", j}});
    }
    stage_ = Stage::Encoded;
  }

  // The verifier applies a uniformly random operator to his qubit of each
  // group's P state. The choice is stored in the group record and never
  // enters the transcript.
  void trent_randomize() {
    require_stage(Stage::Encoded, "trent_randomize");
    for (GroupRecord& group : groups_) {
      group.trent_op = pauli_from_bit(rng_.bit());
      ChannelState& p_state = states_[group.p_index];
      p_state.state = apply_pauli(p_state.state, p_state.trent_qubit, group.trent_op);
    }
    stage_ = Stage::Randomized;
  }

  // Pairwise Bell measurements per group: users measure and publish first,
  // then the verifier measures his own pair, deduces the applied bits, and
  // issues per-user verdicts.
  SessionReport authenticate() {
    require_stage(Stage::Randomized, "authenticate");
    for (GroupRecord& group : groups_) {
      const ChannelState& p = states_[group.p_index];
      const ChannelState& q = states_[group.q_index];
      StateVector combined = tensor(p.state, q.state);
      const int offset = p.state.n_qubits();

      std::vector<BellOutcome> user_outcomes;
      for (int j = 0; j < cfg_.r; ++j) {
        auto [outcome, collapsed] =
            measure_bell(combined, p.user_qubits[j], offset + q.user_qubits[j], rng_);
        user_outcomes.push_back(outcome);
        combined = std::move(collapsed);
      }
      auto [trent_outcome, collapsed] =
          measure_bell(combined, p.trent_qubit, offset + q.trent_qubit, rng_);
      combined = std::move(collapsed);

      group.outcomes.push_back(trent_outcome);
      group.outcomes.insert(group.outcomes.end(), user_outcomes.begin(), user_outcomes.end());
    }

    for (int j = 1; j <= cfg_.r; ++j) {
      nlohmann::json outcomes = nlohmann::json::array();
      for (const GroupRecord& group : groups_) outcomes.push_back(group.outcomes[j].name());
      transcript_.push_back({{"type", "bell_outcomes"}, {"user", j}, {"outcomes", outcomes}});
    }

    std::vector<AuthVerdict> verdicts = judge_groups(groups_, keys_);

    nlohmann::json verdicts_json = nlohmann::json::array();
    for (const AuthVerdict& v : verdicts) {
      verdicts_json.push_back({{"user", v.user},
                               {"accepted", v.accepted},
                               {"mismatching_groups", v.mismatching_groups},
                               {"inconsistent_groups", v.inconsistent_groups}});
    }
    transcript_.push_back({{"type", "verdicts"}, {"verdicts", verdicts_json}});
    stage_ = Stage::Done;

    return build_report(std::move(verdicts));
  }

  // Report for a session that failed the check and aborted: no groups, no
  // verdicts, counters untouched.
  SessionReport abort_report() const {
    if (stage_ != Stage::Aborted)
      throw std::logic_error("abort_report is only valid after a failed check");
    SessionReport report;
    report.config = cfg_;
    report.s2 = s2_;
    report.transcript = transcript_;
    for (const UserCredential& user : cfg_.users) report.final_counters.push_back(user.counter);
    report.discarded_states = 0;
    return report;
  }

 private:
  enum class Stage { Fresh, Distributed, Checked, Partitioned, Encoded, Randomized, Done, Aborted };

  void require_stage(Stage expected, const char* op) const {
    if (stage_ != expected)
      throw std::logic_error(std::string(op) + " called out of protocol order");
  }

  void shuffle(std::vector<int>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::swap(v[i - 1], v[rng_.below(i)]);
    }
  }

  SessionReport build_report(std::vector<AuthVerdict> verdicts) const {
    SessionReport report;
    report.config = cfg_;
    report.s2 = s2_;
    report.groups = groups_;
    report.verdicts = std::move(verdicts);
    report.transcript = transcript_;
    report.final_counters = final_counters_;
    report.discarded_states = discarded_;
    return report;
  }

  SessionConfig cfg_;
  Rng rng_;
  Stage stage_ = Stage::Fresh;
  std::vector<ChannelState> states_;
  std::vector<bool> consumed_;
  S2Result s2_;
  std::vector<GroupRecord> groups_;
  std::vector<std::vector<std::uint8_t>> keys_;
  std::vector<std::uint64_t> final_counters_;
  int discarded_ = 0;
  Transcript transcript_;
};

// Full pipeline: distribute, check, then either abort with a failed report
// or continue through group formation, key encoding, blinding and
// authentication.
inline SessionReport run_session(const SessionConfig& cfg) {
  Session session(cfg);
  session.distribute();
  const S2Result s2 = session.eavesdrop_check();
  if (!s2.pass) return session.abort_report();
  session.partition_groups();
  session.encode_keys();
  session.trent_randomize();
  return session.authenticate();
}

// Exit status a report maps to: 0 all users accepted, 2 failed check,
// 3 at least one user rejected.
inline int exit_code_for(const SessionReport& report) {
  if (!report.s2.pass) return 2;
  for (const AuthVerdict& v : report.verdicts) {
    if (!v.accepted) return 3;
  }
  return 0;
}

// --- JSON forms -------------------------------------------------------------

inline nlohmann::json config_to_json(const SessionConfig& cfg) {
  nlohmann::json users = nlohmann::json::array();
  for (const UserCredential& user : cfg.users) {
    users.push_back({{"id_hex", user.id.to_hex()},
                     {"id_bits", user.id.length()},
                     {"counter", user.counter},
                     {"counter_bits", user.counter_bits}});
  }
  return {{"r", cfg.r},
          {"n_states", cfg.n_states},
          {"sample_fraction", cfg.sample_fraction},
          {"m_groups", cfg.m_groups},
          {"seed", cfg.seed},
          {"attack", attack_to_json(cfg.attack)},
          {"check_threshold", cfg.check_threshold},
          {"users", users}};
}

inline SessionConfig config_from_json(const nlohmann::json& j) {
  SessionConfig cfg;
  cfg.r = j.at("r").get<int>();
  cfg.n_states = j.at("n_states").get<int>();
  cfg.m_groups = j.at("m_groups").get<int>();
  if (j.contains("sample_fraction")) cfg.sample_fraction = j.at("sample_fraction").get<double>();
  if (j.contains("seed")) cfg.seed = j.at("seed").get<std::uint64_t>();
  if (j.contains("check_threshold")) cfg.check_threshold = j.at("check_threshold").get<double>();
  if (j.contains("attack")) cfg.attack = attack_from_json(j.at("attack"));
  if (j.contains("users")) {
    for (const nlohmann::json& u : j.at("users")) {
      UserCredential user;
      user.id = IdentityNumber::from_hex(u.at("id_hex").get<std::string>());
      if (u.contains("id_bits") &&
          u.at("id_bits").get<int>() != user.id.length()) {
        throw std::invalid_argument("id_bits does not match the id_hex length");
      }
      if (u.contains("counter")) user.counter = u.at("counter").get<std::uint64_t>();
      if (u.contains("counter_bits")) user.counter_bits = u.at("counter_bits").get<int>();
      cfg.users.push_back(std::move(user));
    }
  }
  cfg.validate();
  return cfg;
}

// Stable JSON document for a finished session. The verifier's secret
// operator choices are redacted (null) unless reveal_trent_ops is set.
inline nlohmann::json report_to_json(const SessionReport& report, bool reveal_trent_ops = false) {
  nlohmann::json groups = nlohmann::json::array();
  for (const GroupRecord& group : report.groups) {
    nlohmann::json outcomes = nlohmann::json::array();
    for (const BellOutcome& b : group.outcomes) outcomes.push_back(b.name());
    nlohmann::json g = {{"p_index", group.p_index},
                        {"q_index", group.q_index},
                        {"trent_op", nullptr},
                        {"outcomes", outcomes},
                        {"deduced_bits", group.deduced_bits},
                        {"consistent", group.consistent}};
    if (reveal_trent_ops) g["trent_op"] = pauli_name(group.trent_op);
    groups.push_back(std::move(g));
  }

  nlohmann::json verdicts = nlohmann::json::array();
  for (const AuthVerdict& v : report.verdicts) {
    verdicts.push_back({{"user", v.user},
                        {"accepted", v.accepted},
                        {"mismatching_groups", v.mismatching_groups},
                        {"inconsistent_groups", v.inconsistent_groups}});
  }

  return {{"schema_version", 1},
          {"config", config_to_json(report.config)},
          {"s2",
           {{"k", report.s2.k},
            {"mismatches", report.s2.mismatches},
            {"rate", report.s2.rate},
            {"pass", report.s2.pass}}},
          {"groups", groups},
          {"verdicts", verdicts},
          {"transcript", report.transcript},
          {"final_counters", report.final_counters},
          {"discarded_states", report.discarded_states}};
}

}  // namespace ghzauth
