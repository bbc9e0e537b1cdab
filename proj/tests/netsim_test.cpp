#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>

#include "gke/bus.hpp"
#include "gke/error.hpp"
#include "gke/runner.hpp"
#include "gke/scenario.hpp"
#include "gke/verify.hpp"
#include "support/fixtures.hpp"
#include "support/random_script.hpp"
#include "support/small_group.hpp"

namespace gke {
namespace {

using testing::SmallGroup;
using testing::U;

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "expected gke::Error";
  return ErrorCode::kParse;
}

Script f1_script() { return load_script(GKE_TEST_DATA_DIR "/f1_scenario.json"); }

Transcript f1_transcript() { return run_scenario(f1_script(), testing::tiny(), 7); }

std::vector<const TranscriptRecord*> keying_records(const Transcript& t) {
  std::vector<const TranscriptRecord*> out;
  for (const auto& rec : t.records) {
    if (rec.kind == "keying") out.push_back(&rec);
  }
  return out;
}

Envelope unicast(std::uint32_t from, std::uint32_t to, const char* kind = "partial") {
  return {Direction::kUnicast, U(from), U(to), kind, Json()};
}

Envelope broadcast(std::uint32_t from) { return {Direction::kBroadcast, U(from), std::nullopt, "keying", Json()}; }

TEST(Bus, BroadcastFansOutInIdOrder) {
  Bus bus;
  for (std::uint32_t i : {3, 1, 2}) bus.join(U(i));
  const auto records = bus.deliver(broadcast(2));
  ASSERT_EQ(records.size(), 3u);
  for (std::size_t i = 0; i < 3; ++i) {
    EXPECT_EQ(records[i].receiver, U(static_cast<std::uint32_t>(i + 1)));
    EXPECT_EQ(records[i].sender, U(2));
    EXPECT_EQ(records[i].seq, i + 1);
  }
  EXPECT_EQ(bus.take_inbox(U(1)).size(), 1u);
  EXPECT_TRUE(bus.take_inbox(U(1)).empty());
}

TEST(Bus, RoutingErrors) {
  Bus bus;
  for (std::uint32_t i : {1, 2, 3}) bus.join(U(i));
  bus.leave(U(3));
  EXPECT_EQ(code_of([&] { bus.deliver(unicast(1, 3)); }), ErrorCode::kRouting);
  EXPECT_EQ(code_of([&] { bus.deliver(unicast(3, 1)); }), ErrorCode::kRouting);
  EXPECT_EQ(code_of([&] { bus.deliver(unicast(1, 9)); }), ErrorCode::kRouting);
  EXPECT_EQ(code_of([&] { bus.join(U(1)); }), ErrorCode::kRosterConflict);
  EXPECT_EQ(bus.deliver(broadcast(1)).size(), 2u);
}

TEST(Bus, RoundOrderIsIndependentOfArrivalAndJoinOrder) {
  std::vector<Envelope> round{unicast(4, 1), broadcast(1), unicast(2, 1), unicast(3, 1),
                              unicast(2, 4, "petition")};
  auto summary = [](const std::vector<DeliveryRecord>& rs) {
    std::vector<std::tuple<std::uint32_t, std::uint32_t, std::string>> out;
    for (const auto& r : rs) out.emplace_back(r.sender.value, r.receiver.value, r.kind);
    return out;
  };
  std::vector<std::uint32_t> join_order{1, 2, 3, 4};
  Bus reference;
  for (auto i : join_order) reference.join(U(i));
  const auto expected = summary(reference.deliver_round(round));
  ASSERT_EQ(expected.size(), 8u);
  EXPECT_EQ(expected[0], std::make_tuple(2u, 1u, std::string("partial")));
  EXPECT_EQ(expected[1], std::make_tuple(2u, 4u, std::string("petition")));
  EXPECT_EQ(std::get<0>(expected[3]), 4u);
  for (std::size_t i = 4; i < 8; ++i) EXPECT_EQ(std::get<1>(expected[i]), i - 3);

  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    std::shuffle(round.begin(), round.end(), rng);
    std::shuffle(join_order.begin(), join_order.end(), rng);
    Bus bus;
    for (auto i : join_order) bus.join(U(i));
    EXPECT_EQ(summary(bus.deliver_round(round)), expected);
  }
}

TEST(Scenario, ParsesAndRoundTrips) {
  const Script s = f1_script();
  ASSERT_EQ(s.size(), 3u);
  EXPECT_EQ(event_kind(s[0]), "ika");
  EXPECT_EQ(event_kind(s[1]), "rekey");
  EXPECT_EQ(event_kind(s[2]), "join");
  const auto& ika = std::get<IkaEvent>(s[0]);
  EXPECT_EQ(ika.members.size(), 3u);
  EXPECT_EQ(*ika.members[1].r, 5);
  const Script again = parse_script(to_json(s));
  EXPECT_EQ(to_json(again), to_json(s));

  const Script counted = parse_script_text(R"([{"kind": "ika", "variant": "P2", "controller": 3, "members": 4}])");
  EXPECT_EQ(std::get<IkaEvent>(counted[0]).members.size(), 4u);
  EXPECT_EQ(std::get<IkaEvent>(counted[0]).variant, Variant::kP2);
}

TEST(Scenario, ValidationRejectsMalformedScripts) {
  auto code = [](const char* text) { return code_of([&] { parse_script_text(text); }); };
  EXPECT_EQ(code(R"([{"kind": "rekey", "controller": 1}])"), ErrorCode::kScenario);
  EXPECT_EQ(code(R"([])"), ErrorCode::kScenario);
  EXPECT_EQ(code(R"([{"kind": "ika", "controller": 1, "members": 1}])"), ErrorCode::kScenario);
  EXPECT_EQ(code(R"([{"kind": "ika", "controller": 5, "members": 3}])"), ErrorCode::kScenario);
  EXPECT_EQ(code(R"([{"kind": "ika", "variant": "P3", "controller": 1, "members": 3}])"), ErrorCode::kScenario);
  EXPECT_EQ(code(R"([{"kind": "ika", "controller": 1, "members": 3}, {"kind": "ika", "controller": 1, "members": 3}])"),
            ErrorCode::kScenario);
  EXPECT_EQ(code(R"([{"kind": "ika", "controller": 1, "members": 3}, {"kind": "join", "collector": 1, "joiners": [{"id": 2}]}])"),
            ErrorCode::kScenario);
  EXPECT_EQ(code(R"([{"kind": "ika", "controller": 1, "members": 3}, {"kind": "join", "collector": 1, "joiners": []}])"),
            ErrorCode::kScenario);
  EXPECT_EQ(code(R"([{"kind": "ika", "controller": 1, "members": 3}, {"kind": "dance"}])"), ErrorCode::kParse);
  EXPECT_EQ(code("[{"), ErrorCode::kParse);
  EXPECT_EQ(code_of([] { load_script("/nonexistent/scenario.json"); }), ErrorCode::kScenario);
}

TEST(Runner, FixtureKeysAndPinnedFields) {
  const Transcript t = f1_transcript();
  const auto keying = keying_records(t);
  ASSERT_EQ(keying.size(), 3u);
  const Group& g = testing::tiny();
  const std::vector<long> keys{3, 12, 16};
  for (std::size_t i = 0; i < 3; ++i) {
    for (const auto& [id, k] : keying[i]->oracle.at("derived_keys").items()) {
      EXPECT_EQ(g.from_hex(k.get<std::string>()).value(), keys[i]) << "epoch " << i + 1 << " member " << id;
    }
  }
  EXPECT_EQ(canonical(keying[0]->payload),
            R"({"epoch":1,"variant":"P1","roster":[1,2,3],"slots":{"1":"0000000101","2":"0000000102",)"
            R"("3":"0000000112"},"R":"0000000110","S":"0000000112"})");
  EXPECT_EQ(canonical(keying[1]->payload),
            R"({"epoch":2,"variant":"P3","roster":[1,2,3],"slots":{"1":"0000000101","2":"000000010c",)"
            R"("3":"0000000104"},"R":"0000000109","S":"0000000104"})");
  EXPECT_EQ(canonical(keying[2]->payload),
            R"({"epoch":3,"variant":"P4","roster":[1,2,3,4],"slots":{"1":"0000000106","2":"0000000110",)"
            R"("3":"000000010d","4":"0000000103"},"R":"0000000108","S":"000000010c"})");
}

TEST(Runner, SingleIkaWithFixtureScalars) {
  const Script s = parse_script_text(R"([{"kind": "ika", "variant": "P1", "controller": 1,
      "members": [{"id": 1, "r": "2", "x": "3"}, {"id": 2, "r": "5", "x": "7"}, {"id": 3, "r": "8", "x": "6"}],
      "fresh": {"r": "9", "x": "10"}}])");
  const auto summary = summarize(run_scenario(s, testing::tiny(), 99), testing::tiny());
  ASSERT_EQ(summary.size(), 1u);
  EXPECT_EQ(summary[0].key.value(), 3);
  EXPECT_EQ(summary[0].roster_size, 3u);
  EXPECT_EQ(summary[0].controller, U(1));
}

TEST(Runner, DeterministicUnderSeed) {
  const Script s = parse_script_text(R"([{"kind": "ika", "variant": "P1", "controller": 2, "members": 6},
      {"kind": "rekey", "controller": 4}, {"kind": "evict", "controller": 1, "leavers": [3, 5]},
      {"kind": "join", "collector": 6, "joiners": [{"id": 7}, {"id": 8}]}, {"kind": "attack_demo"}])");
  const Group& g = testing::medium();
  const std::string a = run_scenario(s, g, 31).to_jsonl();
  EXPECT_EQ(a, run_scenario(s, g, 31).to_jsonl());
  EXPECT_NE(a, run_scenario(s, g, 32).to_jsonl());
  // Replaying the written transcript reproduces it byte for byte.
  EXPECT_EQ(Transcript::from_jsonl(a).to_jsonl(), a);
}

TEST(Runner, TranscriptShape) {
  const Transcript t = f1_transcript();
  ASSERT_EQ(t.records.size(), 8u);
  for (std::size_t i = 1; i < t.records.size(); ++i) {
    EXPECT_GT(t.records[i].seq, t.records[i - 1].seq);
    EXPECT_GE(t.records[i].epoch, t.records[i - 1].epoch);
  }
  EXPECT_EQ(t.records[0].direction, Direction::kPublish);
  EXPECT_EQ(t.records[2].direction, Direction::kUnicast);
  EXPECT_EQ(t.records[2].receiver, U(1));
  EXPECT_EQ(t.records[4].direction, Direction::kBroadcast);
  EXPECT_FALSE(t.records[4].receiver.has_value());
  EXPECT_TRUE(t.records[0].oracle.at("pinned").get<bool>());
  const std::string plain = t.without_oracle().to_jsonl();
  EXPECT_EQ(plain.find("oracle"), std::string::npos);
}

TEST(Runner, UnpinnedScalarsAreMarked) {
  const Script s = parse_script_text(R"([{"kind": "ika", "controller": 1, "members": [{"id": 1}, {"id": 2, "r": "4", "x": "4"}]}])");
  const Transcript t = run_scenario(s, testing::tiny(), 3);
  EXPECT_TRUE(t.records[0].oracle.at("pinned").get<bool>());
  EXPECT_FALSE(keying_records(t)[0]->oracle.at("fresh").at("pinned").get<bool>());
}

TEST(Runner, ExecutionTimeRosterErrorsCarryEventIndex) {
  const Group& g = testing::tiny();
  auto index_of = [&](const char* text) -> std::optional<std::size_t> {
    try {
      run_scenario(parse_script_text(text), g, 1);
    } catch (const ScenarioError& e) {
      return e.event_index();
    }
    return std::nullopt;
  };
  EXPECT_EQ(index_of(R"([{"kind": "ika", "controller": 1, "members": 3},
      {"kind": "evict", "controller": 1, "leavers": [3]}, {"kind": "rekey", "controller": 3}])"),
            std::optional<std::size_t>(2));
  EXPECT_EQ(index_of(R"([{"kind": "ika", "controller": 1, "members": 3},
      {"kind": "evict", "controller": 2, "leavers": [2]}])"),
            std::optional<std::size_t>(1));
  EXPECT_EQ(index_of(R"([{"kind": "ika", "controller": 1, "members": 3},
      {"kind": "join", "collector": 9, "joiners": [{"id": 4}]}])"),
            std::optional<std::size_t>(1));
  EXPECT_EQ(index_of(R"([{"kind": "ika", "controller": 1, "members": 3, "fresh": {"r": "0", "x": "1"}}])"),
            std::optional<std::size_t>(0));
}

TEST(Verify, FixtureTranscriptPasses) {
  const VerifyReport report = verify_transcript(f1_transcript(), testing::tiny());
  EXPECT_TRUE(report.all_passed());
  EXPECT_EQ(report.failures(), 0u);
  EXPECT_GT(report.checks.size(), 20u);
}

TEST(Verify, PerturbedSlotFailsSlotIdentity) {
  Transcript t = f1_transcript();
  const Group& g = testing::tiny();
  for (auto& rec : t.records) {
    if (rec.kind != "keying" || rec.epoch != 2) continue;
    Json& slot = rec.payload["slots"]["3"];
    slot = g.to_hex(g.mul(g.from_hex(slot.get<std::string>()), g.generator()));
  }
  const VerifyReport report = verify_transcript(Transcript::from_jsonl(t.to_jsonl()), g);
  ASSERT_FALSE(report.all_passed());
  bool named = false;
  for (const auto& c : report.checks) {
    if (c.passed) continue;
    EXPECT_EQ(c.epoch, 2u);
    if (c.check == "slot-identity" && c.member == U(3)) named = true;
  }
  EXPECT_TRUE(named);
}

TEST(Verify, EpochSkipFailsChaining) {
  Transcript t = f1_transcript();
  for (auto& rec : t.records) {
    if (rec.kind == "keying" && rec.epoch == 3) {
      rec.epoch = 4;
      rec.payload["epoch"] = 4;
    }
  }
  const VerifyReport report = verify_transcript(t, testing::tiny());
  ASSERT_FALSE(report.all_passed());
  const auto it = std::find_if(report.checks.begin(), report.checks.end(),
                               [](const CheckResult& c) { return !c.passed; });
  EXPECT_EQ(it->check, "epoch-chain");
  EXPECT_EQ(it->epoch, 4u);
}

TEST(Verify, WrongGroupReportsMembershipFailures) {
  const VerifyReport report = verify_transcript(f1_transcript(), testing::medium());
  ASSERT_FALSE(report.all_passed());
  EXPECT_TRUE(std::any_of(report.checks.begin(), report.checks.end(),
                          [](const CheckResult& c) { return !c.passed && c.check == "membership"; }));
}

TEST(Verify, MissingOracleIsAParseError) {
  EXPECT_EQ(code_of([] { verify_transcript(f1_transcript().without_oracle(), testing::tiny()); }), ErrorCode::kParse);
}

TEST(Verify, MalformedLinesAreNamed) {
  std::string text = f1_transcript().to_jsonl();
  const auto second = text.find('\n') + 1;
  text.insert(second, "{not json\n");
  try {
    Transcript::from_jsonl(text);
    FAIL() << "expected a parse error";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kParse);
    EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos) << e.what();
  }
  std::string reordered = f1_transcript().to_jsonl();
  const auto first_end = reordered.find('\n') + 1;
  const std::string line1 = reordered.substr(0, first_end);
  reordered.erase(0, first_end);
  reordered += line1;
  EXPECT_EQ(code_of([&] { Transcript::from_jsonl(reordered); }), ErrorCode::kParse);
}

TEST(Fingerprint, MagnitudeHexDigits) {
  const Group& g = testing::tiny();
  EXPECT_EQ(fingerprint(g, testing::el(g, 3)), "03");
  const Group& big = testing::modp2048();
  const std::string fp = fingerprint(big, big.exp_g(big.scalar(123456789)));
  EXPECT_EQ(fp.size(), 8u);
}

// Random scripts: the runner checks every epoch against the exponent oracle
// and throws on any disagreement, and the transcript verifier replays it.
void random_suite(const Group& g, int count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  for (int i = 0; i < count; ++i) {
    const Script script = testing::random_script(rng);
    Transcript t;
    ASSERT_NO_THROW(t = run_scenario(script, g, seed + static_cast<std::uint64_t>(i)))
        << canonical(to_json(script));
    const VerifyReport report = verify_transcript(t, g);
    ASSERT_TRUE(report.all_passed()) << canonical(to_json(script));
    for (const TranscriptRecord* rec : keying_records(t)) {
      const Json& oracle = rec->oracle;
      for (const auto& [id, k] : oracle.at("derived_keys").items()) {
        ASSERT_EQ(k, oracle.at("expected_key"));
      }
    }
  }
}

TEST(OracleEquivalence, RandomTinyScripts) { random_suite(testing::tiny(), 500, 1000); }

TEST(OracleEquivalence, RandomMediumScripts) { random_suite(testing::medium(), 100, 2000); }

// In the medium group a probe hits by accident with probability 1/q. A hit is
// only acceptable when the discrete logs explain it: with slot owner (xi, rho)
// and prober (xi', rho'), the probe yields K exactly when
// log S * (xi' - xi) + log R * (rho' - rho) = 0 mod q.
TEST(MembershipSecrecy, HitsOnlyFromExplainedCollisions) {
  const Group& g = testing::medium();
  const SmallGroup s = SmallGroup::medium();
  std::mt19937_64 rng(77);
  std::size_t probes = 0;
  std::size_t hits = 0;
  for (int i = 0; i < 100; ++i) {
    testing::ScriptShape shape;
    shape.allow_attack_demo = false;
    const Transcript t = run_scenario(testing::random_script(rng, shape), g, 500 + static_cast<std::uint64_t>(i));
    const SecrecyReport report = probe_membership_secrecy(t, g);
    probes += report.eviction_probes + report.join_probes;
    for (const SecrecyProbe& hit : report.hits) {
      ++hits;
      const TranscriptRecord& rec = *std::find_if(t.records.begin(), t.records.end(),
                                                  [&](const TranscriptRecord& r) { return r.seq == hit.seq; });
      const std::uint64_t log_r = s.dlog(g.from_hex(rec.payload.at("R").get<std::string>()).value().get_ui());
      const std::uint64_t log_s =
          rec.payload.contains("S") ? s.dlog(g.from_hex(rec.payload.at("S").get<std::string>()).value().get_ui())
                                    : log_r;
      const auto dx = static_cast<std::int64_t>(hit.prober_pair.x.value().get_si()) - hit.slot_pair.x.value().get_si();
      const auto dr = static_cast<std::int64_t>(hit.prober_pair.r.value().get_si()) - hit.slot_pair.r.value().get_si();
      EXPECT_EQ(s.mod_q(static_cast<std::int64_t>(s.mod_q(static_cast<std::int64_t>(log_s) * dx) +
                                                  s.mod_q(static_cast<std::int64_t>(log_r) * dr))),
                0u);
    }
  }
  EXPECT_GT(probes, 1000u);
  // Expected accidental hits: probes / 1019. Allow generous slack.
  EXPECT_LE(hits, 5 + probes / 100);
}

TEST(MembershipSecrecy, FixtureJoinerLearnsNothingEarlier) {
  const SecrecyReport report = probe_membership_secrecy(f1_transcript(), testing::tiny());
  EXPECT_EQ(report.eviction_probes, 0u);
  // U4 probes three slots at epoch 1 and three at epoch 2.
  EXPECT_EQ(report.join_probes, 6u);
}

}  // namespace
}  // namespace gke
