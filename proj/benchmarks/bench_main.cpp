#include <benchmark/benchmark.h>

#include <map>
#include <string>

#include "gke/group.hpp"
#include "gke/protocol.hpp"
#include "gke/runner.hpp"
#include "gke/scenario.hpp"
#include "gke/verify.hpp"

namespace {

using namespace gke;

const Group& preset(int index) {
  static const Group groups[] = {load_group("tiny"), load_group("medium"), load_group("modp2048")};
  return groups[index];
}

void BM_Exp(benchmark::State& state) {
  const Group& g = preset(static_cast<int>(state.range(0)));
  Rng rng(1);
  const Element base = g.exp_g(g.sample_scalar(rng));
  const Scalar e = g.sample_scalar(rng);
  for (auto _ : state) benchmark::DoNotOptimize(g.exp(base, e));
  state.SetLabel(std::string(kPresetNames[state.range(0)]));
}
BENCHMARK(BM_Exp)->DenseRange(0, 2);

void BM_Membership(benchmark::State& state) {
  const Group& g = preset(2);
  Rng rng(2);
  const mpz_class v = g.exp_g(g.sample_scalar(rng)).value();
  for (auto _ : state) benchmark::DoNotOptimize(g.is_member(v));
}
BENCHMARK(BM_Membership);

struct Setup {
  std::map<MemberId, MemberState> members;
  PublishedKeys published;
  MemberElements partials;
};

Setup ika_setup(const Group& g, std::uint32_t n, Rng& rng) {
  Setup s;
  for (std::uint32_t i = 1; i <= n; ++i) s.members.emplace(MemberId{i}, make_member(MemberId{i}, sample_key_pair(g, rng)));
  for (const auto& [id, m] : s.members) {
    if (id != MemberId{1}) s.published.emplace(id, publish_keys(m, Variant::kP1));
  }
  for (const auto& [id, m] : s.members) {
    if (id != MemberId{1}) s.partials.emplace(id, partial_product(g, m, s.published, MemberId{1}));
  }
  return s;
}

// Controller-side cost of the centralised IKA in the 2048-bit group.
void BM_Ika1Build(benchmark::State& state) {
  const Group& g = preset(2);
  Rng rng(3);
  Setup s = ika_setup(g, static_cast<std::uint32_t>(state.range(0)), rng);
  const KeyPair fresh = sample_key_pair(g, rng);
  for (auto _ : state) {
    MemberState controller = s.members.at(MemberId{1});
    benchmark::DoNotOptimize(ika1_build_keying(g, controller, s.published, s.partials, fresh));
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_Ika1Build)->RangeMultiplier(4)->Range(4, 64)->Unit(benchmark::kMillisecond)->Complexity();

void BM_Recover(benchmark::State& state) {
  const Group& g = preset(2);
  Rng rng(4);
  Setup s = ika_setup(g, 8, rng);
  const auto out = ika1_build_keying(g, s.members.at(MemberId{1}), s.published, s.partials, rng);
  MemberState member = s.members.at(MemberId{2});
  for (auto _ : state) benchmark::DoNotOptimize(recover(g, member, out.message));
}
BENCHMARK(BM_Recover)->Unit(benchmark::kMillisecond);

void BM_Rekey(benchmark::State& state) {
  const Group& g = preset(2);
  Rng rng(5);
  Setup s = ika_setup(g, static_cast<std::uint32_t>(state.range(0)), rng);
  const auto out = ika1_build_keying(g, s.members.at(MemberId{1}), s.published, s.partials, rng);
  const KeyPair fresh = sample_key_pair(g, rng);
  for (auto _ : state) {
    MemberState controller = s.members.at(MemberId{2});
    benchmark::DoNotOptimize(aka_rekey(g, controller, out.message, out.key, fresh));
  }
}
BENCHMARK(BM_Rekey)->Arg(8)->Arg(32)->Unit(benchmark::kMillisecond);

// Whole scenario including the runner's per-epoch oracle checks.
void BM_Scenario(benchmark::State& state) {
  const Group& g = preset(static_cast<int>(state.range(0)));
  const Script script = parse_script_text(R"([{"kind": "ika", "variant": "P1", "controller": 1, "members": 8},
      {"kind": "rekey", "controller": 2}, {"kind": "evict", "controller": 3, "leavers": [4, 5]},
      {"kind": "join", "collector": 6, "joiners": [{"id": 9}, {"id": 10}]}])");
  for (auto _ : state) benchmark::DoNotOptimize(run_scenario(script, g, 1));
  state.SetLabel(std::string(kPresetNames[state.range(0)]));
}
BENCHMARK(BM_Scenario)->Arg(1)->Arg(2)->Unit(benchmark::kMillisecond);

void BM_Verify(benchmark::State& state) {
  const Group& g = preset(1);
  const Script script = parse_script_text(R"([{"kind": "ika", "variant": "P2", "controller": 1, "members": 12},
      {"kind": "rekey", "controller": 2}, {"kind": "rekey", "controller": 3}])");
  const Transcript t = run_scenario(script, g, 1);
  for (auto _ : state) benchmark::DoNotOptimize(verify_transcript(t, g));
}
BENCHMARK(BM_Verify)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
