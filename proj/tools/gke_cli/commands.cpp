#include "gke_cli/commands.hpp"

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "gke/adversary.hpp"
#include "gke/error.hpp"
#include "gke/runner.hpp"
#include "gke/scenario.hpp"
#include "gke/transcript.hpp"
#include "gke/verify.hpp"
#include "gke/wire.hpp"

namespace gke::cli {
namespace {

Json read_json_file(const std::string& path, const char* what) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kParse, std::string(what) + " not found: " + path);
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::kParse, std::string(what) + " is not valid JSON: " + e.what());
  }
}

mpz_class integer_field(const Json& j, const char* name) {
  if (!j.contains(name)) throw Error(ErrorCode::kParse, std::string("group file lacks '") + name + "'");
  const Json& v = j.at(name);
  if (v.is_number_unsigned()) return mpz_class(v.get<unsigned long>());
  if (v.is_string()) return parse_integer(v.get<std::string>());
  throw Error(ErrorCode::kParse, std::string("group field '") + name + "' must be a string");
}

Group group_from_json(const Json& j) {
  if (j.is_string()) return load_group(j.get<std::string>());
  if (!j.is_object()) throw Error(ErrorCode::kParse, "group must be a preset name or {p, q, g}");
  return load_group(integer_field(j, "p"), integer_field(j, "q"), integer_field(j, "g"));
}

int report_error(std::ostream& err, const Error& e) {
  err << "error[" << to_string(e.code()) << "]: " << e.what() << '\n';
  switch (e.code()) {
    case ErrorCode::kInvariant: return kExitFailure;
    case ErrorCode::kAttackInapplicable: return kExitInapplicable;
    default: return kExitUsage;
  }
}

void print_failures(const VerifyReport& report, std::ostream& out, int verbosity) {
  for (const CheckResult& c : report.checks) {
    if (c.passed && verbosity == 0) continue;
    out << (c.passed ? "pass " : "FAIL ") << c.check << " epoch " << c.epoch;
    if (c.member) out << " member " << to_string(*c.member);
    if (!c.detail.empty()) out << ": " << c.detail;
    out << '\n';
  }
  out << "checks: " << report.checks.size() - report.failures() << " passed, "
      << report.failures() << " failed\n";
}

}  // namespace

Group load_group_file(const std::string& path) {
  const Json j = read_json_file(path, "group file");
  // Also accepts a full config file with the group under "group".
  return group_from_json(j.contains("group") ? j.at("group") : j);
}

Group resolve_group(const Config& config) {
  if (config.group_preset && config.group_file) {
    throw Error(ErrorCode::kParse, "give either --group or --group-file, not both");
  }
  if (config.group_file) return load_group_file(*config.group_file);
  return load_group(config.group_preset.value_or(kDefaultGroup));
}

int cmd_run(const Config& config, std::ostream& out, std::ostream& err) {
  try {
    const Group group = resolve_group(config);
    const Script script = load_script(config.scenario);
    const Transcript transcript = run_scenario(script, group, config.seed);
    if (!config.out.empty()) write_transcript(transcript, config.out);

    out << "scenario " << config.scenario << ": " << script.size() << " events, seed "
        << config.seed << '\n';
    const auto epochs = summarize(transcript, group);
    for (const EpochSummary& e : epochs) {
      out << "epoch " << e.epoch << "  " << to_string(e.variant) << "  controller "
          << to_string(e.controller) << "  members " << e.roster_size << "  key "
          << fingerprint(group, e.key) << '\n';
    }
    out << epochs.size() << " epochs\n";
    const VerifyReport report = verify_transcript(transcript, group);
    print_failures(report, out, config.verbosity);
    out << (report.all_passed() ? "PASS" : "FAIL") << '\n';
    return report.all_passed() ? kExitOk : kExitFailure;
  } catch (const Error& e) {
    return report_error(err, e);
  }
}

int cmd_verify(const std::string& transcript_path, const Config& config, std::ostream& out,
               std::ostream& err) {
  try {
    const Group group = resolve_group(config);
    const Transcript transcript = read_transcript(transcript_path);
    const VerifyReport report = verify_transcript(transcript, group);
    print_failures(report, out, config.verbosity);
    out << (report.all_passed() ? "PASS" : "FAIL") << '\n';
    return report.all_passed() ? kExitOk : kExitFailure;
  } catch (const Error& e) {
    return report_error(err, e);
  }
}

int cmd_attack(const std::optional<std::string>& transcript_path,
               std::optional<std::size_t> single_key_n, const Config& config, std::ostream& out,
               std::ostream& err) {
  try {
    const Group group = resolve_group(config);
    if (single_key_n) {
      const std::size_t n = *single_key_n;
      Rng rng(config.seed);
      std::map<MemberId, Scalar> scalars;
      for (std::uint32_t i = 1; i <= n; ++i) scalars.emplace(MemberId{i}, group.sample_scalar(rng));
      const SingleKeyOutput flawed = single_key_ika(group, scalars, MemberId{1});
      const Element recovered = product_attack(group, flawed.broadcast);
      const bool ok = recovered == flawed.key;
      AttackReport report{.mode = "single-key",
                          .variant = "single-key",
                          .n = n,
                          .applicable = true,
                          .recovered = ok,
                          .matches_true_key = ok};
      out << canonical(to_json(report)) << '\n';
      out << "RECOVERED: " << (ok ? "yes" : "no") << '\n';
      return ok ? kExitOk : kExitFailure;
    }

    const Transcript transcript = read_transcript(*transcript_path);
    const auto reports = attack_transcript(group, transcript);
    bool any_applicable = false;
    bool any_recovered = false;
    for (const AttackReport& report : reports) {
      out << canonical(to_json(report)) << '\n';
      any_applicable = any_applicable || report.applicable;
      any_recovered = any_recovered || report.recovered;
    }
    if (!any_applicable) {
      err << "error[attack-inapplicable]: no IKA broadcast admits the product attack\n";
      return kExitInapplicable;
    }
    out << "RECOVERED: " << (any_recovered ? "yes" : "no") << '\n';
    return any_recovered ? kExitFailure : kExitOk;
  } catch (const Error& e) {
    return report_error(err, e);
  }
}

int cmd_groups(std::ostream& out) {
  for (std::string_view name : kPresetNames) {
    const Group group = load_group(name);
    const GroupParams& p = group.params();
    out << name << ": " << mpz_sizeinbase(p.p.get_mpz_t(), 2) << "-bit p\n"
        << "  p = 0x" << p.p.get_str(16) << "\n"
        << "  q = 0x" << p.q.get_str(16) << "\n"
        << "  g = " << p.g.get_str(10) << "\n";
  }
  return kExitOk;
}

int run_cli(int argc, char** argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Group key agreement: run scenarios, verify transcripts, demonstrate attacks"};
  app.require_subcommand(1);

  Config config;
  std::string config_path;
  if (const char* env = std::getenv(kConfigEnvVar)) config_path = env;

  std::string group_flag;
  std::string group_file_flag;
  std::uint64_t seed_flag = kDefaultSeed;
  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--config", config_path, "JSON config file (default: $GKE_CONFIG)");
    cmd->add_option("--group", group_flag, "group preset: tiny, medium, modp2048");
    cmd->add_option("--group-file", group_file_flag, "JSON file with custom p, q, g");
    cmd->add_option("--seed", seed_flag, "random seed");
    cmd->add_flag("-v,--verbose", config.verbosity, "print every check");
  };

  CLI::App* run = app.add_subcommand("run", "run a scenario and write its transcript");
  add_common(run);
  run->add_option("--scenario", config.scenario, "scenario JSON file")->required();
  run->add_option("--out", config.out, "transcript output path (JSON Lines)");

  std::string transcript_path;
  CLI::App* verify = app.add_subcommand("verify", "check a transcript against its oracle section");
  add_common(verify);
  verify->add_option("transcript", transcript_path, "transcript file")->required();

  std::size_t single_key = 0;
  CLI::App* attack = app.add_subcommand("attack", "run the product attack");
  add_common(attack);
  auto* attack_file = attack->add_option("transcript", transcript_path, "transcript file");
  auto* attack_single =
      attack->add_option("--single-key", single_key, "attack a synthetic single-key IKA of n members");
  attack_file->excludes(attack_single);

  app.add_subcommand("groups", "print the group presets");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (!config_path.empty()) {
      const Json j = read_json_file(config_path, "config file");
      if (j.contains("group")) {
        if (j.at("group").is_string()) {
          config.group_preset = j.at("group").get<std::string>();
        } else {
          config.group_file = config_path;
        }
      }
      if (j.contains("seed")) config.seed = j.at("seed").get<std::uint64_t>();
      if (j.contains("verbosity")) config.verbosity = j.at("verbosity").get<int>();
    }
  } catch (const Error& e) {
    return report_error(err, e);
  } catch (const nlohmann::json::exception& e) {
    err << "error[parse]: config file: " << e.what() << '\n';
    return kExitUsage;
  }

  CLI::App* sub = app.get_subcommands().front();
  if (sub->get_name() != "groups") {
    const bool preset_given = sub->get_option("--group")->count() > 0;
    const bool file_given = sub->get_option("--group-file")->count() > 0;
    if (preset_given && file_given) {
      err << "error[parse]: give either --group or --group-file, not both\n";
      return kExitUsage;
    }
    if (preset_given) {
      config.group_preset = group_flag;
      config.group_file.reset();
    }
    if (file_given) {
      config.group_file = group_file_flag;
      config.group_preset.reset();
    }
    if (sub->get_option("--seed")->count() > 0) config.seed = seed_flag;
  }

  if (sub == run) return cmd_run(config, out, err);
  if (sub == verify) return cmd_verify(transcript_path, config, out, err);
  if (sub == attack) {
    if (attack_single->count() > 0) return cmd_attack(std::nullopt, single_key, config, out, err);
    if (attack_file->count() == 0) {
      err << "error[parse]: attack needs a transcript or --single-key n\n";
      return kExitUsage;
    }
    return cmd_attack(transcript_path, std::nullopt, config, out, err);
  }
  return cmd_groups(out);
}

}  // namespace gke::cli
