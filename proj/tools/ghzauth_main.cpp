// ghzauth command-line front end.
//
//   ghzauth run --config PATH [--seed U64] [--out PATH] [--reveal]
//   ghzauth sweep --config PATH --trials K [--seed U64] [--out PATH]
//   ghzauth verify-tables [--fixtures PATH]
//
// Seed precedence: --seed beats the config file's "seed" field, which beats
// the GHZAUTH_SEED environment variable. Exit codes: 0 success / all users
// accepted, 1 usage or config error, 2 failed eavesdropping check,
// 3 rejected user or table mismatch.

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "ghzauth/ghzauth.hpp"

namespace {

using nlohmann::json;

struct SeedOptions {
  std::optional<std::uint64_t> flag;

  void apply(ghzauth::SessionConfig& cfg, const json& config_json) const {
    if (flag) {
      cfg.seed = *flag;
    } else if (!config_json.contains("seed")) {
      if (const char* env = std::getenv("GHZAUTH_SEED")) {
        cfg.seed = std::stoull(env);
      }
    }
  }
};

json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file: " + path);
  return json::parse(in);
}

void write_output(const json& doc, const std::string& out_path) {
  const std::string text = doc.dump(2) + "\n";
  if (out_path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(out_path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open output file: " + out_path);
  out << text;
}

int cmd_run(const std::string& config_path, const SeedOptions& seed, const std::string& out_path,
            bool reveal) {
  const json config_json = load_json(config_path);
  ghzauth::SessionConfig cfg = ghzauth::config_from_json(config_json);
  seed.apply(cfg, config_json);

  const ghzauth::SessionReport report = ghzauth::run_session(cfg);
  write_output(ghzauth::report_to_json(report, reveal), out_path);
  return ghzauth::exit_code_for(report);
}

int cmd_sweep(const std::string& config_path, const SeedOptions& seed, const std::string& out_path,
              int trials) {
  const json config_json = load_json(config_path);
  ghzauth::SessionConfig cfg = ghzauth::config_from_json(config_json);
  seed.apply(cfg, config_json);

  int accepted_sessions = 0;
  int s2_passes = 0;
  double mismatch_rate_sum = 0.0;
  for (int t = 0; t < trials; ++t) {
    ghzauth::SessionConfig trial_cfg = cfg;
    trial_cfg.seed = cfg.seed + static_cast<std::uint64_t>(t);
    const ghzauth::SessionReport report = ghzauth::run_session(trial_cfg);
    mismatch_rate_sum += report.s2.rate;
    if (report.s2.pass) {
      ++s2_passes;
      if (ghzauth::exit_code_for(report) == 0) ++accepted_sessions;
    }
  }

  const double detection = ghzauth::detection_probability(cfg.attack, cfg.r, 0.5);
  const int k = cfg.check_samples();
  const json aggregate = {
      {"schema_version", 1},
      {"config", ghzauth::config_to_json(cfg)},
      {"trials", trials},
      {"base_seed", cfg.seed},
      {"acceptance_rate", static_cast<double>(accepted_sessions) / trials},
      {"s2_pass_rate", static_cast<double>(s2_passes) / trials},
      {"mean_s2_mismatch_rate", mismatch_rate_sum / trials},
      {"analytic",
       {{"per_sample_detection_probability", detection},
        {"k", k},
        {"predicted_s2_pass_rate", std::pow(1.0 - detection, k)}}}};
  write_output(aggregate, out_path);
  return 0;
}

// --- verify-tables -----------------------------------------------------------

struct TableFixtures {
  // Psi index -> operator names applied to (verifier, user 1, user 2).
  std::map<std::string, std::vector<std::string>> transform_table;
  std::vector<std::string> swap_support_psi1_psi1;
  std::vector<std::string> swap_support_psi7_psi1;
};

TableFixtures embedded_fixtures() {
  TableFixtures f;
  f.transform_table = {
      {"Psi1", {"I", "I", "I"}},
      {"Psi2", {"i_sigma_y", "i_sigma_y", "i_sigma_y"}},
      {"Psi3", {"I", "i_sigma_y", "i_sigma_y"}},
      {"Psi4", {"i_sigma_y", "I", "I"}},
      {"Psi5", {"i_sigma_y", "I", "i_sigma_y"}},
      {"Psi6", {"I", "i_sigma_y", "I"}},
      {"Psi7", {"i_sigma_y", "i_sigma_y", "I"}},
      {"Psi8", {"I", "I", "i_sigma_y"}},
  };
  f.swap_support_psi1_psi1 = {"phi+ phi+ phi+", "phi+ phi- phi-", "phi- phi+ phi-",
                              "phi- phi- phi+", "psi+ psi+ psi+", "psi+ psi- psi-",
                              "psi- psi+ psi-", "psi- psi- psi+"};
  f.swap_support_psi7_psi1 = {"psi+ psi+ phi+", "psi+ psi- phi-", "psi- psi+ phi-",
                              "psi- psi- phi+", "phi+ phi+ psi+", "phi+ phi- psi-",
                              "phi- phi+ psi-", "phi- phi- psi+"};
  return f;
}

TableFixtures load_fixtures(const std::string& path) {
  const json j = load_json(path);
  TableFixtures f;
  for (const auto& [name, ops] : j.at("transform_table").items()) {
    f.transform_table[name] = ops.get<std::vector<std::string>>();
  }
  f.swap_support_psi1_psi1 = j.at("swap_support_psi1_psi1").get<std::vector<std::string>>();
  f.swap_support_psi7_psi1 = j.at("swap_support_psi7_psi1").get<std::vector<std::string>>();
  return f;
}

std::string tuple_names(const std::vector<std::uint8_t>& tuple) {
  std::string out;
  for (std::size_t i = 0; i < tuple.size(); ++i) {
    if (i) out += ' ';
    out += ghzauth::BellOutcome::from_index(tuple[i]).name();
  }
  return out;
}

int cmd_verify_tables(const std::string& fixtures_path) {
  using namespace ghzauth;
  const TableFixtures fixtures =
      fixtures_path.empty() ? embedded_fixtures() : load_fixtures(fixtures_path);
  int mismatches = 0;

  // Regenerate the eight-row transformation table from the state-vector
  // layer: every operator triple maps to a distinct basis state.
  std::map<std::string, std::vector<std::string>> regenerated;
  for (std::uint32_t bits = 0; bits < 8; ++bits) {
    std::vector<PauliChoice> ops;
    std::vector<std::string> op_names;
    for (int q = 0; q < 3; ++q) {
      const PauliChoice op = pauli_from_bit(static_cast<int>((bits >> (2 - q)) & 1u));
      ops.push_back(op);
      op_names.push_back(pauli_name(op));
    }
    regenerated[psi_name(transform_label(ops, 3))] = op_names;
  }

  std::cout << "transform table (basis state <- operators on verifier, user 1, user 2):\n";
  for (int k = 1; k <= 8; ++k) {
    const std::string state = "Psi" + std::to_string(k);
    const auto it = regenerated.find(state);
    std::string row = state + " <- ";
    if (it == regenerated.end()) {
      row += "(missing)";
    } else {
      for (std::size_t i = 0; i < it->second.size(); ++i) {
        if (i) row += " (x) ";
        row += it->second[i];
      }
    }
    std::cout << "  " << row << "\n";
    const auto expected = fixtures.transform_table.find(state);
    if (it == regenerated.end() || expected == fixtures.transform_table.end() ||
        it->second != expected->second) {
      std::cout << "  mismatch: " << state << " expected different operators\n";
      ++mismatches;
    }
  }

  const auto check_support = [&mismatches](const std::string& heading,
                                           const SwapDistribution& dist,
                                           const std::vector<std::string>& expected) {
    std::cout << heading << "\n";
    std::vector<std::string> produced;
    for (const auto& [tuple, prob] : dist.probs) {
      produced.push_back(tuple_names(tuple));
      std::cout << "  " << produced.back() << "  p=" << prob << "\n";
      if (std::abs(prob - 0.125) > 1e-9) {
        std::cout << "  mismatch: probability of " << produced.back() << " is not 1/8\n";
        ++mismatches;
      }
    }
    std::vector<std::string> expected_sorted = expected;
    std::sort(expected_sorted.begin(), expected_sorted.end());
    std::sort(produced.begin(), produced.end());
    if (produced != expected_sorted) {
      std::cout << "  mismatch: support differs from the expected tuple set\n";
      for (const std::string& t : expected_sorted) {
        if (!std::binary_search(produced.begin(), produced.end(), t)) {
          std::cout << "    missing: " << t << "\n";
          ++mismatches;
        }
      }
      for (const std::string& t : produced) {
        if (!std::binary_search(expected_sorted.begin(), expected_sorted.end(), t)) {
          std::cout << "    unexpected: " << t << "\n";
          ++mismatches;
        }
      }
      if (produced.size() == expected_sorted.size()) ++mismatches;
    }
  };

  check_support("swap support Psi1 x Psi1 (pairs: verifier, user 1, user 2):",
                swap_distribution(label_from_psi_index(1), label_from_psi_index(1)),
                fixtures.swap_support_psi1_psi1);
  check_support("swap support Psi7 x Psi1:",
                swap_distribution(label_from_psi_index(7), label_from_psi_index(1)),
                fixtures.swap_support_psi7_psi1);

  if (mismatches > 0) {
    std::cout << "verify-tables: " << mismatches << " mismatch(es)\n";
    return 3;
  }
  std::cout << "verify-tables: all rows match\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact simulator of a multiparty quantum identity authentication protocol"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_path;
  std::string fixtures_path;
  SeedOptions seed;
  std::uint64_t seed_value = 0;
  bool reveal = false;
  int trials = 1;

  CLI::App* run = app.add_subcommand("run", "run one session and write its report");
  run->add_option("--config", config_path, "session config JSON")->required();
  CLI::Option* run_seed = run->add_option("--seed", seed_value, "seed override");
  run->add_option("--out", out_path, "report path (stdout when omitted)");
  run->add_flag("--reveal", reveal, "include the verifier's secret operations in the report");

  CLI::App* sweep = app.add_subcommand("sweep", "run many sessions with derived seeds");
  sweep->add_option("--config", config_path, "session config JSON")->required();
  sweep->add_option("--trials", trials, "number of sessions")->required();
  CLI::Option* sweep_seed = sweep->add_option("--seed", seed_value, "base seed override");
  sweep->add_option("--out", out_path, "aggregate path (stdout when omitted)");

  CLI::App* verify = app.add_subcommand("verify-tables",
                                        "regenerate the transformation table and swap supports "
                                        "and compare them against golden fixtures");
  verify->add_option("--fixtures", fixtures_path, "fixture JSON overriding the embedded tables");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    if (run->parsed()) {
      if (run_seed->count() > 0) seed.flag = seed_value;
      return cmd_run(config_path, seed, out_path, reveal);
    }
    if (sweep->parsed()) {
      if (trials < 1) {
        std::cerr << "sweep requires at least one trial\n";
        return 1;
      }
      if (sweep_seed->count() > 0) seed.flag = seed_value;
      return cmd_sweep(config_path, seed, out_path, trials);
    }
    return cmd_verify_tables(fixtures_path);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
