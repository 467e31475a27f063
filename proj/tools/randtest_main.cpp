// Command-line front end: randomization tests on CSV trial data, group-axiom
// checking, scheme resolution summaries, the lady-tasting-tea analysis and
// the size/power simulation. Results go to stdout as JSON (CSV for `power`),
// diagnostics to stderr.
//
// Exit codes: 0 ok, 2 parse/usage error, 3 design violation (observed
// assignment outside the declared scheme), 4 group-structure violation,
// 5 infeasible enumeration.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include <nlohmann/json.hpp>

#include "randtest/engine.hpp"
#include "randtest/errors.hpp"
#include "randtest/io.hpp"
#include "randtest/ltt.hpp"
#include "randtest/power_sim.hpp"
#include "randtest/scheme.hpp"
#include "randtest/transform.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitParse = 2;
constexpr int kExitDesignViolation = 3;
constexpr int kExitGroupViolation = 4;
constexpr int kExitInfeasible = 5;

std::vector<int> parse_int_list(const std::string& text) {
  std::vector<int> out;
  std::string piece;
  std::istringstream ss(text);
  while (std::getline(ss, piece, ',')) out.push_back(std::stoi(piece));
  return out;
}

randtest::TransformationGroup group_from_spec(const std::string& spec) {
  const auto colon = spec.find(':');
  if (colon == std::string::npos) {
    throw randtest::InvalidArgument("group spec must look like 'perms:4', 'sign-flips:3', "
                                    "'balanced-perms:2,2' or 'cyclic:2,3,1'");
  }
  const std::string name = spec.substr(0, colon);
  const std::string args = spec.substr(colon + 1);
  if (name == "perms") return randtest::symmetric_group(std::stoi(args));
  if (name == "sign-flips") return randtest::sign_flip_group(std::stoi(args));
  if (name == "balanced-perms") {
    const auto sizes = parse_int_list(args);
    if (sizes.size() != 2) {
      throw randtest::InvalidArgument("balanced-perms takes two sizes, e.g. balanced-perms:2,2");
    }
    return randtest::balanced_permutations(sizes[0], sizes[1]);
  }
  if (name == "cyclic") {
    const auto indices = parse_int_list(args);
    std::vector<std::uint8_t> image;
    for (const int i : indices) {
      if (i < 1) throw randtest::InvalidArgument("cyclic generator uses 1-based indices");
      image.push_back(static_cast<std::uint8_t>(i - 1));
    }
    return randtest::cyclic_group(randtest::Transformation::permutation(std::move(image)));
  }
  throw randtest::InvalidArgument("unknown group family '" + name + "'");
}

randtest::TransformationGroup group_from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw randtest::ParseError("cannot open group file '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw randtest::ParseError(std::string("group file JSON: ") + e.what());
  }
  randtest::TransformationGroup group;
  try {
    group.label = j.value("label", path);
    const std::string kind = j.at("kind").get<std::string>();
    for (const auto& elem : j.at("elements")) {
      nlohmann::json ej;
      ej["kind"] = kind;
      ej[kind == "permutation" ? "image" : "signs"] = elem;
      group.elements.push_back(randtest::Transformation::from_json(ej));
    }
  } catch (const nlohmann::json::exception& e) {
    throw randtest::ParseError(std::string("group file: ") + e.what());
  }
  if (group.elements.empty()) throw randtest::ParseError("group file: no elements");
  group.n = group.elements.front().n();
  return group;
}

void print_json(const nlohmann::json& j) { std::cout << j.dump(2) << "\n"; }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"exact randomization tests and group invariance tests"};
  app.require_subcommand(1);

  auto* cmd_test = app.add_subcommand("test", "randomization test on CSV trial data (id,w,y)");
  std::string data_path, scheme_name = "forced-balance", stat_name = "centered-diff";
  std::string sided = "upper";
  double alpha = 0.05;
  cmd_test->add_option("--data", data_path, "CSV file with header id,w,y")->required();
  cmd_test->add_option("--scheme", scheme_name,
                       "forced-balance | bernoulli | bernoulli-nc | ltt | "
                       "covariate-balanced[:sequential]");
  cmd_test->add_option("--stat", stat_name,
                       "fisher-match | diff-sums | centered-diff | abs-mean-diff");
  cmd_test->add_option("--sided", sided, "upper | two-sided");
  cmd_test->add_option("--alpha", alpha, "significance level in (0,1)")->required();

  auto* cmd_group = app.add_subcommand("group-check", "verify the group axioms for an element set");
  std::string group_spec, group_file;
  cmd_group->add_option("--group", group_spec,
                        "perms:N | sign-flips:N | balanced-perms:C,C | cyclic:i1,i2,...");
  cmd_group->add_option("--file", group_file, "JSON element list {kind, elements}");

  auto* cmd_info = app.add_subcommand("scheme-info", "resolution summary of a built-in scheme");
  std::string info_name = "forced-balance";
  int info_n = 8;
  cmd_info->add_option("--name", info_name, "scheme name")->required();
  cmd_info->add_option("--n", info_n, "number of units")->required();

  auto* cmd_ltt = app.add_subcommand("ltt", "lady tasting tea analysis");
  int ltt_m = 0;
  std::string truth_text, guess_text;
  double ltt_alpha = 0.05;
  cmd_ltt->add_option("--m", ltt_m, "cups per kind (optional, checked against --truth)");
  cmd_ltt->add_option("--truth", truth_text, "true order, 0/1 string")->required();
  cmd_ltt->add_option("--guess", guess_text, "taster's guess, 0/1 string")->required();
  cmd_ltt->add_option("--alpha", ltt_alpha, "significance level in (0,1)")->required();

  auto* cmd_power = app.add_subcommand("power", "Monte Carlo size/power table");
  std::string config_path, csv_out, json_out;
  std::uint64_t seed = 0;
  int workers = 1;
  randtest::SimConfig overrides;
  bool has_n = false, has_effect = false, has_reps = false;
  std::string ov_scheme_a, ov_scheme_b, ov_stat;
  cmd_power->add_option("--config", config_path, "TOML or JSON manifest");
  cmd_power->add_option("--seed", seed, "simulation seed (required for reproducibility)")
      ->required();
  cmd_power->add_option("--workers", workers, "worker threads (default 1)");
  cmd_power->add_option("--n", overrides.n, "override: units")->each([&](const std::string&) {
    has_n = true;
  });
  cmd_power->add_option("--effect", overrides.effect, "override: additive effect")
      ->each([&](const std::string&) { has_effect = true; });
  cmd_power->add_option("--replications", overrides.replications, "override: replications")
      ->each([&](const std::string&) { has_reps = true; });
  cmd_power->add_option("--scheme-a", ov_scheme_a, "override: first scheme");
  cmd_power->add_option("--scheme-b", ov_scheme_b, "override: second scheme");
  cmd_power->add_option("--stat", ov_stat, "override: statistic");
  cmd_power->add_option("--csv-out", csv_out, "also write the CSV here");
  cmd_power->add_option("--json-out", json_out, "also write the table as JSON here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitParse;
  }

  try {
    if (app.got_subcommand(cmd_test)) {
      const auto data = randtest::load_data_csv(data_path);
      const auto scheme = randtest::make_scheme(scheme_name, data.w.n());
      const auto stat = randtest::StatisticSpec::parse(stat_name, sided);
      const auto report = randtest::randomization_test(scheme, data.w, data.y, stat, alpha);
      print_json(report.to_json());
      return kExitOk;
    }

    if (app.got_subcommand(cmd_group)) {
      if (group_spec.empty() == group_file.empty()) {
        throw randtest::InvalidArgument("group-check needs exactly one of --group or --file");
      }
      const auto group =
          group_spec.empty() ? group_from_file(group_file) : group_from_spec(group_spec);
      const auto report = randtest::check_group(group);
      print_json(report.to_json());
      return report.is_group() ? kExitOk : kExitGroupViolation;
    }

    if (app.got_subcommand(cmd_info)) {
      const auto scheme = randtest::make_scheme(info_name, info_n);
      print_json(randtest::resolution_report(scheme).to_json());
      return kExitOk;
    }

    if (app.got_subcommand(cmd_ltt)) {
      const auto truth = randtest::AssignmentPattern::parse(truth_text);
      const auto guess = randtest::AssignmentPattern::parse(guess_text);
      if (ltt_m > 0 && truth.n() != 2 * ltt_m) {
        throw randtest::InvalidArgument("--m disagrees with the length of --truth");
      }
      const auto outcome = randtest::ltt_analyze(truth, guess, ltt_alpha);
      const auto report = guess.ones() == outcome.m
                              ? randtest::ltt_run(truth, guess, ltt_alpha)
                              : randtest::ltt_run_free_guess(truth, guess, ltt_alpha);
      nlohmann::json j;
      j["outcome"] = outcome.to_json();
      j["report"] = report.to_json();
      print_json(j);
      return kExitOk;
    }

    if (app.got_subcommand(cmd_power)) {
      randtest::SimConfig cfg;
      if (!config_path.empty()) cfg = randtest::load_sim_config(config_path);
      if (has_n) cfg.n = overrides.n;
      if (has_effect) cfg.effect = overrides.effect;
      if (has_reps) cfg.replications = overrides.replications;
      if (!ov_scheme_a.empty()) cfg.scheme_a = ov_scheme_a;
      if (!ov_scheme_b.empty()) cfg.scheme_b = ov_scheme_b;
      if (!ov_stat.empty()) cfg.stat = ov_stat;
      cfg.seed = seed;
      const auto table = randtest::simulate(cfg, workers);
      const std::string csv = table.to_csv();
      std::cout << csv;
      if (!csv_out.empty()) {
        std::ofstream out(csv_out, std::ios::binary);
        if (!out) throw randtest::ParseError("cannot write '" + csv_out + "'");
        out << csv;
      }
      if (!json_out.empty()) {
        std::ofstream out(json_out, std::ios::binary);
        if (!out) throw randtest::ParseError("cannot write '" + json_out + "'");
        out << table.to_json().dump(2) << "\n";
      }
      return kExitOk;
    }
  } catch (const randtest::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitParse;
  } catch (const randtest::DesignViolation& e) {
    std::cerr << "design violation: " << e.what() << "\n";
    return kExitDesignViolation;
  } catch (const randtest::GroupStructureViolation& e) {
    std::cerr << "group violation: " << e.what() << "\n";
    return kExitGroupViolation;
  } catch (const randtest::EnumerationInfeasible& e) {
    std::cerr << "infeasible: " << e.what() << "\n";
    return kExitInfeasible;
  } catch (const randtest::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitParse;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitParse;
  }
  return kExitOk;
}
