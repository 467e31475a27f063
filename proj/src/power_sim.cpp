#include "randtest/power_sim.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <thread>

#include <nlohmann/json.hpp>

#include "randtest/engine.hpp"
#include "randtest/errors.hpp"
#include "randtest/rng.hpp"
#include "randtest/statistics.hpp"

namespace randtest {

namespace {

// #{w in W : T(w,y) >= T(w_obs,y)}; the p-value numerator.
std::int64_t tail_count(const RandomizationScheme& scheme, const AssignmentPattern& w_obs,
                        std::span<const double> y, const StatisticSpec& stat) {
  const double observed = evaluate(stat, w_obs, y);
  std::int64_t count = 0;
  for (const std::uint64_t m : scheme.masks()) {
    if (evaluate(stat, m, scheme.n(), y) >= observed) ++count;
  }
  return count;
}

struct Tally {
  std::vector<std::int64_t> size_hits;   // per alpha
  std::vector<std::int64_t> power_hits;  // per alpha
};

}  // namespace

void SimConfig::validate() const {
  if (replications < 1) throw InvalidArgument("SimConfig: replications must be >= 1");
  if (alpha_grid.empty()) throw InvalidArgument("SimConfig: alpha grid is empty");
  for (std::size_t i = 0; i < alpha_grid.size(); ++i) {
    if (!(alpha_grid[i] > 0.0 && alpha_grid[i] < 1.0)) {
      throw InvalidArgument("SimConfig: alphas must lie in (0, 1)");
    }
    if (i > 0 && !(alpha_grid[i] > alpha_grid[i - 1])) {
      throw InvalidArgument("SimConfig: alpha grid must be strictly increasing");
    }
  }
  if (null_model != "half-normal") {
    throw InvalidArgument("SimConfig: unknown null model '" + null_model + "'");
  }
}

SimTable simulate(const SimConfig& config, int workers) {
  config.validate();
  if (workers < 1) throw InvalidArgument("simulate: workers must be >= 1");
  const StatisticSpec stat = StatisticSpec::parse(config.stat);

  const RandomizationScheme schemes[2] = {make_scheme(config.scheme_a, config.n),
                                          make_scheme(config.scheme_b, config.n)};
  for (const auto& s : schemes) {
    if (!s.enumerable()) {
      throw EnumerationInfeasible("simulate: scheme '" + s.label() +
                                  "' is sampling-only at n = " + std::to_string(config.n) +
                                  "; exact enumeration is required (use monte_carlo_pvalue "
                                  "for one-off analyses at this size)");
    }
  }

  const auto n_alphas = config.alpha_grid.size();
  // p <= alpha  <=>  numerator <= floor(alpha * R); precompute per scheme.
  std::vector<std::int64_t> budget[2];
  for (int t = 0; t < 2; ++t) {
    budget[t].reserve(n_alphas);
    for (const double alpha : config.alpha_grid) {
      budget[t].push_back(allowed_count(alpha, schemes[t].size()));
    }
  }

  const int reps = config.replications;
  auto run_range = [&](int t, int begin, int end, Tally& tally) {
    const auto& scheme = schemes[t];
    const auto n = static_cast<std::size_t>(config.n);
    std::vector<double> y(n);
    for (int r = begin; r < end; ++r) {
      for (int arm = 0; arm < 2; ++arm) {
        auto rng = substream(config.seed, static_cast<std::uint64_t>(t),
                             static_cast<std::uint64_t>(arm), static_cast<std::uint64_t>(r));
        const auto w = scheme.sample(rng);
        const double shift = arm == 1 ? config.effect : 0.0;
        for (std::size_t i = 0; i < n; ++i) {
          y[i] = std::abs(rng.next_normal()) + shift * w.bit(static_cast<int>(i));
        }
        const std::int64_t numerator = tail_count(scheme, w, y, stat);
        auto& hits = arm == 0 ? tally.size_hits : tally.power_hits;
        for (std::size_t a = 0; a < n_alphas; ++a) {
          if (numerator <= budget[t][a]) ++hits[a];
        }
      }
    }
  };

  SimTable table;
  for (int t = 0; t < 2; ++t) {
    std::vector<Tally> tallies(static_cast<std::size_t>(workers),
                               Tally{std::vector<std::int64_t>(n_alphas, 0),
                                     std::vector<std::int64_t>(n_alphas, 0)});
    if (workers == 1) {
      run_range(t, 0, reps, tallies[0]);
    } else {
      std::vector<std::thread> pool;
      const int chunk = (reps + workers - 1) / workers;
      for (int w = 0; w < workers; ++w) {
        const int begin = w * chunk;
        const int end = std::min(reps, begin + chunk);
        if (begin >= end) break;
        pool.emplace_back(run_range, t, begin, end, std::ref(tallies[static_cast<std::size_t>(w)]));
      }
      for (auto& th : pool) th.join();
    }
    for (std::size_t a = 0; a < n_alphas; ++a) {
      std::int64_t size_hits = 0;
      std::int64_t power_hits = 0;
      for (const auto& tally : tallies) {
        size_hits += tally.size_hits[a];
        power_hits += tally.power_hits[a];
      }
      SimRow row;
      row.test = schemes[t].label();
      row.alpha = config.alpha_grid[a];
      row.size = static_cast<double>(size_hits) / reps;
      row.power = static_cast<double>(power_hits) / reps;
      row.se_size = std::sqrt(row.size * (1.0 - row.size) / reps);
      row.se_power = std::sqrt(row.power * (1.0 - row.power) / reps);
      table.rows.push_back(std::move(row));
    }
  }
  return table;
}

std::string SimTable::to_csv() const {
  std::string out = "test,alpha,size,power,se_size,se_power\n";
  char line[256];
  for (const auto& r : rows) {
    std::snprintf(line, sizeof(line), "%s,%.10g,%.6f,%.6f,%.6f,%.6f\n", r.test.c_str(), r.alpha,
                  r.size, r.power, r.se_size, r.se_power);
    out += line;
  }
  return out;
}

nlohmann::json SimTable::to_json() const {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& r : rows) {
    arr.push_back({{"test", r.test},
                   {"alpha", r.alpha},
                   {"size", r.size},
                   {"power", r.power},
                   {"se_size", r.se_size},
                   {"se_power", r.se_power}});
  }
  return arr;
}

SimTable SimTable::from_json(const nlohmann::json& j) {
  SimTable table;
  for (const auto& row : j) {
    table.rows.push_back(SimRow{row.at("test").get<std::string>(), row.at("alpha").get<double>(),
                                row.at("size").get<double>(), row.at("power").get<double>(),
                                row.at("se_size").get<double>(), row.at("se_power").get<double>()});
  }
  return table;
}

ResolutionReport resolution_report(const RandomizationScheme& scheme) {
  ResolutionReport rep;
  rep.label = scheme.label();
  rep.patterns = scheme.size();
  rep.min_p = Rational(1, scheme.size());
  rep.spacing = Rational(1, scheme.size());
  return rep;
}

nlohmann::json ResolutionReport::to_json() const {
  return {{"label", label},
          {"patterns", patterns},
          {"min_p", {{"num", min_p.num()}, {"den", min_p.den()}}},
          {"attainable_spacing", {{"num", spacing.num()}, {"den", spacing.den()}}}};
}

ResolutionReport ResolutionReport::from_json(const nlohmann::json& j) {
  ResolutionReport r;
  r.label = j.at("label").get<std::string>();
  r.patterns = j.at("patterns").get<std::int64_t>();
  r.min_p = Rational(j.at("min_p").at("num").get<std::int64_t>(),
                     j.at("min_p").at("den").get<std::int64_t>());
  r.spacing = Rational(j.at("attainable_spacing").at("num").get<std::int64_t>(),
                       j.at("attainable_spacing").at("den").get<std::int64_t>());
  return r;
}

}  // namespace randtest
