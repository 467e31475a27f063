#include "randtest/io.hpp"

#include <algorithm>
#include <cmath>
#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "randtest/errors.hpp"

namespace randtest {

namespace {

std::string strip(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_fields(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, sep)) out.push_back(field);
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

double parse_double(const std::string& text, const char* what) {
  const std::string t = strip(text);
  std::size_t used = 0;
  double value = 0;
  try {
    value = std::stod(t, &used);
  } catch (const std::exception&) {
    throw ParseError(std::string(what) + ": not a number: '" + t + "'");
  }
  if (used != t.size()) throw ParseError(std::string(what) + ": trailing junk in '" + t + "'");
  return value;
}

}  // namespace

DataFile parse_data_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw ParseError("data CSV: empty input");
  if (strip(line) != "id,w,y") throw ParseError("data CSV: header must be exactly 'id,w,y'");

  std::vector<std::string> ids;
  std::uint64_t bits = 0;
  std::vector<double> y;
  std::set<std::string> seen;
  int row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (strip(line).empty()) continue;
    const auto fields = split_fields(line, ',');
    if (fields.size() != 3) {
      throw ParseError("data CSV row " + std::to_string(row) + ": expected 3 fields");
    }
    const std::string id = strip(fields[0]);
    if (id.empty()) throw ParseError("data CSV row " + std::to_string(row) + ": empty id");
    if (!seen.insert(id).second) {
      throw ParseError("data CSV row " + std::to_string(row) + ": duplicate id '" + id + "'");
    }
    const std::string w_text = strip(fields[1]);
    if (w_text != "0" && w_text != "1") {
      throw ParseError("data CSV row " + std::to_string(row) + ": w must be 0 or 1");
    }
    const double value = parse_double(fields[2], "data CSV y");
    if (!std::isfinite(value)) {
      throw ParseError("data CSV row " + std::to_string(row) + ": y must be finite");
    }
    if (ids.size() >= AssignmentPattern::kMaxUnits) {
      throw ParseError("data CSV: at most 63 units supported");
    }
    if (w_text == "1") bits |= std::uint64_t{1} << ids.size();
    ids.push_back(id);
    y.push_back(value);
  }
  if (ids.empty()) throw ParseError("data CSV: no data rows");
  DataFile out;
  out.w = AssignmentPattern(bits, static_cast<int>(ids.size()));
  out.ids = std::move(ids);
  out.y = std::move(y);
  return out;
}

DataFile load_data_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open data file '" + path + "'");
  return parse_data_csv(in);
}

std::map<std::string, TomlValue> parse_toml(std::istream& in) {
  std::map<std::string, TomlValue> out;
  std::string line;
  int row = 0;
  while (std::getline(in, line)) {
    ++row;
    // strip comments (quotes in our manifests never contain '#')
    if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    const std::string text = strip(line);
    if (text.empty()) continue;
    if (text.front() == '[') {
      throw ParseError("TOML line " + std::to_string(row) + ": tables are not supported");
    }
    const auto eq = text.find('=');
    if (eq == std::string::npos) {
      throw ParseError("TOML line " + std::to_string(row) + ": expected key = value");
    }
    const std::string key = strip(text.substr(0, eq));
    const std::string value = strip(text.substr(eq + 1));
    if (key.empty() || value.empty()) {
      throw ParseError("TOML line " + std::to_string(row) + ": empty key or value");
    }
    if (out.contains(key)) {
      throw ParseError("TOML line " + std::to_string(row) + ": duplicate key '" + key + "'");
    }
    if (value.front() == '"') {
      if (value.size() < 2 || value.back() != '"') {
        throw ParseError("TOML line " + std::to_string(row) + ": unterminated string");
      }
      out.emplace(key, value.substr(1, value.size() - 2));
    } else if (value.front() == '[') {
      if (value.back() != ']') {
        throw ParseError("TOML line " + std::to_string(row) + ": arrays must be one line");
      }
      const std::string body = strip(value.substr(1, value.size() - 2));
      if (body.empty()) {
        out.emplace(key, std::vector<double>{});
        continue;
      }
      if (body.front() == '"') {
        std::vector<std::string> items;
        for (const auto& piece : split_fields(body, ',')) {
          const std::string p = strip(piece);
          if (p.size() < 2 || p.front() != '"' || p.back() != '"') {
            throw ParseError("TOML line " + std::to_string(row) + ": bad string array");
          }
          items.push_back(p.substr(1, p.size() - 2));
        }
        out.emplace(key, std::move(items));
      } else {
        std::vector<double> items;
        for (const auto& piece : split_fields(body, ',')) {
          items.push_back(parse_double(piece, "TOML array"));
        }
        out.emplace(key, std::move(items));
      }
    } else if (value == "true" || value == "false") {
      out.emplace(key, value == "true");
    } else if (value.find_first_of(".eE") != std::string::npos) {
      out.emplace(key, parse_double(value, "TOML value"));
    } else {
      std::int64_t parsed = 0;
      const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), parsed);
      if (ec != std::errc{} || ptr != value.data() + value.size()) {
        throw ParseError("TOML line " + std::to_string(row) + ": bad value '" + value + "'");
      }
      out.emplace(key, parsed);
    }
  }
  return out;
}

namespace {

SimConfig config_from_toml(std::istream& in) {
  SimConfig cfg;
  auto values = parse_toml(in);
  auto take_int = [&](const char* key, int& dst) {
    if (const auto it = values.find(key); it != values.end()) {
      dst = static_cast<int>(std::get<std::int64_t>(it->second));
      values.erase(it);
    }
  };
  auto take_double = [&](const char* key, double& dst) {
    if (const auto it = values.find(key); it != values.end()) {
      if (const auto* d = std::get_if<double>(&it->second)) {
        dst = *d;
      } else {
        dst = static_cast<double>(std::get<std::int64_t>(it->second));
      }
      values.erase(it);
    }
  };
  auto take_string = [&](const char* key, std::string& dst) {
    if (const auto it = values.find(key); it != values.end()) {
      dst = std::get<std::string>(it->second);
      values.erase(it);
    }
  };
  try {
    take_int("n", cfg.n);
    take_string("scheme_a", cfg.scheme_a);
    take_string("scheme_b", cfg.scheme_b);
    take_double("effect", cfg.effect);
    take_string("null_model", cfg.null_model);
    take_int("replications", cfg.replications);
    take_string("stat", cfg.stat);
    if (const auto it = values.find("alpha_grid"); it != values.end()) {
      cfg.alpha_grid = std::get<std::vector<double>>(it->second);
      values.erase(it);
    }
    if (const auto it = values.find("seed"); it != values.end()) {
      cfg.seed = static_cast<std::uint64_t>(std::get<std::int64_t>(it->second));
      values.erase(it);
    }
  } catch (const std::bad_variant_access&) {
    throw ParseError("config: a key has the wrong type");
  }
  if (!values.empty()) {
    throw ParseError("config: unknown key '" + values.begin()->first + "'");
  }
  return cfg;
}

SimConfig config_from_json(std::istream& in) {
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("config JSON: ") + e.what());
  }
  SimConfig cfg;
  try {
    for (const auto& [key, value] : j.items()) {
      if (key == "n") {
        cfg.n = value.get<int>();
      } else if (key == "scheme_a") {
        cfg.scheme_a = value.get<std::string>();
      } else if (key == "scheme_b") {
        cfg.scheme_b = value.get<std::string>();
      } else if (key == "effect") {
        cfg.effect = value.get<double>();
      } else if (key == "null_model") {
        cfg.null_model = value.get<std::string>();
      } else if (key == "alpha_grid") {
        cfg.alpha_grid = value.get<std::vector<double>>();
      } else if (key == "replications") {
        cfg.replications = value.get<int>();
      } else if (key == "seed") {
        cfg.seed = value.get<std::uint64_t>();
      } else if (key == "stat") {
        cfg.stat = value.get<std::string>();
      } else {
        throw ParseError("config: unknown key '" + key + "'");
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("config JSON: ") + e.what());
  }
  return cfg;
}

}  // namespace

SimConfig load_sim_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open config file '" + path + "'");
  if (path.size() >= 5 && path.substr(path.size() - 5) == ".json") {
    return config_from_json(in);
  }
  if (path.size() >= 5 && path.substr(path.size() - 5) == ".toml") {
    return config_from_toml(in);
  }
  throw ParseError("config file must end in .toml or .json: '" + path + "'");
}

}  // namespace randtest
