#include "degmix/config.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace degmix {

namespace {

const std::set<std::string> kRateColumns = {"err_u_maxR", "err_u_l2X", "err_lambda_l2M",
                                            "err_dtu",    "rel_E_pct", "rel_H_pct"};

[[noreturn]] void parse_error(const std::string& msg) { throw Error(ErrorCode::ConfigParse, msg); }

std::string trim(const std::string& s) {
  auto b = std::find_if_not(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c); });
  auto e = std::find_if_not(s.rbegin(), s.rend(), [](unsigned char c) { return std::isspace(c); });
  return b < e.base() ? std::string(b, e.base()) : std::string();
}

double to_double(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const double d = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return d;
  } catch (const std::exception&) {
    parse_error("value of '" + key + "' is not a number: " + v);
  }
}

int to_int(const std::string& key, const std::string& v) {
  const double d = to_double(key, v);
  if (d != static_cast<double>(static_cast<int>(d))) parse_error("'" + key + "' must be an integer");
  return static_cast<int>(d);
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "on" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "off" || v == "no") return false;
  parse_error("'" + key + "' must be a boolean");
}

void apply(ExperimentConfig& c, const std::string& key, const std::string& v) {
  if (key == "case") {
    c.case_name = v;
  } else if (key == "n") {
    c.n = to_int(key, v);
  } else if (key == "levels" || key == "L") {
    c.levels = to_int(key, v);
  } else if (key == "T") {
    c.T = to_double(key, v);
  } else if (key == "N") {
    c.N = to_int(key, v);
  } else if (key == "pattern") {
    if (v == "right") c.pattern = Diagonal::Right;
    else if (v == "crossed") c.pattern = Diagonal::Crossed;
    else parse_error("pattern must be 'right' or 'crossed'");
  } else if (key == "nu") {
    c.coefficients.nu = to_double(key, v);
  } else if (key == "sigma") {
    c.coefficients.sigma = to_double(key, v);
  } else if (key == "epsilon") {
    c.coefficients.epsilon = to_double(key, v);
  } else if (key == "mu_mag") {
    c.coefficients.mu_mag = to_double(key, v);
  } else if (key == "probe_infsup") {
    c.probe_infsup = to_bool(key, v);
  } else if (key == "probe_garding") {
    c.probe_garding = to_bool(key, v);
  } else if (key == "xi") {
    c.xi = to_double(key, v);
  } else if (key == "out") {
    c.out_dir = v;
  } else if (key.rfind("min_rate.", 0) == 0) {
    const std::string col = key.substr(9);
    if (!kRateColumns.count(col)) parse_error("no rate column named '" + col + "'");
    c.thresholds[col] = to_double(key, v);
  } else {
    parse_error("unknown key '" + key + "'");
  }
}

std::string json_scalar(const nlohmann::json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
  if (v.is_number()) {
    std::ostringstream os;
    os.precision(17);
    os << v.get<double>();
    return os.str();
  }
  parse_error("unsupported JSON value " + v.dump());
}

}  // namespace

ExperimentConfig parse_config(const std::string& text) {
  ExperimentConfig c;
  bool thresholds_given = false;
  const std::string body = trim(text);
  if (!body.empty() && body.front() == '{') {
    nlohmann::json doc;
    try {
      doc = nlohmann::json::parse(body);
    } catch (const nlohmann::json::exception& e) {
      parse_error(std::string("invalid JSON: ") + e.what());
    }
    for (const auto& [key, value] : doc.items()) {
      if (key == "min_rate") {
        if (!value.is_object()) parse_error("'min_rate' must be an object");
        for (const auto& [col, rate] : value.items()) apply(c, "min_rate." + col, json_scalar(rate));
        thresholds_given = true;
      } else {
        if (key.rfind("min_rate.", 0) == 0) thresholds_given = true;
        apply(c, key, json_scalar(value));
      }
    }
  } else {
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      line = trim(line.substr(0, line.find('#')));
      if (line.empty()) continue;
      const auto eq = line.find('=');
      if (eq == std::string::npos) {
        parse_error("line " + std::to_string(lineno) + ": expected key = value");
      }
      const std::string key = trim(line.substr(0, eq));
      if (key.rfind("min_rate.", 0) == 0) thresholds_given = true;
      apply(c, key, trim(line.substr(eq + 1)));
    }
  }
  if (!thresholds_given) c.thresholds = default_thresholds(c.case_name);
  validate(c);
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::ConfigParse, "cannot read config file " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

void validate(const ExperimentConfig& c) {
  if (c.case_name != "stokes" && c.case_name != "eddy2d") {
    parse_error("case must be 'stokes' or 'eddy2d'");
  }
  if (c.levels < 1) parse_error("levels must be >= 1");
  if (c.n < 1) parse_error("n must be >= 1");
  if (c.N < 1) parse_error("N must be >= 1");
  if (!(c.T > 0.0)) parse_error("T must be positive");
  if (c.levels > 8) parse_error("levels must be <= 8");
  const auto& k = c.coefficients;
  if (!(k.nu > 0.0) || !(k.sigma > 0.0) || !(k.epsilon > 0.0) || !(k.mu_mag > 0.0)) {
    parse_error("coefficients must be positive");
  }
  if (!(c.xi >= 0.0)) parse_error("xi must be non-negative");
  if (c.case_name == "eddy2d" && c.n % 3 != 0) {
    parse_error("eddy2d needs n divisible by 3 so the conductor lies on the grid");
  }
  for (const auto& [col, rate] : c.thresholds) {
    if (!(rate > 0.0 && rate <= 2.0)) parse_error("rate threshold for " + col + " must lie in (0, 2]");
  }
}

std::map<std::string, double> default_thresholds(const std::string& case_name) {
  if (case_name == "eddy2d") {
    return {{"err_u_l2X", 0.9}, {"err_dtu", 0.9}, {"rel_E_pct", 0.8}, {"rel_H_pct", 0.8}};
  }
  return {{"err_u_maxR", 0.9}, {"err_u_l2X", 0.9}, {"err_lambda_l2M", 0.9}};
}

}  // namespace degmix
