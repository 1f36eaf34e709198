#include "sonic/config.hpp"

#include <openssl/evp.h>

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

namespace sonic {

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::string sha256_hex(const std::string& bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("SHA-256 digest failed");
  }
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned int k = 0; k < len; ++k) {
    out.push_back(hex[digest[k] >> 4]);
    out.push_back(hex[digest[k] & 0xf]);
  }
  return out;
}

void SolverConfig::validate() const {
  if (!(wave.p1 < wave.p4 && wave.p4 < 0.0)) {
    throw ConfigError("p1 < p4 < 0 is required");
  }
  if (!(wave.kappa > 0.0)) throw ConfigError("kappa must be positive");
  if (!(s0 >= 0.0)) throw ConfigError("s0 must be nonnegative");
  if (n_plus < 8 || n_minus < 8) throw ConfigError("n_plus and n_minus must be >= 8");
  if (bc_substeps < 1) throw ConfigError("bc_substeps must be >= 1");
  if (!(relaxation > 0.0 && relaxation <= 1.0)) {
    throw ConfigError("relaxation must lie in (0, 1]");
  }
  if (!(node_tol > 0.0)) throw ConfigError("node_tol must be positive");
  if (node_max_iter < 1) throw ConfigError("node_max_iter must be >= 1");
  if (!(t0 > 0.0)) throw ConfigError("t0 must be positive");
  // On AB, r + p = -p1 s (1 - s) peaks at -p1 / 4; B sits at s^2 = p4 / p1.
  const double sb = std::sqrt(wave.p4 / wave.p1);
  const double gap_b = -wave.p1 * sb * (1.0 - sb);
  if (!(t0 * t0 < gap_b)) {
    throw ConfigError("t0^2 must lie below r + p at B (" + format_double(gap_b) + ")");
  }
  const double theta_b = std::asin(sb);
  if (!(theta_c > theta_b)) throw ConfigError("theta_c must exceed theta_B");
  if (!(t_min_factor > 0.0 && t_min_factor < 1e-2)) {
    throw ConfigError("t_min_factor must lie in (0, 0.01)");
  }
  if (nr < 16) throw ConfigError("nr must be >= 16");
  if (!(r_trim >= 0.0 && r_trim < 0.5)) throw ConfigError("r_trim must lie in [0, 0.5)");
  if (!(dt_ratio > 0.0 && dt_ratio < 1.0)) throw ConfigError("dt_ratio must lie in (0, 1)");
  if (!(courant > 0.0 && courant <= 0.9)) throw ConfigError("courant must lie in (0, 0.9]");
  if (deltas.empty()) throw ConfigError("deltas must not be empty");
  for (double d : deltas) {
    if (!(d > 1.0 && d < 2.0)) throw ConfigError("every delta must lie in (1, 2)");
  }
  if (!(eps_ratio > 1.0)) throw ConfigError("eps_ratio must exceed 1");
  if (!(eps_min_factor >= 1.0)) throw ConfigError("eps_min_factor must be >= 1");
}

SolverConfig SolverConfig::refined(int k) const {
  if (k < 1) throw ConfigError("refinement multiplier must be >= 1");
  SolverConfig c = *this;
  c.n_plus = n_plus * k;
  c.n_minus = n_minus * k;
  c.nr = (nr - 1) * k + 1;
  c.dt_ratio = std::pow(dt_ratio, 1.0 / k);
  return c;
}

namespace {

std::string join(const std::vector<double>& v) {
  std::string s;
  for (std::size_t k = 0; k < v.size(); ++k) {
    if (k) s += ", ";
    s += format_double(v[k]);
  }
  return s;
}

std::map<std::string, std::string> to_map(const SolverConfig& c) {
  return {
      {"p1", format_double(c.wave.p1)},
      {"p4", format_double(c.wave.p4)},
      {"kappa", format_double(c.wave.kappa)},
      {"s0", format_double(c.s0)},
      {"theta_c", format_double(c.theta_c)},
      {"n_plus", std::to_string(c.n_plus)},
      {"n_minus", std::to_string(c.n_minus)},
      {"bc_substeps", std::to_string(c.bc_substeps)},
      {"relaxation", format_double(c.relaxation)},
      {"node_tol", format_double(c.node_tol)},
      {"node_max_iter", std::to_string(c.node_max_iter)},
      {"t0", format_double(c.t0)},
      {"t_min_factor", format_double(c.t_min_factor)},
      {"nr", std::to_string(c.nr)},
      {"r_trim", format_double(c.r_trim)},
      {"dt_ratio", format_double(c.dt_ratio)},
      {"courant", format_double(c.courant)},
      {"deltas", join(c.deltas)},
      {"eps_ratio", format_double(c.eps_ratio)},
      {"eps_min_factor", format_double(c.eps_min_factor)},
      {"output_dir", c.output_dir},
  };
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double parse_number(const std::string& v, const std::string& key, int line) {
  double out = 0.0;
  const char* first = v.data();
  const char* last = v.data() + v.size();
  if (!v.empty() && *first == '+') ++first;
  const auto res = std::from_chars(first, last, out);
  if (res.ec != std::errc() || res.ptr != last || !std::isfinite(out)) {
    throw ConfigError("line " + std::to_string(line) + ": key '" + key +
                      "': malformed number '" + v + "'");
  }
  return out;
}

int parse_int(const std::string& v, const std::string& key, int line) {
  const double d = parse_number(v, key, line);
  if (d != std::floor(d) || std::abs(d) > 1e9) {
    throw ConfigError("line " + std::to_string(line) + ": key '" + key +
                      "': expected an integer, got '" + v + "'");
  }
  return int(d);
}

}  // namespace

std::string SolverConfig::canonical() const {
  std::string out;
  for (const auto& [k, v] : to_map(*this)) {
    out += k + " = " + v + "\n";
  }
  return out;
}

SolverConfig parse_config(const std::string& text) {
  SolverConfig c;
  bool s0_given = false;
  using Setter = std::function<void(const std::string&, int)>;
  const std::string* cur_key = nullptr;
  auto num = [&](double& dst) -> Setter {
    return [&dst, &cur_key](const std::string& v, int line) { dst = parse_number(v, *cur_key, line); };
  };
  auto integer = [&](int& dst) -> Setter {
    return [&dst, &cur_key](const std::string& v, int line) { dst = parse_int(v, *cur_key, line); };
  };
  std::map<std::string, Setter> setters{
      {"p1", num(c.wave.p1)},
      {"p4", num(c.wave.p4)},
      {"kappa", num(c.wave.kappa)},
      {"s0", [&](const std::string& v, int line) {
         c.s0 = parse_number(v, "s0", line);
         s0_given = true;
       }},
      {"theta_c", num(c.theta_c)},
      {"n_plus", integer(c.n_plus)},
      {"n_minus", integer(c.n_minus)},
      {"bc_substeps", integer(c.bc_substeps)},
      {"relaxation", num(c.relaxation)},
      {"node_tol", num(c.node_tol)},
      {"node_max_iter", integer(c.node_max_iter)},
      {"t0", num(c.t0)},
      {"t_min_factor", num(c.t_min_factor)},
      {"nr", integer(c.nr)},
      {"r_trim", num(c.r_trim)},
      {"dt_ratio", num(c.dt_ratio)},
      {"courant", num(c.courant)},
      {"deltas", [&](const std::string& v, int line) {
         c.deltas.clear();
         std::stringstream ss(v);
         std::string item;
         while (std::getline(ss, item, ',')) {
           c.deltas.push_back(parse_number(trim(item), "deltas", line));
         }
       }},
      {"eps_ratio", num(c.eps_ratio)},
      {"eps_min_factor", num(c.eps_min_factor)},
      {"output_dir", [&](const std::string& v, int) { c.output_dir = v; }},
  };

  std::set<std::string> seen;
  std::istringstream in(text);
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const auto hash = raw.find('#');
    const std::string body = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("line " + std::to_string(line) + ": expected 'key = value'");
    }
    const std::string key = trim(body.substr(0, eq));
    const std::string value = trim(body.substr(eq + 1));
    const auto it = setters.find(key);
    if (it == setters.end()) {
      throw ConfigError("line " + std::to_string(line) + ": unknown key '" + key + "'");
    }
    if (!seen.insert(key).second) {
      throw ConfigError("line " + std::to_string(line) + ": duplicate key '" + key + "'");
    }
    if (value.empty()) {
      throw ConfigError("line " + std::to_string(line) + ": key '" + key + "' has no value");
    }
    cur_key = &it->first;
    it->second(value, line);
  }
  if (!s0_given) c.s0 = std::abs(c.wave.p1 - c.wave.p4);
  c.validate();
  return c;
}

SolverConfig load_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot read config file '" + path + "'");
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_config(ss.str());
}

SolverConfig reference_config() {
  SolverConfig c;
  c.s0 = std::abs(c.wave.p1 - c.wave.p4);
  return c;
}

}  // namespace sonic
