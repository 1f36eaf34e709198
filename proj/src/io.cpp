#include "sonic/io.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>

#include "json.hpp"

namespace sonic {

using nlohmann::json;

namespace {

// Appends one CSV row.
class Row {
 public:
  explicit Row(std::string& out) : out_(out) {}
  ~Row() { out_ += '\n'; }
  Row& operator<<(double v) { return field(format_double(v)); }
  Row& operator<<(int v) { return field(std::to_string(v)); }
  Row& operator<<(std::size_t v) { return field(std::to_string(v)); }
  Row& operator<<(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return field(s);
    std::string q = "\"";
    for (char c : s) {
      if (c == '"') q += '"';
      q += c;
    }
    return field(q + "\"");
  }

 private:
  Row& field(const std::string& s) {
    if (!first_) out_ += ',';
    first_ = false;
    out_ += s;
    return *this;
  }
  std::string& out_;
  bool first_ = true;
};

// JSON has no inf or nan; such values become null.
json num(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json nums(const std::vector<double>& v) {
  json a = json::array();
  for (double x : v) a.push_back(num(x));
  return a;
}

json report_json(const ResidualReport& r) {
  return {{"identity", r.identity},
          {"location", r.location},
          {"steps", nums(r.steps)},
          {"residuals", nums(r.residuals)},
          {"orders", nums(r.orders)},
          {"nominal_order", r.nominal_order},
          {"residual", num(r.residual)},
          {"min_order", num(r.min_order)},
          {"exact", r.exact},
          {"converges", r.converges()}};
}

}  // namespace

std::string trace_csv(const TraceResult& trace) {
  std::string out = "k,xi,eta,r,theta,p,R,S\n";
  int k = 0;
  for (const auto& tp : trace.points) {
    Row(out) << k++ << tp.c.xi << tp.c.eta << tp.r << tp.theta << tp.w.p << tp.w.R << tp.w.S;
  }
  return out;
}

std::string mesh_csv(const CharacteristicMesh& mesh) {
  std::string out = "i,j,theta,r,xi,eta,p,R,S,t\n";
  for (const CharNode& n : mesh.nodes()) {
    const CartPoint c = n.cart();
    Row(out) << n.i << n.j << n.theta << n.r << c.xi << c.eta << n.w.p << n.w.R << n.w.S
             << std::sqrt(std::max(0.0, n.sonic_gap()));
  }
  return out;
}

std::string field_csv(const RTField& field) {
  std::string out = "level,k,r,t,p,R,S,theta,V_over_t,Rr,Sr\n";
  int level = 0;
  for (const RTLevel& lv : field.levels) {
    const LevelDerivatives d = r_derivatives(field, lv);
    for (int k = lv.lo; k <= lv.hi; ++k) {
      const double r = field.r_at(k);
      const int q = k - lv.lo;
      // inf where R or S vanishes (the AB strand)
      const double v_over_t = (1.0 / lv.S[q] - 1.0 / lv.R[q]) / lv.t;
      Row(out) << level << k << r << lv.t << lv.t * lv.t - r << lv.R[q] << lv.S[q]
               << lv.theta[q] << v_over_t << d.Rr[q] << d.Sr[q];
    }
    ++level;
  }
  return out;
}

std::string diagnostics_json(const SolverConfig& config, const MarchRun& run,
                             const DiagnoseReport& report) {
  const Diagnostics& d = report.diag;
  json j;
  j["rate"] = {{"exponent", num(d.rate.exponent)},
               {"constant", num(d.rate.constant)},
               {"residual", num(d.rate.residual)},
               {"samples", d.rate.samples},
               {"degenerate", d.rate.degenerate},
               {"column_exponent_min", num(d.rate.column_exponent_min)},
               {"column_exponent_max", num(d.rate.column_exponent_max)},
               {"t_lo", 10.0 * config.t_min()},
               {"t_hi", config.t0 / 4.0}};
  j["v_over_t"] = num(d.v_over_t);
  j["L"] = num(d.L);
  json bounds = json::array();
  for (const auto& b : d.bounds) {
    const auto& c = b.constants;
    bounds.push_back({{"delta", b.delta},
                      {"td_Rr", num(b.td_Rr)},
                      {"td_Sr", num(b.td_Sr)},
                      {"K1", num(c.K1)},
                      {"K2", num(c.K2)},
                      {"K3", num(c.K3)},
                      {"K4", num(c.K4)},
                      {"K5", num(c.K5)},
                      {"M0", num(c.M0)},
                      {"Mhat", num(c.Mhat)},
                      {"k3_dominates", b.k3_dominates},
                      {"k1_below_k2", b.k1_below_k2}});
  }
  j["bounds"] = bounds;
  json levels = json::array();
  for (std::size_t k = 0; k < d.levels.size(); ++k) {
    const auto& m = d.levels[k];
    levels.push_back({{"t", m.t},
                      {"v_over_t", num(m.v_over_t)},
                      {"sup_diff", num(m.sup_diff)},
                      {"w", num(d.w_samples[k])},
                      {"td_Rr", nums(m.td_Rr)},
                      {"td_Sr", nums(m.td_Sr)}});
  }
  j["levels"] = levels;

  const SonicReport& s = report.sonic;
  json curves = json::array();
  for (double e : s.eps) {
    json c = {{"eps", e}, {"r", json::array()}, {"theta", json::array()},
              {"slope", json::array()}, {"slope_fd", json::array()}};
    for (const auto& smp : s.samples) {
      if (smp.eps != e) continue;
      c["r"].push_back(smp.r);
      c["theta"].push_back(smp.theta_eps);
      c["slope"].push_back(smp.dtheta_eps);
      c["slope_fd"].push_back(num(smp.dtheta_eps_fd));
    }
    curves.push_back(std::move(c));
  }
  j["sonic"] = {{"eps", nums(s.eps)},
                {"slope_cauchy_gaps", nums(s.gaps)},
                {"sup_slope", num(s.sup_slope)},
                {"max_slope_fd_gap", num(s.max_slope_fd_gap)},
                {"route_gap", num(s.route_gap)},
                {"matching", num(s.matching)},
                {"r", nums(s.route_a.r)},
                {"R", nums(s.route_a.R)},
                {"S", nums(s.route_a.S)},
                {"theta", nums(s.route_a.theta)},
                {"level_curves", curves}};
  j["sign"] = {{"max_R", num(report.sign.max_R)},
               {"max_S", num(report.sign.max_S)},
               {"sup_abs", num(report.sign.sup_abs)},
               {"boundary_sup", num(report.sign.boundary_sup)},
               {"nonpositive", report.sign.nonpositive},
               {"bounded", report.sign.bounded}};
  j["march"] = {{"steps", run.stats.steps},
                {"levels", run.field.levels.size()},
                {"max_removed_per_step", run.stats.max_removed_per_step},
                {"max_allowed_per_step", run.stats.max_allowed_per_step},
                {"cone_consistent", run.stats.cone_consistent},
                {"mesh_nodes", run.mesh.size()}};
  return j.dump(1) + "\n";
}

std::string verify_json(const VerifyReport& report) {
  json j;
  j["passed"] = report.passed();
  j["wave_polar_richardson"] = {{"max_residual", num(report.wave_polar_richardson)},
                                {"points", report.wave_points},
                                {"tolerance", 1e-10}};
  json ex = json::array(), pa = json::array(), ca = json::array();
  for (const auto& r : report.exact) ex.push_back(report_json(r));
  for (const auto& r : report.patch) pa.push_back(report_json(r));
  for (const auto& c : report.canaries) {
    ca.push_back({{"mutation", to_string(c.mutation)},
                  {"identity", c.identity},
                  {"clean", num(c.clean)},
                  {"mutated", num(c.mutated)},
                  {"plateau_ratio", num(c.plateau_ratio)},
                  {"plateaus", c.plateaus}});
  }
  j["exact"] = ex;
  j["patch"] = pa;
  j["canaries"] = ca;
  return j.dump(1) + "\n";
}

std::string diagnostics_summary_csv(const DiagnoseReport& report) {
  std::string out = "quantity,value\n";
  auto kv = [&](const std::string& k, double v) { Row(out) << k << v; };
  kv("rate_exponent", report.diag.rate.exponent);
  kv("rate_fit_residual", report.diag.rate.residual);
  kv("max_v_over_t", report.diag.v_over_t);
  for (const auto& b : report.diag.bounds) {
    const std::string d = format_double(b.delta);
    kv("td_Rr[" + d + "]", b.td_Rr);
    kv("td_Sr[" + d + "]", b.td_Sr);
  }
  kv("sonic_matching", report.sonic.matching);
  kv("route_gap", report.sonic.route_gap);
  kv("sup_slope", report.sonic.sup_slope);
  kv("max_R", report.sign.max_R);
  kv("max_S", report.sign.max_S);
  return out;
}

std::string verify_summary_csv(const VerifyReport& report) {
  std::string out = "group,identity,location,residual,min_order,nominal_order,converges\n";
  auto rows = [&](const char* group, const std::vector<ResidualReport>& v) {
    for (const auto& r : v) {
      Row(out) << std::string(group) << r.identity << r.location << r.residual << r.min_order
               << r.nominal_order << std::string(r.converges() ? "yes" : "no");
    }
  };
  rows("exact", report.exact);
  rows("patch", report.patch);
  return out;
}

std::string manifest_text(const SolverConfig& config, const std::string& subcommand, int refine,
                          const std::vector<Artifact>& artifacts) {
  const std::string canon = config.canonical();
  std::string out;
  out += "subcommand = " + subcommand + "\n";
  out += "refine = " + std::to_string(refine) + "\n";
  out += "config_sha256 = " + sha256_hex(canon) + "\n";
  out += "\n[config]\n" + canon;
  out += "\n[artifacts]\n";
  for (const auto& [name, bytes] : artifacts) {
    out += name + " " + sha256_hex(bytes) + "\n";
  }
  return out;
}

void write_file(const std::string& dir, const std::string& name, const std::string& bytes) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw std::runtime_error("cannot create directory '" + dir + "': " + ec.message());
  const auto path = std::filesystem::path(dir) / name;
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write '" + path.string() + "'");
  f << bytes;
  if (!f) throw std::runtime_error("write failed for '" + path.string() + "'");
}

}  // namespace sonic
