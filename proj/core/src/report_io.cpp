#include "kbbm/report_io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <system_error>

#include <json.hpp>

namespace kbbm {

std::string format_real(double v) {
  char buf[40];
  const int n = std::snprintf(buf, sizeof buf, "%.17g", v);
  return std::string(buf, static_cast<std::size_t>(n));
}

void write_file_atomic(const std::filesystem::path& path, std::string_view content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) throw std::runtime_error("write to " + tmp.string() + " failed");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw std::runtime_error("rename " + tmp.string() + " -> " + path.string() + ": " + ec.message());
}

std::string snapshots_csv(const std::vector<Snapshot>& snapshots) {
  std::string out = "time,particle_index,position\n";
  for (const Snapshot& s : snapshots) {
    const std::string t = format_real(s.time);
    for (std::size_t i = 0; i < s.size(); ++i) {
      out += t;
      out += ',';
      out += std::to_string(s.ids[i]);
      out += ',';
      out += format_real(s.positions[i]);
      out += '\n';
    }
  }
  return out;
}

std::string series_csv(const std::vector<MartingaleSeries>& series) {
  std::string out = "k,theta,r_n,value\n";
  for (const MartingaleSeries& s : series) {
    for (std::size_t i = 0; i < s.values.size(); ++i) {
      out += std::to_string(s.k) + ',' + format_real(s.theta) + ',' + format_real(s.times[i]) + ',' +
             format_real(s.values[i]) + '\n';
    }
  }
  return out;
}

std::string report_csv(const ExpansionReport& report) {
  std::string out = "t,observed,predicted,residual,residual_tm\n";
  for (const ReportRow& r : report.rows) {
    out += format_real(r.t) + ',' + format_real(r.observed) + ',' + format_real(r.predicted) + ',' +
           format_real(r.residual) + ',' + format_real(r.scaled_residual) + '\n';
  }
  return out;
}

namespace {

nlohmann::json interval_json(const Interval& a) {
  return {{"lower", a.lower()}, {"upper", a.bounded() ? nlohmann::json(a.upper()) : nlohmann::json("inf")}};
}

}  // namespace

std::string report_json(const ExpansionReport& report) {
  nlohmann::json j;
  j["mode"] = report.mode;
  j["regime"] = std::string(to_string(report.regime));
  j["m"] = report.m;
  j["params"] = {{"theta", report.params.theta}, {"beta", report.params.beta}, {"mu", report.params.mu}};
  j["x"] = report.x;
  j["interval"] = interval_json(report.interval);
  j["normalization_exponent"] = normalization_exponent(report.regime);
  auto& rows = j["rows"] = nlohmann::json::array();
  for (const ReportRow& r : report.rows) {
    rows.push_back({{"t", r.t},
                    {"observed", r.observed},
                    {"predicted", r.predicted},
                    {"residual", r.residual},
                    {"residual_tm", r.scaled_residual},
                    {"terms", r.terms}});
  }
  auto& verdicts = j["verdicts"] = nlohmann::json::array();
  for (const Verdict& v : report.verdicts) {
    verdicts.push_back({{"name", v.name}, {"passed", v.passed}, {"detail", v.detail}});
  }
  j["all_passed"] = report.all_passed();
  if (report.pathwise) {
    const PathwiseSummary& p = *report.pathwise;
    j["pathwise"] = {{"replicates", p.replicates},
                     {"survivors", p.survivors},
                     {"extinct", p.extinct},
                     {"cap_exceeded", p.cap_exceeded},
                     {"survival_fraction", p.survival_fraction},
                     {"kappa", p.kappa},
                     {"horizon", p.horizon},
                     {"half_time", p.half_time},
                     {"checkpoints", p.checkpoints},
                     {"median_ratio", p.median_ratio},
                     {"ratio_q25", p.ratio_q25},
                     {"ratio_q75", p.ratio_q75},
                     {"median_ratio_std_error", p.median_ratio_std_error},
                     {"median_abs_scaled_half", p.median_abs_scaled_half},
                     {"median_abs_scaled_last", p.median_abs_scaled_last},
                     {"tolerance_multiple", p.tolerance_multiple}};
  }
  return j.dump(2) + "\n";
}

std::string kesten_csv(const KestenTable& table) {
  std::string out = "t,expected,compensated_log,increment\n";
  for (const KestenRow& r : table.rows) {
    out += format_real(r.t) + ',' + format_real(r.expected) + ',' + format_real(r.compensated_log) + ',' +
           format_real(r.increment) + '\n';
  }
  return out;
}

std::string kesten_json(const KestenTable& table) {
  nlohmann::json j;
  j["regime"] = std::string(to_string(table.regime));
  j["exponent"] = table.exponent;
  j["fitted_constant"] = table.fitted_constant;
  j["leading_constant"] = table.leading_constant;
  j["increments_shrinking"] = table.increments_shrinking;
  auto& rows = j["rows"] = nlohmann::json::array();
  for (const KestenRow& r : table.rows) {
    rows.push_back({{"t", r.t}, {"expected", r.expected}, {"compensated_log", r.compensated_log}, {"increment", r.increment}});
  }
  return j.dump(2) + "\n";
}

}  // namespace kbbm
