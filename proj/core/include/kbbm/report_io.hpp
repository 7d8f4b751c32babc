#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "kbbm/martingales.hpp"
#include "kbbm/simulator.hpp"
#include "kbbm/validation.hpp"

namespace kbbm {

/// Shortest round-trip decimal representation ("%.17g").
std::string format_real(double v);

/// Writes `content` to a sibling temporary file and renames it over `path`.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

/// `time,particle_index,position`; particle_index is the lineage id.
std::string snapshots_csv(const std::vector<Snapshot>& snapshots);
/// `k,theta,r_n,value`.
std::string series_csv(const std::vector<MartingaleSeries>& series);
/// `t,observed,predicted,residual,residual_tm`.
std::string report_csv(const ExpansionReport& report);
std::string report_json(const ExpansionReport& report);
/// `t,expected,compensated_log,increment`.
std::string kesten_csv(const KestenTable& table);
std::string kesten_json(const KestenTable& table);

}  // namespace kbbm
