#include "mufold/bench.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

namespace mufold {
namespace {

namespace fs = std::filesystem;

std::string format_double(double v) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

double tts(const SolverRun& run) {
  if (run.occurrences < 1) {
    throw BenchError(BenchError::Kind::ZeroOccurrences,
                     "run reports no occurrences of its best solution");
  }
  return run.wall_time_s / static_cast<double>(run.occurrences);
}

double normalized_gain(const SolverRun& run, double reference_optimum) {
  if (reference_optimum <= 0) {
    throw BenchError(BenchError::Kind::BadInput, "reference optimum must be positive");
  }
  const double gain = run.best_value / reference_optimum;
  if (gain > 1.0 + 1e-6) {
    throw BenchError(BenchError::Kind::ReferenceExceeded,
                     "run value " + format_double(run.best_value) +
                         " exceeds the reference optimum " +
                         format_double(reference_optimum) + "; the reference is stale");
  }
  return gain;
}

std::vector<std::pair<double, double>> best_so_far_curve(
    const std::vector<SolverRun>& runs, double window_s, double resolution_s) {
  if (window_s <= 0 || resolution_s <= 0) {
    throw BenchError(BenchError::Kind::BadInput, "window and resolution must be positive");
  }
  std::vector<std::pair<double, double>> events;
  for (const SolverRun& run : runs) {
    events.insert(events.end(), run.trace.begin(), run.trace.end());
  }
  std::sort(events.begin(), events.end());

  std::vector<std::pair<double, double>> curve;
  size_t next_event = 0;
  double best = 0.0;
  const auto ticks = static_cast<int64_t>(std::floor(window_s / resolution_s + 1e-12));
  for (int64_t i = 0; i <= ticks; ++i) {
    const double t = static_cast<double>(i) * resolution_s;
    while (next_event < events.size() && events[next_event].first <= t) {
      best = std::max(best, events[next_event].second);
      ++next_event;
    }
    curve.emplace_back(t, best);
  }
  return curve;
}

std::vector<SlopeEntry> gain_per_tts_slopes(const std::vector<ReportRow>& rows) {
  std::map<std::pair<std::string, std::string>, std::map<int, std::pair<double, double>>>
      groups;  // (ligand, solver) -> M -> (gain, tts)
  for (const ReportRow& r : rows) {
    groups[{r.ligand, r.solver}][r.torsions] = {r.gain, r.tts_s};
  }
  bool any_multi = false;
  std::vector<SlopeEntry> out;
  for (const auto& [key, levels] : groups) {
    SlopeEntry e;
    e.ligand = key.first;
    e.solver = key.second;
    for (const auto& [m, gt] : levels) {
      e.levels.push_back(m);
      e.ratios.push_back(gt.second > 0 ? gt.first / gt.second
                                       : std::numeric_limits<double>::infinity());
    }
    if (e.levels.size() >= 2) any_multi = true;
    for (size_t i = 0; i + 1 < e.ratios.size(); ++i) {
      e.slopes.push_back((e.ratios[i + 1] - e.ratios[i]) /
                         static_cast<double>(e.levels[i + 1] - e.levels[i]));
    }
    for (size_t i = 0; i + 1 < e.slopes.size(); ++i) {
      e.slope_ratios.push_back(e.slopes[i + 1] / e.slopes[i]);
    }
    if (e.slope_ratios.empty()) {
      e.avg_slope_ratio = std::numeric_limits<double>::quiet_NaN();
    } else {
      double s = 0;
      for (double r : e.slope_ratios) s += r;
      e.avg_slope_ratio = s / static_cast<double>(e.slope_ratios.size());
    }
    out.push_back(std::move(e));
  }
  if (!any_multi) {
    throw BenchError(BenchError::Kind::InsufficientLevels,
                     "slope analysis needs at least two torsion-count levels");
  }
  return out;
}

double degradation_study(const TorsionModel& tm, int fine_d, int coarse_d) {
  if (coarse_d < 2 || fine_d % coarse_d != 0) {
    throw BenchError(BenchError::Kind::BadInput,
                     "fine granularity must be a multiple of the coarse one");
  }
  TickClock clock;
  const double fine = exhaustive(tm, AngleGrid(fine_d), clock).best_value;
  const double coarse = exhaustive(tm, AngleGrid(coarse_d), clock).best_value;
  if (fine <= 0) {
    throw BenchError(BenchError::Kind::BadInput, "degenerate objective; nothing to compare");
  }
  return 100.0 * (1.0 - coarse / fine);
}

const std::map<std::string, double>& bondi_radii() {
  static const std::map<std::string, double> radii = {
      {"H", 1.20}, {"C", 1.70}, {"N", 1.55}, {"O", 1.52}, {"F", 1.47},
      {"P", 1.80}, {"S", 1.80}, {"Cl", 1.75}, {"Br", 1.85}, {"I", 1.98},
  };
  return radii;
}

std::vector<Clash> vdw_validity(const Molecule& m,
                                const std::map<std::string, double>& radii,
                                double tolerance) {
  for (const Atom& a : m.atoms) {
    if (!radii.count(a.element)) {
      throw BenchError(BenchError::Kind::MissingRadius,
                       "no van der Waals radius for element '" + a.element + "'");
    }
  }
  std::vector<Clash> clashes;
  const int n = m.atom_count();
  for (int a = 1; a <= n; ++a) {
    const auto dist = bfs_distances(m, a);
    for (int b = a + 1; b <= n; ++b) {
      const int hops = dist[static_cast<size_t>(b)];
      if (hops >= 0 && hops <= 3) continue;  // bonded neighborhood is rigid input
      const double threshold = radii.at(m.atom(a).element) +
                               radii.at(m.atom(b).element) - tolerance;
      const double d =
          std::sqrt(squared_distance(m.atom(a).position, m.atom(b).position));
      if (d < threshold) clashes.push_back({a, b, d, threshold});
    }
  }
  return clashes;
}

BenchmarkReport build_report(const std::vector<SolverRun>& runs, double curve_window_s,
                             double curve_resolution_s) {
  BenchmarkReport report;
  report.curve_window_s = curve_window_s;
  report.curve_resolution_s = curve_resolution_s;

  std::map<std::pair<std::string, int>, std::vector<const SolverRun*>> instances;
  for (const SolverRun& run : runs) {
    if (!run.config.contains("instance")) {
      throw BenchError(BenchError::Kind::BadInput,
                       "run lacks config.instance metadata: " + run.solver);
    }
    const auto& inst = run.config.at("instance");
    instances[{inst.at("ligand").get<std::string>(), inst.at("torsions").get<int>()}]
        .push_back(&run);
  }

  for (const auto& [key, group] : instances) {
    double reference = -1.0;
    std::string provenance = "best-known";
    for (const SolverRun* run : group) {
      if (run->solver == "exhaustive") {
        reference = run->best_value;
        provenance = "exhaustive";
      }
    }
    if (provenance != "exhaustive") {
      for (const SolverRun* run : group) reference = std::max(reference, run->best_value);
    }

    // best run per solver name
    std::map<std::string, const SolverRun*> best;
    for (const SolverRun* run : group) {
      auto [it, inserted] = best.try_emplace(run->solver, run);
      if (!inserted && run->best_value > it->second->best_value) it->second = run;
    }
    for (const auto& [solver, run] : best) {
      ReportRow row;
      row.ligand = key.first;
      row.torsions = key.second;
      row.solver = solver;
      if (run->config.contains("a_const_factor")) {
        row.a_const_factor = run->config.at("a_const_factor").get<double>();
      }
      row.best_value = run->best_value;
      row.occurrences = run->occurrences;
      row.wall_time_s = run->wall_time_s;
      row.tts_s = tts(*run);
      row.reference = reference;
      row.reference_provenance = provenance;
      row.gain = normalized_gain(*run, reference);
      report.rows.push_back(std::move(row));
    }

    // merged curves per solver
    std::map<std::string, std::vector<SolverRun>> by_solver;
    for (const SolverRun* run : group) by_solver[run->solver].push_back(*run);
    for (const auto& [solver, solver_runs] : by_solver) {
      report.curves[{key.first + ":" + solver, key.second}] =
          best_so_far_curve(solver_runs, curve_window_s, curve_resolution_s);
    }
  }

  std::sort(report.rows.begin(), report.rows.end(), [](const ReportRow& a, const ReportRow& b) {
    return std::tie(a.ligand, a.torsions, a.solver) < std::tie(b.ligand, b.torsions, b.solver);
  });

  // slope analysis only when some (ligand, solver) has two levels
  std::map<std::pair<std::string, std::string>, std::set<int>> levels;
  for (const ReportRow& r : report.rows) levels[{r.ligand, r.solver}].insert(r.torsions);
  for (const auto& [key, ms] : levels) {
    if (ms.size() >= 2) {
      report.slopes = gain_per_tts_slopes(report.rows);
      break;
    }
  }
  return report;
}

std::vector<SolverRun> load_runs(const std::string& dir) {
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".json") {
      files.push_back(entry.path());
    }
  }
  std::sort(files.begin(), files.end());
  std::vector<SolverRun> runs;
  for (const auto& file : files) {
    std::ifstream in(file);
    nlohmann::ordered_json j;
    in >> j;
    runs.push_back(SolverRun::from_json(j));
  }
  return runs;
}

nlohmann::ordered_json report_to_json(const BenchmarkReport& report) {
  nlohmann::ordered_json j;
  auto& rows = j["rows"] = nlohmann::ordered_json::array();
  for (const ReportRow& r : report.rows) {
    nlohmann::ordered_json jr;
    jr["ligand"] = r.ligand;
    jr["torsionals"] = r.torsions;
    jr["solver"] = r.solver;
    if (r.a_const_factor > 0) jr["a_const_factor"] = r.a_const_factor;
    jr["best_value"] = r.best_value;
    jr["occurrences"] = r.occurrences;
    jr["wall_time_s"] = r.wall_time_s;
    jr["tts_s"] = r.tts_s;
    jr["normalized_gain"] = r.gain;
    jr["reference"] = r.reference;
    jr["reference_provenance"] = r.reference_provenance;
    rows.push_back(std::move(jr));
  }
  auto& slopes = j["slopes"] = nlohmann::ordered_json::array();
  for (const SlopeEntry& e : report.slopes) {
    nlohmann::ordered_json je;
    je["ligand"] = e.ligand;
    je["solver"] = e.solver;
    je["levels"] = e.levels;
    je["gain_per_tts"] = e.ratios;
    je["slopes"] = e.slopes;
    je["slope_ratios"] = e.slope_ratios;
    if (std::isnan(e.avg_slope_ratio)) {
      je["avg_slope_ratio"] = nullptr;
    } else {
      je["avg_slope_ratio"] = e.avg_slope_ratio;
    }
    slopes.push_back(std::move(je));
  }
  j["curve_window_s"] = report.curve_window_s;
  j["curve_resolution_s"] = report.curve_resolution_s;
  return j;
}

std::string report_table_csv(const BenchmarkReport& report) {
  std::ostringstream out;
  out << "ligand,torsionals,solver,tts_s,normalized_gain,best_value,occurrences,"
         "wall_time_s,aconst_factor,reference,reference_provenance\n";
  for (const ReportRow& r : report.rows) {
    out << r.ligand << ',' << r.torsions << ',' << r.solver << ','
        << format_double(r.tts_s) << ',' << format_double(r.gain) << ','
        << format_double(r.best_value) << ',' << r.occurrences << ','
        << format_double(r.wall_time_s) << ','
        << (r.a_const_factor > 0 ? format_double(r.a_const_factor) : "") << ','
        << format_double(r.reference) << ',' << r.reference_provenance << '\n';
  }
  return out.str();
}

std::string report_slopes_csv(const BenchmarkReport& report) {
  std::ostringstream out;
  out << "ligand,solver,m_from,m_to,slope\n";
  for (const SlopeEntry& e : report.slopes) {
    for (size_t i = 0; i < e.slopes.size(); ++i) {
      out << e.ligand << ',' << e.solver << ',' << e.levels[i] << ',' << e.levels[i + 1]
          << ',' << format_double(e.slopes[i]) << '\n';
    }
  }
  return out.str();
}

std::string curve_csv(const std::vector<std::pair<double, double>>& curve) {
  std::ostringstream out;
  out << "t_s,best_value\n";
  for (const auto& [t, v] : curve) {
    out << format_double(t) << ',' << format_double(v) << '\n';
  }
  return out.str();
}

void write_report(const BenchmarkReport& report, const std::string& dir) {
  fs::create_directories(dir);
  {
    std::ofstream out(fs::path(dir) / "report.json");
    out << report_to_json(report).dump(2) << "\n";
  }
  {
    std::ofstream out(fs::path(dir) / "table.csv");
    out << report_table_csv(report);
  }
  if (!report.slopes.empty()) {
    std::ofstream out(fs::path(dir) / "slopes.csv");
    out << report_slopes_csv(report);
  }
  const fs::path curve_dir = fs::path(dir) / "curves";
  fs::create_directories(curve_dir);
  for (const auto& [key, curve] : report.curves) {
    std::string name = key.first + "_M" + std::to_string(key.second) + ".csv";
    std::replace(name.begin(), name.end(), ':', '_');
    std::ofstream out(curve_dir / name);
    out << curve_csv(curve);
  }
}

}  // namespace mufold
