#pragma once

#include <map>
#include <string>
#include <vector>

#include "mufold/solvers.hpp"

namespace mufold {

class BenchError : public std::runtime_error {
 public:
  enum class Kind {
    ZeroOccurrences,
    ReferenceExceeded,
    InsufficientLevels,
    MissingRadius,
    BadInput,
  };
  BenchError(Kind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

/// total execution time / occurrences of the best solution.
double tts(const SolverRun& run);

/// best value over the reference optimum, in [0, 1]. A value beyond
/// 1 + 1e-6 signals a stale reference and raises ReferenceExceeded.
double normalized_gain(const SolverRun& run, double reference_optimum);

/// Step-function sample of the max best-so-far across runs at each
/// resolution tick in [0, window].
std::vector<std::pair<double, double>> best_so_far_curve(
    const std::vector<SolverRun>& runs, double window_s = 100.0,
    double resolution_s = 1.0);

struct ReportRow {
  std::string ligand;
  int torsions = 0;
  std::string solver;
  double a_const_factor = 0.0;  // 0 when not applicable
  double best_value = 0.0;
  int64_t occurrences = 0;
  double wall_time_s = 0.0;
  double tts_s = 0.0;
  double gain = 0.0;
  double reference = 0.0;
  std::string reference_provenance;  // "exhaustive" | "best-known"
};

struct SlopeEntry {
  std::string ligand;
  std::string solver;
  std::vector<int> levels;
  std::vector<double> ratios;        // gain / tts per level
  std::vector<double> slopes;        // between consecutive levels
  std::vector<double> slope_ratios;  // consecutive slope ratios
  double avg_slope_ratio = 0.0;      // NaN when fewer than 2 slopes
};

struct BenchmarkReport {
  std::vector<ReportRow> rows;
  std::vector<SlopeEntry> slopes;
  std::map<std::pair<std::string, int>, std::vector<std::pair<double, double>>> curves;
  double curve_window_s = 100.0;
  double curve_resolution_s = 1.0;
};

/// Aggregates persisted runs into the report: per (ligand, M) the reference
/// optimum is the exhaustive run when present, otherwise the best value ever
/// observed ("best-known"); per solver the best run wins. Pure function of
/// the run set.
BenchmarkReport build_report(const std::vector<SolverRun>& runs,
                             double curve_window_s = 100.0,
                             double curve_resolution_s = 1.0);

/// Slope analysis per (ligand, solver) across torsion-count levels.
/// Requires >= 2 levels for at least one group.
std::vector<SlopeEntry> gain_per_tts_slopes(const std::vector<ReportRow>& rows);

/// Percent loss of the exhaustive optimum when coarsening the grid:
/// 100 * (1 - best(coarse)/best(fine)). fine_d must be a multiple of
/// coarse_d so the grids nest.
double degradation_study(const TorsionModel& tm, int fine_d, int coarse_d);

struct Clash {
  int a = 0;
  int b = 0;
  double distance = 0.0;
  double threshold = 0.0;
};

/// Bondi van der Waals radii by element symbol.
const std::map<std::string, double>& bondi_radii();

/// Flags atom pairs at least 4 bonds apart (or disconnected) that sit closer
/// than r(a) + r(b) - tolerance. Empty result means a valid conformation.
std::vector<Clash> vdw_validity(const Molecule& m,
                                const std::map<std::string, double>& radii,
                                double tolerance = 0.4);

/// Run persistence and report serialization.
std::vector<SolverRun> load_runs(const std::string& dir);
nlohmann::ordered_json report_to_json(const BenchmarkReport& report);
std::string report_table_csv(const BenchmarkReport& report);
std::string report_slopes_csv(const BenchmarkReport& report);
std::string curve_csv(const std::vector<std::pair<double, double>>& curve);
void write_report(const BenchmarkReport& report, const std::string& dir);

}  // namespace mufold
