#pragma once

// Property suites and example claim sets behind the CLI commands. Each run
// is a pure function of its RunConfig, so equal configs give byte-identical
// reports.

#include <string>
#include <vector>

#include "incl/degree.hpp"
#include "incl/report.hpp"

namespace incl {

/// Lemma ids accepted by `verify`.
const std::vector<std::string>& lemma_ids();
/// Example ids accepted by `example`.
const std::vector<std::string>& example_ids();

/// Property suite for one lemma id. Throws BadParam for an unknown id.
Report run_verify(const RunConfig& config);

/// Example run plus the data tables it can dump.
struct ExampleRun {
  Report report;
  std::vector<FieldSample> field;
  std::vector<IntegrabilityRow> integrability;  ///< ball only
  std::vector<LiminfRow> liminf;                ///< case1 and ball
};

/// Full claim set of one example. Throws BadParam for an unknown id or
/// out-of-range parameters.
ExampleRun run_example(const RunConfig& config);

struct TauRow {
  double K = 1.0;
  double tau = 0.0;
  double delta = 0.0;
  bool above_threshold = false;  ///< delta > -1
};

struct TauSweep {
  Report report;
  std::vector<TauRow> rows;
};

/// Threshold table of corollary_delta over a 200-point tau grid on [0, 1],
/// for config.K or, when unset, for K in {1.5, 2.25, 4, 10}.
TauSweep run_sweep_tau(const RunConfig& config);

/// Spectrum, distortions, margin, verdict and negative-eigenvalue flag.
Report run_analyze_matrix(const RunConfig& config, const SquareMatrix& a);

/// `K,tau,delta,above_threshold`.
void write_tau_csv(std::ostream& out, const std::vector<TauRow>& rows);

/// Rows as nested arrays.
Json matrix_json(const SquareMatrix& a);
/// Throws DimensionMismatch unless `j` is a square 2..6 array of numbers.
SquareMatrix matrix_from_json(const Json& j);

}  // namespace incl
