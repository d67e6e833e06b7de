#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "leapforge/crypto.hpp"
#include "leapforge/metrics.hpp"
#include "leapforge/scenario.hpp"
#include "leapforge/simulator.hpp"

namespace leapforge {

/// Process exit codes of the CLI verbs.
enum ExitCode : int {
  kExitOk = 0,
  kExitFailure = 1,          // vectors failed, I/O errors
  kExitInvalidScenario = 2,  // config or validation error
  kExitInvariant = 3,        // protocol invariant violated during a run
};

/// Everything one run writes to disk.
struct RunArtifacts {
  std::string trace_jsonl;
  std::string metrics_csv;
  std::string audit_csv;
};

RunArtifacts collect_artifacts(const Simulator& sim);

/// Fraction of in-range honest pairs whose stores at their erasure times
/// hold the same pairwise key for each other. 1 when there are no pairs.
double pairwise_success_fraction(const Simulator& sim);

/// LEAPFORGE_OUT wins over the command line value.
std::filesystem::path resolve_out_dir(const std::filesystem::path& cli_value);

/// Writes through a temporary file and a rename.
void write_file_atomically(const std::filesystem::path& path, const std::string& contents);

struct RunOptions {
  std::filesystem::path config;
  std::optional<std::uint64_t> seed;
  std::filesystem::path out_dir = "out";
};

/// Runs one scenario and writes out/<name>/<seed>/{trace.jsonl,
/// metrics.csv, audit.csv}. Returns an ExitCode.
int run_command(const RunOptions& opts, std::ostream& out, std::ostream& err);

struct SweepRow {
  std::size_t node_count = 0;
  std::uint32_t repeat = 0;
  std::uint64_t seed = 0;
  double pairwise_success_fraction = 0.0;
  double mean_establishment_ms = 0.0;
  double max_establishment_ms = 0.0;
  std::uint64_t messages = 0;
  std::uint64_t bytes = 0;
  std::string status = "ok";
  int exit_code = kExitOk;
};

std::string sweep_csv_header();
std::string to_csv_row(const SweepRow& row);

/// One run per (count, repeat); seeds derive from the base seed. A failing
/// run is recorded in its row and the sweep continues.
std::vector<SweepRow> sweep(const Scenario& base, const std::vector<std::size_t>& counts,
                            std::uint32_t repeats);

struct SweepOptions {
  std::filesystem::path config;
  std::optional<std::uint64_t> seed;
  std::filesystem::path out_dir = "out";
  std::vector<std::size_t> counts{2, 5, 10, 20};
  std::uint32_t repeats = 10;
};

/// Writes out/<name>/sweep.csv. Nonzero if any row failed.
int sweep_command(const SweepOptions& opts, std::ostream& out, std::ostream& err);

using CmacFn = std::function<Block16(const Block16&, ByteView)>;

/// Runs the RFC 4493 CMAC examples through `cmac`, then round-trip suites
/// for key wrapping and hash chains. One PASS/FAIL line per check.
int verify_vectors(std::ostream& out, const CmacFn& cmac = aes_cmac);

}  // namespace leapforge
