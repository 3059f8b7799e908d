#pragma once

#include <optional>

#include "darelab/simnet.hpp"

namespace darelab {

enum class Protocol { Dare, DareStark, Baseline, Vector };
enum class Scenario {
  GoodCase,
  AdversarialShift,
  SilentFaults,
  Equivocation,
  PreGstChaos,
  RetrievalCorruption,
};

const char* protocol_name(Protocol p);
const char* scenario_name(Scenario s);
std::optional<Protocol> parse_protocol(const std::string& s);
std::optional<Scenario> parse_scenario(const std::string& s);

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  Protocol protocol = Protocol::Dare;
  Scenario scenario = Scenario::GoodCase;
  int n = 4;
  uint64_t L = 8192;
  uint64_t kappa = 256;
  uint64_t proof_kappa = 2048;
  Tick delta = 10;
  std::optional<Tick> gst; // scenario picks its own when unset
  uint64_t seed = 1;
  bool unknown_delta = false;
  Tick delta_guess = 2;
  uint64_t proposal_bits = 1024; // per-process proposal size (vector reduction)
  bool transcript = false;
};

struct RunReport {
  RunConfig cfg;
  ProtocolParams params;
  SimMetrics metrics;
  bool safety_ok = false;
  bool liveness_ok = false;
  std::string failure;          // first violated property, empty when clean
  uint64_t dispersal_msgs = 0;  // post-GST dispersal-kind messages
  uint64_t l_term_bits = 0;     // dispersal-phase value-payload bits (see README)
  uint64_t sync_bits = 0;       // view-synchronizer bits (view-completed + enter-view)
  Tick max_acquire = -1;        // latest disperser acquire among correct processes
  Tick min_acquire = -1;        // earliest disperser acquire among correct processes
  int acquirers = 0;            // correct processes that acquired
  std::vector<std::string> transcript;
  std::map<Pid, ValuePtr> decisions;
};

ProtocolParams make_params(const RunConfig& cfg);
ValuePtr make_proposal_value(const ProtocolParams& p, Pid pid, uint64_t seed);
ValidFn default_validity(const ProtocolParams& p);

RunReport run_one(const RunConfig& cfg);

std::string csv_header();
std::string csv_row(const RunReport& r);

struct FitResult {
  double slope = 0;
  double intercept = 0;
  double max_abs_residual = 0;
  int points = 0;
};

/// Least-squares fit of log(y) against log(x).
FitResult fit_loglog(const std::vector<std::pair<double, double>>& xy);

struct SweepOutcome {
  std::vector<RunReport> rows;
  FitResult fit;
};

/// Sweep one axis ("n" or "L") over >= 3 values, `reps` seeds per value, and
/// fit the log-log slope of the mean L-term bits against the axis.
SweepOutcome sweep(const RunConfig& base, const std::string& axis,
                   const std::vector<uint64_t>& values, int reps);

/// Sync property-observer run (the synchronizer alone under pre-GST chaos).
struct SyncPropertyReport {
  bool ok = true;
  View v_max = 0;
  View v_sync = 0;
  std::vector<std::string> violations;
};
SyncPropertyReport run_sync_observer(int n, uint64_t seed, Tick delta);

/// Retriever precondition-boundary run: exactly t+1 correct processes input
/// v, the other correct input bottom, t Byzantine spray garbage symbols.
struct SimpleReport {
  bool ok = true;
  std::string detail;
};
SimpleReport run_retriever_boundary(int n, uint64_t seed, Tick delta, uint64_t L);

} // namespace darelab
