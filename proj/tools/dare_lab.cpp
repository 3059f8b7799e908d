#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "darelab/harness.hpp"

using namespace darelab;

namespace {

std::vector<uint64_t> parse_values(const std::string& csv) {
  std::vector<uint64_t> out;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(std::stoull(item));
  }
  return out;
}

void write_gnuplot(const std::string& path, const std::string& axis,
                   const std::vector<std::pair<double, double>>& points, const FitResult& fit) {
  std::ofstream gp(path);
  gp << "set logscale xy\n"
     << "set xlabel '" << axis << "'\n"
     << "set ylabel 'post-GST dispersal-phase bits'\n"
     << "set title 'fitted slope " << fit.slope << "'\n"
     << "plot '-' with linespoints title 'measured', exp(" << fit.intercept << ") * x**"
     << fit.slope << " title 'fit'\n";
  for (auto& [x, y] : points) gp << x << ' ' << y << '\n';
  gp << "e\n";
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"dare-lab: deterministic simulation lab for erasure-coded Byzantine consensus"};
  RunConfig cfg;
  std::string protocol = "dare";
  std::string scenario = "good-case";
  std::string sweep_spec;
  std::string out_path;
  std::string transcript_path;
  int reps = 1;
  int64_t gst = -1;
  bool gnuplot = false;

  app.add_option("--protocol", protocol, "dare | dare-stark | baseline | vector");
  app.add_option("--scenario", scenario,
                 "good-case | adversarial-shift | silent-faults | equivocation | pre-gst-chaos | "
                 "retrieval-corruption");
  app.add_option("--n", cfg.n, "process count (3t+1)");
  app.add_option("--L", cfg.L, "value length in bits");
  app.add_option("--kappa", cfg.kappa, "crypto object size in bits");
  app.add_option("--proof-kappa", cfg.proof_kappa, "simulated succinct-proof size in bits");
  app.add_option("--delta", cfg.delta, "post-GST message delay bound in ticks");
  app.add_option("--gst", gst, "override the scenario's global stabilization time");
  app.add_option("--seed", cfg.seed, "base RNG seed");
  app.add_option("--reps", reps, "runs (seeds seed..seed+reps-1)");
  app.add_option("--sweep", sweep_spec, "axis sweep, e.g. n=16,25,36,49 or L=65536,131072,262144");
  app.add_option("--out", out_path, "CSV output path (default stdout)");
  app.add_flag("--unknown-delta", cfg.unknown_delta, "run the unknown-delta adaptation");
  app.add_option("--delta-guess", cfg.delta_guess, "initial timing guess in unknown-delta mode");
  app.add_option("--proposal-bits", cfg.proposal_bits, "per-process proposal bits (vector)");
  app.add_option("--transcript", transcript_path, "dump the message transcript of the last run");
  app.add_flag("--gnuplot", gnuplot, "emit a gnuplot script next to the sweep CSV");
  CLI11_PARSE(app, argc, argv);

  try {
    auto proto = parse_protocol(protocol);
    if (!proto) throw UsageError("unknown protocol: " + protocol);
    cfg.protocol = *proto;
    auto scen = parse_scenario(scenario);
    if (!scen) throw UsageError("unknown scenario: " + scenario);
    cfg.scenario = *scen;
    if (gst >= 0) cfg.gst = gst;
    cfg.transcript = !transcript_path.empty();

    std::ofstream file;
    std::ostream* out = &std::cout;
    if (!out_path.empty()) {
      file.open(out_path);
      if (!file) throw UsageError("cannot open --out path " + out_path);
      out = &file;
    }

    if (sweep_spec.empty()) make_params(cfg); // fail fast before emitting output
    bool any_bad = false;
    *out << csv_header() << '\n';

    if (!sweep_spec.empty()) {
      auto eq = sweep_spec.find('=');
      if (eq == std::string::npos) throw UsageError("--sweep expects axis=v1,v2,...");
      std::string axis = sweep_spec.substr(0, eq);
      std::vector<uint64_t> values = parse_values(sweep_spec.substr(eq + 1));
      SweepOutcome res = sweep(cfg, axis, values, reps);
      std::vector<std::pair<double, double>> points;
      for (size_t i = 0; i < values.size(); ++i) {
        double acc = 0;
        for (int r = 0; r < reps; ++r) acc += double(res.rows[i * reps + r].l_term_bits);
        points.emplace_back(double(values[i]), acc / reps);
      }
      for (const RunReport& r : res.rows) {
        *out << csv_row(r) << '\n';
        any_bad |= !r.safety_ok || !r.liveness_ok;
      }
      std::cout << "fit: protocol=" << protocol << " axis=" << axis << " slope=" << res.fit.slope
                << " intercept=" << res.fit.intercept
                << " max_abs_residual=" << res.fit.max_abs_residual
                << " points=" << res.fit.points << '\n';
      if (gnuplot && !out_path.empty()) write_gnuplot(out_path + ".gp", axis, points, res.fit);
    } else {
      for (int r = 0; r < reps; ++r) {
        RunConfig one = cfg;
        one.seed = cfg.seed + static_cast<uint64_t>(r);
        RunReport rep = run_one(one);
        *out << csv_row(rep) << '\n';
        if (!rep.safety_ok || !rep.liveness_ok)
          std::cerr << "property violation (seed " << one.seed << "): " << rep.failure << '\n';
        any_bad |= !rep.safety_ok || !rep.liveness_ok;
        if (!transcript_path.empty() && r == reps - 1) {
          std::ofstream tf(transcript_path);
          for (const std::string& line : rep.transcript) tf << line << '\n';
        }
      }
    }
    return any_bad ? 1 : 0;
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
