#include "darelab/harness.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "darelab/baseline.hpp"
#include "darelab/dare.hpp"
#include "darelab/darestark.hpp"
#include "darelab/vector.hpp"

namespace darelab {

namespace {

constexpr uint64_t kMaterializeBits = 64ull * 1024 * 8; // payloads above stay symbolic

uint64_t mix(uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

std::vector<uint8_t> random_bytes(size_t count, uint64_t seed) {
  std::vector<uint8_t> out(count);
  uint64_t s = seed;
  for (size_t i = 0; i < count; ++i) {
    if (i % 8 == 0) s = mix(s + i);
    out[i] = static_cast<uint8_t>(s >> ((i % 8) * 8));
  }
  return out;
}

bool sync_kind(MsgKind k) { return k == MsgKind::ViewCompleted || k == MsgKind::EnterView; }

} // namespace

const char* protocol_name(Protocol p) {
  switch (p) {
    case Protocol::Dare: return "dare";
    case Protocol::DareStark: return "dare-stark";
    case Protocol::Baseline: return "baseline";
    case Protocol::Vector: return "vector";
  }
  return "?";
}

const char* scenario_name(Scenario s) {
  switch (s) {
    case Scenario::GoodCase: return "good-case";
    case Scenario::AdversarialShift: return "adversarial-shift";
    case Scenario::SilentFaults: return "silent-faults";
    case Scenario::Equivocation: return "equivocation";
    case Scenario::PreGstChaos: return "pre-gst-chaos";
    case Scenario::RetrievalCorruption: return "retrieval-corruption";
  }
  return "?";
}

std::optional<Protocol> parse_protocol(const std::string& s) {
  for (Protocol p : {Protocol::Dare, Protocol::DareStark, Protocol::Baseline, Protocol::Vector})
    if (s == protocol_name(p)) return p;
  return std::nullopt;
}

std::optional<Scenario> parse_scenario(const std::string& s) {
  for (Scenario sc : {Scenario::GoodCase, Scenario::AdversarialShift, Scenario::SilentFaults,
                      Scenario::Equivocation, Scenario::PreGstChaos, Scenario::RetrievalCorruption})
    if (s == scenario_name(sc)) return sc;
  return std::nullopt;
}

ProtocolParams make_params(const RunConfig& cfg) {
  if (cfg.n < 4 || (cfg.n % 3 != 1 && !is_perfect_square(cfg.n)))
    throw UsageError("invalid --n " + std::to_string(cfg.n) + " (" + std::to_string(cfg.n) +
                     " != 3t+1)");
  ProtocolParams p = ProtocolParams::make(cfg.n, cfg.L, cfg.kappa, cfg.delta);
  p.proof_kappa = cfg.proof_kappa;
  p.unknown_delta = cfg.unknown_delta;
  p.delta_guess = cfg.delta_guess;
  p.proposal_bits = cfg.proposal_bits;
  try {
    p.validate();
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  return p;
}

ValuePtr make_proposal_value(const ProtocolParams& p, Pid pid, uint64_t seed) {
  auto v = std::make_shared<Value>();
  v->nominal_bits = p.value_bits;
  if (p.value_bits <= kMaterializeBits) {
    v->bytes = random_bytes((p.value_bits + 7) / 8, mix(seed) ^ static_cast<uint64_t>(pid));
  } else {
    std::string tag = "synthetic|" + std::to_string(seed) + "|" + std::to_string(pid);
    v->bytes.assign(tag.begin(), tag.end());
    v->bytes.insert(v->bytes.begin(), 'V');
    return v;
  }
  v->bytes[0] = 'V'; // external validity marker
  return v;
}

ValidFn default_validity(const ProtocolParams& p) {
  uint64_t want = p.value_bits;
  return [want](const Value& v) {
    return !v.bytes.empty() && v.bytes[0] == 'V' && v.nominal_bits == want;
  };
}

namespace {

struct ScenarioSetup {
  Tick gst = 0;
  AdversaryPolicy adversary;
};

Tick chaos_gst(const RunConfig& cfg) {
  if (cfg.gst) return *cfg.gst;
  return cfg.delta * static_cast<Tick>(8 + mix(cfg.seed * 31 + 7) % 24);
}

ScenarioSetup make_scenario(const RunConfig& cfg, const ProtocolParams& p) {
  ScenarioSetup s;
  const Tick delta = p.delta;
  switch (cfg.scenario) {
    case Scenario::GoodCase:
      s.gst = cfg.gst.value_or(0);
      break;
    case Scenario::SilentFaults:
    case Scenario::Equivocation: {
      s.gst = cfg.gst.value_or(0);
      for (Pid q = 1; q <= p.t; ++q) s.adversary.corrupt.insert(q);
      break;
    }
    case Scenario::RetrievalCorruption: {
      s.gst = cfg.gst.value_or(0);
      for (Pid q = p.n - p.t + 1; q <= p.n; ++q) s.adversary.corrupt.insert(q);
      break;
    }
    case Scenario::PreGstChaos: {
      s.gst = chaos_gst(cfg);
      const Tick gst = s.gst;
      const uint64_t seed = cfg.seed;
      s.adversary.drift = [seed](Pid q) {
        return Rational{4 + static_cast<int64_t>(mix(seed ^ (0xD1F * q)) % 13), 4};
      };
      s.adversary.delay = [gst, delta](const Message&, Tick sent, std::mt19937_64& rng) -> Tick {
        if (sent >= gst) return sent + 1 + static_cast<Tick>(rng() % static_cast<uint64_t>(delta));
        Tick span = gst + delta - sent;
        return sent + 1 + static_cast<Tick>(rng() % static_cast<uint64_t>(span));
      };
      break;
    }
    case Scenario::AdversarialShift: {
      if (cfg.protocol == Protocol::Dare) {
        // Leaders of the first view pace against a slowed clock so their
        // group sends resume right after GST; everyone else marches to the
        // second view on exact clocks. Dispersal-phase traffic sent before
        // GST stays in flight until GST + delta.
        const Tick gst = cfg.gst.value_or(p.view_duration() + 2 * delta + 2);
        s.gst = gst;
        std::set<Pid> stuck;
        int nstuck = std::min(p.X, p.n - p.quorum());
        for (Pid q = 1; q <= nstuck; ++q) stuck.insert(q);
        s.adversary.drift = [stuck, gst, delta](Pid q) {
          if (stuck.count(q)) return Rational{gst + 1, delta};
          return Rational{1, 1};
        };
        s.adversary.delay = [stuck, gst, delta](const Message& m, Tick sent,
                                                std::mt19937_64&) -> Tick {
          if (sent >= gst) return sent + delta;
          if (sync_kind(m.kind) && !stuck.count(m.sender) && !stuck.count(m.receiver))
            return sent + delta;
          return gst + delta;
        };
      } else if (cfg.protocol == Protocol::Baseline) {
        // Leaders of views 2..t+1 wake exactly at GST and broadcast their
        // full L-bit proposals; view-1 traffic is held until GST + delta.
        const Tick a_dur = AgreementEngine::kViewDurationDeltas * delta;
        const Tick gst = cfg.gst.value_or(p.t * a_dur + delta);
        s.gst = gst;
        const int last_stuck = p.t + 1;
        s.adversary.drift = [gst, a_dur, last_stuck](Pid q) {
          if (q >= 2 && q <= last_stuck) return Rational{gst, (q - 1) * a_dur};
          return Rational{1, 1};
        };
        s.adversary.delay = [gst, delta](const Message&, Tick sent, std::mt19937_64&) -> Tick {
          return sent >= gst ? sent + delta : gst + delta;
        };
      } else {
        // No pacing clocks to shift: pile every pre-GST send at GST + delta.
        const Tick gst = cfg.gst.value_or(2 * delta);
        s.gst = gst;
        s.adversary.delay = [gst, delta](const Message&, Tick sent, std::mt19937_64&) -> Tick {
          return sent >= gst ? sent + delta : gst + delta;
        };
      }
      break;
    }
  }
  return s;
}

std::unique_ptr<IProtocol> make_byzantine(const RunConfig& cfg, const ProtocolParams& p, Pid pid,
                                          uint64_t seed) {
  switch (cfg.scenario) {
    case Scenario::Equivocation:
      if (cfg.protocol == Protocol::Dare)
        return std::make_unique<DareProcess>(p, make_proposal_value(p, pid, seed),
                                             DareCore::Options{.equivocate_dispersal = true});
      if (cfg.protocol == Protocol::DareStark)
        return std::make_unique<StarkProcess>(p, make_proposal_value(p, pid, seed),
                                              StarkProcess::Options{.equivocate = true});
      return std::make_unique<SilentProcess>();
    case Scenario::RetrievalCorruption:
      if (cfg.protocol == Protocol::Dare)
        return std::make_unique<DareProcess>(p, make_proposal_value(p, pid, seed),
                                             DareCore::Options{.garbage_retrieval = true});
      if (cfg.protocol == Protocol::DareStark)
        return std::make_unique<StarkProcess>(p, make_proposal_value(p, pid, seed),
                                              StarkProcess::Options{.garbage_retrieval = true});
      return std::make_unique<SilentProcess>();
    default:
      return std::make_unique<SilentProcess>();
  }
}

class RedundancyObserver : public RunObserver {
 public:
  RedundancyObserver(const std::vector<const DareCore*>& cores, const std::set<Pid>& corrupt,
                     int need)
      : cores_(cores), corrupt_(corrupt), need_(need) {}

  void on_acquire(Pid p, HashVal h, Tick) override {
    if (corrupt_.count(p)) return;
    int holders = 0;
    for (Pid q = 1; q < static_cast<Pid>(cores_.size()); ++q) {
      if (corrupt_.count(q) || !cores_[q]) continue;
      if (cores_[q]->disperser().obtained().count(h)) ++holders;
    }
    if (holders < need_)
      violation = "redundancy: acquired hash held by " + std::to_string(holders) +
                  " correct processes, need " + std::to_string(need_);
  }

  std::string violation;

 private:
  const std::vector<const DareCore*>& cores_;
  const std::set<Pid>& corrupt_;
  int need_;
};

} // namespace

RunReport run_one(const RunConfig& cfg) {
  RunReport rep;
  rep.cfg = cfg;
  ProtocolParams params = make_params(cfg);
  ScenarioSetup setup = make_scenario(cfg, params);
  params.gst = setup.gst;
  rep.params = params;

  const std::set<Pid> corrupt = setup.adversary.corrupt;
  const uint64_t seed = cfg.seed;
  {
    ProtocolParams pcopy = params;
    RunConfig ccopy = cfg;
    setup.adversary.byzantine = [ccopy, pcopy, seed](Pid p) {
      return make_byzantine(ccopy, pcopy, p, seed);
    };
  }
  Simulator sim(params, std::move(setup.adversary), cfg.seed, default_validity(params));

  std::vector<const DareCore*> cores(params.n + 1, nullptr);
  switch (cfg.protocol) {
    case Protocol::Dare:
      sim.set_protocol_factory([&params, &cores, seed](Pid p) {
        auto proc = std::make_unique<DareProcess>(params, make_proposal_value(params, p, seed));
        cores[p] = &proc->core();
        return proc;
      });
      break;
    case Protocol::DareStark:
      sim.set_protocol_factory([&params, seed](Pid p) {
        return std::make_unique<StarkProcess>(params, make_proposal_value(params, p, seed));
      });
      break;
    case Protocol::Baseline:
      sim.set_protocol_factory([&params, seed](Pid p) {
        return std::make_unique<BaselineProcess>(params, make_proposal_value(params, p, seed));
      });
      break;
    case Protocol::Vector: {
      ProtocolParams pcopy = params;
      sim.set_valid([pcopy, &sim](const Value& v) { return vector_valid(sim.crypto(), pcopy, v); });
      sim.set_protocol_factory([&params, seed](Pid p) {
        size_t bytes = std::max<size_t>(1, (params.proposal_bits + 7) / 8);
        return std::make_unique<VectorProcess>(params,
                                               random_bytes(bytes, mix(seed ^ (0xABCDu * p))));
      });
      break;
    }
  }

  RedundancyObserver redundancy(cores, corrupt, params.t + 1);
  if (cfg.protocol == Protocol::Dare) sim.add_observer(&redundancy);
  if (cfg.transcript) sim.enable_transcript();

  RunResult res = sim.run();

  rep.metrics = res.metrics;
  rep.transcript = std::move(res.transcript);
  rep.decisions = res.decisions;
  rep.liveness_ok = res.all_decided && !res.budget_exhausted;
  if (!rep.liveness_ok) rep.failure = "liveness: not all correct processes decided in budget";

  // agreement + external validity of the decision
  bool agree = true, valid_ok = true;
  ValuePtr first;
  for (auto& [pid, v] : res.decisions) {
    if (!v) {
      valid_ok = false;
      continue;
    }
    if (!first) first = v;
    if (!(*first == *v)) agree = false;
    if (cfg.protocol == Protocol::Vector) {
      if (!vector_valid(sim.crypto(), params, *v)) valid_ok = false;
      auto entries = parse_vector(v->bytes);
      int from_correct = 0;
      if (entries)
        for (auto& e : *entries)
          if (!corrupt.count(e.proposer)) ++from_correct;
      if (from_correct < params.n - 2 * params.t) valid_ok = false;
    } else {
      if (!default_validity(params)(*v)) valid_ok = false;
    }
  }
  rep.safety_ok = agree && valid_ok && redundancy.violation.empty();
  if (rep.failure.empty()) {
    if (!agree)
      rep.failure = "agreement: correct processes decided different values";
    else if (!valid_ok)
      rep.failure = "validity: decided value fails valid()";
    else if (!redundancy.violation.empty())
      rep.failure = redundancy.violation;
  }

  // derived accounting
  const SimMetrics& m = rep.metrics;
  auto payload_bits = [&](MsgKind k, uint64_t overhead) {
    return m.bits_of(k) - m.msgs_of(k) * overhead;
  };
  switch (cfg.protocol) {
    case Protocol::Dare:
    case Protocol::Vector:
      rep.dispersal_msgs = m.msgs_of(MsgKind::Dispersal);
      rep.l_term_bits = payload_bits(MsgKind::Dispersal, kHeaderBits);
      break;
    case Protocol::DareStark:
      rep.dispersal_msgs = m.msgs_of(MsgKind::StarkDispersal);
      rep.l_term_bits =
          payload_bits(MsgKind::StarkDispersal, params.kappa + params.proof_kappa + kHeaderBits) +
          payload_bits(MsgKind::StarkRetrieve, params.kappa + params.proof_kappa + kHeaderBits);
      break;
    case Protocol::Baseline:
      rep.dispersal_msgs = m.msgs_of(MsgKind::BaselinePropose);
      rep.l_term_bits = payload_bits(MsgKind::BaselinePropose, 3 * params.kappa + kHeaderBits) +
                        payload_bits(MsgKind::BaselineStatus, 3 * params.kappa + kHeaderBits);
      break;
  }
  rep.sync_bits = m.bits_of(MsgKind::ViewCompleted) + m.bits_of(MsgKind::EnterView);
  for (auto& [pid, tick] : res.acquire_tick) {
    if (corrupt.count(pid)) continue;
    rep.max_acquire = std::max(rep.max_acquire, tick);
    rep.min_acquire = rep.min_acquire < 0 ? tick : std::min(rep.min_acquire, tick);
    ++rep.acquirers;
  }

  // Disperser invariants, checked on every dispersal-based run: everyone
  // acquires within delta of max(GST, first acquire), and correct processes
  // never send more than 3*X*n dispersal messages after GST.
  if ((cfg.protocol == Protocol::Dare || cfg.protocol == Protocol::Vector) && rep.liveness_ok &&
      rep.safety_ok) {
    int correct_count = params.n - static_cast<int>(corrupt.size());
    if (rep.acquirers != correct_count) {
      rep.safety_ok = false;
      rep.failure = "disperser termination: only " + std::to_string(rep.acquirers) + " of " +
                    std::to_string(correct_count) + " correct processes acquired";
    } else if (rep.max_acquire > std::max(params.gst, rep.min_acquire) + params.delta) {
      rep.safety_ok = false;
      rep.failure = "disperser termination: acquire spread beyond max(GST, tau) + delta";
    } else if (rep.dispersal_msgs > 3ull * params.X * params.n) {
      rep.safety_ok = false;
      rep.failure = "dispersal count " + std::to_string(rep.dispersal_msgs) + " exceeds 3*X*n";
    }
  }
  return rep;
}

std::string csv_header() {
  return "protocol,scenario,n,t,L,kappa,delta,seed,latency,bits_total,bits_by_kind,"
         "dispersal_msg_count,safety_ok,liveness_ok";
}

std::string csv_row(const RunReport& r) {
  std::ostringstream out;
  out << protocol_name(r.cfg.protocol) << ',' << scenario_name(r.cfg.scenario) << ','
      << r.params.n << ',' << r.params.t << ',' << r.params.value_bits << ',' << r.params.kappa
      << ',' << r.params.delta << ',' << r.cfg.seed << ',' << r.metrics.latency << ','
      << r.metrics.bits_total << ',';
  bool sep = false;
  for (auto& [kind, bits] : r.metrics.bits_by_kind) {
    if (sep) out << '|';
    out << kind_name(kind) << ':' << bits;
    sep = true;
  }
  out << ',' << r.dispersal_msgs << ',' << (r.safety_ok ? "true" : "false") << ','
      << (r.liveness_ok ? "true" : "false");
  return out.str();
}

FitResult fit_loglog(const std::vector<std::pair<double, double>>& xy) {
  FitResult fit;
  fit.points = static_cast<int>(xy.size());
  if (xy.size() < 2) return fit;
  double sx = 0, sy = 0;
  std::vector<std::pair<double, double>> ln;
  for (auto& [x, y] : xy) {
    ln.emplace_back(std::log(x), std::log(std::max(y, 1.0)));
    sx += ln.back().first;
    sy += ln.back().second;
  }
  double mx = sx / ln.size(), my = sy / ln.size();
  double num = 0, den = 0;
  for (auto& [x, y] : ln) {
    num += (x - mx) * (y - my);
    den += (x - mx) * (x - mx);
  }
  fit.slope = num / den;
  fit.intercept = my - fit.slope * mx;
  for (auto& [x, y] : ln)
    fit.max_abs_residual = std::max(fit.max_abs_residual, std::abs(y - (fit.intercept + fit.slope * x)));
  return fit;
}

SweepOutcome sweep(const RunConfig& base, const std::string& axis,
                   const std::vector<uint64_t>& values, int reps) {
  if (values.size() < 3) throw UsageError("sweep needs at least 3 axis values");
  if (axis != "n" && axis != "L") throw UsageError("sweep axis must be n or L");
  if (reps < 1) throw UsageError("sweep needs reps >= 1");
  SweepOutcome out;
  std::vector<std::pair<double, double>> points;
  for (uint64_t v : values) {
    RunConfig cfg = base;
    if (axis == "n")
      cfg.n = static_cast<int>(v);
    else
      cfg.L = v;
    double acc = 0;
    for (int r = 0; r < reps; ++r) {
      cfg.seed = base.seed + static_cast<uint64_t>(r);
      RunReport rep = run_one(cfg);
      acc += static_cast<double>(rep.l_term_bits);
      out.rows.push_back(std::move(rep));
    }
    points.emplace_back(static_cast<double>(v), acc / reps);
  }
  out.fit = fit_loglog(points);
  return out;
}

namespace {

class SyncOnlyProcess : public IProtocol {
 public:
  explicit SyncOnlyProcess(const ProtocolParams& p)
      : sync_(make_view_sync_config(p), [](Context&, View) {}) {}
  void on_start(Context& ctx) override { sync_.start(ctx); }
  void on_message(Context& ctx, const Message& m) override { sync_.handle_message(ctx, m); }
  void on_timer(Context& ctx, uint32_t id) override { sync_.handle_timer(ctx, id); }

 private:
  SyncEngine sync_;
};

struct AdvanceLog : RunObserver {
  struct Entry {
    Pid pid;
    View view;
    Tick tick;
  };
  std::vector<Entry> entries;
  void on_advance(Pid p, View v, Tick at) override { entries.push_back({p, v, at}); }
};

class RetrieverOnlyProcess : public IProtocol {
 public:
  RetrieverOnlyProcess(const ProtocolParams& p, ValuePtr input, bool garbage)
      : input_(std::move(input)),
        retr_(p, [](Context& ctx, ValuePtr v) { ctx.note_decide(std::move(v)); },
              Retriever::Options{garbage}) {}
  void on_start(Context& ctx) override { retr_.input(ctx, input_); }
  void on_message(Context& ctx, const Message& m) override { retr_.handle_message(ctx, m); }

 private:
  ValuePtr input_;
  Retriever retr_;
};

} // namespace

SyncPropertyReport run_sync_observer(int n, uint64_t seed, Tick delta) {
  SyncPropertyReport rep;
  RunConfig cfg;
  cfg.n = n;
  cfg.L = std::max<uint64_t>(1024, (max_faults_for(n) + 1) * 16);
  cfg.delta = delta;
  cfg.seed = seed;
  cfg.scenario = Scenario::PreGstChaos;
  ProtocolParams params = make_params(cfg);
  ScenarioSetup setup = make_scenario(cfg, params);
  params.gst = setup.gst;
  const Tick gst = params.gst;
  const Tick cycle = params.view_duration() + 2 * delta;

  Simulator sim(params, std::move(setup.adversary), seed, default_validity(params));
  sim.set_protocol_factory(
      [&params](Pid) { return std::make_unique<SyncOnlyProcess>(params); });
  sim.set_horizon(gst + (params.leader_blocks() + 3) * cycle);
  AdvanceLog log;
  sim.add_observer(&log);
  sim.run();

  auto fail = [&](const std::string& why) {
    rep.ok = false;
    rep.violations.push_back(why);
  };

  // first entry time per (pid, view); V_max = greatest view entered pre-GST
  std::map<Pid, std::vector<std::pair<View, Tick>>> per_pid;
  View v_max = 0;
  for (auto& e : log.entries) {
    per_pid[e.pid].push_back({e.view, e.tick});
    if (e.tick < gst) v_max = std::max(v_max, e.view);
  }
  rep.v_max = v_max;

  View horizon_view = 0;
  for (auto& [pid, seq] : per_pid) {
    View prev = 0;
    int entries_in_window = 0;
    bool stabilized = false;
    for (auto& [v, tick] : seq) {
      if (v <= prev) fail("monotonicity: P" + std::to_string(pid));
      prev = v;
      if (tick >= gst && tick < gst + 3 * delta) ++entries_in_window;
      if (v >= v_max && tick <= gst + 3 * delta) stabilized = true;
    }
    if (!stabilized) fail("stabilization: P" + std::to_string(pid));
    if (entries_in_window > 3)
      fail("limited entrance: P" + std::to_string(pid) + " entered " +
           std::to_string(entries_in_window) + " views");
    horizon_view = horizon_view == 0 ? prev : std::min(horizon_view, prev);
  }

  // overlap >= Delta for every view in (V_max, horizon): a process exits a
  // view when it enters a later one
  auto entry_of = [&](Pid pid, View v) -> std::optional<Tick> {
    for (auto& [vv, tick] : per_pid[pid])
      if (vv == v) return tick;
    return std::nullopt;
  };
  auto exit_of = [&](Pid pid, View v) -> std::optional<Tick> {
    for (auto& [vv, tick] : per_pid[pid])
      if (vv > v) return tick;
    return std::nullopt;
  };
  for (View v = v_max + 1; v < horizon_view; ++v) {
    Tick last_entry = -1, first_exit = -1;
    bool all_present = true;
    for (auto& [pid, seq] : per_pid) {
      auto en = entry_of(pid, v);
      auto ex = exit_of(pid, v);
      if (!en || !ex) {
        all_present = false;
        break;
      }
      last_entry = std::max(last_entry, *en);
      first_exit = first_exit < 0 ? *ex : std::min(first_exit, *ex);
    }
    if (!all_present) {
      fail("overlap: view " + std::to_string(v) + " skipped by some process");
      continue;
    }
    if (first_exit - last_entry < params.overlap_delta()) {
      fail("overlap: view " + std::to_string(v) + " overlap " +
           std::to_string(first_exit - last_entry) + " < Delta");
    } else if (rep.v_sync == 0) {
      rep.v_sync = v; // all processes correct: first full overlap past V_max
    }
  }
  if (rep.v_sync == 0) {
    fail("no synchronization view observed before horizon");
  } else if (rep.v_sync - v_max > static_cast<View>(params.leader_blocks())) {
    fail("limited synchronization view: V*_sync - V_max = " +
         std::to_string(rep.v_sync - v_max));
  }
  return rep;
}

SimpleReport run_retriever_boundary(int n, uint64_t seed, Tick delta, uint64_t L) {
  SimpleReport rep;
  RunConfig cfg;
  cfg.n = n;
  cfg.L = L;
  cfg.delta = delta;
  cfg.seed = seed;
  ProtocolParams params = make_params(cfg);
  params.gst = 0;

  AdversaryPolicy adv;
  for (Pid q = n - params.t + 1; q <= n; ++q) adv.corrupt.insert(q);
  ValuePtr v = make_proposal_value(params, 1, seed);
  ValuePtr junk = make_proposal_value(params, 77, mix(seed) ^ 0x5A5A);
  adv.byzantine = [&params, junk](Pid) {
    return std::make_unique<RetrieverOnlyProcess>(params, junk, /*garbage=*/true);
  };

  Simulator sim(params, std::move(adv), seed, default_validity(params));
  sim.set_protocol_factory([&params, v](Pid p) {
    ValuePtr input = p <= params.t + 1 ? v : nullptr; // exactly t+1 correct inputs
    return std::make_unique<RetrieverOnlyProcess>(params, input, false);
  });
  RunResult res = sim.run();
  if (!res.all_decided) {
    rep.ok = false;
    rep.detail = "some correct process produced no output";
    return rep;
  }
  for (auto& [pid, out] : res.decisions) {
    if (!out || !(*out == *v)) {
      rep.ok = false;
      rep.detail = "P" + std::to_string(pid) + " output differs from the held value";
      return rep;
    }
  }
  return rep;
}

} // namespace darelab
