#include "leapforge/runner.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "leapforge/config.hpp"
#include "leapforge/node.hpp"

namespace leapforge {

RunArtifacts collect_artifacts(const Simulator& sim) {
  RunArtifacts a;
  a.trace_jsonl = to_jsonl(sim.trace());
  a.metrics_csv = compute_metrics(sim.trace()).to_csv();
  std::ostringstream audit;
  audit << audit_csv_header() << '\n';
  for (const auto& line : sim.registry().log()) audit << to_csv_row(line) << '\n';
  a.audit_csv = audit.str();
  return a;
}

double pairwise_success_fraction(const Simulator& sim) {
  const auto& positions = sim.scenario().positions;
  const double range = sim.scenario().radio.range_m;
  std::map<NodeId, NodeKeyStore> at_erase;
  for (NodeId id = 1; id <= positions.size(); ++id) {
    const auto erased = sim.erase_time(id);
    if (!erased) continue;
    at_erase.emplace(id, NodeKeyStore::parse_dump(sim.capture_node(id, *erased)));
  }
  std::size_t pairs = 0;
  std::size_t agreed = 0;
  for (NodeId u = 1; u <= positions.size(); ++u) {
    for (NodeId v = u + 1; v <= positions.size(); ++v) {
      if (distance(positions[u - 1], positions[v - 1]) > range) continue;
      ++pairs;
      const auto su = at_erase.find(u);
      const auto sv = at_erase.find(v);
      if (su == at_erase.end() || sv == at_erase.end()) continue;
      const auto& ku = su->second.pairwise_keys();
      const auto& kv = sv->second.pairwise_keys();
      const auto a = ku.find(v);
      const auto b = kv.find(u);
      if (a != ku.end() && b != kv.end() && a->second.bytes() == b->second.bytes()) ++agreed;
    }
  }
  return pairs == 0 ? 1.0 : static_cast<double>(agreed) / static_cast<double>(pairs);
}

std::filesystem::path resolve_out_dir(const std::filesystem::path& cli_value) {
  if (const char* env = std::getenv("LEAPFORGE_OUT"); env && *env) return env;
  return cli_value;
}

void write_file_atomically(const std::filesystem::path& path, const std::string& contents) {
  std::filesystem::create_directories(path.parent_path());
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out << contents;
    out.flush();
    if (!out) throw std::runtime_error("short write to " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

namespace {

void print_invalid(std::ostream& err, const ScenarioInvalid& e) {
  err << "invalid scenario:\n";
  for (const auto& r : e.reasons()) err << "  " << r << '\n';
}

}  // namespace

int run_command(const RunOptions& opts, std::ostream& out, std::ostream& err) {
  try {
    Scenario scenario = load_scenario(opts.config);
    if (opts.seed) scenario.seed = *opts.seed;
    Simulator sim(scenario);
    sim.run();
    const RunArtifacts art = collect_artifacts(sim);
    const auto dir = resolve_out_dir(opts.out_dir) / scenario.name / std::to_string(scenario.seed);
    write_file_atomically(dir / "trace.jsonl", art.trace_jsonl);
    write_file_atomically(dir / "metrics.csv", art.metrics_csv);
    write_file_atomically(dir / "audit.csv", art.audit_csv);
    out << "run " << scenario.name << " seed " << scenario.seed << ": " << sim.trace().events.size()
        << " events, " << sim.registry().audits_started() << " audit rounds\n";
    out << "wrote " << dir.string() << '\n';
    return kExitOk;
  } catch (const ConfigError& e) {
    err << e.what() << '\n';
    return kExitInvalidScenario;
  } catch (const ScenarioInvalid& e) {
    print_invalid(err, e);
    return kExitInvalidScenario;
  } catch (const InvariantViolation& e) {
    err << "invariant violated: " << e.what() << '\n';
    return kExitInvariant;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitFailure;
  }
}

std::string sweep_csv_header() {
  return "node_count,repeat,seed,pairwise_success_fraction,mean_establishment_ms,"
         "max_establishment_ms,messages,bytes,status";
}

std::string to_csv_row(const SweepRow& r) {
  std::ostringstream os;
  std::string status = r.status;
  std::replace(status.begin(), status.end(), ',', ';');
  std::replace(status.begin(), status.end(), '\n', ' ');
  os << r.node_count << ',' << r.repeat << ',' << r.seed << ',' << format_double(r.pairwise_success_fraction)
     << ',' << format_double(r.mean_establishment_ms) << ',' << format_double(r.max_establishment_ms) << ','
     << r.messages << ',' << r.bytes << ',' << status;
  return os.str();
}

namespace {

SweepRow sweep_one(const Scenario& base, std::size_t count, std::uint32_t repeat) {
  SweepRow row;
  row.node_count = count;
  row.repeat = repeat;
  row.seed = derive_seed(base.seed, {count, repeat});
  Scenario s = base;
  s.node_count = count;
  s.seed = row.seed;
  if (s.positions.size() != count) s.positions.clear();
  try {
    Simulator sim(s);
    sim.run();
    row.pairwise_success_fraction = pairwise_success_fraction(sim);
    const MetricsReport m = compute_metrics(sim.trace());
    double sum = 0;
    std::size_t n = 0;
    for (NodeId id = 1; id <= count; ++id) {
      const auto done = m.find("pairwise_complete_ms", std::to_string(id));
      const auto boot = sim.boot_time(id);
      if (!done || !boot) continue;
      const double t = std::stod(*done) - to_ms(*boot);
      sum += t;
      row.max_establishment_ms = std::max(row.max_establishment_ms, t);
      ++n;
    }
    row.mean_establishment_ms = n == 0 ? 0.0 : std::round(sum / static_cast<double>(n) * 1000.0) / 1000.0;
    row.messages = std::stoull(m.find("messages", "total").value_or("0"));
    row.bytes = std::stoull(m.find("bytes", "total").value_or("0"));
  } catch (const ScenarioInvalid& e) {
    row.status = "invalid: " + (e.reasons().empty() ? std::string{} : e.reasons().front());
    row.exit_code = kExitInvalidScenario;
  } catch (const InvariantViolation& e) {
    row.status = std::string("invariant: ") + e.what();
    row.exit_code = kExitInvariant;
  } catch (const std::exception& e) {
    row.status = std::string("error: ") + e.what();
    row.exit_code = kExitFailure;
  }
  return row;
}

}  // namespace

std::vector<SweepRow> sweep(const Scenario& base, const std::vector<std::size_t>& counts,
                            std::uint32_t repeats) {
  std::vector<SweepRow> rows;
  for (std::size_t count : counts) {
    for (std::uint32_t r = 0; r < repeats; ++r) rows.push_back(sweep_one(base, count, r));
  }
  return rows;
}

int sweep_command(const SweepOptions& opts, std::ostream& out, std::ostream& err) {
  if (opts.repeats < 1) {
    err << "repeats: must be at least 1\n";
    return kExitInvalidScenario;
  }
  if (opts.counts.empty()) {
    err << "counts: at least one node count is required\n";
    return kExitInvalidScenario;
  }
  try {
    Scenario base = load_scenario(opts.config);
    if (opts.seed) base.seed = *opts.seed;
    const auto rows = sweep(base, opts.counts, opts.repeats);
    std::ostringstream csv;
    csv << sweep_csv_header() << '\n';
    int worst = kExitOk;
    for (const auto& row : rows) {
      csv << to_csv_row(row) << '\n';
      if (row.exit_code != kExitOk) {
        err << "n=" << row.node_count << " repeat " << row.repeat << ": " << row.status << '\n';
        worst = std::max(worst, row.exit_code);
      }
    }
    const auto path = resolve_out_dir(opts.out_dir) / base.name / "sweep.csv";
    write_file_atomically(path, csv.str());
    out << "sweep " << base.name << ": " << rows.size() << " runs\nwrote " << path.string() << '\n';
    return worst;
  } catch (const ConfigError& e) {
    err << e.what() << '\n';
    return kExitInvalidScenario;
  } catch (const ScenarioInvalid& e) {
    print_invalid(err, e);
    return kExitInvalidScenario;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitFailure;
  }
}

// ---------------------------------------------------------------------------

namespace {

struct CmacExample {
  const char* name;
  std::size_t length;
  const char* tag;
};

constexpr const char* kRfcKey = "2b7e151628aed2a6abf7158809cf4f3c";
constexpr const char* kRfcMessage =
    "6bc1bee22e409f96e93d7e117393172aae2d8a571e03ac9c9eb76fac45af8e51"
    "30c81c46a35ce411e5fbc1191a0a52eff69f2445df4f9b17ad2b417be66c3710";
constexpr CmacExample kRfcExamples[] = {
    {"cmac example 1 (0 bytes)", 0, "bb1d6929e95937287fa37d129b756746"},
    {"cmac example 2 (16 bytes)", 16, "070a16b46b4d4144f79bdd9dd04a287c"},
    {"cmac example 3 (40 bytes)", 40, "dfa66747de9ae63030ca32611497c827"},
    {"cmac example 4 (64 bytes)", 64, "51f0bebf7e3b9d92fc49741779363cfe"},
};

constexpr int kWrapTrials = 1000;

}  // namespace

int verify_vectors(std::ostream& out, const CmacFn& cmac) {
  int failures = 0;
  auto report = [&](const std::string& name, bool ok, const std::string& note = {}) {
    out << (ok ? "PASS " : "FAIL ") << name;
    if (!note.empty()) out << ": " << note;
    out << '\n';
    if (!ok) ++failures;
  };

  const Block16 key = array_from_hex<16>(kRfcKey);
  const Bytes message = from_hex(kRfcMessage);
  for (const auto& ex : kRfcExamples) {
    const Block16 got = cmac(key, ByteView(message.data(), ex.length));
    const std::string got_hex = to_hex(got);
    report(ex.name, got_hex == ex.tag, got_hex == ex.tag ? "" : "got " + got_hex + ", expected " + ex.tag);
  }

  // Key wrapping: round trip, then one flipped bit must be rejected.
  Rng rng(0x5eed);
  int wrap_bad = 0;
  for (int i = 0; i < kWrapTrials; ++i) {
    const SymKey kek(random_bytes<16>(rng), KeyRole::Master);
    const Block16 payload = random_bytes<16>(rng);
    const auto ctx = random_bytes<8>(rng);
    WrappedBlock blob = wrap_block(kek, payload, ctx);
    if (unwrap_block(kek, blob, ctx) != payload) {
      ++wrap_bad;
      continue;
    }
    const std::size_t bit = std::uniform_int_distribution<std::size_t>(0, blob.size() * 8 - 1)(rng);
    blob[bit / 8] ^= static_cast<std::uint8_t>(1u << (bit % 8));
    try {
      (void)unwrap_block(kek, blob, ctx);
      ++wrap_bad;
    } catch (const AuthenticationFailure&) {
    }
  }
  report("key wrap round trip and tamper rejection (" + std::to_string(kWrapTrials) + " trials)",
         wrap_bad == 0, wrap_bad == 0 ? "" : std::to_string(wrap_bad) + " bad");

  // Hash chains: every element verifies at its own index only.
  int chain_bad = 0;
  for (std::uint32_t len = 1; len <= 64; ++len) {
    const HashChain chain = HashChain::build(random_bytes<16>(rng), len);
    for (std::uint32_t i = 1; i <= len; ++i) {
      if (!chain_verify(chain.element(i), chain.commitment(), i)) ++chain_bad;
      if (i < len && chain_verify(chain.element(i), chain.commitment(), i + 1)) ++chain_bad;
    }
  }
  report("hash chain verification (lengths 1..64)", chain_bad == 0,
         chain_bad == 0 ? "" : std::to_string(chain_bad) + " bad");

  out << (failures == 0 ? "all vectors passed" : std::to_string(failures) + " check(s) failed") << '\n';
  return failures == 0 ? kExitOk : kExitFailure;
}

}  // namespace leapforge
