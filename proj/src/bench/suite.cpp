#include "gep/bench/suite.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstring>
#include <fstream>
#include <set>
#include <sstream>
#include <thread>

#include "json.hpp"

namespace gep {

namespace {

using json = nlohmann::ordered_json;

const std::vector<double> kGridKappaB = {3, 5, 8, 10, 13, 30, 40, 50, 80, 100};

MethodSpec plain(Method m) {
  MethodSpec s;
  s.method = m;
  return s;
}

SuiteConfig grid(std::initializer_list<std::size_t> sizes, std::size_t trials) {
  SuiteConfig s;
  for (std::size_t n : sizes) {
    for (double kb : kGridKappaB) s.cells.push_back({n, kb});
  }
  s.trials = trials;
  s.methods = {plain(Method::power), plain(Method::split_merge)};
  return s;
}

void reject_unknown_keys(const json& j, const std::set<std::string>& allowed, const std::string& where) {
  for (const auto& [key, _] : j.items()) {
    if (!allowed.count(key)) throw ParseError("unknown key '" + key + "' in " + where);
  }
}

MethodSpec parse_method_spec(const json& j) {
  MethodSpec m;
  if (j.is_string()) {
    m.method = parse_method(j.get<std::string>());
    return m;
  }
  if (!j.is_object()) throw ParseError("method entry must be a string or an object");
  reject_unknown_keys(j, {"method", "linsolve", "pcg_cap", "precond", "label"}, "method entry");
  m.method = parse_method(j.at("method").get<std::string>());
  if (j.contains("linsolve")) {
    const auto mode = j["linsolve"].get<std::string>();
    if (mode == "cholesky" || mode == "exact") {
      m.linsolve = SolveMode::exact;
    } else if (mode == "pcg") {
      m.linsolve = SolveMode::pcg;
    } else {
      throw ParseError("unknown linsolve '" + mode + "'");
    }
  }
  m.pcg_cap = j.value("pcg_cap", m.pcg_cap);
  if (j.contains("precond")) m.precond = parse_preconditioner_kind(j["precond"].get<std::string>());
  m.label = j.value("label", std::string{});
  return m;
}

std::string status_name(Status s) { return std::string(to_string(s)); }

RunRecord run_one(const MatrixPair& pair, const SolverConfig& base, const Vector& x0, std::size_t cell,
                  std::size_t trial, const std::string& label, bool keep_trace) {
  RunRecord r;
  r.cell = cell;
  r.trial = trial;
  r.method = label;
  r.x0_fingerprint = vector_fingerprint(x0);
  const auto t0 = std::chrono::steady_clock::now();
  try {
    const SolveTrace t = run_solver(pair, base, x0);
    r.status = status_name(t.status);
    r.iterations = t.iterations;
    r.matvecs = t.counters.matvecs;
    r.solves = t.counters.solves;
    r.flops = t.counters.flops;
    r.lambda = t.lambda;
    if (keep_trace) {
      std::ostringstream os;
      t.write_csv(os, false);
      r.trace_csv = os.str();
    }
  } catch (const std::exception& e) {
    r.status = "error";
    r.error = e.what();
  }
  r.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

MethodStats aggregate(const std::string& label, const std::vector<const RunRecord*>& runs) {
  MethodStats s;
  s.method = label;
  s.trials = runs.size();
  std::vector<double> it, mv, sv, fl, wt;
  for (const RunRecord* r : runs) {
    if (!r->converged()) continue;
    ++s.successes;
    it.push_back(static_cast<double>(r->iterations));
    mv.push_back(static_cast<double>(r->matvecs));
    sv.push_back(static_cast<double>(r->solves));
    fl.push_back(static_cast<double>(r->flops));
    wt.push_back(r->wall_seconds);
  }
  s.success_rate = s.trials ? static_cast<double>(s.successes) / static_cast<double>(s.trials) : 0.0;
  s.iterations = summarize(std::move(it));
  s.matvecs = summarize(std::move(mv));
  s.solves = summarize(std::move(sv));
  s.flops = summarize(std::move(fl));
  s.wall_seconds = summarize(std::move(wt));
  return s;
}

json to_json(const Summary& s) {
  return {{"count", s.count}, {"median", s.median}, {"mean", s.mean}, {"std", s.stddev}};
}

Summary summary_from(const json& j) {
  return {j.at("count").get<std::size_t>(), j.at("median").get<double>(), j.at("mean").get<double>(),
          j.at("std").get<double>()};
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

std::string MethodSpec::name() const { return label.empty() ? std::string(to_string(method)) : label; }

SuiteConfig SuiteConfig::full_grid() { return grid({256, 512, 1024}, 100); }

SuiteConfig SuiteConfig::ci_grid() { return grid({64, 128}, 20); }

SuiteConfig parse_suite(std::istream& in) {
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw ParseError(std::string("suite JSON: ") + e.what());
  }
  if (!j.is_object()) throw ParseError("suite JSON must be an object");
  reject_unknown_keys(j,
                      {"cells", "n", "kappa_b", "kappa_a", "trials", "methods", "tolerance",
                       "max_iterations", "seed", "threads", "keep_traces", "out_dir"},
                      "suite");
  SuiteConfig s;
  try {
    if (j.contains("cells")) {
      for (const json& c : j["cells"]) {
        reject_unknown_keys(c, {"n", "kappa_b"}, "cell");
        s.cells.push_back({c.at("n").get<std::size_t>(), c.at("kappa_b").get<double>()});
      }
    }
    if (j.contains("n") || j.contains("kappa_b")) {
      // Grid form: every n paired with every kappa_b.
      for (std::size_t n : j.at("n").get<std::vector<std::size_t>>()) {
        for (double kb : j.at("kappa_b").get<std::vector<double>>()) s.cells.push_back({n, kb});
      }
    }
    s.kappa_a = j.value("kappa_a", s.kappa_a);
    s.trials = j.value("trials", s.trials);
    if (j.contains("methods")) {
      for (const json& m : j["methods"]) s.methods.push_back(parse_method_spec(m));
    } else {
      s.methods = {plain(Method::power), plain(Method::split_merge)};
    }
    s.tolerance = j.value("tolerance", s.tolerance);
    s.max_iterations = j.value("max_iterations", s.max_iterations);
    s.seed = j.value("seed", s.seed);
    s.threads = j.value("threads", s.threads);
    s.keep_traces = j.value("keep_traces", s.keep_traces);
    if (j.contains("out_dir")) s.out_dir = j["out_dir"].get<std::string>();
  } catch (const json::exception& e) {
    throw ParseError(std::string("suite JSON: ") + e.what());
  }
  if (s.cells.empty()) throw ParseError("suite has no cells");
  if (s.trials < 1) throw ParseError("trials must be >= 1");
  for (const SuiteCell& c : s.cells) {
    if (c.n < 1 || !(c.kappa_b >= 1.0)) throw ParseError("cell needs n >= 1 and kappa_b >= 1");
  }
  if (!(s.kappa_a >= 1.0)) throw ParseError("kappa_a must be >= 1");
  std::set<std::string> labels;
  for (const MethodSpec& m : s.methods) {
    if (!labels.insert(m.name()).second) throw ParseError("duplicate method label '" + m.name() + "'");
  }
  return s;
}

SuiteConfig load_suite(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  return parse_suite(in);
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t vector_fingerprint(ConstSpan v) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (double d : v) {
    unsigned char bytes[sizeof(double)];
    std::memcpy(bytes, &d, sizeof d);
    for (unsigned char b : bytes) {
      h ^= b;
      h *= 0x100000001b3ULL;
    }
  }
  return h;
}

Summary summarize(std::vector<double> values) {
  Summary s;
  s.count = values.size();
  if (values.empty()) return s;
  std::sort(values.begin(), values.end());
  const std::size_t m = values.size() / 2;
  s.median = values.size() % 2 ? values[m] : 0.5 * (values[m - 1] + values[m]);
  double sum = 0.0;
  for (double v : values) sum += v;
  s.mean = sum / static_cast<double>(values.size());
  if (values.size() > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - s.mean) * (v - s.mean);
    s.stddev = std::sqrt(ss / static_cast<double>(values.size() - 1));
  }
  return s;
}

BenchmarkReport run_suite(const SuiteConfig& suite) {
  BenchmarkReport report;
  const std::size_t n_methods = suite.methods.size();
  for (std::size_t c = 0; c < suite.cells.size(); ++c) {
    const SuiteCell& cell = suite.cells[c];
    CellReport cr;
    cr.n = cell.n;
    cr.kappa_a = suite.kappa_a;
    cr.kappa_b = cell.kappa_b;
    cr.pair_seed = splitmix64(suite.seed ^ c);

    const MatrixPair pair = gen_synthetic({cell.n, suite.kappa_a, cell.kappa_b, cr.pair_seed});
    const ReferenceSolution ref = reference_solution(pair);
    cr.lambda1 = ref.lambda;

    std::vector<SolverConfig> configs(n_methods);
    const auto exact = std::make_shared<const LinearSolver>(LinearSolver::exact(pair.b()));
    std::shared_ptr<const Preconditioner> cholesky_precond;
    for (std::size_t m = 0; m < n_methods; ++m) {
      const MethodSpec& spec = suite.methods[m];
      SolverConfig& cfg = configs[m];
      cfg.method = spec.method;
      cfg.tolerance = suite.tolerance;
      cfg.max_iterations = suite.max_iterations;
      cfg.reference = ref.u;
      if (spec.linsolve == SolveMode::pcg) {
        PcgOptions opt;
        opt.max_iterations = spec.pcg_cap;
        cfg.linear_solver = std::make_shared<const LinearSolver>(LinearSolver::pcg(pair.b(), opt));
      } else {
        cfg.linear_solver = exact;
      }
      if (spec.method == Method::pmd) {
        cfg.preconditioner =
            std::make_shared<const Preconditioner>(build_preconditioner(pair.b(), spec.precond));
      }
    }

    std::vector<RunRecord> runs(suite.trials * n_methods);
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
      for (std::size_t t = next++; t < suite.trials; t = next++) {
        const std::uint64_t trial_seed = splitmix64(cr.pair_seed ^ splitmix64(t + 1));
        std::mt19937_64 rng(trial_seed);
        const Vector x0 = gaussian_vector(cell.n, rng);
        for (std::size_t m = 0; m < n_methods; ++m) {
          SolverConfig cfg = configs[m];
          cfg.seed = trial_seed;
          runs[t * n_methods + m] =
              run_one(pair, cfg, x0, c, t, suite.methods[m].name(), suite.keep_traces);
        }
      }
    };
    const std::size_t threads = std::clamp<std::size_t>(suite.threads, 1, suite.trials);
    if (threads == 1) {
      worker();
    } else {
      std::vector<std::jthread> pool;
      for (std::size_t i = 0; i < threads; ++i) pool.emplace_back(worker);
    }

    std::vector<std::vector<const RunRecord*>> by_method(n_methods);
    for (std::size_t t = 0; t < suite.trials; ++t) {
      for (std::size_t m = 0; m < n_methods; ++m) by_method[m].push_back(&runs[t * n_methods + m]);
    }
    for (std::size_t m = 0; m < n_methods; ++m) {
      cr.methods.push_back(aggregate(suite.methods[m].name(), by_method[m]));
    }

    const auto find = [&](Method method) -> std::ptrdiff_t {
      for (std::size_t m = 0; m < n_methods; ++m) {
        const MethodSpec& s = suite.methods[m];
        if (s.method == method && s.label.empty() && s.linsolve == SolveMode::exact) {
          return static_cast<std::ptrdiff_t>(m);
        }
      }
      return -1;
    };
    const std::ptrdiff_t ip = find(Method::power);
    const std::ptrdiff_t is = find(Method::split_merge);
    if (ip >= 0 && is >= 0) {
      for (std::size_t t = 0; t < suite.trials; ++t) {
        const RunRecord& p = runs[t * n_methods + static_cast<std::size_t>(ip)];
        const RunRecord& s = runs[t * n_methods + static_cast<std::size_t>(is)];
        if (p.converged() && s.converged()) {
          cr.speedups.push_back(static_cast<double>(p.iterations) /
                                static_cast<double>(std::max<std::size_t>(s.iterations, 1)));
        }
      }
      cr.speedup = summarize(cr.speedups);
    }

    report.cells.push_back(std::move(cr));
    for (RunRecord& r : runs) report.runs.push_back(std::move(r));
  }
  return report;
}

const std::vector<std::string>& report_statistics() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> v = {"trials", "successes", "success_rate"};
    for (const char* q : {"iterations", "matvecs", "solves", "flops", "wall_seconds"}) {
      for (const char* s : {"median", "mean", "std"}) v.push_back(std::string(q) + "_" + s);
    }
    return v;
  }();
  return names;
}

void write_report_csv(const BenchmarkReport& report, std::ostream& out) {
  out << kReportCsvHeader << '\n';
  for (const CellReport& c : report.cells) {
    for (const MethodStats& m : c.methods) {
      const std::vector<double> values = {
          static_cast<double>(m.trials), static_cast<double>(m.successes), m.success_rate,
          m.iterations.median, m.iterations.mean, m.iterations.stddev,
          m.matvecs.median, m.matvecs.mean, m.matvecs.stddev,
          m.solves.median, m.solves.mean, m.solves.stddev,
          m.flops.median, m.flops.mean, m.flops.stddev,
          m.wall_seconds.median, m.wall_seconds.mean, m.wall_seconds.stddev};
      const auto& names = report_statistics();
      for (std::size_t i = 0; i < names.size(); ++i) {
        out << c.n << ',' << format_double(c.kappa_a) << ',' << format_double(c.kappa_b) << ','
            << m.method << ',' << names[i] << ',' << format_double(values[i]) << '\n';
      }
    }
  }
}

void write_report_json(const BenchmarkReport& report, std::ostream& out) {
  json j;
  j["schema_version"] = report.schema_version;
  json cells = json::array();
  for (const CellReport& c : report.cells) {
    json jc = {{"n", c.n},
               {"kappa_a", c.kappa_a},
               {"kappa_b", c.kappa_b},
               {"pair_seed", c.pair_seed},
               {"lambda1", c.lambda1}};
    json methods = json::array();
    for (const MethodStats& m : c.methods) {
      methods.push_back({{"method", m.method},
                         {"trials", m.trials},
                         {"successes", m.successes},
                         {"success_rate", m.success_rate},
                         {"iterations", to_json(m.iterations)},
                         {"matvecs", to_json(m.matvecs)},
                         {"solves", to_json(m.solves)},
                         {"flops", to_json(m.flops)},
                         {"wall_seconds", to_json(m.wall_seconds)}});
    }
    jc["methods"] = std::move(methods);
    jc["speedups"] = c.speedups;
    jc["speedup"] = to_json(c.speedup);
    cells.push_back(std::move(jc));
  }
  j["cells"] = std::move(cells);
  json runs = json::array();
  for (const RunRecord& r : report.runs) {
    json jr = {{"cell", r.cell},
               {"trial", r.trial},
               {"method", r.method},
               {"status", r.status},
               {"iterations", r.iterations},
               {"matvecs", r.matvecs},
               {"solves", r.solves},
               {"flops", r.flops},
               {"lambda", r.lambda},
               {"wall_seconds", r.wall_seconds},
               {"x0_fingerprint", r.x0_fingerprint}};
    if (!r.error.empty()) jr["error"] = r.error;
    if (!r.trace_csv.empty()) jr["trace_csv"] = r.trace_csv;
    runs.push_back(std::move(jr));
  }
  j["runs"] = std::move(runs);
  out << j.dump(2) << '\n';
}

BenchmarkReport parse_report_json(std::istream& in) {
  BenchmarkReport report;
  try {
    const json j = json::parse(in);
    report.schema_version = j.at("schema_version").get<int>();
    if (report.schema_version != kReportSchemaVersion) {
      throw ParseError("unsupported report schema_version " + std::to_string(report.schema_version));
    }
    for (const json& jc : j.at("cells")) {
      CellReport c;
      c.n = jc.at("n").get<std::size_t>();
      c.kappa_a = jc.at("kappa_a").get<double>();
      c.kappa_b = jc.at("kappa_b").get<double>();
      c.pair_seed = jc.at("pair_seed").get<std::uint64_t>();
      c.lambda1 = jc.at("lambda1").get<double>();
      for (const json& jm : jc.at("methods")) {
        MethodStats m;
        m.method = jm.at("method").get<std::string>();
        m.trials = jm.at("trials").get<std::size_t>();
        m.successes = jm.at("successes").get<std::size_t>();
        m.success_rate = jm.at("success_rate").get<double>();
        m.iterations = summary_from(jm.at("iterations"));
        m.matvecs = summary_from(jm.at("matvecs"));
        m.solves = summary_from(jm.at("solves"));
        m.flops = summary_from(jm.at("flops"));
        m.wall_seconds = summary_from(jm.at("wall_seconds"));
        c.methods.push_back(std::move(m));
      }
      c.speedups = jc.at("speedups").get<std::vector<double>>();
      c.speedup = summary_from(jc.at("speedup"));
      report.cells.push_back(std::move(c));
    }
    for (const json& jr : j.at("runs")) {
      RunRecord r;
      r.cell = jr.at("cell").get<std::size_t>();
      r.trial = jr.at("trial").get<std::size_t>();
      r.method = jr.at("method").get<std::string>();
      r.status = jr.at("status").get<std::string>();
      r.error = jr.value("error", std::string{});
      r.iterations = jr.at("iterations").get<std::size_t>();
      r.matvecs = jr.at("matvecs").get<std::uint64_t>();
      r.solves = jr.at("solves").get<std::uint64_t>();
      r.flops = jr.at("flops").get<std::uint64_t>();
      r.lambda = jr.at("lambda").get<double>();
      r.wall_seconds = jr.at("wall_seconds").get<double>();
      r.x0_fingerprint = jr.at("x0_fingerprint").get<std::uint64_t>();
      r.trace_csv = jr.value("trace_csv", std::string{});
      report.runs.push_back(std::move(r));
    }
  } catch (const json::exception& e) {
    throw ParseError(std::string("report JSON: ") + e.what());
  }
  return report;
}

BenchmarkReport read_report_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  return parse_report_json(in);
}

void export_report(const BenchmarkReport& report, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
  const auto write = [](const std::filesystem::path& p, auto&& body) {
    std::ofstream out(p);
    if (!out) throw IoError("cannot write " + p.string());
    body(out);
    if (!out) throw IoError("write failed for " + p.string());
  };
  write(dir / "report.csv", [&](std::ostream& o) { write_report_csv(report, o); });
  write(dir / "report.json", [&](std::ostream& o) { write_report_json(report, o); });
  bool any_trace = false;
  for (const RunRecord& r : report.runs) any_trace = any_trace || !r.trace_csv.empty();
  if (!any_trace) return;
  const std::filesystem::path traces = dir / "traces";
  std::filesystem::create_directories(traces, ec);
  if (ec) throw IoError("cannot create " + traces.string() + ": " + ec.message());
  for (const RunRecord& r : report.runs) {
    if (r.trace_csv.empty()) continue;
    const std::string name =
        "cell" + std::to_string(r.cell) + "_trial" + std::to_string(r.trial) + "_" + r.method + ".csv";
    write(traces / name, [&](std::ostream& o) { o << r.trace_csv; });
  }
}

}  // namespace gep
