#pragma once

#include "marginrec/core.hpp"
#include "marginrec/instances.hpp"
#include "marginrec/io.hpp"
#include "marginrec/margins.hpp"
#include "marginrec/oracle.hpp"
#include "marginrec/recovery/cheatr.hpp"
#include "marginrec/recovery/mrecur.hpp"
#include "marginrec/sampling/random.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <mutex>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

namespace marginrec {

// Exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUnsatisfied = 1;
inline constexpr int kExitUsage = 2;

namespace cli {

inline double param_or(const std::map<std::string, double>& p, const std::string& key, double fallback) {
  auto it = p.find(key);
  return it == p.end() ? fallback : it->second;
}

inline double param_required(const std::map<std::string, double>& p, const std::string& key,
                             const std::string& generator) {
  auto it = p.find(key);
  if (it == p.end()) throw InvalidInput("generator '" + generator + "' needs --" + key);
  return it->second;
}

inline std::size_t as_count(double v, const char* what) {
  if (!(v >= 0.0) || v != std::floor(v) || v > 1e12)
    throw InvalidInput(std::string(what) + " must be a non-negative integer");
  return static_cast<std::size_t>(v);
}

inline Instance make_instance(const std::string& generator, const std::map<std::string, double>& p,
                              std::uint64_t seed) {
  RandomSource rng(seed);
  if (generator == "convex-margin") {
    return gen_convex_margin(as_count(param_required(p, "m", generator), "m"),
                             static_cast<int>(as_count(param_required(p, "k", generator), "k")),
                             as_count(param_required(p, "n", generator), "n"),
                             param_required(p, "gamma", generator), rng, param_or(p, "box", 0.0));
  }
  if (generator == "packing") {
    double singleton = param_or(p, "singleton", -1.0);
    return gen_packing_instance(as_count(param_required(p, "size", generator), "size"),
                                param_required(p, "gamma", generator), rng,
                                singleton < 0 ? -1L : static_cast<long>(as_count(singleton, "singleton")));
  }
  if (generator == "svm-vs-ova") {
    return gen_svm_vs_ova(param_or(p, "eta", 0.01), param_or(p, "a", 1.0), rng);
  }
  if (generator == "sphere-coslice") {
    return gen_sphere_coslice(as_count(param_required(p, "m", generator), "m"),
                              as_count(param_required(p, "size", generator), "size"), rng,
                              param_or(p, "r_prime", 0.01));
  }
  if (generator == "center-proximity") {
    return gen_center_proximity(as_count(param_required(p, "m", generator), "m"),
                                static_cast<int>(as_count(param_required(p, "k", generator), "k")),
                                as_count(param_required(p, "n", generator), "n"),
                                param_required(p, "alpha", generator), rng);
  }
  throw InvalidInput("unknown generator '" + generator + "'");
}

// Everything a recovery run needs besides the instance.
struct RunOptions {
  std::string algorithm = "cheatr";
  std::uint64_t seed = 0;
  double gamma = 0.0;  // 0: take the instance's gamma parameter
  std::size_t s = 0;
  double c_s = 10.0;
  std::string sample_rule = "desk";
  std::size_t walk_steps = 0;
  std::size_t walk_samples = 0;
  std::string walk_rule = "desk";
  std::size_t round_cap = 0;
  double sample_multiplier = 2.0;
  std::size_t m_override = 0;
  std::string interface = "label";
};

inline double resolve_gamma(const RunOptions& o, const Instance& inst) {
  if (o.gamma > 0.0) return o.gamma;
  auto it = inst.params.find("gamma");
  if (it != inst.params.end() && it->second > 0.0) return it->second;
  throw InvalidInput("no --gamma given and the instance has no gamma parameter");
}

inline ResultRow run_recovery(const Instance& inst, const RunOptions& o) {
  const double gamma = resolve_gamma(o, inst);
  if (o.interface != "label" && o.interface != "scq")
    throw InvalidInput("--interface must be 'label' or 'scq'");
  LabelOracle oracle(inst.truth);
  RandomSource rng(o.seed);
  RecoveryReport report;
  std::ostringstream config;
  const auto t0 = std::chrono::steady_clock::now();
  if (o.algorithm == "cheatr") {
    CheatrConfig cfg;
    cfg.gamma = gamma;
    cfg.s = o.s;
    cfg.c_s = o.c_s;
    if (o.sample_rule == "paper") cfg.sample_rule = CheatrConfig::SampleRule::paper;
    else if (o.sample_rule != "desk") throw InvalidInput("--sample-rule must be 'desk' or 'paper'");
    cfg.walk.steps = o.walk_steps;
    cfg.walk.samples = o.walk_samples;
    if (o.walk_rule == "paper") cfg.walk.rule = WalkConfig::StepRule::paper;
    else if (o.walk_rule != "desk") throw InvalidInput("--walk-rule must be 'desk' or 'paper'");
    cfg.round_cap = o.round_cap;
    cfg.validate();
    config << "s=" << cfg.sample_size(inst.dim()) << ";c_s=" << format_double(cfg.c_s)
           << ";sample_rule=" << o.sample_rule << ";walk_steps=" << o.walk_steps
           << ";walk_samples=" << o.walk_samples << ";walk_rule=" << o.walk_rule
           << ";round_cap=" << cfg.rounds_for(inst.size()) << ";interface=" << o.interface;
    if (o.interface == "scq") {
      ScqLabeler labeler(oracle);
      report = cheatr(inst.points, labeler, cfg, rng);
    } else {
      report = cheatr(inst.points, oracle, cfg, rng);
    }
  } else if (o.algorithm == "mrecur") {
    MrecurConfig cfg;
    cfg.gamma = gamma;
    cfg.metrics = inst.metrics;
    if (cfg.metrics.empty())
      cfg.metrics.assign(static_cast<std::size_t>(inst.k()), Pseudometric::euclidean(inst.dim()));
    cfg.sample_multiplier = o.sample_multiplier;
    cfg.m_override = o.m_override;
    cfg.round_cap = o.round_cap;
    cfg.validate(inst.k(), inst.dim());
    config << "c=" << format_double(cfg.sample_multiplier) << ";M=" << cfg.packing_bound(inst.points)
           << ";round_cap=" << o.round_cap << ";interface=" << o.interface;
    if (o.interface == "scq") {
      ScqLabeler labeler(oracle);
      report = mrecur(inst.points, labeler, cfg, rng);
    } else {
      report = mrecur(inst.points, oracle, cfg, rng);
    }
  } else {
    throw InvalidInput("--algorithm must be 'cheatr' or 'mrecur'");
  }
  const auto t1 = std::chrono::steady_clock::now();
  ResultRow row;
  row.algorithm = o.algorithm;
  row.n = inst.size();
  row.m = inst.dim();
  row.k = inst.k();
  row.gamma = gamma;
  row.seed = o.seed;
  row.label_queries = report.label_queries;
  row.scq_queries = report.scq_queries;
  row.rounds = report.rounds;
  row.exact = report.exact;
  row.misclassified_ever = report.misclassified_ever;
  row.wall_ms = std::round(std::chrono::duration<double, std::milli>(t1 - t0).count() * 1000.0) / 1000.0;
  row.generator = inst.generator;
  row.instance_seed = inst.seed;
  row.config = config.str();
  return row;
}

// a + b ln n by least squares; r2 = 1 when the response has no spread and
// the fit is exact.
struct LogFit {
  double a = 0.0, b = 0.0, r2 = 0.0;
};

inline LogFit fit_log(const std::vector<double>& n, const std::vector<double>& q) {
  LogFit f;
  const std::size_t count = n.size();
  if (count == 0) return f;
  double sx = 0, sy = 0;
  for (std::size_t i = 0; i < count; ++i) {
    sx += std::log(n[i]);
    sy += q[i];
  }
  const double mx = sx / count, my = sy / count;
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < count; ++i) {
    const double dx = std::log(n[i]) - mx, dy = q[i] - my;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  f.b = sxx > 0 ? sxy / sxx : 0.0;
  f.a = my - f.b * mx;
  double ss_res = 0;
  for (std::size_t i = 0; i < count; ++i) {
    const double e = q[i] - (f.a + f.b * std::log(n[i]));
    ss_res += e * e;
  }
  if (syy > 0) f.r2 = 1.0 - ss_res / syy;
  else f.r2 = ss_res <= 1e-18 ? 1.0 : 0.0;
  return f;
}

inline double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const std::size_t h = v.size() / 2;
  return v.size() % 2 ? v[h] : 0.5 * (v[h - 1] + v[h]);
}

// Sweep file: one "key value..." line per setting, '#' comments.
//   algorithm cheatr|mrecur      generator <name>
//   n / m / k / gamma <values>   seeds <count>   seed_base <u64>
//   optional: s, c_s, walk_steps, walk_samples, round_cap, alpha, size, eta, a
struct SweepSpec {
  std::string algorithm = "cheatr";
  std::string generator = "convex-margin";
  std::vector<double> n{1000}, m{2}, k{2}, gamma{1.0};
  std::size_t seeds = 1;
  std::uint64_t seed_base = 1;
  std::map<std::string, double> extra;
};

inline SweepSpec read_sweep(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open '" + path + "'");
  SweepSpec spec;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto h = line.find('#'); h != std::string::npos) line.resize(h);
    auto tok = split_ws(line);
    if (tok.empty()) continue;
    const std::string key(tok[0]);
    auto fail = [&](const std::string& what) { return SchemaError(path, lineno, what); };
    if (tok.size() < 2) throw fail("'" + key + "' needs a value");
    std::vector<double> vals;
    auto numbers = [&] {
      for (std::size_t i = 1; i < tok.size(); ++i) {
        double v;
        if (!parse_double(tok[i], v)) throw fail("bad number '" + std::string(tok[i]) + "'");
        vals.push_back(v);
      }
    };
    if (key == "algorithm") spec.algorithm = std::string(tok[1]);
    else if (key == "generator") spec.generator = std::string(tok[1]);
    else if (key == "seeds") {
      if (!parse_int(tok[1], spec.seeds)) throw fail("bad seed count");
    } else if (key == "seed_base") {
      if (!parse_int(tok[1], spec.seed_base)) throw fail("bad seed_base");
    } else {
      numbers();
      if (key == "n") spec.n = vals;
      else if (key == "m") spec.m = vals;
      else if (key == "k") spec.k = vals;
      else if (key == "gamma") spec.gamma = vals;
      else if (key == "s" || key == "c_s" || key == "walk_steps" || key == "walk_samples" ||
               key == "round_cap" || key == "alpha" || key == "size" || key == "eta" || key == "a")
        spec.extra[key] = vals.front();
      else throw fail("unknown key '" + key + "'");
    }
  }
  return spec;
}

inline unsigned thread_count() {
  const char* env = std::getenv("MARGINREC_THREADS");
  if (!env) return 1;
  unsigned v = 0;
  if (!parse_int(std::string_view(env), v) || v == 0) return 1;
  return std::min(v, 256u);
}

struct SweepRun {
  std::map<std::string, double> params;
  std::uint64_t seed;
};

inline int run_experiment(const SweepSpec& spec, const std::string& results_path, std::ostream& out) {
  std::vector<SweepRun> runs;
  for (double n : spec.n)
    for (double m : spec.m)
      for (double k : spec.k)
        for (double g : spec.gamma)
          for (std::size_t s = 0; s < spec.seeds; ++s) {
            SweepRun r;
            r.params = {{"n", n}, {"m", m}, {"k", k}, {"gamma", g}};
            for (const auto& [key, v] : spec.extra)
              if (key == "alpha" || key == "size" || key == "eta" || key == "a") r.params[key] = v;
            r.seed = spec.seed_base + s;
            runs.push_back(r);
          }
  RunOptions base;
  base.algorithm = spec.algorithm;
  base.s = as_count(param_or(spec.extra, "s", 0), "s");
  base.c_s = param_or(spec.extra, "c_s", 10.0);
  base.walk_steps = as_count(param_or(spec.extra, "walk_steps", 0), "walk_steps");
  base.walk_samples = as_count(param_or(spec.extra, "walk_samples", 0), "walk_samples");
  base.round_cap = as_count(param_or(spec.extra, "round_cap", 0), "round_cap");

  std::vector<ResultRow> rows(runs.size());
  std::vector<std::string> errors(runs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= runs.size()) return;
      try {
        Instance inst = make_instance(spec.generator, runs[i].params, runs[i].seed);
        RunOptions o = base;
        o.seed = runs[i].seed;
        o.gamma = runs[i].params.at("gamma");
        rows[i] = run_recovery(inst, o);
      } catch (const std::exception& e) {
        errors[i] = e.what();
      }
    }
  };
  const unsigned threads = std::min<unsigned>(thread_count(), static_cast<unsigned>(std::max<std::size_t>(runs.size(), 1)));
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  for (std::size_t i = 0; i < runs.size(); ++i)
    if (!errors[i].empty()) throw Error("run " + std::to_string(i) + " failed: " + errors[i]);

  if (!results_path.empty())
    for (const auto& r : rows) append_result(r, results_path);

  std::map<std::size_t, std::vector<double>> by_n;
  std::map<std::size_t, std::size_t> exact_by_n;
  bool all_exact = true;
  for (const auto& r : rows) {
    by_n[r.n].push_back(static_cast<double>(r.label_queries + r.scq_queries));
    exact_by_n[r.n] += r.exact ? 1 : 0;
    all_exact = all_exact && r.exact && r.misclassified_ever == 0;
  }
  out << "# rng " << RandomSource::kAlgorithm << "\n";
  out << "n,runs,exact,median_queries\n";
  std::vector<double> ns, qs;
  for (const auto& [n, q] : by_n) {
    const double med = median(q);
    out << n << "," << q.size() << "," << exact_by_n[n] << "," << format_double(med) << "\n";
    ns.push_back(static_cast<double>(n));
    qs.push_back(med);
  }
  LogFit f = fit_log(ns, qs);
  out << "fit a=" << format_double(f.a) << " b=" << format_double(f.b) << " r2=" << format_double(f.r2) << "\n";
  return all_exact ? kExitOk : kExitUnsatisfied;
}

}  // namespace cli

// Entry point shared by the tool and the tests. args excludes the program name.
inline int run_command(const std::vector<std::string>& args, std::ostream& out = std::cout,
                       std::ostream& err = std::cerr) {
  CLI::App app{"Exact cluster recovery with label and same-cluster queries", "marginrec"};
  app.require_subcommand(1);

  // generate
  auto* gen = app.add_subcommand("generate", "write a generated instance file");
  std::string gen_name, gen_out;
  std::uint64_t gen_seed = 0;
  std::map<std::string, double> gen_values;
  struct Flag {
    const char* flag;
    const char* key;
    double value = 0.0;
    CLI::Option* opt = nullptr;
  };
  std::vector<Flag> gen_flags = {{"--m", "m"},         {"--k", "k"},     {"--n", "n"},
                                 {"--gamma", "gamma"}, {"--size", "size"}, {"--eta", "eta"},
                                 {"--a", "a"},         {"--alpha", "alpha"}, {"--box", "box"},
                                 {"--singleton", "singleton"}, {"--r-prime", "r_prime"}};
  gen->add_option("--generator", gen_name, "convex-margin | packing | svm-vs-ova | sphere-coslice | center-proximity")->required();
  gen->add_option("--seed", gen_seed, "64-bit seed");
  gen->add_option("--out", gen_out, "output path")->required();
  for (auto& f : gen_flags) f.opt = gen->add_option(f.flag, f.value);

  // recover
  auto* rec = app.add_subcommand("recover", "run a recovery algorithm on an instance file");
  std::string rec_instance, rec_results;
  cli::RunOptions ro;
  rec->add_option("--instance", rec_instance)->required();
  rec->add_option("--algorithm", ro.algorithm, "cheatr | mrecur");
  rec->add_option("--gamma", ro.gamma, "margin parameter (default: the instance's gamma)");
  rec->add_option("--s", ro.s, "per-cluster sample size (default: derived)");
  rec->add_option("--c-s", ro.c_s, "constant of the derived sample size");
  rec->add_option("--sample-rule", ro.sample_rule, "desk | paper");
  rec->add_option("--walk-steps", ro.walk_steps, "hit-and-run steps per sample (default: derived)");
  rec->add_option("--walk-samples", ro.walk_samples, "walk samples per centroid (default: derived)");
  rec->add_option("--walk-rule", ro.walk_rule, "desk | paper");
  rec->add_option("--round-cap", ro.round_cap, "rounds before the exhaustive fallback (default: derived)");
  rec->add_option("--sample-multiplier", ro.sample_multiplier, "mrecur sample constant");
  rec->add_option("--m-override", ro.m_override, "mrecur packing bound override");
  rec->add_option("--interface", ro.interface, "label | scq");
  rec->add_option("--seed", ro.seed, "64-bit seed");
  rec->add_option("--results", rec_results, "results file to append to");

  // verify-margin
  auto* ver = app.add_subcommand("verify-margin", "check a margin condition on an instance file");
  std::string ver_instance, ver_kind = "ova";
  double ver_gamma = -1.0;
  ver->add_option("--instance", ver_instance)->required();
  ver->add_option("--kind", ver_kind, "ova | convex-hull");
  ver->add_option("--gamma", ver_gamma, "margin to test (default: the instance's gamma, else 0)");

  // experiment
  auto* exp = app.add_subcommand("experiment", "run a parameter sweep");
  std::string exp_spec, exp_results;
  exp->add_option("--spec", exp_spec, "sweep file")->required();
  exp->add_option("--results", exp_results, "results file to append rows to");

  std::vector<std::string> argv_store;
  argv_store.push_back("marginrec");
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& s : argv_store) argv.push_back(s.data());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "marginrec: " << e.what() << "\n";
    return kExitUsage;
  }

  try {
    if (*gen) {
      for (const auto& f : gen_flags)
        if (f.opt->count()) gen_values[f.key] = f.value;
      Instance inst = cli::make_instance(gen_name, gen_values, gen_seed);
      write_instance(inst, gen_out);
      out << "wrote " << gen_out << " (" << inst.size() << " points, k=" << inst.k() << ")\n";
      return kExitOk;
    }
    if (*rec) {
      Instance inst = read_instance(rec_instance);
      ResultRow row = cli::run_recovery(inst, ro);
      if (!rec_results.empty()) append_result(row, rec_results);
      out << result_header() << "\n" << format_result(row) << "\n";
      return row.exact && row.misclassified_ever == 0 ? kExitOk : kExitUnsatisfied;
    }
    if (*ver) {
      Instance inst = read_instance(ver_instance);
      double gamma = ver_gamma;
      if (gamma < 0.0) gamma = cli::param_or(inst.params, "gamma", 0.0);
      std::vector<Pseudometric> metrics = inst.metrics;
      if (metrics.empty()) metrics.assign(static_cast<std::size_t>(inst.k()), Pseudometric::euclidean(inst.dim()));
      bool ok = true;
      if (ver_kind == "ova") {
        MarginReport r = ova_margin(inst.points, inst.truth, metrics);
        for (std::size_t i = 0; i < r.per_cluster.size(); ++i) {
          const bool pass = r.per_cluster[i] > gamma;
          ok = ok && pass;
          out << "cluster " << (i + 1) << " ova_margin=" << format_double(r.per_cluster[i])
              << (pass ? " ok" : " violated") << "\n";
        }
        out << "min " << format_double(r.min) << " gamma " << format_double(gamma) << "\n";
      } else if (ver_kind == "convex-hull") {
        HullMarginReport r = verify_convex_hull_margin(inst.points, inst.truth, metrics, gamma);
        for (std::size_t i = 0; i < r.slack.size(); ++i) {
          const bool pass = r.slack[i] > default_tolerances().strictness;
          out << "cluster " << (i + 1) << " hull_margin=" << format_double(r.ratio[i])
              << " slack=" << format_double(r.slack[i]) << (pass ? " ok" : " violated") << "\n";
        }
        ok = r.satisfied;
        out << "min " << format_double(r.min_ratio) << " gamma " << format_double(gamma) << "\n";
      } else {
        err << "marginrec: --kind must be 'ova' or 'convex-hull'\n";
        return kExitUsage;
      }
      out << (ok ? "satisfied" : "unsatisfied") << "\n";
      return ok ? kExitOk : kExitUnsatisfied;
    }
    if (*exp) {
      cli::SweepSpec spec = cli::read_sweep(exp_spec);
      return cli::run_experiment(spec, exp_results, out);
    }
  } catch (const std::exception& e) {
    err << "marginrec: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}

}  // namespace marginrec
