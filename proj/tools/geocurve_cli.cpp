// geocurve: fit class-wise geodesic curves in pre-shape space and sample
// augmented features along them.
//
// Exit codes: 0 ok, 1 self-check failure, 2 input error, 3 runtime failure, 64 usage.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "geocurve/geocurve.hpp"

namespace {

using namespace geocurve;

constexpr int kExitOk = 0;
constexpr int kExitCheckFailed = 1;
constexpr int kExitInput = 2;
constexpr int kExitRuntime = 3;
constexpr int kExitUsage = 64;

constexpr const char* kSchemas = R"(File schemas:
  features CSV   label,f0,...,f{d-1}              (one sample per row, d >= 2)
  augmented CSV  label,p0,...,p{2d-1},augmented   (pre-shape coordinates, flag 0/1)
  curves JSON    {"schema":"geocurve.curves.v1","config":{beta,lr_p,lr_t,epochs,seed,theta_min},
                  "curves":[{label,d,tau_start[2d],tau_end[2d],theta,final_loss{sim,diverg,total,beta},
                             reperturb_events,loss_trace[]}]}
  eval JSON      {"schema":"geocurve.eval.v1",method,classifier,k,n,m_min,seeds[],accuracies[],mean,std,
                  curve_fits,raw_knn?{accuracies[],mean,std}}
  eval CSV       seed,method,classifier,accuracy
  bench JSON     {"schema":"geocurve.bench.v1",m,d,epochs,seconds[],mean,min,std,hardware}
Exit codes: 0 ok, 1 check failure, 2 input error, 3 runtime failure, 64 usage.)";

/// Writes to `path`, or stdout when empty.
class Output {
 public:
  explicit Output(const std::string& path) {
    if (!path.empty()) {
      file_ = std::make_unique<std::ofstream>(path, std::ios::binary);
      if (!*file_) throw Error(ErrorKind::ParseError, "cannot write '" + path + "'");
    }
  }
  std::ostream& stream() { return file_ ? *file_ : std::cout; }

 private:
  std::unique_ptr<std::ofstream> file_;
};

int threads_default() {
  if (const char* env = std::getenv("GEOCURVE_THREADS")) {
    try {
      return std::max(1, std::stoi(env));
    } catch (...) {
    }
  }
  return 1;
}

struct SynthOpts {
  std::string kind = "geodesic";
  SynthConfig cfg;
  std::string out, test_out;
};

struct FitOpts {
  std::string input, out;
  FitConfig cfg;
};

struct AugmentOpts {
  std::string curves, out;
  std::size_t n = 0;
  std::uint64_t seed = 0;
};

struct EvalOpts {
  std::string train, test, out, csv;
  std::string method = "none", classifier = "knn";
  std::size_t k = 5;
  std::optional<std::size_t> n;
  int seeds = 6;
  std::uint64_t seed = 0;
  int threads = 1;
  EvalConfig cfg;
};

struct CheckOpts {
  std::string curves, augmented;
  std::uint64_t seed = kSelfCheckSeed;
};

struct BenchOpts {
  std::size_t m = 10;
  int d = 192, epochs = 2000, repeats = 3;
  std::uint64_t seed = 0;
  std::string out;
};

int run_synth(const SynthOpts& o) {
  SynthConfig cfg = o.cfg;
  cfg.kind = o.kind == "gaussian" ? SynthKind::Gaussian : SynthKind::Geodesic;
  if (cfg.test_per_class > 0 && o.test_out.empty()) {
    throw Error(ErrorKind::InvalidArgument, "--test-per-class needs --test-out");
  }
  const SynthData data = synthesize(cfg);
  Output out(o.out);
  write_features(out.stream(), data.train, cfg.dim);
  if (cfg.test_per_class > 0) {
    Output test(o.test_out);
    write_features(test.stream(), data.test, cfg.dim);
  }
  return kExitOk;
}

int run_fit(const FitOpts& o) {
  const LabeledFeatureSet data = read_features_file(o.input);
  std::map<std::string, FittedCurve> curves;
  try {
    curves = fit_all_classes(data, o.cfg);
  } catch (const Error& e) {
    std::cerr << "geocurve fit: " << e.what() << '\n';
    return kExitRuntime;
  }
  Output out(o.out);
  out.stream() << curves_to_json(curves, o.cfg).dump(1) << '\n';
  for (const auto& [label, fc] : curves) {
    std::cerr << "class " << label << ": sim " << fc.final_loss.sim << ", diverg " << fc.final_loss.diverg
              << ", theta " << fc.curve.theta() << '\n';
  }
  return kExitOk;
}

int run_augment(const AugmentOpts& o) {
  const auto curves = read_curves_file(o.curves);
  const Eigen::Index dim = curves.empty() ? 0 : curves.begin()->second.curve.dim();
  const LabeledFeatureSet aug = augment_dataset(curves, o.n, o.seed);
  Output out(o.out);
  write_features(out.stream(), aug, dim, true);
  return kExitOk;
}

int run_eval(EvalOpts o) {
  const LabeledFeatureSet train = read_features_file(o.train);
  const LabeledFeatureSet test = read_features_file(o.test);
  EvalConfig cfg = o.cfg;
  cfg.method = o.method == "faagc" ? AugmentMethod::Faagc
               : o.method == "mixup" ? AugmentMethod::Mixup
                                     : AugmentMethod::None;
  cfg.classifier = o.classifier == "linear" ? ClassifierKind::Linear : ClassifierKind::Knn;
  cfg.k = o.k;
  cfg.n = o.n;
  cfg.threads = o.threads;
  cfg.seeds.clear();
  for (int i = 0; i < o.seeds; ++i) cfg.seeds.push_back(o.seed + static_cast<std::uint64_t>(i));

  EvalReport report;
  try {
    report = evaluate(train, test, cfg);
  } catch (const Error& e) {
    std::cerr << "geocurve eval: " << e.what() << '\n';
    return e.kind() == ErrorKind::LabelMismatch || e.kind() == ErrorKind::DimensionMismatch ? kExitInput
                                                                                              : kExitRuntime;
  }
  Output out(o.out);
  out.stream() << report_to_json(report).dump(1) << '\n';
  std::string csv_path = o.csv;
  if (csv_path.empty() && !o.out.empty()) csv_path = o.out + ".csv";
  if (!csv_path.empty()) {
    Output csv(csv_path);
    write_report_csv(csv.stream(), report);
  }
  std::cerr << to_string(report.method) << '/' << to_string(report.classifier) << ": mean accuracy "
            << report.mean << " +- " << report.stddev << " over " << report.seeds.size() << " seeds\n";
  return kExitOk;
}

SuiteResult check_augmented_file(const std::string& curves_path, const std::string& rows_path) {
  const auto curves = read_curves_file(curves_path);
  const LabeledFeatureSet rows = read_features_file(rows_path);
  SuiteResult r;
  r.name = "augmented_rows_on_curve";
  r.tolerance = 1e-9;
  std::size_t missing = 0;
  for (const auto& s : rows.samples) {
    const auto it = curves.find(s.label);
    if (it == curves.end() || s.x.size() != it->second.curve.dim()) {
      ++missing;
      continue;
    }
    r.max_error = std::max(r.max_error, oracle::additivity_gap(it->second.curve, PreShapeVector::trusted(s.x)));
  }
  r.instances = rows.size();
  r.passed = missing == 0 && r.max_error <= r.tolerance;
  r.detail = std::to_string(missing) + " rows without a matching curve";
  return r;
}

int run_check(const CheckOpts& o) {
  if (o.curves.empty() != o.augmented.empty()) {
    throw Error(ErrorKind::InvalidArgument, "--curves and --augmented must be given together");
  }
  std::vector<SuiteResult> results = run_self_check(o.seed);
  if (!o.curves.empty()) results.push_back(check_augmented_file(o.curves, o.augmented));
  bool all = true;
  for (const auto& r : results) {
    std::printf("%-26s %-4s instances=%-6zu max_error=%.3e tol=%.0e time=%.3fs %s\n", r.name.c_str(),
                r.passed ? "PASS" : "FAIL", r.instances, r.max_error, r.tolerance, r.seconds, r.detail.c_str());
    all = all && r.passed;
  }
  return all ? kExitOk : kExitCheckFailed;
}

int run_bench(const BenchOpts& o) {
  const BenchResult r = bench_fit(o.m, o.d, o.epochs, o.repeats, o.seed);
  nlohmann::json doc{{"schema", "geocurve.bench.v1"}, {"m", r.m},       {"d", r.d},     {"epochs", r.epochs},
                     {"seconds", r.seconds},           {"mean", r.mean}, {"min", r.min}, {"std", r.stddev},
                     {"hardware", r.hardware}};
  Output out(o.out);
  out.stream() << doc.dump(1) << '\n';
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Geodesic-curve feature augmentation in pre-shape space"};
  app.footer(kSchemas);
  app.require_subcommand(1);

  SynthOpts synth;
  auto* s = app.add_subcommand("synth", "Generate synthetic class-structured raw features");
  s->add_option("--kind", synth.kind, "gaussian or geodesic")->check(CLI::IsMember({"gaussian", "geodesic"}));
  s->add_option("--classes", synth.cfg.classes, "Number of classes")->check(CLI::Range(2, 1 << 20));
  s->add_option("--per-class", synth.cfg.per_class, "Training samples per class")->check(CLI::Range(1, 1 << 24));
  s->add_option("--test-per-class", synth.cfg.test_per_class, "Held-out samples per class (needs --test-out)")
      ->check(CLI::NonNegativeNumber);
  s->add_option("--dim", synth.cfg.dim, "Raw feature dimension d")->check(CLI::Range(4, 1 << 20));
  s->add_option("--noise", synth.cfg.noise, "Per-coordinate noise standard deviation")->check(CLI::NonNegativeNumber);
  s->add_option("--spread", synth.cfg.spread, "Spread of class anchors around the shared anchor")
      ->check(CLI::NonNegativeNumber);
  s->add_option("--seed", synth.cfg.seed, "Random seed");
  s->add_option("--out", synth.out, "Training CSV path (default stdout)");
  s->add_option("--test-out", synth.test_out, "Held-out CSV path");

  FitOpts fit_opts;
  fit_opts.cfg.threads = threads_default();
  auto* f = app.add_subcommand("fit", "Fit one geodesic curve per class");
  f->add_option("input,--input", fit_opts.input, "Feature CSV")->required();
  f->add_option("--beta", fit_opts.cfg.beta, "Divergence loss weight")->check(CLI::NonNegativeNumber);
  f->add_option("--lr-p", fit_opts.cfg.lr_endpoints, "Endpoint learning rate")->check(CLI::PositiveNumber);
  f->add_option("--lr-t", fit_opts.cfg.lr_t, "Sampling-parameter learning rate")->check(CLI::PositiveNumber);
  f->add_option("--epochs", fit_opts.cfg.epochs, "Training epochs")->check(CLI::Range(1, 1 << 30));
  f->add_flag("--early-stop", fit_opts.cfg.early_stop, "Stop when the 100-epoch loss average plateaus");
  f->add_option("--seed", fit_opts.cfg.seed, "Random seed");
  f->add_option("--threads", fit_opts.cfg.threads, "Worker threads (env GEOCURVE_THREADS)")
      ->check(CLI::PositiveNumber);
  f->add_option("--out", fit_opts.out, "Curves JSON path (default stdout)");

  AugmentOpts aug;
  auto* a = app.add_subcommand("augment", "Sample pseudo-labeled pre-shapes along fitted curves");
  a->add_option("curves,--curves", aug.curves, "Curves JSON")->required();
  a->add_option("--n", aug.n, "Samples per class")->required();
  a->add_option("--seed", aug.seed, "Random seed");
  a->add_option("--out", aug.out, "Augmented CSV path (default stdout)");

  EvalOpts ev;
  ev.threads = threads_default();
  auto* e = app.add_subcommand("eval", "Multi-seed classification with and without augmentation");
  e->add_option("--train", ev.train, "Training feature CSV")->required();
  e->add_option("--test", ev.test, "Test feature CSV")->required();
  e->add_option("--method", ev.method, "none, faagc or mixup")->check(CLI::IsMember({"none", "faagc", "mixup"}));
  e->add_option("--classifier", ev.classifier, "knn or linear")->check(CLI::IsMember({"knn", "linear"}));
  e->add_option("--k", ev.k, "Neighbors for k-NN")->check(CLI::PositiveNumber);
  e->add_option("--n", ev.n, "Augmented samples per class (default: class size m)");
  e->add_option("--seeds", ev.seeds, "Number of seeds")->check(CLI::PositiveNumber);
  e->add_option("--seed", ev.seed, "First seed");
  e->add_option("--epochs", ev.cfg.fit.epochs, "Curve-fit epochs")->check(CLI::Range(1, 1 << 30));
  e->add_option("--beta", ev.cfg.fit.beta, "Divergence loss weight")->check(CLI::NonNegativeNumber);
  e->add_option("--lr-p", ev.cfg.fit.lr_endpoints, "Endpoint learning rate")->check(CLI::PositiveNumber);
  e->add_option("--lr-t", ev.cfg.fit.lr_t, "Sampling-parameter learning rate")->check(CLI::PositiveNumber);
  e->add_option("--p-g", ev.cfg.head.p_g, "Probability of an original-only epoch (linear head)")
      ->check(CLI::Range(0.0, 1.0));
  e->add_option("--lambda", ev.cfg.head.lambda, "Augmented loss weight (linear head)")
      ->check(CLI::NonNegativeNumber);
  e->add_option("--threads", ev.threads, "Worker threads (env GEOCURVE_THREADS)")->check(CLI::PositiveNumber);
  e->add_option("--out", ev.out, "Report JSON path (default stdout)");
  e->add_option("--csv", ev.csv, "Per-seed CSV path (default <out>.csv)");

  CheckOpts chk;
  auto* c = app.add_subcommand("check", "Run the randomized self-check suites");
  c->add_option("--curves", chk.curves, "Curves JSON to verify augmented rows against");
  c->add_option("--augmented", chk.augmented, "Augmented CSV whose rows must lie on their curves");
  c->add_option("--seed", chk.seed, "Suite seed");

  BenchOpts bench;
  auto* b = app.add_subcommand("bench", "Time a single-class, single-threaded curve fit");
  b->add_option("--m", bench.m, "Samples in the class")->check(CLI::PositiveNumber);
  b->add_option("--d", bench.d, "Raw feature dimension")->check(CLI::Range(4, 1 << 20));
  b->add_option("--epochs", bench.epochs, "Training epochs")->check(CLI::Range(1, 1 << 30));
  b->add_option("--repeats", bench.repeats, "Timed repetitions")->check(CLI::PositiveNumber);
  b->add_option("--seed", bench.seed, "Random seed");
  b->add_option("--out", bench.out, "Timing JSON path (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& err) {
    return app.exit(err);
  } catch (const CLI::ParseError& err) {
    app.exit(err);
    return kExitUsage;
  }

  try {
    if (*s) return run_synth(synth);
    if (*f) return run_fit(fit_opts);
    if (*a) return run_augment(aug);
    if (*e) return run_eval(ev);
    if (*c) return run_check(chk);
    if (*b) return run_bench(bench);
  } catch (const Error& err) {
    std::cerr << "geocurve: " << err.what() << '\n';
    switch (err.kind()) {
      case ErrorKind::ParseError:
      case ErrorKind::InvalidArgument:
      case ErrorKind::DimensionMismatch:
      case ErrorKind::LabelMismatch:
      case ErrorKind::MissingCurve:
        return kExitInput;
      default:
        return kExitRuntime;
    }
  } catch (const std::exception& err) {
    std::cerr << "geocurve: " << err.what() << '\n';
    return kExitRuntime;
  }
  return kExitUsage;
}
