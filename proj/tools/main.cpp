// bellsim command-line front end: seeded correlation sweeps, CHSH reports,
// and analysis of recorded outcome files.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "bellsim/bellsim.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitIo = 2;

struct SweepOptions {
  double alpha = 0.0;
  std::size_t n_pairs = 100000;
  std::size_t n_points = 1000;
  std::uint64_t seed = 42;
  std::string mode = "replicate";
  std::string model = "lhv";
  double beta_start = 0.0;
  double beta_end = bellsim::kPi;
  std::string out_csv;
  std::string out_svg;
  std::string emit_events;
  bool degrees = false;
  unsigned threads = 0;
};

struct ChshOptions {
  std::string model = "lhv";
  std::vector<double> settings;  // collected from -a, -A, -b, -B
  double a = 0.0, a_prime = 0.0, b = 0.0, b_prime = 0.0;
  bool maximize = false;
  std::size_t grid = 64;
  std::size_t n_pairs = 0;  // 0 = analytic
  std::uint64_t seed = 42;
  bool degrees = false;
  unsigned threads = 0;
};

struct AnalyzeOptions {
  std::string input;
  std::string out_csv;
};

int fail_io(const std::string& message) {
  std::cerr << "bellsim: " << message << '\n';
  return kExitIo;
}

int fail_usage(const std::string& message) {
  std::cerr << "bellsim: " << message << '\n';
  return kExitUsage;
}

void print_chsh_report(std::ostream& os, const bellsim::ChshResult& r) {
  char buf[256];
  const auto& st = r.settings;
  std::snprintf(buf, sizeof(buf),
                "settings (rad): a = %.9g  a' = %.9g  b = %.9g  b' = %.9g",
                st.a.radians, st.a_prime.radians, st.b.radians,
                st.b_prime.radians);
  os << buf << '\n';
  std::snprintf(buf, sizeof(buf), "E(a ,b ) = %+.6f", r.e_ab);
  os << buf << '\n';
  std::snprintf(buf, sizeof(buf), "E(a ,b') = %+.6f", r.e_ab_prime);
  os << buf << '\n';
  std::snprintf(buf, sizeof(buf), "E(a',b ) = %+.6f", r.e_a_prime_b);
  os << buf << '\n';
  std::snprintf(buf, sizeof(buf), "E(a',b') = %+.6f", r.e_a_prime_b_prime);
  os << buf << '\n';
  std::snprintf(buf, sizeof(buf), "S = %+.6f", r.s);
  os << buf << '\n';
  std::snprintf(buf, sizeof(buf), "|S| = %.6f", r.abs_s());
  os << buf << '\n';
  os << "verdict: "
     << (r.abs_s() <= 2.0 ? "satisfies |S| <= 2" : "violates |S| <= 2")
     << '\n';
}

int run_sweep_command(const SweepOptions& opt) {
  using namespace bellsim;

  const double unit = opt.degrees ? kPi / 180.0 : 1.0;
  ExperimentConfig config;
  config.n_pairs = opt.n_pairs;
  config.seed = opt.seed;
  config.mode = opt.mode == "replicate" ? SamplingMode::kReplicate
                                        : SamplingMode::kIndependent;
  config.alpha = Angle{opt.alpha * unit};
  config.sweep = SweepGrid{opt.beta_start * unit, opt.beta_end * unit,
                           opt.n_points};

  const bool analytic = opt.model == "qm-analytic";
  if (analytic && !opt.emit_events.empty()) {
    return fail_usage("--emit-events requires --model lhv");
  }

  CorrelationCurve curve;
  try {
    if (analytic) {
      validate_config(config);
      curve = analytic_curve(qm_analytic_source(), config.alpha, config.sweep);
    } else {
      curve = run_sweep(config, opt.threads);
    }
  } catch (const std::domain_error& e) {
    return fail_usage(e.what());
  }

  if (!opt.emit_events.empty()) {
    std::ofstream events(opt.emit_events);
    if (!events) {
      return fail_io("cannot open '" + opt.emit_events + "' for writing");
    }
    events << "# alpha beta x y\n";
    const auto betas = sweep_betas(config.sweep);
    std::vector<PairSample> shared;
    if (config.mode == SamplingMode::kReplicate) {
      shared = draw_samples(config.n_pairs, config.seed, kMainStreamLabel);
    }
    std::vector<OutcomeRecord> records;
    records.reserve(config.n_pairs);
    for (std::size_t i = 0; i < betas.size(); ++i) {
      const std::vector<PairSample>& samples =
          config.mode == SamplingMode::kReplicate
              ? shared
              : draw_samples(config.n_pairs, config.seed,
                             point_label("point", i));
      records.clear();
      for (const PairSample& s : samples) {
        const OutcomePair o = simulate_pair(s, config.alpha, Angle{betas[i]});
        records.push_back(
            OutcomeRecord{config.alpha.radians, betas[i], o.x, o.y});
      }
      write_outcome_records(events, records);
    }
    if (!events.good()) {
      return fail_io("error writing '" + opt.emit_events + "'");
    }
  }

  if (!opt.out_svg.empty()) {
    std::ofstream svg(opt.out_svg);
    if (!svg) {
      return fail_io("cannot open '" + opt.out_svg + "' for writing");
    }
    const PlotSeries series{analytic ? "#d62728" : "#1f77b4", &curve};
    write_curve_svg(svg, std::span(&series, 1));
    if (!svg.good()) {
      return fail_io("error writing '" + opt.out_svg + "'");
    }
  }

  if (opt.out_csv.empty()) {
    write_curve_csv(std::cout, curve);
  } else {
    std::ofstream csv(opt.out_csv);
    if (!csv) {
      return fail_io("cannot open '" + opt.out_csv + "' for writing");
    }
    write_curve_csv(csv, curve);
    if (!csv.good()) {
      return fail_io("error writing '" + opt.out_csv + "'");
    }
  }
  return kExitOk;
}

int run_chsh_command(const ChshOptions& opt, bool have_settings) {
  using namespace bellsim;

  if (opt.maximize == have_settings) {
    return fail_usage(
        "chsh needs either --maximize or all four of -a, -A, -b, -B");
  }
  if (opt.maximize && opt.n_pairs != 0) {
    return fail_usage("--n-pairs applies to explicit settings, not --maximize");
  }

  const CorrelationSource source =
      opt.model == "lhv" ? lhv_analytic_source() : qm_analytic_source();

  try {
    if (opt.maximize) {
      const ChshResult r = max_abs_chsh(source, opt.grid, opt.threads);
      std::cout << "max |S| over " << opt.grid << "^4 setting grid ("
                << opt.model << " analytic):\n";
      print_chsh_report(std::cout, r);
      return kExitOk;
    }

    const double unit = opt.degrees ? kPi / 180.0 : 1.0;
    const ChshSettings settings =
        make_chsh_settings(opt.a * unit, opt.a_prime * unit, opt.b * unit,
                           opt.b_prime * unit);
    ChshResult r;
    if (opt.n_pairs == 0) {
      r = chsh_statistic(source, settings);
      std::cout << "CHSH (" << opt.model << " analytic):\n";
    } else if (opt.model == "lhv") {
      r = empirical_chsh_lhv(settings, opt.n_pairs, opt.seed);
      std::cout << "CHSH (lhv simulation, " << opt.n_pairs
                << " pairs per setting, seed " << opt.seed << "):\n";
    } else {
      r = empirical_chsh_from_joint(
          [](Angle a, Angle b) { return qm_joint_distribution(a, b); },
          settings, opt.n_pairs, opt.seed);
      std::cout << "CHSH (qm sampling, " << opt.n_pairs
                << " pairs per setting, seed " << opt.seed << "):\n";
    }
    print_chsh_report(std::cout, r);
    return kExitOk;
  } catch (const std::domain_error& e) {
    return fail_usage(e.what());
  }
}

int run_analyze_command(const AnalyzeOptions& opt) {
  using namespace bellsim;

  std::ifstream input(opt.input);
  if (!input) {
    return fail_io("cannot open '" + opt.input + "'");
  }
  std::vector<OutcomeRecord> records;
  try {
    records = parse_outcome_records(input);
  } catch (const ParseError& e) {
    return fail_io(opt.input + ": " + e.what());
  }
  if (records.empty()) {
    return fail_io(opt.input + ": no outcome records");
  }

  const AnalysisResult result = analyze_records(records);

  const auto write_groups = [&](std::ostream& os) {
    os << "alpha,beta,corr,stderr,n\n";
    for (const SettingGroup& g : result.groups) {
      os << format_double(g.alpha) << ',' << format_double(g.beta) << ','
         << format_double(g.est.mean) << ',' << format_double(g.est.std_error)
         << ',' << g.est.n << '\n';
    }
  };

  bool csv_on_stdout = opt.out_csv.empty();
  if (csv_on_stdout) {
    write_groups(std::cout);
  } else {
    std::ofstream csv(opt.out_csv);
    if (!csv) {
      return fail_io("cannot open '" + opt.out_csv + "' for writing");
    }
    write_groups(csv);
    if (!csv.good()) {
      return fail_io("error writing '" + opt.out_csv + "'");
    }
  }

  if (result.chsh) {
    // Keep stdout machine-readable when the CSV is going there.
    std::ostream& os = csv_on_stdout ? std::cerr : std::cout;
    os << "settings form a 2x2 quadruple; empirical CHSH:\n";
    print_chsh_report(os, *result.chsh);
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "bellsim: Monte Carlo and analytic correlations for a local "
      "hidden-variable polarization model of a two-photon Bell experiment"};
  app.require_subcommand(1);

  SweepOptions sweep;
  CLI::App* sweep_cmd = app.add_subcommand(
      "sweep", "Estimate the correlation curve over a beta grid");
  sweep_cmd->add_option("--alpha", sweep.alpha, "Fixed wing-A setting")
      ->capture_default_str();
  sweep_cmd->add_option("--n-pairs", sweep.n_pairs, "Photon pairs per point")
      ->capture_default_str();
  sweep_cmd->add_option("--n-points", sweep.n_points, "Points on the beta grid")
      ->capture_default_str();
  sweep_cmd->add_option("--seed", sweep.seed, "RNG seed")
      ->capture_default_str();
  sweep_cmd
      ->add_option("--mode", sweep.mode,
                   "replicate: reuse one sample set at every point; "
                   "independent: fresh substream per point")
      ->check(CLI::IsMember({"replicate", "independent"}))
      ->capture_default_str();
  sweep_cmd
      ->add_option("--model", sweep.model,
                   "lhv: Monte Carlo hidden-variable simulation; "
                   "qm-analytic: exact quantum curve")
      ->check(CLI::IsMember({"lhv", "qm-analytic"}))
      ->capture_default_str();
  sweep_cmd->add_option("--beta-start", sweep.beta_start, "Grid start")
      ->capture_default_str();
  sweep_cmd->add_option("--beta-end", sweep.beta_end, "Grid end (inclusive)")
      ->capture_default_str();
  sweep_cmd->add_option("--out-csv", sweep.out_csv,
                        "Write the curve CSV here instead of stdout");
  sweep_cmd->add_option("--out-svg", sweep.out_svg, "Also write an SVG plot");
  sweep_cmd->add_option("--emit-events", sweep.emit_events,
                        "Also write per-pair outcome records (lhv only)");
  sweep_cmd->add_flag("--degrees", sweep.degrees,
                      "Interpret angle inputs as degrees");
  sweep_cmd->add_option("--threads", sweep.threads,
                        "Worker threads (0 = hardware)");

  ChshOptions chsh;
  CLI::App* chsh_cmd = app.add_subcommand(
      "chsh", "Evaluate or maximize the CHSH statistic");
  chsh_cmd
      ->add_option("--model", chsh.model,
                   "lhv or qm (analytic unless --n-pairs is given)")
      ->check(CLI::IsMember({"lhv", "qm"}))
      ->capture_default_str();
  CLI::Option* opt_a = chsh_cmd->add_option("-a,--a", chsh.a, "Setting a");
  CLI::Option* opt_ap =
      chsh_cmd->add_option("-A,--a-prime", chsh.a_prime, "Setting a'");
  CLI::Option* opt_b = chsh_cmd->add_option("-b,--b", chsh.b, "Setting b");
  CLI::Option* opt_bp =
      chsh_cmd->add_option("-B,--b-prime", chsh.b_prime, "Setting b'");
  chsh_cmd->add_flag("--maximize", chsh.maximize,
                     "Grid-search the settings for maximal |S|");
  chsh_cmd->add_option("--grid", chsh.grid, "Grid points per angle")
      ->capture_default_str();
  chsh_cmd->add_option("--n-pairs", chsh.n_pairs,
                       "Estimate each correlation from this many pairs "
                       "(0 = analytic)");
  chsh_cmd->add_option("--seed", chsh.seed, "RNG seed for empirical mode")
      ->capture_default_str();
  chsh_cmd->add_flag("--degrees", chsh.degrees,
                     "Interpret angle inputs as degrees");
  chsh_cmd->add_option("--threads", chsh.threads,
                       "Worker threads (0 = hardware)");

  AnalyzeOptions analyze;
  CLI::App* analyze_cmd = app.add_subcommand(
      "analyze", "Per-setting correlations from an outcome-record file");
  analyze_cmd->add_option("input", analyze.input, "Outcome-record file")
      ->required();
  analyze_cmd->add_option("--out-csv", analyze.out_csv,
                          "Write per-setting CSV here instead of stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  if (sweep_cmd->parsed()) {
    return run_sweep_command(sweep);
  }
  if (chsh_cmd->parsed()) {
    const bool have_settings = opt_a->count() > 0 && opt_ap->count() > 0 &&
                               opt_b->count() > 0 && opt_bp->count() > 0;
    const bool any_setting = opt_a->count() > 0 || opt_ap->count() > 0 ||
                             opt_b->count() > 0 || opt_bp->count() > 0;
    if (any_setting && !have_settings) {
      return fail_usage("chsh needs all four of -a, -A, -b, -B");
    }
    return run_chsh_command(chsh, have_settings);
  }
  return run_analyze_command(analyze);
}
