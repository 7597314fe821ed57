// Command-line front end for the density laboratory: every pipeline reads a
// deterministic configuration (flags over config-file keys over defaults),
// writes CSV data plus one JSON summary into the output directory, and keeps
// every byte of that output reproducible for a fixed seed. Wall-clock timings
// go to stderr only, so reruns stay byte-identical.
#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "densitylab/characters.hpp"
#include "densitylab/combinatorics.hpp"
#include "densitylab/io.hpp"
#include "densitylab/lvalues.hpp"
#include "densitylab/modforms.hpp"
#include "densitylab/moments.hpp"
#include "densitylab/primesums.hpp"
#include "densitylab/real.hpp"
#include "densitylab/rmt.hpp"
#include "densitylab/testfuncs.hpp"

using json = nlohmann::ordered_json;

namespace {

struct CheckResult {
  std::string name;
  std::string status;  // "pass" | "fail" | "trend-pass" | "trend-fail"
  std::string detail;
};

struct RunContext {
  unsigned long long seed = 1;
  unsigned digits = 50;
  bool strict = false;
  std::string out_dir = ".";
  dlab::Config cfg;
  std::map<std::string, std::string> effective;  // echoed into the summary
  std::vector<CheckResult> checks;
  std::vector<std::string> outputs;

  void note(const std::string& key, const std::string& value) { effective[key] = value; }

  std::filesystem::path out_path(const std::string& name) const {
    return std::filesystem::path(out_dir) / name;
  }
};

// Flags win over config keys; config keys win over defaults.
template <typename T>
void cfg_override(const CLI::Option* opt, const dlab::Config& cfg, const std::string& key,
                  T& var) {
  if (opt != nullptr && opt->count() > 0) return;
  if (!cfg.has(key)) return;
  std::istringstream in(cfg.get(key));
  T parsed;
  if (in >> parsed)
    var = parsed;
  else
    throw std::invalid_argument("config key " + key + " has an unparsable value");
}

void cfg_override(const CLI::Option* opt, const dlab::Config& cfg, const std::string& key,
                  std::string& var) {
  if (opt != nullptr && opt->count() > 0) return;
  if (cfg.has(key)) var = cfg.get(key);
}

std::vector<double> parse_double_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    if (item.empty()) continue;
    out.push_back(std::stod(item));
  }
  if (out.empty()) throw std::invalid_argument("empty numeric list: " + text);
  return out;
}

std::vector<long long> parse_int_list(const std::string& text) {
  std::vector<long long> out;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    if (item.empty()) continue;
    out.push_back(std::stoll(item));
  }
  if (out.empty()) throw std::invalid_argument("empty integer list: " + text);
  return out;
}

dlab::DirichletCharacter pick_character(long long D, const std::string& parity) {
  auto list = dlab::enumerate_real_primitive(D);
  if (list.empty())
    throw std::invalid_argument("no real primitive character exists at modulus " +
                                std::to_string(D));
  if (parity == "even" || parity.empty()) {
    if (list[0].parity() == 1 || list.size() == 1) return list[0];
    throw std::invalid_argument("modulus " + std::to_string(D) + " has no even character");
  }
  if (parity == "odd") {
    for (const auto& chi : list)
      if (chi.parity() == -1) return chi;
    throw std::invalid_argument("modulus " + std::to_string(D) + " has no odd character");
  }
  throw std::invalid_argument("parity must be 'even' or 'odd', got '" + parity + "'");
}

dlab::TestFunction make_test_function(const RunContext& ctx, const std::string& kind,
                                      double beta) {
  if (kind == "fejer") return dlab::TestFunction::fejer(beta);
  if (kind == "piecewise-linear" || kind == "hat") {
    if (!ctx.cfg.has("testfn.knots") || !ctx.cfg.has("testfn.values"))
      throw std::invalid_argument(
          "piecewise-linear test functions need testfn.knots and testfn.values config keys");
    auto knots = parse_double_list(ctx.cfg.get("testfn.knots"));
    auto values = parse_double_list(ctx.cfg.get("testfn.values"));
    return dlab::TestFunction::piecewise_linear_hat(knots, values);
  }
  throw std::invalid_argument("unknown test-function kind '" + kind +
                              "'; expected fejer or piecewise-linear");
}

void write_summary(RunContext& ctx, const std::string& subcommand) {
  json j;
  j["schema_version"] = 1;
  j["artifact_version"] = "1.0.0";
  j["subcommand"] = subcommand;
  json cfg_echo = json::object();
  for (const auto& [k, v] : ctx.effective) cfg_echo[k] = v;
  j["config"] = cfg_echo;
  json checks = json::array();
  for (const auto& c : ctx.checks)
    checks.push_back(json{{"name", c.name}, {"status", c.status}, {"detail", c.detail}});
  j["checks"] = checks;
  j["outputs"] = ctx.outputs;
  std::ofstream out(ctx.out_path("summary.json"));
  if (!out) throw std::invalid_argument("cannot write to output directory " + ctx.out_dir);
  out << j.dump(2) << "\n";
  ctx.outputs.push_back("summary.json");
}

// Exit status for a finished pipeline: hard failures always fail the process;
// trend failures only under --strict.
int finish(RunContext& ctx, const std::string& subcommand) {
  write_summary(ctx, subcommand);
  bool hard_fail = false, trend_fail = false;
  for (const auto& c : ctx.checks) {
    if (c.status == "fail") hard_fail = true;
    if (c.status == "trend-fail") trend_fail = true;
  }
  if (hard_fail) return 1;
  if (trend_fail && ctx.strict) return 1;
  return 0;
}

std::ofstream open_csv(RunContext& ctx, const std::string& name) {
  std::ofstream out(ctx.out_path(name));
  if (!out) throw std::invalid_argument("cannot write to output directory " + ctx.out_dir);
  ctx.outputs.push_back(name);
  return out;
}

// ---------------------------------------------------------------------------
// Subcommand bodies
// ---------------------------------------------------------------------------

int run_gauss_check(RunContext& ctx, long long dmax) {
  if (dmax < 1) throw std::invalid_argument("gauss-check: --dmax must be >= 1");
  ctx.note("dmax", std::to_string(dmax));
  auto csv_out = open_csv(ctx, "gauss_check.csv");
  dlab::CsvWriter csv(csv_out, {"D", "parity", "tau_re", "tau_im", "tau_sq_minus_chi_minus1_D"});
  double worst = 0.0;
  for (long long D = 1; D <= dmax; ++D) {
    for (const auto& chi : dlab::enumerate_real_primitive(D)) {
      auto tau = dlab::gauss_sum(chi);
      double re = static_cast<double>(tau.re);
      double im = static_cast<double>(tau.im);
      double target = static_cast<double>(chi.parity() * D);
      double res_re = re * re - im * im - target;
      double res_im = 2 * re * im;
      double resid = std::sqrt(res_re * res_re + res_im * res_im);
      worst = std::max(worst, resid);
      csv.row({std::to_string(D), std::to_string(chi.parity()), dlab::to_sci(tau.re, 25),
               dlab::to_sci(tau.im, 25), dlab::format_double(resid)});
    }
  }
  ctx.checks.push_back({"gauss-square-identity", worst <= 1e-12 ? "pass" : "fail",
                        "largest residual " + dlab::format_double(worst)});
  return finish(ctx, "gauss-check");
}

int run_hecke_table(RunContext& ctx, long long k, long long nmax) {
  if (nmax < 2) throw std::invalid_argument("hecke-table: --nmax must be >= 2");
  ctx.note("k", std::to_string(k));
  ctx.note("nmax", std::to_string(nmax));
  ctx.note("digits", std::to_string(ctx.digits));
  long long M = std::max(nmax, dlab::dim_cusp(k) + 10);
  auto forms = dlab::eigenforms(k, M, ctx.digits);
  auto csv_out = open_csv(ctx, "hecke_table.csv");
  dlab::CsvWriter csv(csv_out, {"k", "form_index", "n", "a_n", "lambda_n", "residual"});
  for (std::size_t i = 0; i < forms.size(); ++i)
    for (long long n = 1; n <= nmax; ++n)
      csv.row({std::to_string(k), std::to_string(i), std::to_string(n),
               dlab::to_sci(forms[i].a(n), 25), dlab::to_sci(forms[i].lambda(n), 25),
               dlab::to_sci(forms[i].residual, 6)});
  bool mult_ok = true;
  std::string detail = "table too short for the (2,3) product check";
  if (nmax >= 6) {
    double worst = 0.0;
    for (const auto& f : forms)
      worst = std::max(worst,
                       static_cast<double>(abs(f.lambda(2) * f.lambda(3) - f.lambda(6))));
    mult_ok = worst < 1e-20;
    detail = "largest (2,3) product defect " + dlab::format_double(worst);
  }
  ctx.checks.push_back({"hecke-multiplicativity", mult_ok ? "pass" : "fail", detail});
  return finish(ctx, "hecke-table");
}

int run_weights(RunContext& ctx, long long k, long long D, const std::string& parity,
                long long r) {
  ctx.note("k", std::to_string(k));
  ctx.note("chi", std::to_string(D));
  ctx.note("parity", parity);
  ctx.note("r", std::to_string(r));
  ctx.note("digits", std::to_string(ctx.digits));
  auto chi = pick_character(D, parity);
  dlab::FamilyOptions opts;
  opts.digits = ctx.digits;
  auto F = dlab::build_family(k, chi, r, opts);
  auto csv_out = open_csv(ctx, "weights.csv");
  dlab::CsvWriter csv(csv_out,
                      {"k", "form_index", "lambda_central", "norm", "weight", "tail_bound"});
  for (std::size_t i = 0; i < F.weights.size(); ++i)
    csv.row({std::to_string(k), std::to_string(i), dlab::to_sci(F.weights[i].lambda_central, 25),
             dlab::to_sci(F.weights[i].norm, 25), dlab::to_sci(F.weights[i].value, 25),
             dlab::to_sci(F.weights[i].tail_bound, 6)});
  ctx.checks.push_back({"family-nondegenerate", F.degenerate ? "fail" : "pass",
                        "total weight " + dlab::to_sci(F.total_weight, 10)});
  return finish(ctx, "weights");
}

int run_comb_verify(RunContext& ctx, long long nmax) {
  if (nmax < 0) throw std::invalid_argument("comb-verify: --nmax must be >= 0");
  ctx.note("nmax", std::to_string(nmax));
  const std::vector<dlab::Rat> phi0_grid = {dlab::Rat(0), dlab::Rat(1), dlab::Rat(-1, 2),
                                            dlab::Rat(3), dlab::Rat(7, 3)};
  const std::vector<dlab::Rat> var_grid = {dlab::Rat(0), dlab::Rat(1), dlab::Rat(1, 6),
                                           dlab::Rat(7), dlab::Rat(5, 2)};
  json report = json::array();
  bool all_ok = true;
  for (long long n = 0; n <= nmax; ++n) {
    bool ok = true;
    for (const auto& p0 : phi0_grid)
      for (const auto& v : var_grid)
        if (dlab::frakC(n, p0, v) != dlab::gaussian_moment(n, v)) ok = false;
    all_ok = all_ok && ok;
    // Representative point echoed for the report.
    std::ostringstream lhs, rhs;
    lhs << dlab::frakC(n, dlab::Rat(3), dlab::Rat(7));
    rhs << dlab::gaussian_moment(n, dlab::Rat(7));
    report.push_back(json{{"identity", "moment-collapse"},
                          {"n", n},
                          {"status", ok ? "pass" : "fail"},
                          {"lhs", lhs.str()},
                          {"rhs", rhs.str()}});
  }
  std::ofstream out(ctx.out_path("comb_verify.json"));
  if (!out) throw std::invalid_argument("cannot write to output directory " + ctx.out_dir);
  out << report.dump(2) << "\n";
  ctx.outputs.push_back("comb_verify.json");
  ctx.checks.push_back({"moment-collapse-grid", all_ok ? "pass" : "fail",
                        "orders 0..." + std::to_string(nmax) + " on the 5x5 rational grid"});
  return finish(ctx, "comb-verify");
}

int run_prime_sums(RunContext& ctx, const std::string& case_text, long long D,
                   const std::string& parity, double beta, const std::string& kind,
                   const std::string& qladder_text, long long r, long long level) {
  auto mn = parse_int_list(case_text);
  if (mn.size() != 2)
    throw std::invalid_argument("prime-sums: --case needs two comma-separated integers m,n");
  auto qs = parse_double_list(qladder_text);
  ctx.note("case", case_text);
  ctx.note("chi", std::to_string(D));
  ctx.note("parity", parity);
  ctx.note("beta", dlab::format_double(beta));
  ctx.note("kind", kind);
  ctx.note("qladder", qladder_text);
  ctx.note("r", std::to_string(r));
  ctx.note("level", std::to_string(level));
  auto chi = pick_character(D, parity);
  auto phi = make_test_function(ctx, kind, beta);

  auto csv_out = open_csv(ctx, "prime_sums.csv");
  dlab::CsvWriter csv(csv_out, {"Q", "value", "predicted", "deviation"});
  std::vector<double> devs;
  for (double Q : qs) {
    auto res = dlab::lemma_sum(mn[0], mn[1], chi, phi, Q, r, level);
    devs.push_back(res.deviation);
    csv.row({dlab::format_double(res.Q), dlab::format_double(res.value),
             dlab::format_double(res.predicted_limit), dlab::format_double(res.deviation)});
  }
  bool shrinking = true;
  for (std::size_t i = 1; i < devs.size(); ++i)
    if (!(devs[i] < devs[i - 1])) shrinking = false;
  std::ostringstream detail;
  detail << "deviations";
  for (double d : devs) detail << " " << dlab::format_double(d);
  ctx.checks.push_back(
      {"deviation-trend", shrinking ? "trend-pass" : "trend-fail", detail.str()});
  return finish(ctx, "prime-sums");
}

int run_trace_check(RunContext& ctx, long long m, long long D, const std::string& parity,
                    long long r, const std::string& kladder_text) {
  auto ks = parse_int_list(kladder_text);
  ctx.note("m", std::to_string(m));
  ctx.note("chi", std::to_string(D));
  ctx.note("parity", parity);
  ctx.note("r", std::to_string(r));
  ctx.note("kladder", kladder_text);
  ctx.note("digits", std::to_string(ctx.digits));
  auto chi = pick_character(D, parity);
  dlab::PrecisionGuard guard(static_cast<unsigned>(ctx.digits) + 20);
  dlab::Real main = dlab::trace_main_term(m, chi, r);

  auto csv_out = open_csv(ctx, "trace_check.csv");
  dlab::CsvWriter csv(csv_out, {"k", "m", "avg_lambda", "main_term", "gap"});
  std::vector<double> gaps;
  for (long long k : ks) {
    dlab::FamilyOptions opts;
    opts.digits = ctx.digits;
    auto F = dlab::build_family(k, chi, r, opts);
    dlab::Real avg = dlab::weighted_average_eigenvalue(F, m);
    double gap = static_cast<double>(abs(avg - main));
    gaps.push_back(gap);
    csv.row({std::to_string(k), std::to_string(m), dlab::to_sci(avg, 25),
             dlab::to_sci(main, 25), dlab::format_double(gap)});
  }
  bool shrinking = true;
  for (std::size_t i = 1; i < gaps.size(); ++i)
    if (!(gaps[i] < gaps[i - 1])) shrinking = false;
  std::ostringstream detail;
  detail << "gaps";
  for (double g : gaps) detail << " " << dlab::format_double(g);
  ctx.checks.push_back({"gap-trend", shrinking ? "trend-pass" : "trend-fail", detail.str()});
  return finish(ctx, "trace-check");
}

int run_moments(RunContext& ctx, long long n, double beta, const std::string& kind, long long D,
                const std::string& parity, long long r, const std::string& kladder_text) {
  auto ks = parse_int_list(kladder_text);
  ctx.note("n", std::to_string(n));
  ctx.note("beta", dlab::format_double(beta));
  ctx.note("kind", kind);
  ctx.note("chi", std::to_string(D));
  ctx.note("parity", parity);
  ctx.note("r", std::to_string(r));
  ctx.note("kladder", kladder_text);
  ctx.note("digits", std::to_string(ctx.digits));
  auto chi = pick_character(D, parity);
  auto phi = make_test_function(ctx, kind, beta);

  std::vector<dlab::FamilySnapshot> ladder;
  for (long long k : ks) {
    dlab::FamilyOptions opts;
    opts.digits = ctx.digits;
    ladder.push_back(dlab::build_family(k, chi, r, opts));
  }
  auto rep = dlab::centered_moment(ladder, phi, n);

  auto csv_out = open_csv(ctx, "moments.csv");
  dlab::CsvWriter csv(csv_out, {"k", "Q", "avg_density", "predicted_avg", "moment_n",
                                "predicted_moment", "residual"});
  for (const auto& row : rep.rows)
    csv.row({std::to_string(row.k), dlab::format_double(row.Q), dlab::to_sci(row.avg_density, 25),
             dlab::format_double(row.predicted_avg), dlab::to_sci(row.moment, 25),
             dlab::format_double(row.predicted_moment), dlab::to_sci(row.residual, 25)});
  std::ostringstream detail;
  detail << "residuals";
  for (const auto& row : rep.rows) detail << " " << dlab::to_sci(row.residual, 6);
  ctx.checks.push_back(
      {"residual-trend", rep.monotone_trend ? "trend-pass" : "trend-fail", detail.str()});
  return finish(ctx, "moments");
}

int run_rmt_compare(RunContext& ctx, const std::string& group_text, long long size,
                    long long samples, long long n, double beta, const std::string& kind) {
  ctx.note("group", group_text);
  ctx.note("size", std::to_string(size));
  ctx.note("samples", std::to_string(samples));
  ctx.note("n", std::to_string(n));
  ctx.note("beta", dlab::format_double(beta));
  ctx.note("kind", kind);
  ctx.note("seed", std::to_string(ctx.seed));
  auto group = dlab::parse_group(group_text);
  auto phi = make_test_function(ctx, kind, beta);

  auto est = dlab::centered_moment_mc(group, static_cast<int>(size), phi, n, samples, ctx.seed);
  double predicted = 0.0;
  if (n % 2 == 0) {
    double df = 1.0;
    for (long long j = n - 1; j > 1; j -= 2) df *= static_cast<double>(j);
    predicted = df * std::pow(phi.sigma2(), static_cast<double>(n) / 2.0);
  }

  auto csv_out = open_csv(ctx, "rmt_compare.csv");
  dlab::CsvWriter csv(csv_out, {"group", "size", "n", "estimate", "stderr", "predicted"});
  csv.row({dlab::group_name(group), std::to_string(size), std::to_string(n),
           dlab::format_double(est.estimate), dlab::format_double(est.std_error),
           dlab::format_double(predicted)});

  double gap = std::abs(est.estimate - predicted);
  bool ok = gap <= 3.0 * est.std_error;
  ctx.checks.push_back({"gaussian-match", ok ? "trend-pass" : "trend-fail",
                        "gap " + dlab::format_double(gap) + " vs 3*stderr " +
                            dlab::format_double(3.0 * est.std_error)});
  return finish(ctx, "rmt-compare");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"density laboratory pipelines"};
  app.require_subcommand(1);
  app.fallthrough();  // global flags are accepted after the subcommand name

  RunContext ctx;
  std::string config_path;
  auto* opt_seed = app.add_option("--seed", ctx.seed, "base random seed");
  auto* opt_digits = app.add_option("--digits", ctx.digits, "working decimal digits");
  auto* opt_strict = app.add_flag("--strict", ctx.strict, "trend failures fail the process");
  auto* opt_out = app.add_option("--out", ctx.out_dir, "output directory");
  app.add_option("--config", config_path, "flat key=value configuration file");

  // gauss-check
  auto* sub_gauss = app.add_subcommand("gauss-check", "quadratic gauss-sum square identity");
  long long dmax = 100;
  auto* opt_dmax = sub_gauss->add_option("--dmax", dmax, "largest modulus");

  // hecke-table
  auto* sub_hecke = app.add_subcommand("hecke-table", "eigenform coefficient tables");
  long long hk = 12, hnmax = 20;
  auto* opt_hk = sub_hecke->add_option("--k", hk, "weight");
  auto* opt_hnmax = sub_hecke->add_option("--nmax", hnmax, "table length");

  // weights
  auto* sub_weights = app.add_subcommand("weights", "family harmonic weights");
  long long wk = 12, wD = 1, wr = 1;
  std::string wparity = "even";
  auto* opt_wk = sub_weights->add_option("--k", wk, "weight");
  auto* opt_wD = sub_weights->add_option("--chi", wD, "character modulus");
  auto* opt_wpar = sub_weights->add_option("--parity", wparity, "character parity (even|odd)");
  auto* opt_wr = sub_weights->add_option("--r", wr, "coefficient shift");

  // comb-verify
  auto* sub_comb = app.add_subcommand("comb-verify", "combinatorial moment identities");
  long long cnmax = 12;
  auto* opt_cnmax = sub_comb->add_option("--nmax", cnmax, "largest moment order");

  // prime-sums
  auto* sub_prime = app.add_subcommand("prime-sums", "prime-sum limit cases");
  std::string pcase = "1,1", pqladder = "1e4,1e6,1e8", pkind = "fejer", pparity = "even";
  long long pD = 1, pr = 1, plevel = 1;
  double pbeta = 0.45;
  auto* opt_pcase = sub_prime->add_option("--case", pcase, "orders m,n");
  auto* opt_pD = sub_prime->add_option("--chi", pD, "character modulus");
  auto* opt_ppar = sub_prime->add_option("--parity", pparity, "character parity");
  auto* opt_pbeta = sub_prime->add_option("--beta", pbeta, "support half-width");
  auto* opt_pkind = sub_prime->add_option("--kind", pkind, "test-function kind");
  auto* opt_pq = sub_prime->add_option("--qladder", pqladder, "conductor scales");
  auto* opt_pr = sub_prime->add_option("--r", pr, "coefficient shift");
  auto* opt_plevel = sub_prime->add_option("--level", plevel, "level whose primes are skipped");

  // trace-check
  auto* sub_trace = app.add_subcommand("trace-check", "weighted eigenvalue averages");
  long long tm = 2, tD = 1, tr = 1;
  std::string tparity = "even", tkladder = "12,16,20";
  auto* opt_tm = sub_trace->add_option("--m", tm, "coefficient index");
  auto* opt_tD = sub_trace->add_option("--chi", tD, "character modulus");
  auto* opt_tpar = sub_trace->add_option("--parity", tparity, "character parity");
  auto* opt_tr = sub_trace->add_option("--r", tr, "coefficient shift");
  auto* opt_tk = sub_trace->add_option("--kladder", tkladder, "weight ladder");

  // moments
  auto* sub_moments = app.add_subcommand("moments", "centered moments of the density");
  long long mn = 2, mD = 1, mr = 1;
  std::string mparity = "even", mkladder = "12,16,20", mkind = "fejer";
  double mbeta = 0.2;
  auto* opt_mn = sub_moments->add_option("--n", mn, "moment order");
  auto* opt_mbeta = sub_moments->add_option("--beta", mbeta, "support half-width");
  auto* opt_mkind = sub_moments->add_option("--kind", mkind, "test-function kind");
  auto* opt_mD = sub_moments->add_option("--chi", mD, "character modulus");
  auto* opt_mpar = sub_moments->add_option("--parity", mparity, "character parity");
  auto* opt_mr = sub_moments->add_option("--r", mr, "coefficient shift");
  auto* opt_mk = sub_moments->add_option("--kladder", mkladder, "weight ladder");

  // rmt-compare
  auto* sub_rmt = app.add_subcommand("rmt-compare", "matrix-model moment comparison");
  std::string rgroup = "so-even", rkind = "fejer";
  long long rsize = 100, rsamples = 10000, rn = 2;
  double rbeta = 0.2;
  auto* opt_rgroup = sub_rmt->add_option("--group", rgroup, "symmetry class");
  auto* opt_rsize = sub_rmt->add_option("--size", rsize, "matrix size");
  auto* opt_rsamples = sub_rmt->add_option("--samples", rsamples, "monte carlo samples");
  auto* opt_rn = sub_rmt->add_option("--n", rn, "moment order");
  auto* opt_rbeta = sub_rmt->add_option("--beta", rbeta, "support half-width");
  auto* opt_rkind = sub_rmt->add_option("--kind", rkind, "test-function kind");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;  // bad flags / unknown subcommands are usage errors
  }

  try {
    if (!config_path.empty()) ctx.cfg = dlab::Config::from_file(config_path);

    cfg_override(opt_seed, ctx.cfg, "seed", ctx.seed);
    cfg_override(opt_digits, ctx.cfg, "digits", ctx.digits);
    cfg_override(opt_out, ctx.cfg, "out", ctx.out_dir);
    if (opt_strict->count() == 0 && ctx.cfg.has("strict"))
      ctx.strict = ctx.cfg.get("strict") == "true" || ctx.cfg.get("strict") == "1";

    if (const char* env = std::getenv("DENSITYLAB_THREADS")) {
      int n = std::atoi(env);
#ifdef _OPENMP
      if (n > 0) omp_set_num_threads(n);
#else
      (void)n;
#endif
    }

    std::filesystem::create_directories(ctx.out_dir);
    ctx.note("seed", std::to_string(ctx.seed));
    ctx.note("digits", std::to_string(ctx.digits));
    ctx.note("strict", ctx.strict ? "true" : "false");

    auto started = std::chrono::steady_clock::now();
    int rc = 0;
    std::string name;
    if (sub_gauss->parsed()) {
      name = "gauss-check";
      cfg_override(opt_dmax, ctx.cfg, "gauss-check.dmax", dmax);
      rc = run_gauss_check(ctx, dmax);
    } else if (sub_hecke->parsed()) {
      name = "hecke-table";
      cfg_override(opt_hk, ctx.cfg, "hecke-table.k", hk);
      cfg_override(opt_hnmax, ctx.cfg, "hecke-table.nmax", hnmax);
      rc = run_hecke_table(ctx, hk, hnmax);
    } else if (sub_weights->parsed()) {
      name = "weights";
      cfg_override(opt_wk, ctx.cfg, "weights.k", wk);
      cfg_override(opt_wD, ctx.cfg, "weights.chi", wD);
      cfg_override(opt_wpar, ctx.cfg, "weights.parity", wparity);
      cfg_override(opt_wr, ctx.cfg, "weights.r", wr);
      rc = run_weights(ctx, wk, wD, wparity, wr);
    } else if (sub_comb->parsed()) {
      name = "comb-verify";
      cfg_override(opt_cnmax, ctx.cfg, "comb-verify.nmax", cnmax);
      rc = run_comb_verify(ctx, cnmax);
    } else if (sub_prime->parsed()) {
      name = "prime-sums";
      cfg_override(opt_pcase, ctx.cfg, "prime-sums.case", pcase);
      cfg_override(opt_pD, ctx.cfg, "prime-sums.chi", pD);
      cfg_override(opt_ppar, ctx.cfg, "prime-sums.parity", pparity);
      cfg_override(opt_pbeta, ctx.cfg, "testfn.beta", pbeta);
      cfg_override(opt_pkind, ctx.cfg, "testfn.kind", pkind);
      cfg_override(opt_pq, ctx.cfg, "prime-sums.qladder", pqladder);
      cfg_override(opt_pr, ctx.cfg, "prime-sums.r", pr);
      cfg_override(opt_plevel, ctx.cfg, "prime-sums.level", plevel);
      rc = run_prime_sums(ctx, pcase, pD, pparity, pbeta, pkind, pqladder, pr, plevel);
    } else if (sub_trace->parsed()) {
      name = "trace-check";
      cfg_override(opt_tm, ctx.cfg, "trace-check.m", tm);
      cfg_override(opt_tD, ctx.cfg, "trace-check.chi", tD);
      cfg_override(opt_tpar, ctx.cfg, "trace-check.parity", tparity);
      cfg_override(opt_tr, ctx.cfg, "trace-check.r", tr);
      cfg_override(opt_tk, ctx.cfg, "trace-check.kladder", tkladder);
      rc = run_trace_check(ctx, tm, tD, tparity, tr, tkladder);
    } else if (sub_moments->parsed()) {
      name = "moments";
      cfg_override(opt_mn, ctx.cfg, "moments.n", mn);
      cfg_override(opt_mbeta, ctx.cfg, "testfn.beta", mbeta);
      cfg_override(opt_mkind, ctx.cfg, "testfn.kind", mkind);
      cfg_override(opt_mD, ctx.cfg, "moments.chi", mD);
      cfg_override(opt_mpar, ctx.cfg, "moments.parity", mparity);
      cfg_override(opt_mr, ctx.cfg, "moments.r", mr);
      cfg_override(opt_mk, ctx.cfg, "moments.kladder", mkladder);
      rc = run_moments(ctx, mn, mbeta, mkind, mD, mparity, mr, mkladder);
    } else if (sub_rmt->parsed()) {
      name = "rmt-compare";
      cfg_override(opt_rgroup, ctx.cfg, "rmt-compare.group", rgroup);
      cfg_override(opt_rsize, ctx.cfg, "rmt-compare.size", rsize);
      cfg_override(opt_rsamples, ctx.cfg, "rmt-compare.samples", rsamples);
      cfg_override(opt_rn, ctx.cfg, "rmt-compare.n", rn);
      cfg_override(opt_rbeta, ctx.cfg, "testfn.beta", rbeta);
      cfg_override(opt_rkind, ctx.cfg, "testfn.kind", rkind);
      rc = run_rmt_compare(ctx, rgroup, rsize, rsamples, rn, rbeta, rkind);
    }
    auto elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - started);
    std::cerr << "[time] " << name << ": " << elapsed.count() << " s\n";
    return rc;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 3;
  }
}
