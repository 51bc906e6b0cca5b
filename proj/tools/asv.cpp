// asv: fit, simulate, evaluate, theory checks and manifest replay.
//
// Exit codes: 0 success, 1 bad flags / failed check / replay mismatch, 2 malformed or unreadable
// input, 3 chain divergence.

#include <openssl/evp.h>

#include <CLI11.hpp>
#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <json.hpp>
#include <limits>
#include <mutex>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "asv/asv.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitInput = 2;
constexpr int kExitDiverged = 3;

constexpr const char* kManifestSchema = "asv-run-manifest/1";

class IoError : public asv::Error {
 public:
  using Error::Error;
};

std::string sha256_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw IoError("cannot read '" + p.string() + "'");
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr);
  char buf[1 << 16];
  while (in) {
    in.read(buf, sizeof buf);
    if (in.gcount() > 0) EVP_DigestUpdate(ctx, buf, static_cast<std::size_t>(in.gcount()));
  }
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx, md, &len);
  EVP_MD_CTX_free(ctx);
  std::ostringstream hex;
  for (unsigned int i = 0; i < len; ++i) hex << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(md[i]);
  return hex.str();
}

std::string utc_now() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::ofstream open_out(const fs::path& p) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write '" + p.string() + "'");
  return out;
}

/// Collects written files and emits manifest.json next to them.
class Manifest {
 public:
  Manifest(std::vector<std::string> argv, std::string subcommand)
      : argv_(std::move(argv)), subcommand_(std::move(subcommand)), start_(std::chrono::steady_clock::now()), started_(utc_now()) {}

  json spec = json::object();
  std::uint64_t seed = 0;

  void add(const fs::path& p) { files_.push_back(p); }

  void write(const fs::path& dir) const {
    json m;
    m["schema"] = kManifestSchema;
    m["tool_version"] = asv::kVersion;
    m["subcommand"] = subcommand_;
    m["command"] = argv_;
    m["spec"] = spec;
    m["seed"] = seed;
    m["started_utc"] = started_;
    m["wall_time_seconds"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    json arts = json::array();
    for (const auto& f : files_)
      arts.push_back({{"path", fs::relative(f, dir).generic_string()}, {"bytes", fs::file_size(f)}, {"sha256", sha256_file(f)}});
    m["artifacts"] = arts;
    auto out = open_out(dir / "manifest.json");
    out << m.dump(2) << '\n';
  }

 private:
  std::vector<std::string> argv_;
  std::string subcommand_;
  std::chrono::steady_clock::time_point start_;
  std::string started_;
  std::vector<fs::path> files_;
};

// ---------------------------------------------------------------- fit

struct FitOptions {
  std::string input;
  std::string model = "asv_dhs";
  std::string column;
  std::string label_column;
  int k = 1;
  int k_beta = 2;
  std::size_t burn = 20000;
  std::size_t draws = 5000;
  std::size_t thin = 1;
  std::uint64_t seed = 1;
  double offset = 1e-8;
  std::string center = "none";
  std::string phi_prior = "beta10_2";
  std::string mu_update = "displayed";
  std::string out;
};

asv::TimeSeries read_series(const FitOptions& o) {
  const auto table = asv::csv::read_file(o.input);
  std::size_t value_col = asv::csv::Table::npos, label_col = asv::csv::Table::npos;
  auto named = [&](const std::string& name) {
    const auto i = table.find(name);
    if (i == asv::csv::Table::npos) throw asv::csv::CsvError("no column named '" + name + "' in '" + o.input + "'");
    return i;
  };
  if (!o.column.empty()) {
    value_col = named(o.column);
    if (!o.label_column.empty())
      label_col = named(o.label_column);
    else if (table.header.size() == 2)
      label_col = 1 - value_col;
  } else if (table.header.size() == 1) {
    value_col = 0;
  } else if (table.header.size() == 2) {
    label_col = 0;
    value_col = 1;
  } else {
    throw asv::csv::CsvError("'" + o.input + "' has " + std::to_string(table.header.size()) +
                             " columns; pick the value column with --column");
  }
  asv::TimeSeries ts;
  ts.values = table.numeric_column(value_col);
  if (label_col != asv::csv::Table::npos)
    for (const auto& row : table.rows) ts.labels.push_back(row[label_col]);
  try {
    ts.validate();
  } catch (const asv::InvalidArgument& e) {
    throw asv::csv::CsvError(e.what());
  }
  return ts;
}

void write_band(const fs::path& path, const std::string& prefix, const asv::TimeSeries& ts, const std::vector<double>& mean,
                const std::vector<double>& lo, const std::vector<double>& hi) {
  auto out = open_out(path);
  asv::csv::Writer w(out);
  w.row(std::vector<std::string>{"t", "label", prefix + "_mean", prefix + "_q05", prefix + "_q95"});
  for (std::size_t t = 0; t < mean.size(); ++t)
    w.row(t + 1, ts.labels.empty() ? std::string{} : ts.labels[t], mean[t], lo[t], hi[t]);
}

int cmd_fit(const FitOptions& o, const std::vector<std::string>& argv) {
  asv::ModelSpec spec;
  spec.variant = asv::parse_variant(o.model);
  spec.k = o.k;
  spec.k_beta = o.k_beta;
  spec.n_burn = o.burn;
  spec.n_draw = o.draws;
  spec.thin = o.thin;
  spec.seed = o.seed;
  spec.offset_c = o.offset;
  spec.phi_prior = o.phi_prior == "beta_half" ? asv::PhiPrior::Beta_half_half : asv::PhiPrior::Beta10_2;
  spec.mu_update = o.mu_update == "exact" ? asv::MuUpdate::Exact : asv::MuUpdate::Displayed;
  spec.validate();

  auto ts = read_series(o);
  if (o.center == "mean") {
    const double m = asv::stats::mean(ts.values);
    for (auto& y : ts.values) y -= m;
  }

  const auto draws = asv::run_chain(ts, spec);

  const fs::path dir(o.out);
  fs::create_directories(dir);
  Manifest manifest(argv, "fit");
  manifest.seed = spec.seed;
  manifest.spec = {{"model", std::string(asv::to_string(spec.variant))},
                   {"k", spec.k},
                   {"k_beta", spec.k_beta},
                   {"a", spec.a},
                   {"b", spec.b},
                   {"burn", spec.n_burn},
                   {"draws", spec.n_draw},
                   {"thin", spec.thin},
                   {"offset", spec.offset_c},
                   {"phi_prior", o.phi_prior},
                   {"mu_update", o.mu_update},
                   {"center", o.center},
                   {"input", o.input},
                   {"input_sha256", sha256_file(o.input)},
                   {"observations", ts.size()}};

  write_band(dir / "h_summary.csv", "h", ts, draws.mean("h"), draws.quantile("h", 0.05), draws.quantile("h", 0.95));
  manifest.add(dir / "h_summary.csv");

  const auto vol = asv::eval::volatility_estimate(draws);
  write_band(dir / "sigma_summary.csv", "sigma", ts, vol.point, vol.q05, vol.q95);
  manifest.add(dir / "sigma_summary.csv");

  {
    // The first k entries of v scale initial levels, not increments, so they are never flagged.
    const auto flags = asv::eval::kappa_flags(draws, asv::eval::kKappaThreshold, static_cast<std::size_t>(spec.k));
    std::vector<bool> flagged(flags.kappa_mean.size(), false);
    for (auto t : flags.flagged) flagged[t] = true;
    const auto v_mean = draws.mean("v");
    auto out = open_out(dir / "v_summary.csv");
    asv::csv::Writer w(out);
    w.row("t", "label", "v_mean", "kappa_mean", "flag");
    for (std::size_t t = 0; t < v_mean.size(); ++t)
      w.row(t + 1, ts.labels.empty() ? std::string{} : ts.labels[t], v_mean[t], flags.kappa_mean[t], flagged[t] ? 1 : 0);
    manifest.add(dir / "v_summary.csv");
  }

  if (draws.has("beta")) {
    write_band(dir / "beta_summary.csv", "beta", ts, draws.mean("beta"), draws.quantile("beta", 0.05),
               draws.quantile("beta", 0.95));
    manifest.add(dir / "beta_summary.csv");
  }

  {
    auto out = open_out(dir / "scalars.csv");
    asv::csv::Writer w(out);
    w.row("name", "mean", "sd");
    for (const char* name : {"mu", "phi", "xi_mu", "sigma2_c", "sigma2_h", "lambda2", "mu_beta", "phi_beta"})
      if (draws.has(name)) w.row(name, draws.mean(name)[0], draws.sd(name)[0]);
    manifest.add(dir / "scalars.csv");
  }

  manifest.write(dir);
  std::cout << "fit " << asv::to_string(spec.variant) << ": " << ts.size() << " observations, " << draws.rows()
            << " retained draws -> " << dir.string() << '\n';
  return kExitOk;
}

// ---------------------------------------------------------------- simulate

struct SimOptions {
  int dgp = 1;
  std::size_t length = 1000;
  std::size_t paths = 1;
  std::uint64_t seed = 1;
  unsigned jobs = 1;
  std::string out;
};

std::string path_file_name(int dgp, std::size_t path) {
  std::ostringstream s;
  s << "dgp" << dgp << "_path" << std::setw(4) << std::setfill('0') << path << ".csv";
  return s.str();
}

int cmd_simulate(const SimOptions& o, const std::vector<std::string>& argv) {
  if (o.dgp < 1 || o.dgp > 8) throw asv::InvalidArgument("--dgp must be in 1..8");
  if (o.length < 1 || o.paths < 1) throw asv::InvalidArgument("--t and --paths must be positive");
  const fs::path dir(o.out);
  fs::create_directories(dir);

  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (std::size_t p = next++; p < o.paths; p = next++) {
      try {
        const auto path = asv::sim::generate(asv::sim::DGPSpec{o.dgp, o.length, o.seed}, p);
        auto out = open_out(dir / path_file_name(o.dgp, p));
        asv::csv::Writer w(out);
        w.row("t", "y", "sigma_true", "regime");
        for (std::size_t t = 0; t < o.length; ++t)
          w.row(t + 1, path.y[t], path.sigma_true[t], path.regime.empty() ? std::string{} : std::to_string(path.regime[t]));
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  const unsigned jobs = std::max(1u, std::min<unsigned>(o.jobs, static_cast<unsigned>(o.paths)));
  std::vector<std::thread> pool;
  for (unsigned j = 1; j < jobs; ++j) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);

  Manifest manifest(argv, "simulate");
  manifest.seed = o.seed;
  manifest.spec = {{"dgp", o.dgp}, {"t", o.length}, {"paths", o.paths}};
  for (std::size_t p = 0; p < o.paths; ++p) manifest.add(dir / path_file_name(o.dgp, p));
  manifest.write(dir);
  std::cout << "simulate dgp " << o.dgp << ": " << o.paths << " paths of length " << o.length << " -> " << dir.string() << '\n';
  return kExitOk;
}

// ---------------------------------------------------------------- evaluate

struct EvalOptions {
  std::vector<std::string> pairs;  // truth.csv estimate-dir [truth.csv estimate-dir ...]
  std::string out;
};

std::vector<double> named_numeric(const asv::csv::Table& t, const std::string& name, const std::string& file) {
  const auto i = t.find(name);
  if (i == asv::csv::Table::npos) throw asv::csv::CsvError("'" + file + "' has no column '" + name + "'");
  return t.numeric_column(i);
}

int cmd_evaluate(const EvalOptions& o) {
  if (o.pairs.size() < 2 || o.pairs.size() % 2 != 0)
    throw asv::InvalidArgument("evaluate expects pairs of TRUTH_CSV ESTIMATE_DIR");
  struct Row {
    std::string truth, estimate;
    asv::eval::Metrics m;
    std::optional<asv::eval::SummaryStats> s;
  };
  std::vector<Row> rows;
  for (std::size_t i = 0; i < o.pairs.size(); i += 2) {
    const std::string truth_file = o.pairs[i];
    const fs::path est_dir(o.pairs[i + 1]);
    const auto truth = named_numeric(asv::csv::read_file(truth_file), "sigma_true", truth_file);
    const std::string sigma_file = (est_dir / "sigma_summary.csv").string();
    const auto st = asv::csv::read_file(sigma_file);
    asv::eval::VolEstimate est{named_numeric(st, "sigma_mean", sigma_file), named_numeric(st, "sigma_q05", sigma_file),
                               named_numeric(st, "sigma_q95", sigma_file)};
    if (truth.size() != est.size())
      throw asv::csv::CsvError("'" + truth_file + "' has " + std::to_string(truth.size()) + " rows but '" + sigma_file +
                               "' has " + std::to_string(est.size()));
    Row r{truth_file, est_dir.string(), asv::eval::metrics(truth, est), std::nullopt};
    const fs::path h_file = est_dir / "h_summary.csv";
    if (fs::exists(h_file)) r.s = asv::eval::summary_stats(named_numeric(asv::csv::read_file(h_file.string()), "h_mean", h_file.string()));
    rows.push_back(std::move(r));
  }

  std::ostringstream buf;
  asv::csv::Writer w(buf);
  w.row(std::vector<std::string>{"row", "truth", "estimate", "mae", "ec", "mciw", "mean_abs_diff", "excess_kurtosis",
                                 "cp_count", "cp_undefined"});
  auto opt = [](const std::optional<asv::eval::SummaryStats>& s, auto f) { return s ? f(*s) : std::string{}; };
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& r = rows[i];
    w.row(std::to_string(i + 1), r.truth, r.estimate, r.m.mae, r.m.ec, r.m.mciw,
          opt(r.s, [](const auto& s) { return asv::csv::format(s.mean_abs_diff); }),
          opt(r.s, [](const auto& s) { return asv::csv::format(s.excess_kurtosis); }),
          opt(r.s, [](const auto& s) { return std::to_string(s.cp_count); }),
          opt(r.s, [](const auto& s) { return std::string(s.cp_undefined ? "1" : "0"); }));
  }
  if (rows.size() >= 2) {
    std::vector<double> mae, ec, mciw;
    for (const auto& r : rows) {
      mae.push_back(r.m.mae);
      ec.push_back(r.m.ec);
      mciw.push_back(r.m.mciw);
    }
    using asv::stats::mean;
    using asv::stats::sd;
    w.row("mean", "", "", mean(mae), mean(ec), mean(mciw), "", "", "", "");
    w.row("sd", "", "", sd(mae), sd(ec), sd(mciw), "", "", "", "");
  }

  if (o.out.empty()) {
    std::cout << buf.str();
  } else {
    const fs::path p(o.out);
    if (p.has_parent_path()) fs::create_directories(p.parent_path());
    auto out = open_out(p);
    out << buf.str();
  }
  return kExitOk;
}

// ---------------------------------------------------------------- theory

struct CheckResult {
  std::string name;
  bool pass;
  std::string detail;
};

std::string num(double x) { return asv::csv::format(x); }

std::vector<CheckResult> density_checks() {
  using namespace asv::dsp;
  constexpr double inf = std::numeric_limits<double>::infinity();
  constexpr double tol = 1e-6;
  std::vector<CheckResult> out;
  auto norm = [&](const std::string& name, double integral) {
    const double err = std::abs(integral - 1.0);
    out.push_back({"density/" + name, err < tol, "|integral - 1| = " + num(err) + " (tol " + num(tol) + ")"});
  };
  norm("v", integrate(stationary_density_v, -inf, inf));
  norm("lambda", integrate(stationary_density_lambda, 0.0, inf));
  norm("kappa", integrate_singular(stationary_density_kappa, 0.0, 1.0));
  norm("horseshoe_lambda", integrate(horseshoe_density_lambda, 0.0, inf));
  norm("horseshoe_kappa", integrate_singular(horseshoe_density_kappa, 0.0, 1.0));
  const auto [lo, hi] = crossing_points();
  const double gap = std::max(std::abs(stationary_density_lambda(lo) - horseshoe_density_lambda(lo)),
                              std::abs(stationary_density_lambda(hi) - horseshoe_density_lambda(hi)));
  out.push_back({"density/crossings", gap < 1e-12, "max density gap at crossings " + num(gap)});
  return out;
}

std::vector<CheckResult> bounds_checks() {
  std::vector<CheckResult> out;
  for (double dh : {0.1, 1.0, 3.0}) {
    const auto b = asv::dsp::marginal_bounds_delta_h(dh);
    const double f = asv::dsp::marginal_density_delta_h(dh);
    out.push_back({"bounds/dh=" + num(dh), b.lower < f && f < b.upper,
                   num(b.lower) + " < " + num(f) + " < " + num(b.upper)});
  }
  return out;
}

std::vector<CheckResult> stationary_checks() {
  constexpr std::size_t n = 200000, thin = 10;
  asv::Rng rng = asv::make_rng(20240101);
  const auto path = asv::dsp::forward_simulate_dsp({0.5, 0.0}, n * thin, rng, 200);
  std::vector<double> v;
  for (std::size_t t = 0; t < path.size(); t += thin) v.push_back(path[t]);
  const auto ks = asv::stats::ks_test(v, asv::dsp::stationary_cdf_v);
  const double target = asv::dsp::stationary_variance(0.5);
  const double rel = std::abs(asv::stats::variance(v) / target - 1.0);
  return {{"stationary/ks", ks.p_value > 0.01, "p = " + num(ks.p_value) + " (alpha 0.01)"},
          {"stationary/variance", rel < 0.02, "relative error " + num(rel) + " (tol 0.02)"}};
}

int cmd_theory(const std::string& check) {
  std::vector<CheckResult> results;
  auto append = [&](std::vector<CheckResult> r) { results.insert(results.end(), r.begin(), r.end()); };
  if (check == "all" || check == "density") append(density_checks());
  if (check == "all" || check == "bounds") append(bounds_checks());
  if (check == "all" || check == "stationary") append(stationary_checks());
  bool ok = true;
  for (const auto& r : results) {
    std::cout << (r.pass ? "PASS " : "FAIL ") << r.name << ": " << r.detail << '\n';
    ok = ok && r.pass;
  }
  if (!ok) {
    std::cerr << "theory: failing checks:";
    for (const auto& r : results)
      if (!r.pass) std::cerr << ' ' << r.name;
    std::cerr << '\n';
  }
  return ok ? kExitOk : kExitUsage;
}

// ---------------------------------------------------------------- replay

int dispatch(std::vector<std::string> args);

int cmd_replay(const std::string& manifest_path, const std::string& into) {
  std::ifstream in(manifest_path);
  if (!in) throw IoError("cannot open '" + manifest_path + "'");
  json m;
  try {
    m = json::parse(in);
  } catch (const json::exception& e) {
    throw asv::csv::CsvError(std::string("manifest is not valid JSON: ") + e.what());
  }
  if (m.value("schema", "") != kManifestSchema) throw asv::csv::CsvError("unrecognised manifest schema");
  auto args = m.at("command").get<std::vector<std::string>>();
  const fs::path recorded_dir = fs::path(manifest_path).parent_path();
  fs::path out_dir = recorded_dir;
  if (!into.empty()) {
    out_dir = into;
    auto it = std::find(args.begin(), args.end(), "--out");
    if (it == args.end() || it + 1 == args.end()) throw asv::InvalidArgument("manifest command has no --out to redirect");
    *(it + 1) = into;
  }
  std::vector<std::pair<std::string, std::string>> expected;
  for (const auto& a : m.at("artifacts")) expected.emplace_back(a.at("path").get<std::string>(), a.at("sha256").get<std::string>());

  const int rc = dispatch(args);
  if (rc != kExitOk) return rc;
  int mismatches = 0;
  for (const auto& [rel, hash] : expected) {
    const fs::path p = out_dir / rel;
    const std::string got = fs::exists(p) ? sha256_file(p) : std::string("missing");
    if (got != hash) {
      ++mismatches;
      std::cerr << "replay: " << rel << " differs (expected " << hash << ", got " << got << ")\n";
    }
  }
  std::cout << "replay: " << expected.size() - static_cast<std::size_t>(mismatches) << "/" << expected.size()
            << " artifacts reproduced\n";
  return mismatches == 0 ? kExitOk : kExitUsage;
}

// ---------------------------------------------------------------- entry

int dispatch(std::vector<std::string> args) {
  const std::vector<std::string> argv = args;
  CLI::App app{"Adaptive stochastic volatility with dynamic shrinkage process priors"};
  app.set_config("--config", "", "Read options from a TOML/INI file");
  app.require_subcommand(1);
  app.set_version_flag("--version", asv::kVersion);

  FitOptions fit;
  auto* fit_cmd = app.add_subcommand("fit", "Fit a model to a CSV series");
  fit_cmd->add_option("input", fit.input, "CSV with a header and one value column (optional label column)")->required();
  fit_cmd->add_option("--model", fit.model, "rwsv|rwsv_bl|asv_hs|asv_dhs|asv_hs_n|asv_dhs_n|btf_asv")->capture_default_str();
  fit_cmd->add_option("--column", fit.column, "Value column name");
  fit_cmd->add_option("--label-column", fit.label_column, "Label column name");
  fit_cmd->add_option("--k", fit.k, "Differencing order of the log-variance prior")->capture_default_str();
  fit_cmd->add_option("--k-beta", fit.k_beta, "Differencing order of the mean prior (btf_asv)")->capture_default_str();
  fit_cmd->add_option("--burn", fit.burn, "Burn-in sweeps")->capture_default_str();
  fit_cmd->add_option("--draws", fit.draws, "Post-burn-in sweeps")->capture_default_str();
  fit_cmd->add_option("--thin", fit.thin, "Keep every thin-th draw")->capture_default_str()->check(CLI::PositiveNumber);
  fit_cmd->add_option("--seed", fit.seed, "RNG seed")->capture_default_str();
  fit_cmd->add_option("--offset", fit.offset, "Offset c in log(y^2 + c)")->capture_default_str();
  fit_cmd->add_option("--center", fit.center, "Subtract the sample mean first")->check(CLI::IsMember({"none", "mean"}))->capture_default_str();
  fit_cmd->add_option("--phi-prior", fit.phi_prior, "Prior on (phi + 1) / 2")
      ->check(CLI::IsMember({"beta10_2", "beta_half"}))
      ->capture_default_str();
  fit_cmd->add_option("--mu-update", fit.mu_update, "mu conditional")->check(CLI::IsMember({"displayed", "exact"}))->capture_default_str();
  fit_cmd->add_option("--out", fit.out, "Output directory")->required();

  SimOptions sim;
  auto* sim_cmd = app.add_subcommand("simulate", "Simulate paths from a data-generating process");
  sim_cmd->add_option("--dgp", sim.dgp, "Process id 1..8")->required()->check(CLI::Range(1, 8));
  sim_cmd->add_option("--t", sim.length, "Path length")->capture_default_str();
  sim_cmd->add_option("--paths", sim.paths, "Number of paths")->capture_default_str();
  sim_cmd->add_option("--seed", sim.seed, "RNG seed")->capture_default_str();
  sim_cmd->add_option("--jobs", sim.jobs, "Worker threads")->capture_default_str();
  sim_cmd->add_option("--out", sim.out, "Output directory")->required();

  EvalOptions ev;
  auto* eval_cmd = app.add_subcommand("evaluate", "Score fitted volatility against simulated truth");
  eval_cmd->add_option("pairs", ev.pairs, "TRUTH_CSV ESTIMATE_DIR [TRUTH_CSV ESTIMATE_DIR ...]")->required();
  eval_cmd->add_option("--out", ev.out, "Metrics CSV (stdout if omitted)");

  std::string check = "all";
  auto* theory_cmd = app.add_subcommand("theory", "Numerical checks of the shrinkage-process theory");
  theory_cmd->add_option("--check", check, "Which checks to run")
      ->check(CLI::IsMember({"all", "density", "bounds", "stationary"}))
      ->capture_default_str();

  std::string manifest_path, into;
  auto* replay_cmd = app.add_subcommand("replay", "Re-run a manifest and compare artifact hashes");
  replay_cmd->add_option("manifest", manifest_path, "manifest.json")->required();
  replay_cmd->add_option("--into", into, "Write into this directory instead of the recorded one");

  std::reverse(args.begin(), args.end());
  try {
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*fit_cmd) return cmd_fit(fit, argv);
    if (*sim_cmd) return cmd_simulate(sim, argv);
    if (*eval_cmd) return cmd_evaluate(ev);
    if (*theory_cmd) return cmd_theory(check);
    if (*replay_cmd) return cmd_replay(manifest_path, into);
  } catch (const asv::DivergenceError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitDiverged;
  } catch (const asv::csv::CsvError& e) {
    std::cerr << "error: malformed input: " << e.what() << '\n';
    return kExitInput;
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInput;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInput;
  } catch (const asv::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  return kExitUsage;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return dispatch(std::vector<std::string>(argv + 1, argv + argc));
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  }
}
