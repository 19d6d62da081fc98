// sepca: command-line front end for the two-stage sparse PCA estimators.
//
// Exit codes: 0 success, 2 configuration error, 3 I/O error, 4 numerical failure.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "sepca/sepca.hpp"

using json = nlohmann::json;
using namespace sepca;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitIo = 3;
constexpr int kExitNumerical = 4;

void warn(const std::string& msg) { std::cerr << "sepca: warning: " << msg << '\n'; }

// Writes `text` to `path`, or to stdout when the path is empty.
void emit(const std::string& path, const std::string& text) {
  if (path.empty()) {
    std::cout << text;
    std::cout.flush();
    return;
  }
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError(path + ": cannot open for writing");
  out << text;
  out.flush();
  if (!out) throw IoError(path + ": write failed");
}

std::vector<std::size_t> iota_indices(std::size_t s) {
  std::vector<std::size_t> idx(s);
  for (std::size_t i = 0; i < s; ++i) idx[i] = i;
  return idx;
}

Vector read_vector_file(const std::string& path) {
  const DataMatrix m = io::read_matrix(path, io::Format::csv);
  if (m.rows() != 1 && m.cols() != 1) throw ConfigError(path + ": expected a single row or column");
  return Vector(m.values().begin(), m.values().end());
}

VProfile make_profile(const std::string& name, const std::string& custom_path) {
  VProfile prof;
  prof.kind = parse_v_kind(name);
  if (prof.kind == VProfile::Kind::custom) {
    if (custom_path.empty()) throw ConfigError("--v-profile custom needs --v-file");
    prof.custom = read_vector_file(custom_path);
  }
  return prof;
}

// ---------------------------------------------------------------------------
// Options shared by select / estimate

struct AlgorithmFlags {
  std::string algorithm = "sum";
  std::optional<double> sigma;
  bool estimate_sigma = false;
  std::string sum_variant = "exact";
  std::string hc_rule = "closure";
  double zeta = 1.02;
  double nu = std::exp(2.0);
  double xi1 = 1.0;
  bool svd_fallback = false;

  void add_to(CLI::App* app) {
    app->add_option("--algorithm,-a", algorithm, "sum, ell1, ell2, hc-sum, hc-ell2, fdr or svd-baseline")
        ->capture_default_str();
    app->add_option("--sigma", sigma, "known noise level");
    app->add_flag("--estimate-sigma", estimate_sigma, "estimate the noise level from the data");
    app->add_option("--sum-variant", sum_variant, "exact or table-bound")->capture_default_str();
    app->add_option("--hc-rule", hc_rule, "closure or literal")->capture_default_str();
    app->add_option("--zeta", zeta)->capture_default_str();
    app->add_option("--nu", nu)->capture_default_str();
    app->add_option("--xi1", xi1)->capture_default_str();
    app->add_flag("--svd-fallback", svd_fallback, "use the full SVD when nothing is selected");
  }

  AlgorithmOptions options() const {
    AlgorithmOptions o;
    o.sum_variant = parse_sum_variant(sum_variant);
    o.hc_rule = parse_hc_rule(hc_rule);
    o.zeta = zeta;
    o.nu = nu;
    o.xi1 = xi1;
    o.svd_fallback = svd_fallback;
    return o;
  }

  double resolve_sigma(const DataMatrix& x) const {
    if (estimate_sigma == sigma.has_value()) throw ConfigError("give exactly one of --sigma and --estimate-sigma");
    if (sigma) return *sigma;
    const SigmaEstimate est = sepca::estimate_sigma(x);
    if (est.degenerate) throw NumericalError("estimated noise level is zero (constant adjacent columns)");
    return est.value;
  }

  static SumVariant parse_sum_variant(const std::string& s) {
    if (s == "exact") return SumVariant::exact;
    if (s == "table-bound") return SumVariant::table_bound;
    throw ConfigError("unknown sum variant '" + s + "'");
  }
  static HcRule parse_hc_rule(const std::string& s) {
    if (s == "closure") return HcRule::downward_closed;
    if (s == "literal") return HcRule::literal;
    throw ConfigError("unknown HC rule '" + s + "'");
  }
};

// ---------------------------------------------------------------------------
// bench configuration file

std::vector<Algorithm> parse_algorithms(const json& j) {
  std::vector<Algorithm> out;
  for (const auto& a : j) out.push_back(parse_algorithm(a.get<std::string>()));
  return out;
}

USpec parse_u_spec(const json& j) {
  if (j.contains("sparsity")) return ExplicitSupport{iota_indices(j.at("sparsity").get<std::size_t>()), {}};
  if (j.contains("support")) {
    ExplicitSupport ex;
    ex.indices = j.at("support").get<std::vector<std::size_t>>();
    if (j.contains("values")) ex.values = j.at("values").get<Vector>();
    return ex;
  }
  if (j.contains("worst_case")) {
    const json& w = j.at("worst_case");
    return WorstCase{w.at("m").get<std::size_t>(), w.at("r").get<double>()};
  }
  throw ConfigError("u must give one of sparsity, support or worst_case");
}

struct BenchOutput {
  std::string path;
  std::string format = "csv";
};

ExperimentConfig parse_bench_config(const json& j, BenchOutput& out) {
  static const std::vector<std::string> known = {"p",        "sigma",       "n",           "theta",    "v_profile",
                                                 "v_custom", "u",           "algorithms",  "trials",   "seed",
                                                 "sigma_mode", "output",    "format",      "threads",  "sum_variant",
                                                 "hc_rule",  "zeta",        "nu",          "xi1",      "svd_fallback"};
  if (!j.is_object()) throw ConfigError("bench config must be a JSON object");
  for (const auto& [key, _] : j.items())
    if (std::find(known.begin(), known.end(), key) == known.end()) throw ConfigError("unknown config key '" + key + "'");

  ExperimentConfig cfg;
  cfg.p = j.value("p", cfg.p);
  cfg.sigma = j.value("sigma", cfg.sigma);
  if (j.contains("n")) cfg.n_grid = j.at("n").get<std::vector<std::size_t>>();
  if (j.contains("theta")) cfg.theta_grid = j.at("theta").get<Vector>();
  if (j.contains("v_profile")) cfg.v_profile.kind = parse_v_kind(j.at("v_profile").get<std::string>());
  if (cfg.v_profile.kind == VProfile::Kind::custom) {
    if (!j.contains("v_custom")) throw ConfigError("v_profile custom needs v_custom");
    cfg.v_profile.custom = j.at("v_custom").get<Vector>();
    for (std::size_t n : cfg.n_grid)
      if (n != cfg.v_profile.custom.size()) throw ConfigError("v_custom length must equal every n in the grid");
    make_v(cfg.v_profile, cfg.v_profile.custom.size(), warn);
  }
  if (j.contains("u")) cfg.u_spec = parse_u_spec(j.at("u"));
  if (j.contains("algorithms")) cfg.algorithms = parse_algorithms(j.at("algorithms"));
  cfg.trials = j.value("trials", cfg.trials);
  cfg.seed = j.value("seed", cfg.seed);
  if (j.contains("sigma_mode")) {
    const std::string m = j.at("sigma_mode").get<std::string>();
    if (m == "known") cfg.sigma_mode = SigmaMode::known;
    else if (m == "estimated") cfg.sigma_mode = SigmaMode::estimated;
    else throw ConfigError("sigma_mode must be known or estimated");
  }
  cfg.threads = j.value("threads", cfg.threads);
  cfg.options.sum_variant = AlgorithmFlags::parse_sum_variant(j.value("sum_variant", std::string("exact")));
  cfg.options.hc_rule = AlgorithmFlags::parse_hc_rule(j.value("hc_rule", std::string("closure")));
  cfg.options.zeta = j.value("zeta", cfg.options.zeta);
  cfg.options.nu = j.value("nu", cfg.options.nu);
  cfg.options.xi1 = j.value("xi1", cfg.options.xi1);
  cfg.options.svd_fallback = j.value("svd_fallback", cfg.options.svd_fallback);
  out.path = j.value("output", out.path);
  out.format = j.value("format", out.format);
  return cfg;
}

json estimate_to_json(const Estimate& e, double sigma) {
  json j;
  j["algorithm"] = to_string(e.selection.algorithm);
  j["sigma"] = sigma;
  j["selected"] = e.selection.selected;
  j["threshold"] = std::isfinite(e.selection.threshold) ? json(e.selection.threshold) : json(nullptr);
  j["theta_hat"] = e.theta_hat;
  j["empty_selection"] = e.empty_selection;
  j["fell_back"] = e.fell_back;
  j["svd_iterations"] = e.svd_iterations;
  j["svd_converged"] = e.svd_converged;
  j["u_hat"] = e.u_hat;
  j["v_hat"] = e.v_hat;
  return j;
}

int run(int argc, char** argv) {
  CLI::App app{"Sparse equisigned PCA: two-stage estimators, simulation harness and theory curves"};
  app.require_subcommand(1);

  // generate ---------------------------------------------------------------
  auto* gen = app.add_subcommand("generate", "draw X = theta u v^T + sigma G");
  std::size_t g_p = 0, g_n = 0, g_s = 1;
  double g_theta = 0.0, g_sigma = 1.0;
  std::string g_v = "rise-fall", g_vfile, g_out, g_truth, g_support;
  std::optional<std::size_t> g_wc_m;
  double g_wc_r = 0.0;
  std::uint64_t g_seed = 1;
  gen->add_option("--p", g_p, "number of rows")->required();
  gen->add_option("--n", g_n, "number of columns")->required();
  gen->add_option("--theta", g_theta)->required();
  gen->add_option("--sigma", g_sigma)->capture_default_str();
  gen->add_option("--sparsity", g_s, "support = first s coordinates")->capture_default_str();
  gen->add_option("--support", g_support, "comma-separated 0-based support (overrides --sparsity)");
  gen->add_option("--worst-case-m", g_wc_m, "worst-case u with m small coordinates");
  gen->add_option("--worst-case-r", g_wc_r, "worst-case tail mass r in [0, 1)");
  gen->add_option("--v-profile", g_v, "rise-fall, power-decay, uniform or custom")->capture_default_str();
  gen->add_option("--v-file", g_vfile, "CSV vector for --v-profile custom");
  gen->add_option("--seed", g_seed)->capture_default_str();
  gen->add_option("--out,-o", g_out, "matrix path (.bin selects the binary format)")->required();
  gen->add_option("--truth", g_truth, "write u, v, theta, sigma as JSON here");

  // select / estimate --------------------------------------------------------
  auto* sel = app.add_subcommand("select", "first stage only: print the selected rows");
  auto* est = app.add_subcommand("estimate", "two-stage estimate of u, v and theta");
  std::string in_path, out_path;
  AlgorithmFlags sel_flags, est_flags;
  for (auto [cmd, flags] : {std::pair{sel, &sel_flags}, std::pair{est, &est_flags}}) {
    cmd->add_option("--in,-i", in_path, "matrix path")->required();
    cmd->add_option("--out,-o", out_path, "JSON output path (default stdout)");
    flags->add_to(cmd);
  }

  // bench ------------------------------------------------------------------
  auto* bench = app.add_subcommand("bench", "Monte-Carlo experiment over an (n, theta) grid");
  std::string b_config, b_out, b_format, b_sigma_mode;
  std::optional<std::size_t> b_trials;
  std::optional<std::uint64_t> b_seed;
  std::optional<unsigned> b_threads;
  bench->add_option("--config,-c", b_config, "JSON configuration file")->required();
  bench->add_option("--trials", b_trials);
  bench->add_option("--seed", b_seed);
  bench->add_option("--out,-o", b_out, "result path (default stdout)");
  bench->add_option("--format", b_format, "csv or jsonl");
  bench->add_option("--threads", b_threads, "worker threads (default SEPCA_THREADS or all cores)");
  bench->add_option("--sigma-mode", b_sigma_mode, "known or estimated");

  // theory -----------------------------------------------------------------
  auto* theory = app.add_subcommand("theory", "detection boundaries beta_crit over an n grid");
  TheoryConfig t_cfg;
  std::vector<std::size_t> t_n;
  std::vector<std::string> t_algs;
  std::string t_v = "rise-fall", t_vfile, t_format = "csv", t_out;
  std::optional<double> t_beta;
  std::optional<std::size_t> t_khat;
  theory->add_option("--p", t_cfg.p)->capture_default_str();
  theory->add_option("--n", t_n, "grid of n")->delimiter(',')->required();
  theory->add_option("--sigma", t_cfg.sigma)->capture_default_str();
  theory->add_option("--v-profile", t_v)->capture_default_str();
  theory->add_option("--algorithms", t_algs)->delimiter(',');
  theory->add_option("--sparsity", t_cfg.sparsity)->capture_default_str();
  theory->add_option("--beta", t_beta, "sparsity index for Higher Criticism, in (1/2, 1)");
  theory->add_option("--k-hat", t_khat, "selected-set size for the fdr boundary");
  theory->add_option("--zeta", t_cfg.zeta)->capture_default_str();
  theory->add_option("--nu", t_cfg.nu)->capture_default_str();
  theory->add_option("--format", t_format, "csv or jsonl")->capture_default_str();
  theory->add_option("--out,-o", t_out);

  // geometry ---------------------------------------------------------------
  auto* geo = app.add_subcommand("geometry", "compare detection regions of two selectors");
  std::string geo_a, geo_b, geo_v;
  std::size_t geo_n = 0, geo_p = 0;
  GeometryParams geo_params;
  geo->add_option("--a", geo_a)->required();
  geo->add_option("--b", geo_b)->required();
  geo->add_option("--n", geo_n)->required();
  geo->add_option("--p", geo_p)->required();
  geo->add_option("--beta", geo_params.beta_sparsity)->capture_default_str();
  geo->add_option("--k-hat", geo_params.k_hat)->capture_default_str();
  geo->add_option("--zeta", geo_params.zeta)->capture_default_str();
  geo->add_option("--nu", geo_params.nu)->capture_default_str();
  geo->add_option("--v-profile", geo_v, "compute theta(v) for this profile");

  // sigma ------------------------------------------------------------------
  auto* sig = app.add_subcommand("sigma", "robust noise level estimate");
  std::string s_in;
  sig->add_option("--in,-i", s_in)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  if (gen->parsed()) {
    USpec spec = ExplicitSupport{iota_indices(g_s), {}};
    if (!g_support.empty()) {
      ExplicitSupport ex;
      std::stringstream ss(g_support);
      for (std::string tok; std::getline(ss, tok, ',');) ex.indices.push_back(std::stoul(tok));
      spec = ex;
    }
    if (g_wc_m) spec = WorstCase{*g_wc_m, g_wc_r};
    const Vector u = make_u(g_p, spec);
    const Vector v = make_v(make_profile(g_v, g_vfile), g_n, warn);
    const SignalModel model(g_theta, u, v, g_sigma, is_equisigned(v));
    io::write_matrix(g_out, generate_data(model, g_seed));
    if (!g_truth.empty()) {
      json t = {{"theta", g_theta}, {"sigma", g_sigma}, {"seed", g_seed}, {"u", u}, {"v", v},
                {"support", model.support()}};
      emit(g_truth, t.dump() + "\n");
    }
    return 0;
  }

  if (sel->parsed() || est->parsed()) {
    const AlgorithmFlags& flags = sel->parsed() ? sel_flags : est_flags;
    const DataMatrix x = io::read_matrix(in_path);
    const double sigma = flags.resolve_sigma(x);
    const Algorithm alg = parse_algorithm(flags.algorithm);
    json j;
    if (sel->parsed()) {
      const SelectionResult r = select(x, alg, sigma, flags.options());
      j["algorithm"] = to_string(alg);
      j["sigma"] = sigma;
      j["selected"] = r.selected;
      j["threshold"] = std::isfinite(r.threshold) ? json(r.threshold) : json(nullptr);
    } else {
      j = estimate_to_json(run_algorithm(x, alg, sigma, flags.options()), sigma);
    }
    emit(out_path, j.dump() + "\n");
    return 0;
  }

  if (bench->parsed()) {
    std::ifstream in(b_config);
    if (!in) throw IoError(b_config + ": cannot open for reading");
    json j;
    try {
      j = json::parse(in);
    } catch (const json::parse_error& e) {
      throw ConfigError(b_config + ": " + e.what());
    }
    BenchOutput out;
    ExperimentConfig cfg;
    try {
      cfg = parse_bench_config(j, out);
    } catch (const json::exception& e) {
      throw ConfigError(b_config + ": " + e.what());
    }
    if (b_trials) cfg.trials = *b_trials;
    if (b_seed) cfg.seed = *b_seed;
    if (b_threads) cfg.threads = *b_threads;
    if (!b_out.empty()) out.path = b_out;
    if (!b_format.empty()) out.format = b_format;
    if (!b_sigma_mode.empty()) {
      if (b_sigma_mode == "known") cfg.sigma_mode = SigmaMode::known;
      else if (b_sigma_mode == "estimated") cfg.sigma_mode = SigmaMode::estimated;
      else throw ConfigError("--sigma-mode must be known or estimated");
    }
    if (out.format != "csv" && out.format != "jsonl") throw ConfigError("format must be csv or jsonl");
    const auto rows = run_experiment(cfg);
    std::ostringstream text;
    if (out.format == "csv") write_results_csv(text, rows);
    else write_results_jsonl(text, rows);
    emit(out.path, text.str());
    return 0;
  }

  if (theory->parsed()) {
    t_cfg.v_profile = make_profile(t_v, t_vfile);
    t_cfg.n_grid = t_n;
    t_cfg.beta_sparsity = t_beta;
    t_cfg.k_hat = t_khat;
    if (!t_algs.empty()) {
      t_cfg.algorithms.clear();
      for (const auto& a : t_algs) t_cfg.algorithms.push_back(parse_algorithm(a));
    }
    if (t_format != "csv" && t_format != "jsonl") throw ConfigError("format must be csv or jsonl");
    const auto rows = theory_curves(t_cfg);
    std::ostringstream text;
    if (t_format == "csv") write_theory_csv(text, rows);
    else write_theory_jsonl(text, rows);
    emit(t_out, text.str());
    return 0;
  }

  if (geo->parsed()) {
    if (!geo_v.empty()) geo_params.v = make_v(make_profile(geo_v, ""), geo_n);
    const GeometryReport r = geometry_compare(parse_algorithm(geo_a), parse_algorithm(geo_b), geo_n, geo_p, geo_params);
    const auto num = [](double x) { return std::isfinite(x) ? json(x) : json(nullptr); };
    json j = {{"a", to_string(r.a)},
              {"b", to_string(r.b)},
              {"r", num(r.r)},
              {"r_minus_h", num(r.r_minus_h)},
              {"h", num(r.h)},
              {"cos_theta_lim", num(r.cos_theta_lim)},
              {"theta_lim", num(r.theta_lim)},
              {"cap_exists", r.cap_exists},
              {"theta_v", r.theta_v ? json(*r.theta_v) : json(nullptr)},
              {"ratio", num(r.ratio)},
              {"preferred", r.preferred ? json(to_string(*r.preferred)) : json(nullptr)}};
    std::cout << j.dump() << '\n';
    return 0;
  }

  if (sig->parsed()) {
    const SigmaEstimate e = estimate_sigma(io::read_matrix(s_in));
    std::cout << json{{"sigma_hat", e.value}, {"degenerate", e.degenerate}}.dump() << '\n';
    return 0;
  }
  return kExitConfig;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const IoError& e) {
    std::cerr << "sepca: I/O error: " << e.what() << '\n';
    return kExitIo;
  } catch (const NumericalError& e) {
    std::cerr << "sepca: numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const std::invalid_argument& e) {
    std::cerr << "sepca: configuration error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::domain_error& e) {
    std::cerr << "sepca: configuration error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::out_of_range& e) {
    std::cerr << "sepca: configuration error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "sepca: numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  }
}
