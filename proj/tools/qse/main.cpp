#include "qse/errors.hpp"
#include "qse/estimation.hpp"
#include "qse/information_bounds.hpp"
#include "qse/io.hpp"
#include "qse/simulation.hpp"
#include "qse/tomography.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace {

using namespace qse;

void print_matrix(std::ostream& out, const char* label, const Matrix4c& m, bool imaginary) {
  out << label << ":\n";
  for (int r = 0; r < 4; ++r) {
    out << " ";
    for (int c = 0; c < 4; ++c) out << ' ' << std::setw(10) << (imaginary ? m(r, c).imag() : m(r, c).real());
    out << '\n';
  }
}

CountVector load_counts(const std::string& path, bool acquisition_order) {
  const CountVector raw = read_counts(path);
  return acquisition_order ? from_acquisition_order(raw) : raw;
}

// --- estimate ---------------------------------------------------------------

struct EstimateArgs {
  std::string counts;
  std::string basis = "local";
  std::string model = "maice";
  bool acquisition_order = false;
};

int run_estimate(const EstimateArgs& a) {
  const ProjectorSet& set = projector_set_by_name(a.basis);
  const CountVector n = load_counts(a.counts, a.acquisition_order);
  const Estimator est = estimator_from_name(a.model);

  std::vector<EstimationResult> table;
  EstimationResult best;
  if (est == Estimator::maice) {
    const MaiceResult r = maice(n, set);
    table = r.all;
    best = r.best;
  } else {
    best = mle(4, n, set);
    table = {best};
  }

  std::cout << std::setprecision(6) << std::fixed;
  print_matrix(std::cout, "rho (real)", best.rho_hat.matrix(), false);
  print_matrix(std::cout, "rho (imag)", best.rho_hat.matrix(), true);
  std::cout << "lambda_hat: " << best.lambda_hat << '\n';
  std::cout << "\nrank  params    log_likelihood             AIC  converged\n";
  for (const auto& r : table) {
    std::cout << std::setw(4) << r.rank << std::setw(8) << r.parameter_count() << std::setw(18)
              << r.log_likelihood << std::setw(16) << r.aic << std::setw(11) << (r.converged ? "yes" : "no")
              << '\n';
  }
  std::cout << "selected rank: " << best.rank << '\n';
  return 0;
}

// --- simulate ---------------------------------------------------------------

struct SweepArgs {
  std::string config;
  std::string state;
  std::optional<double> rate;
  std::vector<double> times;
  std::optional<int> trials;
  std::string estimator;
  std::string basis;
  std::optional<std::uint64_t> seed;
  std::optional<double> eps;
  std::optional<unsigned> threads;
  std::string out;
};

SimulationConfig build_config(const SweepArgs& a) {
  SimulationConfig c = a.config.empty() ? SimulationConfig{} : read_config(a.config);
  if (!a.state.empty()) c.true_state = a.state;
  if (a.rate) c.rate = *a.rate;
  if (!a.times.empty()) c.acquisition_times = a.times;
  if (a.trials) c.trials = *a.trials;
  if (!a.estimator.empty()) c.estimator = estimator_from_name(a.estimator);
  if (!a.basis.empty()) c.basis = a.basis;
  if (a.seed) c.seed = *a.seed;
  if (a.eps) c.epsilon = *a.eps;
  if (a.threads) c.threads = *a.threads;
  c.validate();
  return c;
}

void add_sweep_options(CLI::App* cmd, SweepArgs& a, bool with_estimator_and_basis) {
  cmd->add_option("--config", a.config, "JSON file with SimulationConfig fields")->check(CLI::ExistingFile);
  cmd->add_option("--state", a.state, "mixed, product or bell");
  cmd->add_option("--rate", a.rate, "counts per unit time");
  cmd->add_option("--times", a.times, "acquisition times")->delimiter(',');
  cmd->add_option("--trials", a.trials, "trials per point");
  if (with_estimator_and_basis) {
    cmd->add_option("--estimator", a.estimator, "mle16 or maice");
    cmd->add_option("--basis", a.basis, "local or inseparable");
  }
  cmd->add_option("--seed", a.seed, "master seed");
  cmd->add_option("--eps", a.eps, "preset admixture of I/4");
  cmd->add_option("--threads", a.threads, "worker threads (0 = hardware)");
  cmd->add_option("--out", a.out, "output table (.csv or .tsv)")->required();
}

void summarize(const std::string& label, const SweepResult& r) {
  std::cerr << label << ": C = " << r.bound.coefficient << " (rank " << r.bound.rank_model << ", "
            << r.bound.set_name << (r.bound.complete_set ? "" : ", pseudo-inverse") << ")";
  int failures = 0;
  for (const auto& p : r.points) failures += p.failures;
  std::cerr << ", " << r.points.size() << " points, " << failures << " failed trials\n";
}

int run_simulate(const SweepArgs& a) {
  const SimulationConfig c = build_config(a);
  const SweepResult r = run_sweep(c);
  write_sweep(a.out, r);
  summarize(c.true_state + " analog", r);
  return 0;
}

int run_compare(const SweepArgs& a) {
  const SimulationConfig c = build_config(a);
  const BasisComparison cmp = compare_bases(c);
  write_comparison(a.out, cmp);
  summarize("local", cmp.local);
  summarize("inseparable", cmp.inseparable);
  return 0;
}

// --- bounds -----------------------------------------------------------------

struct BoundsArgs {
  std::string state = "mixed";
  std::string basis = "local";
  std::string rank = "auto";
  std::optional<double> eps;
  bool acquisition_order = false;
};

int run_bounds(const BoundsArgs& a) {
  const ProjectorSet& set = projector_set_by_name(a.basis);
  DensityMatrix rho = DensityMatrix::maximally_mixed();
  std::string source;
  if (std::filesystem::is_regular_file(a.state)) {
    const MaiceResult r = maice(load_counts(a.state, a.acquisition_order), local_projector_set());
    rho = r.best.rho_hat;
    source = "estimate from " + a.state + " (rank " + std::to_string(r.best.rank) + ")";
  } else {
    const double eps = a.eps.value_or(default_epsilon(a.state));
    rho = preset_state(a.state, eps);
    std::ostringstream s;
    s << a.state << " analog, eps = " << eps;
    source = s.str();
  }

  std::optional<int> rank;
  if (a.rank != "auto") {
    rank = std::stoi(a.rank);
    if (*rank < 1 || *rank > 4) throw ConfigError("--rank must be auto or 1..4");
  }
  const CholeskyModel coords = truth_coordinates(rho, rank);
  const BoundReport b = bound_coefficient(coords, set, CompletenessPolicy::pseudo_inverse);

  std::cout << "state: " << source << '\n'
            << "basis: " << b.set_name << (b.complete_set ? "" : " (incomplete, pseudo-inverse)") << '\n'
            << "rank: " << b.rank_model << '\n'
            << std::setprecision(8) << "C: " << b.coefficient << "\n\n"
            << "lambda,infidelity_bound,bures_sq_bound,half_bures_sq_bound\n";
  std::cout << std::setprecision(10);
  for (int e = 0; e <= 8; ++e) {
    const double lambda = 100.0 * std::pow(10.0, 0.5 * e);
    std::cout << lambda << ',' << b.infidelity_bound(lambda) << ',' << b.bures_sq_bound(lambda) << ','
              << 0.5 * b.bures_sq_bound(lambda) << '\n';
  }
  return 0;
}

// --- tile -------------------------------------------------------------------

struct TileArgs {
  std::vector<std::string> estimates;
  std::string basis = "local";
  std::string out;
  bool acquisition_order = false;
};

int run_tile(const TileArgs& a) {
  const ProjectorSet& set = projector_set_by_name(a.basis);
  std::vector<DensityMatrix> rhos;
  for (const auto& path : a.estimates) rhos.push_back(maice(load_counts(path, a.acquisition_order), set).best.rho_hat);
  const MatrixXd tiled = tile_estimates(rhos);
  if (a.out.empty()) {
    write_matrix(std::cout, tiled);
  } else {
    std::ofstream f(a.out);
    if (!f) throw ConfigError("cannot open '" + a.out + "' for writing");
    write_matrix(f, tiled, table_format_from_path(a.out));
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Two-qubit state tomography: estimation, information bounds and Monte Carlo sweeps"};
  app.require_subcommand(1);

  EstimateArgs est;
  auto* c_est = app.add_subcommand("estimate", "fit a density matrix to one count file");
  c_est->add_option("--counts", est.counts, "file with 16 counts")->required()->check(CLI::ExistingFile);
  c_est->add_option("--basis", est.basis, "local or inseparable");
  c_est->add_option("--model", est.model, "mle16 or maice");
  c_est->add_flag("--acquisition-order", est.acquisition_order, "counts are listed in laboratory order");

  SweepArgs sim;
  auto* c_sim = app.add_subcommand("simulate", "Monte Carlo sweep over acquisition times");
  add_sweep_options(c_sim, sim, true);

  SweepArgs cmp;
  auto* c_cmp = app.add_subcommand("compare-bases", "same sweep under local and inseparable sets");
  add_sweep_options(c_cmp, cmp, false);

  BoundsArgs bnd;
  auto* c_bnd = app.add_subcommand("bounds", "bound coefficient and bound curve");
  c_bnd->add_option("--state", bnd.state, "preset name or count file");
  c_bnd->add_option("--basis", bnd.basis, "local or inseparable");
  c_bnd->add_option("--rank", bnd.rank, "auto or 1..4");
  c_bnd->add_option("--eps", bnd.eps, "preset admixture of I/4");
  c_bnd->add_flag("--acquisition-order", bnd.acquisition_order, "count file is in laboratory order");

  TileArgs tile;
  auto* c_tile = app.add_subcommand("tile", "12x12 tiling of nine estimates");
  c_tile->add_option("--estimates", tile.estimates, "nine count files")->required()->expected(9)->check(
      CLI::ExistingFile);
  c_tile->add_option("--basis", tile.basis, "local or inseparable");
  c_tile->add_option("--out", tile.out, "output table (stdout when omitted)");
  c_tile->add_flag("--acquisition-order", tile.acquisition_order, "count files are in laboratory order");

  CLI11_PARSE(app, argc, argv);

  try {
    if (c_est->parsed()) return run_estimate(est);
    if (c_sim->parsed()) return run_simulate(sim);
    if (c_cmp->parsed()) return run_compare(cmp);
    if (c_bnd->parsed()) return run_bounds(bnd);
    if (c_tile->parsed()) return run_tile(tile);
  } catch (const qse::ParseError& e) {
    std::cerr << "qse: parse error: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "qse: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
