#include <CLI11.hpp>

#include <fstream>
#include <iostream>

#include "fsopoint/cli.hpp"

namespace {

using fsopoint::cli::ExitCode;
using fsopoint::cli::Precision;
using fsopoint::cli::RunConfig;

struct Globals {
  std::string output = "stdout";
  std::string precision = "table";
};

void add_globals(CLI::App& app, RunConfig& c, Globals& g) {
  app.add_option("--output", g.output, "output path or 'stdout'");
  app.add_option("--tol", c.tol, "relative quadrature tolerance");
  app.add_option("--grid-max-mult", c.grid_max_mult, "grid upper limit multiplier");
  app.add_option("--grid-points", c.grid_points, "grid point count");
  app.add_option("--seed", c.seed, "random seed");
  app.add_option("--precision", g.precision, "table (6 digits) | full (17 digits)")
      ->check(CLI::IsMember({"table", "full"}));
  app.add_option("--ra", c.ra, "aperture radius");
  app.add_option("--threads", c.threads, "worker threads for sampling");
}

void add_model_opts(CLI::App* sub, RunConfig& c) {
  sub->add_option("--n", c.splits, "linearized strip count")->delimiter(',');
  sub->add_option("--r0-over-ra", c.r0_over_ra, "linearized calibration radius");
  sub->add_option("--k", c.k_list, "point-approx order")->delimiter(',');
  sub->add_option("--alpha-mode", c.alpha_mode, "asymptotic | exact-bessel");
}

}  // namespace

int main(int argc, char** argv) {
  RunConfig c;
  Globals g;
  CLI::App app{"Pointing-loss efficiency models and their accuracy"};
  app.require_subcommand(1);
  add_globals(app, c, g);

  auto* eval = app.add_subcommand("eval", "evaluate one model against the exact efficiency");
  eval->add_option("--model", c.model)->required();
  eval->add_option("--wz-over-ra", c.wz_over_ra)->required()->delimiter(',');
  eval->add_option("--r-over-ra", c.r_over_ra)->delimiter(',');
  eval->add_flag("--grid", c.use_grid, "use the default grid");
  eval->add_flag("--no-oracle", c.no_oracle);
  add_model_opts(eval, c);

  auto* t1 = app.add_subcommand("table1", "wide-beam NMSE table");
  t1->add_option("--ratios", c.wz_over_ra)->delimiter(',');
  t1->add_option("--optimize-linearized", c.optimize_linearized);
  add_model_opts(t1, c);

  auto* t2 = app.add_subcommand("table2", "narrow-beam NMSE table");
  t2->add_option("--ratios", c.wz_over_ra)->delimiter(',');
  add_model_opts(t2, c);

  auto* opt = app.add_subcommand("optimize-r0", "optimal linearized calibration radius");
  opt->add_option("--wz-over-ra", c.wz_over_ra)->required()->delimiter(',');
  opt->add_option("--n", c.splits)->delimiter(',');

  auto* fit = app.add_subcommand("fit-r0", "r0* sweep and quadratic fit");
  fit->add_option("--n", c.splits)->delimiter(',');
  fit->add_option("--ratio-range", c.ratio_range)->delimiter(',')->expected(2);
  fit->add_option("--ratio-steps", c.ratio_steps);

  auto* ks = app.add_subcommand("k-study", "point-approx NMSE per order k");
  ks->add_option("--wz-over-ra", c.wz_over_ra)->delimiter(',');
  ks->add_option("--k-list", c.k_study_list)->delimiter(',');
  ks->add_option("--alpha-mode", c.alpha_mode);

  auto* pdf = app.add_subcommand("pdf", "efficiency density under Rayleigh jitter");
  pdf->add_option("--family", c.family)->required();
  pdf->add_option("--params", c.params)->delimiter(',');
  pdf->add_option("--wz-over-ra", c.wz_over_ra)->delimiter(',');
  pdf->add_option("--sigma-s", c.sigma_s)->required();
  pdf->add_option("--mc-samples", c.mc_samples);
  pdf->add_option("--bins", c.bins);
  pdf->add_option("--alpha-mode", c.alpha_mode);

  auto* mc = app.add_subcommand("mc", "Monte Carlo efficiency histogram for a model");
  mc->add_option("--model", c.model)->required();
  mc->add_option("--wz-over-ra", c.wz_over_ra)->required()->delimiter(',');
  mc->add_option("--sigma-s", c.sigma_s)->required();
  mc->add_option("--mc-samples", c.mc_samples)->required();
  mc->add_option("--bins", c.bins);
  add_model_opts(mc, c);

  // global flags are accepted after the subcommand too
  for (auto* sub : app.get_subcommands({})) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : static_cast<int>(ExitCode::usage);
  }

  c.command = app.get_subcommands().front()->get_name();
  c.precision = g.precision == "full" ? Precision::full : Precision::table;

  try {
    const std::string text = fsopoint::cli::render(fsopoint::cli::run_command(c), c.precision);
    if (g.output == "stdout" || g.output == "-") {
      std::cout << text;
    } else {
      std::ofstream out(g.output, std::ios::binary);
      if (!out) {
        std::cerr << "error: cannot open " << g.output << "\n";
        return static_cast<int>(ExitCode::usage);
      }
      out << text;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return static_cast<int>(fsopoint::cli::classify(e));
  }
  return 0;
}
