// Acceptance suite: one PASS/FAIL line per criterion, non-zero exit on any failure.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "levyexit/commands.hpp"
#include "levyexit/levyexit.hpp"

using namespace levyexit;

namespace {

int failures = 0;

void report(int id, const std::string& name, bool ok, const std::string& detail, double seconds) {
  std::printf("[%s] %2d %-22s %s (%.1f s)\n", ok ? "PASS" : "FAIL", id, name.c_str(), detail.c_str(), seconds);
  std::fflush(stdout);
  if (!ok) ++failures;
}

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

class Timer {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

ExperimentConfig cauchy_well(std::vector<double> eps, std::uint64_t n, std::uint64_t seed) {
  ExperimentConfig cfg;
  cfg.alpha = 1.0;
  cfg.potential = {"quadratic", 1.0, 1.0};
  cfg.domain = ExitDomain::bounded(1.0, 1.0);
  cfg.eps = std::move(eps);
  cfg.n_paths = n;
  cfg.seed = seed;
  return cfg;
}

std::vector<double> exit_times(const ExperimentResult& r) {
  std::vector<double> t;
  for (const auto& rec : r.records)
    if (!rec.censored) t.push_back(rec.exit_time);
  return t;
}

double cauchy_cdf(double x, double scale) { return 0.5 + std::atan(x / scale) / std::numbers::pi; }

// Mean exit time of dX = -X dt + s dW from 0 out of (-1, 1):
// (2/s^2) int_0^1 e^{y^2/s^2} int_0^y e^{-z^2/s^2} dz dy.
double gaussian_exact_mean(double s) {
  using boost::math::quadrature::gauss_kronrod;
  auto inner = [s](double y) {
    return std::exp(y * y / (s * s)) * 0.5 * std::sqrt(std::numbers::pi) * s * std::erf(y / s);
  };
  return 2.0 / (s * s) * gauss_kronrod<double, 61>::integrate(inner, 0.0, 1.0, 10, 1e-13);
}

}  // namespace

int main() {
  const unsigned workers = detail::default_workers();
  std::printf("levyexit acceptance suite (%u worker%s)\n", workers, workers == 1 ? "" : "s");

  {  // 1
    Timer t;
    double worst = 0.0;
    for (double alpha : {0.5, 1.0, 1.5, 1.75}) {
      const double closed = std::numbers::pi / (std::tgamma(1.0 + alpha) * std::sin(std::numbers::pi * alpha / 2.0));
      worst = std::max(worst, std::abs(stable_scale_constant(alpha) / closed - 1.0));
      worst = std::max(worst, std::abs(stable_scale_constant_quadrature(alpha) / closed - 1.0));
    }
    const double s = t.seconds();
    report(1, "scale constant", worst < 1e-6 && s < 1.0, "max rel error " + fmt("%.2e", worst) + " (tol 1e-6, < 1 s)", s);
  }

  {  // 2
    Timer t;
    std::vector<double> grid;
    for (int k = 1; k <= 200; ++k) grid.push_back(0.1 * k);
    double worst = 0.0;
    bool ok = true;
    for (double alpha : {1.0, 1.5})
      for (double eps : {0.1, 0.01}) {
        const auto rep = split_characteristic_check(SplitSpec(alpha, eps, 0.5), 0.0, grid, 1e-8);
        ok = ok && rep.passed;
        worst = std::max(worst, rep.max_error);
      }
    report(2, "split identity", ok, "max |psi_xi + psi_eta - psi_L| " + fmt("%.2e", worst) + " (tol 1e-8)", t.seconds());
  }

  {  // 3
    Timer t;
    const int n = 100000;
    RngStream rng(3003, 0);
    const StableIncrementSampler sampler(1.0, 1.0);
    std::vector<double> inc(n);
    for (auto& v : inc) v = sampler(rng);
    const double ks_cauchy = ks_against(inc, [](double x) { return cauchy_cdf(x, std::numbers::pi); });
    const SplitSpec split(1.0, 0.02, 0.5);
    RngStream rng2(3003, 1);
    std::vector<double> ratio(n);
    for (auto& v : ratio) v = std::abs(sample_large_jump(split, rng2).w) / split.threshold;
    const double ks_pareto = ks_against(ratio, [](double r) { return 1.0 - 1.0 / r; });
    report(3, "sampler law", ks_cauchy < 0.02 && ks_pareto < 0.01,
           "KS Cauchy " + fmt("%.4f", ks_cauchy) + " (< 0.02), KS Pareto " + fmt("%.4f", ks_pareto) + " (< 0.01)",
           t.seconds());
  }

  // Criteria 4, 5, 7 and the alpha = 1 slope of 8 share one run.
  Timer t_main;
  const auto main_cfg = cauchy_well({0.1, 0.05, 0.02}, 3000, 4004);
  std::vector<ExperimentResult> main_runs;
  for (std::size_t k = 0; k < main_cfg.eps.size(); ++k) main_runs.push_back(run_experiment(main_cfg, k, workers));
  const double main_seconds = t_main.seconds();

  {  // 4
    bool ok = true;
    std::string detail = "ratios";
    std::vector<double> ratio, se;
    for (const auto& r : main_runs) {
      ratio.push_back(r.summary.mean / r.prediction.mean);
      se.push_back(r.summary.std_error / r.prediction.mean);
      ok = ok && ratio.back() >= 0.7 && ratio.back() <= 1.3 && r.summary.censored_count == 0;
      detail += fmt(" %.3f", ratio.back());
    }
    const bool trend = std::abs(ratio[2] - 1.0) <= std::abs(ratio[0] - 1.0) + 2.0 * se[2];
    detail += " in [0.7,1.3]; |r(0.02)-1| " + fmt("%.3f", std::abs(ratio[2] - 1.0)) + " <= |r(0.1)-1| + 2SE " +
              fmt("%.3f", std::abs(ratio[0] - 1.0) + 2.0 * se[2]);
    report(4, "mean exit", ok && trend, detail, main_seconds);
  }

  {  // 5
    Timer t;
    const auto& r = main_runs[1];
    auto times = exit_times(r);
    const double ks = ks_exponential(std::span<const double>(times));
    std::sort(times.begin(), times.end());
    const double c = fit_sandwich_constant(times, r.records.size(), r.eps, r.prediction, 5.0 * r.prediction.mean);
    report(5, "exponential law", ks < 0.05 && c <= 10.0,
           "KS " + fmt("%.4f", ks) + " (< 0.05), fitted sandwich C " + fmt("%.3f", c) + " (<= 10)", t.seconds());
  }

  {  // 6
    Timer t;
    ExperimentConfig cfg = cauchy_well({0.05}, 3000, 6006);
    cfg.potential = {"harmonic_quartic", 1.0, 1.0};
    cfg.domain = ExitDomain::half_line(1.0);
    const auto r = run_experiment(cfg, 0, workers);
    const double ratio = r.summary.mean / r.prediction.mean;
    report(6, "half-line", ratio >= 0.7 && ratio <= 1.3 && r.summary.censored_count == 0,
           "ratio " + fmt("%.3f", ratio) + " in [0.7,1.3] (theory mean " + fmt("%.1f", r.prediction.mean) + ")",
           t.seconds());
  }

  {  // 7
    const auto& r = main_runs[2];
    const double radius = 2.0 * std::pow(r.eps, main_cfg.gamma_value());
    std::size_t big = 0, near = 0;
    for (const auto& rec : r.records) {
      if (!rec.exited_at_large_jump) continue;
      ++big;
      if (std::abs(*rec.pre_jump_position) <= radius) ++near;
    }
    const double frac_near = big ? static_cast<double>(near) / static_cast<double>(big) : 0.0;
    report(7, "mechanism", r.summary.big_jump_exit_fraction >= 0.9 && frac_near >= 0.8,
           "big-jump exit fraction " + fmt("%.3f", r.summary.big_jump_exit_fraction) + " (>= 0.9), pre-jump within " +
               fmt("%.3f", radius) + ": " + fmt("%.3f", frac_near) + " (>= 0.8)",
           0.0);
  }

  {  // 8
    Timer t;
    std::vector<double> x, y;
    for (const auto& r : main_runs) {
      x.push_back(std::log(r.eps));
      y.push_back(std::log(r.summary.mean));
    }
    const double slope1 = linear_fit(x, y).slope;

    ExperimentConfig c15 = cauchy_well({0.1, 0.05, 0.02}, 3000, 8008);
    c15.alpha = 1.5;
    const double slope15 = sweep(c15, workers).loglog.slope;

    ExperimentConfig g = cauchy_well({0.7, 0.55, 0.45}, 2000, 8009);
    g.stable_enabled = false;
    g.d = 1.0;
    const auto gs = sweep(g, workers);
    const double gslope = gs.kramers.slope;

    ExperimentConfig g5 = g;
    g5.eps = {0.5};
    const auto r5 = run_experiment(g5, 0, workers);
    const double kramers = kramers_mean_exit(0.5, Quadratic{1.0}, 1.0);
    const double fold = r5.summary.mean / kramers;

    std::vector<double> ex, ey;
    for (double e : g.eps) {
      ex.push_back(1.0 / (e * e));
      ey.push_back(std::log(gaussian_exact_mean(e)));
    }
    const double exact_slope = linear_fit(ex, ey).slope;

    const bool ok = std::abs(slope1 + 1.0) <= 0.15 && std::abs(slope15 + 1.5) <= 0.15 && std::abs(gslope - 1.0) <= 0.1 &&
                    fold >= 0.5 && fold <= 2.0;
    report(8, "scaling exponents", ok,
           "slope(alpha=1) " + fmt("%.3f", slope1) + ", slope(alpha=1.5) " + fmt("%.3f", slope15) +
               " (+-0.15); gaussian slope " + fmt("%.3f", gslope) + " (1 +- 0.1, continuous-time reference " +
               fmt("%.3f", exact_slope) + "); mean(0.5)/Kramers " + fmt("%.3f", fold) + " in [0.5,2]",
           t.seconds());
  }

  {  // 9
    Timer t;
    double worst = 0.0;
    std::string detail;
    for (auto [alpha, eps] : {std::pair{1.0, 0.05}, std::pair{1.5, 0.1}}) {
      ExperimentConfig cfg = cauchy_well({eps}, 2000, 9009);
      cfg.alpha = alpha;
      cfg.scheme = Scheme::JumpAdapted;
      const auto ja = run_experiment(cfg, 0, workers);
      cfg.scheme = Scheme::Euler;
      cfg.seed = 9010;
      const auto eu = run_experiment(cfg, 0, workers);
      const double ks = ks_two_sample(exit_times(ja), exit_times(eu));
      worst = std::max(worst, ks);
      detail += fmt("KS(alpha=%.1f", alpha) + fmt(", eps=%.2f) ", eps) + fmt("%.4f; ", ks);
    }
    report(9, "scheme equivalence", worst < 0.06, detail + "tol 0.06", t.seconds());
  }

  {  // 10
    Timer t;
    ExperimentConfig cfg = cauchy_well({0.1, 0.05, 0.02}, 0, 1010);
    cfg.deviation_c = 1.0;
    cfg.deviation_paths = 5000;
    const auto rows = deviation_grid(cfg, workers);
    std::vector<double> eps;
    std::vector<DeviationEstimate> est;
    std::string detail = "p";
    bool decreasing = true;
    for (std::size_t i = 0; i < rows.size(); ++i) {
      eps.push_back(rows[i].eps);
      est.push_back(rows[i].estimate);
      detail += fmt(" %.2e", rows[i].estimate.probability) + fmt(" (%.0f hits)", static_cast<double>(rows[i].estimate.hits));
      if (i > 0 && !(rows[i].estimate.probability < rows[i - 1].estimate.probability)) decreasing = false;
    }
    const double slope = deviation_power_fit(eps, est).slope;
    const double bound = (cfg.alpha + cfg.gamma_value()) / 4.0;
    report(10, "tube deviation", decreasing && slope >= bound,
           detail + "; fit exponent " + fmt("%.3f", slope) + " >= " + fmt("%.3f", bound), t.seconds());
  }

  {  // 11
    Timer t;
    std::mt19937_64 gen(1111);
    std::uniform_real_distribution<double> ua(0.05, 1.95);
    bool all_default = true;
    for (int i = 0; i < 100; ++i) {
      const double alpha = ua(gen);
      all_default = all_default && rho_gamma_feasible(alpha, 0.5, gamma_default(alpha)).feasible;
    }
    std::size_t mismatches = 0, feasible_cells = 0, cells = 0;
    for (int trial = 0; trial < 50; ++trial) {
      const double alpha = ua(gen);
      const double jitter = std::uniform_real_distribution<double>(0.0, 1e-3)(gen);
      for (int i = 0; i <= 60; ++i)
        for (int j = 0; j <= 60; ++j) {
          const double rho = -0.1 + 1.2 * i / 60.0 + jitter;
          const double gamma = -0.1 + 1.1 * j / 60.0 + jitter;
          const bool brute = rho > 0.0 && rho < 1.0 && gamma > 0.0 &&
                             alpha * (1.0 - rho) < 2.0 - 2.0 * rho - 2.0 * gamma &&
                             alpha * (1.0 - rho) < alpha * rho + gamma;
          const bool got = rho_gamma_feasible(alpha, rho, gamma).feasible;
          mismatches += brute != got;
          feasible_cells += brute;
          ++cells;
        }
    }
    report(11, "feasibility region", all_default && mismatches == 0 && feasible_cells > 0,
           std::string("rho=1/2, gamma=(2-alpha)/5 feasible for 100 random alpha: ") + (all_default ? "yes" : "no") +
               "; grid mismatches " + std::to_string(mismatches) + " of " + std::to_string(cells) + " (" +
               std::to_string(feasible_cells) + " feasible)",
           t.seconds());
  }

  {  // 12
    Timer t;
    const std::string text =
        "alpha = 1.0\npotential = quadratic\ndomain = bounded\na = 1\nb = 1\neps = 0.1\nn_paths = 1000\nseed = 1212\n";
    const auto base = std::filesystem::temp_directory_path() / "levyexit_acceptance_12";
    std::filesystem::remove_all(base);
    dispatch(make_request("simulate", text, base / "w1", 1));
    dispatch(make_request("simulate", text, base / "w4", 4));
    const auto a = io::read_file(base / "w1" / "records.csv");
    const auto b = io::read_file(base / "w4" / "records.csv");
    report(12, "reproducibility", a == b && !a.empty(),
           "records.csv with 1 and 4 workers: " + std::string(a == b ? "byte-identical" : "DIFFERENT") + " (" +
               std::to_string(a.size()) + " bytes)",
           t.seconds());
  }

  std::printf("%d of 12 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
