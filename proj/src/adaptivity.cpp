#include "kplate/adaptivity.hpp"

#include <algorithm>
#include <numeric>

#include "kplate/c1_space.hpp"
#include "kplate/equilibration.hpp"
#include "kplate/hhj_solver.hpp"
#include "kplate/ipdg.hpp"
#include "kplate/projection.hpp"

namespace kplate {

LevelResult run_level(const BenchmarkCase& bench, MeshPtr mesh, const PipelineOptions& options) {
  const int k = options.k;
  LevelResult out;
  out.mesh = mesh;
  out.alpha = default_penalty(k, options.alpha0.value_or(bench.alpha0));

  std::optional<ScalarField> uh;
  std::optional<MomentField> sigma;
  if (options.method == Method::IPDG) {
    IPDGProblem problem{mesh, k, out.alpha, bench.f, bench.singular};
    uh = solve(problem);
    EquilibratedTensor eq = equilibrate_from_dg(*uh, out.alpha, bench.f, bench.singular);
    out.equilibration_residual = eq.check.residual;
    out.equilibration_tolerance = eq.check.tolerance;
    sigma = std::move(eq.sigma);
  } else {
    HHJSolution sol = solve_hhj(mesh, k, bench.f, bench.singular);
    const EquilibrationCheck check = check_equilibration(sol.sigma, sol.u.space(), bench.f, bench.singular);
    if (!check.passed()) throw EquilibrationError("mixed solution is not equilibrated", check.residual);
    out.equilibration_residual = check.residual;
    out.equilibration_tolerance = check.tolerance;
    uh = std::move(sol.u);
    sigma = std::move(sol.sigma);
  }

  std::optional<ConformingProjection> conf;
  if (k <= 3) {
    auto c1 = std::make_shared<const C1Space>(mesh, k == 2 ? C1Variant::ReducedHCT : C1Variant::FullCT);
    conf = project_conforming(*uh, c1);
    out.projection_residual = conf->residual;
  }

  EstimatorInput in;
  in.uh = &*uh;
  in.sigma = &*sigma;
  in.uconf = conf ? &conf->field : nullptr;
  in.f = bench.f;
  in.alpha = out.alpha;
  in.exact = bench.exact ? &*bench.exact : nullptr;
  in.singular = bench.singular;
  out.report = compute_report(in);
  return out;
}

std::vector<int> mark(std::span<const double> eta, double theta) {
  if (!(theta > 0.0 && theta <= 1.0)) throw std::invalid_argument("mark: theta must lie in (0, 1]");
  std::vector<int> out;
  if (eta.empty()) return out;
  const double mx = *std::max_element(eta.begin(), eta.end());
  if (!(mx > 0.0)) return out;
  for (std::size_t i = 0; i < eta.size(); ++i) {
    if (eta[i] > theta * mx) out.push_back(static_cast<int>(i));
  }
  return out;
}

std::vector<int> mark_dorfler(std::span<const double> eta, double theta) {
  if (!(theta > 0.0 && theta <= 1.0)) throw std::invalid_argument("mark_dorfler: theta must lie in (0, 1]");
  std::vector<int> order(eta.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return eta[a] > eta[b]; });
  double total = 0.0;
  for (double e : eta) total += e * e;
  std::vector<int> out;
  if (!(total > 0.0)) return out;
  double acc = 0.0;
  for (int i : order) {
    if (acc >= theta * total) break;
    out.push_back(i);
    acc += eta[i] * eta[i];
  }
  std::sort(out.begin(), out.end());
  return out;
}

int deflection_dofs(MeshPtr mesh, int k) { return LagrangeSpace(std::move(mesh), k).num_free(); }

namespace {

LevelResult guarded_level(const BenchmarkCase& bench, MeshPtr mesh, const PipelineOptions& options, int level) {
  try {
    return run_level(bench, std::move(mesh), options);
  } catch (const LevelError&) {
    throw;
  } catch (const std::exception& e) {
    throw LevelError(level, e.what());
  }
}

}  // namespace

std::vector<LevelResult> adaptive_loop(const BenchmarkCase& bench, MeshPtr initial, const PipelineOptions& options,
                                       const AdaptiveConfig& config) {
  std::vector<LevelResult> out;
  MeshPtr mesh = std::move(initial);
  for (int level = 0; level < config.max_levels; ++level) {
    out.push_back(guarded_level(bench, mesh, options, level));
    if (level + 1 == config.max_levels) break;
    const auto& eta = out.back().report.eta_eq_T;
    std::vector<int> marked;
    if (out.back().report.has_conforming) {
      marked = config.strategy == MarkingStrategy::Maximum ? mark(eta, config.theta) : mark_dorfler(eta, config.theta);
    } else {
      marked.resize(mesh->num_triangles());
      std::iota(marked.begin(), marked.end(), 0);
    }
    if (marked.empty()) break;
    auto next = std::make_shared<const Mesh>(refine(*mesh, marked).mesh);
    if (deflection_dofs(next, options.k) > config.dof_budget) break;
    mesh = std::move(next);
  }
  return out;
}

std::vector<LevelResult> uniform_loop(const BenchmarkCase& bench, MeshPtr initial, const PipelineOptions& options,
                                      int levels) {
  std::vector<LevelResult> out;
  MeshPtr mesh = std::move(initial);
  for (int level = 0; level < levels; ++level) {
    out.push_back(guarded_level(bench, mesh, options, level));
    if (level + 1 < levels) mesh = std::make_shared<const Mesh>(refine_uniform(*mesh).mesh);
  }
  return out;
}

std::vector<LevelResult> alpha_sweep(const BenchmarkCase& bench, MeshPtr mesh, int k,
                                     const std::vector<double>& alpha0s, Method method) {
  std::vector<LevelResult> out;
  for (double a0 : alpha0s) {
    if (!(a0 > 0.0)) throw std::invalid_argument("alpha_sweep: alpha0 must be positive");
    PipelineOptions opt;
    opt.method = method;
    opt.k = k;
    opt.alpha0 = a0;
    out.push_back(run_level(bench, mesh, opt));
  }
  return out;
}

}  // namespace kplate
