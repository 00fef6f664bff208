#pragma once

#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "kplate/benchmarks.hpp"
#include "kplate/estimator.hpp"
#include "kplate/mesh.hpp"

namespace kplate {

enum class Method { IPDG, HHJ };

struct PipelineOptions {
  Method method = Method::IPDG;
  int k = 2;
  std::optional<double> alpha0;  // defaults to the case's value
};

/// Outcome of solve -> equilibrate -> recover -> estimate on one mesh.
struct LevelResult {
  MeshPtr mesh;
  ErrorReport report;
  double alpha = 0.0;
  double equilibration_residual = 0.0;
  double equilibration_tolerance = 0.0;
  double projection_residual = 0.0;
};

/// Raised when a stage fails inside a multi-level run.
class LevelError : public std::runtime_error {
 public:
  LevelError(int level, const std::string& what)
      : std::runtime_error("level " + std::to_string(level) + ": " + what), level_(level) {}
  int level() const { return level_; }

 private:
  int level_;
};

LevelResult run_level(const BenchmarkCase& bench, MeshPtr mesh, const PipelineOptions& options);

enum class MarkingStrategy { Maximum, Dorfler };

struct AdaptiveConfig {
  double theta = 0.25;
  int max_levels = 6;
  int dof_budget = 50000;
  MarkingStrategy strategy = MarkingStrategy::Maximum;
};

/// Elements with eta(T) > theta max eta (strict).
std::vector<int> mark(std::span<const double> eta, double theta);
/// Smallest set (largest contributions first) with sum eta^2 >= theta sum eta^2.
std::vector<int> mark_dorfler(std::span<const double> eta, double theta);

/// Adaptive refinement driven by the per-element eta^eq. Stops after
/// max_levels levels or before a mesh would exceed the DOF budget.
std::vector<LevelResult> adaptive_loop(const BenchmarkCase& bench, MeshPtr initial, const PipelineOptions& options,
                                       const AdaptiveConfig& config);

/// Uniform refinement, `levels` meshes starting from `initial`.
std::vector<LevelResult> uniform_loop(const BenchmarkCase& bench, MeshPtr initial, const PipelineOptions& options,
                                      int levels);

/// One full pipeline run per alpha0 on a fixed mesh.
std::vector<LevelResult> alpha_sweep(const BenchmarkCase& bench, MeshPtr mesh, int k,
                                     const std::vector<double>& alpha0s, Method method = Method::IPDG);

/// dim V_h^0 for a mesh and order.
int deflection_dofs(MeshPtr mesh, int k);

}  // namespace kplate
