#pragma once

// Spatiotemporal un-reduced field equations for closed plane curves on the
// unit square in (x, t):
//
//   R_h = ∂x P h_x + ∂t P h_t − D_θ(h_x P v_x + h_t P v_t) + κ H
//   R_v = ∂x P v_x + ∂t P v_t − F^v,      H = ½(h_x P h_x + h_t P h_t)
//
// with c_x = v_x t + h_x n and c_t = v_t t + h_t n. P acts in θ; the (x, t)
// derivatives are second-order finite differences. The divergence terms are
// expanded by the product rule, ∂x(c_x·n) = c_xx·n + c_x·∂x n, so the stencil
// stays compact (three nodes per direction).

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "unred/curve.hpp"
#include "unred/errors.hpp"
#include "unred/force.hpp"
#include "unred/sobolev.hpp"

namespace unred {

enum class XBoundary { dirichlet, periodic };

/// (M_x+1)×(M_t+1) grid of curves sharing N. Node (i, j) sits at
/// x = i/M_x, t = j/M_t. In periodic-x mode column M_x duplicates column 0.
class CurveField {
 public:
  CurveField(std::size_t mx, std::size_t mt, std::vector<DiscreteCurve> curves,
             XBoundary x_boundary = XBoundary::dirichlet);

  std::size_t mx() const noexcept { return mx_; }
  std::size_t mt() const noexcept { return mt_; }
  std::size_t n() const noexcept { return curves_.front().size(); }
  XBoundary x_boundary() const noexcept { return x_boundary_; }
  double dx() const noexcept { return 1.0 / static_cast<double>(mx_); }
  double dt() const noexcept { return 1.0 / static_cast<double>(mt_); }
  std::size_t node_count() const noexcept { return curves_.size(); }
  std::size_t index(std::size_t i, std::size_t j) const noexcept { return i * (mt_ + 1) + j; }

  const DiscreteCurve& at(std::size_t i, std::size_t j) const { return curves_[index(i, j)]; }
  void set(std::size_t i, std::size_t j, DiscreteCurve c);

  /// Nodes whose curves the solver updates.
  bool is_interior(std::size_t i, std::size_t j) const noexcept;

  /// A constant field: the same curve at every node.
  static CurveField constant(std::size_t mx, std::size_t mt, const DiscreteCurve& c,
                             XBoundary x_boundary = XBoundary::dirichlet);
  /// Samples c(x, t) at every node.
  static CurveField sample(std::size_t mx, std::size_t mt,
                           const std::function<DiscreteCurve(double x, double t)>& c,
                           XBoundary x_boundary = XBoundary::dirichlet);

 private:
  std::size_t mx_;
  std::size_t mt_;
  XBoundary x_boundary_;
  std::vector<DiscreteCurve> curves_;
};

/// Scalar array of shape (M_x+1)×(M_t+1)×N.
class FieldArray {
 public:
  FieldArray() = default;
  FieldArray(std::size_t mx, std::size_t mt, std::size_t n)
      : mx_(mx), mt_(mt), n_(n), data_((mx + 1) * (mt + 1) * n, 0.0) {}

  std::size_t mx() const noexcept { return mx_; }
  std::size_t mt() const noexcept { return mt_; }
  std::size_t n() const noexcept { return n_; }

  std::span<double> at(std::size_t i, std::size_t j) noexcept { return {data_.data() + offset(i, j), n_}; }
  std::span<const double> at(std::size_t i, std::size_t j) const noexcept {
    return {data_.data() + offset(i, j), n_};
  }
  std::span<const double> values() const noexcept { return data_; }
  double max_abs() const noexcept;

 private:
  std::size_t offset(std::size_t i, std::size_t j) const noexcept { return (i * (mt_ + 1) + j) * n_; }

  std::size_t mx_ = 0, mt_ = 0, n_ = 0;
  std::vector<double> data_;
};

struct JetDecomposition {
  FieldArray h_t, v_t, h_x, v_x;
  FieldArray H;
};

/// First jets of the field in the moving frame. Central differences inside,
/// second-order one-sided differences on Dirichlet edges.
JetDecomposition jet_decompose(const CurveField& field, const SobolevOperator& op);

/// Residuals at interior nodes, zero on the boundary.
FieldArray residual_horizontal(const CurveField& field, const JetDecomposition& decomp, const SobolevOperator& op);
FieldArray residual_vertical(const CurveField& field, const JetDecomposition& decomp, const SobolevOperator& op,
                             const ForceProfile& force);

/// Dirichlet data. bottom/top are indexed by i = 0..M_x (t = 0 and t = 1),
/// left/right by j = 0..M_t (x = 0 and x = 1). In periodic-x mode left/right
/// are ignored, periodic_mt sets M_t, and bottom/top must close up (entry
/// M_x equals entry 0).
struct BoundaryData {
  std::vector<DiscreteCurve> bottom;
  std::vector<DiscreteCurve> top;
  std::vector<DiscreteCurve> left;
  std::vector<DiscreteCurve> right;
  XBoundary x_boundary = XBoundary::dirichlet;
  std::size_t periodic_mt = 0;

  std::size_t mx() const noexcept { return bottom.empty() ? 0 : bottom.size() - 1; }
  std::size_t mt() const noexcept;

  /// Edges of an existing field.
  static BoundaryData of(const CurveField& field);
  /// Applies c ↦ c∘φ to every boundary curve.
  BoundaryData reparametrized(const std::function<double(double)>& phi) const;
};

/// Transfinite (Coons) bilinear blend of the boundary edges. Throws
/// CornerMismatch when edges disagree at a corner by more than 1e-8.
CurveField initial_field(const BoundaryData& boundary);

enum class SolverMethod { newton_krylov, relaxation };

struct SolverConfig {
  SolverMethod method = SolverMethod::newton_krylov;
  double tau = 0.0;  // relaxation step; ≤ 0 selects 0.8 / (2/Δx² + 2/Δt²)
  double tol_res = 1e-8;
  std::size_t max_iter = 100000;  // outer iterations (relaxation steps or Newton steps)
  int max_halvings = 20;          // τ halvings (relaxation) or line-search halvings per step (Newton)
  std::size_t krylov_restart = 200;
  std::size_t max_krylov = 1000;  // GMRES iterations per Newton step
  double krylov_rtol = 1e-3;
  bool track_energy = false;
};

struct ConvergenceReport {
  bool converged = false;
  std::size_t iterations = 0;
  std::size_t krylov_iterations = 0;
  double final_residual = 0.0;  // max over nodes of the node RMS of (R_h, R_v)
  double max_abs_rh = 0.0;
  double max_abs_rv = 0.0;
  double initial_tau = 0.0;
  double final_tau = 0.0;  // relaxation τ, or the last Newton step length
  int halvings = 0;
  std::vector<double> residual_history;  // one entry per accepted state, starting with the initial guess
  std::vector<double> energy_history;    // filled when SolverConfig::track_energy is set
};

struct BvpSolution {
  CurveField field;
  ConvergenceReport report;
};

class NonConvergence : public Error {
 public:
  NonConvergence(const std::string& what, BvpSolution partial) : Error(what), partial_(std::move(partial)) {}
  const BvpSolution& partial() const noexcept { return partial_; }

 private:
  BvpSolution partial_;
};

/// Solves R_h = R_v = 0 for the interior curves from the Coons initial guess
/// until max|R_h| and max|R_v| both drop below tol_res (which also bounds
/// the max node RMS).
///
/// newton_krylov: Newton steps on G = P⁻¹R_h n + P⁻¹R_v t with finite-difference
/// Jacobian products, GMRES and a backtracking line search on |G|. GMRES is
/// right-preconditioned by a per-θ-mode direct solve of the Jacobian of the
/// arc-length-resampled field, which is exact for rotationally symmetric
/// fields.
///
/// relaxation: c ← c + τ G, with τ halved whenever a step would increase the
/// residual. Converges only while the linearization is dissipative; high
/// θ-modes of the D_θ coupling make it unstable on fields with large |h_t|.
BvpSolution solve_bvp(const BoundaryData& boundary, const SobolevOperator& op, const ForceProfile& force,
                      const SolverConfig& cfg = {});

/// Max over nodes of shape_distance between the solutions for the given and
/// the reparametrized boundary data.
double equivariance_check(const BoundaryData& boundary, const std::function<double(double)>& phi,
                          const SobolevOperator& op, const ForceProfile& force, const SolverConfig& cfg = {});

struct FieldEnergy {
  double total = 0.0;
  double horizontal = 0.0;
  double vertical = 0.0;
};

/// ½ ∫∫ (∮ h P h dl + ∮ v P v dl) over both jet directions, trapezoidal in (x, t).
FieldEnergy energy(const CurveField& field, const SobolevOperator& op);

/// max node RMS of (R_h, R_v) for the given residual arrays.
double residual_norm(const CurveField& field, const FieldArray& rh, const FieldArray& rv);

}  // namespace unred
