#pragma once

// Nonconvex quadratic program over a union of balls,
//
//   min 1/2 x'Qx + b'x   s.t.  x in C = U_{c in {-g..g}^n} B(c, r),
//
// attacked through its forward-backward envelope
//
//   phi_lambda(x) = inf_z { f(x) + <grad f(x), z - x> + i_C(z) + ||z - x||^2 / (2 lambda) }.

#include <cstddef>
#include <cstdint>
#include <optional>

#include <Eigen/Cholesky>
#include <Eigen/Core>
#include <Eigen/Eigenvalues>
#include <json.hpp>

#include "nmsub/core.hpp"

namespace nmsub::qp {

using Matrix = Eigen::MatrixXd;

struct QPProblem {
  Matrix Q;
  Point b;
  double radius = 0.0;
  int grid_bound = 4;
  double lambda = 0.0;
  double rho = 0.0;
  /// ||Q||_2, cached at construction time.
  double q_norm = 0.0;

  // Provenance for serialization; not used by the math.
  std::size_t n_hint = 0;
  std::uint64_t seed = 0;
  int radius_factor = 0;

  std::size_t dimension() const noexcept { return static_cast<std::size_t>(b.size()); }
  /// Throws std::invalid_argument on shape mismatch, asymmetric Q (relative
  /// 1e-12), non-positive radius or lambda, or negative grid bound.
  void validate() const;
};

/// Builds a problem with lambda = 0.8 / ||Q||_2 (or the explicit lambda).
QPProblem make_problem(Matrix Q, Point b, double radius,
                       std::optional<double> lambda = std::nullopt, int grid_bound = 4);

/// ||Q||_2 for symmetric Q via power iteration on Q^2.
double spectral_norm(const Matrix& Q, double rel_tol = 1e-10, int max_iter = 10000);

/// Componentwise round to nearest (ties toward the smaller integer), then
/// clamp to [-grid_bound, grid_bound].
Point nearest_center(const Point& y, int grid_bound);

/// A nearest point of the union of balls.
Point project_onto_C(const Point& y, const QPProblem& prob);

/// ||x - nearest_center(x)|| <= radius.
bool in_C(const Point& x, const QPProblem& prob, double slack = 0.0);

double quadratic_value(const QPProblem& prob, const Point& x);

double fbe_value(const QPProblem& prob, const Point& x);

struct FbeSubgradient {
  double value = 0.0;
  Point w;
};

/// w = (1/lambda) (I - lambda Q) (x - P_C((I - lambda Q) x - lambda b)).
FbeSubgradient fbe_subgradient(const QPProblem& prob, const Point& x);

/// Newton direction of the smooth part: solves (Q + I/lambda) d = -w.
/// The LLT factorization is computed once; the object is read-only after
/// construction and may be shared across threads.
class NewtonDirection final : public DirectionStrategy {
 public:
  explicit NewtonDirection(const QPProblem& prob);

  Point solve(const Point& w) const;

  Point direction(std::size_t iteration, const Point& x,
                  const Subgradient& g) const override;
  /// lambda_min(Q + I/lambda); at least 0.25 ||Q||_2 when lambda ||Q||_2 = 0.8.
  std::optional<double> declared_a() const override { return a_; }
  /// lambda_max(Q + I/lambda); at most 2.25 ||Q||_2 when lambda ||Q||_2 = 0.8.
  std::optional<double> declared_b() const override { return b_; }

  const Matrix& system_matrix() const noexcept { return B_; }

 private:
  Matrix B_;
  Eigen::LLT<Matrix> llt_;
  double a_;
  double b_;
};

Point qp_direction(const QPProblem& prob, const Point& w);

struct Rounded {
  Point z;
  double value = 0.0;
};

/// Rounds to the nearest grid point and evaluates the QP objective there.
Rounded round_and_score(const QPProblem& prob, const Point& x);

/// Q = (A + A')/2 and b with entries uniform on [-5, 5], r = (c/20) sqrt(n),
/// lambda = 0.8 / ||Q||_2. Deterministic under `seed`.
QPProblem generate_problem(std::size_t n, int radius_factor, std::uint64_t seed);

/// Uniform on [-grid_bound, grid_bound]^n.
Point random_start(const QPProblem& prob, std::uint64_t seed);

/// Exhaustive minimum of the QP over the integer grid {-g..g}^n.
/// Throws std::invalid_argument when (2g+1)^n exceeds `max_points`.
Rounded exhaustive_grid_optimum(const QPProblem& prob, std::size_t max_points = 1u << 20);

nlohmann::json to_json(const QPProblem& prob);
QPProblem problem_from_json(const nlohmann::json& j);

/// phi_lambda as an Objective.
class FbeObjective final : public Objective {
 public:
  explicit FbeObjective(QPProblem prob);

  std::size_t dimension() const override { return prob_.dimension(); }
  double value(const Point& x) const override { return fbe_value(prob_, x); }
  Subgradient subgradient(const Point& x) const override;
  const QPProblem& problem() const noexcept { return prob_; }

 private:
  QPProblem prob_;
};

}  // namespace nmsub::qp
