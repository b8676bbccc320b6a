#pragma once

// Minimum sum-of-squares clustering:
//
//   phi(X) = (1/p) sum_j min_t ||x^t - a^j||^2,   X = (x^1, ..., x^ell)
//
// with centroids stored as consecutive blocks of a flat Point.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "nmsub/core.hpp"

namespace nmsub::mssc {

/// p points in R^s, row-major.
class DataSet {
 public:
  DataSet() = default;
  /// Throws std::invalid_argument for p == 0, s == 0, a size mismatch or a
  /// non-finite entry.
  DataSet(std::size_t p, std::size_t s, std::vector<double> values);

  std::size_t p() const noexcept { return p_; }
  std::size_t s() const noexcept { return s_; }
  const double* row(std::size_t j) const noexcept { return values_.data() + j * s_; }
  double operator()(std::size_t j, std::size_t c) const noexcept { return values_[j * s_ + c]; }
  const std::vector<double>& values() const noexcept { return values_; }

 private:
  std::size_t p_ = 0;
  std::size_t s_ = 0;
  std::vector<double> values_;
};

struct ClusteringProblem {
  DataSet data;
  std::size_t ell = 1;
  double alpha = 1e-3;

  std::size_t dimension() const noexcept { return data.s() * ell; }
  /// Throws std::invalid_argument unless ell >= 1 and alpha > 0.
  void validate() const;
};

/// Active centroid for each data point and how often each centroid is chosen.
struct ActiveSummary {
  std::vector<std::size_t> active;  // size p, values in [0, ell)
  std::vector<std::size_t> counts;  // size ell, sums to p
};

double mssc_value(const Point& X, const ClusteringProblem& prob);

struct MsscSubgradient {
  double value = 0.0;
  Point w;
  ActiveSummary summary;
};

/// Value, one Clarke subgradient and the active summary in a single pass.
/// Ties pick the smallest centroid index. w block t is
/// (1/p) sum_{j : active[j] = t} 2 (x^t - a^j).
MsscSubgradient mssc_subgradient(const Point& X, const ClusteringProblem& prob);

/// How the Hessian regularization enters the block scale.
enum class HessianRegConvention {
  /// Block scale p / (2 q_t + alpha): the explicit componentwise formula.
  Componentwise,
  /// Block scale p / (2 q_t + p alpha): inverse of (Hessian + alpha I).
  Matrix,
};

/// d block t = -scale_t * w block t.
Point mssc_direction(const Point& w, const ActiveSummary& summary, std::size_t p,
                     double alpha,
                     HessianRegConvention convention = HessianRegConvention::Componentwise);

/// Diagonal of the block scale (2 q_t + alpha) / p (or (2 q_t + p alpha) / p)
/// so that w = B d. Exposed for tests of the quadratic-form identities.
double block_curvature(std::size_t q_t, std::size_t p, double alpha,
                       HessianRegConvention convention);

/// Centroids drawn uniformly per coordinate over the data bounding box.
/// Deterministic under `seed` (mt19937_64, 53-bit mapping).
Point random_init(const ClusteringProblem& prob, std::uint64_t seed);

/// Comma-separated decimal values, one point per line. Throws ParseError with
/// the 1-based line number on a ragged row, a non-numeric field or an empty
/// file; std::runtime_error when the file cannot be opened.
DataSet load_csv(const std::string& path, bool skip_header);
DataSet parse_csv(std::istream& in, bool skip_header);

/// Per-iteration regularization alpha_k restricted to [lower, upper].
struct AlphaSchedule {
  double lower = 1e-3;
  double upper = 1e-3;
  std::function<double(std::size_t)> at;

  static AlphaSchedule constant(double alpha);
};

/// Admissible range for alpha_k.
inline constexpr double kAlphaMin = 1e-6;
inline constexpr double kAlphaMax = 1e3;

/// phi as an Objective. The subgradient's side_data holds an ActiveSummary.
class ClusteringObjective final : public Objective {
 public:
  explicit ClusteringObjective(ClusteringProblem prob);

  std::size_t dimension() const override { return prob_.dimension(); }
  double value(const Point& X) const override;
  Subgradient subgradient(const Point& X) const override;
  const ClusteringProblem& problem() const noexcept { return prob_; }

 private:
  ClusteringProblem prob_;
};

/// Regularized block-diagonal Newton direction. With B = blkdiag(c_t I),
/// c_t = block_curvature(q_t, ...), the declared constants are
///   a = min_t c_t >= alpha_lower / p   (Componentwise)  or alpha_lower (Matrix)
///   b = max_t c_t <= (2p + alpha_upper) / p            or 2 + alpha_upper
class ClusteringDirection final : public DirectionStrategy {
 public:
  ClusteringDirection(std::size_t p, AlphaSchedule alpha,
                      HessianRegConvention convention = HessianRegConvention::Componentwise);

  Point direction(std::size_t iteration, const Point& x,
                  const Subgradient& g) const override;
  std::optional<double> declared_a() const override;
  std::optional<double> declared_b() const override;

 private:
  std::size_t p_;
  AlphaSchedule alpha_;
  HessianRegConvention convention_;
};

}  // namespace nmsub::mssc
