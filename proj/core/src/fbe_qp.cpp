#include "nmsub/fbe_qp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "nmsub/random.hpp"

namespace nmsub::qp {

void QPProblem::validate() const {
  const auto n = b.size();
  if (n == 0) throw std::invalid_argument("QPProblem: empty problem");
  if (Q.rows() != n || Q.cols() != n) throw std::invalid_argument("QPProblem: Q/b shape mismatch");
  const double scale = std::max(1.0, Q.cwiseAbs().maxCoeff());
  if ((Q - Q.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
    throw std::invalid_argument("QPProblem: Q is not symmetric");
  }
  if (!(radius > 0.0)) throw std::invalid_argument("QPProblem: radius must be > 0");
  if (!(lambda > 0.0)) throw std::invalid_argument("QPProblem: lambda must be > 0");
  if (grid_bound < 0) throw std::invalid_argument("QPProblem: negative grid bound");
  if (!Q.allFinite() || !b.allFinite()) throw std::invalid_argument("QPProblem: non-finite data");
}

double spectral_norm(const Matrix& Q, double rel_tol, int max_iter) {
  const auto n = Q.rows();
  if (n == 0 || Q.cwiseAbs().maxCoeff() == 0.0) return 0.0;
  // Fixed pseudo-random start: never orthogonal to the dominant eigenvector
  // except on a measure-zero set.
  Rng rng(0x5DEECE66DULL);
  Point v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = rng.uniform(-1.0, 1.0);
  v.normalize();
  double mu = 0.0;
  for (int it = 0; it < max_iter; ++it) {
    const Point qv = Q * v;
    mu = qv.squaredNorm();  // v' Q^2 v
    const Point next = Q * qv;
    // Residual test: stalls less than comparing successive estimates when
    // the two largest |eigenvalues| are close.
    if ((next - mu * v).norm() <= rel_tol * mu) break;
    v = next / next.norm();
  }
  return std::sqrt(mu);
}

QPProblem make_problem(Matrix Q, Point b, double radius, std::optional<double> lambda,
                       int grid_bound) {
  QPProblem prob;
  prob.q_norm = spectral_norm(Q);
  prob.Q = std::move(Q);
  prob.b = std::move(b);
  prob.radius = radius;
  prob.grid_bound = grid_bound;
  if (lambda) {
    prob.lambda = *lambda;
  } else {
    if (!(prob.q_norm > 0.0)) {
      throw std::invalid_argument("make_problem: Q = 0 needs an explicit lambda");
    }
    prob.lambda = 0.8 / prob.q_norm;
  }
  prob.n_hint = static_cast<std::size_t>(prob.b.size());
  prob.validate();
  return prob;
}

Point nearest_center(const Point& y, int grid_bound) {
  const double g = static_cast<double>(grid_bound);
  Point c(y.size());
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    // ceil(y - 1/2) rounds to nearest with halves going down.
    c[i] = std::clamp(std::ceil(y[i] - 0.5), -g, g);
  }
  return c;
}

Point project_onto_C(const Point& y, const QPProblem& prob) {
  const Point c = nearest_center(y, prob.grid_bound);
  const Point diff = y - c;
  const double dist = diff.norm();
  if (dist <= prob.radius) return y;
  return c + (prob.radius / dist) * diff;
}

bool in_C(const Point& x, const QPProblem& prob, double slack) {
  return (x - nearest_center(x, prob.grid_bound)).norm() <= prob.radius + slack;
}

double quadratic_value(const QPProblem& prob, const Point& x) {
  return 0.5 * x.dot(prob.Q * x) + prob.b.dot(x);
}

namespace {

struct EnvelopeParts {
  Point grad;  // Q x + b
  Point z;     // P_C(x - lambda grad)
  double value;
};

EnvelopeParts envelope_parts(const QPProblem& prob, const Point& x) {
  if (x.size() != prob.b.size()) {
    throw std::invalid_argument("FBE: point has dimension " + std::to_string(x.size()) +
                                ", expected " + std::to_string(prob.b.size()));
  }
  EnvelopeParts parts;
  parts.grad = prob.Q * x + prob.b;
  parts.z = project_onto_C(x - prob.lambda * parts.grad, prob);
  const Point gap = parts.z - x;
  parts.value = quadratic_value(prob, x) + parts.grad.dot(gap) +
                gap.squaredNorm() / (2.0 * prob.lambda);
  return parts;
}

}  // namespace

double fbe_value(const QPProblem& prob, const Point& x) {
  return envelope_parts(prob, x).value;
}

FbeSubgradient fbe_subgradient(const QPProblem& prob, const Point& x) {
  auto parts = envelope_parts(prob, x);
  const Point r = x - parts.z;
  FbeSubgradient out;
  out.value = parts.value;
  out.w = (r - prob.lambda * (prob.Q * r)) / prob.lambda;
  return out;
}

NewtonDirection::NewtonDirection(const QPProblem& prob) {
  prob.validate();
  const auto n = prob.Q.rows();
  B_ = prob.Q + Matrix::Identity(n, n) / prob.lambda;
  llt_.compute(B_);
  if (llt_.info() != Eigen::Success) {
    throw std::runtime_error("NewtonDirection: Q + I/lambda is not positive definite");
  }
  // Exact spectrum of B, widened by a few ulps of its largest eigenvalue so
  // the declared bounds survive the eigensolver's rounding.
  Eigen::SelfAdjointEigenSolver<Matrix> eig(B_, Eigen::EigenvaluesOnly);
  const double top = eig.eigenvalues().cwiseAbs().maxCoeff();
  a_ = eig.eigenvalues().minCoeff() - 1e-13 * top;
  b_ = eig.eigenvalues().maxCoeff() + 1e-13 * top;
}

Point NewtonDirection::solve(const Point& w) const { return -llt_.solve(w); }

Point NewtonDirection::direction(std::size_t, const Point&, const Subgradient& g) const {
  return solve(g.w);
}

Point qp_direction(const QPProblem& prob, const Point& w) {
  return NewtonDirection(prob).solve(w);
}

Rounded round_and_score(const QPProblem& prob, const Point& x) {
  Rounded r;
  r.z = nearest_center(x, prob.grid_bound);
  r.value = quadratic_value(prob, r.z);
  return r;
}

QPProblem generate_problem(std::size_t n, int radius_factor, std::uint64_t seed) {
  if (n == 0) throw std::invalid_argument("generate_problem: n must be >= 1");
  if (radius_factor < 1 || radius_factor > 9) {
    throw std::invalid_argument("generate_problem: radius factor must lie in 1..9");
  }
  const auto dim = static_cast<Eigen::Index>(n);
  Rng rng(seed);
  Matrix A(dim, dim);
  for (Eigen::Index i = 0; i < dim; ++i) {
    for (Eigen::Index j = 0; j < dim; ++j) A(i, j) = rng.uniform(-5.0, 5.0);
  }
  Point b(dim);
  for (Eigen::Index i = 0; i < dim; ++i) b[i] = rng.uniform(-5.0, 5.0);
  Matrix Q(dim, dim);
  for (Eigen::Index i = 0; i < dim; ++i) {
    for (Eigen::Index j = 0; j < dim; ++j) Q(i, j) = 0.5 * (A(i, j) + A(j, i));
  }
  const double radius = radius_factor / 20.0 * std::sqrt(static_cast<double>(n));
  auto prob = make_problem(std::move(Q), std::move(b), radius);
  prob.seed = seed;
  prob.radius_factor = radius_factor;
  return prob;
}

Point random_start(const QPProblem& prob, std::uint64_t seed) {
  Rng rng(seed);
  const double g = static_cast<double>(prob.grid_bound);
  Point x(prob.b.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) x[i] = rng.uniform(-g, g);
  return x;
}

Rounded exhaustive_grid_optimum(const QPProblem& prob, std::size_t max_points) {
  const auto n = static_cast<std::size_t>(prob.b.size());
  const auto side = static_cast<std::size_t>(2 * prob.grid_bound + 1);
  std::size_t total = 1;
  for (std::size_t i = 0; i < n; ++i) {
    if (total > max_points / side) {
      throw std::invalid_argument("exhaustive_grid_optimum: grid too large");
    }
    total *= side;
  }
  Rounded best;
  best.value = std::numeric_limits<double>::infinity();
  Point z(static_cast<Eigen::Index>(n));
  for (std::size_t idx = 0; idx < total; ++idx) {
    std::size_t rest = idx;
    for (std::size_t i = n; i-- > 0;) {
      z[static_cast<Eigen::Index>(i)] =
          static_cast<double>(static_cast<int>(rest % side) - prob.grid_bound);
      rest /= side;
    }
    const double v = quadratic_value(prob, z);
    if (v < best.value) {
      best.value = v;
      best.z = z;
    }
  }
  return best;
}

nlohmann::json to_json(const QPProblem& prob) {
  const auto n = prob.b.size();
  std::vector<double> q;
  q.reserve(static_cast<std::size_t>(n * n));
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) q.push_back(prob.Q(i, j));
  }
  return {
      {"n", n},
      {"seed", prob.seed},
      {"c", prob.radius_factor},
      {"Q", q},
      {"b", std::vector<double>(prob.b.data(), prob.b.data() + n)},
      {"r", prob.radius},
      {"lambda", prob.lambda},
      {"grid_bound", prob.grid_bound},
      {"rho", prob.rho},
      {"q_norm", prob.q_norm},
  };
}

QPProblem problem_from_json(const nlohmann::json& j) {
  const auto n = j.at("n").get<Eigen::Index>();
  const auto q = j.at("Q").get<std::vector<double>>();
  const auto bv = j.at("b").get<std::vector<double>>();
  if (n <= 0 || q.size() != static_cast<std::size_t>(n * n) ||
      bv.size() != static_cast<std::size_t>(n)) {
    throw std::invalid_argument("problem JSON: inconsistent sizes");
  }
  Matrix Q(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index k = 0; k < n; ++k) Q(i, k) = q[static_cast<std::size_t>(i * n + k)];
  }
  Point b = Eigen::Map<const Point>(bv.data(), n);
  QPProblem prob;
  prob.Q = std::move(Q);
  prob.b = std::move(b);
  prob.radius = j.at("r").get<double>();
  prob.lambda = j.at("lambda").get<double>();
  prob.grid_bound = j.value("grid_bound", 4);
  prob.rho = j.value("rho", 0.0);
  prob.q_norm = j.contains("q_norm") ? j.at("q_norm").get<double>() : spectral_norm(prob.Q);
  prob.seed = j.value("seed", std::uint64_t{0});
  prob.radius_factor = j.value("c", 0);
  prob.n_hint = static_cast<std::size_t>(n);
  prob.validate();
  return prob;
}

FbeObjective::FbeObjective(QPProblem prob) : prob_(std::move(prob)) { prob_.validate(); }

Subgradient FbeObjective::subgradient(const Point& x) const {
  auto sg = fbe_subgradient(prob_, x);
  return {sg.value, std::move(sg.w), {}};
}

}  // namespace nmsub::qp
