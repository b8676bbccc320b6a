#include "nmsub/mssc.hpp"

#include <algorithm>
#include <any>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <stdexcept>
#include <string_view>

#include "nmsub/errors.hpp"
#include "nmsub/random.hpp"

namespace nmsub::mssc {

DataSet::DataSet(std::size_t p, std::size_t s, std::vector<double> values)
    : p_(p), s_(s), values_(std::move(values)) {
  if (p_ == 0) throw std::invalid_argument("DataSet: no data points");
  if (s_ == 0) throw std::invalid_argument("DataSet: zero-dimensional points");
  if (values_.size() != p_ * s_) throw std::invalid_argument("DataSet: size mismatch");
  for (double v : values_) {
    if (!std::isfinite(v)) throw std::invalid_argument("DataSet: non-finite entry");
  }
}

void ClusteringProblem::validate() const {
  if (ell == 0) throw std::invalid_argument("ClusteringProblem: ell must be >= 1");
  if (!(alpha > 0.0)) throw std::invalid_argument("ClusteringProblem: alpha must be > 0");
  if (data.p() == 0) throw std::invalid_argument("ClusteringProblem: empty data set");
}

namespace {

void check_dimension(const Point& X, const ClusteringProblem& prob) {
  if (static_cast<std::size_t>(X.size()) != prob.dimension()) {
    throw std::invalid_argument("clustering point has dimension " +
                                std::to_string(X.size()) + ", expected s*ell = " +
                                std::to_string(prob.dimension()));
  }
}

double squared_distance(const double* x, const double* a, std::size_t s) {
  double acc = 0.0;
  for (std::size_t c = 0; c < s; ++c) {
    const double diff = x[c] - a[c];
    acc += diff * diff;
  }
  return acc;
}

// Smallest t attaining min_t ||x^t - a||^2, and that minimum.
std::pair<std::size_t, double> nearest_centroid(const Point& X, const double* a,
                                                std::size_t s, std::size_t ell) {
  std::size_t best_t = 0;
  double best = squared_distance(X.data(), a, s);
  for (std::size_t t = 1; t < ell; ++t) {
    const double dist = squared_distance(X.data() + t * s, a, s);
    if (dist < best) {
      best = dist;
      best_t = t;
    }
  }
  return {best_t, best};
}

}  // namespace

double mssc_value(const Point& X, const ClusteringProblem& prob) {
  check_dimension(X, prob);
  const auto& data = prob.data;
  double sum = 0.0;
  for (std::size_t j = 0; j < data.p(); ++j) {
    sum += nearest_centroid(X, data.row(j), data.s(), prob.ell).second;
  }
  return sum / static_cast<double>(data.p());
}

MsscSubgradient mssc_subgradient(const Point& X, const ClusteringProblem& prob) {
  check_dimension(X, prob);
  const auto& data = prob.data;
  const std::size_t s = data.s();
  const std::size_t p = data.p();

  MsscSubgradient out;
  out.w = Point::Zero(X.size());
  out.summary.active.resize(p);
  out.summary.counts.assign(prob.ell, 0);

  double sum = 0.0;
  for (std::size_t j = 0; j < p; ++j) {
    const double* a = data.row(j);
    const auto [t, dist] = nearest_centroid(X, a, s, prob.ell);
    sum += dist;
    out.summary.active[j] = t;
    ++out.summary.counts[t];
    for (std::size_t c = 0; c < s; ++c) {
      out.w[t * s + c] += 2.0 * (X[t * s + c] - a[c]);
    }
  }
  out.value = sum / static_cast<double>(p);
  out.w /= static_cast<double>(p);
  return out;
}

double block_curvature(std::size_t q_t, std::size_t p, double alpha,
                       HessianRegConvention convention) {
  const double pd = static_cast<double>(p);
  const double reg = convention == HessianRegConvention::Componentwise ? alpha : pd * alpha;
  return (2.0 * static_cast<double>(q_t) + reg) / pd;
}

Point mssc_direction(const Point& w, const ActiveSummary& summary, std::size_t p,
                     double alpha, HessianRegConvention convention) {
  if (!(alpha > 0.0)) throw std::invalid_argument("mssc_direction: alpha must be > 0");
  const std::size_t ell = summary.counts.size();
  if (ell == 0 || w.size() % static_cast<Eigen::Index>(ell) != 0) {
    throw std::invalid_argument("mssc_direction: subgradient size not a multiple of ell");
  }
  const std::size_t s = static_cast<std::size_t>(w.size()) / ell;
  const double pd = static_cast<double>(p);
  Point d(w.size());
  for (std::size_t t = 0; t < ell; ++t) {
    const double reg = convention == HessianRegConvention::Componentwise ? alpha : pd * alpha;
    const double scale = pd / (2.0 * static_cast<double>(summary.counts[t]) + reg);
    for (std::size_t c = 0; c < s; ++c) d[t * s + c] = -scale * w[t * s + c];
  }
  return d;
}

Point random_init(const ClusteringProblem& prob, std::uint64_t seed) {
  const auto& data = prob.data;
  if (data.p() == 0) throw std::invalid_argument("random_init: empty data set");
  const std::size_t s = data.s();
  std::vector<double> lo(data.row(0), data.row(0) + s);
  std::vector<double> hi = lo;
  for (std::size_t j = 1; j < data.p(); ++j) {
    for (std::size_t c = 0; c < s; ++c) {
      lo[c] = std::min(lo[c], data(j, c));
      hi[c] = std::max(hi[c], data(j, c));
    }
  }
  Rng rng(seed);
  Point X(static_cast<Eigen::Index>(prob.dimension()));
  for (std::size_t t = 0; t < prob.ell; ++t) {
    for (std::size_t c = 0; c < s; ++c) {
      X[t * s + c] = lo[c] == hi[c] ? lo[c] : std::min(rng.uniform(lo[c], hi[c]), hi[c]);
    }
  }
  return X;
}

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

}  // namespace

DataSet parse_csv(std::istream& in, bool skip_header) {
  std::vector<double> values;
  std::size_t s = 0;
  std::size_t p = 0;
  std::size_t lineno = 0;
  std::string line;
  bool header_pending = skip_header;
  while (std::getline(in, line)) {
    ++lineno;
    const auto view = trim(line);
    if (view.empty()) continue;
    if (header_pending) {
      header_pending = false;
      continue;
    }
    std::size_t fields = 0;
    std::size_t start = 0;
    while (true) {
      const auto pos = view.find(',', start);
      const auto field = trim(view.substr(start, pos == std::string_view::npos
                                                     ? std::string_view::npos
                                                     : pos - start));
      double v = 0.0;
      auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
      if (field.empty() || ec != std::errc() || ptr != field.data() + field.size() ||
          !std::isfinite(v)) {
        throw ParseError("non-numeric field '" + std::string(field) + "'", lineno);
      }
      values.push_back(v);
      ++fields;
      if (pos == std::string_view::npos) break;
      start = pos + 1;
    }
    if (p == 0) {
      s = fields;
    } else if (fields != s) {
      throw ParseError("expected " + std::to_string(s) + " fields, found " +
                           std::to_string(fields),
                       lineno);
    }
    ++p;
  }
  if (p == 0) throw ParseError("empty data file", lineno == 0 ? 1 : lineno);
  return DataSet(p, s, std::move(values));
}

DataSet load_csv(const std::string& path, bool skip_header) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open data file '" + path + "'");
  return parse_csv(in, skip_header);
}

AlphaSchedule AlphaSchedule::constant(double alpha) {
  return {alpha, alpha, [alpha](std::size_t) { return alpha; }};
}

ClusteringObjective::ClusteringObjective(ClusteringProblem prob) : prob_(std::move(prob)) {
  prob_.validate();
}

double ClusteringObjective::value(const Point& X) const { return mssc_value(X, prob_); }

Subgradient ClusteringObjective::subgradient(const Point& X) const {
  auto sg = mssc_subgradient(X, prob_);
  return {sg.value, std::move(sg.w), std::move(sg.summary)};
}

ClusteringDirection::ClusteringDirection(std::size_t p, AlphaSchedule alpha,
                                         HessianRegConvention convention)
    : p_(p), alpha_(std::move(alpha)), convention_(convention) {
  if (p_ == 0) throw std::invalid_argument("ClusteringDirection: p must be positive");
  if (!alpha_.at) throw std::invalid_argument("ClusteringDirection: empty alpha schedule");
  if (!(alpha_.lower >= kAlphaMin && alpha_.upper <= kAlphaMax && alpha_.lower <= alpha_.upper)) {
    throw std::invalid_argument("ClusteringDirection: alpha bounds outside [1e-6, 1e3]");
  }
}

Point ClusteringDirection::direction(std::size_t iteration, const Point&,
                                     const Subgradient& g) const {
  const auto* summary = std::any_cast<ActiveSummary>(&g.side_data);
  if (summary == nullptr) {
    throw std::invalid_argument("ClusteringDirection: subgradient lacks an ActiveSummary");
  }
  const double alpha = alpha_.at(iteration);
  if (!(alpha >= alpha_.lower && alpha <= alpha_.upper)) {
    throw std::invalid_argument("ClusteringDirection: alpha_k outside its declared bounds");
  }
  return mssc_direction(g.w, *summary, p_, alpha, convention_);
}

std::optional<double> ClusteringDirection::declared_a() const {
  return block_curvature(0, p_, alpha_.lower, convention_);
}

std::optional<double> ClusteringDirection::declared_b() const {
  return block_curvature(p_, p_, alpha_.upper, convention_);
}

}  // namespace nmsub::mssc
