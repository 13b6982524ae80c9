#include "mtwlab/cost_models.hpp"

#include <cmath>
#include <numbers>

namespace mtw {

std::string to_string(CostKind kind) {
  switch (kind) {
    case CostKind::Reflector: return "reflector";
    case CostKind::Gauss: return "gauss";
    case CostKind::NegInner: return "neg_inner";
    case CostKind::Quadratic: return "quadratic";
  }
  return "unknown";
}

CostKind parse_cost_kind(std::string_view name) {
  if (name == "reflector") return CostKind::Reflector;
  if (name == "gauss") return CostKind::Gauss;
  if (name == "neg_inner" || name == "neg-inner") return CostKind::NegInner;
  if (name == "quadratic") return CostKind::Quadratic;
  throw ConfigError("unknown cost kind: " + std::string(name));
}

CostModel::CostModel(CostKind kind, GroundSpace space, double truncation)
    : kind_(kind), space_(space), truncation_(truncation) {
  const bool sphere_cost = kind == CostKind::Reflector || kind == CostKind::Gauss;
  if (sphere_cost != space.is_sphere())
    throw ConfigError("cost " + to_string(kind) + " is defined on " + (sphere_cost ? "a sphere" : "a box"));
  if (truncation < 0.0) throw ConfigError("truncation must be >= 0");
  if (truncation > 0.0 && !sphere_cost) throw ConfigError("truncation applies to sphere costs only");
}

namespace {

constexpr double kLn2 = std::numbers::ln2;

bool truncated_region(const CostModel& m, const Vec& x, const Vec& y) {
  if (!m.is_truncated()) return false;
  const double d = geodesic_distance(m.space(), x, y);
  if (m.kind() == CostKind::Reflector) return d < m.truncation();
  return d > std::numbers::pi / 2 - m.truncation();
}

}  // namespace

double reflector_h(double t) {
  const double s = std::sin(0.5 * t);
  if (s <= 0.0) throw DomainError("reflector_h: t must be in (0, pi]");
  return -kLn2 - 2.0 * std::log(s);
}

double reflector_h_inverse(double v) {
  if (v < -kLn2 - 1e-12) throw DomainError("reflector_h_inverse: value below h(pi) = -ln 2");
  const double s = std::min(1.0, std::sqrt(0.5 * std::exp(-v)));
  return 2.0 * std::asin(s);
}

double HProfile::operator()(double t) const { return reflector_h(t); }
double HProfile::inverse(double v) const { return reflector_h_inverse(v); }

HProfile h_profile(const CostModel& model) {
  if (model.kind() != CostKind::Reflector) throw ConfigError("h_profile: reflector cost required");
  return {};
}

ExtendedReal cost(const CostModel& model, const Vec& x, const Vec& y) {
  switch (model.kind()) {
    case CostKind::Reflector: {
      if (model.is_truncated()) {
        const double d = geodesic_distance(model.space(), x, y);
        return ExtendedReal::finite(reflector_h(std::max(d, model.truncation())));
      }
      const double chord2 = squared_norm(x - y);
      if (!(chord2 > 0.0)) return ExtendedReal::infinity();
      return ExtendedReal::finite(-std::log(0.5 * chord2));
    }
    case CostKind::Gauss: {
      double s = dot(x, y);
      if (model.is_truncated()) s = std::max(s, std::sin(model.truncation()));
      if (!(s > 0.0)) return ExtendedReal::infinity();
      return ExtendedReal::finite(-std::log(s));
    }
    case CostKind::NegInner: return ExtendedReal::finite(-dot(x, y));
    case CostKind::Quadratic: return ExtendedReal::finite(squared_norm(x - y));
  }
  return ExtendedReal::infinity();
}

double finite_cost(const CostModel& model, const Vec& x, const Vec& y) {
  const ExtendedReal c = cost(model, x, y);
  if (!c.is_finite()) throw DomainError("cost is +infinity on this pair");
  return c.value();
}

Vec grad_x(const CostModel& model, const Vec& x, const Vec& y) {
  if (truncated_region(model, x, y)) return Vec(x.dim());
  switch (model.kind()) {
    case CostKind::Reflector: {
      const double s = dot(x, y);
      if (!(squared_norm(x - y) > 0.0)) throw DomainError("grad_x: reflector cost is +infinity at x = y");
      return (y - s * x) / (1.0 - s);
    }
    case CostKind::Gauss: {
      const double s = dot(x, y);
      if (!(s > 0.0)) throw DomainError("grad_x: gauss cost is +infinity for <x,n> <= 0");
      return x - y / s;
    }
    case CostKind::NegInner: return -y;
    case CostKind::Quadratic: return 2.0 * (x - y);
  }
  return Vec(x.dim());
}

Vec grad_y(const CostModel& model, const Vec& x, const Vec& y) {
  // All four costs are symmetric in their arguments.
  return grad_x(model, y, x);
}

Eigen::MatrixXd cross_hessian(const CostModel& model, const Vec& x, const Vec& y, double step) {
  const GroundSpace& sp = model.space();
  const auto fx = tangent_frame(sp, x);
  const auto fy = tangent_frame(sp, y);
  const auto n = static_cast<Eigen::Index>(fx.size());
  const auto m = static_cast<Eigen::Index>(fy.size());
  auto column = [&](std::size_t j, double h) {
    const Vec gp = grad_x(model, x, exp_map(sp, y, h * fy[j]));
    const Vec gm = grad_x(model, x, exp_map(sp, y, -h * fy[j]));
    return to_frame(fx, (gp - gm) / (2.0 * h));
  };
  Eigen::MatrixXd a(n, m);
  for (Eigen::Index j = 0; j < m; ++j) {
    const auto uj = static_cast<std::size_t>(j);
    a.col(j) = (4.0 * column(uj, 0.5 * step) - column(uj, step)) / 3.0;
  }
  return a;
}

Vec cexp(const CostModel& model, const Vec& x, const Vec& p) {
  switch (model.kind()) {
    case CostKind::Reflector: {
      const double k = 2.0 / (1.0 + squared_norm(p));
      Vec y = (1.0 - k) * x - k * p;
      return y / norm(y);
    }
    case CostKind::Gauss: {
      Vec y = (p + x) / std::sqrt(1.0 + squared_norm(p));
      return y / norm(y);
    }
    case CostKind::NegInner: return p;
    case CostKind::Quadratic: return x + 0.5 * p;
  }
  return x;
}

bool in_domain(const CostModel& model, const Vec& x, const Vec& y, double eps) {
  if (model.is_truncated()) return true;
  switch (model.kind()) {
    case CostKind::Reflector: return geodesic_distance(model.space(), x, y) >= eps;
    case CostKind::Gauss: return geodesic_distance(model.space(), x, y) <= std::numbers::pi / 2 - eps;
    default: return true;
  }
}

double truncated_cost_lipschitz(const CostModel& model) {
  if (!model.is_truncated()) throw ConfigError("truncated_cost_lipschitz: model is not truncated");
  const double eps = model.truncation();
  // sup |h'| over the untruncated range, h the distance profile of the cost.
  if (model.kind() == CostKind::Reflector) return 1.0 / std::tan(0.5 * eps);
  return 1.0 / std::tan(eps);
}

}  // namespace mtw
