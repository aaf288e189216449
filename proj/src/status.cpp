#include "badgeforge/status.hpp"

#include <cmath>
#include <utility>

#include "badgeforge/numerics.hpp"

namespace badgeforge::status {

const char* shape_name(Shape s) {
  switch (s) {
    case Shape::concave: return "concave";
    case Shape::linear: return "linear";
    case Shape::convex: return "convex";
    case Shape::unknown: return "unknown";
  }
  return "unknown";
}

struct StatusFunction::Impl {
  std::string name = "custom";
  Shape shape = Shape::unknown;
  double alpha = 0.0;
  long n_ref = 0;
  std::function<double(double)> fn;

  double value(double t) const {
    if (n_ref > 0) {
      return static_cast<double>(n_ref) / ((n_ref - 1) * t + 1.0) - 1.0;
    }
    if (alpha > 0.0) return std::pow(1.0 - t, alpha);
    if (fn) return fn(t);
    return 1.0 - t;
  }
};

StatusFunction::StatusFunction(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}

StatusFunction StatusFunction::linear() {
  auto impl = std::make_shared<Impl>();
  impl->name = "linear";
  impl->shape = Shape::linear;
  return StatusFunction(impl);
}

StatusFunction StatusFunction::concave_power(double alpha) {
  if (!(alpha > 0.0 && alpha <= 1.0)) {
    throw DomainError("concave_power: alpha in (0,1] required");
  }
  auto impl = std::make_shared<Impl>();
  impl->name = "concave_power(" + std::to_string(alpha) + ")";
  impl->shape = alpha == 1.0 ? Shape::linear : Shape::concave;
  impl->alpha = alpha;
  return StatusFunction(impl);
}

StatusFunction StatusFunction::convex_reciprocal(long n_ref) {
  if (n_ref < 2) throw DomainError("convex_reciprocal: n_ref >= 2 required");
  auto impl = std::make_shared<Impl>();
  impl->name = "convex_reciprocal(" + std::to_string(n_ref) + ")";
  impl->shape = Shape::convex;
  impl->n_ref = n_ref;
  return StatusFunction(impl);
}

StatusFunction StatusFunction::custom(std::function<double(double)> s, Shape declared) {
  if (!s) throw DomainError("custom status: function required");
  auto impl = std::make_shared<Impl>();
  impl->name = "custom";
  impl->shape = declared == Shape::unknown ? scan_shape(s) : declared;
  impl->fn = std::move(s);
  return StatusFunction(impl);
}

double StatusFunction::value(double t) const {
  if (!(t >= 0.0 && t <= 1.0)) throw DomainError("status: t in [0,1] required");
  return impl_->value(t);
}

Shape StatusFunction::shape() const { return impl_->shape; }
double StatusFunction::top() const { return impl_->value(0.0); }
const std::string& StatusFunction::name() const { return impl_->name; }
double StatusFunction::alpha() const { return impl_->alpha; }
long StatusFunction::n_ref() const { return impl_->n_ref; }

Shape scan_shape(const std::function<double(double)>& s, int grid) {
  if (grid < 4) throw DomainError("scan_shape: grid >= 4 required");
  const double slack = 1e-10;
  bool can_concave = true;
  bool can_convex = true;
  for (int i = 0; i + 2 <= grid; ++i) {
    const double t0 = static_cast<double>(i) / grid;
    const double t1 = static_cast<double>(i + 1) / grid;
    const double t2 = static_cast<double>(i + 2) / grid;
    const double d2 = s(t2) - 2.0 * s(t1) + s(t0);
    if (d2 > slack) can_concave = false;
    if (d2 < -slack) can_convex = false;
  }
  if (can_concave && can_convex) return Shape::linear;
  if (can_concave) return Shape::concave;
  if (can_convex) return Shape::convex;
  return Shape::unknown;
}

MarketSize MarketSize::finite(long n) {
  if (n < 2) throw DomainError("MarketSize: n >= 2 required");
  return MarketSize(false, n);
}

MarketSize MarketSize::large() { return MarketSize(true, 0); }

InterimStatus::InterimStatus(StatusFunction s, MarketSize m)
    : status_(std::move(s)), market_(m) {}

double InterimStatus::value(double q) const {
  if (market_.is_large()) return status_.value(q);
  return numerics::binomial_expect([this](double t) { return status_.value(t); },
                                   market_.n(), q);
}

double InterimStatus::inverse(double target) const {
  const double top = status_.top();
  if (!(target >= 0.0 && target <= top)) {
    throw OutOfRange("interim_status_inverse: target outside [0, S(0)]");
  }
  if (target == 0.0) return 1.0;
  if (target == top) return 0.0;
  return numerics::find_root([&](double q) { return value(q) - target; }, 0.0, 1.0);
}

double beta_interim_single(const BetaStatus& b, double kappa, TieSide side) {
  if (!(b.beta >= 0.0 && b.beta <= 1.0)) throw DomainError("beta in [0,1] required");
  if (!(kappa >= 0.0 && kappa <= 1.0)) throw DomainError("kappa in [0,1] required");
  if (side == TieSide::earned) return b.value(kappa, 0.0);
  return b.value(1.0 - kappa, kappa);
}

}  // namespace badgeforge::status
