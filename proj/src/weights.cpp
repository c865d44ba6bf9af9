#include "muckfem/weights.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "muckfem/error.hpp"
#include "muckfem/gauss.hpp"

namespace muckfem {

namespace {

constexpr double kPi = std::numbers::pi;

double snap(double t) {
  const double r = std::round(t);
  return std::abs(t - r) < 1e-13 ? r : t;
}

double lastCoordinate(int dim, Point x) { return dim == 1 ? x.x : x.y; }

// varpi before the outer exponent is applied
double varpiBase(int n, double r, double d) {
  const double u = r / (2.0 * d);
  if (u >= 0.5) return std::pow(2.0, 2.0 - n) / (std::log(2.0) * std::log(2.0));
  if (u == 0.0) return n == 2 ? 0.0 : std::numeric_limits<double>::infinity();
  const double l = std::log(u);
  return std::pow(u, n - 2.0) / (l * l);
}

}  // namespace

bool Singularity::integrable() const {
  if (exponent > -codim + 1e-12) return true;
  return std::abs(exponent + codim) <= 1e-12 && logPower < -1.0;
}

Weight Weight::constant(int dim, double c) {
  require(c > 0.0, ErrorCode::InvalidArgument, "constant weight must be positive");
  Node n;
  n.kind = WeightKind::Constant;
  n.dim = dim;
  n.scale = c;
  return Weight(n);
}

Weight Weight::power(int dim, Point center, double gamma) {
  Node n;
  n.kind = WeightKind::Power;
  n.dim = dim;
  n.center = center;
  n.exponent = gamma;
  return Weight(n);
}

Weight Weight::extension(int dim, double alpha, double face) {
  Node n;
  n.kind = WeightKind::Extension;
  n.dim = dim;
  n.exponent = alpha;
  n.face = face;
  return Weight(n);
}

Weight Weight::diracLog(int dim, Point center, double diameter) {
  require(diameter > 0.0, ErrorCode::InvalidArgument, "dirac-log weight needs a positive diameter");
  Node n;
  n.kind = WeightKind::DiracLog;
  n.dim = dim;
  n.center = center;
  n.diameter = diameter;
  return Weight(n);
}

Weight Weight::reciprocal(const Weight& w) {
  if (w.kind() == WeightKind::Reciprocal) return w.child(0);
  Node n;
  n.kind = WeightKind::Reciprocal;
  n.dim = w.dim();
  n.a = std::make_shared<const Weight>(w);
  return Weight(n);
}

Weight Weight::product(const Weight& a, const Weight& b) {
  require(a.dim() == b.dim(), ErrorCode::InvalidArgument, "product of weights in different dimensions");
  Node n;
  n.kind = WeightKind::Product;
  n.dim = a.dim();
  n.a = std::make_shared<const Weight>(a);
  n.b = std::make_shared<const Weight>(b);
  return Weight(n);
}

double Weight::operator()(Point x) const {
  const Node& n = *node_;
  switch (n.kind) {
    case WeightKind::Constant: return n.scale;
    case WeightKind::Power: {
      const double r = n.dim == 1 ? std::abs(x.x - n.center.x) : distance(x, n.center);
      return n.scale * std::pow(r, n.exponent * n.t);
    }
    case WeightKind::Extension:
      return n.scale * std::pow(std::abs(lastCoordinate(n.dim, x) - n.face), n.exponent * n.t);
    case WeightKind::DiracLog: {
      const double r = n.dim == 1 ? std::abs(x.x - n.center.x) : distance(x, n.center);
      return n.scale * std::pow(varpiBase(n.dim, r, n.diameter), n.t);
    }
    case WeightKind::Reciprocal: return 1.0 / (*n.a)(x);
    case WeightKind::Product: return (*n.a)(x) * (*n.b)(x);
  }
  return 0.0;
}

Weight Weight::raised(double t) const {
  const Node& n = *node_;
  switch (n.kind) {
    case WeightKind::Reciprocal: return reciprocal(n.a->raised(t));
    case WeightKind::Product: return product(n.a->raised(t), n.b->raised(t));
    default: {
      Node m = n;
      m.t = snap(n.t * t);
      m.scale = std::pow(n.scale, t);
      return Weight(m);
    }
  }
}

Weight Weight::pulledBack(double a, Point b) const {
  require(a != 0.0, ErrorCode::InvalidArgument, "degenerate affine map");
  const Node& n = *node_;
  Node m = n;
  const Point shifted{(n.center.x - b.x) / a, (n.center.y - b.y) / a};
  switch (n.kind) {
    case WeightKind::Constant: break;
    case WeightKind::Power:
      m.center = n.dim == 1 ? Point{shifted.x, 0.0} : shifted;
      m.scale = n.scale * std::pow(std::abs(a), n.exponent * n.t);
      break;
    case WeightKind::Extension:
      m.face = (n.face - lastCoordinate(n.dim, b)) / a;
      m.scale = n.scale * std::pow(std::abs(a), n.exponent * n.t);
      break;
    case WeightKind::DiracLog:
      m.center = n.dim == 1 ? Point{shifted.x, 0.0} : shifted;
      m.diameter = n.diameter / std::abs(a);
      break;
    case WeightKind::Reciprocal: return reciprocal(n.a->pulledBack(a, b));
    case WeightKind::Product: return product(n.a->pulledBack(a, b), n.b->pulledBack(a, b));
  }
  return Weight(m);
}

std::vector<Singularity> Weight::singularities() const {
  const Node& n = *node_;
  std::vector<Singularity> out;
  switch (n.kind) {
    case WeightKind::Constant: break;
    case WeightKind::Power:
      if (n.exponent * n.t != 0.0)
        out.push_back({Singularity::Type::Point, n.center, n.dim, n.exponent * n.t, 0.0});
      break;
    case WeightKind::Extension:
      if (n.exponent * n.t != 0.0) {
        if (n.dim == 1)
          out.push_back({Singularity::Type::Point, {n.face, 0.0}, 1, n.exponent * n.t, 0.0});
        else
          out.push_back({Singularity::Type::Face, {0.0, n.face}, 1, n.exponent * n.t, 0.0});
      }
      break;
    case WeightKind::DiracLog:
      out.push_back({Singularity::Type::Point, n.center, n.dim, (n.dim - 2.0) * n.t, -2.0 * n.t});
      break;
    case WeightKind::Reciprocal:
      for (auto s : n.a->singularities()) {
        s.exponent = -s.exponent;
        s.logPower = -s.logPower;
        out.push_back(s);
      }
      break;
    case WeightKind::Product: {
      out = n.a->singularities();
      for (auto s : n.b->singularities()) {
        auto same = std::find_if(out.begin(), out.end(), [&](const Singularity& o) {
          return o.type == s.type && o.location == s.location;
        });
        if (same == out.end()) {
          out.push_back(s);
        } else {
          same->exponent += s.exponent;
          same->logPower += s.logPower;
        }
      }
      std::erase_if(out, [](const Singularity& s) { return s.exponent == 0.0 && s.logPower == 0.0; });
      break;
    }
  }
  return out;
}

std::vector<std::pair<Point, double>> Weight::kinks() const {
  const Node& n = *node_;
  switch (n.kind) {
    case WeightKind::DiracLog: return {{n.center, n.diameter}};
    case WeightKind::Reciprocal: return n.a->kinks();
    case WeightKind::Product: {
      auto k = n.a->kinks();
      auto k2 = n.b->kinks();
      k.insert(k.end(), k2.begin(), k2.end());
      return k;
    }
    default: return {};
  }
}

bool Weight::isConstant() const {
  const Node& n = *node_;
  switch (n.kind) {
    case WeightKind::Constant: return true;
    case WeightKind::Power:
    case WeightKind::Extension: return n.exponent * n.t == 0.0;
    case WeightKind::DiracLog: return n.t == 0.0;
    case WeightKind::Reciprocal: return n.a->isConstant();
    case WeightKind::Product: return n.a->isConstant() && n.b->isConstant();
  }
  return false;
}

std::string Weight::describe() const {
  const Node& n = *node_;
  std::ostringstream os;
  os.precision(6);
  auto powerSuffix = [&]() {
    if (n.t != 1.0) os << "^" << n.t;
    if (n.scale != 1.0) os << "*" << n.scale;
  };
  switch (n.kind) {
    case WeightKind::Constant: os << n.scale; break;
    case WeightKind::Power:
      os << "|x-(" << n.center.x;
      if (n.dim == 2) os << "," << n.center.y;
      os << ")|^" << n.exponent;
      powerSuffix();
      break;
    case WeightKind::Extension:
      os << "|" << (n.dim == 1 ? "x" : "y") << "-" << n.face << "|^" << n.exponent;
      powerSuffix();
      break;
    case WeightKind::DiracLog:
      os << "varpi(x0=(" << n.center.x << "," << n.center.y << "),d=" << n.diameter << ")";
      powerSuffix();
      break;
    case WeightKind::Reciprocal: os << "1/(" << n.a->describe() << ")"; break;
    case WeightKind::Product: os << "(" << n.a->describe() << ")*(" << n.b->describe() << ")"; break;
  }
  return os.str();
}

std::optional<PowerForm> asPurePower(const Weight& w) {
  switch (w.kind()) {
    case WeightKind::Constant: return PowerForm{Singularity::Type::Point, {}, 0.0, w.scale()};
    case WeightKind::Power:
      return PowerForm{Singularity::Type::Point, w.center(), w.exponent() * w.outerPower(), w.scale()};
    case WeightKind::Extension:
      if (w.dim() == 1)
        return PowerForm{Singularity::Type::Point, {w.face(), 0.0}, w.exponent() * w.outerPower(), w.scale()};
      return PowerForm{Singularity::Type::Face, {0.0, w.face()}, w.exponent() * w.outerPower(), w.scale()};
    case WeightKind::DiracLog: return std::nullopt;
    case WeightKind::Reciprocal: {
      auto f = asPurePower(w.child(0));
      if (!f) return std::nullopt;
      f->exponent = -f->exponent;
      f->scale = 1.0 / f->scale;
      return f;
    }
    case WeightKind::Product: {
      auto a = asPurePower(w.child(0));
      auto b = asPurePower(w.child(1));
      if (!a || !b) return std::nullopt;
      if (a->exponent == 0.0) std::swap(a, b);
      if (b->exponent != 0.0 && (a->type != b->type || !(a->center == b->center))) return std::nullopt;
      a->exponent += b->exponent;
      a->scale *= b->scale;
      return a;
    }
  }
  return std::nullopt;
}

Weight makeWeight(const WeightSpec& s) {
  Weight w = Weight::constant(s.dim);
  if (s.kind == "constant" || s.kind == "one") {
    w = Weight::constant(s.dim, s.exponent == 0.0 ? 1.0 : s.exponent);
  } else if (s.kind == "power") {
    w = Weight::power(s.dim, s.center, s.exponent);
  } else if (s.kind == "extension") {
    require(s.exponent > -1.0 && s.exponent < 1.0, ErrorCode::ConfigError, "extension exponent must lie in (-1,1)");
    w = Weight::extension(s.dim, s.exponent, s.dim == 1 ? s.center.x : s.center.y);
  } else if (s.kind == "dirac-log") {
    w = Weight::diracLog(s.dim, s.center, s.diameter);
  } else {
    throw Error(ErrorCode::ConfigError, "unknown weight kind '" + s.kind + "'");
  }
  return s.reciprocal ? Weight::reciprocal(w) : w;
}

// ---------------------------------------------------------------- measures

namespace {

struct Region2D {
  bool isBall = false;
  Ball ball;
  std::vector<Point> poly;  // counter-clockwise

  double area() const {
    if (isBall) return ballVolume(2, ball.radius);
    Cell c{2, poly};
    return c.measure();
  }

  bool contains(Point p) const {
    if (isBall) return distance(p, ball.center) <= ball.radius * (1.0 + 1e-14);
    Cell c{2, poly};
    return c.contains(p, 1e-14);
  }

  std::pair<double, double> yRange() const {
    if (isBall) return {ball.center.y - ball.radius, ball.center.y + ball.radius};
    double lo = poly[0].y, hi = poly[0].y;
    for (auto v : poly) lo = std::min(lo, v.y), hi = std::max(hi, v.y);
    return {lo, hi};
  }

  // Parameter interval [tin, tout] of {f + t d : t >= 0} inside the region.
  bool ray(Point f, Point d, double& tin, double& tout) const {
    if (isBall) {
      const Point q = f - ball.center;
      const double b = dot(d, q);
      const double c = dot(q, q) - ball.radius * ball.radius;
      const double disc = b * b - c;
      if (disc <= 0.0) return false;
      const double s = std::sqrt(disc);
      tin = std::max(0.0, -b - s);
      tout = -b + s;
      return tout > tin;
    }
    tin = 0.0;
    tout = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < poly.size(); ++i) {
      const Point a = poly[i], e = poly[(i + 1) % poly.size()] - a;
      const Point nrm{e.y, -e.x};  // outward for counter-clockwise order
      const double num = dot(nrm, f - a);
      const double den = dot(nrm, d);
      if (std::abs(den) < 1e-300) {
        if (num > 0.0) return false;
        continue;
      }
      const double t = -num / den;
      if (den > 0.0) tout = std::min(tout, t);
      else tin = std::max(tin, t);
    }
    return tout > tin;
  }

  bool chord(double y, double& xl, double& xr) const {
    if (isBall) {
      const double dy = y - ball.center.y;
      const double s = ball.radius * ball.radius - dy * dy;
      if (s <= 0.0) return false;
      xl = ball.center.x - std::sqrt(s);
      xr = ball.center.x + std::sqrt(s);
      return true;
    }
    xl = std::numeric_limits<double>::infinity();
    xr = -xl;
    for (std::size_t i = 0; i < poly.size(); ++i) {
      const Point a = poly[i], b = poly[(i + 1) % poly.size()];
      if ((a.y - y) * (b.y - y) > 0.0) continue;
      if (a.y == b.y) {
        xl = std::min({xl, a.x, b.x});
        xr = std::max({xr, a.x, b.x});
      } else {
        const double x = a.x + (y - a.y) / (b.y - a.y) * (b.x - a.x);
        xl = std::min(xl, x);
        xr = std::max(xr, x);
      }
    }
    return xr > xl;
  }

  std::vector<double> breakAngles(Point f) const {
    std::vector<double> out;
    if (isBall) {
      const double D = distance(f, ball.center);
      if (D > ball.radius * (1.0 - 1e-14)) {
        const double c = std::atan2(ball.center.y - f.y, ball.center.x - f.x);
        const double s = std::asin(std::min(1.0, ball.radius / D));
        out = {c - s, c + s};
      }
    } else {
      for (auto v : poly)
        if (distance(v, f) > 1e-15) out.push_back(std::atan2(v.y - f.y, v.x - f.x));
    }
    return out;
  }
};

void checkIntegrable(const Weight& w, const std::vector<Singularity>& sing, double lo, double hi,
                     const Region2D* region) {
  for (const auto& s : sing) {
    if (s.integrable()) continue;
    bool touches;
    if (w.dim() == 1) {
      touches = s.location.x >= lo && s.location.x <= hi;
    } else if (s.type == Singularity::Type::Point) {
      touches = region->contains(s.location);
    } else {
      auto [ylo, yhi] = region->yRange();
      touches = s.location.y >= ylo && s.location.y <= yhi;
    }
    if (touches) throw Error(ErrorCode::NonIntegrable, w.describe() + " is not integrable near its singular set");
  }
}

double powerAntiderivative(double s, double e) {
  const double sign = s < 0.0 ? -1.0 : 1.0;
  if (std::abs(e + 1.0) < 1e-14) return sign * std::log(std::abs(s));
  return sign * std::pow(std::abs(s), e + 1.0) / (e + 1.0);
}

// 1D varpi with outer exponent one: closed form from d/du(-1/log u) = 1/(u log^2 u).
double varpi1D(const Weight& w, double a, double b) {
  const double c = w.center().x, d = w.diameter();
  auto side = [&](double r0, double r1) {  // distances from the centre, 0 <= r0 <= r1
    double sum = 0.0;
    const double inner1 = std::min(r1, d);
    if (inner1 > r0) {
      auto F = [&](double r) { return r <= 0.0 ? 0.0 : -1.0 / std::log(r / (2.0 * d)); };
      sum += 2.0 * d * (F(inner1) - F(r0));
    }
    const double outer0 = std::max(r0, d);
    if (r1 > outer0) sum += (r1 - outer0) * 2.0 / (std::log(2.0) * std::log(2.0));
    return sum;
  };
  double total = 0.0;
  if (b > c) total += side(std::max(a - c, 0.0), b - c);
  if (a < c) total += side(std::max(c - b, 0.0), c - a);
  return w.scale() * total;
}

double measure1D(const Weight& w, double a, double b, double tol) {
  const auto sing = w.singularities();
  checkIntegrable(w, sing, a, b, nullptr);
  if (w.isConstant()) return w(Point{0.5 * (a + b), 0.0}) * (b - a);
  if (auto pf = asPurePower(w)) {
    const double c = pf->center.x;
    return pf->scale * (powerAntiderivative(b - c, pf->exponent) - powerAntiderivative(a - c, pf->exponent));
  }
  if (w.kind() == WeightKind::DiracLog && w.outerPower() == 1.0) return varpi1D(w, a, b);
  std::vector<double> cuts{a, b};
  for (const auto& s : sing)
    if (s.location.x > a && s.location.x < b) cuts.push_back(s.location.x);
  for (auto [c, r] : w.kinks())
    for (double x : {c.x - r, c.x + r})
      if (x > a && x < b) cuts.push_back(x);
  std::sort(cuts.begin(), cuts.end());
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    total += integrate([&](double x) { return w(Point{x, 0.0}); }, cuts[i], cuts[i + 1], tol);
  }
  return total;
}

double polarMeasure(const Weight& w, const Region2D& region, Point focus, double tol) {
  auto angles = region.breakAngles(focus);
  std::vector<double> cuts;
  if (angles.empty()) {
    cuts = {0.0, kPi, 2.0 * kPi};
  } else {
    const double base = angles[0];
    for (double t : angles) {
      double u = std::fmod(t - base, 2.0 * kPi);
      if (u < 0.0) u += 2.0 * kPi;
      cuts.push_back(base + u);
    }
    cuts.push_back(base + 2.0 * kPi);
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end(), [](double x, double y) { return y - x < 1e-14; }),
               cuts.end());
  }
  std::vector<double> radialBreaks;
  for (auto [c, r] : w.kinks())
    if (distance(c, focus) < 1e-14) radialBreaks.push_back(r);

  auto radial = [&](double theta) {
    const Point dir{std::cos(theta), std::sin(theta)};
    double tin, tout;
    if (!region.ray(focus, dir, tin, tout)) return 0.0;
    std::vector<double> rs{tin, tout};
    for (double r : radialBreaks)
      if (r > tin && r < tout) rs.push_back(r);
    std::sort(rs.begin(), rs.end());
    double s = 0.0;
    for (std::size_t i = 0; i + 1 < rs.size(); ++i)
      s += integrate([&](double r) { return w(focus + r * dir) * r; }, rs[i], rs[i + 1], 1e-2 * tol, false);
    return s;
  };
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) total += integrate(radial, cuts[i], cuts[i + 1], tol);
  return total;
}

double faceMeasure(const Weight& w, const Region2D& region, double faceY, double tol) {
  auto [ylo, yhi] = region.yRange();
  std::vector<double> cuts{ylo, yhi};
  if (faceY > ylo && faceY < yhi) cuts.push_back(faceY);
  if (!region.isBall)
    for (auto v : region.poly)
      if (v.y > ylo && v.y < yhi) cuts.push_back(v.y);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  const bool separable = asPurePower(w).has_value();
  auto row = [&](double y) {
    double xl, xr;
    if (!region.chord(y, xl, xr)) return 0.0;
    if (separable) return (xr - xl) * w(Point{0.5 * (xl + xr), y});
    return integrate([&](double x) { return w(Point{x, y}); }, xl, xr, 1e-2 * tol, false);
  };
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) total += integrate(row, cuts[i], cuts[i + 1], tol);
  return total;
}

double measure2D(const Weight& w, const Region2D& region, Point fallbackFocus, double tol) {
  const auto sing = w.singularities();
  checkIntegrable(w, sing, 0, 0, &region);
  if (w.isConstant()) return w(fallbackFocus) * region.area();
  const Singularity* point = nullptr;
  const Singularity* face = nullptr;
  for (const auto& s : sing) {
    if (s.type == Singularity::Type::Face) {
      face = &s;
    } else if (!point || distance(s.location, fallbackFocus) < distance(point->location, fallbackFocus)) {
      point = &s;
    }
  }
  if (face && point) throw Error(ErrorCode::UnsupportedWeight, "point and face singularities together");
  if (face) return faceMeasure(w, region, face->location.y, tol);
  Point focus = point ? point->location : fallbackFocus;
  // A far-away singularity as polar centre gives sqrt-type tangent behaviour
  // in the angle; the ball's own centre is smooth there.
  if (point && region.isBall && distance(point->location, region.ball.center) > 1.0 * region.ball.radius * (1.0 + 1e-9))
    return polarMeasure(w, region, region.ball.center, tol);
  // Prefer the centre of a kink circle so the radial break is aligned.
  if (!point && !w.kinks().empty()) focus = w.kinks().front().first;
  return polarMeasure(w, region, focus, tol);
}

}  // namespace

double weightedMeasure(const Weight& w, const Ball& b, double tol) {
  require(b.radius > 0.0, ErrorCode::InvalidArgument, "ball radius must be positive");
  require(tol > 0.0, ErrorCode::InvalidArgument, "tolerance must be positive");
  if (w.dim() == 1) return measure1D(w, b.center.x - b.radius, b.center.x + b.radius, tol);
  Region2D r;
  r.isBall = true;
  r.ball = b;
  return measure2D(w, r, b.center, tol);
}

double weightedMeasure(const Weight& w, const Cell& c, double tol) {
  require(tol > 0.0, ErrorCode::InvalidArgument, "tolerance must be positive");
  if (w.dim() == 1) {
    return measure1D(w, std::min(c.vertices[0].x, c.vertices[1].x), std::max(c.vertices[0].x, c.vertices[1].x),
                     tol);
  }
  Region2D r;
  r.poly = c.vertices;
  return measure2D(w, r, c.centroid(), tol);
}

double muckenhouptRatio(const Weight& w, double p, const Ball& b, double tol) {
  require(p > 1.0, ErrorCode::InvalidArgument, "A_p ratio needs p > 1");
  const double vol = ballVolume(w.dim(), b.radius);
  const double avg = weightedMeasure(w, b, tol) / vol;
  const double dualAvg = weightedMeasure(w.raised(1.0 / (1.0 - p)), b, tol) / vol;
  return avg * std::pow(dualAvg, p - 1.0);
}

std::vector<Ball> BallSampler::balls(const Weight& w) const {
  std::vector<Point> cs = centers;
  if (cs.empty()) {
    for (const auto& s : w.singularities()) cs.push_back(s.location);
    if (cs.empty()) cs.push_back({});
  }
  std::vector<Ball> out;
  for (int j = 0; j <= levels; ++j) {
    const double r = radius * std::ldexp(1.0, -j);
    for (auto c : cs) {
      out.push_back({c, r});
      for (double o : offsets) out.push_back({{c.x + o * r, c.y}, r});
    }
  }
  if (maxBalls > 0 && static_cast<int>(out.size()) > maxBalls) out.resize(maxBalls);
  return out;
}

ApEstimate estimateApConstant(const Weight& w, double p, const BallSampler& sampler, double tol) {
  ApEstimate est;
  est.p = p;
  est.sampledMax = 0.0;
  for (const auto& b : sampler.balls(w)) {
    double ratio;
    try {
      ratio = muckenhouptRatio(w, p, b, tol);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::NonIntegrable) throw;
      ratio = std::numeric_limits<double>::infinity();
    }
    est.perBallRatios.push_back({b, ratio});
    est.sampledMax = std::max(est.sampledMax, ratio);
    if (!(ratio <= sampler.divergenceCap)) est.divergent = true;
  }
  est.ballsSampled = static_cast<int>(est.perBallRatios.size());
  return est;
}

std::pair<double, double> checkStrongDoubling(const Weight& w, double p, const Ball& E, const Ball& B, double C,
                                              double tol) {
  require(distance(E.center, B.center) + E.radius <= B.radius * (1.0 + 1e-12), ErrorCode::InvalidArgument,
          "E must lie inside B");
  const int n = w.dim();
  const double lhs = weightedMeasure(w, B, tol);
  const double rhs = C * std::pow(ballVolume(n, B.radius) / ballVolume(n, E.radius), p) * weightedMeasure(w, E, tol);
  return {lhs, rhs};
}

std::pair<double, double> dualWeightIdentity(const Weight& w, double p, const Ball& b, double tol) {
  const double pp = p / (p - 1.0);
  const double r1 = muckenhouptRatio(w.raised(-1.0 / (p - 1.0)), pp, b, tol);
  const double r2 = std::pow(muckenhouptRatio(w, p, b, tol), 1.0 / (p - 1.0));
  return {r1, r2};
}

double dualityFactor(const Weight& w, Point x0, double h, double tol) {
  const Ball b{x0, h};
  return h * std::sqrt(weightedMeasure(w, b, tol) / ballVolume(w.dim(), h));
}

}  // namespace muckfem
