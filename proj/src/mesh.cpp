#include "muckfem/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <ostream>

#include "muckfem/error.hpp"

namespace muckfem {

Domain Domain::interval(double a, double b) {
  require(b > a, ErrorCode::UnsupportedDomain, "empty interval");
  Domain d;
  d.dim = 1;
  d.x0 = a;
  d.x1 = b;
  d.y0 = d.y1 = 0.0;
  return d;
}

Domain Domain::rectangle(double ax, double bx, double ay, double by) {
  require(bx > ax && by > ay, ErrorCode::UnsupportedDomain, "empty rectangle");
  Domain d;
  d.dim = 2;
  d.x0 = ax;
  d.x1 = bx;
  d.y0 = ay;
  d.y1 = by;
  return d;
}

Domain Domain::polygon(const std::vector<Point>& v) {
  if (v.size() == 4) {
    double ax = v[0].x, bx = v[0].x, ay = v[0].y, by = v[0].y;
    for (auto p : v) ax = std::min(ax, p.x), bx = std::max(bx, p.x), ay = std::min(ay, p.y), by = std::max(by, p.y);
    bool axisAligned = true;
    for (auto p : v) {
      const bool cornerX = p.x == ax || p.x == bx;
      const bool cornerY = p.y == ay || p.y == by;
      axisAligned = axisAligned && cornerX && cornerY;
    }
    Cell c{2, v};
    if (axisAligned && std::abs(c.measure() - (bx - ax) * (by - ay)) < 1e-14 * (bx - ax) * (by - ay))
      return rectangle(ax, bx, ay, by);
  }
  throw Error(ErrorCode::UnsupportedDomain, "only intervals and axis-aligned rectangles are meshed");
}

double Domain::measure() const { return dim == 1 ? x1 - x0 : (x1 - x0) * (y1 - y0); }

double Domain::diameter() const { return dim == 1 ? x1 - x0 : std::hypot(x1 - x0, y1 - y0); }

unsigned Domain::faces(Point p) const {
  const double tol = 1e-12 * diameter();
  unsigned m = 0;
  if (std::abs(p.x - x0) <= tol) m |= Left;
  if (std::abs(p.x - x1) <= tol) m |= Right;
  if (dim == 2) {
    if (std::abs(p.y - y0) <= tol) m |= Bottom;
    if (std::abs(p.y - y1) <= tol) m |= Top;
  }
  return m;
}

bool Domain::contains(Point p, double tol) const {
  const double t = tol * diameter();
  if (p.x < x0 - t || p.x > x1 + t) return false;
  return dim == 1 || (p.y >= y0 - t && p.y <= y1 + t);
}

GradedPartition GradedPartition::refined() const { return gradedPartition(Y, 2 * M, gamma); }

GradedPartition gradedPartition(double Y, int M, double gamma) {
  require(M >= 1, ErrorCode::InvalidArgument, "graded partition needs M >= 1");
  require(gamma >= 1.0, ErrorCode::InvalidArgument, "grading exponent must be >= 1");
  require(Y > 0.0, ErrorCode::InvalidArgument, "graded partition needs Y > 0");
  GradedPartition g;
  g.Y = Y;
  g.M = M;
  g.gamma = gamma;
  for (int k = 0; k <= M; ++k) g.points.push_back(k == M ? Y : std::pow(static_cast<double>(k) / M, gamma) * Y);
  return g;
}

std::vector<double> uniformPartition(double a, double b, int n) {
  require(n >= 1, ErrorCode::InvalidArgument, "partition needs at least one interval");
  std::vector<double> x(n + 1);
  for (int i = 0; i <= n; ++i) x[i] = (i == n) ? b : a + (b - a) * i / n;
  return x;
}

Mesh Mesh::buildSimplicial(const Domain& domain, double targetH) {
  require(targetH > 0.0, ErrorCode::InvalidArgument, "target mesh size must be positive");
  Mesh m;
  m.dim_ = domain.dim;
  m.kind_ = MeshKind::Simplicial;
  m.domain_ = domain;
  if (domain.dim == 1) {
    const int n = std::max(1, static_cast<int>(std::ceil((domain.x1 - domain.x0) / targetH - 1e-9)));
    for (double x : uniformPartition(domain.x0, domain.x1, n)) m.nodes_.push_back({x, 0.0});
    for (int i = 0; i < n; ++i) m.elements_.push_back({i, i + 1});
  } else {
    // Union-jack pattern: diagonals alternate so the mesh is symmetric under
    // the reflections of the rectangle when n is even.
    const double lx = domain.x1 - domain.x0, ly = domain.y1 - domain.y0;
    const int n = std::max(1, static_cast<int>(std::ceil(std::hypot(lx, ly) / targetH - 1e-9)));
    auto xs = uniformPartition(domain.x0, domain.x1, n);
    auto ys = uniformPartition(domain.y0, domain.y1, n);
    for (int j = 0; j <= n; ++j)
      for (int i = 0; i <= n; ++i) m.nodes_.push_back({xs[i], ys[j]});
    auto id = [n](int i, int j) { return j * (n + 1) + i; };
    for (int j = 0; j < n; ++j) {
      for (int i = 0; i < n; ++i) {
        const int a = id(i, j), b = id(i + 1, j), c = id(i + 1, j + 1), d = id(i, j + 1);
        if ((i + j) % 2 == 0) {
          m.elements_.push_back({a, b, c});
          m.elements_.push_back({a, c, d});
        } else {
          m.elements_.push_back({a, b, d});
          m.elements_.push_back({b, c, d});
        }
      }
    }
  }
  m.finalize();
  return m;
}

Mesh Mesh::buildTensor(const std::vector<std::vector<double>>& partitions) {
  require(partitions.size() == 1 || partitions.size() == 2, ErrorCode::InvalidArgument,
          "tensor meshes take one partition per axis");
  for (const auto& p : partitions) {
    require(p.size() >= 2, ErrorCode::InvalidArgument, "partition needs two points");
    for (std::size_t i = 0; i + 1 < p.size(); ++i)
      require(p[i + 1] > p[i], ErrorCode::InvalidArgument, "partition must be strictly increasing");
  }
  Mesh m;
  m.kind_ = MeshKind::Tensor;
  m.axes_ = partitions;
  const auto& xs = partitions[0];
  if (partitions.size() == 1) {
    m.dim_ = 1;
    m.domain_ = Domain::interval(xs.front(), xs.back());
    for (double x : xs) m.nodes_.push_back({x, 0.0});
    for (std::size_t i = 0; i + 1 < xs.size(); ++i)
      m.elements_.push_back({static_cast<int>(i), static_cast<int>(i + 1)});
  } else {
    const auto& ys = partitions[1];
    m.dim_ = 2;
    m.domain_ = Domain::rectangle(xs.front(), xs.back(), ys.front(), ys.back());
    const int nx = static_cast<int>(xs.size());
    for (double y : ys)
      for (double x : xs) m.nodes_.push_back({x, y});
    for (int j = 0; j + 1 < static_cast<int>(ys.size()); ++j)
      for (int i = 0; i + 1 < nx; ++i)
        m.elements_.push_back({j * nx + i, j * nx + i + 1, (j + 1) * nx + i + 1, (j + 1) * nx + i});
  }
  m.finalize();
  return m;
}

Mesh Mesh::refineUniform() const {
  if (kind_ == MeshKind::Tensor || dim_ == 1) {
    if (kind_ == MeshKind::Tensor) {
      std::vector<std::vector<double>> fine;
      for (const auto& a : axes_) {
        std::vector<double> f;
        for (std::size_t i = 0; i + 1 < a.size(); ++i) {
          f.push_back(a[i]);
          f.push_back(0.5 * (a[i] + a[i + 1]));
        }
        f.push_back(a.back());
        fine.push_back(f);
      }
      return buildTensor(fine);
    }
    Mesh m;
    m.dim_ = 1;
    m.kind_ = kind_;
    m.domain_ = domain_;
    for (std::size_t i = 0; i + 1 < nodes_.size(); ++i) {
      m.nodes_.push_back(nodes_[i]);
      m.nodes_.push_back(0.5 * (nodes_[i] + nodes_[i + 1]));
    }
    m.nodes_.push_back(nodes_.back());
    for (int i = 0; i + 1 < static_cast<int>(m.nodes_.size()); ++i) m.elements_.push_back({i, i + 1});
    m.finalize();
    return m;
  }
  // red refinement: four similar triangles per parent
  Mesh m;
  m.dim_ = 2;
  m.kind_ = kind_;
  m.domain_ = domain_;
  m.nodes_ = nodes_;
  std::map<std::pair<int, int>, int> mid;
  auto midpoint = [&](int a, int b) {
    auto key = std::minmax(a, b);
    auto it = mid.find(key);
    if (it != mid.end()) return it->second;
    const int id = static_cast<int>(m.nodes_.size());
    m.nodes_.push_back(0.5 * (nodes_[a] + nodes_[b]));
    mid.emplace(key, id);
    return id;
  };
  for (const auto& t : elements_) {
    const int a = t[0], b = t[1], c = t[2];
    const int ab = midpoint(a, b), bc = midpoint(b, c), ca = midpoint(c, a);
    m.elements_.push_back({a, ab, ca});
    m.elements_.push_back({ab, b, bc});
    m.elements_.push_back({ca, bc, c});
    m.elements_.push_back({ab, bc, ca});
  }
  m.finalize();
  return m;
}

void Mesh::finalize() {
  faces_.resize(nodes_.size());
  for (std::size_t i = 0; i < nodes_.size(); ++i) faces_[i] = domain_.faces(nodes_[i]);
  nodeElements_.assign(nodes_.size(), {});
  for (int e = 0; e < numElements(); ++e)
    for (int v : elements_[e]) nodeElements_[v].push_back(e);
  diam_.resize(elements_.size());
  rho_.resize(elements_.size());
  for (int e = 0; e < numElements(); ++e) {
    Cell c = cell(e);
    diam_[e] = c.diameter();
    if (dim_ == 1) {
      rho_[e] = diam_[e];
    } else {
      double perimeter = 0.0;
      for (std::size_t i = 0; i < c.vertices.size(); ++i)
        perimeter += distance(c.vertices[i], c.vertices[(i + 1) % c.vertices.size()]);
      if (kind_ == MeshKind::Tensor) {
        Point s = sizes(e);
        rho_[e] = std::min(s.x, s.y);
      } else {
        rho_[e] = 4.0 * c.measure() / perimeter;
      }
    }
  }
  if (dim_ == 2 && kind_ == MeshKind::Simplicial) {
    const int n = std::max(1, static_cast<int>(std::sqrt(static_cast<double>(elements_.size()) / 2.0)));
    bx_ = by_ = n;
    buckets_.assign(static_cast<std::size_t>(bx_) * by_, {});
    const double w = domain_.x1 - domain_.x0, hgt = domain_.y1 - domain_.y0;
    auto bucketX = [&](double x) { return std::clamp(static_cast<int>((x - domain_.x0) / w * bx_), 0, bx_ - 1); };
    auto bucketY = [&](double y) { return std::clamp(static_cast<int>((y - domain_.y0) / hgt * by_), 0, by_ - 1); };
    for (int e = 0; e < numElements(); ++e) {
      double lx = 1e300, hx = -1e300, ly = 1e300, hy = -1e300;
      for (int v : elements_[e]) {
        lx = std::min(lx, nodes_[v].x), hx = std::max(hx, nodes_[v].x);
        ly = std::min(ly, nodes_[v].y), hy = std::max(hy, nodes_[v].y);
      }
      const double pad = 1e-12 * domain_.diameter();
      for (int j = bucketY(ly - pad); j <= bucketY(hy + pad); ++j)
        for (int i = bucketX(lx - pad); i <= bucketX(hx + pad); ++i) buckets_[j * bx_ + i].push_back(e);
    }
  }
}

Cell Mesh::cell(int e) const {
  Cell c;
  c.dim = dim_;
  for (int v : elements_[e]) c.vertices.push_back(nodes_[v]);
  return c;
}

Point Mesh::sizes(int e) const {
  if (kind_ == MeshKind::Tensor && dim_ == 2) {
    const auto& el = elements_[e];
    return {nodes_[el[1]].x - nodes_[el[0]].x, nodes_[el[3]].y - nodes_[el[0]].y};
  }
  return {diam_[e], diam_[e]};
}

double Mesh::maxDiameter() const { return *std::max_element(diam_.begin(), diam_.end()); }

Star Mesh::star(int z) const { return starOfElements(z, nodeElements_[z]); }

Star Mesh::starOfElements(int z, std::vector<int> elements) const {
  Star s;
  s.node = z;
  std::sort(elements.begin(), elements.end());
  s.elements = std::move(elements);
  s.h = 1e300;
  s.hAxis = {1e300, 1e300};
  for (int e : s.elements) {
    s.h = std::min(s.h, diam_[e]);
    Point sz = sizes(e);
    s.hAxis = {std::min(s.hAxis.x, sz.x), std::min(s.hAxis.y, sz.y)};
  }
  return s;
}

std::vector<int> Mesh::patch(int e) const {
  std::vector<int> out;
  for (int v : elements_[e]) out.insert(out.end(), nodeElements_[v].begin(), nodeElements_[v].end());
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

double Mesh::distanceToUnionBoundary(Point p, const std::vector<int>& elements) const {
  if (dim_ == 1) {
    double lo = 1e300, hi = -1e300;
    for (int e : elements)
      for (int v : elements_[e]) lo = std::min(lo, nodes_[v].x), hi = std::max(hi, nodes_[v].x);
    return std::max(0.0, std::min(p.x - lo, hi - p.x));
  }
  std::map<std::pair<int, int>, int> count;
  for (int e : elements) {
    const auto& el = elements_[e];
    for (std::size_t i = 0; i < el.size(); ++i) count[std::minmax(el[i], el[(i + 1) % el.size()])]++;
  }
  double d = 1e300;
  for (auto& [edge, c] : count) {
    if (c != 1) continue;
    const Point a = nodes_[edge.first], b = nodes_[edge.second];
    const Point ab = b - a;
    const double t = std::clamp(dot(p - a, ab) / dot(ab, ab), 0.0, 1.0);
    d = std::min(d, distance(p, a + t * ab));
  }
  return d;
}

int Mesh::locate(Point x, double tol) const {
  if (!domain_.contains(x, tol)) return -1;
  auto bracket = [](const std::vector<double>& a, double t) {
    auto it = std::upper_bound(a.begin(), a.end(), t);
    int i = static_cast<int>(it - a.begin()) - 1;
    return std::clamp(i, 0, static_cast<int>(a.size()) - 2);
  };
  if (dim_ == 1) {
    std::vector<double> xs;
    if (kind_ == MeshKind::Tensor) return bracket(axes_[0], x.x);
    // 1D simplicial meshes keep nodes sorted with element i = [i, i+1]
    int lo = 0, hi = numElements() - 1;
    while (lo < hi) {
      const int mid = (lo + hi) / 2;
      if (x.x > nodes_[elements_[mid][1]].x) lo = mid + 1;
      else hi = mid;
    }
    return lo;
  }
  if (kind_ == MeshKind::Tensor) {
    const int i = bracket(axes_[0], x.x), j = bracket(axes_[1], x.y);
    return j * (static_cast<int>(axes_[0].size()) - 1) + i;
  }
  const double w = domain_.x1 - domain_.x0, hgt = domain_.y1 - domain_.y0;
  const int i = std::clamp(static_cast<int>((x.x - domain_.x0) / w * bx_), 0, bx_ - 1);
  const int j = std::clamp(static_cast<int>((x.y - domain_.y0) / hgt * by_), 0, by_ - 1);
  for (int e : buckets_[j * bx_ + i])
    if (cell(e).contains(x, tol)) return e;
  return -1;
}

ShapeDiagnostics Mesh::shapeDiagnostics() const {
  ShapeDiagnostics d;
  d.maxShapeCoefficient = 0.0;
  d.weakRegularityRatio = 1.0;
  for (int e = 0; e < numElements(); ++e) {
    d.maxShapeCoefficient = std::max(d.maxShapeCoefficient, diam_[e] / rho_[e]);
    for (int v : elements_[e]) {
      for (int f : nodeElements_[v]) {
        const Point a = sizes(e), b = sizes(f);
        d.weakRegularityRatio = std::max({d.weakRegularityRatio, a.x / b.x, a.y / b.y});
      }
    }
  }
  return d;
}

bool Mesh::isConforming() const {
  if (std::abs(totalMeasure() - domain_.measure()) > 1e-12 * domain_.measure()) return false;
  if (dim_ == 1) {
    std::vector<int> deg(nodes_.size(), 0);
    for (const auto& e : elements_) deg[e[0]]++, deg[e[1]]++;
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
      if (deg[i] == 0 || deg[i] > 2) return false;
      if (deg[i] == 1 && !isBoundary(static_cast<int>(i))) return false;
    }
    return true;
  }
  std::map<std::pair<int, int>, int> count;
  for (const auto& el : elements_)
    for (std::size_t i = 0; i < el.size(); ++i) count[std::minmax(el[i], el[(i + 1) % el.size()])]++;
  for (auto& [edge, c] : count) {
    if (c > 2) return false;
    if (c == 1 && (faces_[edge.first] & faces_[edge.second]) == 0) return false;
  }
  for (std::size_t i = 0; i < nodes_.size(); ++i)
    if (nodeElements_[i].empty()) return false;
  return true;
}

double Mesh::totalMeasure() const {
  double s = 0.0;
  for (int e = 0; e < numElements(); ++e) s += cell(e).measure();
  return s;
}

void Mesh::dump(std::ostream& os) const {
  os.precision(17);
  os << "nodes " << nodes_.size() << "\n";
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    os << i << " " << nodes_[i].x;
    if (dim_ == 2) os << " " << nodes_[i].y;
    os << "\n";
  }
  os << "elements " << elements_.size() << "\n";
  for (std::size_t e = 0; e < elements_.size(); ++e) {
    os << e;
    for (int v : elements_[e]) os << " " << v;
    os << "\n";
  }
}

}  // namespace muckfem
