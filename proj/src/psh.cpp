#include "lcktk/psh.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <numeric>
#include <sstream>

#include "lcktk/errors.hpp"

namespace lcktk::psh {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

Eigen::MatrixXcd to_eigen(const Hermitian& h) {
  Eigen::MatrixXcd m(h.n, h.n);
  for (int i = 0; i < h.n; ++i)
    for (int j = 0; j < h.n; ++j) m(i, j) = h(i, j);
  return m;
}

Eigen::VectorXd eigenvalues(const Eigen::MatrixXcd& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(m, Eigen::EigenvaluesOnly);
  return es.eigenvalues();
}

std::string fmt_point(const Point& p) {
  std::ostringstream os;
  os << "(";
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (i) os << ", ";
    os << p[i].real() << (p[i].imag() < 0 ? "-" : "+") << std::abs(p[i].imag()) << "i";
  }
  os << ")";
  return os.str();
}

cd ipow(cd z, int k) {
  cd r = 1.0;
  for (int i = 0; i < k; ++i) r *= z;
  return r;
}

// Real coordinate `axis` of p (x1, y1, x2, y2).
double real_coord(const Point& p, int axis) { return axis % 2 == 0 ? p[axis / 2].real() : p[axis / 2].imag(); }

Point shifted(Point p, int axis, double d) {
  if (axis % 2 == 0)
    p[axis / 2] += cd(d, 0);
  else
    p[axis / 2] += cd(0, d);
  return p;
}

// Complex Hessian from a sampler returning f at the base point shifted by
// sa steps along axis a and sb steps along axis b.
template <class Sampler>
Hermitian stencil_hessian(int n, double h, Sampler&& f) {
  const double f0 = f(0, 0, 0, 0);
  auto second = [&](int a, int b) {
    if (a == b) return (f(a, 1, a, 0) - 2 * f0 + f(a, -1, a, 0)) / (h * h);
    return (f(a, 1, b, 1) - f(a, 1, b, -1) - f(a, -1, b, 1) + f(a, -1, b, -1)) / (4 * h * h);
  };
  Hermitian H;
  H.n = n;
  for (int j = 0; j < n; ++j)
    for (int k = 0; k < n; ++k) {
      const int xj = 2 * j, yj = 2 * j + 1, xk = 2 * k, yk = 2 * k + 1;
      H(j, k) = 0.25 * cd(second(xj, xk) + second(yj, yk), second(xj, yk) - second(yj, xk));
    }
  for (int j = 0; j < n; ++j) {
    H(j, j) = cd(H(j, j).real(), 0.0);
    for (int k = j + 1; k < n; ++k) {
      const cd avg = 0.5 * (H(j, k) + std::conj(H(k, j)));
      H(j, k) = avg;
      H(k, j) = std::conj(avg);
    }
  }
  return H;
}

class PolynomialField final : public Field {
 public:
  PolynomialField(int dim, std::vector<PolyTerm> terms) : dim_(dim), terms_(std::move(terms)) {}
  int dim() const override { return dim_; }
  double operator()(const Point& p) const override {
    cd s = 0;
    for (const auto& t : terms_) {
      cd v = t.c;
      for (int j = 0; j < dim_; ++j) v *= ipow(p[j], t.z[j]) * ipow(std::conj(p[j]), t.zbar[j]);
      s += v;
    }
    return s.real();
  }
  std::string describe() const override { return "polynomial(" + std::to_string(terms_.size()) + " terms)"; }

 private:
  int dim_;
  std::vector<PolyTerm> terms_;
};

class BumpField final : public Field {
 public:
  BumpField(Point c, double r_in, double r_out) : c_(std::move(c)), r_in_(r_in), r_out_(r_out) {}
  int dim() const override { return static_cast<int>(c_.size()); }
  double operator()(const Point& p) const override {
    double r2 = 0;
    for (std::size_t j = 0; j < c_.size(); ++j) r2 += std::norm(p[j] - c_[j]);
    const double r = std::sqrt(r2);
    if (r <= r_in_) return 1.0;
    if (r >= r_out_) return 0.0;
    const double t = (r - r_in_) / (r_out_ - r_in_);
    return 1.0 - t * t * t * (10 + t * (-15 + 6 * t));
  }
  std::string describe() const override {
    return "bump(center " + fmt_point(c_) + ", " + std::to_string(r_in_) + ", " + std::to_string(r_out_) + ")";
  }

 private:
  Point c_;
  double r_in_, r_out_;
};

class SampledField final : public Field {
 public:
  explicit SampledField(GridFunction g) : g_(std::move(g)) {}
  int dim() const override { return g_.domain.dim(); }
  const GridDomain* grid() const override { return &g_.domain; }
  std::string describe() const override { return "grid(" + std::to_string(g_.values.size()) + " nodes)"; }

  // Outside the box the interpolant is continued by clamping to the edge cells.
  double operator()(const Point& p) const override {
    const auto& d = g_.domain;
    const int axes = d.axes();
    std::array<int, 4> base{};
    std::array<double, 4> frac{};
    for (int a = 0; a < axes; ++a) {
      const double s = (real_coord(p, a) - d.origin(a)) / d.h();
      int i = static_cast<int>(std::floor(s));
      i = std::clamp(i, 0, d.count(a) - 2);
      base[a] = i;
      frac[a] = std::clamp(s - i, 0.0, 1.0);
    }
    double total = 0;
    const int corners = 1 << (2 * axes);
    for (int code = 0; code < corners; ++code) {
      double w = 1;
      std::array<int, 4> idx{};
      for (int a = 0; a < axes; ++a) {
        const int o = ((code >> (2 * a)) & 3) - 1;
        const double t = frac[a];
        const double wts[4] = {0.5 * (-t + 2 * t * t - t * t * t), 0.5 * (2 - 5 * t * t + 3 * t * t * t),
                               0.5 * (t + 4 * t * t - 3 * t * t * t), 0.5 * (-t * t + t * t * t)};
        w *= wts[o + 1];
        idx[a] = std::clamp(base[a] + o, 0, d.count(a) - 1);
      }
      if (w != 0) total += w * g_.values[d.ravel(idx)];
    }
    return total;
  }

 private:
  GridFunction g_;
};

class CombinationField final : public Field {
 public:
  explicit CombinationField(std::vector<std::pair<double, FieldPtr>> t) : t_(std::move(t)) {}
  int dim() const override { return t_.front().second->dim(); }
  double operator()(const Point& p) const override {
    double s = 0;
    for (const auto& [w, f] : t_) s += w * (*f)(p);
    return s;
  }
  std::string describe() const override { return "combination(" + std::to_string(t_.size()) + " terms)"; }

 private:
  std::vector<std::pair<double, FieldPtr>> t_;
};

class ComposedField final : public Field {
 public:
  ComposedField(FieldPtr f, MapPtr g) : f_(std::move(f)), g_(std::move(g)) {}
  int dim() const override { return g_->dim_in(); }
  double operator()(const Point& p) const override { return (*f_)((*g_)(p)); }
  std::string describe() const override { return f_->describe() + " after map"; }

 private:
  FieldPtr f_;
  MapPtr g_;
};

}  // namespace

// ---------------------------------------------------------------------------
// Linear algebra

double Hermitian::max_abs() const {
  double m = 0;
  for (int i = 0; i < n * n; ++i) m = std::max(m, std::abs(a[i]));
  return m;
}

double min_eigenvalue(const Hermitian& h) { return eigenvalues(to_eigen(h)).minCoeff(); }
double max_eigenvalue(const Hermitian& h) { return eigenvalues(to_eigen(h)).maxCoeff(); }
double operator_norm(const Hermitian& h) { return eigenvalues(to_eigen(h)).cwiseAbs().maxCoeff(); }

double restricted_min_eigenvalue(const Hermitian& h, const std::vector<std::vector<cd>>& jacobian) {
  const int m = static_cast<int>(jacobian.size());
  const int n = m ? static_cast<int>(jacobian[0].size()) : 0;
  if (m != h.n) throw InvalidInput("jacobian rows do not match the Hessian size");
  Eigen::MatrixXcd J(m, n);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < n; ++j) J(i, j) = jacobian[i][j];
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(J, Eigen::ComputeFullU);
  const auto& sv = svd.singularValues();
  const double smax = sv.size() ? sv(0) : 0.0;
  int rank = 0;
  for (int i = 0; i < sv.size(); ++i)
    if (sv(i) > 1e-12 * std::max(1.0, smax)) ++rank;
  if (rank == 0) return kInf;
  const Eigen::MatrixXcd Q = svd.matrixU().leftCols(rank);
  const Eigen::MatrixXcd R = Q.adjoint() * to_eigen(h) * Q;
  return eigenvalues(0.5 * (R + R.adjoint())).minCoeff();
}

// ---------------------------------------------------------------------------
// Grids

GridDomain::GridDomain(int dim, std::vector<Box> box, double h) : dim_(dim), box_(std::move(box)), h_(h) {
  if (dim < 1 || dim > 2) throw InvalidInput("grid dimension must be 1 or 2, got " + std::to_string(dim));
  if (static_cast<int>(box_.size()) != dim)
    throw InvalidInput("grid box has " + std::to_string(box_.size()) + " coordinates, expected " + std::to_string(dim));
  if (!(h > 0) || !std::isfinite(h)) throw InvalidInput("grid spacing must be positive");
  for (int a = 0; a < axes(); ++a) {
    const auto& b = box_[a / 2];
    const double lo = a % 2 ? b.im_min : b.re_min, hi = a % 2 ? b.im_max : b.re_max;
    if (!(hi > lo)) throw InvalidInput("empty grid interval on axis " + std::to_string(a));
    const double steps = (hi - lo) / h;
    const double r = std::round(steps);
    if (std::abs(steps - r) > 1e-9 * std::max(1.0, steps))
      throw InvalidInput("grid interval on axis " + std::to_string(a) + " is not a multiple of h");
    counts_[a] = static_cast<int>(r) + 1;
    if (counts_[a] < 5) throw InvalidInput("grid axis " + std::to_string(a) + " has fewer than 5 samples");
  }
  std::size_t s = 1;
  for (int a = axes() - 1; a >= 0; --a) {
    strides_[a] = s;
    s *= static_cast<std::size_t>(counts_[a]);
  }
  size_ = s;
}

double GridDomain::origin(int axis) const {
  const auto& b = box_[axis / 2];
  return axis % 2 ? b.im_min : b.re_min;
}

std::array<int, 4> GridDomain::unravel(std::size_t node) const {
  std::array<int, 4> idx{};
  for (int a = 0; a < axes(); ++a) {
    idx[a] = static_cast<int>(node / strides_[a]);
    node %= strides_[a];
  }
  return idx;
}

std::size_t GridDomain::ravel(const std::array<int, 4>& idx) const {
  std::size_t n = 0;
  for (int a = 0; a < axes(); ++a) n += static_cast<std::size_t>(idx[a]) * strides_[a];
  return n;
}

Point GridDomain::point(std::size_t node) const {
  const auto idx = unravel(node);
  Point p(dim_);
  for (int j = 0; j < dim_; ++j)
    p[j] = cd(origin(2 * j) + idx[2 * j] * h_, origin(2 * j + 1) + idx[2 * j + 1] * h_);
  return p;
}

int GridDomain::boundary_distance(std::size_t node) const {
  const auto idx = unravel(node);
  int d = std::numeric_limits<int>::max();
  for (int a = 0; a < axes(); ++a) d = std::min({d, idx[a], counts_[a] - 1 - idx[a]});
  return d;
}

bool GridDomain::contains(const Point& p) const {
  if (static_cast<int>(p.size()) != dim_) return false;
  const double slack = 1e-9 * h_;
  for (int a = 0; a < axes(); ++a) {
    const double x = real_coord(p, a);
    const double lo = origin(a), hi = lo + (counts_[a] - 1) * h_;
    if (x < lo - slack || x > hi + slack) return false;
  }
  return true;
}

std::optional<std::size_t> GridDomain::nearest_node(const Point& p) const {
  if (!contains(p)) return std::nullopt;
  std::array<int, 4> idx{};
  for (int a = 0; a < axes(); ++a)
    idx[a] = std::clamp(static_cast<int>(std::lround((real_coord(p, a) - origin(a)) / h_)), 0, counts_[a] - 1);
  return ravel(idx);
}

bool GridDomain::aligned_with(const GridDomain& o) const {
  if (dim_ != o.dim_ || std::abs(h_ - o.h_) > 1e-12 * h_) return false;
  for (int a = 0; a < axes(); ++a) {
    const double s = (o.origin(a) - origin(a)) / h_;
    if (std::abs(s - std::round(s)) > 1e-9) return false;
  }
  return true;
}

bool operator==(const GridDomain& a, const GridDomain& b) {
  if (a.dim_ != b.dim_ || a.h_ != b.h_) return false;
  for (int i = 0; i < a.dim_; ++i) {
    const auto &x = a.box_[i], &y = b.box_[i];
    if (x.re_min != y.re_min || x.re_max != y.re_max || x.im_min != y.im_min || x.im_max != y.im_max) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// Fields and maps

FieldPtr polynomial_field(int dim, std::vector<PolyTerm> terms) {
  if (dim < 1 || dim > 2) throw InvalidInput("polynomial field dimension must be 1 or 2");
  for (auto& t : terms) {
    if (t.z.empty()) t.z.assign(dim, 0);
    if (t.zbar.empty()) t.zbar.assign(dim, 0);
    if (static_cast<int>(t.z.size()) != dim || static_cast<int>(t.zbar.size()) != dim)
      throw InvalidInput("polynomial term exponent length does not match the dimension");
    for (int j = 0; j < dim; ++j)
      if (t.z[j] < 0 || t.zbar[j] < 0) throw InvalidInput("negative exponent in polynomial term");
  }
  return std::make_shared<PolynomialField>(dim, std::move(terms));
}

FieldPtr radial_bump(Point center, double r_in, double r_out) {
  if (center.empty() || center.size() > 2) throw InvalidInput("bump center must have 1 or 2 coordinates");
  if (!(r_in >= 0) || !(r_out > r_in)) throw InvalidInput("bump radii must satisfy 0 <= r_in < r_out");
  return std::make_shared<BumpField>(std::move(center), r_in, r_out);
}

FieldPtr sampled_field(GridFunction g) {
  if (g.values.size() != g.domain.size())
    throw InvalidInput("grid has " + std::to_string(g.values.size()) + " values, expected " +
                       std::to_string(g.domain.size()));
  for (std::size_t i = 0; i < g.values.size(); ++i)
    if (!std::isfinite(g.values[i])) throw InvalidInput("grid value " + std::to_string(i) + " is not finite");
  return std::make_shared<SampledField>(std::move(g));
}

FieldPtr linear_combination(std::vector<std::pair<double, FieldPtr>> terms) {
  if (terms.empty()) throw InvalidInput("empty field combination");
  for (const auto& t : terms)
    if (!t.second || t.second->dim() != terms.front().second->dim())
      throw InvalidInput("field combination mixes dimensions");
  return std::make_shared<CombinationField>(std::move(terms));
}

HolomorphicMap::HolomorphicMap(int dim_in, int dim_out, std::vector<std::vector<Monomial>> components,
                               bool discrete_fibers)
    : dim_in_(dim_in), dim_out_(dim_out), discrete_fibers_(discrete_fibers), components_(std::move(components)) {
  if (dim_in < 1 || dim_in > 2 || dim_out < 1 || dim_out > 2) throw InvalidInput("map dimensions must be 1 or 2");
  if (static_cast<int>(components_.size()) != dim_out)
    throw InvalidInput("map has " + std::to_string(components_.size()) + " components, expected " +
                       std::to_string(dim_out));
  for (const auto& comp : components_)
    for (const auto& m : comp) {
      if (static_cast<int>(m.exponents.size()) != dim_in)
        throw InvalidInput("monomial exponent length does not match the source dimension");
      for (int e : m.exponents)
        if (e < 0) throw InvalidInput("negative exponent in map monomial");
    }
}

HolomorphicMap HolomorphicMap::identity(int dim) {
  std::vector<std::vector<Monomial>> comps(dim);
  for (int i = 0; i < dim; ++i) {
    std::vector<int> e(dim, 0);
    e[i] = 1;
    comps[i].push_back({e, 1.0});
  }
  return HolomorphicMap(dim, dim, std::move(comps));
}

Point HolomorphicMap::operator()(const Point& z) const {
  Point w(dim_out_);
  for (int i = 0; i < dim_out_; ++i)
    for (const auto& m : components_[i]) {
      cd v = m.coeff;
      for (int j = 0; j < dim_in_; ++j) v *= ipow(z[j], m.exponents[j]);
      w[i] += v;
    }
  return w;
}

std::vector<std::vector<cd>> HolomorphicMap::jacobian(const Point& z) const {
  std::vector<std::vector<cd>> J(dim_out_, std::vector<cd>(dim_in_));
  for (int i = 0; i < dim_out_; ++i)
    for (const auto& m : components_[i])
      for (int k = 0; k < dim_in_; ++k) {
        if (m.exponents[k] == 0) continue;
        cd v = m.coeff * static_cast<double>(m.exponents[k]);
        for (int j = 0; j < dim_in_; ++j) v *= ipow(z[j], j == k ? m.exponents[j] - 1 : m.exponents[j]);
        J[i][k] += v;
      }
  return J;
}

FieldPtr compose(FieldPtr f, MapPtr g) {
  if (f->dim() != g->dim_out()) throw InvalidInput("field dimension does not match the map target");
  return std::make_shared<ComposedField>(std::move(f), std::move(g));
}

GridFunction sample(const GridDomain& d, const Field& f) {
  if (f.dim() != d.dim()) throw InvalidInput("field dimension does not match the grid");
  GridFunction g{d, std::vector<double>(d.size())};
  for (std::size_t i = 0; i < d.size(); ++i) {
    g.values[i] = f(d.point(i));
    if (!std::isfinite(g.values[i])) throw InvalidInput("field is not finite at " + fmt_point(d.point(i)));
  }
  return g;
}

// ---------------------------------------------------------------------------
// Hessians

Hermitian complex_hessian(const GridFunction& f, std::size_t node) {
  const auto& d = f.domain;
  if (node >= d.size()) throw InvalidInput("node index out of range");
  if (d.boundary_distance(node) < 2)
    throw InvalidInput("point " + fmt_point(d.point(node)) + " is within 2 nodes of the grid boundary");
  const auto& v = f.values;
  return stencil_hessian(d.dim(), d.h(), [&](int a, int sa, int b, int sb) {
    const long long off = static_cast<long long>(sa) * static_cast<long long>(d.stride(a)) +
                          static_cast<long long>(sb) * static_cast<long long>(d.stride(b));
    return v[static_cast<std::size_t>(static_cast<long long>(node) + off)];
  });
}

Hermitian complex_hessian(const GridFunction& f, const Point& p) {
  auto node = f.domain.nearest_node(p);
  if (!node) throw InvalidInput("point " + fmt_point(p) + " lies outside the grid");
  return complex_hessian(f, *node);
}

Hermitian complex_hessian(const Field& f, const Point& p, double h) {
  return stencil_hessian(static_cast<int>(p.size()), h, [&](int a, int sa, int b, int sb) {
    return f(shifted(shifted(p, a, sa * h), b, sb * h));
  });
}

std::vector<cd> dz(const Field& f, const Point& p, double h) {
  std::vector<cd> g(p.size());
  for (std::size_t j = 0; j < p.size(); ++j) {
    const int x = 2 * static_cast<int>(j), y = x + 1;
    const double fx = (f(shifted(p, x, h)) - f(shifted(p, x, -h))) / (2 * h);
    const double fy = (f(shifted(p, y, h)) - f(shifted(p, y, -h))) / (2 * h);
    g[j] = 0.5 * cd(fx, -fy);
  }
  return g;
}

// ---------------------------------------------------------------------------
// Regions and checks

Region Region::box_region(std::vector<Box> b) {
  Region r;
  r.kind = Kind::box;
  r.boxes = std::move(b);
  return r;
}

Region Region::annulus(Point center, double r_min, double r_max) {
  if (!(r_min >= 0) || !(r_max >= r_min)) throw InvalidInput("annulus radii must satisfy 0 <= r_min <= r_max");
  Region r;
  r.kind = Kind::annulus;
  r.center = std::move(center);
  r.r_min = r_min;
  r.r_max = r_max;
  return r;
}

Region Region::from_mask(std::vector<char> m) {
  Region r;
  r.kind = Kind::mask;
  r.mask = std::move(m);
  return r;
}

bool Region::contains(const Point& p) const {
  switch (kind) {
    case Kind::box: {
      if (p.size() != boxes.size()) return false;
      for (std::size_t j = 0; j < p.size(); ++j) {
        const auto& b = boxes[j];
        if (p[j].real() < b.re_min || p[j].real() > b.re_max || p[j].imag() < b.im_min || p[j].imag() > b.im_max)
          return false;
      }
      return true;
    }
    case Kind::annulus: {
      if (p.size() != center.size()) return false;
      double r2 = 0;
      for (std::size_t j = 0; j < p.size(); ++j) r2 += std::norm(p[j] - center[j]);
      const double r = std::sqrt(r2);
      return r >= r_min && r <= r_max;
    }
    default:
      throw InvalidInput("point membership needs a box or annulus region");
  }
}

bool Region::contains(const GridDomain& d, std::size_t node) const {
  switch (kind) {
    case Kind::interior:
      return d.boundary_distance(node) >= 2;
    case Kind::mask:
      if (mask.size() != d.size()) throw InvalidInput("region mask does not match the grid");
      return mask[node] != 0;
    default:
      return contains(d.point(node));
  }
}

std::vector<std::size_t> region_nodes(const GridDomain& d, const Region& r, int margin) {
  if (r.kind == Region::Kind::mask && r.mask.size() != d.size())
    throw InvalidInput("region mask does not match the grid");
  if (r.kind == Region::Kind::box && static_cast<int>(r.boxes.size()) != d.dim())
    throw InvalidInput("region box dimension does not match the grid");
  if (r.kind == Region::Kind::annulus && static_cast<int>(r.center.size()) != d.dim())
    throw InvalidInput("region center dimension does not match the grid");
  std::vector<std::size_t> nodes;
  for (std::size_t i = 0; i < d.size(); ++i) {
    if (r.kind == Region::Kind::interior) {
      if (d.boundary_distance(i) >= margin) nodes.push_back(i);
      continue;
    }
    if (!r.contains(d, i)) continue;
    if (d.boundary_distance(i) < margin)
      throw InvalidInput("region outside domain: " + fmt_point(d.point(i)) + " is within " + std::to_string(margin) +
                         " nodes of the boundary");
    nodes.push_back(i);
  }
  if (nodes.empty()) throw InvalidInput("region contains no grid nodes");
  return nodes;
}

namespace {

template <class Eval>
PshCheck min_check(const GridDomain& d, const std::vector<std::size_t>& nodes, double margin, Eval&& eval) {
  PshCheck c;
  c.worst = kInf;
  for (std::size_t n : nodes) {
    const double e = eval(n);
    ++c.samples;
    if (e < c.worst) {
      c.worst = e;
      c.worst_node = n;
    }
  }
  if (c.samples) c.worst_point = d.point(c.worst_node);
  c.pass = c.samples > 0 && c.worst >= margin;
  return c;
}

}  // namespace

PshCheck is_strongly_psh(const GridFunction& f, const Region& region, double margin) {
  const auto nodes = region_nodes(f.domain, region);
  return min_check(f.domain, nodes, margin, [&](std::size_t n) { return min_eigenvalue(complex_hessian(f, n)); });
}

PshCheck is_pluriharmonic(const GridFunction& f, const Region& region, double tol) {
  const auto nodes = region_nodes(f.domain, region);
  PshCheck c;
  for (std::size_t n : nodes) {
    const double m = complex_hessian(f, n).max_abs();
    ++c.samples;
    if (m > c.worst || c.samples == 1) {
      c.worst = m;
      c.worst_node = n;
    }
  }
  c.worst_point = f.domain.point(c.worst_node);
  c.pass = c.worst <= tol;
  return c;
}

PshCheck is_strongly_psh(const Field& f, const GridDomain& d, const std::vector<std::size_t>& nodes, double margin) {
  return min_check(d, nodes, margin,
                   [&](std::size_t n) { return min_eigenvalue(complex_hessian(f, d.point(n), d.h())); });
}

// ---------------------------------------------------------------------------
// Well-related coverings

bool WellRelatedReport::pass() const {
  return std::all_of(conditions.begin(), conditions.end(), [](const auto& c) { return c.pass; });
}

namespace {

void fail(ConditionReport& c, Witness w) {
  c.pass = false;
  if (!c.detail.empty()) c.detail += "; ";
  c.detail += w.what;
  c.witnesses.push_back(std::move(w));
}

// Connected components (2N-axis adjacency) of the flagged nodes; -1 elsewhere.
std::vector<int> flood_components(const GridDomain& d, const std::vector<char>& flag, int& count) {
  std::vector<int> comp(d.size(), -1);
  count = 0;
  std::deque<std::size_t> queue;
  for (std::size_t s = 0; s < d.size(); ++s) {
    if (!flag[s] || comp[s] >= 0) continue;
    comp[s] = count;
    queue.push_back(s);
    while (!queue.empty()) {
      const std::size_t u = queue.front();
      queue.pop_front();
      const auto idx = d.unravel(u);
      for (int a = 0; a < d.axes(); ++a)
        for (int step : {-1, 1}) {
          const int k = idx[a] + step;
          if (k < 0 || k >= d.count(a)) continue;
          const std::size_t v = step > 0 ? u + d.stride(a) : u - d.stride(a);
          if (flag[v] && comp[v] < 0) {
            comp[v] = count;
            queue.push_back(v);
          }
        }
    }
    ++count;
  }
  return comp;
}

bool is_point_region(const Region& r) { return r.kind == Region::Kind::box || r.kind == Region::Kind::annulus; }

}  // namespace

WellRelatedReport validate_well_related(const WellRelatedSpec& spec) {
  WellRelatedReport rep;
  for (int i = 0; i < 4; ++i) rep.conditions[i].condition = i + 1;
  auto& c1 = rep.conditions[0];
  auto& c2 = rep.conditions[1];
  auto& c3 = rep.conditions[2];
  auto& c4 = rep.conditions[3];
  const auto& S = spec.source;
  const auto& T = spec.target;
  const std::size_t nt = spec.targets.size(), ns = spec.sources.size();
  rep.components.assign(ns, {});

  // (2) finiteness and containment; later checks skip charts that fail here.
  if (!spec.map) {
    fail(c2, {-1, 0, {}, 0, "no map given"});
    return rep;
  }
  if (spec.map->dim_in() != S.dim() || spec.map->dim_out() != T.dim())
    fail(c2, {-1, 0, {}, 0, "map dimensions do not match the source and target grids"});
  if (!spec.map->discrete_fibers()) fail(c2, {-1, 0, {}, 0, "map is not declared to have discrete fibers"});
  if (nt == 0 || ns == 0) fail(c2, {-1, 0, {}, 0, "cover has no charts"});
  if (!c2.pass) return rep;

  std::vector<char> target_ok(nt, 1), source_ok(ns, 1);
  std::vector<std::vector<std::size_t>> v_nodes(nt);
  for (std::size_t a = 0; a < nt; ++a) {
    const auto& tc = spec.targets[a];
    const int ai = static_cast<int>(a);
    if (!tc.psi || !tc.tau || tc.psi->dim() != T.dim() || tc.tau->dim() != T.dim() || !is_point_region(tc.V)) {
      fail(c2, {ai, 0, {}, 0, "target chart " + std::to_string(a) + " is incomplete or has mismatched dimensions"});
      target_ok[a] = 0;
      continue;
    }
    try {
      v_nodes[a] = region_nodes(T, tc.V);
    } catch (const InvalidInput& e) {
      fail(c2, {ai, 0, {}, 0, "target chart " + std::to_string(a) + ": " + e.what()});
      target_ok[a] = 0;
      continue;
    }
    // The cut-off must vanish off V.
    for (std::size_t n = 0; n < T.size(); ++n) {
      const Point w = T.point(n);
      if (tc.V.contains(w)) continue;
      const double t = (*tc.tau)(w);
      if (t != 0.0) {
        fail(c2, {ai, n, w, t, "cut-off of target chart " + std::to_string(a) + " is nonzero outside V at " +
                                   fmt_point(w)});
        target_ok[a] = 0;
        break;
      }
    }
  }
  for (std::size_t s = 0; s < ns; ++s) {
    const auto& sc = spec.sources[s];
    const int si = static_cast<int>(s);
    if (sc.target < 0 || sc.target >= static_cast<int>(nt) || !sc.phi || sc.phi->dim() != S.dim() ||
        sc.selector.kind != Region::Kind::box || static_cast<int>(sc.selector.boxes.size()) != S.dim()) {
      fail(c2, {si, 0, {}, 0, "source chart " + std::to_string(s) + " is incomplete or has mismatched dimensions"});
      source_ok[s] = 0;
    } else if (!target_ok[sc.target]) {
      source_ok[s] = 0;
    }
  }

  // (1) ψ strongly psh on V.
  for (std::size_t a = 0; a < nt; ++a) {
    if (!target_ok[a]) continue;
    const auto chk = is_strongly_psh(*spec.targets[a].psi, T, v_nodes[a], spec.margin);
    if (!chk.pass)
      fail(c1, {static_cast<int>(a), chk.worst_node, chk.worst_point, chk.worst,
                "psi of target chart " + std::to_string(a) + " has eigenvalue " + std::to_string(chk.worst) + " at " +
                    fmt_point(chk.worst_point)});
  }

  // (4) components of the sampled preimage.
  std::vector<std::vector<int>> comps(nt);
  std::vector<int> comp_count(nt, 0);
  std::vector<Point> images(S.size());
  for (std::size_t n = 0; n < S.size(); ++n) images[n] = (*spec.map)(S.point(n));
  for (std::size_t a = 0; a < nt; ++a) {
    if (!target_ok[a]) continue;
    std::vector<char> flag(S.size(), 0);
    for (std::size_t n = 0; n < S.size(); ++n) flag[n] = spec.targets[a].V.contains(images[n]);
    comps[a] = flood_components(S, flag, comp_count[a]);
  }
  for (std::size_t s = 0; s < ns; ++s) {
    if (!source_ok[s]) continue;
    const auto& sc = spec.sources[s];
    const auto& comp = comps[sc.target];
    const int si = static_cast<int>(s);
    std::vector<char> meets(comp_count[sc.target], 0);
    for (std::size_t n = 0; n < S.size(); ++n)
      if (comp[n] >= 0 && sc.selector.contains(S.point(n))) meets[comp[n]] = 1;
    const int hits = static_cast<int>(std::count(meets.begin(), meets.end(), 1));
    if (hits != 1) {
      std::size_t wn = 0;
      if (hits > 1) {
        const int first = static_cast<int>(std::find(meets.begin(), meets.end(), 1) - meets.begin());
        for (std::size_t n = 0; n < S.size(); ++n)
          if (comp[n] >= 0 && comp[n] != first && meets[comp[n]] && sc.selector.contains(S.point(n))) {
            wn = n;
            break;
          }
      }
      fail(c4, {si, wn, hits > 1 ? S.point(wn) : Point{}, static_cast<double>(hits),
                "selector of source chart " + std::to_string(s) + " meets " + std::to_string(hits) +
                    " components of the preimage" +
                    (hits > 1 ? " (second one at " + fmt_point(S.point(wn)) + ")" : std::string())});
      source_ok[s] = 0;
      continue;
    }
    const int k = static_cast<int>(std::find(meets.begin(), meets.end(), 1) - meets.begin());
    std::vector<char> mask(S.size(), 0);
    bool inside = true;
    for (std::size_t n = 0; n < S.size(); ++n) {
      if (comp[n] != k) continue;
      mask[n] = 1;
      if (inside && !sc.selector.contains(S.point(n))) {
        fail(c4, {si, n, S.point(n), 0,
                  "component of source chart " + std::to_string(s) + " leaves the selector at " +
                      fmt_point(S.point(n))});
        inside = false;
      }
      if (S.boundary_distance(n) < 2) {
        fail(c2, {si, n, S.point(n), 0,
                  "component of source chart " + std::to_string(s) + " reaches the grid boundary at " +
                      fmt_point(S.point(n))});
        inside = false;
        break;
      }
    }
    if (!inside) {
      source_ok[s] = 0;
      continue;
    }
    rep.components[s] = std::move(mask);
  }

  // (3) φ strongly psh and positive on U.
  for (std::size_t s = 0; s < ns; ++s) {
    if (!source_ok[s]) continue;
    const auto& phi = *spec.sources[s].phi;
    const int si = static_cast<int>(s);
    std::vector<std::size_t> nodes;
    for (std::size_t n = 0; n < S.size(); ++n)
      if (rep.components[s][n]) nodes.push_back(n);
    for (std::size_t n : nodes) {
      const double v = phi(S.point(n));
      if (!(v > 0)) {
        fail(c3, {si, n, S.point(n), v,
                  "phi of source chart " + std::to_string(s) + " is not positive at " + fmt_point(S.point(n))});
        break;
      }
    }
    const auto chk = is_strongly_psh(phi, S, nodes, spec.margin);
    if (!chk.pass)
      fail(c3, {si, chk.worst_node, chk.worst_point, chk.worst,
                "phi of source chart " + std::to_string(s) + " has eigenvalue " + std::to_string(chk.worst) + " at " +
                    fmt_point(chk.worst_point)});
  }
  return rep;
}

PreparedCover prepare(const WellRelatedSpec& spec) {
  PreparedCover pc;
  pc.spec = spec;
  pc.report = validate_well_related(spec);
  if (!pc.report.pass()) {
    for (const auto& c : pc.report.conditions)
      if (!c.pass) throw PreconditionFailed("well-related condition " + std::to_string(c.condition) + " fails: " + c.detail);
  }
  const auto& S = spec.source;
  pc.charts.resize(spec.sources.size());
  for (std::size_t s = 0; s < spec.sources.size(); ++s) {
    auto& cd_ = pc.charts[s];
    cd_.in_U = pc.report.components[s];
    cd_.T.assign(S.size(), 0.0);
    const auto& tau = *spec.targets[spec.sources[s].target].tau;
    for (std::size_t n = 0; n < S.size(); ++n) {
      if (!cd_.in_U[n]) continue;
      cd_.T[n] = tau((*spec.map)(S.point(n)));
      if (cd_.T[n] > 0 && S.boundary_distance(n) >= 2) cd_.support.push_back(n);
    }
  }
  return pc;
}

// ---------------------------------------------------------------------------
// Levi constants and the ε-plan

LeviConstants levi_constants(const PreparedCover& pc, int source_chart, const std::vector<std::size_t>& nodes,
                             const SafetyFactors& safety) {
  if (source_chart < 0 || source_chart >= static_cast<int>(pc.charts.size()))
    throw InvalidInput("source chart index out of range");
  const auto& in_U = pc.charts[source_chart].in_U;
  for (std::size_t n : nodes)
    if (n >= in_U.size() || !in_U[n])
      throw InvalidInput("region node " + std::to_string(n) + " lies outside U of source chart " +
                         std::to_string(source_chart));
  return levi_constants(pc.spec, source_chart, nodes, safety);
}

LeviConstants levi_constants(const WellRelatedSpec& spec, int source_chart, const std::vector<std::size_t>& nodes,
                             const SafetyFactors& safety) {
  if (source_chart < 0 || source_chart >= static_cast<int>(spec.sources.size()))
    throw InvalidInput("source chart index out of range");
  const auto& sc = spec.sources[source_chart];
  const auto& tc = spec.targets[sc.target];
  const auto& S = spec.source;
  const double h = S.h();
  LeviConstants k;
  k.p_raw = k.q_raw = kInf;
  for (std::size_t n : nodes) {
    if (n >= S.size()) throw InvalidInput("node index out of range");
    const Point x = S.point(n);
    const Point y = (*spec.map)(x);
    const auto J = spec.map->jacobian(x);
    k.p_raw = std::min(k.p_raw, restricted_min_eigenvalue(complex_hessian(*tc.psi, y, h), J));
    k.q_raw = std::min(k.q_raw, min_eigenvalue(complex_hessian(*sc.phi, x, h)));
    const double phi = (*sc.phi)(x);
    k.b_raw = std::max(k.b_raw, std::abs(phi) * operator_norm(complex_hessian(*tc.tau, y, h)));
    double gt = 0, gp = 0;
    for (const auto& v : dz(*tc.tau, y, h)) gt += std::norm(v);
    for (const auto& v : dz(*sc.phi, x, h)) gp += std::norm(v);
    k.c_raw = std::max(k.c_raw, std::sqrt(gt) * std::sqrt(gp));
    ++k.samples;
  }
  if (k.samples == 0) throw InvalidInput("empty region for Levi constants");
  if (!(k.p_raw > 0))
    throw PreconditionFailed("psi is not strongly psh along the image of the map (p = " + std::to_string(k.p_raw) +
                             ") on source chart " + std::to_string(source_chart));
  if (!(k.q_raw > 0))
    throw PreconditionFailed("phi is not strongly psh (q = " + std::to_string(k.q_raw) + ") on source chart " +
                             std::to_string(source_chart));
  if (!std::isfinite(k.p_raw)) k.p_raw = 1.0;  // map of rank zero everywhere: no constraint from ψ
  k.p = safety.shrink * k.p_raw;
  k.q = safety.shrink * k.q_raw;
  k.b = safety.widen * k.b_raw;
  k.c = safety.widen * k.c_raw;
  return k;
}

LeviConstants levi_constants(const PreparedCover& pc, int source_chart, const Region& region,
                             const SafetyFactors& safety) {
  return levi_constants(pc, source_chart, region_nodes(pc.spec.source, region), safety);
}

std::vector<LeviConstants> chart_constants(const PreparedCover& pc, const SafetyFactors& safety) {
  std::vector<LeviConstants> out(pc.charts.size());
  for (std::size_t s = 0; s < pc.charts.size(); ++s)
    if (!pc.charts[s].support.empty())
      out[s] = levi_constants(pc, static_cast<int>(s), pc.charts[s].support, safety);
  return out;
}

PlanCheck verify_plan(const PreparedCover& pc, const EpsilonPlan& plan) {
  PlanCheck chk;
  chk.min_slack = kInf;
  const auto& S = pc.spec.source;
  for (const auto& r : plan.regions) {
    for (std::size_t n : pc.charts[r.chart].support) {
      double B = 0, C = 0, Q = 0;
      for (int b : r.index) {
        const double t = pc.charts[b].T[n];
        if (t <= 0) continue;
        const auto& k = plan.constants[b];
        const double e = plan.epsilon[b];
        B += 2 * e * k.b * t;
        C += 2 * e * k.c * t;
        Q += e * k.q * t * t;
      }
      const double slack = (r.P - B) * Q - C * C;
      ++chk.samples;
      if (!(slack > 0)) ++chk.violations;
      if (B > r.P / 2) ++chk.half_violations;
      if (slack < chk.min_slack) {
        chk.min_slack = slack;
        chk.worst = {r.chart, n, S.point(n), slack, "(P-B)Q-C^2"};
      }
    }
  }
  return chk;
}

EpsilonPlan epsilon_plan(const PreparedCover& pc, const std::vector<LeviConstants>& constants) {
  const std::size_t ns = pc.charts.size();
  if (constants.size() != ns) throw InvalidInput("expected one set of Levi constants per source chart");
  EpsilonPlan plan;
  plan.constants = constants;
  plan.epsilon.assign(ns, 1.0);
  for (std::size_t a = 0; a < ns; ++a) {
    const auto& sup = pc.charts[a].support;
    if (sup.empty()) continue;
    PlanRegion r;
    r.chart = static_cast<int>(a);
    for (std::size_t b = 0; b < ns; ++b) {
      const auto& T = pc.charts[b].T;
      if (std::any_of(sup.begin(), sup.end(), [&](std::size_t n) { return T[n] > 0; }))
        r.index.push_back(static_cast<int>(b));
    }
    r.P = kInf;
    for (int b : r.index) {
      const auto& k = constants[b];
      if (!(k.q > 0) || !(k.p > 0))
        throw PreconditionFailed("Levi constants of source chart " + std::to_string(b) + " are not positive");
      r.P = std::min(r.P, k.p);
      r.sum_b += k.b;
      r.max_c2_over_q = std::max(r.max_c2_over_q, k.c * k.c / k.q);
    }
    const double n = static_cast<double>(r.index.size());
    r.delta1 = r.sum_b > 0 ? r.P / (4 * r.sum_b) : kInf;
    r.delta2 = r.max_c2_over_q > 0 ? 0.5 * r.P / (8 * n * r.max_c2_over_q) : kInf;
    r.delta = std::min({r.delta1, r.delta2, 1.0});
    for (int b : r.index) plan.epsilon[b] = std::min(plan.epsilon[b], r.delta);
    plan.regions.push_back(std::move(r));
  }
  plan.check = verify_plan(pc, plan);
  return plan;
}

// ---------------------------------------------------------------------------
// Gluing

GlueResult glue_potentials(const PreparedCover& pc, const std::vector<double>& epsilon, double overlap_tol) {
  const auto& spec = pc.spec;
  const auto& S = spec.source;
  const std::size_t ns = pc.charts.size();
  if (epsilon.size() != ns) throw InvalidInput("expected one epsilon per source chart");
  for (double e : epsilon)
    if (!(e > 0) || !std::isfinite(e)) throw InvalidInput("epsilon values must be positive and finite");
  for (const auto& sc : spec.sources)
    if (const auto* g = sc.phi->grid(); g && !g->aligned_with(S))
      throw InvalidInput("grid of a source potential is not aligned with the source grid");
  for (const auto& tc : spec.targets)
    if (const auto* g = tc.psi->grid(); g && !g->aligned_with(spec.target))
      throw InvalidInput("grid of a target potential is not aligned with the target grid");

  GlueResult out;
  out.epsilon = epsilon;
  out.phi_eps = {S, std::vector<double>(S.size(), 0.0)};
  for (std::size_t s = 0; s < ns; ++s) {
    const auto& T = pc.charts[s].T;
    const auto& phi = *spec.sources[s].phi;
    for (std::size_t n = 0; n < S.size(); ++n)
      if (T[n] > 0) out.phi_eps.values[n] += epsilon[s] * T[n] * T[n] * phi(S.point(n));
  }
  std::vector<Point> images(S.size());
  for (std::size_t n = 0; n < S.size(); ++n) images[n] = (*spec.map)(S.point(n));
  for (std::size_t s = 0; s < ns; ++s) {
    const auto& psi = *spec.targets[spec.sources[s].target].psi;
    GridFunction base{S, std::vector<double>(S.size())};
    for (std::size_t n = 0; n < S.size(); ++n) base.values[n] = psi(images[n]);
    GridFunction glued{S, base.values};
    for (std::size_t n = 0; n < S.size(); ++n) glued.values[n] += out.phi_eps.values[n];
    out.base.push_back(std::move(base));
    out.glued.push_back(std::move(glued));
  }
  for (std::size_t a = 0; a < ns; ++a)
    for (std::size_t b = a + 1; b < ns; ++b) {
      std::vector<char> both(S.size(), 0);
      bool any = false;
      for (std::size_t n = 0; n < S.size(); ++n)
        if (pc.charts[a].in_U[n] && pc.charts[b].in_U[n] && S.boundary_distance(n) >= 2) both[n] = any = true;
      if (!any) continue;
      const auto diff = overlap_difference(out, static_cast<int>(a), static_cast<int>(b));
      out.overlaps.push_back(
          {static_cast<int>(a), static_cast<int>(b), is_pluriharmonic(diff, Region::from_mask(both), overlap_tol)});
    }
  return out;
}

GridFunction overlap_difference(const GlueResult& glue, int a, int b) {
  if (a < 0 || b < 0 || a >= static_cast<int>(glue.base.size()) || b >= static_cast<int>(glue.base.size()))
    throw InvalidInput("chart index out of range");
  GridFunction d{glue.base[a].domain, glue.base[a].values};
  for (std::size_t n = 0; n < d.values.size(); ++n) d.values[n] -= glue.base[b].values[n];
  return d;
}

bool GluedCheck::pass() const {
  return std::all_of(charts.begin(), charts.end(), [](const PshCheck& c) { return c.pass; });
}

GluedCheck verify_glued_psh(const PreparedCover& pc, const GlueResult& glue, double margin) {
  if (glue.glued.size() != pc.charts.size()) throw InvalidInput("glued potentials do not match the charts");
  GluedCheck out;
  for (std::size_t s = 0; s < pc.charts.size(); ++s) {
    const auto& sup = pc.charts[s].support;
    if (sup.empty()) {
      out.charts.push_back({});
      continue;
    }
    const auto& g = glue.glued[s];
    out.charts.push_back(
        min_check(g.domain, sup, margin, [&](std::size_t n) { return min_eigenvalue(complex_hessian(g, n)); }));
  }
  return out;
}

PipelineResult run_pipeline(const WellRelatedSpec& spec, double margin, int max_halvings) {
  PipelineResult res;
  res.validation = validate_well_related(spec);
  if (!res.validation.pass()) {
    res.failed_stage = "validate";
    return res;
  }
  const PreparedCover pc = prepare(spec);
  res.constants = chart_constants(pc);
  EpsilonPlan plan = epsilon_plan(pc, res.constants);
  if (!plan.check.pass()) {
    res.plan = std::move(plan);
    res.failed_stage = "plan";
    return res;
  }
  for (;;) {
    GlueResult glue = glue_potentials(pc, plan.epsilon);
    GluedCheck check = verify_glued_psh(pc, glue, margin);
    const bool overlaps_ok =
        std::all_of(glue.overlaps.begin(), glue.overlaps.end(), [](const auto& o) { return o.check.pass; });
    if (!overlaps_ok) {
      res.failed_stage = "glue";
    } else if (!check.pass()) {
      if (plan.halvings < max_halvings) {
        for (double& e : plan.epsilon) e *= 0.5;
        ++plan.halvings;
        plan.check = verify_plan(pc, plan);
        continue;
      }
      res.failed_stage = "verify";
    }
    res.plan = std::move(plan);
    res.glue = std::move(glue);
    res.verification = std::move(check);
    return res;
  }
}

// ---------------------------------------------------------------------------
// Grid-backed LCK data

GridLckReport check_grid_lck(const std::vector<GridFunction>& potentials, const std::vector<GridOverlap>& overlaps,
                             bool strong, double margin, double tol) {
  GridLckReport rep;
  for (const auto& p : potentials) {
    if (p.values.size() != p.domain.size()) throw InvalidInput("grid potential has the wrong number of values");
    auto c = is_strongly_psh(p, Region::interior(), strong ? margin : -tol);
    rep.pass = rep.pass && c.pass;
    rep.charts.push_back(std::move(c));
  }
  for (const auto& o : overlaps) {
    if (o.a < 0 || o.b < 0 || o.a >= static_cast<int>(potentials.size()) || o.b >= static_cast<int>(potentials.size()))
      throw InvalidInput("overlap refers to a missing chart");
    const auto& A = potentials[o.a];
    const auto& B = potentials[o.b];
    if (!A.domain.aligned_with(B.domain))
      throw InvalidInput("grids of charts " + std::to_string(o.a) + " and " + std::to_string(o.b) + " are not aligned");
    GridLckReport::Pair pr{o.a, o.b, 0, 0, {}};
    const double scale = std::exp(o.log_ratio);
    for (std::size_t n = 0; n < A.domain.size(); ++n) {
      if (A.domain.boundary_distance(n) < 2) continue;
      const Point x = A.domain.point(n);
      const auto m = B.domain.nearest_node(x);
      if (!m || B.domain.boundary_distance(*m) < 2) continue;
      const Hermitian ha = complex_hessian(A, n), hb = complex_hessian(B, *m);
      double dev = 0;
      for (int i = 0; i < ha.n * ha.n; ++i) dev = std::max(dev, std::abs(scale * ha.a[i] - hb.a[i]));
      dev /= std::max(1.0, hb.max_abs());
      ++pr.samples;
      if (dev > pr.deviation || pr.samples == 1) {
        pr.deviation = dev;
        pr.worst_point = x;
      }
    }
    if (pr.samples == 0 || pr.deviation > tol) rep.pass = false;
    rep.pairs.push_back(std::move(pr));
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Character-scaled families

ScaledFamily::Action ScaledFamily::act(int j, int k) const {
  if (k < 0 || k >= m) throw InvalidInput("family index out of range");
  return {((k - j) % m + m) % m, rho * Rational(j)};
}

ScaledFamily character_scaled_family(const GridFunction& phi, const Exact& rho, int m) {
  if (m <= 0) throw InvalidInput("group order must be positive, got " + std::to_string(m));
  ScaledFamily f;
  f.m = m;
  f.rho = rho;
  const double r = rho.to_double();
  for (int k = 0; k < m; ++k) {
    GridFunction g = phi;
    const double s = std::exp(k * r);
    for (double& v : g.values) v *= s;
    f.members.push_back(std::move(g));
  }
  return f;
}

}  // namespace lcktk::psh
