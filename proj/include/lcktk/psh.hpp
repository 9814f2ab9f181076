#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "lcktk/exact.hpp"

namespace lcktk::psh {

using cd = std::complex<double>;
/// Point of ℂ^N (N = size).
using Point = std::vector<cd>;

/// Hermitian N×N matrix (N <= 2), row-major.
struct Hermitian {
  int n = 1;
  std::array<cd, 4> a{};

  cd& operator()(int i, int j) { return a[i * n + j]; }
  const cd& operator()(int i, int j) const { return a[i * n + j]; }
  double max_abs() const;
};

double min_eigenvalue(const Hermitian& h);
double max_eigenvalue(const Hermitian& h);
double operator_norm(const Hermitian& h);
/// Minimum of ⟨Hξ, ξ⟩/‖ξ‖² over ξ in the column span of J (M×N, row-major
/// rows of length N). Returns +inf when J has rank zero.
double restricted_min_eigenvalue(const Hermitian& h, const std::vector<std::vector<cd>>& jacobian);

/// Real/imaginary interval of one complex coordinate.
struct Box {
  double re_min = 0, re_max = 0, im_min = 0, im_max = 0;
};

/// Uniform grid on a product of complex boxes. Real axes are ordered
/// x1, y1, x2, y2 and values are stored row-major (last axis fastest).
class GridDomain {
 public:
  GridDomain() = default;
  /// Throws InvalidInput unless 1 <= dim <= 2, h > 0, every side is an integer
  /// multiple of h (to 1e-9 relative) and has at least 5 samples.
  GridDomain(int dim, std::vector<Box> box, double h);

  int dim() const { return dim_; }
  int axes() const { return 2 * dim_; }
  const std::vector<Box>& box() const { return box_; }
  double h() const { return h_; }
  int count(int axis) const { return counts_[axis]; }
  std::size_t size() const { return size_; }
  double origin(int axis) const;

  std::array<int, 4> unravel(std::size_t node) const;
  std::size_t ravel(const std::array<int, 4>& idx) const;
  std::size_t stride(int axis) const { return strides_[axis]; }
  Point point(std::size_t node) const;
  /// Fewest steps from the node to the grid boundary along any axis.
  int boundary_distance(std::size_t node) const;
  /// Nearest node to p, if p lies in the box.
  std::optional<std::size_t> nearest_node(const Point& p) const;
  bool contains(const Point& p) const;
  /// Same spacing and node positions on the overlap.
  bool aligned_with(const GridDomain& o) const;

  friend bool operator==(const GridDomain& a, const GridDomain& b);

 private:
  int dim_ = 1;
  std::vector<Box> box_;
  double h_ = 0;
  std::array<int, 4> counts_{1, 1, 1, 1};
  std::array<std::size_t, 4> strides_{0, 0, 0, 0};
  std::size_t size_ = 0;
};

struct GridFunction {
  GridDomain domain;
  std::vector<double> values;
};

/// Real-valued function on ℂ^N.
class Field {
 public:
  virtual ~Field() = default;
  virtual int dim() const = 0;
  virtual double operator()(const Point& p) const = 0;
  virtual std::string describe() const = 0;
  /// Backing grid for sampled fields, null for analytic ones.
  virtual const GridDomain* grid() const { return nullptr; }
};
using FieldPtr = std::shared_ptr<const Field>;

/// Term c · z^a · z̄^b (multi-indices a, b over the coordinates).
struct PolyTerm {
  cd c;
  std::vector<int> z;
  std::vector<int> zbar;
};

/// Re Σ c z^a z̄^b.
FieldPtr polynomial_field(int dim, std::vector<PolyTerm> terms);
/// 1 inside radius r_in of the center, 0 beyond r_out, quintic smoothstep
/// (C², vanishing first and second derivatives at both ends) in between.
FieldPtr radial_bump(Point center, double r_in, double r_out);
/// Tensor-product cubic (Catmull–Rom) interpolation of grid values.
FieldPtr sampled_field(GridFunction g);
/// Σ w_i f_i.
FieldPtr linear_combination(std::vector<std::pair<double, FieldPtr>> terms);

/// Polynomial map ℂ^N → ℂ^M with complex coefficients.
class HolomorphicMap {
 public:
  struct Monomial {
    std::vector<int> exponents;
    cd coeff;
  };

  HolomorphicMap() = default;
  HolomorphicMap(int dim_in, int dim_out, std::vector<std::vector<Monomial>> components, bool discrete_fibers = true);
  static HolomorphicMap identity(int dim);

  int dim_in() const { return dim_in_; }
  int dim_out() const { return dim_out_; }
  bool discrete_fibers() const { return discrete_fibers_; }
  const std::vector<std::vector<Monomial>>& components() const { return components_; }

  Point operator()(const Point& z) const;
  /// Exact derivative of the coefficients: rows are components, columns coordinates.
  std::vector<std::vector<cd>> jacobian(const Point& z) const;

 private:
  int dim_in_ = 1, dim_out_ = 1;
  bool discrete_fibers_ = true;
  std::vector<std::vector<Monomial>> components_;
};
using MapPtr = std::shared_ptr<const HolomorphicMap>;

/// f ∘ g for a field on the target of g.
FieldPtr compose(FieldPtr f, MapPtr g);

GridFunction sample(const GridDomain& d, const Field& f);

/// Complex Hessian ∂²f/∂z_j∂z̄_k at a node by second-order central
/// differences, recombined from the real second derivatives and symmetrized to
/// be exactly Hermitian. Throws InvalidInput within 2 nodes of the boundary.
Hermitian complex_hessian(const GridFunction& f, std::size_t node);
/// Same at the node nearest to p.
Hermitian complex_hessian(const GridFunction& f, const Point& p);
/// Same stencil applied to a field at an arbitrary point with step h.
Hermitian complex_hessian(const Field& f, const Point& p, double h);
/// ∂f/∂z_j by central differences (∂f/∂z̄_j is its conjugate for real f).
std::vector<cd> dz(const Field& f, const Point& p, double h);

/// Sampling region: box, annulus, explicit node mask, or the whole interior.
struct Region {
  enum class Kind { interior, box, annulus, mask };
  Kind kind = Kind::interior;
  std::vector<Box> boxes;
  Point center;
  double r_min = 0, r_max = 0;
  std::vector<char> mask;  // over the nodes of a specific domain

  static Region interior() { return {}; }
  static Region box_region(std::vector<Box> b);
  static Region annulus(Point center, double r_min, double r_max);
  static Region from_mask(std::vector<char> m);
  /// Box and annulus membership of a point (distance to the center over all coordinates).
  bool contains(const Point& p) const;
  bool contains(const GridDomain& d, std::size_t node) const;
};

/// Nodes of the region. For non-interior kinds, throws InvalidInput when a
/// region node lies within `margin` nodes of the boundary or the region has no nodes.
std::vector<std::size_t> region_nodes(const GridDomain& d, const Region& r, int margin = 2);

struct PshCheck {
  bool pass = true;
  std::size_t samples = 0;
  /// Smallest eigenvalue seen (or largest entry magnitude for pluriharmonic checks).
  double worst = 0;
  std::size_t worst_node = 0;
  Point worst_point;
};

PshCheck is_strongly_psh(const GridFunction& f, const Region& region, double margin);
PshCheck is_pluriharmonic(const GridFunction& f, const Region& region, double tol);
/// Field versions, evaluated at the nodes of `d` with step d.h().
PshCheck is_strongly_psh(const Field& f, const GridDomain& d, const std::vector<std::size_t>& nodes, double margin);

// ---------------------------------------------------------------------------
// Well-related coverings

struct TargetChart {
  Region V;  // box or annulus on the target domain
  FieldPtr psi;
  FieldPtr tau;
};

struct SourceChart {
  int target = 0;
  /// Box selecting one connected component of g⁻¹(V_target).
  Region selector;
  FieldPtr phi;
};

struct WellRelatedSpec {
  GridDomain source;
  GridDomain target;
  MapPtr map;
  std::vector<TargetChart> targets;
  std::vector<SourceChart> sources;
  /// Margin for the strong plurisubharmonicity conditions.
  double margin = 1e-6;
};

struct Witness {
  int chart = -1;
  std::size_t node = 0;
  Point point;
  double value = 0;
  std::string what;
};

struct ConditionReport {
  int condition = 0;
  bool pass = true;
  std::string detail;
  std::vector<Witness> witnesses;
};

struct WellRelatedReport {
  std::array<ConditionReport, 4> conditions;
  /// Per source chart: the selected preimage component (node mask over the source domain).
  std::vector<std::vector<char>> components;
  bool pass() const;
};

WellRelatedReport validate_well_related(const WellRelatedSpec& spec);

/// Sampled data for one source chart.
struct ChartData {
  std::vector<char> in_U;
  /// τ_target ∘ g on U (0 elsewhere).
  std::vector<double> T;
  /// Nodes of U with T > 0 and at least 2 nodes from the boundary.
  std::vector<std::size_t> support;
};

/// A validated spec plus its sampled chart data.
struct PreparedCover {
  WellRelatedSpec spec;
  WellRelatedReport report;
  std::vector<ChartData> charts;
};

/// Throws PreconditionFailed (with the first witness) when validation fails.
PreparedCover prepare(const WellRelatedSpec& spec);

struct LeviConstants {
  double p = 0, q = 0, b = 0, c = 0;  // after safety factors
  double p_raw = 0, q_raw = 0, b_raw = 0, c_raw = 0;
  std::size_t samples = 0;
};

struct SafetyFactors {
  double shrink = 0.8;  // p, q
  double widen = 1.25;  // b, c
};

/// Grid sweep over the nodes: p from Hess ψ at g(x) restricted to the range of
/// ∂g(x); q from Hess φ; b = max |φ|·‖Hess τ(g(x))‖; c = max ‖∂τ(g(x))‖·‖∂̄φ(x)‖.
/// Throws PreconditionFailed when p or q is not positive, InvalidInput when a
/// node lies outside U.
LeviConstants levi_constants(const PreparedCover& pc, int source_chart, const std::vector<std::size_t>& nodes,
                             const SafetyFactors& safety = {});
/// Same sweep without a prior validation: the caller vouches that the nodes
/// lie in U and map into V.
LeviConstants levi_constants(const WellRelatedSpec& spec, int source_chart, const std::vector<std::size_t>& nodes,
                             const SafetyFactors& safety = {});
/// Same over the nodes of a region (which must lie in U).
LeviConstants levi_constants(const PreparedCover& pc, int source_chart, const Region& region,
                             const SafetyFactors& safety = {});

struct PlanRegion {
  int chart = 0;              // region = support of χ_chart
  std::vector<int> index;     // charts whose χ-support meets the region
  double P = 0, sum_b = 0, max_c2_over_q = 0;
  double delta1 = 0, delta2 = 0, delta = 0;
};

struct PlanCheck {
  std::size_t samples = 0;
  std::size_t violations = 0;       // (P − B)Q <= C²
  std::size_t half_violations = 0;  // B > P/2
  double min_slack = 0;             // min of (P − B)Q − C²
  Witness worst;
  bool pass() const { return violations == 0 && half_violations == 0; }
};

struct EpsilonPlan {
  std::vector<double> epsilon;
  std::vector<LeviConstants> constants;
  std::vector<PlanRegion> regions;
  int halvings = 0;
  PlanCheck check;
};

/// Two-step schedule per region: δ₁ = P/(4Σb) forces B <= P/2, then
/// δ₂ = P/(16 n max c²/q) from Cauchy–Schwarz with n charts; δ = min(δ₁, δ₂, 1).
/// ε_α = min δ over regions whose index contains α. Verified pointwise.
EpsilonPlan epsilon_plan(const PreparedCover& pc, const std::vector<LeviConstants>& constants);
/// Constants for every chart over the support of its χ.
std::vector<LeviConstants> chart_constants(const PreparedCover& pc, const SafetyFactors& safety = {});

/// Pointwise (P − B)Q > C² and B <= P/2 on every region sample for the given ε.
PlanCheck verify_plan(const PreparedCover& pc, const EpsilonPlan& plan);

struct GlueResult {
  std::vector<double> epsilon;
  std::vector<GridFunction> base;      // ψ_target ∘ g, per source chart
  GridFunction phi_eps;                // Σ ε_α χ_α φ_α
  std::vector<GridFunction> glued;     // ψ_target ∘ g + φ_eps, per source chart
  /// Pluriharmonicity of φ^ε_α − φ^ε_β on each overlap (pairs with shared
  /// interior nodes). The φ_ε term cancels, so the difference is taken on `base`.
  struct Overlap {
    int a = 0, b = 0;
    PshCheck check;
  };
  std::vector<Overlap> overlaps;
};

/// Throws InvalidInput when a sampled φ or ψ grid is not aligned with the source
/// (resp. target) lattice, or when ε has the wrong size or a non-positive entry.
GlueResult glue_potentials(const PreparedCover& pc, const std::vector<double>& epsilon, double overlap_tol = 1e-6);
/// Overlap difference (ψ_a − ψ_b) ∘ g as a grid function.
GridFunction overlap_difference(const GlueResult& glue, int a, int b);

struct GluedCheck {
  std::vector<PshCheck> charts;  // on the support of each χ_α
  bool pass() const;
};

GluedCheck verify_glued_psh(const PreparedCover& pc, const GlueResult& glue, double margin);

struct PipelineResult {
  WellRelatedReport validation;
  std::vector<LeviConstants> constants;
  std::optional<EpsilonPlan> plan;
  std::optional<GlueResult> glue;
  std::optional<GluedCheck> verification;
  std::string failed_stage;  // empty when every stage passed
  bool pass() const { return failed_stage.empty(); }
};

/// validate → levi constants → plan → glue → verify, halving ε (at most
/// `max_halvings` times) until the glued potentials are strongly psh with `margin`.
PipelineResult run_pipeline(const WellRelatedSpec& spec, double margin = 1e-6, int max_halvings = 40);

// ---------------------------------------------------------------------------
// Grid-backed LCK data

/// Overlap of two grid-backed charts with the constant f_a − f_b of the conformal factors there.
struct GridOverlap {
  int a = 0, b = 0;
  double log_ratio = 0;
};

struct GridLckReport {
  std::vector<PshCheck> charts;
  struct Pair {
    int a = 0, b = 0;
    std::size_t samples = 0;
    double deviation = 0;  // max |e^{f_a − f_b} H_a − H_b| relative to max(1, |H_b|)
    Point worst_point;
  };
  std::vector<Pair> pairs;
  bool pass = true;
};

/// Each potential strongly psh (or psh within tol when `strong` is false) on its
/// interior, and e^{f_a} Hess φ_a = e^{f_b} Hess φ_b at shared interior nodes.
/// Throws InvalidInput for misaligned grids.
GridLckReport check_grid_lck(const std::vector<GridFunction>& potentials, const std::vector<GridOverlap>& overlaps,
                             bool strong, double margin, double tol);

// ---------------------------------------------------------------------------
// Character-scaled families

/// Copies φ_k = e^{kρ}φ for k in ℤ/m; acting by an integer j sends index k to
/// (k − j) mod m with log factor jρ.
struct ScaledFamily {
  int m = 1;
  Exact rho;
  std::vector<GridFunction> members;

  struct Action {
    int index;
    Exact log_factor;
    friend bool operator==(const Action&, const Action&) = default;
  };
  Action act(int j, int k) const;
  /// Log of the scale of member k relative to φ (k·ρ).
  Exact log_scale(int k) const { return rho * Rational(k); }
};

/// Throws InvalidInput when m <= 0.
ScaledFamily character_scaled_family(const GridFunction& phi, const Exact& rho, int m);

}  // namespace lcktk::psh
