#pragma once

#include <functional>
#include <utility>
#include <vector>

#include "graph.hpp"
#include "mingraph.hpp"
#include "patch.hpp"

namespace longlab {

// Cell decomposition of a sampled surface with metric volumes, for ball
// volume quadrature and density ratios.
struct SurfaceCells {
  int m = 2;     // intrinsic dimension
  int adim = 3;  // ambient dimension
  std::vector<Mat> corners;  // per cell: adim x 2^m corner positions
  std::vector<double> volume;
};

SurfaceCells graph_surface_cells(const MinimalGraph& mg);
SurfaceCells patch_surface_cells(const ImmersedPatch& p);

// Metric volume of the extrinsic ball B_R(y0): cells are kept, dropped, or
// clipped by the affine fit of the corner signed distances (exact polygon
// area in dimension two). Smooth in R, unlike vertex counting.
double clipped_ball_volume(const SurfaceCells& cells, const Vec& y0, double R);

// Vertex graph of the sampled surface carrying the induced metric: ambient
// positions (so extrinsic balls are surface balls), measures sqrt(det g) h^m,
// axis-edge conductances from the inverse metric diagonal at the endpoints.
WeightedGraph induced_metric_graph(const MinimalGraph& mg);
WeightedGraph induced_metric_graph(const ImmersedPatch& p);

// Relative tolerance for the density checks.  The smallest dyadic radius
// covers only a few cells, so V(R) carries a cell-quantization deficit; 5%
// holds on the flat reference once R_min spans about four cells.
inline constexpr double kDensityTol = 0.05;

struct DensityReport {
  std::vector<double> radii;  // increasing dyadic grid ending at R0
  std::vector<double> D_raw;  // V(R) / (omega_m R^m)
  std::vector<double> D_iso;  // running max from the small end, nondecreasing
  double lambda = 0.0;        // sup over the grid of 1 / (R^2 mu2(B_R))
  bool doubling_ok = true;    // V(R) <= 2^m D(R0) V(R/2) (1 + kDensityTol)
  double doubling_worst = 0.0;
  bool monotone_ok = true;    // relative drops of D_raw within kDensityTol
  double monotone_worst_drop = 0.0;
};

DensityReport volume_density_and_lambda(const SurfaceCells& cells, const WeightedGraph& g,
                                        const Vec& y0, double R0, int levels = 5);

struct AuditReport {
  double B_at_base = 0.0;
  double R0 = 0.0;
  double scale_invariant_product = 0.0;  // |B|(y0) R0, fixed under rescaling
  DensityReport density;
  double Lambda = 0.0;
  std::vector<std::pair<double, double>> M_table;  // (R, sup of 1/r over the Gauss image)
  int chain_p = 3;
  double chain_mean = 0.0;      // mean over B_{R0/4} of (|B| h)^{2p}, h = 1/(gauss, up)
  double chain_ref = 0.0;       // (R0/2)^{-2p} sup over B_{R0/2} of h^{2p}
  double chain_fitted_C = 0.0;  // reported, never asserted
  // (R, M(R)/loglog R) for radii beyond e; desk-scale audits leave it empty.
  std::vector<std::pair<double, double>> growth_curve;
};

// Curvature bound bookkeeping around one interior node: density and spectral
// constants, the Gauss image chart table M, the mean-value chain check at
// half radius, and the scale-invariant product.
AuditReport curvature_estimate_audit(const MinimalGraph& mg, long long y0_node, double R0,
                                     int levels = 5);

enum class GrowthVerdict { Satisfied, Violated };

struct GrowthAudit {
  std::vector<std::pair<double, double>> ratios;  // (R, M(R)/loglog R)
  GrowthVerdict verdict = GrowthVerdict::Violated;
  double last_ratio = 0.0;
  double eps = 0.0;
  double delta = 0.0;             // eps/2, the slack passed to the flatness step
  double partial_integral = 0.0;  // of exp(-C0 M(t)) dt/t from R_minus to the last radius
};

// Slow-growth test for a chart bound M over at least four radii beyond e:
// Satisfied when M(R)/loglog R is nonincreasing and ends at or below eps.
// The partial integral is a Simpson rule in log t.
GrowthAudit bernstein_growth_audit(const std::function<double(double)>& M,
                                   const std::vector<double>& radii, double eps, double C0,
                                   double R_minus, int panels = 512);
GrowthAudit bernstein_growth_audit(const std::vector<std::pair<double, double>>& M_samples,
                                   double eps, double C0, double R_minus, int panels = 512);

}  // namespace longlab
