#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "cuspsheet/transport.hpp"
#include "cuspsheet/worldsheet.hpp"

namespace cuspsheet {

enum class CuspKind { isolated, stableDiamond, planarFamily };

const char* to_string(CuspKind kind);

// Light-cone box xi+ in [plusMin, plusMax], xi- in [minusMin, minusMax] fitted
// around a two-dimensional zero set, i.e. a diamond in the (t, s) plane.
struct DiamondDescriptor {
  double centerS = 0.0;
  double centerT = 0.0;
  double halfWidth = 0.0;
  double tStart = 0.0;
  double tEnd = 0.0;
  double plusMin = 0.0;
  double plusMax = 0.0;
  double minusMin = 0.0;
  double minusMax = 0.0;
  double fillFraction = 0.0;
};

struct CuspEvent {
  CuspKind kind = CuspKind::isolated;
  double t = 0.0;  // isolated: refined location
  double s = 0.0;
  std::optional<DiamondDescriptor> diamond;
  std::optional<NullVector> nullDirection;
  std::vector<std::pair<double, double>> trajectory;  // planarFamily: (t, s) sorted by t
  double residual = 0.0;                              // max |metric| over the claimed zero set
  std::size_t latticePoints = 0;
};

struct DetectOptions {
  double tol = 1e-10;                  // on |combination|^2
  std::size_t minRegionPoints = 9;     // smallest zero region treated as two-dimensional
  Exec exec = Exec::parallel;
};

std::vector<CuspEvent> detect(const TransportSolution& tPlus, const TransportSolution& tMinus,
                              const WorldSheetGrid& grid, const DetectOptions& options = {});

struct SegmentReport {
  double tolerance = 0.0;
  double lineDeviation = 0.0;  // (i) max |X - (Xc + kappa (t - tc) e)|
  double maxDsX = 0.0;         // (ii) max |dX/ds| over the open diamond
  double directionNorm = 0.0;  // (iii) |e . e| with e = e+ + e- (time component 1)
  double segmentNorm = 0.0;    // |dX . dX| between the diamond's first and last instants
  std::pair<double, double> worstLine{0.0, 0.0};
  std::pair<double, double> worstDs{0.0, 0.0};
  bool linePass = false;
  bool degeneratePass = false;
  bool nullPass = false;

  bool passed() const { return linePass && degeneratePass && nullPass; }
  std::string diagnostic() const;
};

// Checks that the world-sheet over a stableDiamond is the light-like segment
// X0 + kappa t e. Tolerance defaults to 10 kappa h^2.
SegmentReport verify_degenerate_segment(const CuspEvent& event, const WorldSheetGrid& grid,
                                        std::optional<double> tolerance = std::nullopt);

// |dx_cusp / dX_0| averaged along the tracked trajectory.
double cusp_speed(const CuspEvent& event, const WorldSheetGrid& grid);

struct PlanarRegion {
  double plusMin = 0.0;
  double plusMax = 0.0;
  double minusMin = 0.0;
  double minusMax = 0.0;
  std::size_t directions = 0;
  double singularValues[3] = {0.0, 0.0, 0.0};  // RMS-normalized
  int rank = 0;
  bool planar = false;
};

// Spatial frame directions of both chiralities over xi+ in [plusMin, plusMax] and
// xi- in [minusMin, minusMax] (clipped to the lattice), stacked into an n x 3 matrix.
PlanarRegion planarity_report(const TransportSolution& tPlus, const TransportSolution& tMinus,
                              const LatticeSpec& lattice, double plusMin, double plusMax, double minusMin,
                              double minusMax, double tol = 1e-10);

// One report per pair of maximal xi intervals on which Im rho+ and Im rho- vanish.
std::vector<PlanarRegion> detect_planar_region(const TransportSolution& tPlus, const TransportSolution& tMinus,
                                               const WorldSheetGrid& grid, double tol = 1e-10);

}  // namespace cuspsheet
