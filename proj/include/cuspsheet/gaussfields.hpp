#pragma once

#include <functional>
#include <optional>

#include "cuspsheet/common.hpp"
#include "cuspsheet/lattice.hpp"
#include "cuspsheet/profiles.hpp"
#include "cuspsheet/transport.hpp"

namespace cuspsheet {

// phi, alpha+ and alpha- on the (t, s) lattice, from the Gauss decomposition
// K = [[1,0],[-alpha+,1]] diag(e^{-phi/2}, e^{phi/2}) [[1,alpha-],[0,1]].
struct GaussFields {
  LatticeSpec lattice;
  Field2D<cplx> phi;
  Field2D<cplx> alphaPlus;
  Field2D<cplx> alphaMinus;
  Mask2D singular;    // |K11| <= threshold
  Mask2D branchJump;  // Im phi jumps by more than pi against a neighbour
  double threshold = 1e-6;
};

struct GaussFactors {
  cplx phi;
  cplx alphaPlus;
  cplx alphaMinus;
};

inline constexpr double kDefaultSingularThreshold = 1e-6;
inline constexpr double kOverflowGuard = 200.0;

// K(t, s) = T+(s + t) T-(s - t)^{-1}.
Matrix2C k_field(const TransportSolution& tPlus, const TransportSolution& tMinus, double t, double s);

// nullopt when |K11| <= threshold (principal minor vanishes). The branch of
// phi = -2 log K11 is the one nearest branchAnchor.
std::optional<GaussFactors> gauss_decompose(const Matrix2C& k, cplx branchAnchor = {},
                                            double threshold = kDefaultSingularThreshold);

Matrix2C gauss_compose(const GaussFactors& factors);

// Pointwise decomposition of K on the lattice, with Im phi continued along rows
// from the lattice point nearest the origin.
GaussFields decompose_lattice(const TransportSolution& tPlus, const TransportSolution& tMinus,
                              const LatticeSpec& lattice, double threshold = kDefaultSingularThreshold,
                              Exec exec = Exec::parallel);

struct PdeResiduals {
  double liouville = 0.0;      // |d+d-phi - 2 rho+ rho- e^phi|
  double chiralPlus = 0.0;     // |d- rho+|, rho+ recovered as (d+ alpha-) e^{-phi}
  double chiralMinus = 0.0;    // |d+ rho-|
  double alphaMinus = 0.0;     // |d+ alpha- - rho+ e^phi|
  double alphaPlus = 0.0;      // |d- alpha+ - rho- e^phi|
  double rhoRecovery = 0.0;    // max |recovered rho - input rho| over both chiralities
  double step = 0.0;
  std::size_t points = 0;
  std::size_t skipped = 0;  // stencil centres touching a blocked point

  double max_residual() const;
};

struct ResidualOptions {
  std::size_t stride = 1;       // stencil spacing in lattice units
  std::size_t maskDilation = 2;  // cells excluded around singular points
  double minModulus = 0.0;       // also skip points with |K11| = |e^{-phi/2}| below this
  Mask2D exclude;                // optional extra mask on the field lattice (empty: none)
};

PdeResiduals pde_residuals(const GaussFields& fields, const ProfileFunction& rhoPlus,
                           const ProfileFunction& rhoMinus, const ResidualOptions& options = {});

struct CrossValidation {
  double maxRelativeDeviation = 0.0;
  std::size_t compared = 0;
  std::size_t excluded = 0;
};

// e^{-Re phi} from the fields against |t11+ t22- - t12+ t21-|^2 from transport.
CrossValidation cross_validate(const TransportSolution& tPlus, const TransportSolution& tMinus,
                               const GaussFields& fields, std::size_t maskDilation = 2);

// Characteristic data: phi and alpha+ along the axis xi- = 0 (indexed by xi+),
// phi and alpha- along the axis xi+ = 0 (indexed by xi-). Index k stands for xi = k h.
struct GoursatBoundary {
  double step = 0.0;
  long plusFirst = 0;
  std::vector<cplx> phiAlongPlus;
  std::vector<cplx> alphaPlusAlongPlus;
  long minusFirst = 0;
  std::vector<cplx> phiAlongMinus;
  std::vector<cplx> alphaMinusAlongMinus;
};

class GoursatBlowUp : public std::runtime_error {
 public:
  GoursatBlowUp(double xiPlus, double xiMinus, double rePhi);
  double xiPlus;
  double xiMinus;
};

// Boundary data read off the transport path (self-consistency mode).
GoursatBoundary boundary_from_transport(const TransportSolution& tPlus, const TransportSolution& tMinus,
                                        const LatticeSpec& lattice);

// Boundary data sampled from known field functions phi(xi+, xi-), alpha+(..), alpha-(..).
GoursatBoundary boundary_from_functions(const std::function<cplx(double, double)>& phi,
                                        const std::function<cplx(double, double)>& alphaPlus,
                                        const std::function<cplx(double, double)>& alphaMinus,
                                        const LatticeSpec& lattice);

// Second-order characteristic scheme for
//   d+d-phi = 2 rho+ rho- e^phi,  d+ alpha- = rho+ e^phi,  d- alpha+ = rho- e^phi
// on the light-cone lattice, swept outward from the two axes.
GaussFields goursat_solve(const ProfileFunction& rhoPlus, const ProfileFunction& rhoMinus,
                          const GoursatBoundary& boundary, const LatticeSpec& lattice,
                          double threshold = kDefaultSingularThreshold, Exec exec = Exec::parallel);

// Element of the invariance group: reparametrizations A+-, multipliers f+-, shifts g+-.
struct GaugeElement {
  std::function<cplx(double)> fPlus = [](double) { return cplx{}; };
  std::function<cplx(double)> fMinus = [](double) { return cplx{}; };
  std::function<cplx(double)> gPlus = [](double) { return cplx{}; };
  std::function<cplx(double)> gMinus = [](double) { return cplx{}; };
  std::function<double(double)> aPlus = [](double x) { return x; };
  std::function<double(double)> aMinus = [](double x) { return x; };
  std::function<double(double)> daPlus = [](double) { return 1.0; };
  std::function<double(double)> daMinus = [](double) { return 1.0; };
  bool identityReparametrization = true;
};

// Fields as functions of (xi+, xi-).
struct FieldFunctions {
  std::function<cplx(double, double)> phi;
  std::function<cplx(double, double)> alphaPlus;
  std::function<cplx(double, double)> alphaMinus;
  ProfileFunction rhoPlus;
  ProfileFunction rhoMinus;
};

// phi~ = phi o A + f+ + f-;  rho~ = (rho o A) A' e^{-f};  alpha~ = (alpha o A) e^{f} + g.
// A+- must be strictly monotone on [xiMin, xiMax].
FieldFunctions apply_gauge(const FieldFunctions& fields, const GaugeElement& gauge, double xiMin, double xiMax);

struct GaugedLatticeFields {
  GaussFields fields;
  ProfileFunction rhoPlus;
  ProfileFunction rhoMinus;
};

// Lattice form, restricted to A+- = identity (no resampling needed).
GaugedLatticeFields apply_gauge(const GaussFields& fields, const ProfileFunction& rhoPlus,
                                const ProfileFunction& rhoMinus, const GaugeElement& gauge);

// Principal-branch field functions computed from the transport solutions.
FieldFunctions transport_field_functions(const TransportSolution& tPlus, const TransportSolution& tMinus);

GaussFields sample_fields(const FieldFunctions& fields, const LatticeSpec& lattice,
                          double threshold = kDefaultSingularThreshold);

}  // namespace cuspsheet
