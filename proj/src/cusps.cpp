#include "cuspsheet/cusps.hpp"

#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <set>
#include <sstream>
#include <stdexcept>

namespace cuspsheet {

namespace {

struct LatticePoint {
  std::size_t i;
  std::size_t j;
};

using Component = std::vector<LatticePoint>;

std::vector<Component> connected_components(const Mask2D& mask) {
  const std::size_t nt = mask.nt();
  const std::size_t ns = mask.ns();
  Mask2D seen(nt, ns, 0);
  std::vector<Component> out;
  std::vector<LatticePoint> stack;
  for (std::size_t i0 = 0; i0 < nt; ++i0) {
    for (std::size_t j0 = 0; j0 < ns; ++j0) {
      if (!mask(i0, j0) || seen(i0, j0)) continue;
      Component comp;
      stack.push_back({i0, j0});
      seen(i0, j0) = 1;
      while (!stack.empty()) {
        const LatticePoint p = stack.back();
        stack.pop_back();
        comp.push_back(p);
        for (int di = -1; di <= 1; ++di) {
          for (int dj = -1; dj <= 1; ++dj) {
            const long ii = static_cast<long>(p.i) + di;
            const long jj = static_cast<long>(p.j) + dj;
            if (ii < 0 || jj < 0 || ii >= static_cast<long>(nt) || jj >= static_cast<long>(ns)) continue;
            const auto ui = static_cast<std::size_t>(ii);
            const auto uj = static_cast<std::size_t>(jj);
            if (mask(ui, uj) && !seen(ui, uj)) {
              seen(ui, uj) = 1;
              stack.push_back({ui, uj});
            }
          }
        }
      }
      out.push_back(std::move(comp));
    }
  }
  return out;
}

struct IndexBox {
  long pMin = std::numeric_limits<long>::max();
  long pMax = std::numeric_limits<long>::min();
  long mMin = std::numeric_limits<long>::max();
  long mMax = std::numeric_limits<long>::min();

  void add(long p, long m) {
    pMin = std::min(pMin, p);
    pMax = std::max(pMax, p);
    mMin = std::min(mMin, m);
    mMax = std::max(mMax, m);
  }
};

std::size_t lattice_points_in_box(const LatticeSpec& L, const IndexBox& box) {
  std::size_t n = 0;
  for (std::size_t i = 0; i < L.nt(); ++i) {
    for (std::size_t j = 0; j < L.ns(); ++j) {
      const long p = L.plus_index(i, j);
      const long m = L.minus_index(i, j);
      if (p >= box.pMin && p <= box.pMax && m >= box.mMin && m <= box.mMax) ++n;
    }
  }
  return n;
}

cplx combination_at(const TransportSolution& tp, const TransportSolution& tm, double xp, double xm) {
  return metric_combination(tp.evaluate(xp), tm.evaluate(xm));
}

struct Refined {
  double xp;
  double xm;
  double absF;
};

// Gauss-Newton on the real 2x2 system (Re F, Im F) = 0 in (xi+, xi-); the
// pseudo-inverse handles rank-1 Jacobians on zero curves.
std::optional<Refined> refine(const TransportSolution& tp, const TransportSolution& tm, double xp, double xm,
                              double tol, double maxShift) {
  const double xp0 = xp;
  const double xm0 = xm;
  const double lo[2] = {tp.grid_start(), tm.grid_start()};
  const double hi[2] = {tp.grid_end(), tm.grid_end()};
  for (int it = 0; it < 30; ++it) {
    const Matrix2C a = tp.evaluate(xp);
    const Matrix2C b = tm.evaluate(xm);
    const cplx f = metric_combination(a, b);
    if (std::norm(f) <= 1e-3 * tol) break;
    const Matrix2C da = tp.derivative(xp);
    const Matrix2C db = tm.derivative(xm);
    const cplx fp = metric_combination(da, b);
    const cplx fm = metric_combination(a, db);
    Eigen::Matrix2d jac;
    jac << fp.real(), fm.real(), fp.imag(), fm.imag();
    const Eigen::Vector2d rhs(-f.real(), -f.imag());
    const Eigen::Vector2d delta = jac.jacobiSvd(Eigen::ComputeFullU | Eigen::ComputeFullV).solve(rhs);
    if (!delta.allFinite() || delta.norm() == 0.0) break;
    xp = std::clamp(xp + delta(0), lo[0], hi[0]);
    xm = std::clamp(xm + delta(1), lo[1], hi[1]);
    if (delta.norm() < 1e-14) break;
  }
  const double absF = std::abs(combination_at(tp, tm, xp, xm));
  if (absF * absF > tol) return std::nullopt;
  if (std::hypot(xp - xp0, xm - xm0) > maxShift) return std::nullopt;
  return Refined{xp, xm, absF};
}

Vec3 spatial(const Vec4& x) { return x.tail<3>(); }

bool in_lattice(const LatticeSpec& L, double t, double s) {
  const double eps = 1e-9 * L.step;
  return t >= L.t(0) - eps && t <= L.t(L.nt() - 1) + eps && s >= L.s(0) - eps && s <= L.s(L.ns() - 1) + eps;
}

CuspEvent diamond_event(const Component& comp, const TransportSolution& tp, const WorldSheetGrid& grid) {
  const LatticeSpec& L = grid.lattice;
  const double h = L.step;
  IndexBox box;
  double residual = 0.0;
  for (const auto& p : comp) {
    box.add(L.plus_index(p.i, p.j), L.minus_index(p.i, p.j));
    residual = std::max(residual, std::abs(grid.metric(p.i, p.j)));
  }
  DiamondDescriptor d;
  d.plusMin = static_cast<double>(box.pMin) * h;
  d.plusMax = static_cast<double>(box.pMax) * h;
  d.minusMin = static_cast<double>(box.mMin) * h;
  d.minusMax = static_cast<double>(box.mMax) * h;
  const double pc = 0.5 * (d.plusMin + d.plusMax);
  const double mc = 0.5 * (d.minusMin + d.minusMax);
  d.centerS = 0.5 * (pc + mc);
  d.centerT = 0.5 * (pc - mc);
  d.halfWidth = 0.5 * std::min(d.plusMax - d.plusMin, d.minusMax - d.minusMin);
  d.tStart = 0.5 * (d.plusMin - d.minusMax);
  d.tEnd = 0.5 * (d.plusMax - d.minusMin);
  d.fillFraction = static_cast<double>(comp.size()) / static_cast<double>(lattice_points_in_box(L, box));

  CuspEvent ev;
  ev.kind = CuspKind::stableDiamond;
  ev.t = d.centerT;
  ev.s = d.centerS;
  ev.diamond = d;
  ev.nullDirection = null_vector(tp.at_index((box.pMin + box.pMax) / 2), Chirality::plus);
  ev.residual = residual;
  ev.latticePoints = comp.size();
  return ev;
}

bool is_diamond(const Component& comp, const LatticeSpec& L, std::size_t minPoints) {
  if (comp.size() < minPoints) return false;
  IndexBox box;
  for (const auto& p : comp) box.add(L.plus_index(p.i, p.j), L.minus_index(p.i, p.j));
  if (box.pMax - box.pMin < 4 || box.mMax - box.mMin < 4) return false;
  const double fill = static_cast<double>(comp.size()) / static_cast<double>(lattice_points_in_box(L, box));
  return fill >= 0.5;
}

}  // namespace

const char* to_string(CuspKind kind) {
  switch (kind) {
    case CuspKind::isolated:
      return "isolated";
    case CuspKind::stableDiamond:
      return "stableDiamond";
    case CuspKind::planarFamily:
      return "planarFamily";
  }
  return "unknown";
}

std::vector<CuspEvent> detect(const TransportSolution& tPlus, const TransportSolution& tMinus,
                              const WorldSheetGrid& grid, const DetectOptions& options) {
  if (!(options.tol > 0.0)) throw std::invalid_argument("cusp tolerance must be positive");
  const LatticeSpec& L = grid.lattice;
  const std::size_t nt = L.nt();
  const std::size_t ns = L.ns();
  const double h = L.step;

  Field2D<double> c2(nt, ns);
  Mask2D zero(nt, ns, 0);
  for (std::size_t i = 0; i < nt; ++i) {
    for (std::size_t j = 0; j < ns; ++j) {
      c2(i, j) = grid.combination_sq(i, j);
      zero(i, j) = c2(i, j) <= options.tol ? 1 : 0;
    }
  }

  std::vector<CuspEvent> events;
  Mask2D excluded(nt, ns, 0);
  for (const Component& comp : connected_components(zero)) {
    if (!is_diamond(comp, L, options.minRegionPoints)) continue;
    events.push_back(diamond_event(comp, tPlus, grid));
    for (const auto& p : comp) {
      for (long di = -2; di <= 2; ++di) {
        for (long dj = -2; dj <= 2; ++dj) {
          const long ii = static_cast<long>(p.i) + di;
          const long jj = static_cast<long>(p.j) + dj;
          if (ii >= 0 && jj >= 0 && ii < static_cast<long>(nt) && jj < static_cast<long>(ns)) {
            excluded(static_cast<std::size_t>(ii), static_cast<std::size_t>(jj)) = 1;
          }
        }
      }
    }
  }

  // Seeds: local minima of |combination|^2 small enough that a zero can lie
  // within one lattice diagonal (|dF/dxi| <= |rho|).
  double bound = 0.0;
  for (const auto& b : tPlus.profile().terms()) bound += std::abs(b.amplitude);
  for (const auto& b : tMinus.profile().terms()) bound += std::abs(b.amplitude);
  const double seedLevel = 2.0 * h * bound + std::sqrt(options.tol);

  // A valley of |F|^2 crossing a row or a column has a minimum along it.
  const auto valley = [&](std::size_t i, std::size_t j, long di, long dj) {
    const long i0 = static_cast<long>(i) - di;
    const long j0 = static_cast<long>(j) - dj;
    const long i1 = static_cast<long>(i) + di;
    const long j1 = static_cast<long>(j) + dj;
    if (i0 < 0 || j0 < 0 || i1 >= static_cast<long>(nt) || j1 >= static_cast<long>(ns)) return false;
    const double a = c2(static_cast<std::size_t>(i0), static_cast<std::size_t>(j0));
    const double b = c2(static_cast<std::size_t>(i1), static_cast<std::size_t>(j1));
    const double v = c2(i, j);
    return v <= a && v <= b && (v < a || v < b || zero(i, j));
  };
  std::vector<LatticePoint> seeds;
  for (std::size_t i = 0; i < nt; ++i) {
    for (std::size_t j = 0; j < ns; ++j) {
      if (excluded(i, j) || std::sqrt(c2(i, j)) > seedLevel) continue;
      if (valley(i, j, 0, 1) || valley(i, j, 1, 0)) seeds.push_back({i, j});
    }
  }

  std::vector<std::optional<Refined>> refined(seeds.size());
  const double maxShift = 2.5 * h * std::sqrt(2.0);
#pragma omp parallel for schedule(dynamic, 16) if (options.exec == Exec::parallel)
  for (std::size_t k = 0; k < seeds.size(); ++k) {
    const double t = L.t(seeds[k].i);
    const double s = L.s(seeds[k].j);
    refined[k] = refine(tPlus, tMinus, s + t, s - t, options.tol, maxShift);
  }

  struct Hit {
    double t, s, absF;
  };
  std::vector<Hit> hits;
  for (const auto& r : refined) {
    if (!r) continue;
    const double t = 0.5 * (r->xp - r->xm);
    const double s = 0.5 * (r->xp + r->xm);
    if (!in_lattice(L, t, s)) continue;
    // Zeros hugging a diamond belong to it (the frames leave the gap with zero slope).
    const bool nearDiamond = std::any_of(events.begin(), events.end(), [&](const CuspEvent& e) {
      const DiamondDescriptor& d = *e.diamond;
      return r->xp >= d.plusMin - 3.0 * h && r->xp <= d.plusMax + 3.0 * h && r->xm >= d.minusMin - 3.0 * h &&
             r->xm <= d.minusMax + 3.0 * h;
    });
    if (nearDiamond) continue;
    const bool duplicate = std::any_of(hits.begin(), hits.end(), [&](const Hit& o) {
      return std::hypot(o.t - t, o.s - s) < 0.5 * h;
    });
    if (!duplicate) hits.push_back({t, s, r->absF});
  }

  // Single-linkage groups at 2.5 h.
  std::vector<std::size_t> parent(hits.size());
  std::iota(parent.begin(), parent.end(), 0);
  const auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (std::size_t a = 0; a < hits.size(); ++a) {
    for (std::size_t b = a + 1; b < hits.size(); ++b) {
      if (std::hypot(hits[a].t - hits[b].t, hits[a].s - hits[b].s) <= 2.5 * h) parent[find(a)] = find(b);
    }
  }
  std::map<std::size_t, std::vector<Hit>> groups;
  for (std::size_t a = 0; a < hits.size(); ++a) groups[find(a)].push_back(hits[a]);

  const double metricScale = 0.5 * grid.kappa * grid.kappa;
  for (auto& [root, g] : groups) {
    std::set<long> rows;
    double worst = 0.0;
    for (const auto& hit : g) {
      rows.insert(std::lround(hit.t / h));
      worst = std::max(worst, hit.absF);
    }
    CuspEvent ev;
    ev.residual = metricScale * worst * worst;
    ev.latticePoints = g.size();
    if (rows.size() >= 3) {
      std::sort(g.begin(), g.end(), [](const Hit& a, const Hit& b) { return a.t < b.t; });
      ev.kind = CuspKind::planarFamily;
      for (const auto& hit : g) ev.trajectory.emplace_back(hit.t, hit.s);
      const Hit& mid = g[g.size() / 2];
      ev.t = mid.t;
      ev.s = mid.s;
    } else {
      const Hit& best = *std::min_element(g.begin(), g.end(), [](const Hit& a, const Hit& b) {
        return a.absF < b.absF;
      });
      ev.kind = CuspKind::isolated;
      ev.t = best.t;
      ev.s = best.s;
    }
    ev.nullDirection = null_vector(tPlus.evaluate(ev.s + ev.t), Chirality::plus);
    events.push_back(std::move(ev));
  }
  std::sort(events.begin(), events.end(), [](const CuspEvent& a, const CuspEvent& b) {
    return a.t != b.t ? a.t < b.t : a.s < b.s;
  });
  return events;
}

std::string SegmentReport::diagnostic() const {
  std::ostringstream out;
  out << "tolerance " << tolerance << "; line deviation " << lineDeviation << " (worst at t=" << worstLine.first
      << ", s=" << worstLine.second << ") " << (linePass ? "ok" : "FAIL") << "; max |dX/ds| " << maxDsX
      << " (worst at t=" << worstDs.first << ", s=" << worstDs.second << ") " << (degeneratePass ? "ok" : "FAIL")
      << "; |e.e| " << directionNorm << ", |dX.dX| " << segmentNorm << " " << (nullPass ? "ok" : "FAIL");
  return out.str();
}

SegmentReport verify_degenerate_segment(const CuspEvent& event, const WorldSheetGrid& grid,
                                        std::optional<double> tolerance) {
  if (event.kind != CuspKind::stableDiamond || !event.diamond || !event.nullDirection) {
    throw std::invalid_argument("verify_degenerate_segment needs a stableDiamond event");
  }
  const LatticeSpec& L = grid.lattice;
  const double h = L.step;
  const DiamondDescriptor& d = *event.diamond;
  SegmentReport r;
  r.tolerance = tolerance.value_or(10.0 * grid.kappa * h * h);

  const double eps = 1e-9 * h;
  const auto inside = [&](long i, long j) {
    if (i < 0 || j < 0 || i >= static_cast<long>(L.nt()) || j >= static_cast<long>(L.ns())) return false;
    const auto ui = static_cast<std::size_t>(i);
    const auto uj = static_cast<std::size_t>(j);
    const double xp = static_cast<double>(L.plus_index(ui, uj)) * h;
    const double xm = static_cast<double>(L.minus_index(ui, uj)) * h;
    return xp >= d.plusMin - eps && xp <= d.plusMax + eps && xm >= d.minusMin - eps && xm <= d.minusMax + eps;
  };

  // Anchor: the lattice point of the diamond closest to its centre.
  long ic = -1;
  long jc = -1;
  double best = std::numeric_limits<double>::infinity();
  for (long i = 0; i < static_cast<long>(L.nt()); ++i) {
    for (long j = 0; j < static_cast<long>(L.ns()); ++j) {
      if (!inside(i, j)) continue;
      const double dist = std::hypot(L.t(static_cast<std::size_t>(i)) - d.centerT, L.s(static_cast<std::size_t>(j)) - d.centerS);
      if (dist < best) {
        best = dist;
        ic = i;
        jc = j;
      }
    }
  }
  if (ic < 0) throw std::invalid_argument("diamond contains no lattice points");
  const Vec4 xc = grid.X(static_cast<std::size_t>(ic), static_cast<std::size_t>(jc));
  const double tc = L.t(static_cast<std::size_t>(ic));
  const Vec4 dir = 2.0 * event.nullDirection->as_vec4();

  long iFirst = std::numeric_limits<long>::max();
  long iLast = -1;
  for (long i = 0; i < static_cast<long>(L.nt()); ++i) {
    for (long j = 0; j < static_cast<long>(L.ns()); ++j) {
      if (!inside(i, j)) continue;
      const auto ui = static_cast<std::size_t>(i);
      const auto uj = static_cast<std::size_t>(j);
      const double t = L.t(ui);
      const double s = L.s(uj);
      const double dev = (grid.X(ui, uj) - (xc + grid.kappa * (t - tc) * dir)).norm();
      if (dev > r.lineDeviation) {
        r.lineDeviation = dev;
        r.worstLine = {t, s};
      }
      if (inside(i, j - 1) && inside(i, j + 1)) {
        const double ds = (grid.X(ui, uj + 1) - grid.X(ui, uj - 1)).norm() / (2.0 * h);
        if (ds > r.maxDsX) {
          r.maxDsX = ds;
          r.worstDs = {t, s};
        }
      }
      iFirst = std::min(iFirst, i);
      iLast = std::max(iLast, i);
    }
  }
  r.directionNorm = std::abs(minkowski_dot(dir, dir));
  const auto row_point = [&](long i) {
    Vec4 sum = Vec4::Zero();
    int n = 0;
    for (long j = 0; j < static_cast<long>(L.ns()); ++j) {
      if (inside(i, j)) {
        sum += grid.X(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
        ++n;
      }
    }
    return Vec4(sum / n);
  };
  const Vec4 dx = row_point(iLast) - row_point(iFirst);
  r.segmentNorm = std::abs(minkowski_dot(dx, dx));
  r.linePass = r.lineDeviation <= r.tolerance;
  r.degeneratePass = r.maxDsX <= r.tolerance;
  r.nullPass = r.directionNorm <= r.tolerance && r.segmentNorm <= r.tolerance;
  return r;
}

double cusp_speed(const CuspEvent& event, const WorldSheetGrid& grid) {
  const LatticeSpec& L = grid.lattice;
  const double h = L.step;
  const auto row_of = [&](double t) { return std::lround(t / h) - L.tFirst; };
  const auto col_of = [&](double s) { return std::lround(s / h) - L.sFirst; };
  const long nt = static_cast<long>(L.nt());
  const long ns = static_cast<long>(L.ns());

  if (event.kind == CuspKind::stableDiamond) {
    const DiamondDescriptor& d = *event.diamond;
    const long j = std::clamp(col_of(d.centerS), 0L, ns - 1);
    // Rows strictly inside the diamond at its central column.
    const long i0 = std::clamp(row_of(d.centerT - d.halfWidth) + 1, 0L, nt - 1);
    const long i1 = std::clamp(row_of(d.centerT + d.halfWidth) - 1, 0L, nt - 1);
    if (i1 <= i0) throw std::invalid_argument("cusp_speed: diamond spans fewer than two interior rows");
    const auto ui0 = static_cast<std::size_t>(i0);
    const auto ui1 = static_cast<std::size_t>(i1);
    const auto uj = static_cast<std::size_t>(j);
    return (spatial(grid.X(ui1, uj)) - spatial(grid.X(ui0, uj))).norm() / (grid.kappa * (L.t(ui1) - L.t(ui0)));
  }
  if (event.kind != CuspKind::planarFamily || event.trajectory.size() < 2) {
    throw std::invalid_argument("cusp_speed: an isolated cusp has no trajectory");
  }

  const auto& traj = event.trajectory;
  const auto s_on_trajectory = [&](double t) {
    auto it = std::lower_bound(traj.begin(), traj.end(), t, [](const auto& p, double v) { return p.first < v; });
    if (it == traj.begin()) return it->second;
    if (it == traj.end()) return traj.back().second;
    const auto& a = *(it - 1);
    const auto& b = *it;
    if (b.first == a.first) return a.second;
    return a.second + (b.second - a.second) * (t - a.first) / (b.first - a.first);
  };

  std::vector<std::pair<long, Vec3>> positions;
  const long iStart = std::max(0L, row_of(traj.front().first));
  const long iEnd = std::min(nt - 1, row_of(traj.back().first));
  for (long i = iStart; i <= iEnd; ++i) {
    const auto ui = static_cast<std::size_t>(i);
    const long jc = col_of(s_on_trajectory(L.t(ui)));
    long jBest = -1;
    double vBest = std::numeric_limits<double>::infinity();
    for (long j = std::max(1L, jc - 3); j <= std::min(ns - 2, jc + 3); ++j) {
      const double v = grid.combination_sq(ui, static_cast<std::size_t>(j));
      if (v < vBest) {
        vBest = v;
        jBest = j;
      }
    }
    if (jBest < 0) continue;
    const auto uj = static_cast<std::size_t>(jBest);
    const double fm = grid.combination_sq(ui, uj - 1);
    const double f0 = grid.combination_sq(ui, uj);
    const double fp = grid.combination_sq(ui, uj + 1);
    const double curv = fm - 2.0 * f0 + fp;
    double off = curv > 0.0 ? 0.5 * (fm - fp) / curv : 0.0;
    off = std::clamp(off, -0.5, 0.5);
    const Vec3 x0 = spatial(grid.X(ui, uj));
    const Vec3 x1 = spatial(grid.X(ui, off >= 0.0 ? uj + 1 : uj - 1));
    positions.emplace_back(i, x0 + std::abs(off) * (x1 - x0));
  }
  double sum = 0.0;
  int n = 0;
  for (std::size_t k = 1; k + 1 < positions.size(); ++k) {
    if (positions[k + 1].first - positions[k - 1].first != 2) continue;
    sum += (positions[k + 1].second - positions[k - 1].second).norm() / (grid.kappa * 2.0 * h);
    ++n;
  }
  if (n == 0) throw std::invalid_argument("cusp_speed: trajectory spans fewer than three lattice rows");
  return sum / n;
}

PlanarRegion planarity_report(const TransportSolution& tPlus, const TransportSolution& tMinus,
                              const LatticeSpec& lattice, double plusMin, double plusMax, double minusMin,
                              double minusMax, double tol) {
  const double h = lattice.step;
  PlanarRegion r;
  r.plusMin = std::max({plusMin, lattice.plus_min() * h, tPlus.grid_start()});
  r.plusMax = std::min({plusMax, lattice.plus_max() * h, tPlus.grid_end()});
  r.minusMin = std::max({minusMin, lattice.minus_min() * h, tMinus.grid_start()});
  r.minusMax = std::min({minusMax, lattice.minus_max() * h, tMinus.grid_end()});

  std::vector<Vec3> rows;
  const auto collect = [&](const TransportSolution& ts, double lo, double hi) {
    const long k0 = static_cast<long>(std::ceil(lo / ts.step() - 1e-9));
    const long k1 = static_cast<long>(std::floor(hi / ts.step() + 1e-9));
    for (long k = k0; k <= k1; ++k) rows.push_back(null_vector(ts.at_index(k), ts.chirality()).spatial());
  };
  collect(tPlus, r.plusMin, r.plusMax);
  collect(tMinus, r.minusMin, r.minusMax);
  r.directions = rows.size();
  if (rows.empty()) throw std::invalid_argument("planarity_report: empty region");

  Eigen::MatrixX3d m(static_cast<Eigen::Index>(rows.size()), 3);
  for (std::size_t k = 0; k < rows.size(); ++k) m.row(static_cast<Eigen::Index>(k)) = rows[k].transpose();
  const Eigen::Vector3d sv = Eigen::JacobiSVD<Eigen::MatrixX3d>(m).singularValues() /
                             std::sqrt(static_cast<double>(rows.size()));
  const double cut = std::max(tol, 1e-12);
  for (int k = 0; k < 3; ++k) {
    r.singularValues[k] = k < sv.size() ? sv(k) : 0.0;
    if (r.singularValues[k] > cut) ++r.rank;
  }
  r.planar = r.rank <= 2;
  return r;
}

std::vector<PlanarRegion> detect_planar_region(const TransportSolution& tPlus, const TransportSolution& tMinus,
                                               const WorldSheetGrid& grid, double tol) {
  const LatticeSpec& L = grid.lattice;
  const auto real_runs = [](const TransportSolution& ts, long k0, long k1) {
    std::vector<std::pair<double, double>> runs;
    long start = -1;
    bool open = false;
    for (long k = k0; k <= k1 + 1; ++k) {
      const bool real = k <= k1 && ts.profile()(ts.xi(k)).imag() == 0.0;
      if (real && !open) {
        start = k;
        open = true;
      } else if (!real && open) {
        if (k - 1 > start) runs.emplace_back(ts.xi(start), ts.xi(k - 1));
        open = false;
      }
    }
    return runs;
  };
  const auto plusRuns = real_runs(tPlus, L.plus_min(), L.plus_max());
  const auto minusRuns = real_runs(tMinus, L.minus_min(), L.minus_max());
  std::vector<PlanarRegion> out;
  for (const auto& p : plusRuns) {
    for (const auto& m : minusRuns) {
      out.push_back(planarity_report(tPlus, tMinus, L, p.first, p.second, m.first, m.second, tol));
    }
  }
  return out;
}

}  // namespace cuspsheet
