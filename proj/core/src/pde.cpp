#include "mf/pde.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "mf/velocity.hpp"

namespace mf {

namespace {

// Per-offset interaction table used when the orientation field is
// constant: the indicator and grad(phi) then depend only on the
// cell-offset vector, so the O(window) transcendentals per cell collapse
// to lookups. Summation window and order match velocity_from_density.
struct OffsetTable {
  std::array<int, 3> off_lo{0, 0, 0};
  std::array<int, 3> off_hi{0, 0, 0};
  std::array<int, 3> span{1, 1, 1};
  std::vector<char> ind;
  std::vector<Vec> grad;

  size_t flat(std::array<int, 3> o, int d) const {
    size_t f = static_cast<size_t>(o[d - 1] - off_lo[d - 1]);
    for (int a = d - 2; a >= 0; --a)
      f = f * static_cast<size_t>(span[a]) +
          static_cast<size_t>(o[a] - off_lo[a]);
    return f;
  }
};

OffsetTable build_offset_table(const GridDensity& rho,
                               const SensitivitySpec& sens,
                               const KernelSpec& kernel) {
  const int d = rho.dim();
  OffsetTable t;
  double r = sens.radius();
  size_t total = 1;
  for (int a = 0; a < d; ++a) {
    double h = rho.spacing(a);
    t.off_lo[a] = static_cast<int>(std::floor(0.5 - r / h)) - 1;
    t.off_hi[a] = static_cast<int>(std::ceil(0.5 + r / h)) + 1;
    t.span[a] = t.off_hi[a] - t.off_lo[a] + 1;
    total *= static_cast<size_t>(t.span[a]);
  }
  t.ind.resize(total, 0);
  t.grad.resize(total, Vec::zero(d));
  Vec w = sens.w_at(rho.cell_center(std::array<int, 3>{0, 0, 0}));
  std::array<int, 3> o{0, 0, 0};
  for (o[2] = t.off_lo[2]; o[2] <= (d > 2 ? t.off_hi[2] : 0); ++o[2])
    for (o[1] = t.off_lo[1]; o[1] <= (d > 1 ? t.off_hi[1] : 0); ++o[1])
      for (o[0] = t.off_lo[0]; o[0] <= t.off_hi[0]; ++o[0]) {
        Vec offset(d);  // y_c - x for cell offset o
        for (int a = 0; a < d; ++a) offset[a] = o[a] * rho.spacing(a);
        size_t f = t.flat(o, d);
        if (indicator(sens, w, offset)) {
          t.ind[f] = 1;
          t.grad[f] = kernel.grad(-offset);
        }
      }
  return t;
}

// Nonlocal velocity at every cell center. Uses the offset table when the
// orientation field is constant; otherwise falls back to the direct
// quadrature per cell.
std::vector<Vec> cell_velocities(const GridDensity& rho,
                                 const SensitivitySpec& sens,
                                 const KernelSpec& kernel) {
  const int d = rho.dim();
  std::vector<Vec> v(rho.size(), Vec::zero(d));
  if (kernel.kind() == KernelSpec::Kind::Zero) return v;
  // Offset-only dependence holds when K ignores w entirely (fixed ball)
  // or w(x) is constant.
  const bool offset_only =
      sens.kind() == SensitivitySpec::Kind::FixedBall ||
      sens.w_field().kind == OrientationField::Kind::Constant;
  if (offset_only) {
    OffsetTable t = build_offset_table(rho, sens, kernel);
    double vol = rho.cell_volume();
    std::array<int, 3> n{rho.cells(0), d > 1 ? rho.cells(1) : 1,
                         d > 2 ? rho.cells(2) : 1};
    for (size_t ci = 0; ci < rho.size(); ++ci) {
      std::array<int, 3> i = rho.multi_index(ci);
      Vec acc = Vec::zero(d);
      std::array<int, 3> j{0, 0, 0};
      std::array<int, 3> jlo{0, 0, 0}, jhi{0, 0, 0};
      for (int a = 0; a < d; ++a) {
        jlo[a] = std::max(0, i[a] + t.off_lo[a]);
        jhi[a] = std::min(n[a] - 1, i[a] + t.off_hi[a]);
      }
      for (j[2] = jlo[2]; j[2] <= (d > 2 ? jhi[2] : 0); ++j[2])
        for (j[1] = jlo[1]; j[1] <= (d > 1 ? jhi[1] : 0); ++j[1])
          for (j[0] = jlo[0]; j[0] <= jhi[0]; ++j[0]) {
            std::array<int, 3> o{j[0] - i[0], j[1] - i[1], j[2] - i[2]};
            size_t f = t.flat(o, d);
            if (!t.ind[f]) continue;
            double m = rho[rho.flat_index(j)] * vol;
            if (m != 0.0) acc += m * t.grad[f];
          }
      v[ci] = acc;
    }
  } else {
    for (size_t ci = 0; ci < rho.size(); ++ci)
      v[ci] = velocity_from_density(rho.cell_center(ci), rho, sens, kernel);
  }
  return v;
}

}  // namespace

void PdeConfig::validate() const {
  if (domain.kind() != DomainSpec::Kind::Box)
    throw std::invalid_argument("PdeConfig: domain must be a Box");
  const int d = domain.dim();
  for (int a = 0; a < d; ++a)
    if (cells[a] < 1)
      throw std::invalid_argument("PdeConfig: cells per axis must be >= 1");
  if (!(dt > 0.0)) throw std::invalid_argument("PdeConfig: dt must be > 0");
  if (!(T >= dt)) throw std::invalid_argument("PdeConfig: T must be >= dt");
  if (sigma < 0.0) throw std::invalid_argument("PdeConfig: sigma must be >= 0");
  if (initial.size() == 0 || initial.dim() != d)
    throw std::invalid_argument("PdeConfig: initial density missing/mismatched");
  for (int a = 0; a < d; ++a)
    if (initial.cells(a) != cells[a])
      throw std::invalid_argument("PdeConfig: initial density shape mismatch");
  for (double v : initial.values())
    if (v < 0.0)
      throw std::invalid_argument("PdeConfig: initial density must be >= 0");
  if (!(initial.mass() > 0.0))
    throw std::invalid_argument("PdeConfig: initial density must have mass > 0");
  for (double t : snapshot_times) {
    if (t < 0.0 || t > T * (1.0 + 1e-12))
      throw std::invalid_argument("PdeConfig: snapshot time outside [0, T]");
    double k = t / dt;
    if (std::abs(k - std::round(k)) > 1e-6)
      throw std::invalid_argument(
          "PdeConfig: snapshot times must be multiples of dt");
  }
  double h = initial.spacing(0);
  for (int a = 1; a < d; ++a) h = std::min(h, initial.spacing(a));
  double limit = std::numeric_limits<double>::infinity();
  double vmax = kernel.sup_norm() * initial.mass();
  if (vmax > 0.0) limit = std::min(limit, h / (2.0 * vmax));
  if (sigma > 0.0) limit = std::min(limit, h * h / (4.0 * d * sigma));
  if (dt > 0.4 * limit) {
    std::ostringstream os;
    os << "PdeConfig: CFL violated, dt=" << dt << " exceeds "
       << 0.4 * limit;
    throw std::invalid_argument(os.str());
  }
}

GridDensity step_fv(const GridDensity& rho, const PdeConfig& cfg) {
  const int d = rho.dim();
  std::vector<Vec> v = cell_velocities(rho, cfg.sensitivity, cfg.kernel);
  GridDensity out = rho;
  std::array<int, 3> n{rho.cells(0), d > 1 ? rho.cells(1) : 1,
                       d > 2 ? rho.cells(2) : 1};
  for (int axis = 0; axis < d; ++axis) {
    double h = rho.spacing(axis);
    std::array<int, 3> i{0, 0, 0};
    // interior faces between cells i and i+e_axis; boundary faces carry
    // zero total flux and are simply skipped
    for (i[2] = 0; i[2] < (d > 2 ? n[2] : 1); ++i[2])
      for (i[1] = 0; i[1] < (d > 1 ? n[1] : 1); ++i[1])
        for (i[0] = 0; i[0] < n[0]; ++i[0]) {
          if (i[axis] + 1 >= n[axis]) continue;
          std::array<int, 3> j = i;
          ++j[axis];
          size_t fi = rho.flat_index(i), fj = rho.flat_index(j);
          double u = 0.5 * (v[fi][axis] + v[fj][axis]);
          double adv = u > 0.0 ? u * rho[fi] : u * rho[fj];
          double diff = -cfg.sigma * (rho[fj] - rho[fi]) / h;
          double flux = adv + diff;  // per unit face area, +axis direction
          out[fi] -= cfg.dt / h * flux;
          out[fj] += cfg.dt / h * flux;
        }
  }
  out.set_time(rho.time() + cfg.dt);
  return out;
}

PdeResult solve(const PdeConfig& cfg) {
  cfg.validate();
  const uint64_t steps =
      static_cast<uint64_t>(std::llround(cfg.T / cfg.dt));
  std::vector<uint64_t> snap_steps;
  snap_steps.push_back(0);
  for (double t : cfg.snapshot_times)
    snap_steps.push_back(static_cast<uint64_t>(std::llround(t / cfg.dt)));
  snap_steps.push_back(steps);
  std::sort(snap_steps.begin(), snap_steps.end());
  snap_steps.erase(std::unique(snap_steps.begin(), snap_steps.end()),
                   snap_steps.end());

  GridDensity rho = cfg.initial;
  rho.set_time(0.0);
  PdeResult res;
  std::vector<GridDensity> snaps;
  size_t next = 0;
  for (uint64_t k = 0;; ++k) {
    res.max_sup = std::max(res.max_sup, rho.sup());
    if (next < snap_steps.size() && snap_steps[next] == k) {
      snaps.push_back(rho);
      ++next;
    }
    if (k == steps) break;
    rho = step_fv(rho, cfg);
  }
  res.provider = DensityProvider(std::move(snaps));
  return res;
}

double linf_envelope(double rho0_sup, double C, double t) {
  if (rho0_sup < 0.0 || C < 0.0 || t < 0.0)
    throw std::invalid_argument("linf_envelope: negative argument");
  double denom = 1.0 - C * rho0_sup * t;
  if (denom <= 0.0) {
    std::ostringstream os;
    os << "linf_envelope: t=" << t << " at or past blow-up time "
       << 1.0 / (C * rho0_sup);
    throw std::domain_error(os.str());
  }
  return rho0_sup / denom;
}

double gronwall_envelope_ii(double f0, double C,
                            const std::vector<double>& g_samples, double t) {
  if (g_samples.size() < 2)
    throw std::invalid_argument("gronwall_envelope_ii: need >= 2 samples");
  const size_t n = g_samples.size();
  double ds = t / static_cast<double>(n - 1);
  double integral = 0.0;
  for (size_t k = 0; k + 1 < n; ++k) {
    double s0 = ds * static_cast<double>(k);
    double s1 = ds * static_cast<double>(k + 1);
    integral += 0.5 * ds * (g_samples[k] * std::exp(-s0) +
                            g_samples[k + 1] * std::exp(-s1));
  }
  return f0 * std::exp(t) + C * std::exp(t) * integral;
}

}  // namespace mf
