#include "qsync/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <Eigen/Sparse>

#include "qsync/linalg.hpp"
#include "qsync/log.hpp"

namespace qsync {
namespace {

using SparseC = Eigen::SparseMatrix<Complex, Eigen::RowMajor>;
// Row-major storage makes sparse-times-dense products contiguous row axpys.
using WorkMatrix = Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

SparseC to_sparse(const CMatrix& m) { return m.sparseView(Complex(0.0), 0.0); }

// Sparse form of the generator used inside the integrator:
// rho' = (-i H_eff rho) + (-i H_eff rho)^dag + sum_j rate_j L_j rho L_j^dag,
// with H_eff = H - (i/2) sum_j rate_j L_j^dag L_j.
class CompiledGenerator {
 public:
  explicit CompiledGenerator(const LindbladGenerator& gen) {
    CMatrix h_eff = gen.hamiltonian.matrix();
    for (const auto& j : gen.jumps) {
      if (j.rate < 0.0) throw InvalidArgument("negative jump rate");
      if (j.rate == 0.0) continue;
      const CMatrix& l = j.op.matrix();
      h_eff -= 0.5 * kI * j.rate * (l.adjoint() * l);
      jumps_.push_back({to_sparse(l), to_sparse(l.adjoint()), j.rate});
    }
    h_eff_ = to_sparse(h_eff);
  }

  void apply(const WorkMatrix& rho, WorkMatrix& out) const {
    tmp_.noalias() = h_eff_ * rho;
    tmp_ *= -kI;
    out = tmp_ + tmp_.adjoint();
    for (const auto& j : jumps_) {
      jump_tmp_.noalias() = j.l * rho;
      out.noalias() += j.rate * (jump_tmp_ * j.l_dag);
    }
  }

 private:
  struct Jump {
    SparseC l;
    SparseC l_dag;
    Real rate;
  };
  SparseC h_eff_;
  std::vector<Jump> jumps_;
  mutable WorkMatrix tmp_;
  mutable WorkMatrix jump_tmp_;
};

// Dormand-Prince 5(4) tableau.
constexpr Real c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr Real a21 = 1.0 / 5;
constexpr Real a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr Real a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr Real a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
constexpr Real a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
               a65 = -5103.0 / 18656;
constexpr Real b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784, b6 = 11.0 / 84;
constexpr Real e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200, e6 = 22.0 / 525,
               e7 = -1.0 / 40;

Real scaled_error(const WorkMatrix& err, const WorkMatrix& y0, const WorkMatrix& y1, const SolverOptions& opts) {
  Real worst = 0.0;
  const Complex* e = err.data();
  const Complex* a = y0.data();
  const Complex* b = y1.data();
  for (Index i = 0; i < err.size(); ++i) {
    const Real scale = opts.abs_tol + opts.rel_tol * std::sqrt(std::max(std::norm(a[i]), std::norm(b[i])));
    worst = std::max(worst, std::norm(e[i]) / (scale * scale));
  }
  return std::sqrt(worst);
}

Real fast_hermiticity_error(const WorkMatrix& m) {
  Real worst = 0.0;
  for (Index i = 0; i < m.rows(); ++i)
    for (Index j = i; j < m.cols(); ++j) worst = std::max(worst, std::norm(m(i, j) - std::conj(m(j, i))));
  return std::sqrt(worst);
}

Complex trace_product(const WorkMatrix& rho, const WorkMatrix& op_transposed) {
  return rho.cwiseProduct(op_transposed).sum();
}

}  // namespace

StateDiagnostics diagnose(const CMatrix& rho) {
  StateDiagnostics d;
  d.trace_error = std::abs(rho.trace() - Complex(1.0));
  d.hermiticity_error = hermiticity_error(rho);
  d.min_eigenvalue = min_hermitian_eigenvalue(rho);
  return d;
}

DensityState::DensityState(SpaceLayout layout, CMatrix matrix) : layout_(std::move(layout)), matrix_(std::move(matrix)) {
  if (matrix_.rows() != layout_.dimension() || matrix_.cols() != layout_.dimension())
    throw ShapeError("density matrix does not match layout dimension");
  diagnostics_ = diagnose(matrix_);
}

DensityState DensityState::pure(SpaceLayout layout, const CVector& psi) {
  const CVector unit = psi.normalized();
  return {std::move(layout), unit * unit.adjoint()};
}

bool DensityState::is_physical(Real tol) const {
  return diagnostics_.trace_error <= tol && diagnostics_.hermiticity_error <= tol && diagnostics_.min_eigenvalue >= -tol;
}

DensityState prepare_state(const SpaceLayout& layout, const InitialState& init) {
  std::vector<Index> osc_slots;
  for (std::size_t s = 0; s < layout.size(); ++s)
    if (layout[s].kind == SubsystemKind::oscillator) osc_slots.push_back(static_cast<Index>(s));
  const std::size_t n_osc = osc_slots.size();

  if (init.kind == InitialState::Kind::coherent && init.alphas.size() != n_osc)
    throw ShapeError("one coherent amplitude per oscillator required");
  if (init.kind == InitialState::Kind::fock && init.levels.size() != n_osc)
    throw ShapeError("one Fock level per oscillator required");

  CVector psi = CVector::Ones(1);
  std::size_t osc = 0;
  for (std::size_t s = 0; s < layout.size(); ++s) {
    const Index dim = layout[s].dim;
    CVector local = CVector::Zero(dim);
    if (layout[s].kind == SubsystemKind::tls) {
      local(init.tls == TlsLevel::plus ? 0 : 1) = 1.0;
    } else if (init.kind == InitialState::Kind::fock) {
      const Index n = init.levels[osc++];
      if (n < 0 || n >= dim)
        throw InvalidDimension("Fock level " + std::to_string(n) + " exceeds truncation n_max=" +
                               std::to_string(dim - 1));
      local(n) = 1.0;
    } else {
      const Complex alpha = init.alphas[osc++];
      if (displacement_truncation_risk(dim, alpha)) {
        std::ostringstream os;
        os << "coherent amplitude " << alpha << " is close to the truncation edge (n_max=" << dim - 1 << ")";
        warn(os.str());
      }
      const Index work_dim = dim + 30;
      const CMatrix d = displacement(work_dim, alpha).matrix();
      local = d.col(0).head(dim);
      local.normalize();
    }
    CVector next(psi.size() * dim);
    for (Index i = 0; i < psi.size(); ++i) next.segment(i * dim, dim) = psi(i) * local;
    psi = std::move(next);
  }
  return DensityState::pure(layout, psi);
}

std::size_t Trajectory::key_index(const std::string& key) const {
  const auto it = std::find(keys.begin(), keys.end(), key);
  if (it == keys.end()) throw InvalidArgument("unknown observable key '" + key + "'");
  return static_cast<std::size_t>(it - keys.begin());
}

bool Trajectory::has_key(const std::string& key) const {
  return std::find(keys.begin(), keys.end(), key) != keys.end();
}

CVector Trajectory::series(const std::string& key) const {
  const std::size_t k = key_index(key);
  CVector out(static_cast<Index>(records.size()));
  for (std::size_t i = 0; i < records.size(); ++i) out(static_cast<Index>(i)) = records[i][k];
  return out;
}

RVector Trajectory::real_series(const std::string& key) const { return series(key).real(); }

Real Trajectory::observable_error_bound(const std::string& key) const {
  return stats.error_estimate * observable_scales.at(key_index(key));
}

std::vector<Real> linspace(Real start, Real stop, std::size_t n) {
  std::vector<Real> out(n);
  if (n == 1) {
    out[0] = start;
    return out;
  }
  const Real step = (stop - start) / static_cast<Real>(n - 1);
  for (std::size_t i = 0; i < n; ++i) out[i] = start + step * static_cast<Real>(i);
  out.back() = stop;
  return out;
}

Trajectory evolve(const LindbladGenerator& generator, const DensityState& rho0, std::span<const Real> t_grid,
                  std::span<const NamedObservable> observables, const SolverOptions& opts) {
  if (t_grid.empty() || t_grid.front() != 0.0) throw InvalidArgument("time grid must start at 0");
  for (std::size_t i = 1; i < t_grid.size(); ++i)
    if (!(t_grid[i] > t_grid[i - 1])) throw InvalidArgument("time grid must be strictly increasing");
  if (!(rho0.layout() == generator.hamiltonian.layout())) throw ShapeError("state and generator layouts differ");
  if (!rho0.is_physical(1e-10)) throw InvalidArgument("initial state is not a valid density matrix");
  if (!(opts.rel_tol > 0.0) || !(opts.abs_tol > 0.0)) throw InvalidArgument("solver tolerances must be positive");

  const CompiledGenerator rhs(generator);

  Trajectory traj;
  std::vector<WorkMatrix> op_t;
  for (const auto& o : observables) {
    if (!(o.op.layout() == rho0.layout())) throw ShapeError("observable '" + o.name + "' has a different layout");
    traj.keys.push_back(o.name);
    traj.observable_scales.push_back(max_abs(o.op.matrix()));
    op_t.push_back(o.op.matrix().transpose());
  }

  auto record = [&](Real t, const WorkMatrix& rho) {
    std::vector<Complex> row(op_t.size());
    for (std::size_t k = 0; k < op_t.size(); ++k) row[k] = trace_product(rho, op_t[k]);
    traj.times.push_back(t);
    traj.records.push_back(std::move(row));
    if (opts.store_states) traj.states.emplace_back(rho);
  };

  SolverStats& stats = traj.stats;
  stats.min_eigenvalue = rho0.diagnostics().min_eigenvalue;

  auto check = [&](Real t, const WorkMatrix& rho, bool positivity) {
    const Real tr = std::abs(rho.trace() - Complex(1.0));
    const Real herm = fast_hermiticity_error(rho);
    stats.max_trace_error = std::max(stats.max_trace_error, tr);
    stats.max_hermiticity_error = std::max(stats.max_hermiticity_error, herm);
    std::ostringstream os;
    if (tr > opts.trace_limit) os << "trace error " << tr << " exceeds limit at t=" << t;
    if (positivity) {
      ++stats.positivity_checks;
      const Real ev = min_hermitian_eigenvalue(CMatrix(rho));
      stats.min_eigenvalue = std::min(stats.min_eigenvalue, ev);
      if (ev < -opts.eigenvalue_limit && os.str().empty()) os << "negative eigenvalue " << ev << " at t=" << t;
    }
    if (!os.str().empty()) throw PhysicalityViolation(os.str(), t, traj);
  };

  WorkMatrix y = rho0.matrix();
  record(0.0, y);

  const Index n = y.rows();
  WorkMatrix k1(n, n), k2(n, n), k3(n, n), k4(n, n), k5(n, n), k6(n, n), k7(n, n), ytmp(n, n), ynew(n, n), err(n, n);
  rhs.apply(y, k1);
  ++stats.rhs_evaluations;

  // Initial step from the size of the derivative.
  Real h;
  {
    const Real d0 = max_abs(y), d1 = max_abs(k1);
    h = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
    if (opts.max_step > 0.0) h = std::min(h, opts.max_step);
  }

  Real t = 0.0;
  long since_check = 0;
  for (std::size_t gi = 1; gi < t_grid.size(); ++gi) {
    const Real target = t_grid[gi];
    while (t < target) {
      if (stats.accepted_steps + stats.rejected_steps >= opts.max_steps)
        throw Error("step budget exhausted at t=" + std::to_string(t));
      Real h_natural = h;
      bool clamped = false;
      if (t + h >= target || target - (t + h) < 1e-12 * std::max(1.0, target)) {
        h = target - t;
        clamped = true;
      }

      ytmp = y + h * (a21 * k1);
      rhs.apply(ytmp, k2);
      ytmp = y + h * (a31 * k1 + a32 * k2);
      rhs.apply(ytmp, k3);
      ytmp = y + h * (a41 * k1 + a42 * k2 + a43 * k3);
      rhs.apply(ytmp, k4);
      ytmp = y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4);
      rhs.apply(ytmp, k5);
      ytmp = y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5);
      rhs.apply(ytmp, k6);
      ynew = y + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
      rhs.apply(ynew, k7);
      stats.rhs_evaluations += 6;
      err = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);

      const Real e = scaled_error(err, y, ynew, opts);
      const Real factor = e == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(e, -0.2), 0.2, 5.0);
      if (e <= 1.0) {
        t = clamped ? target : t + h;
        y.swap(ynew);
        k1.swap(k7);
        ++stats.accepted_steps;
        stats.error_estimate += err.cwiseAbs().sum();
        const bool positivity = opts.positivity_check_stride > 0 && ++since_check >= opts.positivity_check_stride;
        if (positivity) since_check = 0;
        check(t, y, positivity);
        h *= factor;
        if (clamped) h = std::max(h, h_natural);
      } else {
        ++stats.rejected_steps;
        h *= std::max(factor, 0.1);
      }
      if (opts.max_step > 0.0) h = std::min(h, opts.max_step);
      if (h < 1e-14 * std::max(1.0, t)) throw Error("step size underflow at t=" + std::to_string(t));
    }
    record(target, y);
  }
  check(t, y, true);
  traj.final_state.emplace(rho0.layout(), CMatrix(y));
  return traj;
}

}  // namespace qsync
