#include "phaselim/fock.hpp"

#include "phaselim/numfmt.hpp"

#include <algorithm>
#include <cmath>
#include <utility>
#include <vector>

namespace phaselim::fock {

namespace {

constexpr double kStateDefectTol = 1e-8;

int flat(int n_a, int n_b, int dim) { return n_a * dim + n_b; }

struct SectorRange {
  int lo;
  int hi;
  int count() const { return hi - lo + 1; }
};

// Photon numbers of mode A present in the box for total photon number N.
SectorRange sector_box(int total, int n_max) {
  return {std::max(0, total - n_max), std::min(total, n_max)};
}

// Sector block of the beam splitter over total photon number N, generated from the
// block of sector N-1 by the exact ladder recurrences (see fock.hpp for the
// convention). `s` is +sqrt(1-T) for the forward transformation and -sqrt(1-T) for
// the adjoint. Rows/columns are indexed by the mode-A photon number offset by the
// box lower bound.
Eigen::MatrixXd next_sector_block(const Eigen::MatrixXd& prev, int total, int n_max,
                                  double sqrt_t, double s) {
  const SectorRange box = sector_box(total, n_max);
  const SectorRange prev_box = sector_box(total - 1, n_max);
  Eigen::MatrixXd cur(box.count(), box.count());
  for (int j = box.lo; j <= box.hi; ++j) {
    const int col = j - box.lo;
    if (j == 0) {
      // Reached via the mode-B raising relation.
      const double inv = 1.0 / std::sqrt(static_cast<double>(total));
      for (int p = box.lo; p <= box.hi; ++p) {
        double v = 0.0;
        if (p >= 1) v += s * std::sqrt(static_cast<double>(p)) * prev(p - 1 - prev_box.lo, 0);
        if (p <= total - 1)
          v += sqrt_t * std::sqrt(static_cast<double>(total - p)) * prev(p - prev_box.lo, 0);
        cur(p - box.lo, col) = v * inv;
      }
    } else {
      // Reached via the mode-A raising relation.
      const int pcol = j - 1 - prev_box.lo;
      const double inv = 1.0 / std::sqrt(static_cast<double>(j));
      for (int p = box.lo; p <= box.hi; ++p) {
        double v = 0.0;
        if (p >= 1) v += sqrt_t * std::sqrt(static_cast<double>(p)) * prev(p - 1 - prev_box.lo, pcol);
        if (p <= total - 1)
          v -= s * std::sqrt(static_cast<double>(total - p)) * prev(p - prev_box.lo, pcol);
        cur(p - box.lo, col) = v * inv;
      }
    }
  }
  return cur;
}

void check_transmittance(double transmittance) {
  if (!(transmittance >= 0.0 && transmittance <= 1.0))
    throw std::invalid_argument("beam splitter transmittance must lie in [0, 1]");
}

TwoModeState beam_splitter_impl(const TwoModeState& state, double transmittance, double s_sign) {
  check_transmittance(transmittance);
  const int n_max = state.cutoff.n_max;
  const int d = state.dim();
  const double overflow = sector_overflow_mass(state);
  if (overflow > state.cutoff.tail_tol)
    throw CutoffOverflow("beam splitter: mass " + detail::format_double(overflow) +
                         " on sectors crossing the cutoff exceeds tail_tol " +
                         detail::format_double(state.cutoff.tail_tol));

  const double sqrt_t = std::sqrt(transmittance);
  const double s = s_sign * std::sqrt(1.0 - transmittance);

  if (state.is_pure()) {
    const Eigen::MatrixXcd& amp = state.amp();
    Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(d, d);
    Eigen::MatrixXd prev(1, 1);
    prev(0, 0) = 1.0;
    out(0, 0) = amp(0, 0);
    for (int total = 1; total <= 2 * n_max; ++total) {
      Eigen::MatrixXd cur = next_sector_block(prev, total, n_max, sqrt_t, s);
      const SectorRange box = sector_box(total, n_max);
      Eigen::VectorXcd in(box.count());
      for (int j = box.lo; j <= box.hi; ++j) in(j - box.lo) = amp(j, total - j);
      Eigen::VectorXcd res = cur * in;
      for (int p = box.lo; p <= box.hi; ++p) out(p, total - p) = res(p - box.lo);
      prev = std::move(cur);
    }
    TwoModeState result = state;
    result.data = std::move(out);
    return result;
  }

  // Mixed: conjugate each pair of sector blocks, rho'_{IJ} = U_I rho_{IJ} U_J^T.
  std::vector<Eigen::MatrixXd> blocks(2 * n_max + 1);
  blocks[0] = Eigen::MatrixXd::Ones(1, 1);
  for (int total = 1; total <= 2 * n_max; ++total)
    blocks[total] = next_sector_block(blocks[total - 1], total, n_max, sqrt_t, s);

  const Eigen::MatrixXcd& rho = state.rho();
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(d * d, d * d);
  for (int ni = 0; ni <= 2 * n_max; ++ni) {
    const SectorRange bi = sector_box(ni, n_max);
    for (int nj = 0; nj <= 2 * n_max; ++nj) {
      const SectorRange bj = sector_box(nj, n_max);
      Eigen::MatrixXcd sub(bi.count(), bj.count());
      for (int p = bi.lo; p <= bi.hi; ++p)
        for (int q = bj.lo; q <= bj.hi; ++q)
          sub(p - bi.lo, q - bj.lo) = rho(flat(p, ni - p, d), flat(q, nj - q, d));
      Eigen::MatrixXcd res = blocks[ni] * sub * blocks[nj].transpose();
      for (int p = bi.lo; p <= bi.hi; ++p)
        for (int q = bj.lo; q <= bj.hi; ++q)
          out(flat(p, ni - p, d), flat(q, nj - q, d)) = res(p - bi.lo, q - bj.lo);
    }
  }
  TwoModeState result = state;
  result.data = std::move(out);
  return result;
}

// In-place K X where K = S (x) I_d (mode A) or I_d (x) S (mode B), exploiting that
// each column of X, viewed as a d x d matrix over (n_b, n_a), turns the Kronecker
// action into a plain matrix product.
void apply_kron_left(const Eigen::MatrixXd& s, Mode mode, int d, Eigen::MatrixXcd& x) {
  const Eigen::MatrixXcd sc = s.cast<Complex>();
  const Eigen::MatrixXcd sct = s.transpose().cast<Complex>();
  for (Eigen::Index c = 0; c < x.cols(); ++c) {
    Eigen::Map<Eigen::MatrixXcd> m(x.data() + c * x.rows(), d, d);
    if (mode == Mode::A)
      m = m * sct;
    else
      m = sc * m;
  }
}

double mode_shell_mass(const TwoModeState& state, Mode mode) {
  const Eigen::VectorXd dist = photon_distribution(state, mode);
  return dist(dist.size() - 1);
}

Eigen::VectorXcd flatten(const Eigen::MatrixXcd& amp) {
  const int d = static_cast<int>(amp.rows());
  Eigen::VectorXcd psi(d * d);
  for (int a = 0; a < d; ++a)
    for (int b = 0; b < d; ++b) psi(flat(a, b, d)) = amp(a, b);
  return psi;
}

// a_A amp and a_B amp on the amplitude tensor.
Eigen::MatrixXcd lower_a(const Eigen::MatrixXcd& amp) {
  const Eigen::Index d = amp.rows();
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(d, d);
  for (Eigen::Index n = 0; n + 1 < d; ++n)
    out.row(n) = std::sqrt(static_cast<double>(n + 1)) * amp.row(n + 1);
  return out;
}

Eigen::MatrixXcd lower_b(const Eigen::MatrixXcd& amp) {
  const Eigen::Index d = amp.cols();
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(d, d);
  for (Eigen::Index n = 0; n + 1 < d; ++n)
    out.col(n) = std::sqrt(static_cast<double>(n + 1)) * amp.col(n + 1);
  return out;
}

Complex dot(const Eigen::MatrixXcd& x, const Eigen::MatrixXcd& y) {
  return (x.conjugate().cwiseProduct(y)).sum();
}

}  // namespace

const Eigen::MatrixXcd& TwoModeState::amp() const {
  if (kind != Kind::Pure) throw std::invalid_argument("state is not pure");
  return data;
}

const Eigen::MatrixXcd& TwoModeState::rho() const {
  if (kind != Kind::Mixed) throw std::invalid_argument("state is not mixed");
  return data;
}

double TwoModeState::weight() const {
  return is_pure() ? data.squaredNorm() : data.trace().real();
}

TwoModeState TwoModeState::vacuum(const FockCutoff& cutoff) {
  Eigen::MatrixXcd amp = Eigen::MatrixXcd::Zero(cutoff.dim(), cutoff.dim());
  amp(0, 0) = 1.0;
  return pure(std::move(amp), cutoff);
}

TwoModeState TwoModeState::pure(Eigen::MatrixXcd amplitudes, const FockCutoff& cutoff) {
  if (amplitudes.rows() != cutoff.dim() || amplitudes.cols() != cutoff.dim())
    throw DimensionMismatch("amplitude tensor does not match the cutoff dimension");
  if (std::abs(amplitudes.squaredNorm() - 1.0) > kStateDefectTol)
    throw std::invalid_argument("pure state is not normalized");
  TwoModeState s;
  s.kind = Kind::Pure;
  s.data = std::move(amplitudes);
  s.cutoff = cutoff;
  return s;
}

TwoModeState TwoModeState::mixed(Eigen::MatrixXcd density, const FockCutoff& cutoff) {
  const int dd = cutoff.dim() * cutoff.dim();
  if (density.rows() != dd || density.cols() != dd)
    throw DimensionMismatch("density matrix does not match the cutoff dimension");
  if ((density - density.adjoint()).cwiseAbs().maxCoeff() > kStateDefectTol)
    throw std::invalid_argument("density matrix is not Hermitian");
  if (std::abs(density.trace().real() - 1.0) > kStateDefectTol)
    throw std::invalid_argument("density matrix trace is not 1");
  TwoModeState s;
  s.kind = Kind::Mixed;
  s.data = std::move(density);
  s.cutoff = cutoff;
  return s;
}

double tail_mass(const TwoModeState& state) {
  const int d = state.dim();
  double mass = 0.0;
  if (state.is_pure()) {
    const Eigen::MatrixXcd& amp = state.amp();
    mass += amp.row(d - 1).squaredNorm();
    mass += amp.col(d - 1).squaredNorm();
    mass -= std::norm(amp(d - 1, d - 1));
  } else {
    const Eigen::MatrixXcd& rho = state.rho();
    for (int b = 0; b < d; ++b) mass += rho(flat(d - 1, b, d), flat(d - 1, b, d)).real();
    for (int a = 0; a + 1 < d; ++a) mass += rho(flat(a, d - 1, d), flat(a, d - 1, d)).real();
  }
  return mass;
}

double sector_overflow_mass(const TwoModeState& state) {
  const int n_max = state.cutoff.n_max;
  const Eigen::VectorXd totals = total_photon_distribution(state);
  double mass = 0.0;
  for (int total = n_max + 1; total <= 2 * n_max; ++total) mass += totals(total);
  return mass;
}

TwoModeState apply_beam_splitter(const TwoModeState& state, double transmittance) {
  return beam_splitter_impl(state, transmittance, +1.0);
}

TwoModeState apply_beam_splitter_adjoint(const TwoModeState& state, double transmittance) {
  return beam_splitter_impl(state, transmittance, -1.0);
}

TwoModeState apply_phase(const TwoModeState& state, const Generator& g, double phi) {
  const int d = state.dim();
  TwoModeState result = state;
  if (state.is_pure()) {
    for (int a = 0; a < d; ++a)
      for (int b = 0; b < d; ++b)
        result.data(a, b) *= std::exp(Complex(0.0, g.value(a, b) * phi));
  } else {
    Eigen::VectorXd gv = diagonal_operator(g, state.cutoff);
    for (int i = 0; i < d * d; ++i)
      for (int j = 0; j < d * d; ++j)
        result.data(i, j) *= std::exp(Complex(0.0, (gv(i) - gv(j)) * phi));
  }
  return result;
}

Eigen::MatrixXd orthogonal_exp_tridiagonal(const Eigen::VectorXd& sub, double scale) {
  const int m = static_cast<int>(sub.size()) + 1;
  if (m == 1) return Eigen::MatrixXd::Ones(1, 1);
  // Diagonal-phase similarity maps the antisymmetric matrix to i * (real symmetric
  // tridiagonal with the same off-diagonal), so its spectral cosine/sine split gives
  // the exponential in purely real arithmetic.
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
  es.computeFromTridiagonal(Eigen::VectorXd::Zero(m), sub, Eigen::ComputeEigenvectors);
  const Eigen::MatrixXd& v = es.eigenvectors();
  const Eigen::VectorXd lam = es.eigenvalues() * scale;
  const Eigen::MatrixXd c = v * lam.array().cos().matrix().asDiagonal() * v.transpose();
  const Eigen::MatrixXd s = v * lam.array().sin().matrix().asDiagonal() * v.transpose();
  Eigen::MatrixXd out(m, m);
  for (int k = 0; k < m; ++k) {
    for (int l = 0; l < m; ++l) {
      switch (((l - k) % 4 + 4) % 4) {
        case 0: out(k, l) = c(k, l); break;
        case 1: out(k, l) = -s(k, l); break;
        case 2: out(k, l) = -c(k, l); break;
        default: out(k, l) = s(k, l); break;
      }
    }
  }
  return out;
}

Eigen::MatrixXd squeeze_matrix(double r, int dim) {
  Eigen::MatrixXd sq = Eigen::MatrixXd::Zero(dim, dim);
  // The quadratic generator couples only every other level: exponentiate the even and
  // odd chains separately.
  for (int parity = 0; parity < 2 && parity < dim; ++parity) {
    const int m = (dim - parity + 1) / 2;
    Eigen::VectorXd sub(std::max(m - 1, 0));
    for (int k = 0; k + 1 < m; ++k) {
      const int n = parity + 2 * k;
      sub(k) = -0.5 * std::sqrt(static_cast<double>(n + 1) * (n + 2));
    }
    const Eigen::MatrixXd chain = orthogonal_exp_tridiagonal(sub, r);
    for (int k = 0; k < m; ++k)
      for (int l = 0; l < m; ++l) sq(parity + 2 * k, parity + 2 * l) = chain(k, l);
  }
  return sq;
}

TwoModeState apply_single_mode_squeeze(const TwoModeState& state, double r, Mode mode) {
  const int d = state.dim();
  const Eigen::MatrixXd sq = squeeze_matrix(r, d);
  const double defect = (sq.transpose() * sq - Eigen::MatrixXd::Identity(d, d)).cwiseAbs().maxCoeff();
  if (defect > 1e-9)
    throw CutoffOverflow("squeeze matrix unitarity defect " + detail::format_double(defect));

  TwoModeState result = state;
  if (state.is_pure()) {
    if (mode == Mode::A)
      result.data = sq.cast<Complex>() * state.data;
    else
      result.data = state.data * sq.transpose().cast<Complex>();
  } else {
    Eigen::MatrixXcd tmp = state.data;
    apply_kron_left(sq, mode, d, tmp);
    Eigen::MatrixXcd tmp2 = tmp.adjoint();
    apply_kron_left(sq, mode, d, tmp2);
    result.data = tmp2.adjoint();
  }

  const double shell = mode_shell_mass(result, mode);
  if (shell > state.cutoff.tail_tol)
    throw CutoffOverflow("squeeze: boundary-shell mass " + detail::format_double(shell) +
                         " exceeds tail_tol " + detail::format_double(state.cutoff.tail_tol));
  return result;
}

Eigen::VectorXd diagonal_operator(const Generator& g, const FockCutoff& cutoff) {
  const int d = cutoff.dim();
  Eigen::VectorXd diag(d * d);
  for (int a = 0; a < d; ++a)
    for (int b = 0; b < d; ++b) diag(flat(a, b, d)) = g.value(a, b);
  return diag;
}

Eigen::VectorXd number_operator(Mode mode, const FockCutoff& cutoff) {
  const int d = cutoff.dim();
  Eigen::VectorXd diag(d * d);
  for (int a = 0; a < d; ++a)
    for (int b = 0; b < d; ++b) diag(flat(a, b, d)) = (mode == Mode::A) ? a : b;
  return diag;
}

double expectation(const TwoModeState& state, const Eigen::VectorXd& diagonal) {
  const int d = state.dim();
  if (diagonal.size() != d * d)
    throw DimensionMismatch("diagonal observable does not match the state dimension");
  double acc = 0.0;
  if (state.is_pure()) {
    const Eigen::MatrixXcd& amp = state.amp();
    for (int a = 0; a < d; ++a)
      for (int b = 0; b < d; ++b) acc += diagonal(flat(a, b, d)) * std::norm(amp(a, b));
  } else {
    const Eigen::MatrixXcd& rho = state.rho();
    for (int i = 0; i < d * d; ++i) acc += diagonal(i) * rho(i, i).real();
  }
  return acc;
}

Complex expectation(const TwoModeState& state, const Eigen::MatrixXcd& op) {
  const int d = state.dim();
  if (op.rows() != d * d || op.cols() != d * d)
    throw DimensionMismatch("observable does not match the state dimension");
  if (state.is_pure()) {
    const Eigen::VectorXcd psi = flatten(state.amp());
    return psi.dot(op * psi);
  }
  return state.rho().cwiseProduct(op.transpose()).sum();
}

double povm_prob_double_vacuum(const TwoModeState& state) {
  if (state.is_pure()) return std::norm(state.amp()(0, 0));
  return state.rho()(0, 0).real();
}

Eigen::VectorXd photon_distribution(const TwoModeState& state, Mode mode) {
  const int d = state.dim();
  Eigen::VectorXd dist = Eigen::VectorXd::Zero(d);
  if (state.is_pure()) {
    const Eigen::MatrixXcd& amp = state.amp();
    for (int a = 0; a < d; ++a)
      for (int b = 0; b < d; ++b) dist((mode == Mode::A) ? a : b) += std::norm(amp(a, b));
  } else {
    const Eigen::MatrixXcd& rho = state.rho();
    for (int a = 0; a < d; ++a)
      for (int b = 0; b < d; ++b)
        dist((mode == Mode::A) ? a : b) += rho(flat(a, b, d), flat(a, b, d)).real();
  }
  return dist;
}

Eigen::VectorXd total_photon_distribution(const TwoModeState& state) {
  const int d = state.dim();
  Eigen::VectorXd dist = Eigen::VectorXd::Zero(2 * d - 1);
  if (state.is_pure()) {
    const Eigen::MatrixXcd& amp = state.amp();
    for (int a = 0; a < d; ++a)
      for (int b = 0; b < d; ++b) dist(a + b) += std::norm(amp(a, b));
  } else {
    const Eigen::MatrixXcd& rho = state.rho();
    for (int a = 0; a < d; ++a)
      for (int b = 0; b < d; ++b) dist(a + b) += rho(flat(a, b, d), flat(a, b, d)).real();
  }
  return dist;
}

QuadratureMoments quadrature_moments(const TwoModeState& state) {
  if (!state.is_pure())
    throw std::invalid_argument("quadrature_moments supports pure states only");
  const Eigen::MatrixXcd& amp = state.amp();
  const Eigen::MatrixXcd pa = lower_a(amp);
  const Eigen::MatrixXcd pb = lower_b(amp);

  const Complex ma = dot(amp, pa);             // <a>
  const Complex mb = dot(amp, pb);             // <b>
  const double naa = pa.squaredNorm();         // <a^dag a>
  const double nbb = pb.squaredNorm();         // <b^dag b>
  const Complex aa = dot(amp, lower_a(pa));    // <a^2>
  const Complex bb = dot(amp, lower_b(pb));    // <b^2>
  const Complex ab = dot(amp, lower_b(pa));    // <a b>
  const Complex adb = dot(pa, pb);             // <a^dag b>

  QuadratureMoments qm;
  qm.mean << 2.0 * ma.real(), 2.0 * ma.imag(), 2.0 * mb.real(), 2.0 * mb.imag();

  Eigen::Matrix4d raw;
  raw(0, 0) = 2.0 * aa.real() + 2.0 * naa + 1.0;
  raw(1, 1) = -2.0 * aa.real() + 2.0 * naa + 1.0;
  raw(0, 1) = raw(1, 0) = 2.0 * aa.imag();
  raw(2, 2) = 2.0 * bb.real() + 2.0 * nbb + 1.0;
  raw(3, 3) = -2.0 * bb.real() + 2.0 * nbb + 1.0;
  raw(2, 3) = raw(3, 2) = 2.0 * bb.imag();
  raw(0, 2) = raw(2, 0) = 2.0 * ab.real() + 2.0 * adb.real();
  raw(0, 3) = raw(3, 0) = 2.0 * ab.imag() + 2.0 * adb.imag();
  raw(1, 2) = raw(2, 1) = 2.0 * ab.imag() - 2.0 * adb.imag();
  raw(1, 3) = raw(3, 1) = 2.0 * adb.real() - 2.0 * ab.real();

  qm.covariance = raw - qm.mean * qm.mean.transpose();
  return qm;
}

TwoModeState squeeze_probe_chain(double r, double transmittance, double phi_a,
                                 const FockCutoff& cutoff) {
  TwoModeState s = TwoModeState::vacuum(cutoff);
  s = apply_single_mode_squeeze(s, r, Mode::A);
  s = apply_beam_splitter(s, transmittance);
  s = apply_phase(s, Generator::one_arm(), -phi_a);
  s = apply_beam_splitter_adjoint(s, transmittance);
  s = apply_single_mode_squeeze(s, -r, Mode::A);
  return s;
}

TwoModeState squeeze_probe_chain_auto(double r, double transmittance, double phi_a,
                                      double tail_tol) {
  for (int n_max = 32; n_max <= 2048; n_max *= 2) {
    try {
      return squeeze_probe_chain(r, transmittance, phi_a, FockCutoff{n_max, tail_tol});
    } catch (const CutoffOverflow&) {
      continue;
    }
  }
  throw CutoffOverflow("squeeze_probe_chain_auto: no cutoff up to 2048 certified");
}

}  // namespace phaselim::fock
