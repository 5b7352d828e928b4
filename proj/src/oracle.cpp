#include "qtherm/oracle.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>
#include <string>

#include "qtherm/errors.hpp"

namespace qtherm::oracle {

namespace {

// Thermal weight p(n) = occ^n / (occ+1)^(n+1); p(0) = 1 for the vacuum.
double thermal_weight(int n, double occ) {
  if (occ <= 0.0) return n == 0 ? 1.0 : 0.0;
  return std::exp(n * std::log(occ) - (n + 1) * std::log1p(occ));
}

// Generator of the two-mode rotation restricted to sector S:
// G = a+^dag a- - a-^dag a+, real antisymmetric, tridiagonal in the
// |S-j, j> basis.
Eigen::MatrixXd sector_generator(int sector) {
  Eigen::MatrixXd g = Eigen::MatrixXd::Zero(sector + 1, sector + 1);
  for (int j = 1; j <= sector; ++j) {
    // a+^dag a- : |S-j, j> -> sqrt((S-j+1) j) |S-j+1, j-1>
    double amp = std::sqrt(static_cast<double>(sector - j + 1) * j);
    g(j - 1, j) = amp;
    g(j, j - 1) = -amp;
  }
  return g;
}

}  // namespace

FockState::FockState(int dim, std::vector<Eigen::MatrixXd> blocks,
                     double tail_bound)
    : dim_(dim), blocks_(std::move(blocks)), tail_bound_(tail_bound) {}

double FockState::trace() const {
  double tr = 0.0;
  for (const auto& b : blocks_) tr += b.trace();
  return tr;
}

double FockState::number_diagonal(int n_plus, int n_minus) const {
  int sector = n_plus + n_minus;
  if (sector > sector_max()) return 0.0;
  return blocks_[sector](n_minus, n_minus);
}

double FockState::expect(
    const std::function<Eigen::MatrixXd(int)>& op_block) const {
  double acc = 0.0;
  for (int sector = 0; sector <= sector_max(); ++sector)
    acc += (blocks_[sector] * op_block(sector)).trace();
  return acc;
}

double FockState::cross_correlation() const {
  // <a+^dag a-> is real for this family: half the exchange expectation.
  return 0.5 * expect(sector_exchange);
}

Eigen::Matrix4d FockState::second_moments() const {
  double np = expect(sector_n_plus);
  double nm = expect(sector_n_minus);
  double cross = cross_correlation();
  Eigen::Matrix2d block;
  block << 2.0 * np + 1.0, 2.0 * cross, 2.0 * cross, 2.0 * nm + 1.0;
  Eigen::Matrix4d sigma = Eigen::Matrix4d::Zero();
  sigma.block<2, 2>(0, 0) = block;
  sigma.block<2, 2>(2, 2) = block;
  // Anomalous moments <a a> vanish identically: the state is sector-diagonal
  // and a a shifts the sector by two.
  return sigma;
}

FockState FockState::combine(
    const std::vector<std::pair<double, const FockState*>>& terms) {
  if (terms.empty()) throw UsageError("FockState::combine: empty combination");
  int sector_max = terms.front().second->sector_max();
  int dim = terms.front().second->dim();
  std::vector<Eigen::MatrixXd> blocks(sector_max + 1);
  for (int s = 0; s <= sector_max; ++s) {
    blocks[s] = Eigen::MatrixXd::Zero(s + 1, s + 1);
    for (const auto& [w, state] : terms) {
      if (state->sector_max() != sector_max)
        throw UsageError("FockState::combine: mismatched truncations");
      blocks[s] += w * state->block(s);
    }
  }
  return FockState(dim, std::move(blocks), 0.0);
}

Eigen::MatrixXd sector_n_plus(int sector) {
  Eigen::VectorXd diag(sector + 1);
  for (int j = 0; j <= sector; ++j) diag(j) = sector - j;
  return diag.asDiagonal();
}

Eigen::MatrixXd sector_n_minus(int sector) {
  Eigen::VectorXd diag(sector + 1);
  for (int j = 0; j <= sector; ++j) diag(j) = j;
  return diag.asDiagonal();
}

Eigen::MatrixXd sector_exchange(int sector) {
  Eigen::MatrixXd x = Eigen::MatrixXd::Zero(sector + 1, sector + 1);
  for (int j = 1; j <= sector; ++j) {
    double amp = std::sqrt(static_cast<double>(sector - j + 1) * j);
    x(j - 1, j) = amp;
    x(j, j - 1) = amp;
  }
  return x;
}

std::vector<Eigen::MatrixXd> quadratic_form_blocks(const Eigen::Matrix4d& phi,
                                                   double offset,
                                                   int sector_max) {
  // dA^dag Phi dA with zero displacement:
  //   sum_ij Phi(i,j) a_i^dag a_j + sum_ij Phi(2+i,2+j) a_i a_j^dag,
  // normal-ordered into Y(i,j) a_i^dag a_j + tr(Phi_lower) with
  // Y = Phi_upper + Phi_lower^T. Squeezing blocks must vanish for the states
  // handled here.
  Eigen::Matrix2d upper = phi.block<2, 2>(0, 0);
  Eigen::Matrix2d lower = phi.block<2, 2>(2, 2);
  double off_block_norm = phi.block<2, 2>(0, 2).norm() + phi.block<2, 2>(2, 0).norm();
  if (off_block_norm > 1e-9 * (1.0 + phi.norm()))
    throw UsageError("quadratic_form_blocks: unexpected squeezing terms");
  Eigen::Matrix2d y = upper + lower.transpose();
  double constant = lower.trace() + offset;
  std::vector<Eigen::MatrixXd> blocks(sector_max + 1);
  for (int s = 0; s <= sector_max; ++s) {
    blocks[s] = y(0, 0) * sector_n_plus(s) + y(1, 1) * sector_n_minus(s) +
                0.5 * (y(0, 1) + y(1, 0)) * sector_exchange(s) +
                constant * Eigen::MatrixXd::Identity(s + 1, s + 1);
  }
  return blocks;
}

FockState fock_density(const model::SourcePair& pair,
                       const model::DiffractionGeometry& geom, int dim,
                       bool check_tail) {
  if (dim < 2) throw UsageError("fock_density: dim must be at least 2");
  model::ImageState st = model::build_image_state(pair, geom);

  // Normal modes of V: two independent thermal occupancies and a rotation.
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(st.pmatrix);
  Eigen::Vector2d occ = es.eigenvalues().cwiseMax(0.0);
  Eigen::Matrix2d rot = es.eigenvectors();
  if (rot.determinant() < 0.0) rot.col(1) *= -1.0;
  double angle = std::atan2(rot(1, 0), rot(0, 0));

  double tail = std::pow(occ(0) / (occ(0) + 1.0), dim) +
                std::pow(occ(1) / (occ(1) + 1.0), dim);
  if (check_tail && tail > 1e-10) {
    double occ_max = std::max(occ(0), occ(1));
    int needed = static_cast<int>(
        std::ceil(std::log(0.5e-10) / std::log(occ_max / (occ_max + 1.0))));
    throw ConvergenceError("fock_density: truncation dim " + std::to_string(dim) +
                           " too small, need about " + std::to_string(needed));
  }

  int sector_max = 2 * (dim - 1);
  std::vector<Eigen::MatrixXd> blocks(sector_max + 1);
  for (int s = 0; s <= sector_max; ++s) {
    // Diagonal thermal weights of the normal modes over the whole sector.
    Eigen::VectorXd w(s + 1);
    for (int j = 0; j <= s; ++j)
      w(j) = thermal_weight(s - j, occ(0)) * thermal_weight(j, occ(1));
    // Beam-splitter unitary U = exp(-angle G) maps normal modes to (a+, a-).
    Eigen::MatrixXd u = (-angle * sector_generator(s)).exp();
    blocks[s] = u * w.asDiagonal() * u.transpose();
  }
  return FockState(dim, std::move(blocks), tail);
}

FockState fock_density_derivative(const model::SourcePair& pair,
                                  const model::DiffractionGeometry& geom,
                                  int dim, int which, double rel_step) {
  if (which != 1 && which != 2)
    throw UsageError("fock_density_derivative: which must be 1 or 2");
  double t0 = which == 1 ? pair.t1 : pair.t2;
  double h = rel_step * t0;
  auto at = [&](double t) {
    model::SourcePair p = pair;
    (which == 1 ? p.t1 : p.t2) = t;
    return fock_density(p, geom, dim, false);
  };
  FockState pph = at(t0 + h), pmh = at(t0 - h);
  FockState pph2 = at(t0 + 0.5 * h), pmh2 = at(t0 - 0.5 * h);
  double c1 = 1.0 / (2.0 * h), c2 = 1.0 / h;  // central differences
  // Richardson: (4 D(h/2) - D(h)) / 3.
  return FockState::combine({{-c1 / 3.0, &pph},
                             {c1 / 3.0, &pmh},
                             {4.0 * c2 / 3.0, &pph2},
                             {-4.0 * c2 / 3.0, &pmh2}});
}

SpectralQfi spectral_qfi(const FockState& rho, const FockState& drho1,
                         const FockState& drho2) {
  SpectralQfi out{0.0, 0.0, false};
  for (int s = 0; s <= rho.sector_max(); ++s) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(rho.block(s));
    const Eigen::VectorXd& p = es.eigenvalues();
    const Eigen::MatrixXd& v = es.eigenvectors();
    Eigen::MatrixXd d1 = v.transpose() * drho1.block(s) * v;
    Eigen::MatrixXd d2 = v.transpose() * drho2.block(s) * v;
    for (int a = 0; a <= s; ++a) {
      for (int b = 0; b <= s; ++b) {
        double denom = p(a) + p(b);
        if (denom < 1e-12) {
          out.discarded_weight += std::fabs(d1(a, b) * d2(b, a));
          continue;
        }
        out.value += 2.0 * d1(a, b) * d2(b, a) / denom;
      }
    }
  }
  out.warning = out.discarded_weight > 1e-8;
  return out;
}

std::vector<Eigen::MatrixXd> sld_blocks(const FockState& rho,
                                        const FockState& drho) {
  std::vector<Eigen::MatrixXd> blocks(rho.sector_max() + 1);
  for (int s = 0; s <= rho.sector_max(); ++s) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(rho.block(s));
    const Eigen::VectorXd& p = es.eigenvalues();
    const Eigen::MatrixXd& v = es.eigenvectors();
    Eigen::MatrixXd d = v.transpose() * drho.block(s) * v;
    Eigen::MatrixXd l = Eigen::MatrixXd::Zero(s + 1, s + 1);
    for (int a = 0; a <= s; ++a)
      for (int b = 0; b <= s; ++b) {
        double denom = p(a) + p(b);
        l(a, b) = denom < 1e-12 ? 0.0 : 2.0 * d(a, b) / denom;
      }
    blocks[s] = v * l * v.transpose();
  }
  return blocks;
}

double commutator_expectation(const FockState& rho,
                              const std::vector<Eigen::MatrixXd>& l1,
                              const std::vector<Eigen::MatrixXd>& l2) {
  double acc = 0.0;
  for (int s = 0; s <= rho.sector_max(); ++s) {
    Eigen::MatrixXd comm = l1[s] * l2[s] - l2[s] * l1[s];
    acc += (rho.block(s) * comm).trace();
  }
  return acc;
}

double quadrature_overlap(double d, double varpi) {
  if (!(varpi > 0.0))
    throw DomainError("quadrature_overlap: varpi must be positive");
  if (d == 0.0) return 1.0;
  if (!std::isfinite(d)) return 0.0;
  auto integrand = [&](double x) {
    double norm = std::sqrt(2.0 / (M_PI * varpi * varpi));
    double a = x + 0.5 * d, b = x - 0.5 * d;
    return norm * std::exp(-(a * a + b * b) / (varpi * varpi));
  };
  // Romberg on a window wide enough that the discarded mass is < 1e-16.
  double half = 9.0 * varpi;
  constexpr int kLevels = 22;
  double r[kLevels][kLevels];
  double h = 2.0 * half;
  r[0][0] = 0.5 * h * (integrand(-half) + integrand(half));
  for (int i = 1; i < kLevels; ++i) {
    h *= 0.5;
    double sum = 0.0;
    long pts = 1L << (i - 1);
    for (long k = 0; k < pts; ++k) sum += integrand(-half + (2 * k + 1) * h);
    r[i][0] = 0.5 * r[i - 1][0] + h * sum;
    double pow4 = 4.0;
    for (int j = 1; j <= i; ++j) {
      r[i][j] = r[i][j - 1] + (r[i][j - 1] - r[i - 1][j - 1]) / (pow4 - 1.0);
      pow4 *= 4.0;
    }
    if (i > 3 && std::fabs(r[i][i] - r[i - 1][i - 1]) < 1e-12) return r[i][i];
  }
  throw ConvergenceError("quadrature_overlap: Romberg did not converge");
}

FdResult fd_derivative(const std::function<double(double)>& f, double x,
                       double step) {
  if (!(step > 0.0)) throw DomainError("fd_derivative: step must be positive");
  auto central = [&](double h) { return (f(x + h) - f(x - h)) / (2.0 * h); };
  double d0 = central(step);
  double d1 = central(0.5 * step);
  double d2 = central(0.25 * step);
  double r1 = (4.0 * d1 - d0) / 3.0;
  double r2 = (4.0 * d2 - d1) / 3.0;
  double rr = (16.0 * r2 - r1) / 15.0;
  return {rr, std::fabs(rr - r2)};
}

}  // namespace qtherm::oracle
