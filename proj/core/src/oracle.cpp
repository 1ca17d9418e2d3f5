#include "mipt/oracle.hpp"

#include <cassert>
#include <cmath>
#include <stdexcept>

#include <Eigen/Eigenvalues>

#include "mipt/errors.hpp"

namespace mipt::oracle {

using cd = std::complex<double>;

DenseState DenseState::zero(std::size_t n_qubits) {
  if (n_qubits == 0 || n_qubits > max_qubits) throw ConfigError("DenseState: need 1..12 qubits");
  DenseState s;
  s.n_ = n_qubits;
  s.amp_.assign(std::size_t{1} << n_qubits, cd{0.0, 0.0});
  s.amp_[0] = 1.0;
  return s;
}

double DenseState::norm() const {
  double acc = 0.0;
  for (const auto& a : amp_) acc += std::norm(a);
  return std::sqrt(acc);
}

Eigen::Matrix4cd pauli_matrix(Pauli2 p) {
  auto single = [](bool x, bool z) {
    Eigen::Matrix2cd m;
    if (!x && !z) m << 1, 0, 0, 1;
    if (x && !z) m << 0, 1, 1, 0;
    if (!x && z) m << 1, 0, 0, -1;
    if (x && z) m << 0, cd(0, -1), cd(0, 1), 0;
    return m;
  };
  const Eigen::Matrix2cd p1 = single(p.bits & 1U, (p.bits >> 1) & 1U);
  const Eigen::Matrix2cd p2 = single((p.bits >> 2) & 1U, (p.bits >> 3) & 1U);
  Eigen::Matrix4cd m;
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b) m(a, b) = p1(a & 1, b & 1) * p2(a >> 1, b >> 1);
  return p.negative ? Eigen::Matrix4cd(-m) : m;
}

Eigen::Matrix4cd unitary_of(const CliffordGate2& g) {
  const auto& img = g.images();
  const Eigen::Matrix4cd proj = (Eigen::Matrix4cd::Identity() + pauli_matrix(img[CliffordGate2::Z1])) *
                                (Eigen::Matrix4cd::Identity() + pauli_matrix(img[CliffordGate2::Z2]));
  // U|00> spans the joint +1 eigenspace of the images of Z1 and Z2.
  Eigen::Vector4cd psi0 = Eigen::Vector4cd::Zero();
  for (int k = 0; k < 4; ++k) {
    psi0 = proj.col(k);
    if (psi0.norm() > 1e-6) break;
  }
  if (psi0.norm() <= 1e-6) throw std::logic_error("unitary_of: images of Z1, Z2 have no common +1 eigenvector");
  psi0.normalize();
  const Eigen::Matrix4cd x1 = pauli_matrix(img[CliffordGate2::X1]);
  const Eigen::Matrix4cd x2 = pauli_matrix(img[CliffordGate2::X2]);
  Eigen::Matrix4cd u;
  u.col(0) = psi0;
  u.col(1) = x1 * psi0;
  u.col(2) = x2 * psi0;
  u.col(3) = x1 * x2 * psi0;
  if (!(u.adjoint() * u).isIdentity(1e-9)) throw std::logic_error("unitary_of: reconstructed matrix is not unitary");
  return u;
}

void apply_unitary(DenseState& s, const Eigen::Matrix4cd& u, std::size_t i, std::size_t j) {
  const std::size_t n = s.n_qubits();
  if (i >= n || j >= n) throw std::out_of_range("apply_unitary: qubit out of range");
  if (i == j) throw std::invalid_argument("apply_unitary: qubits must differ");
  auto& a = s.amplitudes();
  const std::size_t bi = std::size_t{1} << i;
  const std::size_t bj = std::size_t{1} << j;
  for (std::size_t base = 0; base < a.size(); ++base) {
    if (base & (bi | bj)) continue;
    const std::size_t idx[4] = {base, base | bi, base | bj, base | bi | bj};
    Eigen::Vector4cd v(a[idx[0]], a[idx[1]], a[idx[2]], a[idx[3]]);
    const Eigen::Vector4cd w = u * v;
    for (int k = 0; k < 4; ++k) a[idx[k]] = w[k];
  }
}

void apply_gate_dense(DenseState& s, const CliffordGate2& g, std::size_t i, std::size_t j) {
  apply_unitary(s, unitary_of(g), i, j);
}

double entropy_dense(const DenseState& s, std::span<const std::size_t> subset) {
  const std::size_t n = s.n_qubits();
  std::vector<char> in(n, 0);
  for (std::size_t q : subset) {
    if (q >= n) throw std::out_of_range("entropy_dense: qubit out of range");
    in[q] = 1;
  }
  std::vector<std::size_t> keep;
  std::vector<std::size_t> rest;
  for (std::size_t q = 0; q < n; ++q) (in[q] ? keep : rest).push_back(q);
  if (keep.empty() || rest.empty()) return 0.0;
  if (keep.size() > rest.size()) std::swap(keep, rest);  // same spectrum, smaller matrix

  const std::size_t dk = std::size_t{1} << keep.size();
  const std::size_t dr = std::size_t{1} << rest.size();
  Eigen::MatrixXcd psi(dk, dr);
  const auto& a = s.amplitudes();
  for (std::size_t idx = 0; idx < a.size(); ++idx) {
    std::size_t r = 0;
    std::size_t c = 0;
    for (std::size_t k = 0; k < keep.size(); ++k) r |= ((idx >> keep[k]) & 1U) << k;
    for (std::size_t k = 0; k < rest.size(); ++k) c |= ((idx >> rest[k]) & 1U) << k;
    psi(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = a[idx];
  }
  const Eigen::MatrixXcd rho = psi * psi.adjoint();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(rho, Eigen::EigenvaluesOnly);
  double h = 0.0;
  for (Eigen::Index k = 0; k < eig.eigenvalues().size(); ++k) {
    const double lam = eig.eigenvalues()[k];
    if (lam > 1e-14) h -= lam * std::log2(lam);
  }
  return std::max(h, 0.0);
}

DenseMeasurement measure_z_dense(DenseState& s, std::size_t q, double u) {
  if (q >= s.n_qubits()) throw std::out_of_range("measure_z_dense: qubit out of range");
  auto& a = s.amplitudes();
  const std::size_t bq = std::size_t{1} << q;
  double p0 = 0.0;
  for (std::size_t idx = 0; idx < a.size(); ++idx)
    if (!(idx & bq)) p0 += std::norm(a[idx]);
  if (std::abs(p0 - 0.5) < 1e-9) p0 = 0.5;
  if (p0 < 1e-9) p0 = 0.0;
  if (p0 > 1.0 - 1e-9) p0 = 1.0;

  const bool outcome = !(u < p0);
  const double prob = outcome ? 1.0 - p0 : p0;
  if (prob <= 0.0) throw std::logic_error("measure_z_dense: selected a zero-probability branch");
  const double scale = 1.0 / std::sqrt(prob);
  for (std::size_t idx = 0; idx < a.size(); ++idx) {
    if (static_cast<bool>(idx & bq) == outcome)
      a[idx] *= scale;
    else
      a[idx] = 0.0;
  }
  return {outcome, p0};
}

std::vector<DenseMeasurement> replay_step(DenseState& s, const StepRecord& rec, const CliffordGroup2& group) {
  for (const auto& g : rec.gates) apply_gate_dense(s, group[g.gate_index], g.i, g.j);
  std::vector<DenseMeasurement> out;
  out.reserve(rec.measurements.size());
  for (const auto& m : rec.measurements) out.push_back(measure_z_dense(s, m.qubit, m.coin));
  return out;
}

}  // namespace mipt::oracle
