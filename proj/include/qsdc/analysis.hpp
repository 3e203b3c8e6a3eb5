// analysis.hpp
// Closed-form security analysis for the two protocols: detection
// probabilities, the eavesdropper's probe density matrix and its spectrum,
// information gain via Von Neumann entropy, detection-for-information root
// solving, and the eavesdropping success probability.
//
// Throughout, d denotes the per-check detection probability and the
// intensities a = |alpha|^2, t = |n|^2 parameterize the attack; for the
// probe spectrum d is identified with |beta|^2, so |alpha|^2 |beta|^2 =
// d - d^2.
#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "qsdc/state_vector.hpp"

namespace qsdc {

enum class Protocol { Dpp, Fpp };

inline std::string to_string(Protocol p) {
  return p == Protocol::Dpp ? "dpp" : "fpp";
}

namespace analysis {

namespace detail {

inline void require_unit_interval(double x, const char* who) {
  if (!(x >= 0.0 && x <= 1.0)) {
    throw std::domain_error(std::string(who) + ": argument outside [0,1]");
  }
}

inline double xlog2x(double x) { return x > 0.0 ? x * std::log2(x) : 0.0; }

}  // namespace detail

/// H(x) = -x log2 x - (1-x) log2 (1-x), with 0 log 0 = 0.
inline double binary_entropy(double x) {
  detail::require_unit_interval(x, "binary_entropy");
  return -detail::xlog2x(x) - detail::xlog2x(1.0 - x);
}

/// Probability that one GHZ decoy group passes the Z-basis check under an
/// attack of intensities (a, t): (a^3 + t^3) / 2.
inline double no_detection_prob_fpp(double a, double t) {
  detail::require_unit_interval(a, "no_detection_prob_fpp");
  detail::require_unit_interval(t, "no_detection_prob_fpp");
  return 0.5 * (a * a * a + t * t * t);
}

/// Per-decoy detection probability in FPP: 1 - (a^3 + t^3) / 2.
inline double detect_prob_fpp(double a, double t) {
  return 1.0 - no_detection_prob_fpp(a, t);
}

/// Per-check detection probability in DPP: |beta|^2 itself.
inline double detect_prob_dpp(double beta_sq) {
  detail::require_unit_interval(beta_sq, "detect_prob_dpp");
  return beta_sq;
}

/// Probabilities of the four dense-coding operations.
struct EncodingDistribution {
  double p0 = 0.25;
  double p1 = 0.25;
  double p2 = 0.25;
  double p3 = 0.25;

  static EncodingDistribution uniform() { return {}; }

  bool valid(double tol = 1e-12) const {
    for (double p : {p0, p1, p2, p3}) {
      if (!(p >= -tol && p <= 1.0 + tol)) return false;
    }
    return std::abs(p0 + p1 + p2 + p3 - 1.0) <= tol;
  }
};

/// Small dense Hermitian matrix, row-major complex entries.
class DensityMatrix {
 public:
  explicit DensityMatrix(int dim)
      : dim_(dim), entries_(static_cast<std::size_t>(dim) * dim) {
    if (dim < 1) throw std::invalid_argument("DensityMatrix: dim must be >= 1");
  }

  int dim() const { return dim_; }
  Amplitude& at(int r, int c) { return entries_[static_cast<std::size_t>(r) * dim_ + c]; }
  const Amplitude& at(int r, int c) const {
    return entries_[static_cast<std::size_t>(r) * dim_ + c];
  }

  Amplitude trace() const {
    Amplitude tr{};
    for (int i = 0; i < dim_; ++i) tr += at(i, i);
    return tr;
  }

  double hermiticity_defect() const {
    double worst = 0.0;
    for (int r = 0; r < dim_; ++r) {
      for (int c = 0; c < dim_; ++c) {
        worst = std::max(worst, std::abs(at(r, c) - std::conj(at(c, r))));
      }
    }
    return worst;
  }

  bool is_hermitian(double tol = 1e-12) const { return hermiticity_defect() <= tol; }

 private:
  int dim_;
  std::vector<Amplitude> entries_;
};

/// The eavesdropper's probe state after encoding, as a 4x4 block matrix in
/// the orthogonal basis {|0,e00>, |1,e01>, |1,e00>, |0,e01>}. The
/// off-diagonal coefficient alpha conj(beta) is taken real nonnegative,
/// sqrt(alpha_sq (1 - alpha_sq)); the spectrum depends only on its modulus.
inline DensityMatrix probe_density_matrix(const EncodingDistribution& dist,
                                          double alpha_sq) {
  detail::require_unit_interval(alpha_sq, "probe_density_matrix");
  if (!dist.valid()) {
    throw std::domain_error("probe_density_matrix: invalid distribution");
  }
  const double a = alpha_sq;
  const double b = 1.0 - alpha_sq;
  const double ab = std::sqrt(std::max(a * b, 0.0));
  DensityMatrix rho(4);
  rho.at(0, 0) = (dist.p0 + dist.p3) * a;
  rho.at(0, 1) = (dist.p0 - dist.p3) * ab;
  rho.at(1, 0) = (dist.p0 - dist.p3) * ab;
  rho.at(1, 1) = (dist.p0 + dist.p3) * b;
  rho.at(2, 2) = (dist.p1 + dist.p2) * a;
  rho.at(2, 3) = (dist.p1 - dist.p2) * ab;
  rho.at(3, 2) = (dist.p1 - dist.p2) * ab;
  rho.at(3, 3) = (dist.p1 + dist.p2) * b;
  return rho;
}

/// Closed-form spectrum of the probe matrix with d = |beta|^2:
///   lambda_{0,1} = (p0+p3)/2 +- sqrt((p0+p3)^2 - 16 p0 p3 (d-d^2)) / 2
/// and the analogous pair for (p1, p2).
inline std::array<double, 4> probe_eigenvalues_closed(
    const EncodingDistribution& dist, double d) {
  detail::require_unit_interval(d, "probe_eigenvalues_closed");
  if (!dist.valid()) {
    throw std::domain_error("probe_eigenvalues_closed: invalid distribution");
  }
  const double dd = d - d * d;
  auto pair_eigs = [dd](double p, double q) {
    const double h = p + q;
    double radicand = h * h - 16.0 * p * q * dd;
    if (radicand < -1e-12) {
      throw std::domain_error("probe_eigenvalues_closed: negative radicand");
    }
    const double root = std::sqrt(std::max(radicand, 0.0));
    return std::array<double, 2>{0.5 * (h + root), 0.5 * (h - root)};
  };
  const auto first = pair_eigs(dist.p0, dist.p3);
  const auto second = pair_eigs(dist.p1, dist.p2);
  return {first[0], first[1], second[0], second[1]};
}

/// Eigenvalues of a Hermitian matrix by numerical diagonalization,
/// ascending. Independent route against the closed form above.
inline std::vector<double> numerical_eigenvalues(const DensityMatrix& rho) {
  Eigen::MatrixXcd m(rho.dim(), rho.dim());
  for (int r = 0; r < rho.dim(); ++r) {
    for (int c = 0; c < rho.dim(); ++c) m(r, c) = rho.at(r, c);
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(m,
                                                         Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) {
    throw std::runtime_error("numerical_eigenvalues: eigensolver failed");
  }
  std::vector<double> out(rho.dim());
  for (int i = 0; i < rho.dim(); ++i) out[i] = solver.eigenvalues()[i];
  return out;
}

/// Von Neumann entropy sum(-lambda log2 lambda) in bits. Eigenvalues in
/// [-1e-10, 0) are clamped to 0; the set must sum to 1 within 1e-9.
inline double von_neumann_info(std::span<const double> eigenvalues) {
  double sum = 0.0;
  double info = 0.0;
  for (double lam : eigenvalues) {
    if (lam < -1e-10) {
      throw std::domain_error("von_neumann_info: negative eigenvalue");
    }
    lam = std::max(lam, 0.0);
    sum += lam;
    info -= detail::xlog2x(lam);
  }
  if (std::abs(sum - 1.0) > 1e-9) {
    throw std::domain_error("von_neumann_info: eigenvalues do not sum to 1");
  }
  return info;
}

inline double von_neumann_info(const std::array<double, 4>& eigenvalues) {
  return von_neumann_info(std::span<const double>(eigenvalues));
}

/// Maximal information (bits per pair) the eavesdropper can gain in DPP at
/// detection probability d: 1 + H(d).
inline double info_gain_dpp(double d) {
  detail::require_unit_interval(d, "info_gain_dpp");
  return 1.0 + binary_entropy(d);
}

/// FPP counterpart on the a = t slice: 1 + H(cbrt(1 - d)).
inline double info_gain_fpp(double d) {
  detail::require_unit_interval(d, "info_gain_fpp");
  return 1.0 + binary_entropy(std::cbrt(1.0 - d));
}

/// Reference curve of the original ping-pong scheme: H(d).
inline double ping_pong_info(double d) {
  detail::require_unit_interval(d, "ping_pong_info");
  return binary_entropy(d);
}

/// Inverts the information-gain curve on its increasing branch by
/// bisection: the unique d with info_gain(d) = target_info, absolute
/// tolerance 1e-9. DPP branch d in [0, 0.5], FPP branch d in [0, 0.875].
inline double solve_detection_for_info(double target_info, Protocol protocol) {
  if (!(target_info > 1.0 && target_info <= 2.0)) {
    throw std::domain_error(
        "solve_detection_for_info: target outside achievable range (1, 2]");
  }
  const bool dpp = protocol == Protocol::Dpp;
  auto gain = [dpp](double d) {
    return dpp ? info_gain_dpp(d) : info_gain_fpp(d);
  };
  double lo = 0.0;
  double hi = dpp ? 0.5 : 0.875;
  const double hi_gain = gain(hi);
  if (target_info > hi_gain + 1e-12) {
    throw std::domain_error("solve_detection_for_info: target exceeds maximum");
  }
  // At the curve maximum the gain is flat to machine precision; the branch
  // endpoint is the root itself.
  if (target_info >= hi_gain) return hi;
  for (int iter = 0; iter < 200 && hi - lo > 1e-9; ++iter) {
    const double mid = 0.5 * (lo + hi);
    (gain(mid) < target_info ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

/// Probability that the eavesdropper survives until one message transfer:
/// (1-c) sum_k [c (1-d)]^k = (1-c) / (1 - c(1-d)).
inline double eavesdrop_success(double c, double d) {
  if (!(c >= 0.0 && c < 1.0)) {
    throw std::domain_error("eavesdrop_success: c outside [0,1)");
  }
  detail::require_unit_interval(d, "eavesdrop_success");
  return (1.0 - c) / (1.0 - c * (1.0 - d));
}

/// Probability of eavesdropping `info` bits without ever being detected:
/// eavesdrop_success(c, d) ^ (info / info_gain_fpp(d)).
inline double eavesdrop_success_info(double info, double c, double d) {
  if (info < 0.0) {
    throw std::domain_error("eavesdrop_success_info: info must be >= 0");
  }
  const double s = eavesdrop_success(c, d);
  if (info == 0.0 || s >= 1.0) return 1.0;
  return std::pow(s, info / info_gain_fpp(d));
}

/// A plotted curve family as plain columns of numbers.
struct CurveTable {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};

/// Detection-vs-information comparison: columns (d, info_dpp, info_fpp)
/// over a uniform d grid on [0, 1].
inline CurveTable detection_info_table(int points) {
  if (points < 2) throw std::invalid_argument("detection_info_table: points < 2");
  CurveTable table;
  table.columns = {"d", "info_dpp", "info_fpp"};
  table.rows.reserve(points);
  for (int i = 0; i < points; ++i) {
    const double d = static_cast<double>(i) / (points - 1);
    table.rows.push_back({d, info_gain_dpp(d), info_gain_fpp(d)});
  }
  return table;
}

/// Success probability vs target information, one column per requested
/// detection level d, info on a uniform grid [0, info_max].
inline CurveTable success_probability_table(int points, double info_max,
                                            double control_prob,
                                            std::span<const double> d_levels) {
  if (points < 2) {
    throw std::invalid_argument("success_probability_table: points < 2");
  }
  if (info_max <= 0.0) {
    throw std::invalid_argument("success_probability_table: info_max <= 0");
  }
  CurveTable table;
  table.columns.push_back("info");
  for (double d : d_levels) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "s_d%g", d);
    table.columns.push_back(buf);
  }
  table.rows.reserve(points);
  for (int i = 0; i < points; ++i) {
    const double info = info_max * static_cast<double>(i) / (points - 1);
    std::vector<double> row{info};
    for (double d : d_levels) {
      row.push_back(eavesdrop_success_info(info, control_prob, d));
    }
    table.rows.push_back(std::move(row));
  }
  return table;
}

}  // namespace analysis
}  // namespace qsdc
