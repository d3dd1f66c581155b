#pragma once

#include <functional>
#include <iosfwd>
#include <span>
#include <vector>

#include "speclines/dynamics.hpp"
#include "speclines/numerics.hpp"
#include "speclines/random.hpp"

namespace speclines {

/// sum_j M_j cos(2 pi f_j k).
struct MultiSine {
  std::vector<double> frequencies;  // cycles/step, in (0, 0.5]
  std::vector<double> amplitudes;

  void validate() const;
  [[nodiscard]] double sample(Index k) const;
  /// 1 x T row of samples at steps offset .. offset + T - 1.
  [[nodiscard]] RealMatrix signal(Index T, Index offset = 0) const;
};

double multisine_sample(const MultiSine& ms, Index k);

/// Rescales all amplitudes by one common factor so that
/// sum_{k<T} u_k^2 == T * E0^2. Throws DegenerateSignal for a zero-energy signal.
MultiSine normalize_energy(const MultiSine& ms, double E0, Index T);

/// i.i.d. N(0, std^2) input.
struct WhiteNoiseInput {
  double std = 1.0;
  RngSpec rng;

  [[nodiscard]] RealMatrix signal(Index T) const;
};

/// Maximal-length shift-register sequence mapped to +-amplitude.
class PrbsInput {
 public:
  /// `bits` in [2, 16]; the sequence period is 2^bits - 1.
  PrbsInput(double amplitude, int bits, std::uint32_t seed = 1);

  [[nodiscard]] RealMatrix signal(Index T) const;
  [[nodiscard]] Index period() const { return (Index{1} << bits_) - 1; }

 private:
  double amplitude_;
  int bits_;
  std::uint32_t seed_;
};

struct SpectralLineEstimate {
  double frequency = 0.0;
  ComplexVector amplitude;
  Index start = 0;
  Index span = 0;  // S: the window is [start, start + S]
  double empirical_deviation = 0.0;
};

/// (1/(S+1)) sum_{k=i}^{i+S} seq_k exp(-j 2 pi omega0 k), phase referenced to
/// absolute k. omega0 * (S+1) must be an integer unless allow_leakage is set.
SpectralLineEstimate estimate_spectral_line(const RealMatrix& sequence, double omega0, Index start,
                                            Index span, bool allow_leakage = false);

/// True when omega * length is an integer (to 1e-9).
bool on_grid(double omega, Index length);

/// [(e^{j 2 pi w} I - A)^{-1} B u; u]. Throws ResonantFrequency when the
/// resolvent is singular.
ComplexVector transfer_amplitude(const LinearSystem& system, double omega0,
                                 const ComplexVector& u_amp);

struct InformationMatrix {
  std::vector<double> frequencies;
  ComplexMatrix matrix;  // column j is the regressor amplitude at frequencies[j]
  double sigma_min = 0.0;
};

InformationMatrix information_matrix(const LinearSystem& system,
                                     std::span<const double> frequencies,
                                     std::span<const ComplexVector> u_amps);

/// Each cosine M cos(2 pi f k) contributes lines at +f and -f with input
/// amplitude M/2; the first n + m of them form the matrix.
InformationMatrix information_matrix(const LinearSystem& system, const MultiSine& input);

struct ExcitationReport {
  double lambda_min = 0.0;
  double lambda_max = 0.0;
  Index start = 0;
  Index span = 0;
  double rho1 = 0.0;
  double rho2 = 0.0;
  bool verdict = false;
};

/// Eigen-extremes of sum_k phi_k phi_k^T over the given columns.
ExcitationReport finite_excitation_check(const RealMatrix& phis, Index start = 0);

/// sigma_min(Phi)^2 / (2 n).
double pe_lower_bound(const InformationMatrix& info, Index n);

/// First-order smoother y_k = (1 - lambda) y_{k-1} + lambda u_k, unit DC gain.
class ActuatorFilter {
 public:
  explicit ActuatorFilter(double smoothing);

  std::vector<double> apply(std::span<const double> input);
  void reset() { state_ = 0.0; }
  [[nodiscard]] double smoothing() const { return smoothing_; }
  /// lambda / (1 - (1 - lambda) e^{-j 2 pi f}).
  [[nodiscard]] Complex frequency_response(double f) const;

 private:
  double smoothing_;
  double state_ = 0.0;
};

std::vector<double> actuator_filter(ActuatorFilter& filter, std::span<const double> input);

/// Produces one realization (rows = components, cols = time) from a stream.
using SignalSource = std::function<RealMatrix(const RngSpec&)>;

/// Sample standard deviation of sqrt(S+1) * (line estimate - mean estimate)
/// over `reps` realizations, real and imaginary parts pooled. Window [0, S].
double empirical_radius(const SignalSource& source, double omega0, Index span, Index reps,
                        const RngSpec& rng, int workers = 1);

/// Columns k, u (one row per step; first row of a 1 x T signal).
void write_signal_csv(std::ostream& out, const RealMatrix& signal);

/// Columns freq, re_amp_1..d, im_amp_1..d, radius.
void write_spectral_csv(std::ostream& out, std::span<const SpectralLineEstimate> lines,
                        std::span<const double> radii);

}  // namespace speclines
