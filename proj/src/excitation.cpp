#include "speclines/excitation.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <ostream>

#include <Eigen/Eigenvalues>

#include "speclines/csv.hpp"
#include "speclines/parallel.hpp"

namespace speclines {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
}

void MultiSine::validate() const {
  if (frequencies.size() != amplitudes.size()) {
    throw ConfigError("MultiSine: frequencies and amplitudes differ in length");
  }
  for (std::size_t j = 0; j < frequencies.size(); ++j) {
    const double f = frequencies[j];
    if (!(f > 0.0 && f <= 0.5)) throw ConfigError("MultiSine: frequencies must lie in (0, 0.5]");
    if (!std::isfinite(amplitudes[j])) throw ConfigError("MultiSine: amplitudes must be finite");
    for (std::size_t i = 0; i < j; ++i) {
      if (frequencies[i] == f) throw DuplicateFrequency("MultiSine: repeated frequency");
    }
  }
}

double MultiSine::sample(Index k) const {
  double u = 0.0;
  for (std::size_t j = 0; j < frequencies.size(); ++j) {
    u += amplitudes[j] * std::cos(kTwoPi * frequencies[j] * static_cast<double>(k));
  }
  return u;
}

RealMatrix MultiSine::signal(Index T, Index offset) const {
  RealMatrix out(1, T);
  for (Index k = 0; k < T; ++k) out(0, k) = sample(offset + k);
  return out;
}

double multisine_sample(const MultiSine& ms, Index k) { return ms.sample(k); }

MultiSine normalize_energy(const MultiSine& ms, double E0, Index T) {
  if (T < 1) throw ConfigError("normalize_energy: T must be >= 1");
  if (!(E0 >= 0.0)) throw ConfigError("normalize_energy: E0 must be >= 0");
  MultiSine out = ms;
  if (E0 == 0.0) {
    std::fill(out.amplitudes.begin(), out.amplitudes.end(), 0.0);
    return out;
  }
  const double energy = ms.signal(T).squaredNorm();
  if (!(energy > 0.0)) throw DegenerateSignal("normalize_energy: signal has zero energy");
  const double scale = std::sqrt(static_cast<double>(T) * E0 * E0 / energy);
  for (double& a : out.amplitudes) a *= scale;
  return out;
}

RealMatrix WhiteNoiseInput::signal(Index T) const {
  if (!(std >= 0.0)) throw ConfigError("WhiteNoiseInput: std must be >= 0");
  GaussianStream stream(rng);
  RealMatrix out(1, T);
  for (Index k = 0; k < T; ++k) out(0, k) = std * stream.next();
  return out;
}

namespace {
// Feedback taps (polynomial exponents) of maximal-length Fibonacci registers.
const std::array<std::vector<int>, 17> kPrbsTaps = {{
    {},
    {},
    {2, 1},
    {3, 2},
    {4, 3},
    {5, 3},
    {6, 5},
    {7, 6},
    {8, 6, 5, 4},
    {9, 5},
    {10, 7},
    {11, 9},
    {12, 11, 10, 4},
    {13, 12, 11, 8},
    {14, 13, 12, 2},
    {15, 14},
    {16, 15, 13, 4},
}};
}  // namespace

PrbsInput::PrbsInput(double amplitude, int bits, std::uint32_t seed)
    : amplitude_(amplitude), bits_(bits), seed_(seed) {
  if (bits < 2 || bits > 16) throw ConfigError("PrbsInput: bits must be in [2, 16]");
  if (!std::isfinite(amplitude)) throw ConfigError("PrbsInput: amplitude must be finite");
  const std::uint32_t mask = (1u << bits_) - 1u;
  seed_ &= mask;
  if (seed_ == 0) seed_ = 1;
}

RealMatrix PrbsInput::signal(Index T) const {
  RealMatrix out(1, T);
  std::uint32_t state = seed_;
  const auto& taps = kPrbsTaps[static_cast<std::size_t>(bits_)];
  for (Index k = 0; k < T; ++k) {
    out(0, k) = (state & 1u) ? amplitude_ : -amplitude_;
    std::uint32_t bit = 0;
    for (int tap : taps) bit ^= state >> (bits_ - tap);
    state = (state >> 1) | ((bit & 1u) << (bits_ - 1));
  }
  return out;
}

bool on_grid(double omega, Index length) {
  const double scaled = omega * static_cast<double>(length);
  return std::abs(scaled - std::round(scaled)) <= 1e-9;
}

SpectralLineEstimate estimate_spectral_line(const RealMatrix& sequence, double omega0, Index start,
                                            Index span, bool allow_leakage) {
  if (start < 0 || span < 0 || start + span >= sequence.cols()) {
    throw DimensionMismatch("estimate_spectral_line: window outside the sequence");
  }
  if (!allow_leakage && !on_grid(omega0, span + 1)) {
    throw FrequencyOffGrid("estimate_spectral_line: frequency is not a multiple of 1/(S+1)");
  }
  ComplexVector sum = ComplexVector::Zero(sequence.rows());
  for (Index k = start; k <= start + span; ++k) {
    const Complex phase = std::polar(1.0, -kTwoPi * omega0 * static_cast<double>(k));
    sum += sequence.col(k).cast<Complex>() * phase;
  }
  SpectralLineEstimate line;
  line.frequency = omega0;
  line.amplitude = sum / static_cast<double>(span + 1);
  line.start = start;
  line.span = span;
  return line;
}

ComplexVector transfer_amplitude(const LinearSystem& system, double omega0,
                                 const ComplexVector& u_amp) {
  system.validate();
  const Index n = system.state_dim(), m = system.input_dim();
  if (u_amp.size() != m) throw DimensionMismatch("transfer_amplitude: u_amp must have length m");
  ComplexMatrix resolvent = -system.A.cast<Complex>();
  resolvent.diagonal().array() += std::polar(1.0, kTwoPi * omega0);
  ComplexVector out(n + m);
  try {
    out.head(n) = complex_solve(resolvent, system.B.cast<Complex>() * u_amp);
  } catch (const SingularMatrix&) {
    throw ResonantFrequency("transfer_amplitude: e^{j 2 pi w} is an eigenvalue of A");
  }
  out.tail(m) = u_amp;
  return out;
}

namespace {
// Distance between two frequencies on the unit circle (cycles).
double circle_distance(double a, double b) {
  const double d = std::abs(a - b);
  return std::abs(d - std::round(d));
}
}  // namespace

InformationMatrix information_matrix(const LinearSystem& system,
                                     std::span<const double> frequencies,
                                     std::span<const ComplexVector> u_amps) {
  const Index d = system.state_dim() + system.input_dim();
  if (frequencies.size() != u_amps.size()) {
    throw DimensionMismatch("information_matrix: one amplitude per frequency required");
  }
  if (static_cast<Index>(frequencies.size()) != d) {
    throw DimensionMismatch("information_matrix: need exactly n + m frequencies");
  }
  for (std::size_t j = 0; j < frequencies.size(); ++j) {
    for (std::size_t i = 0; i < j; ++i) {
      if (circle_distance(frequencies[i], frequencies[j]) < 1e-12) {
        throw DuplicateFrequency("information_matrix: repeated frequency");
      }
    }
  }
  InformationMatrix info;
  info.frequencies.assign(frequencies.begin(), frequencies.end());
  info.matrix.resize(d, d);
  for (Index j = 0; j < d; ++j) {
    info.matrix.col(j) = transfer_amplitude(system, frequencies[j], u_amps[j]);
  }
  info.sigma_min = sigma_min(info.matrix);
  return info;
}

InformationMatrix information_matrix(const LinearSystem& system, const MultiSine& input) {
  input.validate();
  if (system.input_dim() != 1) {
    throw DimensionMismatch("information_matrix: multi-sine pairing needs a scalar input");
  }
  const auto d = static_cast<std::size_t>(system.state_dim() + system.input_dim());
  std::vector<double> freqs;
  std::vector<ComplexVector> amps;
  for (std::size_t j = 0; j < input.frequencies.size() && freqs.size() < d; ++j) {
    const ComplexVector half = ComplexVector::Constant(1, input.amplitudes[j] / 2.0);
    freqs.push_back(input.frequencies[j]);
    amps.push_back(half);
    if (freqs.size() < d) {
      freqs.push_back(-input.frequencies[j]);
      amps.push_back(half);
    }
  }
  if (freqs.size() < d) {
    throw DimensionMismatch("information_matrix: need at least ceil((n + m) / 2) cosines");
  }
  return information_matrix(system, freqs, amps);
}

ExcitationReport finite_excitation_check(const RealMatrix& phis, Index start) {
  if (phis.cols() == 0 || phis.rows() == 0) throw EmptyInput("finite_excitation_check: no data");
  const RealMatrix gram = phis * phis.transpose();
  Eigen::SelfAdjointEigenSolver<RealMatrix> eig(gram, Eigen::EigenvaluesOnly);
  ExcitationReport report;
  report.lambda_min = std::max(0.0, eig.eigenvalues()(0));
  report.lambda_max = std::max(report.lambda_min, eig.eigenvalues()(gram.rows() - 1));
  report.start = start;
  report.span = phis.cols() - 1;
  report.rho1 = report.lambda_min;
  report.rho2 = report.lambda_max;
  report.verdict = report.lambda_min > 1e-10;
  return report;
}

double pe_lower_bound(const InformationMatrix& info, Index n) {
  if (n < 1) throw DimensionMismatch("pe_lower_bound: n must be >= 1");
  return info.sigma_min * info.sigma_min / (2.0 * static_cast<double>(n));
}

ActuatorFilter::ActuatorFilter(double smoothing) : smoothing_(smoothing) {
  if (!(smoothing > 0.0 && smoothing <= 1.0)) {
    throw ConfigError("ActuatorFilter: smoothing must be in (0, 1]");
  }
}

std::vector<double> ActuatorFilter::apply(std::span<const double> input) {
  std::vector<double> out;
  out.reserve(input.size());
  for (double u : input) {
    state_ = (1.0 - smoothing_) * state_ + smoothing_ * u;
    out.push_back(state_);
  }
  return out;
}

Complex ActuatorFilter::frequency_response(double f) const {
  return smoothing_ / (1.0 - (1.0 - smoothing_) * std::polar(1.0, -kTwoPi * f));
}

std::vector<double> actuator_filter(ActuatorFilter& filter, std::span<const double> input) {
  return filter.apply(input);
}

double empirical_radius(const SignalSource& source, double omega0, Index span, Index reps,
                        const RngSpec& rng, int workers) {
  if (reps < 30) throw ConfigError("empirical_radius: reps must be >= 30");
  std::vector<ComplexVector> amps(static_cast<std::size_t>(reps));
  parallel_for(amps.size(), workers, [&](std::size_t r) {
    const RealMatrix realization = source(rng.derive(r));
    amps[r] = estimate_spectral_line(realization, omega0, 0, span).amplitude;
  });
  const Index dims = amps.front().size();
  ComplexVector mean = ComplexVector::Zero(dims);
  for (const auto& a : amps) {
    if (a.size() != dims) throw DimensionMismatch("empirical_radius: realizations differ in size");
    mean += a;
  }
  mean /= static_cast<double>(reps);
  const double scale = std::sqrt(static_cast<double>(span + 1));
  double sum_sq = 0.0;
  for (const auto& a : amps) {
    const ComplexVector dev = scale * (a - mean);
    sum_sq += dev.real().squaredNorm() + dev.imag().squaredNorm();
  }
  return std::sqrt(sum_sq / (2.0 * static_cast<double>(dims) * static_cast<double>(reps - 1)));
}

void write_signal_csv(std::ostream& out, const RealMatrix& signal) {
  csv::Table table({"k", "u"});
  for (Index k = 0; k < signal.cols(); ++k) table.add(static_cast<std::int64_t>(k), signal(0, k));
  table.write(out);
}

void write_spectral_csv(std::ostream& out, std::span<const SpectralLineEstimate> lines,
                        std::span<const double> radii) {
  if (lines.size() != radii.size()) {
    throw DimensionMismatch("write_spectral_csv: one radius per line required");
  }
  const Index d = lines.empty() ? 0 : lines.front().amplitude.size();
  std::vector<std::string> header{"freq"};
  for (Index i = 1; i <= d; ++i) header.push_back("re_amp_" + std::to_string(i));
  for (Index i = 1; i <= d; ++i) header.push_back("im_amp_" + std::to_string(i));
  header.push_back("radius");
  csv::Table table(header);
  for (std::size_t j = 0; j < lines.size(); ++j) {
    const auto& amp = lines[j].amplitude;
    if (amp.size() != d) throw DimensionMismatch("write_spectral_csv: amplitude sizes differ");
    std::vector<std::string> row{csv::format(lines[j].frequency)};
    for (Index i = 0; i < d; ++i) row.push_back(csv::format(amp(i).real()));
    for (Index i = 0; i < d; ++i) row.push_back(csv::format(amp(i).imag()));
    row.push_back(csv::format(radii[j]));
    table.add_row(std::move(row));
  }
  table.write(out);
}

}  // namespace speclines
