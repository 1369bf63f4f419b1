#pragma once

// Stationary real Gaussian noise with a prescribed two-sided power spectrum S
// (<xi(t) xi(0)> = int dw/2pi S(w) e^{-iwt}), synthesized on a periodic block.
//
// For n samples with step dt the block frequencies are w_k = 2 pi k / (n dt).
// Coefficients A_k are independent complex Gaussians with E|A_k|^2 = S(w_k)/(n dt)
// (real at k = 0 and k = n/2), Hermitian symmetry is implied, and
// x_j = sum_k A_k e^{2 pi i jk/n} is one unnormalized inverse real FFT.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include "qmotor/bath.hpp"

namespace qmotor {

struct NoiseTrack {
  double dt = 0.0;
  std::uint64_t seed = 0;
  BathSpec spec;
  std::vector<double> samples;
};

/// Reusable FFT buffers for one block length; cheap to keep per thread.
class NoiseSynthesizer {
 public:
  explicit NoiseSynthesizer(std::size_t n);
  ~NoiseSynthesizer();
  NoiseSynthesizer(const NoiseSynthesizer&) = delete;
  NoiseSynthesizer& operator=(const NoiseSynthesizer&) = delete;

  std::size_t size() const { return n_; }
  /// Fill `out` (resized to n) with one realization.
  void generate(const BathSpec& spec, double dt, std::uint64_t seed, std::vector<double>& out);

 private:
  struct Impl;
  std::size_t n_;
  std::unique_ptr<Impl> impl_;
};

/// PSD at the Nyquist frequency pi/dt relative to the block maximum. Zero for
/// an identically vanishing spectrum.
double nyquist_ratio(const BathSpec& spec, std::size_t n, double dt);

/// Throws ConfigError unless n is a power of two >= 2^10 and dt > 0. For
/// cutoff families, a Nyquist ratio above 0.1 is an error and above 1e-3
/// adds a warning to `warnings` (when given). Ohmic spectra are not band
/// limited and are exempt.
void check_sampling(const BathSpec& spec, std::size_t n, double dt, std::vector<std::string>* warnings = nullptr);

NoiseTrack synthesize(const BathSpec& spec, std::size_t n, double dt, std::uint64_t seed);

/// Binned periodogram over the positive block frequencies divided by the
/// binned target PSD, minus one. Bins split k = 1 .. n/2-1 into equal counts.
std::vector<double> periodogram_check(const NoiseTrack& track, std::size_t bins);
/// Same against an arbitrary target spectrum.
std::vector<double> periodogram_check(const NoiseTrack& track, const BathSpec& target, std::size_t bins);

/// Seed for (trajectory, particle) from a master seed:
/// splitmix64(master XOR splitmix64(2 * trajectory + particle + 1)).
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t trajectory, std::uint64_t particle);
std::uint64_t splitmix64(std::uint64_t x);

/// Raw dump: magic "QMNOISE1", u64 n, f64 dt, u64 seed, u64 spec fingerprint,
/// then n little-endian f64 samples.
void dump_track(const NoiseTrack& track, const std::filesystem::path& path);
/// Reads the samples and header fields back; `spec` is not recoverable and is
/// left default-constructed.
NoiseTrack read_track(const std::filesystem::path& path, std::uint64_t* spec_fingerprint = nullptr);

std::uint64_t bath_fingerprint(const BathSpec& spec);

}  // namespace qmotor
