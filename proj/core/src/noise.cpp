#include "qmotor/noise.hpp"

#include <fftw3.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <complex>
#include <cstring>
#include <fstream>
#include <limits>
#include <mutex>
#include <numbers>
#include <random>
#include <sstream>

#include "qmotor/errors.hpp"

namespace qmotor {

namespace {

// FFTW's planner is not thread safe; execution on distinct buffers is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

constexpr char kMagic[8] = {'Q', 'M', 'N', 'O', 'I', 'S', 'E', '1'};

bool power_of_two(std::size_t n) {
  return n > 0 && (n & (n - 1)) == 0;
}

template <class T>
void write_le(std::ostream& os, T v) {
  static_assert(std::endian::native == std::endian::little, "dump format assumes a little-endian host");
  os.write(reinterpret_cast<const char*>(&v), sizeof v);
}

template <class T>
T read_le(std::istream& is) {
  T v{};
  is.read(reinterpret_cast<char*>(&v), sizeof v);
  if (!is) throw ConfigError("noise dump: truncated file");
  return v;
}

}  // namespace

struct NoiseSynthesizer::Impl {
  fftw_complex* spec = nullptr;
  double* real = nullptr;
  fftw_plan plan = nullptr;
};

NoiseSynthesizer::NoiseSynthesizer(std::size_t n) : n_(n), impl_(std::make_unique<Impl>()) {
  if (!power_of_two(n) || n < 2) throw ConfigError("noise block length must be a power of two");
  impl_->spec = fftw_alloc_complex(n / 2 + 1);
  impl_->real = fftw_alloc_real(n);
  std::lock_guard lock(planner_mutex());
  impl_->plan = fftw_plan_dft_c2r_1d(static_cast<int>(n), impl_->spec, impl_->real, FFTW_ESTIMATE);
}

NoiseSynthesizer::~NoiseSynthesizer() {
  if (!impl_) return;
  {
    std::lock_guard lock(planner_mutex());
    if (impl_->plan) fftw_destroy_plan(impl_->plan);
  }
  fftw_free(impl_->spec);
  fftw_free(impl_->real);
}

void NoiseSynthesizer::generate(const BathSpec& spec, double dt, std::uint64_t seed, std::vector<double>& out) {
  const std::size_t n = n_;
  const std::size_t half = n / 2;
  const double block = static_cast<double>(n) * dt;
  const double dw = 2.0 * std::numbers::pi / block;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  fftw_complex* c = impl_->spec;
  for (std::size_t k = 0; k <= half; ++k) {
    const double s = symmetric_psd(spec, dw * static_cast<double>(k));
    if (k == 0 || k == half) {
      c[k][0] = std::sqrt(s / block) * gauss(rng);
      c[k][1] = 0.0;
    } else {
      const double a = std::sqrt(s / (2.0 * block));
      c[k][0] = a * gauss(rng);
      c[k][1] = a * gauss(rng);
    }
  }
  fftw_execute_dft_c2r(impl_->plan, c, impl_->real);
  out.assign(impl_->real, impl_->real + n);
}

double nyquist_ratio(const BathSpec& spec, std::size_t n, double dt) {
  const double dw = 2.0 * std::numbers::pi / (static_cast<double>(n) * dt);
  double peak = 0.0;
  // The PSD families are smooth; a coarse scan of the block frequencies suffices.
  const std::size_t half = n / 2;
  const std::size_t stride = std::max<std::size_t>(1, half / 4096);
  for (std::size_t k = 0; k <= half; k += stride) peak = std::max(peak, symmetric_psd(spec, dw * k));
  const double nyq = symmetric_psd(spec, std::numbers::pi / dt);
  peak = std::max(peak, nyq);
  return peak > 0.0 ? nyq / peak : 0.0;
}

void check_sampling(const BathSpec& spec, std::size_t n, double dt, std::vector<std::string>* warnings) {
  spec.validate();
  if (!power_of_two(n) || n < 1024) throw ConfigError("noise block length must be a power of two >= 1024");
  if (!(dt > 0.0) || !std::isfinite(dt)) throw ConfigError("noise time step must be positive");
  if (spec.cutoff.family == CutoffFamily::Ohmic) return;
  const double r = nyquist_ratio(spec, n, dt);
  if (r > 0.1) {
    std::ostringstream os;
    os << "time step " << dt << " leaves " << r << " of the peak noise power at the Nyquist frequency";
    throw ConfigError(os.str());
  }
  if (r > 1e-3 && warnings) {
    std::ostringstream os;
    os << "noise PSD at Nyquist is " << r << " of its peak; consider a smaller time step";
    warnings->push_back(os.str());
  }
}

NoiseTrack synthesize(const BathSpec& spec, std::size_t n, double dt, std::uint64_t seed) {
  check_sampling(spec, n, dt);
  NoiseTrack t;
  t.dt = dt;
  t.seed = seed;
  t.spec = spec;
  NoiseSynthesizer syn(n);
  syn.generate(spec, dt, seed, t.samples);
  return t;
}

std::vector<double> periodogram_check(const NoiseTrack& track, std::size_t bins) {
  return periodogram_check(track, track.spec, bins);
}

std::vector<double> periodogram_check(const NoiseTrack& track, const BathSpec& target, std::size_t bins) {
  const std::size_t n = track.samples.size();
  if (bins < 8) throw ConfigError("periodogram_check: need at least 8 bins");
  if (!power_of_two(n) || n / 2 - 1 < bins) throw ConfigError("periodogram_check: track too short for bin count");
  double* in = fftw_alloc_real(n);
  fftw_complex* out = fftw_alloc_complex(n / 2 + 1);
  fftw_plan plan;
  {
    std::lock_guard lock(planner_mutex());
    plan = fftw_plan_dft_r2c_1d(static_cast<int>(n), in, out, FFTW_ESTIMATE);
  }
  std::memcpy(in, track.samples.data(), n * sizeof(double));
  fftw_execute(plan);

  const double dt = track.dt;
  const double dw = 2.0 * std::numbers::pi / (static_cast<double>(n) * dt);
  const std::size_t modes = n / 2 - 1;
  std::vector<double> dev(bins);
  for (std::size_t b = 0; b < bins; ++b) {
    const std::size_t lo = 1 + b * modes / bins;
    const std::size_t hi = 1 + (b + 1) * modes / bins;
    double est = 0.0, ref = 0.0;
    for (std::size_t k = lo; k < hi; ++k) {
      est += (out[k][0] * out[k][0] + out[k][1] * out[k][1]) * dt / static_cast<double>(n);
      ref += symmetric_psd(target, dw * static_cast<double>(k));
    }
    dev[b] = (ref > 0.0) ? est / ref - 1.0 : (est > 0.0 ? std::numeric_limits<double>::infinity() : 0.0);
  }
  {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(plan);
  }
  fftw_free(in);
  fftw_free(out);
  return dev;
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t trajectory, std::uint64_t particle) {
  return splitmix64(master ^ splitmix64(2 * trajectory + particle + 1));
}

std::uint64_t bath_fingerprint(const BathSpec& spec) {
  std::uint64_t h = 0x6a09e667f3bcc908ULL;
  h = hash_double(h, spec.eta0);
  h = hash_combine(h, static_cast<std::uint64_t>(spec.cutoff.family));
  h = hash_double(h, spec.cutoff.lambda);
  h = hash_double(h, spec.temperature);
  return hash_double(h, spec.hbar);
}

void dump_track(const NoiseTrack& track, const std::filesystem::path& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw ConfigError("cannot write noise dump " + path.string());
  os.write(kMagic, sizeof kMagic);
  write_le<std::uint64_t>(os, track.samples.size());
  write_le<double>(os, track.dt);
  write_le<std::uint64_t>(os, track.seed);
  write_le<std::uint64_t>(os, bath_fingerprint(track.spec));
  for (double x : track.samples) write_le<double>(os, x);
}

NoiseTrack read_track(const std::filesystem::path& path, std::uint64_t* spec_fingerprint) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw ConfigError("cannot read noise dump " + path.string());
  char magic[8];
  is.read(magic, sizeof magic);
  if (!is || std::memcmp(magic, kMagic, sizeof magic) != 0) throw ConfigError("noise dump: bad magic");
  NoiseTrack t;
  const auto n = read_le<std::uint64_t>(is);
  t.dt = read_le<double>(is);
  t.seed = read_le<std::uint64_t>(is);
  const auto fp = read_le<std::uint64_t>(is);
  if (spec_fingerprint) *spec_fingerprint = fp;
  t.samples.resize(n);
  for (auto& x : t.samples) x = read_le<double>(is);
  return t;
}

}  // namespace qmotor
