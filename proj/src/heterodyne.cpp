#include "gemtomo/heterodyne.hpp"

#include <gsl/gsl_randist.h>
#include <gsl/gsl_rng.h>

#include <cmath>
#include <memory>
#include <random>

#include "gemtomo/error.hpp"

namespace gemtomo {

namespace {

cdouble cis(double phase) { return {std::cos(phase), std::sin(phase)}; }

double pixel_coord(std::size_t i, std::size_t n, double pitch) {
    return (static_cast<double>(i) - static_cast<double>(n / 2)) * pitch;
}

} // namespace

void DetectorConfig::validate() const {
    require(n_px_x >= 1 && n_px_y >= 1, "detector: pixel counts must be >= 1");
    require(pixel_pitch > 0.0, "detector: pixel_pitch must be > 0");
    require(lo_amplitude > 0.0, "detector: lo_amplitude must be > 0");
    require(frames_per_delay >= 1, "detector: frames_per_delay must be >= 1");
    require(filter_radius > 0.0, "detector: filter_radius must be > 0");
    require(std::hypot(carrier_k[0], carrier_k[1]) > 2.0 * filter_radius,
            "detector: carrier must exceed twice the filter radius");
}

double DetectorConfig::frequency_step(int axis) const {
    const auto n = static_cast<double>(axis == 0 ? n_px_x : n_px_y);
    return kTwoPi / (n * pixel_pitch);
}

DetectorConfig detector_for_signal(const AxisSpec& kx, const AxisSpec& ky, double k0,
                                   double cloud_radius, double focal_length) {
    require(k0 > 0.0 && cloud_radius > 0.0 && focal_length > 0.0, "detector_for_signal: parameters must be > 0");
    DetectorConfig cfg;
    cfg.n_px_x = kx.n;
    cfg.n_px_y = ky.n;
    cfg.pixel_pitch = focal_length * kx.step / k0;
    cfg.filter_radius = k0 * cloud_radius / focal_length;
    // Diagonal carrier on frequency bins: at least n/4, and far enough out
    // that |c| > 2 r; the side band must still fit below Nyquist.
    for (int a = 0; a < 2; ++a) {
        const std::size_t n = a == 0 ? kx.n : ky.n;
        const double df = cfg.frequency_step(a);
        const double r_bins = cfg.filter_radius / df;
        const auto bins = std::max(n / 4, static_cast<std::size_t>(std::floor(std::sqrt(2.0) * r_bins)) + 1);
        if (static_cast<double>(bins) + r_bins > static_cast<double>(n / 2))
            throw ValidationError("detector_for_signal: side band of radius " + std::to_string(r_bins) +
                                  " bins does not fit beside the baseband on " + std::to_string(n) +
                                  " pixels; coarsen the transverse step or reduce the cloud radius");
        cfg.carrier_k[static_cast<std::size_t>(a)] = static_cast<double>(bins) * df;
    }
    return cfg;
}

std::vector<double> FramePair::differential() const {
    std::vector<double> d(plus.size());
    for (std::size_t i = 0; i < d.size(); ++i) d[i] = plus[i] - minus[i];
    return d;
}

std::vector<FramePair> synthesize_frames(std::span<const cdouble> slice, const DetectorConfig& cfg,
                                         std::uint64_t stream) {
    cfg.validate();
    require(slice.size() == cfg.n_px_x * cfg.n_px_y, "synthesize_frames: slice shape does not match detector");

    const std::size_t npx = slice.size();
    std::vector<double> mean_plus(npx), mean_minus(npx);
    for (std::size_t i = 0; i < cfg.n_px_x; ++i)
        for (std::size_t j = 0; j < cfg.n_px_y; ++j) {
            const std::size_t p = i * cfg.n_px_y + j;
            const double u = pixel_coord(i, cfg.n_px_x, cfg.pixel_pitch);
            const double v = pixel_coord(j, cfg.n_px_y, cfg.pixel_pitch);
            const cdouble lo = cfg.lo_amplitude * cis(cfg.carrier_k[0] * u + cfg.carrier_k[1] * v);
            const double common = std::norm(lo) + std::norm(slice[p]);
            const double cross = 2.0 * std::real(std::conj(lo) * slice[p]);
            mean_plus[p] = common + cross;
            mean_minus[p] = common - cross;
        }

    std::vector<double> sd_plus(npx), sd_minus(npx);
    for (std::size_t p = 0; p < npx; ++p) {
        sd_plus[p] = std::sqrt(std::max(mean_plus[p], 0.0));
        sd_minus[p] = std::sqrt(std::max(mean_minus[p], 0.0));
    }
    std::unique_ptr<gsl_rng, decltype(&gsl_rng_free)> rng(gsl_rng_alloc(gsl_rng_mt19937), &gsl_rng_free);

    std::vector<FramePair> frames(static_cast<std::size_t>(cfg.frames_per_delay));
    for (std::size_t f = 0; f < frames.size(); ++f) {
        FramePair& fp = frames[f];
        fp.n_x = cfg.n_px_x;
        fp.n_y = cfg.n_px_y;
        fp.plus = mean_plus;
        fp.minus = mean_minus;
        if (!cfg.shot_noise) continue;
        // Gaussian limit of the photon counts, one independent stream per frame.
        std::seed_seq seq{static_cast<std::uint32_t>(cfg.rng_seed), static_cast<std::uint32_t>(cfg.rng_seed >> 32),
                          static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32),
                          static_cast<std::uint32_t>(f)};
        std::uint32_t seed = 0;
        seq.generate(&seed, &seed + 1);
        gsl_rng_set(rng.get(), seed);
        for (std::size_t p = 0; p < npx; ++p) {
            fp.plus[p] += sd_plus[p] * gsl_ran_gaussian_ziggurat(rng.get(), 1.0);
            fp.minus[p] += sd_minus[p] * gsl_ran_gaussian_ziggurat(rng.get(), 1.0);
        }
    }
    return frames;
}

std::vector<cdouble> demodulate(const FramePair& pair, const DetectorConfig& cfg) {
    cfg.validate();
    require(pair.n_x == cfg.n_px_x && pair.n_y == cfg.n_px_y && pair.plus.size() == pair.n_x * pair.n_y &&
                pair.minus.size() == pair.plus.size(),
            "demodulate: frame shape does not match detector");
    const double nyquist_x = kPi / cfg.pixel_pitch;
    const double nyquist_y = kPi / cfg.pixel_pitch;
    if (std::abs(cfg.carrier_k[0]) + cfg.filter_radius > nyquist_x ||
        std::abs(cfg.carrier_k[1]) + cfg.filter_radius > nyquist_y)
        throw ValidationError("demodulate: carrier side band lies outside the sampled band");

    const std::size_t nx = pair.n_x, ny = pair.n_y;
    std::vector<cdouble> d(nx * ny);
    for (std::size_t p = 0; p < d.size(); ++p) d[p] = pair.plus[p] - pair.minus[p];

    // D = 2 (LO* S + LO S*); the LO S* term sits on the +carrier side band.
    auto spec = fft2_centered(d, nx, ny, Direction::Forward);
    const double dfx = cfg.frequency_step(0), dfy = cfg.frequency_step(1);
    const double r2 = cfg.filter_radius * cfg.filter_radius;
    for (std::size_t i = 0; i < nx; ++i)
        for (std::size_t j = 0; j < ny; ++j) {
            const double fx = pixel_coord(i, nx, dfx) - cfg.carrier_k[0];
            const double fy = pixel_coord(j, ny, dfy) - cfg.carrier_k[1];
            if (fx * fx + fy * fy > r2) spec[i * ny + j] = 0.0;
        }
    auto side = fft2_centered(spec, nx, ny, Direction::Inverse);
    const double inv = 1.0 / (2.0 * cfg.lo_amplitude);
    for (std::size_t i = 0; i < nx; ++i)
        for (std::size_t j = 0; j < ny; ++j) {
            const double u = pixel_coord(i, nx, cfg.pixel_pitch);
            const double v = pixel_coord(j, ny, cfg.pixel_pitch);
            auto& s = side[i * ny + j];
            s = std::conj(s * cis(-(cfg.carrier_k[0] * u + cfg.carrier_k[1] * v))) * inv;
        }
    return side;
}

std::vector<cdouble> coherent_average(std::span<const std::vector<cdouble>> fields) {
    require(!fields.empty(), "coherent_average: no fields to average");
    std::vector<cdouble> mean(fields.front().size());
    for (const auto& f : fields) {
        require(f.size() == mean.size(), "coherent_average: fields differ in shape");
        for (std::size_t i = 0; i < mean.size(); ++i) mean[i] += f[i];
    }
    const double inv = 1.0 / static_cast<double>(fields.size());
    for (auto& v : mean) v *= inv;
    return mean;
}

KSpaceSignal detect(const KSpaceSignal& sig, const DetectorConfig& cfg) {
    sig.validate();
    cfg.validate();
    require(sig.kx.n == cfg.n_px_x && sig.ky.n == cfg.n_px_y, "detect: detector does not match signal lattice");
    KSpaceSignal out = sig;
    // Demodulation is linear, so demodulating the mean frame pair equals the
    // mean of the per-frame demodulations.
    FramePair mean;
    mean.n_x = cfg.n_px_x;
    mean.n_y = cfg.n_px_y;
    const double inv = 1.0 / static_cast<double>(cfg.frames_per_delay);
    for (std::size_t it = 0; it < sig.t.n; ++it) {
        const auto frames = synthesize_frames(sig.slice(it), cfg, it);
        mean.plus.assign(frames.front().plus.size(), 0.0);
        mean.minus.assign(frames.front().minus.size(), 0.0);
        for (const auto& fp : frames)
            for (std::size_t p = 0; p < fp.plus.size(); ++p) {
                mean.plus[p] += fp.plus[p] * inv;
                mean.minus[p] += fp.minus[p] * inv;
            }
        out.set_slice(it, demodulate(mean, cfg));
    }
    return out;
}

} // namespace gemtomo
