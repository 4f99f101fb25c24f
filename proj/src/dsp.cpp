#include "fgrnn/dsp.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace fgrnn {

namespace {

constexpr double kPi = std::numbers::pi;

bool is_pow2(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

// Periodic Hann; satisfies COLA for hop = n/4.
std::vector<double> hann_window(std::size_t n) {
    std::vector<double> w(n);
    for (std::size_t i = 0; i < n; ++i)
        w[i] = 0.5 * (1.0 - std::cos(2.0 * kPi * static_cast<double>(i) / n));
    return w;
}

// Reflect (no edge repeat) index into a signal of length n, bouncing at
// the boundaries for pads longer than the signal.
std::size_t reflect_index(std::ptrdiff_t i, std::size_t n) {
    if (n == 1) return 0;
    const std::ptrdiff_t period = 2 * (static_cast<std::ptrdiff_t>(n) - 1);
    std::ptrdiff_t j = ((i % period) + period) % period;
    if (j >= static_cast<std::ptrdiff_t>(n)) j = period - j;
    return static_cast<std::size_t>(j);
}

}  // namespace

double hz_to_mel(double hz) { return 2595.0 * std::log10(1.0 + hz / 700.0); }

double mel_to_hz(double mel) { return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0); }

void fft_inplace(std::vector<std::complex<double>>& buf, bool inverse) {
    const std::size_t n = buf.size();
    if (!is_pow2(n)) throw BadFftSize("fft length must be a power of two");

    // bit-reversal permutation
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(buf[i], buf[j]);
    }

    for (std::size_t len = 2; len <= n; len <<= 1) {
        const double ang = (inverse ? 2.0 : -2.0) * kPi / static_cast<double>(len);
        const std::complex<double> wlen(std::cos(ang), std::sin(ang));
        for (std::size_t i = 0; i < n; i += len) {
            std::complex<double> w(1.0, 0.0);
            for (std::size_t k = 0; k < len / 2; ++k) {
                auto u = buf[i + k];
                auto v = buf[i + k + len / 2] * w;
                buf[i + k] = u + v;
                buf[i + k + len / 2] = u - v;
                w *= wlen;
            }
        }
    }
    if (inverse) {
        for (auto& v : buf) v /= static_cast<double>(n);
    }
}

Spectrogram stft(const std::vector<double>& samples, std::size_t n_fft, std::size_t hop,
                 int sample_rate) {
    if (samples.empty()) throw EmptySignal("stft: empty input");
    if (!is_pow2(n_fft)) throw BadFftSize("stft: n_fft must be a power of two");
    if (hop == 0 || hop > n_fft) throw BadConfig("stft: hop must be in (0, n_fft]");

    const std::size_t n = samples.size();
    const std::size_t pad = n_fft / 2;
    const std::size_t num_frames = 1 + n / hop;
    const auto window = hann_window(n_fft);

    Spectrogram spec;
    spec.n_fft = n_fft;
    spec.hop = hop;
    spec.sample_rate = sample_rate;
    spec.frames.resize(num_frames);

    std::vector<std::complex<double>> buf(n_fft);
    for (std::size_t t = 0; t < num_frames; ++t) {
        for (std::size_t i = 0; i < n_fft; ++i) {
            const std::ptrdiff_t src =
                static_cast<std::ptrdiff_t>(t * hop + i) - static_cast<std::ptrdiff_t>(pad);
            double v = (src >= 0 && src < static_cast<std::ptrdiff_t>(n))
                           ? samples[static_cast<std::size_t>(src)]
                           : samples[reflect_index(src, n)];
            buf[i] = v * window[i];
        }
        fft_inplace(buf);
        spec.frames[t].assign(buf.begin(), buf.begin() + static_cast<std::ptrdiff_t>(n_fft / 2 + 1));
    }
    return spec;
}

std::vector<double> istft(const Spectrogram& spec) {
    const std::size_t n_fft = spec.n_fft;
    const std::size_t hop = spec.hop;
    if (!is_pow2(n_fft) || hop == 0 || hop > n_fft || spec.frames.empty())
        throw InconsistentGeometry("istft: bad spectrogram geometry");
    for (const auto& f : spec.frames)
        if (f.size() != spec.num_bins())
            throw InconsistentGeometry("istft: frame width != n_fft/2 + 1");

    const std::size_t num_frames = spec.frames.size();
    const std::size_t padded_len = (num_frames - 1) * hop + n_fft;
    const auto window = hann_window(n_fft);

    std::vector<double> ola(padded_len, 0.0);
    std::vector<double> wsum(padded_len, 0.0);
    std::vector<std::complex<double>> buf(n_fft);

    for (std::size_t t = 0; t < num_frames; ++t) {
        // rebuild the full spectrum from the stored half (real signal)
        for (std::size_t k = 0; k <= n_fft / 2; ++k) buf[k] = spec.frames[t][k];
        for (std::size_t k = n_fft / 2 + 1; k < n_fft; ++k)
            buf[k] = std::conj(spec.frames[t][n_fft - k]);
        fft_inplace(buf, /*inverse=*/true);
        for (std::size_t i = 0; i < n_fft; ++i) {
            ola[t * hop + i] += buf[i].real() * window[i];
            wsum[t * hop + i] += window[i] * window[i];
        }
    }

    const std::size_t pad = n_fft / 2;
    std::vector<double> out(padded_len - pad);
    for (std::size_t i = 0; i < out.size(); ++i) {
        const double denom = wsum[pad + i];
        out[i] = denom > 1e-12 ? ola[pad + i] / denom : 0.0;
    }
    return out;
}

Matrix power_spectrum(const Spectrogram& spec) {
    Matrix out(spec.num_frames(), spec.num_bins());
    for (std::size_t t = 0; t < spec.num_frames(); ++t)
        for (std::size_t k = 0; k < spec.num_bins(); ++k)
            out(t, k) = std::norm(spec.frames[t][k]);
    return out;
}

MelFilterbank mel_filterbank(std::size_t n_mels, std::size_t n_fft, int sample_rate) {
    if (n_mels < 2) throw BadConfig("mel_filterbank: need at least 2 filters");
    if (!is_pow2(n_fft)) throw BadConfig("mel_filterbank: n_fft must be a power of two");

    const std::size_t n_bins = n_fft / 2 + 1;
    const double mel_max = hz_to_mel(sample_rate / 2.0);

    // n_mels + 2 edge frequencies, equally spaced on the mel scale
    std::vector<double> edges(n_mels + 2);
    for (std::size_t i = 0; i < edges.size(); ++i)
        edges[i] = mel_to_hz(mel_max * static_cast<double>(i) / (n_mels + 1));

    MelFilterbank bank;
    bank.sample_rate = sample_rate;
    bank.weights = Matrix(n_mels, n_bins);
    for (std::size_t m = 0; m < n_mels; ++m) {
        const double lo = edges[m], center = edges[m + 1], hi = edges[m + 2];
        for (std::size_t k = 0; k < n_bins; ++k) {
            const double f = static_cast<double>(k) * sample_rate / static_cast<double>(n_fft);
            double w = 0.0;
            if (f > lo && f < center)
                w = (f - lo) / (center - lo);
            else if (f >= center && f < hi)
                w = (hi - f) / (hi - center);
            bank.weights(m, k) = w;
        }
    }
    return bank;
}

Matrix dct2_basis(std::size_t n_out, std::size_t n_in) {
    Matrix basis(n_out, n_in);
    const double s0 = std::sqrt(1.0 / static_cast<double>(n_in));
    const double sk = std::sqrt(2.0 / static_cast<double>(n_in));
    for (std::size_t k = 0; k < n_out; ++k)
        for (std::size_t n = 0; n < n_in; ++n)
            basis(k, n) = (k == 0 ? s0 : sk) *
                          std::cos(kPi * (2.0 * n + 1.0) * k / (2.0 * static_cast<double>(n_in)));
    return basis;
}

MfccSequence mfcc_of_samples(const std::vector<double>& samples) {
    const auto spec = stft(samples, kNFft, kHop, kCanonicalRate);
    const auto power = power_spectrum(spec);
    static const MelFilterbank bank = mel_filterbank(kNumMels, kNFft, kCanonicalRate);
    static const Matrix dct = dct2_basis(kNumMfcc, kNumMels);

    MfccSequence out;
    out.coeffs = Matrix(spec.num_frames(), kNumMfcc);
    std::vector<double> mel(kNumMels);
    for (std::size_t t = 0; t < spec.num_frames(); ++t) {
        for (std::size_t m = 0; m < kNumMels; ++m) {
            double e = 0.0;
            for (std::size_t k = 0; k < spec.num_bins(); ++k)
                e += bank.weights(m, k) * power(t, k);
            mel[m] = std::log(e + kLogFloor);
        }
        for (std::size_t c = 0; c < kNumMfcc; ++c) {
            double acc = 0.0;
            for (std::size_t m = 0; m < kNumMels; ++m) acc += dct(c, m) * mel[m];
            out.coeffs(t, c) = acc;
        }
    }
    return out;
}

MfccSequence mfcc_sequence(const Segment& segment) {
    if (segment.samples.size() != kSegmentSamples)
        throw DimensionMismatch("mfcc_sequence: segment must have 13230 samples");
    return mfcc_of_samples(segment.samples);
}

AudioClip spectral_gate(const AudioClip& clip, const std::optional<AudioClip>& noise_profile) {
    if (noise_profile && noise_profile->sample_rate != clip.sample_rate)
        throw RateMismatch("spectral_gate: noise profile rate differs from clip");
    if (clip.samples.empty()) return clip;

    auto spec = stft(clip.samples, kNFft, kHop, clip.sample_rate);
    const std::size_t F = spec.num_frames();
    const std::size_t B = spec.num_bins();

    Matrix mag(F, B);
    for (std::size_t t = 0; t < F; ++t)
        for (std::size_t k = 0; k < B; ++k) mag(t, k) = std::abs(spec.frames[t][k]);

    // per-bin noise floor
    std::vector<double> floor_mag(B, 0.0);
    if (noise_profile) {
        const auto nspec = stft(noise_profile->samples, kNFft, kHop, clip.sample_rate);
        const std::size_t NF = nspec.num_frames();
        for (std::size_t k = 0; k < B; ++k) {
            double mean = 0.0;
            for (std::size_t t = 0; t < NF; ++t) mean += std::abs(nspec.frames[t][k]);
            mean /= static_cast<double>(NF);
            double var = 0.0;
            for (std::size_t t = 0; t < NF; ++t) {
                const double d = std::abs(nspec.frames[t][k]) - mean;
                var += d * d;
            }
            var /= static_cast<double>(NF);
            floor_mag[k] = mean + 1.5 * std::sqrt(var);
        }
    } else {
        // 10th percentile of the clip's own magnitudes over time
        std::vector<double> col(F);
        for (std::size_t k = 0; k < B; ++k) {
            for (std::size_t t = 0; t < F; ++t) col[t] = mag(t, k);
            std::sort(col.begin(), col.end());
            const double pos = 0.1 * static_cast<double>(F - 1);
            const auto lo = static_cast<std::size_t>(pos);
            const double frac = pos - static_cast<double>(lo);
            floor_mag[k] = lo + 1 < F ? col[lo] * (1.0 - frac) + col[lo + 1] * frac : col[lo];
        }
    }

    constexpr double kAttenuation = 0.0316227766016838;  // -30 dB
    Matrix mask(F, B);
    for (std::size_t t = 0; t < F; ++t)
        for (std::size_t k = 0; k < B; ++k)
            mask(t, k) = mag(t, k) > floor_mag[k] ? 1.0 : kAttenuation;

    // moving-average smoothing over +-2 frames and +-2 bins
    Matrix tmp(F, B);
    for (std::size_t t = 0; t < F; ++t) {
        for (std::size_t k = 0; k < B; ++k) {
            double acc = 0.0;
            int n = 0;
            for (std::ptrdiff_t d = -2; d <= 2; ++d) {
                const std::ptrdiff_t tt = static_cast<std::ptrdiff_t>(t) + d;
                if (tt < 0 || tt >= static_cast<std::ptrdiff_t>(F)) continue;
                acc += mask(static_cast<std::size_t>(tt), k);
                ++n;
            }
            tmp(t, k) = acc / n;
        }
    }
    Matrix smooth(F, B);
    for (std::size_t t = 0; t < F; ++t) {
        for (std::size_t k = 0; k < B; ++k) {
            double acc = 0.0;
            int n = 0;
            for (std::ptrdiff_t d = -2; d <= 2; ++d) {
                const std::ptrdiff_t kk = static_cast<std::ptrdiff_t>(k) + d;
                if (kk < 0 || kk >= static_cast<std::ptrdiff_t>(B)) continue;
                acc += tmp(t, static_cast<std::size_t>(kk));
                ++n;
            }
            smooth(t, k) = acc / n;
        }
    }

    for (std::size_t t = 0; t < F; ++t)
        for (std::size_t k = 0; k < B; ++k) spec.frames[t][k] *= smooth(t, k);

    auto rebuilt = istft(spec);
    AudioClip out;
    out.sample_rate = clip.sample_rate;
    out.samples.resize(clip.samples.size());
    for (std::size_t i = 0; i < out.samples.size(); ++i)
        out.samples[i] = i < rebuilt.size() ? std::clamp(rebuilt[i], -1.0, 1.0) : 0.0;
    return out;
}

}  // namespace fgrnn
