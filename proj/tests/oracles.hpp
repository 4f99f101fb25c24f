// Independent reference implementations used only by tests. Deliberately
// straight-line, loop-based code with no shared machinery with src/.
#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <vector>

namespace oracle {

inline constexpr double kPi = 3.14159265358979323846;

// reflect padding index (no edge repeat), bouncing at both ends
inline std::size_t reflect(long i, std::size_t n) {
    if (n == 1) return 0;
    const long period = 2 * (static_cast<long>(n) - 1);
    long j = ((i % period) + period) % period;
    if (j >= static_cast<long>(n)) j = period - j;
    return static_cast<std::size_t>(j);
}

// O(N^2) direct-DFT STFT: center reflect padding, periodic Hann window,
// half spectrum, F = 1 + floor(len/hop).
inline std::vector<std::vector<std::complex<double>>> stft_direct(
    const std::vector<double>& x, std::size_t n_fft, std::size_t hop) {
    const std::size_t n = x.size();
    const std::size_t frames = 1 + n / hop;
    std::vector<std::vector<std::complex<double>>> out(frames);
    for (std::size_t t = 0; t < frames; ++t) {
        std::vector<double> frame(n_fft);
        for (std::size_t i = 0; i < n_fft; ++i) {
            const long src = static_cast<long>(t * hop + i) - static_cast<long>(n_fft / 2);
            const double v = (src >= 0 && src < static_cast<long>(n))
                                 ? x[static_cast<std::size_t>(src)]
                                 : x[reflect(src, n)];
            frame[i] = v * 0.5 * (1.0 - std::cos(2.0 * kPi * i / n_fft));
        }
        out[t].resize(n_fft / 2 + 1);
        for (std::size_t k = 0; k <= n_fft / 2; ++k) {
            std::complex<double> acc(0.0, 0.0);
            for (std::size_t i = 0; i < n_fft; ++i) {
                const double ang = -2.0 * kPi * static_cast<double>(k * i) / n_fft;
                acc += frame[i] * std::complex<double>(std::cos(ang), std::sin(ang));
            }
            out[t][k] = acc;
        }
    }
    return out;
}

// Straight-line MFCC reference: direct DFT, explicit triangular filters,
// naive DCT-II with orthonormal scaling.
inline std::vector<std::vector<double>> mfcc_direct(const std::vector<double>& x,
                                                    std::size_t n_fft, std::size_t hop,
                                                    std::size_t n_mels, std::size_t n_coeffs,
                                                    double sample_rate) {
    const auto spec = stft_direct(x, n_fft, hop);
    const std::size_t n_bins = n_fft / 2 + 1;

    // mel edge frequencies
    std::vector<double> edges(n_mels + 2);
    const double mel_max = 2595.0 * std::log10(1.0 + (sample_rate / 2.0) / 700.0);
    for (std::size_t i = 0; i < edges.size(); ++i) {
        const double mel = mel_max * static_cast<double>(i) / (n_mels + 1);
        edges[i] = 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0);
    }

    std::vector<std::vector<double>> out(spec.size(), std::vector<double>(n_coeffs, 0.0));
    for (std::size_t t = 0; t < spec.size(); ++t) {
        std::vector<double> logmel(n_mels);
        for (std::size_t m = 0; m < n_mels; ++m) {
            double e = 0.0;
            for (std::size_t k = 0; k < n_bins; ++k) {
                const double f = static_cast<double>(k) * sample_rate / static_cast<double>(n_fft);
                double w = 0.0;
                if (f > edges[m] && f < edges[m + 1])
                    w = (f - edges[m]) / (edges[m + 1] - edges[m]);
                else if (f >= edges[m + 1] && f < edges[m + 2])
                    w = (edges[m + 2] - f) / (edges[m + 2] - edges[m + 1]);
                const double re = spec[t][k].real(), im = spec[t][k].imag();
                e += w * (re * re + im * im);
            }
            logmel[m] = std::log(e + 1e-10);
        }
        for (std::size_t c = 0; c < n_coeffs; ++c) {
            double acc = 0.0;
            for (std::size_t m = 0; m < n_mels; ++m)
                acc += logmel[m] * std::cos(kPi * c * (2.0 * m + 1.0) / (2.0 * n_mels));
            const double scale = c == 0 ? std::sqrt(1.0 / n_mels) : std::sqrt(2.0 / n_mels);
            out[t][c] = scale * acc;
        }
    }
    return out;
}

// Scalar-loop recurrent cell, explicit index arithmetic, no Matrix type.
// W is H*D row-major, U is H*H row-major.
inline std::vector<double> cell_direct(const std::vector<double>& W, const std::vector<double>& U,
                                       const std::vector<double>& b_z,
                                       const std::vector<double>& b_h, double zeta_raw,
                                       double nu_raw, const std::vector<double>& x,
                                       const std::vector<double>& h_prev, std::size_t H,
                                       std::size_t D) {
    const double zeta = 1.0 / (1.0 + std::exp(-zeta_raw));
    const double nu = 1.0 / (1.0 + std::exp(-nu_raw));
    std::vector<double> h(H);
    for (std::size_t i = 0; i < H; ++i) {
        double wx = 0.0;
        for (std::size_t j = 0; j < D; ++j) wx += W[i * D + j] * x[j];
        double uh = 0.0;
        for (std::size_t j = 0; j < H; ++j) uh += U[i * H + j] * h_prev[j];
        const double z = 1.0 / (1.0 + std::exp(-(wx + uh + b_z[i])));
        const double c = std::tanh(wx + uh + b_h[i]);
        h[i] = (zeta * (1.0 - z) + nu) * c + z * h_prev[i];
    }
    return h;
}

// scalar-loop y = M x + b, M is R*C row-major
inline std::vector<double> matvec_direct(const std::vector<double>& M,
                                         const std::vector<double>& b,
                                         const std::vector<double>& x, std::size_t R,
                                         std::size_t C) {
    std::vector<double> y(R);
    for (std::size_t r = 0; r < R; ++r) {
        double acc = b[r];
        for (std::size_t c = 0; c < C; ++c) acc += M[r * C + c] * x[c];
        y[r] = acc;
    }
    return y;
}

}  // namespace oracle
