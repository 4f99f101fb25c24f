#include "fgrnn/synth.hpp"

#include <cmath>
#include <numbers>

namespace fgrnn {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double uniform(std::mt19937_64& rng, double lo, double hi) {
    return lo + (hi - lo) * (static_cast<double>(rng() >> 11) * 0x1.0p-53);
}

// sum of random-phase sines across a frequency band; crude band noise
void add_band(std::vector<double>& out, std::mt19937_64& rng, double f_lo, double f_hi,
              int n_tones, double amp, int rate) {
    for (int i = 0; i < n_tones; ++i) {
        const double f = f_lo + (f_hi - f_lo) * i / std::max(1, n_tones - 1);
        const double phase = uniform(rng, 0.0, kTwoPi);
        for (std::size_t t = 0; t < out.size(); ++t)
            out[t] += amp * std::sin(kTwoPi * f * t / rate + phase);
    }
}

}  // namespace

std::vector<std::string> synth_labels() {
    return {"car_horn", "children_playing", "dog_bark", "drilling", "engine_idling", "siren"};
}

AudioClip synth_clip(int class_idx, std::mt19937_64& rng, double seconds) {
    const int rate = kCanonicalRate;
    const auto n = static_cast<std::size_t>(seconds * rate);
    std::vector<double> s(n, 0.0);
    const double phase = uniform(rng, 0.0, kTwoPi);

    switch (class_idx) {
        case 0: {  // steady dual tone
            for (std::size_t t = 0; t < n; ++t)
                s[t] = 0.5 * std::sin(kTwoPi * 440.0 * t / rate + phase) +
                       0.4 * std::sin(kTwoPi * 554.4 * t / rate + 1.7 * phase);
            break;
        }
        case 1: {  // amplitude-modulated mid tone with vibrato
            for (std::size_t t = 0; t < n; ++t) {
                const double env = 0.55 + 0.45 * std::sin(kTwoPi * 3.0 * t / rate + phase);
                const double vib = 1800.0 + 120.0 * std::sin(kTwoPi * 5.0 * t / rate);
                s[t] = env * std::sin(kTwoPi * vib * t / rate + phase);
            }
            break;
        }
        case 2: {  // repeated low-frequency chirp bursts
            const double burst = 0.25;  // seconds
            for (std::size_t t = 0; t < n; ++t) {
                const double tt = static_cast<double>(t) / rate;
                const double local = std::fmod(tt, 2.0 * burst);
                if (local < burst) {
                    const double f = 300.0 + 300.0 * (local / burst);
                    s[t] = 0.8 * std::sin(kTwoPi * f * tt + phase) *
                           std::sin(std::numbers::pi * local / burst);
                }
            }
            break;
        }
        case 3: {  // high-frequency noise band
            add_band(s, rng, 2000.0, 4000.0, 40, 0.12, rate);
            break;
        }
        case 4: {  // low rumble with harmonics
            add_band(s, rng, 50.0, 200.0, 12, 0.2, rate);
            for (std::size_t t = 0; t < n; ++t)
                s[t] += 0.3 * std::sin(kTwoPi * 90.0 * t / rate + phase);
            break;
        }
        case 5: {  // slow triangular frequency sweep
            double ph = phase;
            for (std::size_t t = 0; t < n; ++t) {
                const double tt = static_cast<double>(t) / rate;
                const double tri = std::fabs(std::fmod(tt, 2.0) - 1.0);  // 1..0..1
                const double f = 600.0 + 600.0 * (1.0 - tri);
                ph += kTwoPi * f / rate;
                s[t] = 0.7 * std::sin(ph);
            }
            break;
        }
        default:
            throw BadLabel("synth_clip: class index out of range");
    }

    // +-6 dB level jitter, then normalize into [-1, 1]
    const double gain = std::pow(10.0, uniform(rng, -6.0, 6.0) / 20.0);
    double peak = 0.0;
    for (double& v : s) {
        v *= gain;
        peak = std::max(peak, std::fabs(v));
    }
    if (peak > 1.0)
        for (double& v : s) v /= peak;

    AudioClip clip;
    clip.sample_rate = rate;
    clip.samples = std::move(s);
    return clip;
}

FeatureFile synth_feature_file(std::size_t clips_per_class, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    FeatureFile file;
    file.labels = synth_labels();
    for (int c = 0; c < static_cast<int>(file.labels.size()); ++c) {
        for (std::size_t i = 0; i < clips_per_class; ++i) {
            const auto clip = synth_clip(c, rng);
            const std::string name = file.labels[static_cast<std::size_t>(c)] + "_" +
                                     std::to_string(i) + ".wav";
            int seg_idx = 0;
            for (const auto& segment : segment_clip(clip)) {
                FeatureRecord rec;
                rec.clip = name;
                rec.segment = seg_idx++;
                rec.label = c;
                rec.mfcc = mfcc_sequence(segment);
                file.records.push_back(std::move(rec));
            }
        }
    }
    return file;
}

}  // namespace fgrnn
