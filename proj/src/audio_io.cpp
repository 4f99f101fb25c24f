#include "fgrnn/audio_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>

namespace fgrnn {

namespace {

std::uint32_t read_u32(const std::uint8_t* p) {
    return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
           (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

std::uint16_t read_u16(const std::uint8_t* p) {
    return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}

double clamp_amp(double v) { return std::clamp(v, -1.0, 1.0); }

}  // namespace

AudioClip parse_wav(const std::vector<std::uint8_t>& bytes) {
    if (bytes.size() < 12 || std::memcmp(bytes.data(), "RIFF", 4) != 0 ||
        std::memcmp(bytes.data() + 8, "WAVE", 4) != 0)
        throw MalformedWav("not a RIFF/WAVE file");

    std::uint16_t format = 0, channels = 0, bits = 0;
    std::uint32_t rate = 0;
    bool have_fmt = false;
    const std::uint8_t* data_ptr = nullptr;
    std::size_t data_len = 0;

    std::size_t pos = 12;
    while (pos + 8 <= bytes.size()) {
        const char* id = reinterpret_cast<const char*>(bytes.data() + pos);
        std::uint32_t chunk_len = read_u32(bytes.data() + pos + 4);
        std::size_t body = pos + 8;
        if (body + chunk_len > bytes.size())
            throw MalformedWav("truncated chunk");
        if (std::memcmp(id, "fmt ", 4) == 0) {
            if (chunk_len < 16) throw MalformedWav("fmt chunk too small");
            format = read_u16(bytes.data() + body);
            channels = read_u16(bytes.data() + body + 2);
            rate = read_u32(bytes.data() + body + 4);
            bits = read_u16(bytes.data() + body + 14);
            have_fmt = true;
        } else if (std::memcmp(id, "data", 4) == 0) {
            data_ptr = bytes.data() + body;
            data_len = chunk_len;
        }
        pos = body + chunk_len + (chunk_len & 1);  // chunks are word-aligned
    }

    if (!have_fmt || data_ptr == nullptr)
        throw MalformedWav("missing fmt or data chunk");
    if (channels == 0 || rate == 0)
        throw MalformedWav("bad fmt fields");

    const bool pcm16 = (format == 1 && bits == 16);
    const bool f32 = (format == 3 && bits == 32);
    if (!pcm16 && !f32)
        throw UnsupportedEncoding("only PCM16 and float32 WAV are supported");

    const std::size_t bytes_per_sample = bits / 8;
    const std::size_t frame_size = bytes_per_sample * channels;
    const std::size_t frames = data_len / frame_size;

    AudioClip clip;
    clip.sample_rate = static_cast<int>(rate);
    clip.samples.resize(frames);
    for (std::size_t f = 0; f < frames; ++f) {
        double acc = 0.0;
        for (std::uint16_t ch = 0; ch < channels; ++ch) {
            const std::uint8_t* s = data_ptr + f * frame_size + ch * bytes_per_sample;
            if (pcm16) {
                std::int16_t v;
                std::memcpy(&v, s, 2);
                acc += v / 32768.0;
            } else {
                float v;
                std::memcpy(&v, s, 4);
                acc += v;
            }
        }
        clip.samples[f] = clamp_amp(acc / channels);
    }
    return clip;
}

AudioClip load_wav(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw MalformedWav("cannot open file: " + path);
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                    std::istreambuf_iterator<char>());
    return parse_wav(bytes);
}

std::vector<std::uint8_t> encode_wav(const AudioClip& clip) {
    const std::uint32_t data_len = static_cast<std::uint32_t>(clip.samples.size() * 2);
    std::vector<std::uint8_t> out;
    out.reserve(44 + data_len);
    auto put_u32 = [&](std::uint32_t v) {
        out.push_back(v & 0xff);
        out.push_back((v >> 8) & 0xff);
        out.push_back((v >> 16) & 0xff);
        out.push_back((v >> 24) & 0xff);
    };
    auto put_u16 = [&](std::uint16_t v) {
        out.push_back(v & 0xff);
        out.push_back((v >> 8) & 0xff);
    };
    auto put_tag = [&](const char* t) { out.insert(out.end(), t, t + 4); };

    put_tag("RIFF");
    put_u32(36 + data_len);
    put_tag("WAVE");
    put_tag("fmt ");
    put_u32(16);
    put_u16(1);  // PCM
    put_u16(1);  // mono
    put_u32(static_cast<std::uint32_t>(clip.sample_rate));
    put_u32(static_cast<std::uint32_t>(clip.sample_rate) * 2);
    put_u16(2);
    put_u16(16);
    put_tag("data");
    put_u32(data_len);
    for (double s : clip.samples) {
        double v = clamp_amp(s) * 32768.0;
        auto q = static_cast<std::int32_t>(std::lrint(v));
        q = std::clamp(q, -32768, 32767);
        put_u16(static_cast<std::uint16_t>(static_cast<std::int16_t>(q)));
    }
    return out;
}

void save_wav(const std::string& path, const AudioClip& clip) {
    auto bytes = encode_wav(clip);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write file: " + path);
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
}

AudioClip resample_linear(const AudioClip& clip, int target_rate) {
    if (clip.samples.empty()) throw EmptyClip("resample_linear: empty clip");
    if (target_rate <= 0) throw PreconditionError("resample_linear: target_rate must be positive");
    if (target_rate == clip.sample_rate) return clip;

    const std::size_t n_in = clip.samples.size();
    const std::size_t n_out = static_cast<std::size_t>(
        static_cast<double>(n_in) * target_rate / clip.sample_rate);
    AudioClip out;
    out.sample_rate = target_rate;
    out.samples.resize(n_out);
    const double step = static_cast<double>(clip.sample_rate) / target_rate;
    for (std::size_t i = 0; i < n_out; ++i) {
        double pos = i * step;
        auto idx = static_cast<std::size_t>(pos);
        if (idx >= n_in - 1) {
            out.samples[i] = clip.samples[n_in - 1];
            continue;
        }
        double frac = pos - idx;
        out.samples[i] = clip.samples[idx] * (1.0 - frac) + clip.samples[idx + 1] * frac;
    }
    return out;
}

std::vector<Segment> segment_clip(const AudioClip& clip) {
    if (clip.sample_rate != kCanonicalRate)
        throw WrongRate("segment_clip: clip must be at 22050 Hz; resample first");
    const std::size_t needed = kSegmentSamples * kSegmentsPerClip;  // 3.0 s
    if (clip.samples.size() < needed)
        throw TooShort("segment_clip: clip shorter than 3.0 s");

    std::vector<Segment> segments;
    segments.reserve(kSegmentsPerClip);
    for (std::size_t s = 0; s < kSegmentsPerClip; ++s) {
        Segment seg;
        seg.origin_offset = s * kSegmentSamples;
        seg.samples.assign(clip.samples.begin() + static_cast<std::ptrdiff_t>(seg.origin_offset),
                           clip.samples.begin() +
                               static_cast<std::ptrdiff_t>(seg.origin_offset + kSegmentSamples));
        segments.push_back(std::move(seg));
    }
    return segments;
}

}  // namespace fgrnn
