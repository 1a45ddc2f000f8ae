#include "vowelrec/audio.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>

#include "vowelrec/errors.hpp"

namespace vowelrec {
namespace {

void put_u16(std::string& out, std::uint16_t v) {
    out.push_back(static_cast<char>(v & 0xff));
    out.push_back(static_cast<char>((v >> 8) & 0xff));
}

void put_u32(std::string& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

struct Reader {
    const std::uint8_t* data;
    std::size_t size;
    std::size_t pos = 0;

    bool can_read(std::size_t n) const { return pos + n <= size; }

    std::uint32_t u32() {
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(data[pos++]) << (8 * i);
        return v;
    }
    std::uint16_t u16() {
        std::uint16_t v = 0;
        for (int i = 0; i < 2; ++i) v |= static_cast<std::uint16_t>(data[pos++]) << (8 * i);
        return v;
    }
    bool tag(const char* t) {
        if (!can_read(4)) return false;
        bool ok = std::memcmp(data + pos, t, 4) == 0;
        pos += 4;
        return ok;
    }
};

constexpr std::uint16_t kFormatPcm = 1;
constexpr std::uint16_t kFormatFloat = 3;

}  // namespace

AudioClip read_wav(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoFailure("cannot open for reading: " + path.string());
    std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());

    Reader r{reinterpret_cast<const std::uint8_t*>(bytes.data()), bytes.size()};
    if (!r.can_read(12)) throw MalformedHeader("file too small for RIFF header");
    if (!r.tag("RIFF")) throw MalformedHeader("missing RIFF tag");
    r.u32();  // declared riff size; trust actual file length instead
    if (!r.tag("WAVE")) throw MalformedHeader("missing WAVE tag");

    bool have_fmt = false;
    std::uint16_t format = 0, channels = 0, bits = 0;
    std::uint32_t rate = 0;
    const std::uint8_t* payload = nullptr;
    std::size_t payload_size = 0;

    while (r.can_read(8)) {
        char id[4];
        std::memcpy(id, r.data + r.pos, 4);
        r.pos += 4;
        std::uint32_t chunk_size = r.u32();
        if (!r.can_read(chunk_size)) throw MalformedHeader("truncated chunk");

        if (std::memcmp(id, "fmt ", 4) == 0) {
            if (chunk_size < 16) throw MalformedHeader("fmt chunk too small");
            Reader f{r.data + r.pos, chunk_size};
            format = f.u16();
            channels = f.u16();
            rate = f.u32();
            f.u32();  // byte rate
            f.u16();  // block align
            bits = f.u16();
            have_fmt = true;
        } else if (std::memcmp(id, "data", 4) == 0) {
            payload = r.data + r.pos;
            payload_size = chunk_size;
        }
        r.pos += chunk_size + (chunk_size & 1);  // chunks are word-aligned
    }

    if (!have_fmt) throw MalformedHeader("missing fmt chunk");
    if (payload == nullptr) throw MalformedHeader("missing data chunk");
    if (rate == 0) throw MalformedHeader("zero sample rate");
    if (channels != 1)
        throw UnsupportedFormat("expected mono, got " + std::to_string(channels) + " channels");
    if (format == kFormatPcm) {
        if (bits != 16) throw UnsupportedFormat("PCM bit depth " + std::to_string(bits));
    } else if (format == kFormatFloat) {
        if (bits != 32) throw UnsupportedFormat("float bit depth " + std::to_string(bits));
    } else {
        throw UnsupportedFormat("format code " + std::to_string(format));
    }

    const std::size_t bytes_per_sample = bits / 8;
    if (payload_size % bytes_per_sample != 0)
        throw MalformedHeader("data chunk size not a multiple of the sample size");

    AudioClip clip;
    clip.sample_rate = rate;
    const std::size_t n = payload_size / bytes_per_sample;
    clip.samples.resize(n);
    if (format == kFormatPcm) {
        for (std::size_t i = 0; i < n; ++i) {
            std::uint16_t raw = static_cast<std::uint16_t>(payload[2 * i]) |
                                (static_cast<std::uint16_t>(payload[2 * i + 1]) << 8);
            clip.samples[i] = static_cast<std::int16_t>(raw) / 32768.0;
        }
    } else {
        for (std::size_t i = 0; i < n; ++i) {
            std::uint32_t raw = 0;
            for (int b = 0; b < 4; ++b)
                raw |= static_cast<std::uint32_t>(payload[4 * i + b]) << (8 * b);
            float f;
            std::memcpy(&f, &raw, 4);
            clip.samples[i] = std::clamp(static_cast<double>(f), -1.0, 1.0);
        }
    }
    return clip;
}

void write_wav(const AudioClip& clip, const std::filesystem::path& path, WavBitDepth depth) {
    std::string out;
    const std::uint32_t n = static_cast<std::uint32_t>(clip.samples.size());

    if (depth == WavBitDepth::Pcm16) {
        const std::uint32_t data_size = n * 2;
        out.reserve(44 + data_size);
        out += "RIFF";
        put_u32(out, 36 + data_size);
        out += "WAVE";
        out += "fmt ";
        put_u32(out, 16);
        put_u16(out, kFormatPcm);
        put_u16(out, 1);  // channels
        put_u32(out, clip.sample_rate);
        put_u32(out, clip.sample_rate * 2);
        put_u16(out, 2);  // block align
        put_u16(out, 16);
        out += "data";
        put_u32(out, data_size);
        for (double s : clip.samples) {
            long q = std::lround(s * 32768.0);
            q = std::clamp(q, -32768L, 32767L);
            put_u16(out, static_cast<std::uint16_t>(static_cast<std::int16_t>(q)));
        }
    } else {
        const std::uint32_t data_size = n * 4;
        out.reserve(58 + data_size);
        out += "RIFF";
        put_u32(out, 50 + data_size);
        out += "WAVE";
        out += "fmt ";
        put_u32(out, 18);
        put_u16(out, kFormatFloat);
        put_u16(out, 1);
        put_u32(out, clip.sample_rate);
        put_u32(out, clip.sample_rate * 4);
        put_u16(out, 4);
        put_u16(out, 32);
        put_u16(out, 0);  // cbSize
        out += "fact";
        put_u32(out, 4);
        put_u32(out, n);
        out += "data";
        put_u32(out, data_size);
        for (double s : clip.samples) {
            float f = static_cast<float>(s);
            std::uint32_t raw;
            std::memcpy(&raw, &f, 4);
            put_u32(out, raw);
        }
    }

    std::ofstream of(path, std::ios::binary | std::ios::trunc);
    if (!of) throw IoFailure("cannot open for writing: " + path.string());
    of.write(out.data(), static_cast<std::streamsize>(out.size()));
    if (!of) throw IoFailure("write failed: " + path.string());
}

}  // namespace vowelrec
