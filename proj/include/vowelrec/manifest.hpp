#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "vowelrec/labels.hpp"

namespace vowelrec {

struct ManifestEntry {
    std::string path;  // relative to the manifest's directory
    std::string speaker;
    std::string consonant;
    Vowel vowel = Vowel::A;
};

struct CorpusMeta {
    std::uint32_t sample_rate = 0;
    double duration_s = 0.0;
    std::uint64_t seed = 0;
    std::string generator_version;
};

// Labeled index of a corpus: CSV columns path,speaker,consonant,vowel plus
// an optional JSON sidecar with the generator metadata.
struct Manifest {
    std::vector<ManifestEntry> entries;
    std::optional<CorpusMeta> meta;
    std::filesystem::path base_dir;

    std::filesystem::path resolve(const ManifestEntry& entry) const {
        return base_dir / entry.path;
    }
    // sorted unique speaker ids
    std::vector<std::string> speakers() const;
};

// Writes the CSV and, when metadata is present, a sidecar named
// "<stem>.json" next to it. File paths in the CSV stay relative.
void write_manifest(const Manifest& manifest, const std::filesystem::path& csv_path);

// Reads a manifest CSV (+ sidecar when present). Rejects duplicate paths
// and unknown vowel labels.
Manifest read_manifest(const std::filesystem::path& csv_path);

}  // namespace vowelrec
