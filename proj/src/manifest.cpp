#include "vowelrec/manifest.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "vowelrec/errors.hpp"

namespace vowelrec {

std::vector<std::string> Manifest::speakers() const {
    std::set<std::string> unique;
    for (const auto& e : entries) unique.insert(e.speaker);
    return {unique.begin(), unique.end()};
}

void write_manifest(const Manifest& manifest, const std::filesystem::path& csv_path) {
    // entry paths are relative to manifest.base_dir; rebase them onto the
    // directory the CSV lands in so the written file resolves on its own
    const auto csv_dir = std::filesystem::absolute(
        csv_path.has_parent_path() ? csv_path.parent_path() : ".");
    auto rebase = [&](const std::string& rel) {
        const auto abs = std::filesystem::absolute(manifest.base_dir / rel);
        const auto prox = abs.lexically_proximate(csv_dir);
        return prox.generic_string();
    };

    std::ofstream out(csv_path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoFailure("cannot write manifest: " + csv_path.string());
    out << "path,speaker,consonant,vowel\n";
    for (const auto& e : manifest.entries)
        out << rebase(e.path) << ',' << e.speaker << ',' << e.consonant << ','
            << vowel_name(e.vowel) << '\n';
    if (!out) throw IoFailure("manifest write failed: " + csv_path.string());

    if (manifest.meta) {
        nlohmann::json j;
        j["sample_rate"] = manifest.meta->sample_rate;
        j["duration_s"] = manifest.meta->duration_s;
        j["seed"] = manifest.meta->seed;
        j["generator_version"] = manifest.meta->generator_version;
        std::filesystem::path side = csv_path;
        side.replace_extension(".json");
        std::ofstream js(side, std::ios::binary | std::ios::trunc);
        if (!js) throw IoFailure("cannot write manifest sidecar: " + side.string());
        js << j.dump(2) << '\n';
    }
}

Manifest read_manifest(const std::filesystem::path& csv_path) {
    std::ifstream in(csv_path);
    if (!in) throw IoFailure("cannot open manifest: " + csv_path.string());

    Manifest m;
    m.base_dir = csv_path.has_parent_path() ? csv_path.parent_path()
                                            : std::filesystem::path(".");
    std::string line;
    bool first = true;
    std::set<std::string> seen;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (first) {
            first = false;
            if (line == "path,speaker,consonant,vowel") continue;  // header optional
        }
        std::stringstream ss(line);
        std::string path, speaker, consonant, vowel;
        if (!std::getline(ss, path, ',') || !std::getline(ss, speaker, ',') ||
            !std::getline(ss, consonant, ',') || !std::getline(ss, vowel))
            throw ManifestError("bad manifest row: " + line);
        if (!seen.insert(path).second)
            throw ManifestError("duplicate manifest path: " + path);
        m.entries.push_back({path, speaker, consonant, parse_vowel(vowel)});
    }

    std::filesystem::path side = csv_path;
    side.replace_extension(".json");
    if (std::filesystem::exists(side)) {
        std::ifstream js(side);
        nlohmann::json j;
        try {
            js >> j;
            CorpusMeta meta;
            meta.sample_rate = j.at("sample_rate").get<std::uint32_t>();
            meta.duration_s = j.at("duration_s").get<double>();
            meta.seed = j.at("seed").get<std::uint64_t>();
            meta.generator_version = j.at("generator_version").get<std::string>();
            m.meta = meta;
        } catch (const nlohmann::json::exception& e) {
            throw ManifestError("bad manifest sidecar: " + std::string(e.what()));
        }
    }
    return m;
}

}  // namespace vowelrec
