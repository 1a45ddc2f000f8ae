#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <set>
#include <string>
#include <utility>

#include <json.hpp>

#include "vowelrec/manifest.hpp"
#include "vowelrec/mfcc.hpp"
#include "vowelrec/mlp.hpp"
#include "vowelrec/segment.hpp"

namespace vowelrec {

// Everything between a WAV on disk and the classifier input. Stored inside
// the model file so inference replays training's exact front end.
struct FrontendConfig {
    MfccConfig mfcc;
    SegmenterParams segmenter;
};

nlohmann::json frontend_to_json(const FrontendConfig& cfg);
FrontendConfig frontend_from_json(const nlohmann::json& j);

// rows = true vowel, columns = predicted vowel, fixed label order.
// Entries that failed segmentation are tracked per true class and count
// against that class in the recognition percentages.
struct ConfusionMatrix {
    std::array<std::array<std::uint64_t, kVowelCount>, kVowelCount> counts{};
    std::array<std::uint64_t, kVowelCount> unsegmentable{};

    void add(Vowel truth, Vowel predicted) {
        ++counts[static_cast<std::size_t>(truth)][static_cast<std::size_t>(predicted)];
    }
    void add_failure(Vowel truth) { ++unsegmentable[static_cast<std::size_t>(truth)]; }

    std::uint64_t row_total(std::size_t cls) const;
    std::uint64_t total() const;

    // 100 * diagonal / class total; NaN when the class has no examples
    double recognition_percent(std::size_t cls) const;
};

struct EvalReport {
    ConfusionMatrix confusion;
    std::array<double, kVowelCount> per_class_percent{};  // NaN = n/a
    double average_percent = 0.0;  // mean over the defined classes
    std::uint64_t total_examples = 0;

    nlohmann::json to_json() const;
    std::string to_table() const;  // two-column vowel/percent layout
};

// Builds percentages and their average from an accumulated matrix. Exposed
// so report assembly can be tested against stub predictions.
EvalReport make_eval_report(const ConfusionMatrix& confusion);

// Partition by speaker id. The test side gets exactly the listed speakers.
std::pair<Manifest, Manifest> split_by_speaker(const Manifest& manifest,
                                               const std::set<std::string>& test_speakers);

// The single shared feature path: segment -> mfcc -> mean pooling.
// Training, evaluation and single-file prediction all go through here.
struct SegmentedFeatures {
    VowelSegment segment;
    FeatureVector features;
};
SegmentedFeatures segment_and_features(const AudioClip& clip, const FrontendConfig& cfg);

FeatureVector clip_features(const AudioClip& clip, const FrontendConfig& cfg);

// Observes each successfully featurized entry; used to verify that training
// and evaluation run the identical front end.
using FeatureTap = std::function<void(const ManifestEntry&, const FeatureVector&)>;

struct TrainPipelineResult {
    MlpModel model;
    TrainReport report;
};

// read -> segment -> mfcc -> pool per entry, then SCG training on the
// assembled batch. Unsegmentable entries are skipped and counted.
TrainPipelineResult train_pipeline(const Manifest& train_manifest,
                                   const FrontendConfig& frontend,
                                   const TrainOptions& opts,
                                   std::size_t n_hidden = 50,
                                   const FeatureTap& tap = {});

// Same front end as training, then argmax prediction per entry.
EvalReport evaluate(const MlpModel& model, const Manifest& test_manifest,
                    const FeatureTap& tap = {});

struct FilePrediction {
    Vowel label;
    std::vector<double> scores;
    VowelSegment segment;
};

FilePrediction predict_file(const MlpModel& model, const std::filesystem::path& wav_path);

}  // namespace vowelrec
