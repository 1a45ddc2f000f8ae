#include "vowelrec/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "vowelrec/audio.hpp"
#include "vowelrec/errors.hpp"

namespace vowelrec {

nlohmann::json frontend_to_json(const FrontendConfig& cfg) {
    return {{"mfcc",
             {{"frame_ms", cfg.mfcc.frame_ms},
              {"hop_ms", cfg.mfcc.hop_ms},
              {"n_bands", cfg.mfcc.n_bands},
              {"n_coeffs", cfg.mfcc.n_coeffs},
              {"fmin_hz", cfg.mfcc.fmin_hz},
              {"fmax_hz", cfg.mfcc.fmax_hz},
              {"log_floor", cfg.mfcc.log_floor},
              {"preemphasis", cfg.mfcc.preemphasis}}},
            {"segmenter",
             {{"frame_ms", cfg.segmenter.frame_ms},
              {"hop_ms", cfg.segmenter.hop_ms},
              {"lead_s", cfg.segmenter.lead_s},
              {"pad_ms", cfg.segmenter.pad_ms},
              {"min_run_ms", cfg.segmenter.min_run_ms}}}};
}

FrontendConfig frontend_from_json(const nlohmann::json& j) {
    FrontendConfig cfg;
    try {
        const auto& jm = j.at("mfcc");
        cfg.mfcc.frame_ms = jm.at("frame_ms").get<double>();
        cfg.mfcc.hop_ms = jm.at("hop_ms").get<double>();
        cfg.mfcc.n_bands = jm.at("n_bands").get<std::size_t>();
        cfg.mfcc.n_coeffs = jm.at("n_coeffs").get<std::size_t>();
        cfg.mfcc.fmin_hz = jm.at("fmin_hz").get<double>();
        cfg.mfcc.fmax_hz = jm.at("fmax_hz").get<double>();
        cfg.mfcc.log_floor = jm.at("log_floor").get<double>();
        cfg.mfcc.preemphasis = jm.at("preemphasis").get<double>();
        const auto& js = j.at("segmenter");
        cfg.segmenter.frame_ms = js.at("frame_ms").get<double>();
        cfg.segmenter.hop_ms = js.at("hop_ms").get<double>();
        cfg.segmenter.lead_s = js.at("lead_s").get<double>();
        cfg.segmenter.pad_ms = js.at("pad_ms").get<double>();
        cfg.segmenter.min_run_ms = js.at("min_run_ms").get<double>();
    } catch (const nlohmann::json::exception& e) {
        throw MalformedModelFile("model lacks a usable frontend section: " +
                                 std::string(e.what()));
    }
    return cfg;
}

std::uint64_t ConfusionMatrix::row_total(std::size_t cls) const {
    std::uint64_t t = unsegmentable[cls];
    for (std::uint64_t c : counts[cls]) t += c;
    return t;
}

std::uint64_t ConfusionMatrix::total() const {
    std::uint64_t t = 0;
    for (std::size_t cls = 0; cls < kVowelCount; ++cls) t += row_total(cls);
    return t;
}

double ConfusionMatrix::recognition_percent(std::size_t cls) const {
    const std::uint64_t denom = row_total(cls);
    if (denom == 0) return std::numeric_limits<double>::quiet_NaN();
    return 100.0 * static_cast<double>(counts[cls][cls]) / static_cast<double>(denom);
}

EvalReport make_eval_report(const ConfusionMatrix& confusion) {
    EvalReport report;
    report.confusion = confusion;
    report.total_examples = confusion.total();
    double sum = 0.0;
    std::size_t defined = 0;
    for (std::size_t cls = 0; cls < kVowelCount; ++cls) {
        const double pct = confusion.recognition_percent(cls);
        report.per_class_percent[cls] = pct;
        if (!std::isnan(pct)) {
            sum += pct;
            ++defined;
        }
    }
    report.average_percent = defined == 0 ? std::numeric_limits<double>::quiet_NaN()
                                          : sum / static_cast<double>(defined);
    return report;
}

nlohmann::json EvalReport::to_json() const {
    nlohmann::json labels = nlohmann::json::array();
    nlohmann::json per_class = nlohmann::json::array();
    nlohmann::json rows = nlohmann::json::array();
    nlohmann::json failures = nlohmann::json::array();
    for (std::size_t cls = 0; cls < kVowelCount; ++cls) {
        labels.push_back(std::string(vowel_name(static_cast<Vowel>(cls))));
        if (std::isnan(per_class_percent[cls]))
            per_class.push_back(nullptr);
        else
            per_class.push_back(per_class_percent[cls]);
        rows.push_back(confusion.counts[cls]);
        failures.push_back(confusion.unsegmentable[cls]);
    }
    nlohmann::json j;
    j["labels"] = labels;
    j["confusion"] = rows;
    j["unsegmentable"] = failures;
    j["per_class_percent"] = per_class;
    if (std::isnan(average_percent))
        j["average_percent"] = nullptr;
    else
        j["average_percent"] = average_percent;
    j["total_examples"] = total_examples;
    return j;
}

std::string EvalReport::to_table() const {
    std::ostringstream out;
    out << "vowel    recognition %\n";
    for (std::size_t cls = 0; cls < kVowelCount; ++cls) {
        const std::string name{vowel_display(static_cast<Vowel>(cls))};
        out << name << std::string(name == "\xc3\xa6" ? 8 : 9 - name.size(), ' ');
        if (std::isnan(per_class_percent[cls]))
            out << "n/a\n";
        else {
            char buf[32];
            std::snprintf(buf, sizeof buf, "%.2f", per_class_percent[cls]);
            out << buf << '\n';
        }
    }
    char buf[32];
    if (std::isnan(average_percent))
        out << "average  n/a\n";
    else {
        std::snprintf(buf, sizeof buf, "%.2f", average_percent);
        out << "average  " << buf << '\n';
    }
    return out.str();
}

std::pair<Manifest, Manifest> split_by_speaker(const Manifest& manifest,
                                               const std::set<std::string>& test_speakers) {
    const auto known = manifest.speakers();
    for (const auto& s : test_speakers)
        if (std::find(known.begin(), known.end(), s) == known.end())
            throw UnknownSpeaker("speaker not in manifest: " + s);

    Manifest train, test;
    train.meta = test.meta = manifest.meta;
    train.base_dir = test.base_dir = manifest.base_dir;
    for (const auto& e : manifest.entries)
        (test_speakers.count(e.speaker) ? test : train).entries.push_back(e);

    if (train.entries.empty() || test.entries.empty())
        throw EmptySplit("speaker split leaves one side empty");
    return {std::move(train), std::move(test)};
}

SegmentedFeatures segment_and_features(const AudioClip& clip, const FrontendConfig& cfg) {
    const VowelSegment segment = extract_vowel(clip, cfg.segmenter);
    return {segment, pool_features(mfcc(clip, segment, cfg.mfcc))};
}

FeatureVector clip_features(const AudioClip& clip, const FrontendConfig& cfg) {
    return segment_and_features(clip, cfg).features;
}

TrainPipelineResult train_pipeline(const Manifest& train_manifest,
                                   const FrontendConfig& frontend,
                                   const TrainOptions& opts, std::size_t n_hidden,
                                   const FeatureTap& tap) {
    std::vector<FeatureVector> features;
    std::vector<Vowel> labels;
    std::size_t skipped = 0;
    for (const auto& entry : train_manifest.entries) {
        const AudioClip clip = read_wav(train_manifest.resolve(entry));
        try {
            FeatureVector fv = clip_features(clip, frontend);
            if (tap) tap(entry, fv);
            features.push_back(std::move(fv));
            labels.push_back(entry.vowel);
        } catch (const NoVowelFound&) {
            ++skipped;
        }
    }
    if (features.empty())
        throw NoTrainableExamples("no manifest entry produced a vowel segment");

    const std::size_t n_inputs = features.front().values.size();
    Dataset data;
    data.inputs = Matrix(features.size(), n_inputs);
    data.targets = Matrix(features.size(), kVowelCount);
    for (std::size_t e = 0; e < features.size(); ++e) {
        if (features[e].values.size() != n_inputs)
            throw FeatureDimensionMismatch("inconsistent feature lengths across entries");
        std::copy(features[e].values.begin(), features[e].values.end(),
                  data.inputs.data.begin() + static_cast<std::ptrdiff_t>(e * n_inputs));
        data.targets.at(e, static_cast<std::size_t>(labels[e])) = 1.0;
    }

    TrainPipelineResult result;
    result.model = init_model(n_inputs, n_hidden, kVowelCount, opts.seed);
    result.model.labels = vowel_label_order();
    result.model.frontend = frontend_to_json(frontend);
    result.report = train_scg(result.model, data, opts);
    result.report.skipped_entries = skipped;
    return result;
}

EvalReport evaluate(const MlpModel& model, const Manifest& test_manifest,
                    const FeatureTap& tap) {
    const FrontendConfig frontend = frontend_from_json(model.frontend);
    ConfusionMatrix confusion;
    for (const auto& entry : test_manifest.entries) {
        const AudioClip clip = read_wav(test_manifest.resolve(entry));
        FeatureVector fv;
        try {
            fv = clip_features(clip, frontend);
        } catch (const NoVowelFound&) {
            // unsegmentable test entries count as errors for their class
            confusion.add_failure(entry.vowel);
            continue;
        }
        if (tap) tap(entry, fv);
        if (fv.values.size() != model.config.n_inputs)
            throw FeatureDimensionMismatch(
                "feature length " + std::to_string(fv.values.size()) +
                " does not match model input " + std::to_string(model.config.n_inputs));
        confusion.add(entry.vowel, predict(model, fv.values).label);
    }
    return make_eval_report(confusion);
}

FilePrediction predict_file(const MlpModel& model, const std::filesystem::path& wav_path) {
    const FrontendConfig frontend = frontend_from_json(model.frontend);
    const AudioClip clip = read_wav(wav_path);
    const SegmentedFeatures sf = segment_and_features(clip, frontend);
    if (sf.features.values.size() != model.config.n_inputs)
        throw FeatureDimensionMismatch("feature length does not match model input");
    Prediction pred = predict(model, sf.features.values);
    return {pred.label, std::move(pred.scores), sf.segment};
}

}  // namespace vowelrec
