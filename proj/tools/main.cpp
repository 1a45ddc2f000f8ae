// vowelrec: synthetic consonant-vowel corpus generation, silence-referenced
// vowel segmentation, MFCC features, and a sigmoid MLP trained with scaled
// conjugate gradient, evaluated by per-vowel recognition percentages.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "vowelrec/audio.hpp"
#include "vowelrec/errors.hpp"
#include "vowelrec/pipeline.hpp"
#include "vowelrec/synth.hpp"

#ifndef VOWELREC_DATA_DIR
#define VOWELREC_DATA_DIR "data"
#endif

namespace {

using nlohmann::json;

// CLI11 config reader for flat/nested JSON files; command-line flags win.
class ConfigJson : public CLI::Config {
public:
    std::string to_config(const CLI::App* app, bool default_also, bool, std::string) const override {
        json j;
        for (const CLI::Option* opt : app->get_options({})) {
            if (!opt->get_lnames().empty() && opt->get_configurable()) {
                const std::string name = opt->get_lnames()[0];
                if (opt->reduced_results().size() == 1)
                    j[name] = opt->reduced_results().at(0);
                else if (default_also)
                    j[name] = opt->get_default_str();
            }
        }
        return j.dump(2);
    }

    std::vector<CLI::ConfigItem> from_config(std::istream& input) const override {
        json j;
        try {
            input >> j;
        } catch (const json::exception& e) {
            throw CLI::FileError(std::string("config is not valid JSON: ") + e.what());
        }
        return collect(j, "", {});
    }

private:
    std::vector<CLI::ConfigItem> collect(const json& j, const std::string& name,
                                         std::vector<std::string> prefix) const {
        std::vector<CLI::ConfigItem> results;
        if (j.is_object()) {
            if (!name.empty()) prefix.push_back(name);
            for (auto it = j.cbegin(); it != j.cend(); ++it) {
                auto sub = collect(*it, it.key(), prefix);
                results.insert(results.end(), sub.begin(), sub.end());
            }
        } else if (!name.empty()) {
            results.emplace_back();
            CLI::ConfigItem& item = results.back();
            item.name = name;
            item.parents = std::move(prefix);
            if (j.is_boolean())
                item.inputs = {j.get<bool>() ? "true" : "false"};
            else if (j.is_number())
                item.inputs = {j.dump()};
            else if (j.is_string())
                item.inputs = {j.get<std::string>()};
            else if (j.is_array())
                for (const auto& v : j)
                    item.inputs.push_back(v.is_string() ? v.get<std::string>() : v.dump());
            else
                throw CLI::ConversionError("unsupported config value for " + name);
        }
        return results;
    }
};

std::set<std::string> parse_speaker_list(const std::string& csv) {
    std::set<std::string> out;
    std::stringstream ss(csv);
    std::string item;
    while (std::getline(ss, item, ','))
        if (!item.empty()) out.insert(item);
    return out;
}

json segment_json(const vowelrec::VowelSegment& seg) {
    return {{"start_s", seg.start_seconds()},
            {"end_s", seg.end_seconds()},
            {"noise_ceiling", seg.noise_ceiling},
            {"threshold", seg.threshold}};
}

int run(int argc, char** argv) {
    CLI::App app{"Persian-style consonant-vowel corpus tools and vowel recognition"};
    app.config_formatter(std::make_shared<ConfigJson>());
    app.set_config("--config", "", "JSON config file mirroring the flags");
    app.require_subcommand(1);

    std::string profiles_path = std::string(VOWELREC_DATA_DIR) + "/vowel_profiles.json";

    // synth
    auto* synth = app.add_subcommand("synth", "generate a synthetic corpus");
    std::size_t synth_speakers = 4;
    std::uint64_t synth_seed = 1;
    std::string synth_out;
    std::uint32_t synth_rate = 16000;
    std::vector<std::string> synth_consonants;
    synth->add_option("--speakers", synth_speakers, "number of synthetic speakers");
    synth->add_option("--seed", synth_seed, "corpus seed");
    synth->add_option("--out", synth_out, "output directory")->required();
    synth->add_option("--sample-rate", synth_rate, "synthesis sample rate (Hz)");
    synth->add_option("--consonants", synth_consonants,
                      "restrict the consonant inventory (comma separated)")
        ->delimiter(',');
    synth->add_option("--profiles", profiles_path, "vowel formant profile file");

    // segment
    auto* segment = app.add_subcommand("segment", "locate the vowel in a WAV file");
    std::string segment_file;
    bool segment_as_json = false;
    segment->add_option("file", segment_file, "input WAV")->required();
    segment->add_flag("--json", segment_as_json, "emit JSON");

    // features
    auto* features = app.add_subcommand("features", "write MFCC features as CSV");
    std::string features_file, features_out;
    features->add_option("file", features_file, "input WAV")->required();
    features->add_option("--out", features_out, "output CSV path")->required();

    // train
    auto* train = app.add_subcommand("train", "train a vowel classifier");
    std::string train_manifest, train_test_speakers, train_model_out;
    std::size_t train_epochs = 1000, train_hidden = 50;
    std::uint64_t train_seed = 0;
    double train_gamma = 0.5;
    train->add_option("--manifest", train_manifest, "corpus manifest CSV")->required();
    train->add_option("--test-speakers", train_test_speakers,
                      "comma-separated speakers to hold out (default: last two)");
    train->add_option("--model", train_model_out, "model output path")->required();
    train->add_option("--epochs", train_epochs, "max training iterations");
    train->add_option("--seed", train_seed, "weight init seed");
    train->add_option("--gamma", train_gamma, "regularization ratio in [0,1]");
    train->add_option("--hidden", train_hidden, "hidden layer size");

    // eval
    auto* eval = app.add_subcommand("eval", "per-vowel recognition on a manifest");
    std::string eval_model, eval_manifest;
    bool eval_as_json = false;
    eval->add_option("--model", eval_model, "model file")->required();
    eval->add_option("--manifest", eval_manifest, "test manifest CSV")->required();
    eval->add_flag("--json", eval_as_json, "emit JSON");

    // predict
    auto* predict = app.add_subcommand("predict", "classify one WAV file");
    std::string predict_model, predict_file_arg;
    predict->add_option("--model", predict_model, "model file")->required();
    predict->add_option("file", predict_file_arg, "input WAV")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);  // prints message or help text
        return code == 0 ? 0 : 1;      // any usage problem maps to 1
    }

    if (synth->parsed()) {
        vowelrec::CorpusConfig cfg;
        cfg.out_dir = synth_out;
        cfg.n_speakers = synth_speakers;
        cfg.seed = synth_seed;
        cfg.sample_rate = synth_rate;
        cfg.consonants = synth_consonants;
        cfg.profiles = vowelrec::load_vowel_profiles(profiles_path);
        const vowelrec::Manifest manifest = vowelrec::generate_corpus(cfg);
        std::cout << "wrote " << manifest.entries.size() << " clips under " << synth_out
                  << " (manifest: " << (cfg.out_dir / "corpus.csv").string() << ")\n";
        return 0;
    }

    if (segment->parsed()) {
        const auto clip = vowelrec::read_wav(segment_file);
        const auto seg = vowelrec::extract_vowel(clip);
        if (segment_as_json) {
            std::cout << segment_json(seg).dump() << '\n';
        } else {
            std::printf("vowel segment: %.3fs .. %.3fs (noise ceiling %.6g, threshold %.6g)\n",
                        seg.start_seconds(), seg.end_seconds(), seg.noise_ceiling,
                        seg.threshold);
        }
        return 0;
    }

    if (features->parsed()) {
        const auto clip = vowelrec::read_wav(features_file);
        const auto seg = vowelrec::extract_vowel(clip);
        const vowelrec::MfccConfig cfg;
        const auto matrix = vowelrec::mfcc(clip, seg, cfg);

        std::ofstream csv(features_out, std::ios::trunc);
        if (!csv) throw vowelrec::IoFailure("cannot write " + features_out);
        for (std::size_t t = 0; t < matrix.n_frames; ++t) {
            for (std::size_t c = 0; c < matrix.n_coeffs; ++c) {
                char buf[40];
                std::snprintf(buf, sizeof buf, "%.10g", matrix.at(t, c));
                csv << buf << (c + 1 == matrix.n_coeffs ? '\n' : ',');
            }
        }
        json snapshot = {{"frame_ms", cfg.frame_ms},     {"hop_ms", cfg.hop_ms},
                         {"n_bands", cfg.n_bands},       {"n_coeffs", cfg.n_coeffs},
                         {"fmin_hz", cfg.fmin_hz},       {"fmax_hz", cfg.fmax_hz},
                         {"log_floor", cfg.log_floor},   {"preemphasis", cfg.preemphasis},
                         {"sample_rate", clip.sample_rate}, {"n_fft", matrix.n_fft},
                         {"n_frames", matrix.n_frames},  {"segment", segment_json(seg)}};
        std::ofstream js(features_out + ".json", std::ios::trunc);
        js << snapshot.dump(2) << '\n';
        std::cout << "wrote " << matrix.n_frames << " x " << matrix.n_coeffs
                  << " coefficients to " << features_out << '\n';
        return 0;
    }

    if (train->parsed()) {
        const auto manifest = vowelrec::read_manifest(train_manifest);
        std::set<std::string> held_out = parse_speaker_list(train_test_speakers);
        if (held_out.empty()) {
            // default protocol: all but the last two speakers train
            const auto speakers = manifest.speakers();
            if (speakers.size() < 2)
                throw vowelrec::EmptySplit("need at least two speakers to hold any out");
            held_out.insert(speakers[speakers.size() - 1]);
            if (speakers.size() > 2) held_out.insert(speakers[speakers.size() - 2]);
        }
        auto [train_set, test_set] = vowelrec::split_by_speaker(manifest, held_out);

        vowelrec::TrainOptions opts;
        opts.max_epochs = train_epochs;
        opts.seed = train_seed;
        opts.reg_ratio = train_gamma;
        const vowelrec::FrontendConfig frontend;

        auto result = vowelrec::train_pipeline(train_set, frontend, opts, train_hidden);
        vowelrec::save_model(result.model, train_model_out);
        vowelrec::write_manifest(test_set, train_model_out + ".test.csv");

        const char* reason = result.report.stop_reason == vowelrec::StopReason::MaxEpochs
                                 ? "max epochs"
                             : result.report.stop_reason ==
                                     vowelrec::StopReason::GradientTolerance
                                 ? "gradient tolerance"
                                 : "performance goal";
        std::cout << "trained on " << train_set.entries.size() << " entries ("
                  << result.report.skipped_entries << " skipped), held out";
        for (const auto& s : held_out) std::cout << ' ' << s;
        std::cout << "\niterations " << result.report.iterations << ", stop: " << reason
                  << ", final objective " << result.report.final_performance << '\n'
                  << "model written to " << train_model_out << '\n';
        return 0;
    }

    if (eval->parsed()) {
        const auto model = vowelrec::load_model(eval_model);
        const auto manifest = vowelrec::read_manifest(eval_manifest);
        const auto report = vowelrec::evaluate(model, manifest);
        if (eval_as_json)
            std::cout << report.to_json().dump() << '\n';
        else
            std::cout << report.to_table();
        return 0;
    }

    if (predict->parsed()) {
        const auto model = vowelrec::load_model(predict_model);
        const auto result = vowelrec::predict_file(model, predict_file_arg);
        json j;
        j["label"] = std::string(vowelrec::vowel_name(result.label));
        j["scores"] = result.scores;
        j["segment"] = segment_json(result.segment);
        std::cout << j.dump() << '\n';
        return 0;
    }

    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const vowelrec::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
}
