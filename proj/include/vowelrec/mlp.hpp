#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include <json.hpp>

#include "vowelrec/labels.hpp"

namespace vowelrec {

// Row-major dense matrix; enough linear algebra for a 50-unit MLP.
struct Matrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> data;

    Matrix() = default;
    Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}

    double& at(std::size_t r, std::size_t c) { return data[r * cols + c]; }
    double at(std::size_t r, std::size_t c) const { return data[r * cols + c]; }
    const double* row(std::size_t r) const { return data.data() + r * cols; }
};

// rows = examples; targets are one-hot rows
struct Dataset {
    Matrix inputs;
    Matrix targets;
};

struct MlpConfig {
    std::size_t n_inputs = 0;
    std::size_t n_hidden = 50;
    std::size_t n_outputs = 6;
    bool msw_includes_biases = true;
};

// Sigmoid MLP with one hidden layer plus the z-score statistics frozen at
// training time. `frontend` is an opaque snapshot the pipeline uses to
// replay the exact feature extraction at inference; it round-trips through
// the model file verbatim.
struct MlpModel {
    static constexpr int kFormatVersion = 1;

    MlpConfig config;
    Matrix w1;  // hidden x input
    std::vector<double> b1;
    Matrix w2;  // output x hidden
    std::vector<double> b2;
    std::vector<double> norm_mean;
    std::vector<double> norm_std;
    std::vector<Vowel> labels;
    nlohmann::json frontend = nlohmann::json::object();
};

struct TrainOptions {
    std::size_t max_epochs = 1000;
    double gradient_tolerance = 1e-6;
    double performance_goal = 1e-12;
    double reg_ratio = 0.5;  // gamma: (1-g)*MSE + g*MSW
    std::uint64_t seed = 0;
    double sigma0 = 5e-5;
    double lambda_init = 5e-7;
};

enum class StopReason { MaxEpochs, GradientTolerance, PerformanceGoal };

struct TrainReport {
    std::vector<double> performance;  // committed objective after each iteration
    StopReason stop_reason = StopReason::MaxEpochs;
    double final_performance = 0.0;
    std::size_t iterations = 0;
    std::size_t accepted_steps = 0;
    std::size_t rejected_steps = 0;
    std::size_t skipped_entries = 0;  // unsegmentable inputs, filled by the pipeline
};

// Glorot-uniform weights (|w| <= sqrt(6/(fan_in+fan_out))), zero biases,
// identity normalization. Deterministic per seed.
MlpModel init_model(std::size_t n_inputs, std::size_t n_hidden, std::size_t n_outputs,
                    std::uint64_t seed);

struct ForwardResult {
    std::vector<double> hidden;
    std::vector<double> output;  // each strictly in (0, 1)
};

// x is the raw feature vector; z-scoring happens inside.
ForwardResult forward(const MlpModel& model, std::span<const double> x);

// (1-gamma)*MSE + gamma*MSW. MSE averages over (example, output) pairs,
// MSW over every weight and bias.
double performance(const MlpModel& model, const Dataset& batch, double reg_ratio);

// Analytic gradient of `performance` over the flat parameter vector
// (w1 row-major, b1, w2 row-major, b2).
std::vector<double> gradient(const MlpModel& model, const Dataset& batch,
                             double reg_ratio);

std::size_t parameter_count(const MlpModel& model);
std::vector<double> get_parameters(const MlpModel& model);
void set_parameters(MlpModel& model, std::span<const double> params);

// Moller's scaled conjugate gradient, full batch. Computes the z-score
// statistics from the dataset, freezes them into the model, then optimizes.
TrainReport train_scg(MlpModel& model, const Dataset& data, const TrainOptions& opts);

struct Prediction {
    Vowel label;
    std::vector<double> scores;
};

// Argmax over outputs mapped through model.labels; ties break to the
// lowest index.
Prediction predict(const MlpModel& model, std::span<const double> x);

// Versioned JSON, numerically lossless round trip.
void save_model(const MlpModel& model, const std::filesystem::path& path);
MlpModel load_model(const std::filesystem::path& path);

}  // namespace vowelrec
