#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <unistd.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>

#include <json.hpp>

#include "vowelrec/errors.hpp"
#include "vowelrec/mlp.hpp"
#include "vowelrec/rng.hpp"

using namespace vowelrec;
namespace fs = std::filesystem;

namespace {

fs::path temp_root() {
    static const fs::path dir = [] {
        auto d =
            fs::temp_directory_path() / ("vowelrec_mlp_" + std::to_string(::getpid()));
        fs::create_directories(d);
        return d;
    }();
    return dir;
}

Dataset random_batch(Rng& rng, std::size_t examples, std::size_t inputs,
                     std::size_t outputs) {
    Dataset d;
    d.inputs = Matrix(examples, inputs);
    d.targets = Matrix(examples, outputs);
    for (auto& v : d.inputs.data) v = rng.uniform(-2.0, 2.0);
    for (std::size_t e = 0; e < examples; ++e)
        d.targets.at(e, static_cast<std::size_t>(
                            rng.uniform_int(0, static_cast<std::int64_t>(outputs) - 1))) =
            1.0;
    return d;
}

// independent oracle: central finite differences over `performance`
std::vector<double> fd_gradient(MlpModel model, const Dataset& batch, double gamma,
                                double eps) {
    const std::vector<double> theta = get_parameters(model);
    std::vector<double> g(theta.size());
    for (std::size_t i = 0; i < theta.size(); ++i) {
        std::vector<double> t = theta;
        t[i] = theta[i] + eps;
        set_parameters(model, t);
        const double plus = performance(model, batch, gamma);
        t[i] = theta[i] - eps;
        set_parameters(model, t);
        const double minus = performance(model, batch, gamma);
        g[i] = (plus - minus) / (2.0 * eps);
    }
    return g;
}

// guarded relative error; the 1e-4 floor keeps near-zero components from
// inflating the ratio
double max_relative_error(const std::vector<double>& a, const std::vector<double>& b) {
    double worst = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double scale = std::max({std::abs(a[i]), std::abs(b[i]), 1e-4});
        worst = std::max(worst, std::abs(a[i] - b[i]) / scale);
    }
    return worst;
}

Dataset xor_batch() {
    Dataset d;
    d.inputs = Matrix(4, 2);
    d.targets = Matrix(4, 1);
    const double in[4][2] = {{0, 0}, {0, 1}, {1, 0}, {1, 1}};
    const double out[4] = {0, 1, 1, 0};
    for (std::size_t e = 0; e < 4; ++e) {
        d.inputs.at(e, 0) = in[e][0];
        d.inputs.at(e, 1) = in[e][1];
        d.targets.at(e, 0) = out[e];
    }
    return d;
}

}  // namespace

TEST_CASE("init: deterministic, Glorot-bounded, zero biases") {
    const MlpModel a = init_model(50, 50, 6, 1234);
    const MlpModel b = init_model(50, 50, 6, 1234);
    CHECK(get_parameters(a) == get_parameters(b));

    const double bound = std::sqrt(6.0 / 100.0);  // = 0.2449...
    CHECK(bound == doctest::Approx(0.2449489742783178).epsilon(1e-12));
    for (double w : a.w1.data) CHECK(std::abs(w) <= bound);
    for (double v : a.b1) CHECK(v == 0.0);
    for (double v : a.b2) CHECK(v == 0.0);

    const MlpModel c = init_model(50, 50, 6, 1235);
    CHECK(get_parameters(a) != get_parameters(c));
}

TEST_CASE("forward pass") {
    SUBCASE("all-zero parameters map everything to 0.5") {
        MlpModel m = init_model(4, 3, 2, 0);
        std::vector<double> zeros(parameter_count(m), 0.0);
        set_parameters(m, zeros);
        const auto res = forward(m, std::vector<double>{0.3, -1.0, 2.0, 0.0});
        for (double y : res.output) CHECK(y == 0.5);
    }
    SUBCASE("outputs stay strictly inside (0,1)") {
        Rng rng(2);
        const MlpModel m = init_model(5, 7, 3, 9);
        for (int t = 0; t < 20; ++t) {
            std::vector<double> x(5);
            for (auto& v : x) v = rng.uniform(-50.0, 50.0);
            for (double y : forward(m, x).output) {
                CHECK(y > 0.0);
                CHECK(y < 1.0);
            }
        }
    }
    SUBCASE("1-1-1 identity-weight chain gives sigmoid(sigmoid(0))") {
        MlpModel m = init_model(1, 1, 1, 0);
        set_parameters(m, std::vector<double>{1.0, 0.0, 1.0, 0.0});  // w1,b1,w2,b2
        const auto res = forward(m, std::vector<double>{0.0});
        CHECK(res.output[0] == doctest::Approx(0.6224593312018546).epsilon(1e-12));
    }
    SUBCASE("wrong input width is rejected") {
        const MlpModel m = init_model(4, 3, 2, 0);
        CHECK_THROWS_AS(forward(m, std::vector<double>{1.0}), DimensionMismatch);
    }
}

TEST_CASE("performance: endpoints of the gamma blend") {
    Rng rng(3);
    MlpModel m = init_model(4, 3, 2, 7);
    const Dataset batch = random_batch(rng, 6, 4, 2);

    SUBCASE("zero parameters and 0.5 targets give zero objective") {
        MlpModel z = init_model(4, 3, 2, 0);
        set_parameters(z, std::vector<double>(parameter_count(z), 0.0));
        Dataset half = batch;
        for (auto& t : half.targets.data) t = 0.5;
        CHECK(performance(z, half, 0.5) == 0.0);
    }
    SUBCASE("gamma 0 is plain MSE, gamma 1 ignores the data") {
        const double p0 = performance(m, batch, 0.0);
        const double p1 = performance(m, batch, 1.0);
        const double phalf = performance(m, batch, 0.5);
        CHECK(phalf == doctest::Approx(0.5 * p0 + 0.5 * p1).epsilon(1e-12));

        const Dataset other = [&] {
            Rng r2(99);
            return random_batch(r2, 9, 4, 2);
        }();
        CHECK(performance(m, other, 1.0) == doctest::Approx(p1).epsilon(1e-12));
    }
    SUBCASE("empty batch is rejected") {
        Dataset empty;
        empty.inputs = Matrix(0, 4);
        empty.targets = Matrix(0, 2);
        CHECK_THROWS_AS(performance(m, empty, 0.5), EmptyBatch);
    }
}

TEST_CASE("gradient matches central finite differences on random small nets") {
    Rng rng(12345);
    double worst = 0.0;
    for (int instance = 0; instance < 100; ++instance) {
        MlpModel m = init_model(4, 3, 2, static_cast<std::uint64_t>(instance) + 1);
        // also randomize biases so their gradient path is exercised
        auto theta = get_parameters(m);
        for (auto& t : theta) t += 0.1 * rng.signed_unit();
        set_parameters(m, theta);

        const Dataset batch = random_batch(rng, 5, 4, 2);
        const double gamma = rng.uniform(0.0, 1.0);
        const auto analytic = gradient(m, batch, gamma);
        const auto numeric = fd_gradient(m, batch, gamma, 1e-5);
        worst = std::max(worst, max_relative_error(analytic, numeric));
    }
    CHECK(worst <= 1e-5);
}

TEST_CASE("gradient structure") {
    Rng rng(8);
    MlpModel m = init_model(3, 4, 2, 11);
    const Dataset batch = random_batch(rng, 5, 3, 2);

    SUBCASE("all-zero model with gamma=1 has zero gradient") {
        MlpModel z = init_model(3, 4, 2, 0);
        set_parameters(z, std::vector<double>(parameter_count(z), 0.0));
        for (double g : gradient(z, batch, 1.0)) CHECK(g == 0.0);
    }
    SUBCASE("gamma blend is linear in the endpoint gradients") {
        const auto g0 = gradient(m, batch, 0.0);
        const auto g1 = gradient(m, batch, 1.0);
        const auto gmix = gradient(m, batch, 0.3);
        for (std::size_t i = 0; i < gmix.size(); ++i)
            CHECK(gmix[i] == doctest::Approx(0.7 * g0[i] + 0.3 * g1[i]).epsilon(1e-12));
    }
}

TEST_CASE("SCG: monotone objective, determinism") {
    Rng rng(4);
    const Dataset batch = random_batch(rng, 20, 6, 3);
    TrainOptions opts;
    opts.max_epochs = 200;
    opts.seed = 5;

    MlpModel m = init_model(6, 8, 3, opts.seed);
    const TrainReport report = train_scg(m, batch, opts);

    REQUIRE(!report.performance.empty());
    for (std::size_t i = 1; i < report.performance.size(); ++i)
        CHECK(report.performance[i] <= report.performance[i - 1]);
    CHECK(report.final_performance == report.performance.back());
    CHECK(report.accepted_steps > 0);

    MlpModel m2 = init_model(6, 8, 3, opts.seed);
    train_scg(m2, batch, opts);
    CHECK(get_parameters(m) == get_parameters(m2));  // bit-identical
    CHECK(m.norm_mean == m2.norm_mean);
}

TEST_CASE("SCG solves XOR for at least 9 of 10 seeds") {
    const Dataset batch = xor_batch();
    int solved = 0;
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        MlpModel m = init_model(2, 4, 1, seed);
        TrainOptions opts;
        opts.max_epochs = 500;
        opts.reg_ratio = 0.0;  // plain MSE for the benchmark
        opts.performance_goal = 0.05;
        opts.seed = seed;
        const TrainReport report = train_scg(m, batch, opts);
        if (report.final_performance < 0.05) ++solved;
    }
    CHECK(solved >= 9);
}

TEST_CASE("SCG rejects non-finite data") {
    Dataset bad;
    bad.inputs = Matrix(2, 2);
    bad.targets = Matrix(2, 1);
    bad.inputs.at(0, 0) = std::numeric_limits<double>::quiet_NaN();
    MlpModel m = init_model(2, 2, 1, 0);
    CHECK_THROWS_AS(train_scg(m, bad, TrainOptions{}), NonFiniteObjective);
}

TEST_CASE("predict: argmax with low-index tie break") {
    MlpModel m = init_model(2, 2, 6, 0);
    m.labels = vowel_label_order();

    SUBCASE("clear winner maps through the label order") {
        // craft output activations via b2 with zero w2
        std::vector<double> theta(parameter_count(m), 0.0);
        // parameter layout: w1(2x2=4), b1(2), w2(6x2=12), b2(6)
        theta[4 + 2 + 12 + 0] = 2.0;  // favor output 0
        set_parameters(m, theta);
        CHECK(predict(m, std::vector<double>{0.0, 0.0}).label == Vowel::A);
    }
    SUBCASE("exact tie goes to the lower index") {
        set_parameters(m, std::vector<double>(parameter_count(m), 0.0));
        // all outputs 0.5 -> first label wins
        CHECK(predict(m, std::vector<double>{0.3, 0.4}).label == Vowel::A);
    }
    SUBCASE("any increasing transform of the scores keeps the argmax") {
        Rng rng(6);
        for (int t = 0; t < 20; ++t) {
            MlpModel r = init_model(3, 4, 6, static_cast<std::uint64_t>(t) + 100);
            r.labels = vowel_label_order();
            std::vector<double> x{rng.signed_unit(), rng.signed_unit(), rng.signed_unit()};
            const Prediction p = predict(r, x);
            std::vector<double> transformed = p.scores;
            for (auto& s : transformed) s = std::exp(3.0 * s) - 0.5;  // increasing
            const auto best = static_cast<std::size_t>(
                std::max_element(transformed.begin(), transformed.end()) -
                transformed.begin());
            CHECK(r.labels[best] == p.label);
        }
    }
}

TEST_CASE("model serialization") {
    Rng rng(10);
    MlpModel m = init_model(5, 4, 6, 3);
    m.labels = vowel_label_order();
    m.frontend = {{"mfcc", {{"frame_ms", 20.0}}}};
    auto theta = get_parameters(m);
    for (auto& t : theta) t += rng.signed_unit();
    set_parameters(m, theta);
    m.norm_mean.assign(5, 1.25);
    m.norm_std.assign(5, 0.75);

    const fs::path path = temp_root() / "model.json";
    save_model(m, path);

    SUBCASE("round trip is bit-exact") {
        const MlpModel back = load_model(path);
        CHECK(get_parameters(back) == get_parameters(m));
        CHECK(back.norm_mean == m.norm_mean);
        CHECK(back.norm_std == m.norm_std);
        CHECK(back.labels == m.labels);
        CHECK(back.frontend == m.frontend);
        CHECK(back.config.n_hidden == 4);
    }
    SUBCASE("unknown format version is rejected") {
        nlohmann::json j;
        std::ifstream(path) >> j;
        j["format_version"] = 999;
        const fs::path bad = temp_root() / "model_v999.json";
        std::ofstream(bad) << j.dump();
        CHECK_THROWS_AS(load_model(bad), VersionMismatch);
    }
    SUBCASE("truncated file is malformed") {
        std::ifstream in(path);
        std::string text((std::istreambuf_iterator<char>(in)),
                         std::istreambuf_iterator<char>());
        const fs::path bad = temp_root() / "model_trunc.json";
        std::ofstream(bad) << text.substr(0, text.size() / 2);
        CHECK_THROWS_AS(load_model(bad), MalformedModelFile);
    }
    SUBCASE("missing fields are malformed") {
        nlohmann::json j;
        std::ifstream(path) >> j;
        j.erase("w2");
        const fs::path bad = temp_root() / "model_missing.json";
        std::ofstream(bad) << j.dump();
        CHECK_THROWS_AS(load_model(bad), MalformedModelFile);
    }
}
