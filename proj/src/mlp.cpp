#include "vowelrec/mlp.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "vowelrec/errors.hpp"
#include "vowelrec/rng.hpp"

namespace vowelrec {
namespace {

double sigmoid(double t) { return 1.0 / (1.0 + std::exp(-t)); }

void check_batch(const MlpModel& model, const Dataset& batch) {
    if (batch.inputs.rows == 0) throw EmptyBatch("empty training batch");
    if (batch.inputs.rows != batch.targets.rows)
        throw DimensionMismatch("inputs/targets row mismatch");
    if (batch.inputs.cols != model.config.n_inputs)
        throw DimensionMismatch("input width does not match the model");
    if (batch.targets.cols != model.config.n_outputs)
        throw DimensionMismatch("target width does not match the model");
}

std::vector<double> normalize_input(const MlpModel& model, std::span<const double> x) {
    std::vector<double> z(x.size());
    for (std::size_t i = 0; i < x.size(); ++i)
        z[i] = (x[i] - model.norm_mean[i]) / model.norm_std[i];
    return z;
}

// forward pass on an already-normalized input
void forward_normalized(const MlpModel& m, const std::vector<double>& z,
                        std::vector<double>& hidden, std::vector<double>& output) {
    const auto nh = m.config.n_hidden;
    const auto no = m.config.n_outputs;
    const auto ni = m.config.n_inputs;
    hidden.resize(nh);
    for (std::size_t h = 0; h < nh; ++h) {
        double a = m.b1[h];
        const double* wr = m.w1.row(h);
        for (std::size_t i = 0; i < ni; ++i) a += wr[i] * z[i];
        hidden[h] = sigmoid(a);
    }
    output.resize(no);
    for (std::size_t o = 0; o < no; ++o) {
        double a = m.b2[o];
        const double* wr = m.w2.row(o);
        for (std::size_t h = 0; h < nh; ++h) a += wr[h] * hidden[h];
        output[o] = sigmoid(a);
    }
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
    return acc;
}

nlohmann::json matrix_to_json(const Matrix& m) {
    nlohmann::json rows = nlohmann::json::array();
    for (std::size_t r = 0; r < m.rows; ++r)
        rows.push_back(std::vector<double>(m.row(r), m.row(r) + m.cols));
    return rows;
}

Matrix matrix_from_json(const nlohmann::json& j) {
    Matrix m;
    m.rows = j.size();
    m.cols = m.rows == 0 ? 0 : j.at(0).size();
    m.data.reserve(m.rows * m.cols);
    for (const auto& row : j) {
        if (row.size() != m.cols) throw MalformedModelFile("ragged weight matrix");
        for (const auto& v : row) m.data.push_back(v.get<double>());
    }
    return m;
}

}  // namespace

MlpModel init_model(std::size_t n_inputs, std::size_t n_hidden, std::size_t n_outputs,
                    std::uint64_t seed) {
    MlpModel m;
    m.config = {n_inputs, n_hidden, n_outputs, true};
    m.w1 = Matrix(n_hidden, n_inputs);
    m.b1.assign(n_hidden, 0.0);
    m.w2 = Matrix(n_outputs, n_hidden);
    m.b2.assign(n_outputs, 0.0);
    m.norm_mean.assign(n_inputs, 0.0);
    m.norm_std.assign(n_inputs, 1.0);

    Rng rng(mix_seed(seed, 0x1417ull));
    const double r1 = std::sqrt(6.0 / static_cast<double>(n_inputs + n_hidden));
    for (auto& w : m.w1.data) w = rng.signed_unit() * r1;
    const double r2 = std::sqrt(6.0 / static_cast<double>(n_hidden + n_outputs));
    for (auto& w : m.w2.data) w = rng.signed_unit() * r2;
    return m;
}

ForwardResult forward(const MlpModel& model, std::span<const double> x) {
    if (x.size() != model.config.n_inputs)
        throw DimensionMismatch("feature length " + std::to_string(x.size()) +
                                " does not match model input " +
                                std::to_string(model.config.n_inputs));
    ForwardResult res;
    forward_normalized(model, normalize_input(model, x), res.hidden, res.output);
    return res;
}

double performance(const MlpModel& model, const Dataset& batch, double reg_ratio) {
    check_batch(model, batch);
    const std::size_t n = batch.inputs.rows;
    const std::size_t k = model.config.n_outputs;

    double se = 0.0;
    std::vector<double> hidden, output, z;
    for (std::size_t e = 0; e < n; ++e) {
        z = normalize_input(model, {batch.inputs.row(e), batch.inputs.cols});
        forward_normalized(model, z, hidden, output);
        for (std::size_t o = 0; o < k; ++o) {
            const double d = output[o] - batch.targets.at(e, o);
            se += d * d;
        }
    }
    const double mse = se / static_cast<double>(n * k);

    double sw = 0.0;
    for (double w : model.w1.data) sw += w * w;
    for (double w : model.w2.data) sw += w * w;
    if (model.config.msw_includes_biases) {
        for (double b : model.b1) sw += b * b;
        for (double b : model.b2) sw += b * b;
    }
    const double msw = sw / static_cast<double>(parameter_count(model));

    return (1.0 - reg_ratio) * mse + reg_ratio * msw;
}

std::vector<double> gradient(const MlpModel& model, const Dataset& batch,
                             double reg_ratio) {
    check_batch(model, batch);
    const std::size_t n = batch.inputs.rows;
    const std::size_t ni = model.config.n_inputs;
    const std::size_t nh = model.config.n_hidden;
    const std::size_t no = model.config.n_outputs;

    Matrix gw1(nh, ni), gw2(no, nh);
    std::vector<double> gb1(nh, 0.0), gb2(no, 0.0);

    const double mse_scale = 2.0 / static_cast<double>(n * no);
    std::vector<double> hidden, output, z, delta2(no), delta1(nh);
    for (std::size_t e = 0; e < n; ++e) {
        z = normalize_input(model, {batch.inputs.row(e), batch.inputs.cols});
        forward_normalized(model, z, hidden, output);

        for (std::size_t o = 0; o < no; ++o) {
            const double y = output[o];
            delta2[o] = mse_scale * (y - batch.targets.at(e, o)) * y * (1.0 - y);
        }
        for (std::size_t h = 0; h < nh; ++h) {
            double acc = 0.0;
            for (std::size_t o = 0; o < no; ++o) acc += model.w2.at(o, h) * delta2[o];
            delta1[h] = acc * hidden[h] * (1.0 - hidden[h]);
        }
        for (std::size_t o = 0; o < no; ++o) {
            gb2[o] += delta2[o];
            double* row = gw2.data.data() + o * nh;
            for (std::size_t h = 0; h < nh; ++h) row[h] += delta2[o] * hidden[h];
        }
        for (std::size_t h = 0; h < nh; ++h) {
            gb1[h] += delta1[h];
            double* row = gw1.data.data() + h * ni;
            for (std::size_t i = 0; i < ni; ++i) row[i] += delta1[h] * z[i];
        }
    }

    // flatten in parameter order and blend in the weight-decay term
    const std::size_t p_count = parameter_count(model);
    const double msw_scale = 2.0 / static_cast<double>(p_count);
    std::vector<double> g;
    g.reserve(p_count);
    const double data_w = 1.0 - reg_ratio;
    for (std::size_t i = 0; i < gw1.data.size(); ++i)
        g.push_back(data_w * gw1.data[i] + reg_ratio * msw_scale * model.w1.data[i]);
    for (std::size_t i = 0; i < gb1.size(); ++i)
        g.push_back(data_w * gb1[i] +
                    (model.config.msw_includes_biases
                         ? reg_ratio * msw_scale * model.b1[i]
                         : 0.0));
    for (std::size_t i = 0; i < gw2.data.size(); ++i)
        g.push_back(data_w * gw2.data[i] + reg_ratio * msw_scale * model.w2.data[i]);
    for (std::size_t i = 0; i < gb2.size(); ++i)
        g.push_back(data_w * gb2[i] +
                    (model.config.msw_includes_biases
                         ? reg_ratio * msw_scale * model.b2[i]
                         : 0.0));
    return g;
}

std::size_t parameter_count(const MlpModel& model) {
    return model.w1.data.size() + model.b1.size() + model.w2.data.size() +
           model.b2.size();
}

std::vector<double> get_parameters(const MlpModel& model) {
    std::vector<double> p;
    p.reserve(parameter_count(model));
    p.insert(p.end(), model.w1.data.begin(), model.w1.data.end());
    p.insert(p.end(), model.b1.begin(), model.b1.end());
    p.insert(p.end(), model.w2.data.begin(), model.w2.data.end());
    p.insert(p.end(), model.b2.begin(), model.b2.end());
    return p;
}

void set_parameters(MlpModel& model, std::span<const double> params) {
    if (params.size() != parameter_count(model))
        throw DimensionMismatch("parameter vector length mismatch");
    std::size_t pos = 0;
    auto take = [&](double* dst, std::size_t count) {
        std::copy(params.begin() + static_cast<std::ptrdiff_t>(pos),
                  params.begin() + static_cast<std::ptrdiff_t>(pos + count), dst);
        pos += count;
    };
    take(model.w1.data.data(), model.w1.data.size());
    take(model.b1.data(), model.b1.size());
    take(model.w2.data.data(), model.w2.data.size());
    take(model.b2.data(), model.b2.size());
}

TrainReport train_scg(MlpModel& model, const Dataset& data, const TrainOptions& opts) {
    check_batch(model, data);
    if (opts.reg_ratio < 0.0 || opts.reg_ratio > 1.0)
        throw Error("reg_ratio must lie in [0, 1]");
    if (opts.max_epochs < 1) throw Error("max_epochs must be at least 1");
    if (opts.gradient_tolerance <= 0.0 || opts.performance_goal <= 0.0 ||
        opts.sigma0 <= 0.0 || opts.lambda_init <= 0.0)
        throw Error("tolerances and SCG constants must be positive");

    // z-score statistics from the training data, frozen before optimizing;
    // constant features get std 1 so they pass through unchanged
    const std::size_t ni = model.config.n_inputs;
    const std::size_t n = data.inputs.rows;
    model.norm_mean.assign(ni, 0.0);
    model.norm_std.assign(ni, 0.0);
    for (std::size_t e = 0; e < n; ++e)
        for (std::size_t i = 0; i < ni; ++i) model.norm_mean[i] += data.inputs.at(e, i);
    for (auto& v : model.norm_mean) v /= static_cast<double>(n);
    for (std::size_t e = 0; e < n; ++e)
        for (std::size_t i = 0; i < ni; ++i) {
            const double d = data.inputs.at(e, i) - model.norm_mean[i];
            model.norm_std[i] += d * d;
        }
    for (auto& v : model.norm_std) {
        v = std::sqrt(v / static_cast<double>(n));
        if (v <= 0.0) v = 1.0;
    }

    const double gamma = opts.reg_ratio;
    const std::size_t p_count = parameter_count(model);

    auto eval_perf = [&] { return performance(model, data, gamma); };
    auto eval_grad = [&] { return gradient(model, data, gamma); };

    std::vector<double> w = get_parameters(model);
    double perf = eval_perf();
    std::vector<double> grad = eval_grad();
    if (!std::isfinite(perf)) throw NonFiniteObjective("initial objective not finite");
    for (double gv : grad)
        if (!std::isfinite(gv)) throw NonFiniteObjective("initial gradient not finite");

    std::vector<double> r(grad.size());
    for (std::size_t i = 0; i < grad.size(); ++i) r[i] = -grad[i];
    std::vector<double> p = r;

    TrainReport report;
    report.performance.reserve(opts.max_epochs);

    double lambda = opts.lambda_init;
    double lambda_bar = 0.0;
    bool success = true;
    double delta_raw = 0.0;
    double norm_p2 = 0.0;
    double mu = 0.0;
    std::vector<double> candidate(w.size()), r_new(w.size());

    auto grad_norm = [&] { return std::sqrt(dot(r, r)); };

    if (grad_norm() < opts.gradient_tolerance) {
        report.stop_reason = StopReason::GradientTolerance;
        report.final_performance = perf;
        return report;
    }
    if (perf < opts.performance_goal) {
        report.stop_reason = StopReason::PerformanceGoal;
        report.final_performance = perf;
        return report;
    }

    report.stop_reason = StopReason::MaxEpochs;
    for (std::size_t k = 1; k <= opts.max_epochs; ++k) {
        if (success) {
            mu = dot(p, r);
            if (mu <= 0.0) {  // direction lost descent property; reset
                p = r;
                mu = dot(r, r);
            }
            norm_p2 = dot(p, p);
            if (norm_p2 == 0.0) {
                report.stop_reason = StopReason::GradientTolerance;
                break;
            }
            // second-order information from a sigma-scaled gradient probe
            const double sigma_k = opts.sigma0 / std::sqrt(norm_p2);
            for (std::size_t i = 0; i < w.size(); ++i)
                candidate[i] = w[i] + sigma_k * p[i];
            set_parameters(model, candidate);
            const std::vector<double> grad_probe = eval_grad();
            delta_raw = 0.0;
            for (std::size_t i = 0; i < w.size(); ++i)
                delta_raw += p[i] * (grad_probe[i] + r[i]) / sigma_k;
            if (!std::isfinite(delta_raw))
                throw NonFiniteObjective("curvature estimate not finite");
        }

        // Levenberg-Marquardt scaling of the curvature
        double delta = delta_raw + (lambda - lambda_bar) * norm_p2;
        if (delta <= 0.0) {  // make the Hessian estimate positive definite
            lambda_bar = 2.0 * (lambda - delta / norm_p2);
            delta = -delta + lambda * norm_p2;
            lambda = lambda_bar;
        }

        const double alpha = mu / delta;
        for (std::size_t i = 0; i < w.size(); ++i) candidate[i] = w[i] + alpha * p[i];
        set_parameters(model, candidate);
        const double perf_candidate = eval_perf();

        const double comparison = std::isfinite(perf_candidate)
                                      ? 2.0 * delta * (perf - perf_candidate) / (mu * mu)
                                      : -1.0;

        if (comparison >= 0.0) {
            // accepted step
            w = candidate;
            perf = perf_candidate;
            const std::vector<double> g_new = eval_grad();
            double rn2 = 0.0, rn_dot_r = 0.0;
            for (std::size_t i = 0; i < w.size(); ++i) {
                r_new[i] = -g_new[i];
                rn2 += r_new[i] * r_new[i];
                rn_dot_r += r_new[i] * r[i];
            }
            lambda_bar = 0.0;
            success = true;
            ++report.accepted_steps;

            if (k % p_count == 0) {
                p = r_new;  // periodic restart
            } else {
                const double beta = (rn2 - rn_dot_r) / mu;
                for (std::size_t i = 0; i < w.size(); ++i)
                    p[i] = r_new[i] + beta * p[i];
            }
            r = r_new;

            if (comparison > 0.75) lambda *= 0.5;
        } else {
            // rejected: restore parameters, raise lambda via the block below
            set_parameters(model, w);
            lambda_bar = lambda;
            success = false;
            ++report.rejected_steps;
        }
        if (comparison < 0.25) lambda *= 4.0;

        ++report.iterations;
        report.performance.push_back(perf);

        if (perf < opts.performance_goal) {
            report.stop_reason = StopReason::PerformanceGoal;
            break;
        }
        if (success && grad_norm() < opts.gradient_tolerance) {
            report.stop_reason = StopReason::GradientTolerance;
            break;
        }
    }

    set_parameters(model, w);
    report.final_performance = perf;
    return report;
}

Prediction predict(const MlpModel& model, std::span<const double> x) {
    if (model.labels.size() != model.config.n_outputs)
        throw DimensionMismatch("model has no label mapping for its outputs");
    ForwardResult res = forward(model, x);
    std::size_t best = 0;
    for (std::size_t o = 1; o < res.output.size(); ++o)
        if (res.output[o] > res.output[best]) best = o;  // ties keep the lowest index
    return {model.labels[best], std::move(res.output)};
}

void save_model(const MlpModel& model, const std::filesystem::path& path) {
    for (double v : get_parameters(model))
        if (!std::isfinite(v)) throw Error("refusing to save non-finite parameters");

    nlohmann::json j;
    j["format_version"] = MlpModel::kFormatVersion;
    j["config"] = {{"n_inputs", model.config.n_inputs},
                   {"n_hidden", model.config.n_hidden},
                   {"n_outputs", model.config.n_outputs},
                   {"msw_includes_biases", model.config.msw_includes_biases}};
    j["frontend"] = model.frontend;
    nlohmann::json labels = nlohmann::json::array();
    for (Vowel v : model.labels) labels.push_back(std::string(vowel_name(v)));
    j["labels"] = labels;
    j["norm_mean"] = model.norm_mean;
    j["norm_std"] = model.norm_std;
    j["w1"] = matrix_to_json(model.w1);
    j["b1"] = model.b1;
    j["w2"] = matrix_to_json(model.w2);
    j["b2"] = model.b2;

    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoFailure("cannot write model: " + path.string());
    out << j.dump() << '\n';
    if (!out) throw IoFailure("model write failed: " + path.string());
}

MlpModel load_model(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoFailure("cannot open model: " + path.string());
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw MalformedModelFile("model is not valid JSON: " + std::string(e.what()));
    }

    try {
        const int version = j.at("format_version").get<int>();
        if (version != MlpModel::kFormatVersion)
            throw VersionMismatch("model format_version " + std::to_string(version) +
                                  " is not supported");

        MlpModel m;
        const auto& jc = j.at("config");
        m.config.n_inputs = jc.at("n_inputs").get<std::size_t>();
        m.config.n_hidden = jc.at("n_hidden").get<std::size_t>();
        m.config.n_outputs = jc.at("n_outputs").get<std::size_t>();
        m.config.msw_includes_biases = jc.at("msw_includes_biases").get<bool>();
        m.frontend = j.value("frontend", nlohmann::json::object());
        for (const auto& l : j.at("labels"))
            m.labels.push_back(parse_vowel(l.get<std::string>()));
        m.norm_mean = j.at("norm_mean").get<std::vector<double>>();
        m.norm_std = j.at("norm_std").get<std::vector<double>>();
        m.w1 = matrix_from_json(j.at("w1"));
        m.b1 = j.at("b1").get<std::vector<double>>();
        m.w2 = matrix_from_json(j.at("w2"));
        m.b2 = j.at("b2").get<std::vector<double>>();

        const bool shapes_ok = m.w1.rows == m.config.n_hidden &&
                               m.w1.cols == m.config.n_inputs &&
                               m.b1.size() == m.config.n_hidden &&
                               m.w2.rows == m.config.n_outputs &&
                               m.w2.cols == m.config.n_hidden &&
                               m.b2.size() == m.config.n_outputs &&
                               m.norm_mean.size() == m.config.n_inputs &&
                               m.norm_std.size() == m.config.n_inputs;
        if (!shapes_ok) throw MalformedModelFile("model dimensions are inconsistent");
        return m;
    } catch (const nlohmann::json::exception& e) {
        throw MalformedModelFile("model file missing fields: " + std::string(e.what()));
    }
}

}  // namespace vowelrec
