#include "rominv/lstm.hpp"

#include <cmath>
#include <fstream>

#include <json.hpp>

#include "rominv/csv.hpp"

namespace rominv {

namespace {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::RowVectorXd;
using Eigen::VectorXd;

VectorXd sigmoid(const VectorXd& v) { return (1.0 / (1.0 + (-v.array()).exp())).matrix(); }

void check_gate_dims(const Eigen::VectorXd& x, const LstmState& s, const GateWeights& w) {
    const Index hidden = w.hidden();
    if (w.b.size() % 4 != 0 || w.w_x.rows() != 4 * hidden || w.w_h.rows() != 4 * hidden ||
        w.w_h.cols() != hidden)
        throw DimensionMismatchError("lstm_cell: inconsistent gate weight shapes");
    if (x.size() != w.input())
        throw DimensionMismatchError("lstm_cell: input size " + std::to_string(x.size()) +
                                     " != expected " + std::to_string(w.input()));
    if (s.h.size() != hidden || s.c.size() != hidden)
        throw DimensionMismatchError("lstm_cell: state size mismatch");
}

struct CellCache {
    VectorXd x, h_prev, c_prev;
    VectorXd i, f, g, o;
    VectorXd c, tanh_c, h;
};

LstmState cell_forward(const VectorXd& x, const LstmState& s, const GateWeights& w,
                       CellCache* cache) {
    check_gate_dims(x, s, w);
    const Index hidden = w.hidden();
    const VectorXd a = w.w_x * x + w.w_h * s.h + w.b;
    const VectorXd i = sigmoid(a.segment(0, hidden));
    const VectorXd f = sigmoid(a.segment(hidden, hidden));
    const VectorXd g = a.segment(2 * hidden, hidden).array().tanh().matrix();
    const VectorXd o = sigmoid(a.segment(3 * hidden, hidden));
    LstmState out;
    out.c = f.cwiseProduct(s.c) + i.cwiseProduct(g);
    const VectorXd tanh_c = out.c.array().tanh().matrix();
    out.h = o.cwiseProduct(tanh_c);
    if (cache) *cache = {x, s.h, s.c, i, f, g, o, out.c, tanh_c, out.h};
    return out;
}

// Backpropagates one cell. dh/dc are the loss gradients w.r.t. this cell's
// outputs; on return they hold the gradients w.r.t. the previous state, and
// dx (if non-null) the gradient w.r.t. the cell input.
void cell_backward(const CellCache& k, const GateWeights& w, GateWeights& grads, VectorXd& dh,
                   VectorXd& dc, VectorXd* dx) {
    const VectorXd do_ = dh.cwiseProduct(k.tanh_c);
    const VectorXd dct =
        dc + dh.cwiseProduct(k.o).cwiseProduct((1.0 - k.tanh_c.array().square()).matrix());
    const VectorXd di = dct.cwiseProduct(k.g);
    const VectorXd df = dct.cwiseProduct(k.c_prev);
    const VectorXd dg = dct.cwiseProduct(k.i);

    const Index hidden = w.hidden();
    VectorXd da(4 * hidden);
    da.segment(0, hidden) = di.cwiseProduct(k.i).cwiseProduct((1.0 - k.i.array()).matrix());
    da.segment(hidden, hidden) = df.cwiseProduct(k.f).cwiseProduct((1.0 - k.f.array()).matrix());
    da.segment(2 * hidden, hidden) = dg.cwiseProduct((1.0 - k.g.array().square()).matrix());
    da.segment(3 * hidden, hidden) =
        do_.cwiseProduct(k.o).cwiseProduct((1.0 - k.o.array()).matrix());

    grads.w_x += da * k.x.transpose();
    grads.w_h += da * k.h_prev.transpose();
    grads.b += da;

    if (dx) *dx = w.w_x.transpose() * da;
    dh = w.w_h.transpose() * da;
    dc = dct.cwiseProduct(k.f);
}

GateWeights zero_gates(Index hidden, Index input) {
    return {MatrixXd::Zero(4 * hidden, input), MatrixXd::Zero(4 * hidden, hidden),
            VectorXd::Zero(4 * hidden)};
}

void fill_uniform(MatrixXd& m, double bound, Rng& rng) {
    for (Index c = 0; c < m.cols(); ++c)
        for (Index r = 0; r < m.rows(); ++r) m(r, c) = rng.uniform(-bound, bound);
}

// Decoder unroll shared by inference and training. Returns the per-step head
// outputs; fills caches and per-step hidden states when requested.
std::vector<double> decoder_forward(const LstmState& init, std::size_t steps, double first_input,
                                    const LstmWeights& w, std::span<const double> teacher,
                                    std::vector<CellCache>* caches, DecodeTrace* trace) {
    if (steps == 0) throw DimensionMismatchError("decode: steps must be >= 1");
    if (!teacher.empty() && teacher.size() != steps)
        throw DimensionMismatchError("decode: teacher sequence length must equal steps");
    if (caches) caches->resize(steps);

    std::vector<double> outputs;
    outputs.reserve(steps);
    LstmState state = init;
    double input = first_input;
    VectorXd x(1);
    for (std::size_t k = 0; k < steps; ++k) {
        x(0) = input;
        if (trace) trace->inputs_consumed.push_back(input);
        state = cell_forward(x, state, w.dec, caches ? &(*caches)[k] : nullptr);
        const double y = w.head_w.dot(state.h) + w.head_b;
        outputs.push_back(y);
        input = teacher.empty() ? y : teacher[k];
    }
    return outputs;
}

} // namespace

LstmState lstm_cell(const Eigen::VectorXd& x, const LstmState& state, const GateWeights& w) {
    return cell_forward(x, state, w, nullptr);
}

LstmWeights LstmWeights::zeros(Index hidden) {
    LstmWeights w;
    w.hidden = hidden;
    w.enc = zero_gates(hidden, 2);
    w.dec = zero_gates(hidden, 1);
    w.head_w = RowVectorXd::Zero(hidden);
    w.head_b = 0.0;
    return w;
}

LstmWeights LstmWeights::random(Index hidden, Rng& rng, double scale, double forget_bias) {
    LstmWeights w = zeros(hidden);
    const double bound = scale > 0.0 ? scale : 1.0 / std::sqrt(static_cast<double>(hidden));
    fill_uniform(w.enc.w_x, bound, rng);
    fill_uniform(w.enc.w_h, bound, rng);
    for (Index i = 0; i < w.enc.b.size(); ++i) w.enc.b(i) = rng.uniform(-bound, bound);
    fill_uniform(w.dec.w_x, bound, rng);
    fill_uniform(w.dec.w_h, bound, rng);
    for (Index i = 0; i < w.dec.b.size(); ++i) w.dec.b(i) = rng.uniform(-bound, bound);
    for (Index i = 0; i < w.head_w.size(); ++i) w.head_w(i) = rng.uniform(-bound, bound);
    w.head_b = rng.uniform(-bound, bound);
    w.enc.b.segment(hidden, hidden).array() += forget_bias;
    w.dec.b.segment(hidden, hidden).array() += forget_bias;
    return w;
}

Eigen::Index LstmWeights::parameter_count() const {
    return enc.w_x.size() + enc.w_h.size() + enc.b.size() + dec.w_x.size() + dec.w_h.size() +
           dec.b.size() + head_w.size() + 1;
}

Eigen::VectorXd LstmWeights::flatten() const {
    VectorXd theta(parameter_count());
    Index at = 0;
    auto put = [&](const auto& m) {
        theta.segment(at, m.size()) = Eigen::Map<const VectorXd>(m.data(), m.size());
        at += m.size();
    };
    put(enc.w_x);
    put(enc.w_h);
    put(enc.b);
    put(dec.w_x);
    put(dec.w_h);
    put(dec.b);
    put(head_w);
    theta(at++) = head_b;
    return theta;
}

void LstmWeights::set_from_flat(const Eigen::VectorXd& theta) {
    if (theta.size() != parameter_count())
        throw DimensionMismatchError("set_from_flat: expected " +
                                     std::to_string(parameter_count()) + " parameters, got " +
                                     std::to_string(theta.size()));
    Index at = 0;
    auto take = [&](auto& m) {
        Eigen::Map<VectorXd>(m.data(), m.size()) = theta.segment(at, m.size());
        at += m.size();
    };
    take(enc.w_x);
    take(enc.w_h);
    take(enc.b);
    take(dec.w_x);
    take(dec.w_h);
    take(dec.b);
    take(head_w);
    head_b = theta(at++);
}

LstmState encode(std::span<const Eigen::Vector2d> inputs, const LstmWeights& w) {
    if (inputs.empty()) throw DimensionMismatchError("encode: empty input window");
    LstmState state = LstmState::zero(w.hidden);
    for (const auto& in : inputs) state = cell_forward(in, state, w.enc, nullptr);
    return state;
}

std::vector<double> decode(const LstmState& init, std::size_t steps, double first_input,
                           const LstmWeights& w, std::span<const double> teacher,
                           DecodeTrace* trace) {
    return decoder_forward(init, steps, first_input, w, teacher, nullptr, trace);
}

void adam_step(Eigen::VectorXd& params, const Eigen::VectorXd& grads, AdamState& state, double lr,
               double beta1, double beta2, double epsilon) {
    if (params.size() != grads.size() || params.size() != state.m.size())
        throw DimensionMismatchError("adam_step: parameter/gradient/state size mismatch");
    state.step += 1;
    state.m = beta1 * state.m + (1.0 - beta1) * grads;
    state.v = beta2 * state.v + (1.0 - beta2) * grads.cwiseProduct(grads);
    const double m_corr = 1.0 - std::pow(beta1, static_cast<double>(state.step));
    const double v_corr = 1.0 - std::pow(beta2, static_cast<double>(state.step));
    params.array() -=
        lr * (state.m.array() / m_corr) / ((state.v.array() / v_corr).sqrt() + epsilon);
}

double window_loss(std::span<const WindowSample> batch, const LstmWeights& w, bool teacher_forcing,
                   LstmWeights* grads) {
    if (batch.empty()) throw DimensionMismatchError("window_loss: empty batch");
    if (grads) *grads = LstmWeights::zeros(w.hidden);

    double total = 0.0;
    for (const WindowSample& sample : batch) {
        const std::size_t steps = sample.targets.size();
        if (steps == 0 || sample.inputs.size() != steps)
            throw DimensionMismatchError("window_loss: inputs/targets length mismatch");

        std::vector<CellCache> enc_caches(sample.inputs.size());
        LstmState state = LstmState::zero(w.hidden);
        for (std::size_t k = 0; k < sample.inputs.size(); ++k)
            state = cell_forward(sample.inputs[k], state, w.enc, &enc_caches[k]);

        std::vector<CellCache> dec_caches;
        const std::span<const double> teacher =
            teacher_forcing ? std::span<const double>(sample.targets) : std::span<const double>{};
        const std::vector<double> outputs =
            decoder_forward(state, steps, 0.0, w, teacher, &dec_caches, nullptr);

        double loss = 0.0;
        for (std::size_t k = 0; k < steps; ++k) {
            const double r = outputs[k] - sample.targets[k];
            loss += r * r;
        }
        loss *= sample.weight / static_cast<double>(steps);
        total += loss;

        if (!grads) continue;

        VectorXd dh = VectorXd::Zero(w.hidden);
        VectorXd dc = VectorXd::Zero(w.hidden);
        VectorXd dx(1);
        double dx_next = 0.0; // autoregressive path: d loss / d input of step k+1
        for (std::size_t k = steps; k-- > 0;) {
            double dy = 2.0 * sample.weight * (outputs[k] - sample.targets[k]) /
                        static_cast<double>(steps);
            if (!teacher_forcing && k + 1 < steps) dy += dx_next;
            grads->head_w += dy * dec_caches[k].h.transpose();
            grads->head_b += dy;
            dh += dy * w.head_w.transpose();
            cell_backward(dec_caches[k], w.dec, grads->dec, dh, dc, &dx);
            dx_next = dx(0);
        }
        // decoder initial states are the encoder final states
        for (std::size_t k = enc_caches.size(); k-- > 0;)
            cell_backward(enc_caches[k], w.enc, grads->enc, dh, dc, nullptr);
    }

    const double scale = 1.0 / static_cast<double>(batch.size());
    if (grads) {
        grads->enc.w_x *= scale;
        grads->enc.w_h *= scale;
        grads->enc.b *= scale;
        grads->dec.w_x *= scale;
        grads->dec.w_h *= scale;
        grads->dec.b *= scale;
        grads->head_w *= scale;
        grads->head_b *= scale;
    }
    return total * scale;
}

void TrainConfig::validate() const {
    if (epochs < 1) throw ConfigError("train config: epochs must be >= 1");
    if (!(learning_rate > 0.0)) throw ConfigError("train config: learning rate must be positive");
    if (!(beta1 > 0.0 && beta1 < 1.0) || !(beta2 > 0.0 && beta2 < 1.0))
        throw ConfigError("train config: betas must lie in (0, 1)");
    if (!(epsilon > 0.0)) throw ConfigError("train config: epsilon must be positive");
    if (hidden < 1) throw ConfigError("train config: hidden size must be >= 1");
    if (!(lr_decay > 0.0 && lr_decay <= 1.0))
        throw ConfigError("train config: lr decay must lie in (0, 1]");
    if (!(clip_norm >= 0.0)) throw ConfigError("train config: clip norm must be >= 0");
    if (autoregressive_tail < 0 || autoregressive_tail > epochs)
        throw ConfigError("train config: autoregressive tail must lie in [0, epochs]");
    window.validate();
}

namespace {

struct TrainingData {
    std::vector<WindowSample> samples;
    MinMaxScale t_scale, q_scale, u_scale;
    std::vector<double> rates;
};

TrainingData prepare_training_data(const std::map<double, TimeSeries>& dataset,
                                   const WindowSpec& spec, bool balanced_loss) {
    if (dataset.empty()) throw ConfigError("train: empty dataset");

    const TimeSeries& first = dataset.begin()->second;
    for (const auto& [rate, series] : dataset) {
        series.validate();
        if (series.size() != first.size() || series.t0 != first.t0 || series.dt != first.dt)
            throw ConfigError("train: all series must share the sampling grid");
    }

    TrainingData data;
    std::vector<double> times(first.size());
    for (std::size_t i = 0; i < first.size(); ++i) times[i] = first.time(i);
    data.t_scale = MinMaxScale::fit(times, 0.0, 1.0);

    for (const auto& [rate, series] : dataset) data.rates.push_back(rate);
    data.q_scale = MinMaxScale::fit(data.rates, 0.0, 1.0);

    std::vector<double> all_values;
    all_values.reserve(dataset.size() * first.size());
    for (const auto& [rate, series] : dataset)
        all_values.insert(all_values.end(), series.values.begin(), series.values.end());
    data.u_scale = MinMaxScale::fit(all_values, 0.0, 1.0);

    for (const auto& [rate, series] : dataset) {
        const WindowedDataset windows = make_windows(series, spec);
        const double q_norm = data.q_scale.apply(rate);

        double weight = 1.0;
        if (balanced_loss) {
            double mean = 0.0, var = 0.0;
            for (double v : series.values) mean += data.u_scale.apply(v);
            mean /= static_cast<double>(series.size());
            for (double v : series.values) {
                const double d = data.u_scale.apply(v) - mean;
                var += d * d;
            }
            var /= static_cast<double>(series.size());
            weight = 1.0 / std::max(var, 1e-8);
        }

        for (std::size_t i = 0; i < windows.count(); ++i) {
            WindowSample sample;
            sample.inputs.reserve(spec.length);
            sample.targets.reserve(spec.length);
            const std::size_t start = i * spec.stride;
            for (std::size_t j = 0; j < spec.length; ++j) {
                const double t_norm = data.t_scale.apply(series.time(start + j));
                sample.inputs.emplace_back(t_norm, q_norm);
                sample.targets.push_back(data.u_scale.apply(windows.windows[i][j]));
            }
            sample.weight = weight;
            data.samples.push_back(std::move(sample));
        }
    }
    return data;
}

} // namespace

TrainResult train(const std::map<double, TimeSeries>& dataset, const TrainConfig& cfg) {
    cfg.validate();
    TrainingData data = prepare_training_data(dataset, cfg.window, cfg.balanced_loss);

    Rng rng(cfg.seed);
    LstmWeights weights = LstmWeights::random(cfg.hidden, rng, cfg.init_scale, cfg.forget_bias);
    VectorXd theta = weights.flatten();
    AdamState adam(theta.size());
    LstmWeights grads = LstmWeights::zeros(cfg.hidden);

    std::vector<std::size_t> order(data.samples.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

    // The logged loss uses one fixed definition across epochs: the feeding
    // mode the training ends in, so entries are comparable.
    const bool log_teacher = cfg.teacher_forcing && cfg.autoregressive_tail == 0;

    TrainResult result;
    result.loss_log.push_back(window_loss(data.samples, weights, log_teacher));

    double lr = cfg.learning_rate;
    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        const bool teacher =
            cfg.teacher_forcing && epoch < cfg.epochs - std::max(0, cfg.autoregressive_tail);
        if (cfg.batch_mode == BatchMode::PerWindow) {
            if (cfg.shuffle) {
                // Fisher-Yates on the seeded stream; order is reproducible.
                for (std::size_t i = order.size(); i > 1; --i) {
                    const std::size_t j =
                        static_cast<std::size_t>(rng.uniform() * static_cast<double>(i));
                    std::swap(order[i - 1], order[std::min(j, i - 1)]);
                }
            }
            for (std::size_t idx : order) {
                const WindowSample& sample = data.samples[idx];
                window_loss({&sample, 1}, weights, teacher, &grads);
                VectorXd g = grads.flatten();
                if (cfg.clip_norm > 0.0) {
                    const double norm = g.norm();
                    if (norm > cfg.clip_norm) g *= cfg.clip_norm / norm;
                }
                adam_step(theta, g, adam, lr, cfg.beta1, cfg.beta2, cfg.epsilon);
                weights.set_from_flat(theta);
            }
        } else {
            window_loss(data.samples, weights, teacher, &grads);
            VectorXd g = grads.flatten();
            if (cfg.clip_norm > 0.0) {
                const double norm = g.norm();
                if (norm > cfg.clip_norm) g *= cfg.clip_norm / norm;
            }
            adam_step(theta, g, adam, lr, cfg.beta1, cfg.beta2, cfg.epsilon);
            weights.set_from_flat(theta);
        }
        const double epoch_loss = window_loss(data.samples, weights, log_teacher);
        if (!std::isfinite(epoch_loss))
            throw NonFiniteLossError("train: loss diverged at epoch " + std::to_string(epoch + 1));
        result.loss_log.push_back(epoch_loss);
        lr *= cfg.lr_decay;
    }

    result.model.weights = std::move(weights);
    result.model.window = cfg.window;
    result.model.t_scale = data.t_scale;
    result.model.q_scale = data.q_scale;
    result.model.u_scale = data.u_scale;
    result.model.rates = std::move(data.rates);
    return result;
}

Reconstruction reconstruct(const RomModel& model, double q, double t0, double dt, std::size_t n) {
    TimeSeries time_grid;
    time_grid.t0 = t0;
    time_grid.dt = dt;
    time_grid.values.resize(n);
    for (std::size_t i = 0; i < n; ++i) time_grid.values[i] = time_grid.time(i);
    time_grid.label = "time grid";
    const WindowedDataset windows = make_windows(time_grid, model.window);

    const double q_norm = model.q_scale.apply(q);
    std::vector<std::vector<double>> outputs;
    outputs.reserve(windows.count());
    std::vector<Eigen::Vector2d> inputs(model.window.length);
    for (const auto& window_times : windows.windows) {
        for (std::size_t j = 0; j < window_times.size(); ++j)
            inputs[j] = Eigen::Vector2d(model.t_scale.apply(window_times[j]), q_norm);
        const LstmState state = encode(inputs, model.weights);
        outputs.push_back(decode(state, model.window.length, 0.0, model.weights));
    }

    const std::vector<double> normalized = reassemble(windows, outputs);
    Reconstruction result;
    result.series.t0 = t0;
    result.series.dt = dt;
    result.series.values.reserve(n);
    for (double v : normalized) result.series.values.push_back(model.u_scale.invert(v));
    result.series.label = "rom q=" + format_double(q);
    result.extrapolated =
        model.rates.empty() || q < model.rates.front() || q > model.rates.back();
    return result;
}

std::vector<double> rom_evaluate(const RomModel& model, double q, double t0, double dt,
                                 std::size_t n) {
    return reconstruct(model, q, t0, dt, n).series.values;
}

double boundary_jump(std::span<const double> values, std::size_t window_length) {
    if (window_length == 0) throw ShapeMismatchError("boundary_jump: window length must be > 0");
    double sum = 0.0;
    std::size_t count = 0;
    for (std::size_t k = window_length; k < values.size(); k += window_length) {
        sum += std::abs(values[k] - values[k - 1]);
        ++count;
    }
    return count == 0 ? 0.0 : sum / static_cast<double>(count);
}

namespace {

nlohmann::json scale_to_json(const MinMaxScale& s) {
    return {{"src_min", s.src_min},
            {"src_max", s.src_max},
            {"lo", s.lo},
            {"hi", s.hi},
            {"degenerate", s.degenerate}};
}

MinMaxScale scale_from_json(const nlohmann::json& j) {
    MinMaxScale s;
    s.src_min = j.at("src_min").get<double>();
    s.src_max = j.at("src_max").get<double>();
    s.lo = j.at("lo").get<double>();
    s.hi = j.at("hi").get<double>();
    s.degenerate = j.at("degenerate").get<bool>();
    return s;
}

nlohmann::json matrix_to_json(const MatrixXd& m) {
    std::vector<double> flat(m.data(), m.data() + m.size());
    return flat;
}

void matrix_from_json(const nlohmann::json& j, MatrixXd& m) {
    const auto flat = j.get<std::vector<double>>();
    if (static_cast<Index>(flat.size()) != m.size())
        throw ModelFormatError("model: weight array size mismatch");
    std::copy(flat.begin(), flat.end(), m.data());
}

std::string regime_name(WindowRegime r) {
    return r == WindowRegime::Nonoverlapping ? "nonoverlapping" : "sliding";
}

WindowRegime regime_from_name(const std::string& name) {
    if (name == "nonoverlapping") return WindowRegime::Nonoverlapping;
    if (name == "sliding") return WindowRegime::Sliding;
    throw ModelFormatError("model: unknown window regime '" + name + "'");
}

} // namespace

void RomModel::save(const std::filesystem::path& path) const {
    nlohmann::json j;
    j["format"] = "rominv-rom";
    j["version"] = 1;
    j["hidden"] = weights.hidden;
    j["window"] = {{"length", window.length},
                   {"stride", window.stride},
                   {"regime", regime_name(window.regime)}};
    j["scales"] = {{"t", scale_to_json(t_scale)},
                   {"q", scale_to_json(q_scale)},
                   {"u", scale_to_json(u_scale)}};
    j["rates"] = rates;
    j["weights"] = {{"enc_wx", matrix_to_json(weights.enc.w_x)},
                    {"enc_wh", matrix_to_json(weights.enc.w_h)},
                    {"enc_b", std::vector<double>(weights.enc.b.data(),
                                                  weights.enc.b.data() + weights.enc.b.size())},
                    {"dec_wx", matrix_to_json(weights.dec.w_x)},
                    {"dec_wh", matrix_to_json(weights.dec.w_h)},
                    {"dec_b", std::vector<double>(weights.dec.b.data(),
                                                  weights.dec.b.data() + weights.dec.b.size())},
                    {"head_w", std::vector<double>(weights.head_w.data(),
                                                   weights.head_w.data() + weights.head_w.size())},
                    {"head_b", weights.head_b}};

    std::ofstream out(path);
    if (!out) throw IoError("cannot open for writing: " + path.string());
    out << j.dump(2) << '\n';
    if (!out) throw IoError("write failed: " + path.string());
}

RomModel RomModel::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open: " + path.string());
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ModelFormatError("model: invalid JSON in " + path.string() + ": " + e.what());
    }

    try {
        if (j.at("format").get<std::string>() != "rominv-rom")
            throw ModelFormatError("model: unrecognized format field");
        if (j.at("version").get<int>() != 1)
            throw ModelFormatError("model: unsupported version");

        RomModel model;
        const Index hidden = j.at("hidden").get<Index>();
        if (hidden < 1) throw ModelFormatError("model: bad hidden size");
        model.weights = LstmWeights::zeros(hidden);

        const auto& jw = j.at("window");
        model.window.length = jw.at("length").get<std::size_t>();
        model.window.stride = jw.at("stride").get<std::size_t>();
        model.window.regime = regime_from_name(jw.at("regime").get<std::string>());
        model.window.validate();

        model.t_scale = scale_from_json(j.at("scales").at("t"));
        model.q_scale = scale_from_json(j.at("scales").at("q"));
        model.u_scale = scale_from_json(j.at("scales").at("u"));
        model.rates = j.at("rates").get<std::vector<double>>();

        const auto& weights = j.at("weights");
        matrix_from_json(weights.at("enc_wx"), model.weights.enc.w_x);
        matrix_from_json(weights.at("enc_wh"), model.weights.enc.w_h);
        auto vec_from = [](const nlohmann::json& arr, auto& v) {
            const auto flat = arr.template get<std::vector<double>>();
            if (static_cast<Index>(flat.size()) != v.size())
                throw ModelFormatError("model: weight array size mismatch");
            std::copy(flat.begin(), flat.end(), v.data());
        };
        vec_from(weights.at("enc_b"), model.weights.enc.b);
        matrix_from_json(weights.at("dec_wx"), model.weights.dec.w_x);
        matrix_from_json(weights.at("dec_wh"), model.weights.dec.w_h);
        vec_from(weights.at("dec_b"), model.weights.dec.b);
        vec_from(weights.at("head_w"), model.weights.head_w);
        model.weights.head_b = weights.at("head_b").get<double>();
        return model;
    } catch (const nlohmann::json::exception& e) {
        throw ModelFormatError("model: missing or malformed field in " + path.string() + ": " +
                               e.what());
    }
}

} // namespace rominv
