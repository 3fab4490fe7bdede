#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <vector>

#include "rominv/rng.hpp"
#include "rominv/series.hpp"

namespace rominv {

// Weights of one LSTM cell, the four gates stacked in i, f, g, o order.
struct GateWeights {
    Eigen::MatrixXd w_x; // 4H x input
    Eigen::MatrixXd w_h; // 4H x H
    Eigen::VectorXd b;   // 4H

    Eigen::Index hidden() const { return b.size() / 4; }
    Eigen::Index input() const { return w_x.cols(); }
};

struct LstmState {
    Eigen::VectorXd h;
    Eigen::VectorXd c;

    static LstmState zero(Eigen::Index hidden) {
        return {Eigen::VectorXd::Zero(hidden), Eigen::VectorXd::Zero(hidden)};
    }
};

// One cell step:
//   i,f,o = sigmoid(gates), g = tanh(candidate)
//   c' = f.c + i.g,  h' = o.tanh(c')
// Throws DimensionMismatchError on shape disagreement.
LstmState lstm_cell(const Eigen::VectorXd& x, const LstmState& state, const GateWeights& w);

// Full parameter set: encoder over (t_norm, q_norm) pairs, autoregressive
// decoder over the scalar displacement channel, and the decoder's linear
// head H -> 1.
struct LstmWeights {
    Eigen::Index hidden = 5;
    GateWeights enc;            // input dim 2
    GateWeights dec;            // input dim 1
    Eigen::RowVectorXd head_w;  // 1 x H
    double head_b = 0.0;

    static LstmWeights zeros(Eigen::Index hidden);
    // Uniform on +-scale (default 1/sqrt(H)), tensors filled in declared
    // order; forget-gate biases are then shifted by forget_bias so state
    // persists across the window at initialization.
    static LstmWeights random(Eigen::Index hidden, Rng& rng, double scale = -1.0,
                              double forget_bias = 1.0);

    // Declared flat order: enc.w_x, enc.w_h, enc.b, dec.w_x, dec.w_h, dec.b,
    // head_w, head_b; matrices column-major.
    Eigen::VectorXd flatten() const;
    void set_from_flat(const Eigen::VectorXd& theta);
    Eigen::Index parameter_count() const;
};

// Runs the encoder over a whole window and returns the final states.
LstmState encode(std::span<const Eigen::Vector2d> inputs, const LstmWeights& w);

struct DecodeTrace {
    std::vector<double> inputs_consumed; // decoder input at each step
};

// Unrolls the decoder `steps` cells from the encoder states and returns the
// linear-head output per step. The first input is `first_input`; later steps
// consume the previous prediction, or the previous entry of `teacher` when a
// teacher sequence is supplied (training with teacher forcing).
std::vector<double> decode(const LstmState& init, std::size_t steps, double first_input,
                           const LstmWeights& w, std::span<const double> teacher = {},
                           DecodeTrace* trace = nullptr);

// Adam with bias correction; update is -lr * m_hat / (sqrt(v_hat) + eps).
struct AdamState {
    Eigen::VectorXd m;
    Eigen::VectorXd v;
    long step = 0;

    explicit AdamState(Eigen::Index n)
        : m(Eigen::VectorXd::Zero(n)), v(Eigen::VectorXd::Zero(n)) {}
};

void adam_step(Eigen::VectorXd& params, const Eigen::VectorXd& grads, AdamState& state, double lr,
               double beta1, double beta2, double epsilon);

// One training window: per-step encoder inputs and the displacement targets
// the decoder must reproduce (all in normalized units). The weight scales
// this window's contribution to the batch loss.
struct WindowSample {
    std::vector<Eigen::Vector2d> inputs;
    std::vector<double> targets;
    double weight = 1.0;
};

// Mean-squared reconstruction loss over the batch, averaged per step and
// per window. When `grads` is non-null it receives the full backpropagated
// gradient (through the decoder, its head, and the encoder; with teacher
// forcing off the autoregressive input path is included).
double window_loss(std::span<const WindowSample> batch, const LstmWeights& w, bool teacher_forcing,
                   LstmWeights* grads = nullptr);

enum class BatchMode {
    PerWindow, // one Adam step per window per epoch
    FullBatch, // one Adam step per epoch on the batch gradient
};

struct TrainConfig {
    int epochs = 10;
    double learning_rate = 0.01;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
    std::uint64_t seed = 1;
    bool teacher_forcing = true;
    WindowSpec window = WindowSpec::sliding(10);
    Eigen::Index hidden = 5;
    BatchMode batch_mode = BatchMode::PerWindow;
    bool shuffle = true;        // reshuffle window order each epoch (seeded)
    double init_scale = -1.0;   // weight init bound; < 0 means 1/sqrt(H)
    double forget_bias = 1.0;   // added to forget-gate biases at init
    double lr_decay = 0.7;      // per-epoch learning-rate multiplier
    double clip_norm = 1.0;     // gradient-norm clip per step; 0 disables
    // With teacher_forcing on, switch the last epochs to autoregressive
    // feeding so the rollout objective is what the final epochs optimize.
    int autoregressive_tail = 3;
    // Weight each rate's windows by the inverse variance of its series so
    // small-amplitude rates are reconstructed as accurately as large ones.
    bool balanced_loss = true;

    void validate() const; // throws ConfigError
};

// Trained surrogate: weights plus everything needed to evaluate at a new
// rate (window spec, channel scales, training grid).
struct RomModel {
    LstmWeights weights;
    WindowSpec window;
    MinMaxScale t_scale;
    MinMaxScale q_scale;
    MinMaxScale u_scale;
    std::vector<double> rates;

    void save(const std::filesystem::path& path) const;
    static RomModel load(const std::filesystem::path& path);
};

struct TrainResult {
    RomModel model;
    // Full-batch teacher-forced loss evaluated before training (index 0) and
    // after each epoch; size epochs + 1.
    std::vector<double> loss_log;
};

// Trains on the clean per-rate series; all series must share the sampling
// grid. Deterministic given cfg.seed. Throws NonFiniteLossError if the loss
// diverges, and propagates windowing errors.
TrainResult train(const std::map<double, TimeSeries>& dataset, const TrainConfig& cfg);

struct Reconstruction {
    TimeSeries series;
    bool extrapolated; // q outside the training rate grid
};

// Surrogate evaluation at rate q on the uniform time grid t0 + i*dt,
// i = 0..n-1: windows are encoded and decoded autoregressively, overlap
// averaged by reassemble(), then mapped back to meters.
Reconstruction reconstruct(const RomModel& model, double q, double t0, double dt, std::size_t n);

// Evaluation contract for the likelihood: identical arguments give identical
// output. Exactly reconstruct()'s values.
std::vector<double> rom_evaluate(const RomModel& model, double q, double t0, double dt,
                                 std::size_t n);

// Mean |u(k*w) - u(k*w - 1)| across window boundaries k = 1, 2, ...;
// quantifies reconstruction discontinuities at window seams.
double boundary_jump(std::span<const double> values, std::size_t window_length);

} // namespace rominv
