#pragma once

#include <cstddef>
#include <random>
#include <vector>

#include <Eigen/Dense>

namespace hfp::nn {

/// Fully connected network with tanh hidden activations and a linear output
/// layer. Parameters live in an external flat buffer laid out layer by layer
/// as [W (out x in, column-major), b (out)].
struct MlpShape {
    std::vector<int> sizes;  // input, hidden..., output

    std::size_t param_count() const;
    int input() const { return sizes.front(); }
    int output() const { return sizes.back(); }
    std::size_t layers() const { return sizes.size() - 1; }
};

/// Activations recorded by a forward pass, consumed by backward().
struct Tape {
    std::vector<Eigen::MatrixXd> activations;  // input, then each layer output
};

/// Forward pass on a batch stored column-wise (input x batch).
Eigen::MatrixXd forward(const MlpShape& shape, const double* theta, const Eigen::MatrixXd& x, Tape* tape = nullptr);

/// Accumulates d(loss)/d(theta) into `grad` given d(loss)/d(output).
void backward(const MlpShape& shape, const double* theta, const Tape& tape, const Eigen::MatrixXd& d_out,
              double* grad);

/// Orthogonal initialization: hidden layers with gain sqrt(2), output layer
/// with `output_gain`, zero biases.
void init_orthogonal(const MlpShape& shape, double* theta, double output_gain, std::mt19937_64& rng);

/// Adam with bias correction.
struct Adam {
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-5;
    Eigen::VectorXd m;
    Eigen::VectorXd v;
    long long t = 0;

    void reset(Eigen::Index n) {
        m = Eigen::VectorXd::Zero(n);
        v = Eigen::VectorXd::Zero(n);
        t = 0;
    }
    void step(Eigen::VectorXd& theta, const Eigen::VectorXd& grad, double lr);
};

}  // namespace hfp::nn
