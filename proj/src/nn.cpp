#include "hfp/nn.hpp"

#include <cmath>

namespace hfp::nn {

std::size_t MlpShape::param_count() const {
    std::size_t n = 0;
    for (std::size_t l = 0; l + 1 < sizes.size(); ++l)
        n += static_cast<std::size_t>(sizes[l + 1]) * (sizes[l] + 1);
    return n;
}

Eigen::MatrixXd forward(const MlpShape& shape, const double* theta, const Eigen::MatrixXd& x, Tape* tape) {
    Eigen::MatrixXd a = x;
    if (tape != nullptr) {
        tape->activations.clear();
        tape->activations.push_back(a);
    }
    const double* p = theta;
    for (std::size_t l = 0; l < shape.layers(); ++l) {
        const int in = shape.sizes[l];
        const int out = shape.sizes[l + 1];
        Eigen::Map<const Eigen::MatrixXd> w(p, out, in);
        Eigen::Map<const Eigen::VectorXd> b(p + static_cast<std::ptrdiff_t>(out) * in, out);
        p += static_cast<std::ptrdiff_t>(out) * (in + 1);
        Eigen::MatrixXd z = (w * a).colwise() + b;
        if (l + 1 < shape.layers()) z = z.array().tanh().matrix();
        a = std::move(z);
        if (tape != nullptr) tape->activations.push_back(a);
    }
    return a;
}

void backward(const MlpShape& shape, const double* theta, const Tape& tape, const Eigen::MatrixXd& d_out,
              double* grad) {
    std::vector<std::ptrdiff_t> offsets(shape.layers());
    std::ptrdiff_t off = 0;
    for (std::size_t l = 0; l < shape.layers(); ++l) {
        offsets[l] = off;
        off += static_cast<std::ptrdiff_t>(shape.sizes[l + 1]) * (shape.sizes[l] + 1);
    }

    Eigen::MatrixXd delta = d_out;
    for (std::size_t l = shape.layers(); l-- > 0;) {
        const int in = shape.sizes[l];
        const int out = shape.sizes[l + 1];
        if (l + 1 < shape.layers()) {
            const Eigen::MatrixXd& y = tape.activations[l + 1];
            delta = (delta.array() * (1.0 - y.array().square())).matrix();
        }
        const Eigen::MatrixXd& a_in = tape.activations[l];
        Eigen::Map<Eigen::MatrixXd> gw(grad + offsets[l], out, in);
        Eigen::Map<Eigen::VectorXd> gb(grad + offsets[l] + static_cast<std::ptrdiff_t>(out) * in, out);
        gw.noalias() += delta * a_in.transpose();
        gb += delta.rowwise().sum();
        if (l > 0) {
            Eigen::Map<const Eigen::MatrixXd> w(theta + offsets[l], out, in);
            delta = w.transpose() * delta;
        }
    }
}

void init_orthogonal(const MlpShape& shape, double* theta, double output_gain, std::mt19937_64& rng) {
    std::normal_distribution<double> normal(0.0, 1.0);
    double* p = theta;
    for (std::size_t l = 0; l < shape.layers(); ++l) {
        const int in = shape.sizes[l];
        const int out = shape.sizes[l + 1];
        const double gain = l + 1 < shape.layers() ? std::sqrt(2.0) : output_gain;
        const int big = std::max(in, out);
        const int small = std::min(in, out);
        Eigen::MatrixXd g(big, small);
        for (Eigen::Index c = 0; c < g.cols(); ++c)
            for (Eigen::Index r = 0; r < g.rows(); ++r) g(r, c) = normal(rng);
        Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
        Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(big, small);
        // Sign fix makes the draw uniform over orthogonal matrices.
        const Eigen::MatrixXd r = qr.matrixQR().topRows(small).triangularView<Eigen::Upper>();
        for (int k = 0; k < small; ++k)
            if (r(k, k) < 0.0) q.col(k) *= -1.0;
        Eigen::Map<Eigen::MatrixXd> w(p, out, in);
        w = out >= in ? Eigen::MatrixXd(gain * q) : Eigen::MatrixXd(gain * q.transpose());
        Eigen::Map<Eigen::VectorXd>(p + static_cast<std::ptrdiff_t>(out) * in, out).setZero();
        p += static_cast<std::ptrdiff_t>(out) * (in + 1);
    }
}

void Adam::step(Eigen::VectorXd& theta, const Eigen::VectorXd& grad, double lr) {
    if (m.size() != theta.size()) reset(theta.size());
    ++t;
    m = beta1 * m + (1.0 - beta1) * grad;
    v = beta2 * v + (1.0 - beta2) * grad.cwiseProduct(grad);
    const double c1 = 1.0 - std::pow(beta1, static_cast<double>(t));
    const double c2 = 1.0 - std::pow(beta2, static_cast<double>(t));
    theta.array() -= lr * (m.array() / c1) / ((v.array() / c2).sqrt() + eps);
}

}  // namespace hfp::nn
