#include "beampinn/mlp_jets.hpp"

#include <stdexcept>

namespace beampinn {

namespace {

using RowMajorMap = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>;
using RowMajorMutMap = Eigen::Map<Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>;

}  // namespace

MlpJetBatch::MlpJetBatch(const HybridModel& model) : model_(&model) {}

void MlpJetBatch::forward(std::span<const double> t, std::span<const double> x, JetLayout layout) {
    if (t.size() != x.size()) throw std::invalid_argument("t and x batches differ in size");
    if (layout.t_order < 0 || layout.t_order > 2 || (layout.x_order != 0 && layout.x_order != 4)) {
        throw std::invalid_argument("unsupported jet layout");
    }
    layout_ = layout;
    batch_ = t.size();
    const auto B = static_cast<Eigen::Index>(batch_);
    const int nb = layout.blocks();

    const MlpShape& shape = model_->mlp();
    const auto net = model_->net_params();
    const std::size_t n_layers = shape.layers.size();
    weights_.resize(n_layers);
    biases_.resize(n_layers);
    activations_.resize(n_layers + 1);
    slopes_.resize(n_layers > 0 ? n_layers - 1 : 0);

    Eigen::MatrixXd& a0 = activations_[0];
    a0.setZero(2, nb * B);
    for (Eigen::Index i = 0; i < B; ++i) {
        a0(0, i) = t[static_cast<std::size_t>(i)];
        a0(1, i) = x[static_cast<std::size_t>(i)];
    }
    if (layout.t_order >= 1) a0.middleCols(layout.t_block(1) * B, B).row(0).setOnes();
    if (layout.x_order >= 1) a0.middleCols(layout.x_block(1) * B, B).row(1).setOnes();

    Eigen::MatrixXd z;
    for (std::size_t l = 0; l < n_layers; ++l) {
        const LayerView& v = shape.layers[l];
        weights_[l] = RowMajorMap(net.data() + v.weight_offset, v.out, v.in);
        biases_[l] = Eigen::Map<const Eigen::VectorXd>(net.data() + v.bias_offset, v.out);
        z.noalias() = weights_[l] * activations_[l];
        z.leftCols(B).colwise() += biases_[l];
        if (l + 1 < n_layers) {
            tanh_forward(z, activations_[l + 1], slopes_[l]);
        } else {
            activations_[l + 1] = z;
        }
    }
}

void MlpJetBatch::tanh_forward(const Eigen::MatrixXd& z, Eigen::MatrixXd& u, Eigen::MatrixXd& v) const {
    const auto B = static_cast<Eigen::Index>(batch_);
    u.resize(z.rows(), z.cols());
    v.resize(z.rows(), z.cols());
    auto blk = [B](auto& m, int b) { return m.middleCols(b * B, B).array(); };

    blk(u, 0) = blk(z, 0).tanh();
    blk(v, 0) = 1.0 - blk(u, 0).square();

    auto direction = [&](int order, auto&& block_of) {
        for (int k = 1; k <= order; ++k) {
            auto uk = blk(u, block_of(k));
            uk = blk(z, block_of(1)) * blk(v, block_of(k - 1));
            for (int j = 2; j <= k; ++j) uk += double(j) * blk(z, block_of(j)) * blk(v, block_of(k - j));
            uk /= double(k);
            auto vk = blk(v, block_of(k));
            vk = -blk(u, block_of(0)) * blk(u, block_of(k));
            for (int j = 1; j <= k; ++j) vk -= blk(u, block_of(j)) * blk(u, block_of(k - j));
        }
    };
    direction(layout_.t_order, [this](int k) { return layout_.t_block(k); });
    direction(layout_.x_order, [this](int k) { return layout_.x_block(k); });
}

void MlpJetBatch::tanh_backward(const Eigen::MatrixXd& ubar, const Eigen::MatrixXd& v, Eigen::MatrixXd& zbar) const {
    const auto B = static_cast<Eigen::Index>(batch_);
    zbar.resize(ubar.rows(), ubar.cols());
    auto blk = [B](auto& m, int b) { return m.middleCols(b * B, B).array(); };

    blk(zbar, 0) = blk(ubar, 0) * blk(v, 0);
    auto direction = [&](int order, auto&& block_of) {
        for (int k = 1; k <= order; ++k) blk(zbar, 0) += blk(ubar, block_of(k)) * blk(v, block_of(k));
        for (int j = 1; j <= order; ++j) {
            auto zj = blk(zbar, block_of(j));
            zj = blk(ubar, block_of(j)) * blk(v, block_of(0));
            for (int k = j + 1; k <= order; ++k) zj += blk(ubar, block_of(k)) * blk(v, block_of(k - j));
        }
    };
    direction(layout_.t_order, [this](int k) { return layout_.t_block(k); });
    direction(layout_.x_order, [this](int k) { return layout_.x_block(k); });
}

void MlpJetBatch::backward(std::span<const double> output_adjoint, std::span<double> grad_net) const {
    const auto B = static_cast<Eigen::Index>(batch_);
    const int nb = layout_.blocks();
    if (output_adjoint.size() != static_cast<std::size_t>(nb) * batch_) {
        throw std::invalid_argument("output adjoint has the wrong size");
    }
    const MlpShape& shape = model_->mlp();
    if (grad_net.size() != shape.param_count) throw std::invalid_argument("gradient span has the wrong size");
    const std::size_t n_layers = shape.layers.size();

    Eigen::MatrixXd abar = Eigen::Map<const Eigen::MatrixXd>(output_adjoint.data(), 1, nb * B);
    Eigen::MatrixXd zbar;
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> gw;
    Eigen::VectorXd gb;
    for (std::size_t l = n_layers; l-- > 0;) {
        const LayerView& v = shape.layers[l];
        if (l + 1 < n_layers) {
            tanh_backward(abar, slopes_[l], zbar);
        } else {
            zbar.swap(abar);
        }
        gw.noalias() = zbar * activations_[l].transpose();
        gb.noalias() = zbar.leftCols(B).rowwise().sum();
        RowMajorMutMap(grad_net.data() + v.weight_offset, v.out, v.in) += gw;
        Eigen::Map<Eigen::VectorXd>(grad_net.data() + v.bias_offset, v.out) += gb;
        if (l > 0) abar.noalias() = weights_[l].transpose() * zbar;
    }
}

}  // namespace beampinn
