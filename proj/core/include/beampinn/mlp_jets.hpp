#pragma once

#include <span>
#include <vector>

#include <Eigen/Dense>

#include "beampinn/hybrid_model.hpp"

namespace beampinn {

/// Coefficient blocks carried through the network for one batch.
///
/// Block 0 holds the plain value, shared by both directions. Blocks
/// 1..t_order hold the time-direction Taylor coefficients, the next x_order
/// blocks the space-direction ones. Mixed derivatives are never formed.
struct JetLayout {
    int t_order = 0;
    int x_order = 0;

    int blocks() const noexcept { return 1 + t_order + x_order; }
    int t_block(int k) const noexcept { return k == 0 ? 0 : k; }
    int x_block(int k) const noexcept { return k == 0 ? 0 : t_order + k; }
};

/// Batched Taylor-mode forward pass through the MLP with a matching reverse pass.
///
/// Each layer is one GEMM over all coefficient blocks of all points; tanh is
/// applied with the truncated-series recurrence and its slope series is kept
/// for the reverse pass. Holds a reference to the model: the model must
/// outlive the evaluator and must not change between forward and backward.
class MlpJetBatch {
public:
    explicit MlpJetBatch(const HybridModel& model);

    void forward(std::span<const double> t, std::span<const double> x, JetLayout layout);

    JetLayout layout() const noexcept { return layout_; }
    std::size_t batch() const noexcept { return batch_; }

    /// Taylor coefficient stored in `block` for point i.
    double output(int block, std::size_t i) const {
        return activations_.back()(0, static_cast<Eigen::Index>(block * batch_ + i));
    }

    /// Accumulates network-parameter gradients into grad_net (sized like
    /// model.net_params()). output_adjoint is block-major, blocks() * batch().
    void backward(std::span<const double> output_adjoint, std::span<double> grad_net) const;

private:
    void tanh_forward(const Eigen::MatrixXd& z, Eigen::MatrixXd& u, Eigen::MatrixXd& v) const;
    void tanh_backward(const Eigen::MatrixXd& ubar, const Eigen::MatrixXd& v, Eigen::MatrixXd& zbar) const;

    const HybridModel* model_;
    JetLayout layout_{};
    std::size_t batch_ = 0;
    // Aligned copies of the layer parameters. Products over Maps into the flat
    // parameter vector round differently depending on its address.
    std::vector<Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> weights_;
    std::vector<Eigen::VectorXd> biases_;
    std::vector<Eigen::MatrixXd> activations_;  // layer 0 is the input jet
    std::vector<Eigen::MatrixXd> slopes_;       // hidden layers only
};

}  // namespace beampinn
