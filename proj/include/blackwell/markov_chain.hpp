#pragma once

#include <vector>

#include <Eigen/Dense>

namespace blackwell {

/// Strongly connected components of the positive-entry pattern of P
/// (edge i -> j iff P(i,j) > 0). Components are listed with members ascending.
std::vector<std::vector<int>> strongly_connected_components(const Eigen::MatrixXd& P);

/// Recurrent/transient structure of a finite row-stochastic chain. A state is
/// recurrent iff its strongly connected component has no outgoing edge.
struct ChainDecomposition {
    std::vector<std::vector<int>> recurrent_classes;
    std::vector<int> recurrent_class_of;  // -1 for transient states

    bool unichain() const { return recurrent_classes.size() == 1; }
};

ChainDecomposition decompose_chain(const Eigen::MatrixXd& P);

/**
 * Cesàro limiting matrix P* of a row-stochastic P, computed structurally:
 * stationary distribution per recurrent class plus absorption probabilities
 * for transient states. Exact for periodic chains, where plain matrix-power
 * limits do not exist.
 */
Eigen::MatrixXd cesaro_limit(const Eigen::MatrixXd& P, const ChainDecomposition& decomposition);
Eigen::MatrixXd cesaro_limit(const Eigen::MatrixXd& P);

}  // namespace blackwell
