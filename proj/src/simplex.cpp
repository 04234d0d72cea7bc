#include "distbandit/simplex.hpp"

namespace distbandit {

template VectorX<double> softmax(const Eigen::MatrixBase<Eigen::VectorXd>&);
template MatrixX<double> softmax_jacobian(const Eigen::MatrixBase<Eigen::VectorXd>&);
template VectorX<double> kl_project_floor(const Eigen::MatrixBase<Eigen::VectorXd>&,
                                          const FloorParams&);

}  // namespace distbandit
