#pragma once

#include <Eigen/Dense>

namespace stormwarn {

// Peephole LSTM cell. The W_c* terms are vectors acting element-wise; the
// output-gate peephole reads the freshly updated cell state.
struct LstmParams {
  Eigen::MatrixXd W_xi, W_hi, W_xf, W_hf, W_xc, W_hc, W_xo, W_ho;
  Eigen::VectorXd W_ci, W_cf, W_co;
  Eigen::VectorXd b_i, b_f, b_c, b_o;
  int input_size = 0;
  int hidden_size = 0;

  void validate() const;
  static LstmParams zeros(int input_size, int hidden_size);
};

struct LstmState {
  Eigen::VectorXd h;
  Eigen::VectorXd c;

  static LstmState zeros(int hidden_size);
};

LstmState lstm_cell_step(const Eigen::VectorXd& x_t, const LstmState& state,
                         const LstmParams& params);

}  // namespace stormwarn
