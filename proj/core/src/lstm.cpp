#include "stormwarn/lstm.hpp"

#include "stormwarn/errors.hpp"

namespace stormwarn {

namespace {

Eigen::ArrayXd sigmoid(const Eigen::ArrayXd& z) {
  return 1.0 / (1.0 + (-z).exp());
}

}  // namespace

void LstmParams::validate() const {
  if (input_size < 1 || hidden_size < 1)
    throw AlignmentError("LSTM sizes must be positive");
  const auto x_shaped = [&](const Eigen::MatrixXd& m) {
    return m.rows() == hidden_size && m.cols() == input_size;
  };
  const auto h_shaped = [&](const Eigen::MatrixXd& m) {
    return m.rows() == hidden_size && m.cols() == hidden_size;
  };
  const auto vec_shaped = [&](const Eigen::VectorXd& v) {
    return v.size() == hidden_size;
  };
  if (!x_shaped(W_xi) || !x_shaped(W_xf) || !x_shaped(W_xc) || !x_shaped(W_xo))
    throw AlignmentError("input weight matrices must be hidden_size x input_size");
  if (!h_shaped(W_hi) || !h_shaped(W_hf) || !h_shaped(W_hc) || !h_shaped(W_ho))
    throw AlignmentError("recurrent weight matrices must be hidden_size x hidden_size");
  if (!vec_shaped(W_ci) || !vec_shaped(W_cf) || !vec_shaped(W_co))
    throw AlignmentError("peephole weights must be hidden_size vectors");
  if (!vec_shaped(b_i) || !vec_shaped(b_f) || !vec_shaped(b_c) || !vec_shaped(b_o))
    throw AlignmentError("bias vectors must be hidden_size vectors");
}

LstmParams LstmParams::zeros(int input_size, int hidden_size) {
  LstmParams p;
  p.input_size = input_size;
  p.hidden_size = hidden_size;
  for (auto* m : {&p.W_xi, &p.W_xf, &p.W_xc, &p.W_xo})
    *m = Eigen::MatrixXd::Zero(hidden_size, input_size);
  for (auto* m : {&p.W_hi, &p.W_hf, &p.W_hc, &p.W_ho})
    *m = Eigen::MatrixXd::Zero(hidden_size, hidden_size);
  for (auto* v : {&p.W_ci, &p.W_cf, &p.W_co, &p.b_i, &p.b_f, &p.b_c, &p.b_o})
    *v = Eigen::VectorXd::Zero(hidden_size);
  return p;
}

LstmState LstmState::zeros(int hidden_size) {
  LstmState s;
  s.h = Eigen::VectorXd::Zero(hidden_size);
  s.c = Eigen::VectorXd::Zero(hidden_size);
  return s;
}

LstmState lstm_cell_step(const Eigen::VectorXd& x_t, const LstmState& state,
                         const LstmParams& params) {
  params.validate();
  if (x_t.size() != params.input_size)
    throw AlignmentError("input vector does not match the LSTM input size");
  if (state.h.size() != params.hidden_size ||
      state.c.size() != params.hidden_size)
    throw AlignmentError("state vectors do not match the LSTM hidden size");

  const Eigen::ArrayXd c_prev = state.c.array();
  const Eigen::ArrayXd i =
      sigmoid((params.W_xi * x_t + params.W_hi * state.h + params.b_i).array() +
              params.W_ci.array() * c_prev);
  const Eigen::ArrayXd f =
      sigmoid((params.W_xf * x_t + params.W_hf * state.h + params.b_f).array() +
              params.W_cf.array() * c_prev);
  const Eigen::ArrayXd g =
      (params.W_xc * x_t + params.W_hc * state.h + params.b_c).array().tanh();

  LstmState out;
  out.c = (f * c_prev + i * g).matrix();
  const Eigen::ArrayXd o =
      sigmoid((params.W_xo * x_t + params.W_ho * state.h + params.b_o).array() +
              params.W_co.array() * out.c.array());
  out.h = (o * out.c.array().tanh()).matrix();
  return out;
}

}  // namespace stormwarn
