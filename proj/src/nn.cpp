#include "hsd/nn.hpp"

#include <cmath>

namespace hsd::nn {
namespace {

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

}  // namespace

void glorot_uniform(Matrix& m, Rng& rng) {
  const double limit = std::sqrt(6.0 / static_cast<double>(m.rows() + m.cols()));
  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    for (Eigen::Index i = 0; i < m.rows(); ++i) m(i, j) = rng.uniform(-limit, limit);
  }
}

void normal_init(Matrix& m, Rng& rng, double stddev) {
  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    for (Eigen::Index i = 0; i < m.rows(); ++i) m(i, j) = stddev * rng.normal();
  }
}

void Adam::step(const ParameterList& params) {
  if (m_.size() != params.size()) {
    m_.clear();
    v_.clear();
    for (const auto* p : params) {
      m_.push_back(Matrix::Zero(p->value.rows(), p->value.cols()));
      v_.push_back(Matrix::Zero(p->value.rows(), p->value.cols()));
    }
  }
  ++t_;
  const double c1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
  const double step = lr_ * std::sqrt(c2) / c1;
  for (std::size_t k = 0; k < params.size(); ++k) {
    Parameter& p = *params[k];
    m_[k] = beta1_ * m_[k] + (1.0 - beta1_) * p.grad;
    v_[k] = beta2_ * v_[k] + (1.0 - beta2_) * p.grad.cwiseAbs2();
    p.value.array() -= step * m_[k].array() / (v_[k].array().sqrt() + eps_ * std::sqrt(c2));
  }
}

Matrix dropout_mask(Eigen::Index rows, Eigen::Index cols, double rate, Rng* rng) {
  Matrix mask = Matrix::Ones(rows, cols);
  if (rng == nullptr || rate <= 0.0) return mask;
  if (rate >= 1.0) return Matrix::Zero(rows, cols);
  const double keep = 1.0 / (1.0 - rate);
  for (Eigen::Index j = 0; j < cols; ++j) {
    for (Eigen::Index i = 0; i < rows; ++i) {
      mask(i, j) = rng->bernoulli(rate) ? 0.0 : keep;
    }
  }
  return mask;
}

Vector softmax(const Vector& logits) {
  const double top = logits.maxCoeff();
  Vector e = (logits.array() - top).exp().matrix();
  return e / e.sum();
}

Matrix Linear::forward(const Matrix& x) const {
  return (weight.value * x).colwise() + bias.value.col(0);
}

Matrix Linear::backward(const Matrix& x, const Matrix& dy) {
  weight.grad.noalias() += dy * x.transpose();
  bias.grad.col(0) += dy.rowwise().sum();
  return weight.value.transpose() * dy;
}

Vector ConvMaxPool::forward(const Matrix& seq, int length, Cache* cache) const {
  const Eigen::Index in = seq.rows();
  const Eigen::Index windows = std::max(length, 1);
  Matrix cols = Matrix::Zero(kernel * in, windows);
  for (Eigen::Index t = 0; t < windows; ++t) {
    for (int k = 0; k < kernel; ++k) {
      const Eigen::Index src = t + k;
      if (src < length && src < seq.cols()) {
        cols.block(k * in, t, in, 1) = seq.col(src);
      }
    }
  }
  const Matrix z = (weight.value * cols).colwise() + bias.value.col(0);
  Vector pooled(maps());
  std::vector<Eigen::Index> argmax(static_cast<std::size_t>(maps()));
  for (Eigen::Index m = 0; m < maps(); ++m) {
    Eigen::Index best = 0;
    const double top = z.row(m).maxCoeff(&best);
    pooled(m) = std::max(top, 0.0);
    argmax[static_cast<std::size_t>(m)] = best;
  }
  if (cache != nullptr) {
    cache->windows = std::move(cols);
    cache->pooled = pooled;
    cache->argmax = std::move(argmax);
  }
  return pooled;
}

void ConvMaxPool::backward(const Cache& cache, const Vector& dpooled, Matrix* dseq) {
  Matrix dcols;
  if (dseq != nullptr) dcols = Matrix::Zero(cache.windows.rows(), cache.windows.cols());
  for (Eigen::Index m = 0; m < maps(); ++m) {
    if (cache.pooled(m) <= 0.0) continue;  // ReLU clipped
    const double g = dpooled(m);
    const Eigen::Index t = cache.argmax[static_cast<std::size_t>(m)];
    weight.grad.row(m) += g * cache.windows.col(t).transpose();
    bias.grad(m, 0) += g;
    if (dseq != nullptr) dcols.col(t) += g * weight.value.row(m).transpose();
  }
  if (dseq == nullptr) return;
  const Eigen::Index in = dseq->rows();
  for (Eigen::Index t = 0; t < dcols.cols(); ++t) {
    for (int k = 0; k < kernel; ++k) {
      const Eigen::Index dst = t + k;
      if (dst < dseq->cols()) dseq->col(dst) += dcols.block(k * in, t, in, 1);
    }
  }
}

void Lstm::init(Rng& rng) {
  glorot_uniform(w_input.value, rng);
  glorot_uniform(w_recurrent.value, rng);
  bias.value.setZero();
  const Eigen::Index h = units();
  bias.value.block(h, 0, h, 1).setOnes();  // forget-gate bias
}

Matrix Lstm::forward(const Matrix& x, bool reverse, Cache* cache) const {
  const Eigen::Index h = units();
  const Eigen::Index steps = x.cols();
  const Matrix input_proj = (w_input.value * x).colwise() + bias.value.col(0);
  Matrix gates(4 * h, steps);
  Matrix cells(h, steps);
  Matrix hidden(h, steps);
  Vector h_prev = Vector::Zero(h);
  Vector c_prev = Vector::Zero(h);
  for (Eigen::Index s = 0; s < steps; ++s) {
    const Eigen::Index t = reverse ? steps - 1 - s : s;
    Vector z = input_proj.col(t) + w_recurrent.value * h_prev;
    for (Eigen::Index r = 0; r < h; ++r) {
      z(r) = sigmoid(z(r));
      z(h + r) = sigmoid(z(h + r));
      z(2 * h + r) = std::tanh(z(2 * h + r));
      z(3 * h + r) = sigmoid(z(3 * h + r));
    }
    const Vector c = z.segment(h, h).cwiseProduct(c_prev) +
                     z.segment(0, h).cwiseProduct(z.segment(2 * h, h));
    const Vector hv = z.segment(3 * h, h).cwiseProduct(c.array().tanh().matrix());
    gates.col(t) = z;
    cells.col(t) = c;
    hidden.col(t) = hv;
    h_prev = hv;
    c_prev = c;
  }
  if (cache != nullptr) {
    cache->x = x;
    cache->gates = std::move(gates);
    cache->cells = std::move(cells);
    cache->hidden = hidden;
    cache->reverse = reverse;
  }
  return hidden;
}

Matrix Lstm::backward(const Cache& cache, const Matrix& dhidden) {
  const Eigen::Index h = units();
  const Eigen::Index steps = cache.x.cols();
  Matrix dz_all(4 * h, steps);
  Vector dh_next = Vector::Zero(h);
  Vector dc_next = Vector::Zero(h);
  for (Eigen::Index s = steps - 1; s >= 0; --s) {
    const Eigen::Index t = cache.reverse ? steps - 1 - s : s;
    const bool first = s == 0;
    const Eigen::Index t_prev = cache.reverse ? t + 1 : t - 1;
    const auto gi = cache.gates.col(t).segment(0, h).array();
    const auto gf = cache.gates.col(t).segment(h, h).array();
    const auto gg = cache.gates.col(t).segment(2 * h, h).array();
    const auto go = cache.gates.col(t).segment(3 * h, h).array();
    const Eigen::ArrayXd tanh_c = cache.cells.col(t).array().tanh();
    const Eigen::ArrayXd c_prev =
        first ? Eigen::ArrayXd::Zero(h) : Eigen::ArrayXd(cache.cells.col(t_prev).array());

    const Eigen::ArrayXd dh = dhidden.col(t).array() + dh_next.array();
    const Eigen::ArrayXd dc = dh * go * (1.0 - tanh_c.square()) + dc_next.array();
    auto dz = dz_all.col(t);
    dz.segment(0, h) = (dc * gg * gi * (1.0 - gi)).matrix();
    dz.segment(h, h) = (dc * c_prev * gf * (1.0 - gf)).matrix();
    dz.segment(2 * h, h) = (dc * gi * (1.0 - gg.square())).matrix();
    dz.segment(3 * h, h) = (dh * tanh_c * go * (1.0 - go)).matrix();

    if (!first) {
      w_recurrent.grad.noalias() += dz * cache.hidden.col(t_prev).transpose();
    }
    dh_next = w_recurrent.value.transpose() * dz;
    dc_next = (dc * gf).matrix();
  }
  w_input.grad.noalias() += dz_all * cache.x.transpose();
  bias.grad.col(0) += dz_all.rowwise().sum();
  return w_input.value.transpose() * dz_all;
}

}  // namespace hsd::nn
