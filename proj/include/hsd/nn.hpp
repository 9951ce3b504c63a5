#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "hsd/rng.hpp"

// Layer building blocks with hand-written backward passes. Sequences are
// stored column-per-timestep (features x time).
namespace hsd::nn {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

struct Parameter {
  std::string name;
  Matrix value;
  Matrix grad;

  Parameter() = default;
  Parameter(std::string n, Eigen::Index rows, Eigen::Index cols)
      : name(std::move(n)), value(Matrix::Zero(rows, cols)), grad(Matrix::Zero(rows, cols)) {}

  void zero_grad() { grad.setZero(value.rows(), value.cols()); }
};

using ParameterList = std::vector<Parameter*>;

void glorot_uniform(Matrix& m, Rng& rng);
void normal_init(Matrix& m, Rng& rng, double stddev);

class Adam {
 public:
  explicit Adam(double learning_rate, double beta1 = 0.9, double beta2 = 0.999,
                double epsilon = 1e-8)
      : lr_(learning_rate), beta1_(beta1), beta2_(beta2), eps_(epsilon) {}

  void step(const ParameterList& params);

 private:
  double lr_, beta1_, beta2_, eps_;
  long t_ = 0;
  std::vector<Matrix> m_, v_;
};

// Inverted dropout mask (entries 0 or 1/(1-rate)); all ones when rate is 0
// or no generator is supplied.
Matrix dropout_mask(Eigen::Index rows, Eigen::Index cols, double rate, Rng* rng);

Vector softmax(const Vector& logits);

struct Linear {
  Parameter weight;  // out x in
  Parameter bias;    // out x 1

  Linear() = default;
  Linear(const std::string& name, Eigen::Index in, Eigen::Index out)
      : weight(name + ".weight", out, in), bias(name + ".bias", out, 1) {}

  Eigen::Index in_dim() const { return weight.value.cols(); }
  Eigen::Index out_dim() const { return weight.value.rows(); }

  Matrix forward(const Matrix& x) const;
  // Accumulates parameter gradients and returns dL/dx.
  Matrix backward(const Matrix& x, const Matrix& dy);
  void collect(ParameterList& out) { out.push_back(&weight); out.push_back(&bias); }
};

// Convolution over time with ReLU and global max-pooling. Window t covers
// columns t..t+kernel-1 of the input; columns at or past `length` read as
// zeros. Windows start at 0..max(length,1)-1, so padding never contributes
// real content and an empty sequence still yields one (all-zero) window.
struct ConvMaxPool {
  int kernel = 1;
  Parameter weight;  // maps x (kernel * in)
  Parameter bias;    // maps x 1

  struct Cache {
    Matrix windows;           // (kernel * in) x windows
    Vector pooled;
    std::vector<Eigen::Index> argmax;
  };

  ConvMaxPool() = default;
  ConvMaxPool(const std::string& name, int kernel_size, Eigen::Index in, Eigen::Index maps)
      : kernel(kernel_size),
        weight(name + ".weight", maps, kernel_size * in),
        bias(name + ".bias", maps, 1) {}

  Eigen::Index maps() const { return weight.value.rows(); }

  Vector forward(const Matrix& seq, int length, Cache* cache) const;
  // Adds dL/dseq into `dseq` (same shape as the forward input) when given.
  void backward(const Cache& cache, const Vector& dpooled, Matrix* dseq);
  void collect(ParameterList& out) { out.push_back(&weight); out.push_back(&bias); }
};

// Single-direction LSTM. Gate rows are ordered input, forget, cell, output.
struct Lstm {
  Parameter w_input;      // 4H x D
  Parameter w_recurrent;  // 4H x H
  Parameter bias;         // 4H x 1

  struct Cache {
    Matrix x;       // D x T
    Matrix gates;   // 4H x T, post-activation, in time order
    Matrix cells;   // H x T
    Matrix hidden;  // H x T
    bool reverse = false;
  };

  Lstm() = default;
  Lstm(const std::string& name, Eigen::Index in, Eigen::Index units)
      : w_input(name + ".w_input", 4 * units, in),
        w_recurrent(name + ".w_recurrent", 4 * units, units),
        bias(name + ".bias", 4 * units, 1) {}

  Eigen::Index units() const { return w_recurrent.value.cols(); }

  void init(Rng& rng);
  // Returns H x T hidden states indexed by input position. A reverse LSTM
  // reads the sequence from the last column to the first.
  Matrix forward(const Matrix& x, bool reverse, Cache* cache) const;
  Matrix backward(const Cache& cache, const Matrix& dhidden);
  void collect(ParameterList& out) {
    out.push_back(&w_input);
    out.push_back(&w_recurrent);
    out.push_back(&bias);
  }
};

}  // namespace hsd::nn
