#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <type_traits>
#include <vector>

#include "opde/error.hpp"
#include "opde/nn/tensor.hpp"

namespace opde::nn {

/// Handle to a value recorded on a Graph.
struct Var {
  int id = -1;
};

/// Tape-based reverse-mode differentiation over row-major matrices.
///
/// Every op appends a node holding its value and, when gradients are
/// requested, a closure that pushes the node's gradient to its inputs.
/// Nodes are created in topological order, so backward() replays the tape in
/// reverse. Only the ops this pipeline needs are provided.
template <typename S>
class Graph {
 public:
  using Mat = Matrix<S>;

  explicit Graph(bool requires_grad = true) : requires_grad_(requires_grad) {}

  bool requires_grad() const { return requires_grad_; }
  std::size_t size() const { return nodes_.size(); }

  Var constant(Mat value) { return push(std::move(value), false, nullptr); }

  /// Leaf bound to `p`; backward() accumulates into p.grad.
  Var parameter(Parameter<S>& p) {
    Var v = push(p.value, requires_grad_, nullptr);
    nodes_[static_cast<std::size_t>(v.id)].param = &p;
    return v;
  }

  const Mat& value(Var v) const { return node(v).value; }
  const Mat& grad(Var v) const { return node(v).grad; }

  /// a (n x i) * b (i x o)
  Var matmul(Var a, Var b) {
    check(value(a).cols() == value(b).rows(), "matmul");
    Mat out = value(a) * value(b);
    return push(std::move(out), needs(a, b), [this, a, b](const Mat& g) {
      if (wants(a)) accumulate(a, g * value(b).transpose());
      if (wants(b)) accumulate(b, value(a).transpose() * g);
    });
  }

  /// x * w + bias, bias a 1 x o row broadcast over rows.
  Var linear(Var x, Var w, Var bias) {
    check(value(x).cols() == value(w).rows() && value(bias).rows() == 1 && value(bias).cols() == value(w).cols(),
          "linear");
    Mat out = value(x) * value(w);
    out.rowwise() += value(bias).row(0);
    return push(std::move(out), needs(x, w, bias), [this, x, w, bias](const Mat& g) {
      if (wants(x)) accumulate(x, g * value(w).transpose());
      if (wants(w)) accumulate(w, value(x).transpose() * g);
      if (wants(bias)) accumulate(bias, g.colwise().sum());
    });
  }

  /// x + bias with a 1 x c bias row broadcast over rows.
  Var add_bias(Var x, Var bias) {
    check(value(bias).rows() == 1 && value(bias).cols() == value(x).cols(), "add_bias");
    Mat out = value(x);
    out.rowwise() += value(bias).row(0);
    return push(std::move(out), needs(x, bias), [this, x, bias](const Mat& g) {
      if (wants(x)) accumulate(x, g);
      if (wants(bias)) accumulate(bias, g.colwise().sum());
    });
  }

  Var relu(Var x) {
    Mat out = value(x).cwiseMax(S(0));
    return push(std::move(out), needs(x), [this, x](const Mat& g) {
      if (!wants(x)) return;
      accumulate(x, (value(x).array() > S(0)).select(g, S(0)).matrix());
    });
  }

  Var add(Var a, Var b) {
    check(same_shape(a, b), "add");
    Mat out = value(a) + value(b);
    return push(std::move(out), needs(a, b), [this, a, b](const Mat& g) {
      if (wants(a)) accumulate(a, g);
      if (wants(b)) accumulate(b, g);
    });
  }

  Var sub(Var a, Var b) {
    check(same_shape(a, b), "sub");
    Mat out = value(a) - value(b);
    return push(std::move(out), needs(a, b), [this, a, b](const Mat& g) {
      if (wants(a)) accumulate(a, g);
      if (wants(b)) accumulate(b, -g);
    });
  }

  Var concat_cols(Var a, Var b) {
    check(value(a).rows() == value(b).rows(), "concat_cols");
    const auto ca = value(a).cols();
    Mat out(value(a).rows(), ca + value(b).cols());
    out.leftCols(ca) = value(a);
    out.rightCols(value(b).cols()) = value(b);
    return push(std::move(out), needs(a, b), [this, a, b, ca](const Mat& g) {
      if (wants(a)) accumulate(a, g.leftCols(ca));
      if (wants(b)) accumulate(b, g.rightCols(g.cols() - ca));
    });
  }

  /// Rows [start, start + count).
  Var slice_rows(Var a, Eigen::Index start, Eigen::Index count) {
    check(start >= 0 && count >= 0 && start + count <= value(a).rows(), "slice_rows");
    Mat out = value(a).middleRows(start, count);
    return push(std::move(out), needs(a), [this, a, start, count](const Mat& g) {
      if (!wants(a)) return;
      Mat full = Mat::Zero(value(a).rows(), value(a).cols());
      full.middleRows(start, count) = g;
      accumulate(a, full);
    });
  }

  /// out.row(i) = a.row(index[i]); duplicates allowed.
  Var gather_rows(Var a, std::vector<int> index) {
    const Mat& src = value(a);
    Mat out(static_cast<Eigen::Index>(index.size()), src.cols());
    for (std::size_t i = 0; i < index.size(); ++i) {
      check(index[i] >= 0 && index[i] < src.rows(), "gather_rows index");
      out.row(static_cast<Eigen::Index>(i)) = src.row(index[i]);
    }
    return push(std::move(out), needs(a), [this, a, index = std::move(index)](const Mat& g) {
      if (!wants(a)) return;
      Mat scatter = Mat::Zero(value(a).rows(), value(a).cols());
      for (std::size_t i = 0; i < index.size(); ++i) scatter.row(index[i]) += g.row(static_cast<Eigen::Index>(i));
      accumulate(a, scatter);
    });
  }

  /// Row i of `a` becomes rows [i * times, (i + 1) * times).
  Var repeat_rows(Var a, int times) {
    const Mat& src = value(a);
    Mat out(src.rows() * times, src.cols());
    for (Eigen::Index i = 0; i < src.rows(); ++i) {
      out.middleRows(i * times, times).rowwise() = src.row(i);
    }
    return push(std::move(out), needs(a), [this, a, times](const Mat& g) {
      if (!wants(a)) return;
      Mat acc(value(a).rows(), value(a).cols());
      for (Eigen::Index i = 0; i < acc.rows(); ++i) acc.row(i) = g.middleRows(i * times, times).colwise().sum();
      accumulate(a, acc);
    });
  }

  /// Column-wise max over consecutive groups of `group` rows.
  Var max_over_groups(Var a, int group) {
    const Mat& src = value(a);
    check(group > 0 && src.rows() % group == 0, "max_over_groups");
    const Eigen::Index n = src.rows() / group;
    Mat out(n, src.cols());
    std::vector<int> arg(static_cast<std::size_t>(n * src.cols()));
    for (Eigen::Index i = 0; i < n; ++i) {
      int* slot = arg.data() + i * src.cols();
      group_argmax(src, i * group, group, &out(i, 0), slot);
      for (Eigen::Index c = 0; c < src.cols(); ++c) slot[c] += static_cast<int>(i * group);
    }
    return push(std::move(out), needs(a), [this, a, arg = std::move(arg)](const Mat& g) {
      if (!wants(a)) return;
      Mat scatter = Mat::Zero(value(a).rows(), value(a).cols());
      const Eigen::Index cols = g.cols();
      for (Eigen::Index i = 0; i < g.rows(); ++i) {
        for (Eigen::Index c = 0; c < cols; ++c) scatter(arg[static_cast<std::size_t>(i * cols + c)], c) += g(i, c);
      }
      accumulate(a, scatter);
    });
  }

  /// Fused edge convolution over a fixed neighbor table. For point i with
  /// neighbors j = knn[i * k + t], the edge row is [x_i, x_j - x_i];
  ///   out_i = max_t relu(relu(e_it * w1 + b1) * w2 + b2)   (column-wise).
  /// Same result as composing repeat_rows, gather_rows, sub, concat_cols,
  /// linear, relu and max_over_groups, but the per-edge activations live only
  /// inside small row blocks and are recomputed during backward.
  Var edge_conv(Var x, std::vector<int> knn, int k, Var w1, Var b1, Var w2, Var b2) {
    const Mat& X = value(x);
    const Eigen::Index n = X.rows();
    const Eigen::Index d = X.cols();
    check(k > 0 && static_cast<Eigen::Index>(knn.size()) == n * k, "edge_conv neighbor table");
    check(value(w1).rows() == 2 * d && value(b1).rows() == 1 && value(b1).cols() == value(w1).cols(), "edge_conv w1");
    check(value(w2).rows() == value(w1).cols() && value(b2).rows() == 1 && value(b2).cols() == value(w2).cols(),
          "edge_conv w2");
    for (int j : knn) check(j >= 0 && j < n, "edge_conv neighbor index");
    const Eigen::Index c2 = value(w2).cols();
    Mat out(n, c2);
    std::vector<int> arg(static_cast<std::size_t>(n * c2));
    EdgeBlock blk;
    for (Eigen::Index i0 = 0; i0 < n; i0 += kEdgeBlock) {
      const Eigen::Index nb = std::min<Eigen::Index>(kEdgeBlock, n - i0);
      edge_forward(blk, X, knn, k, i0, nb, value(w1), value(b1), value(w2), value(b2));
      for (Eigen::Index p = 0; p < nb; ++p) {
        group_argmax(blk.h2, p * k, k, &out(i0 + p, 0), arg.data() + (i0 + p) * c2);
      }
    }
    return push(std::move(out), needs(x, w1, b1, w2, b2),
                [this, x, w1, b1, w2, b2, k, knn = std::move(knn), arg = std::move(arg)](const Mat& g) {
                  const Mat& X = value(x);
                  const Eigen::Index n = X.rows();
                  const Eigen::Index d = X.cols();
                  const Mat& W1 = value(w1);
                  const Mat& W2 = value(w2);
                  const Eigen::Index c1 = W1.cols();
                  const Eigen::Index c2 = W2.cols();
                  Mat dw1 = Mat::Zero(W1.rows(), c1), db1 = Mat::Zero(1, c1);
                  Mat dw2 = Mat::Zero(W2.rows(), c2), db2 = Mat::Zero(1, c2);
                  Mat dx;
                  if (wants(x)) dx = Mat::Zero(n, d);
                  EdgeBlock blk;
                  Mat dpre2, dpre1, de;
                  for (Eigen::Index i0 = 0; i0 < n; i0 += kEdgeBlock) {
                    const Eigen::Index nb = std::min<Eigen::Index>(kEdgeBlock, n - i0);
                    const Eigen::Index rows = nb * k;
                    edge_forward(blk, X, knn, k, i0, nb, W1, value(b1), W2, value(b2));
                    dpre2.setZero(rows, c2);
                    for (Eigen::Index p = 0; p < nb; ++p) {
                      for (Eigen::Index c = 0; c < c2; ++c) {
                        const Eigen::Index r = p * k + arg[static_cast<std::size_t>((i0 + p) * c2 + c)];
                        if (blk.h2(r, c) > S(0)) dpre2(r, c) = g(i0 + p, c);
                      }
                    }
                    dw2.noalias() += blk.h1.topRows(rows).transpose() * dpre2;
                    db2 += dpre2.colwise().sum();
                    dpre1.noalias() = dpre2 * W2.transpose();
                    dpre1 = (blk.h1.topRows(rows).array() > S(0)).select(dpre1, S(0));
                    dw1.noalias() += blk.e.topRows(rows).transpose() * dpre1;
                    db1 += dpre1.colwise().sum();
                    if (wants(x)) {
                      de.noalias() = dpre1 * W1.transpose();
                      for (Eigen::Index p = 0; p < nb; ++p) {
                        const Eigen::Index i = i0 + p;
                        for (Eigen::Index t = 0; t < k; ++t) {
                          const auto row = de.row(p * k + t);
                          const int j = knn[static_cast<std::size_t>(i * k + t)];
                          dx.row(i) += row.head(d) - row.tail(d);
                          dx.row(j) += row.tail(d);
                        }
                      }
                    }
                  }
                  if (wants(x)) accumulate(x, dx);
                  if (wants(w1)) accumulate(w1, dw1);
                  if (wants(b1)) accumulate(b1, db1);
                  if (wants(w2)) accumulate(w2, dw2);
                  if (wants(b2)) accumulate(b2, db2);
                });
  }

  /// One step of a dense_chain: optional weight, optional bias, optional relu.
  struct DenseLayer {
    std::optional<Var> w;
    std::optional<Var> b;
    bool relu = true;
  };

  /// Applies the layers in order, row block by row block. Equivalent to the
  /// composition of matmul / add_bias / relu; only the final output is kept
  /// and intermediates are recomputed per block during backward.
  Var dense_chain(Var x, std::vector<DenseLayer> layers) {
    check(!layers.empty(), "dense_chain needs a layer");
    Eigen::Index width = value(x).cols();
    for (const auto& l : layers) {
      if (l.w) {
        check(value(*l.w).rows() == width, "dense_chain weight");
        width = value(*l.w).cols();
      }
      if (l.b) check(value(*l.b).rows() == 1 && value(*l.b).cols() == width, "dense_chain bias");
    }
    const Mat& X = value(x);
    Mat out(X.rows(), width);
    std::vector<Mat> acts;
    for (Eigen::Index r0 = 0; r0 < X.rows(); r0 += kChainBlock) {
      const Eigen::Index rows = std::min<Eigen::Index>(kChainBlock, X.rows() - r0);
      chain_forward(acts, X.middleRows(r0, rows), layers);
      out.middleRows(r0, rows) = acts.back();
    }
    bool need = wants(x);
    for (const auto& l : layers) need = need || (l.w && wants(*l.w)) || (l.b && wants(*l.b));
    return push(std::move(out), requires_grad_ && need, [this, x, layers = std::move(layers)](const Mat& g) {
      const Mat& X = value(x);
      const std::size_t m = layers.size();
      std::vector<Mat> dw(m), db(m);
      for (std::size_t i = 0; i < m; ++i) {
        if (layers[i].w) dw[i] = Mat::Zero(value(*layers[i].w).rows(), value(*layers[i].w).cols());
        if (layers[i].b) db[i] = Mat::Zero(1, value(*layers[i].b).cols());
      }
      Mat dx;
      if (wants(x)) dx.resize(X.rows(), X.cols());
      std::vector<Mat> acts;
      Mat grad, prev;
      for (Eigen::Index r0 = 0; r0 < X.rows(); r0 += kChainBlock) {
        const Eigen::Index rows = std::min<Eigen::Index>(kChainBlock, X.rows() - r0);
        chain_forward(acts, X.middleRows(r0, rows), layers);
        grad = g.middleRows(r0, rows);
        for (std::size_t i = m; i-- > 0;) {
          // acts[i + 1] is the output of layer i, acts[0] its block input
          if (layers[i].relu) grad = (acts[i + 1].array() > S(0)).select(grad, S(0));
          if (layers[i].b) db[i] += grad.colwise().sum();
          if (layers[i].w) {
            dw[i].noalias() += acts[i].transpose() * grad;
            if (i > 0 || wants(x)) {
              prev.noalias() = grad * value(*layers[i].w).transpose();
              grad.swap(prev);
            }
          }
        }
        if (wants(x)) dx.middleRows(r0, rows) = grad;
      }
      if (wants(x)) accumulate(x, dx);
      for (std::size_t i = 0; i < m; ++i) {
        if (layers[i].w && wants(*layers[i].w)) accumulate(*layers[i].w, dw[i]);
        if (layers[i].b && wants(*layers[i].b)) accumulate(*layers[i].b, db[i]);
      }
    });
  }

  /// a + q.row(index[i]) for every row i of a (rows of a == index.size()).
  Var add_gathered(Var a, Var q, std::vector<int> index) {
    check(static_cast<Eigen::Index>(index.size()) == value(a).rows() && value(a).cols() == value(q).cols(),
          "add_gathered");
    Mat out = value(a);
    const Mat& src = value(q);
    for (std::size_t i = 0; i < index.size(); ++i) {
      check(index[i] >= 0 && index[i] < src.rows(), "add_gathered index");
      out.row(static_cast<Eigen::Index>(i)) += src.row(index[i]);
    }
    return push(std::move(out), needs(a, q), [this, a, q, index = std::move(index)](const Mat& g) {
      if (wants(a)) accumulate(a, g);
      if (!wants(q)) return;
      Mat scatter = Mat::Zero(value(q).rows(), value(q).cols());
      for (std::size_t i = 0; i < index.size(); ++i) scatter.row(index[i]) += g.row(static_cast<Eigen::Index>(i));
      accumulate(q, scatter);
    });
  }

  /// 1 x c column-wise max over all rows.
  Var max_over_rows(Var a) { return max_over_groups(a, static_cast<int>(value(a).rows())); }

  /// 1 x c row repeated n times.
  Var broadcast_rows(Var a, Eigen::Index n) {
    check(value(a).rows() == 1, "broadcast_rows");
    Mat out = value(a).replicate(n, 1);
    return push(std::move(out), needs(a), [this, a](const Mat& g) {
      if (wants(a)) accumulate(a, g.colwise().sum());
    });
  }

  /// Row-major reshape (no data movement).
  Var reshape(Var a, Eigen::Index rows, Eigen::Index cols) {
    check(rows * cols == value(a).size(), "reshape");
    Mat out = Eigen::Map<const Mat>(value(a).data(), rows, cols);
    return push(std::move(out), needs(a), [this, a](const Mat& g) {
      if (wants(a)) accumulate(a, Eigen::Map<const Mat>(g.data(), value(a).rows(), value(a).cols()));
    });
  }

  /// Inverted dropout: each entry is zeroed with probability `rate` and the
  /// survivors scaled by 1 / (1 - rate).
  template <typename Rng>
  Var dropout(Var x, double rate, Rng& rng) {
    if (rate < 0.0 || rate >= 1.0) throw DomainError("dropout rate must be in [0, 1)");
    if (rate == 0.0) return x;
    std::bernoulli_distribution keep(1.0 - rate);
    const S scale = S(1.0 / (1.0 - rate));
    Mat mask(value(x).rows(), value(x).cols());
    for (Eigen::Index i = 0; i < mask.size(); ++i) mask.data()[i] = keep(rng) ? scale : S(0);
    Mat out = value(x).cwiseProduct(mask);
    return push(std::move(out), needs(x), [this, x, mask = std::move(mask)](const Mat& g) {
      if (wants(x)) accumulate(x, g.cwiseProduct(mask));
    });
  }

  /// Sum of all entries (1 x 1).
  Var sum(Var a) {
    Mat out(1, 1);
    out(0, 0) = value(a).sum();
    return push(std::move(out), needs(a), [this, a](const Mat& g) {
      if (wants(a)) accumulate(a, Mat::Constant(value(a).rows(), value(a).cols(), g(0, 0)));
    });
  }

  /// InfoNCE / cross-entropy over all entries of `scores` with `positive` as
  /// the target: logsumexp(scores) - scores[positive]. Returns 1 x 1.
  Var infonce(Var scores, Eigen::Index positive) {
    const Mat& s = value(scores);
    if (positive < 0 || positive >= s.size()) throw DomainError("infonce: positive index out of range");
    if (!s.allFinite()) throw NumericalError("infonce: non-finite scores");
    const S max = s.maxCoeff();
    const S lse = max + std::log((s.array() - max).exp().sum());
    Mat out(1, 1);
    out(0, 0) = lse - s.data()[positive];
    return push(std::move(out), needs(scores), [this, scores, positive, lse](const Mat& g) {
      if (!wants(scores)) return;
      Mat d = (value(scores).array() - lse).exp().matrix();
      d.data()[positive] -= S(1);
      accumulate(scores, g(0, 0) * d);
    });
  }

  /// Seeds d(loss)/d(loss) = `seed` (1 by default) and replays the tape.
  /// Parameter leaves add their gradient into the bound Parameter::grad.
  void backward(Var loss, S seed = S(1)) {
    if (!requires_grad_) throw DomainError("backward on a graph built without gradients");
    check(value(loss).size() == 1, "backward needs a scalar");
    for (auto& n : nodes_) n.grad.resize(0, 0);
    node(loss).grad = Mat::Constant(1, 1, seed);
    for (int id = loss.id; id >= 0; --id) {
      Node& n = nodes_[static_cast<std::size_t>(id)];
      if (n.grad.size() == 0) continue;
      if (n.backward) n.backward(n.grad);
      if (n.param != nullptr) {
        if (n.param->grad.rows() != n.grad.rows() || n.param->grad.cols() != n.grad.cols()) n.param->zero_grad();
        n.param->grad += n.grad;
      }
    }
  }

 private:
  struct Node {
    Mat value;
    Mat grad;
    std::function<void(const Mat&)> backward;
    Parameter<S>* param = nullptr;
    bool needs_grad = false;
  };

  /// Column-wise max of rows [row0, row0 + group) of a row-major matrix into
  /// `values`, with the winning row offset (first on ties) in `arg`. Runs
  /// along rows so the inner loop is contiguous.
  static void group_argmax(const Mat& m, Eigen::Index row0, Eigen::Index group, S* values, int* arg) {
    const Eigen::Index cols = m.cols();
    const S* first = m.data() + row0 * cols;
    for (Eigen::Index c = 0; c < cols; ++c) {
      values[c] = first[c];
      arg[c] = 0;
    }
    for (Eigen::Index t = 1; t < group; ++t) {
      const S* row = first + t * cols;
      const int ti = static_cast<int>(t);
      for (Eigen::Index c = 0; c < cols; ++c) {
        const bool more = row[c] > values[c];
        values[c] = more ? row[c] : values[c];
        arg[c] = more ? ti : arg[c];
      }
    }
  }

  static constexpr Eigen::Index kEdgeBlock = 64;
  static constexpr Eigen::Index kChainBlock = 512;

  struct EdgeBlock {
    Mat e, h1, h2;
  };

  static void edge_forward(EdgeBlock& blk, const Mat& X, const std::vector<int>& knn, int k, Eigen::Index i0,
                           Eigen::Index nb, const Mat& w1, const Mat& b1, const Mat& w2, const Mat& b2) {
    const Eigen::Index d = X.cols();
    const Eigen::Index rows = nb * k;
    blk.e.resize(rows, 2 * d);
    for (Eigen::Index p = 0; p < nb; ++p) {
      const Eigen::Index i = i0 + p;
      for (Eigen::Index t = 0; t < k; ++t) {
        const int j = knn[static_cast<std::size_t>(i * k + t)];
        blk.e.row(p * k + t).head(d) = X.row(i);
        blk.e.row(p * k + t).tail(d) = X.row(j) - X.row(i);
      }
    }
    blk.h1.resize(rows, w1.cols());
    blk.h1.noalias() = blk.e * w1;
    blk.h1.rowwise() += b1.row(0);
    blk.h1 = blk.h1.cwiseMax(S(0));
    blk.h2.resize(rows, w2.cols());
    blk.h2.noalias() = blk.h1 * w2;
    blk.h2.rowwise() += b2.row(0);
    blk.h2 = blk.h2.cwiseMax(S(0));
  }

  template <typename Block>
  void chain_forward(std::vector<Mat>& acts, const Block& input, const std::vector<DenseLayer>& layers) const {
    acts.resize(layers.size() + 1);
    acts[0] = input;
    for (std::size_t i = 0; i < layers.size(); ++i) {
      const auto& l = layers[i];
      if (l.w) {
        acts[i + 1].noalias() = acts[i] * value(*l.w);
      } else {
        acts[i + 1] = acts[i];
      }
      if (l.b) acts[i + 1].rowwise() += value(*l.b).row(0);
      if (l.relu) acts[i + 1] = acts[i + 1].cwiseMax(S(0));
    }
  }

  Node& node(Var v) { return nodes_.at(static_cast<std::size_t>(v.id)); }
  const Node& node(Var v) const { return nodes_.at(static_cast<std::size_t>(v.id)); }
  bool same_shape(Var a, Var b) const {
    return value(a).rows() == value(b).rows() && value(a).cols() == value(b).cols();
  }
  static void check(bool ok, const char* op) {
    if (!ok) throw ShapeError(std::string("autodiff: shape mismatch in ") + op);
  }

  bool wants(Var v) const { return node(v).needs_grad; }

  template <typename... Vars>
  bool needs(Vars... vs) const {
    return requires_grad_ && (wants(vs) || ...);
  }

  template <typename Derived>
  void accumulate(Var v, const Eigen::MatrixBase<Derived>& g) {
    Node& n = node(v);
    if (n.grad.size() == 0) {
      n.grad = g;
    } else {
      n.grad += g;
    }
  }

  template <typename F>
  Var push(Mat value, bool needs_grad, F&& backward) {
    Node n;
    n.value = std::move(value);
    n.needs_grad = needs_grad;
    if constexpr (!std::is_same_v<std::decay_t<F>, std::nullptr_t>) {
      if (needs_grad) n.backward = std::forward<F>(backward);
    }
    nodes_.push_back(std::move(n));
    return Var{static_cast<int>(nodes_.size()) - 1};
  }

  bool requires_grad_;
  std::vector<Node> nodes_;
};

}  // namespace opde::nn
