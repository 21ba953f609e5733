// Copyright 2026 The ECO Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "eco/tape.hpp"

#include <algorithm>
#include <cmath>

namespace eco::ad {

namespace {
constexpr double kDegenerateZ = 1e-30;
}  // namespace

NodeId Tape::push(Node n) {
  nodes_.push_back(std::move(n));
  return static_cast<NodeId>(nodes_.size()) - 1;
}

const Tape::Node& Tape::at(NodeId id) const {
  ECO_CHECK(id >= 0 && id < static_cast<NodeId>(nodes_.size()),
            "tape: node id " << id << " out of range");
  return nodes_[id];
}

const Mat& Tape::val(NodeId id) const { return at(id).v; }

const Mat& Tape::grad(NodeId id) const {
  const Node& n = at(id);
  ECO_CHECK(n.rg, "tape: node " << id << " does not carry a gradient");
  ECO_CHECK(n.g.size() == n.v.size(), "tape: backward() has not run");
  return n.g;
}

double Tape::scalar(NodeId id) const {
  const Node& n = at(id);
  ECO_CHECK(n.v.is_scalar(), "tape: node " << id << " is not scalar");
  return n.v.a[0];
}

bool Tape::requires_grad(NodeId id) const { return at(id).rg; }

NodeId Tape::leaf(Mat value, bool requires_grad) {
  Node n;
  n.op = Op::kLeaf;
  n.v = std::move(value);
  n.rg = requires_grad;
  return push(std::move(n));
}

NodeId Tape::take_row(NodeId W, int r) {
  const Node& w = at(W);
  ECO_CHECK(r >= 0 && r < w.v.rows, "take_row: row " << r << " out of " << w.v.rows);
  Node n;
  n.op = Op::kTakeRow;
  n.x = W;
  n.aux = r;
  n.rg = w.rg;
  n.v = Mat(w.v.cols, 1);
  for (int j = 0; j < w.v.cols; ++j) n.v.a[j] = w.v(r, j);
  return push(std::move(n));
}

NodeId Tape::matvec(NodeId W, NodeId x) {
  const Node& w = at(W);
  const Node& xv = at(x);
  ECO_CHECK(xv.v.is_vector() && w.v.cols == xv.v.rows,
            "matvec: shape mismatch " << w.v.rows << "x" << w.v.cols << " * "
                                      << xv.v.rows << "x" << xv.v.cols);
  Node n;
  n.op = Op::kMatVec;
  n.x = W;
  n.y = x;
  n.rg = w.rg || xv.rg;
  n.v = Mat(w.v.rows, 1);
  for (int i = 0; i < w.v.rows; ++i) {
    double acc = 0.0;
    const double* row = &w.v.a[static_cast<size_t>(i) * w.v.cols];
    for (int j = 0; j < w.v.cols; ++j) acc += row[j] * xv.v.a[j];
    n.v.a[i] = acc;
  }
  return push(std::move(n));
}

NodeId Tape::matvec_t(NodeId W, NodeId p) {
  const Node& w = at(W);
  const Node& pv = at(p);
  ECO_CHECK(pv.v.is_vector() && w.v.rows == pv.v.rows,
            "matvec_t: shape mismatch " << w.v.rows << "x" << w.v.cols << " vs "
                                        << pv.v.rows << "x" << pv.v.cols);
  Node n;
  n.op = Op::kMatTVec;
  n.x = W;
  n.y = p;
  n.rg = w.rg || pv.rg;
  n.v = Mat(w.v.cols, 1);
  for (int i = 0; i < w.v.rows; ++i) {
    const double pi = pv.v.a[i];
    if (pi == 0.0) continue;
    const double* row = &w.v.a[static_cast<size_t>(i) * w.v.cols];
    for (int j = 0; j < w.v.cols; ++j) n.v.a[j] += pi * row[j];
  }
  return push(std::move(n));
}

NodeId Tape::add(NodeId a, NodeId b) {
  const Node& av = at(a);
  const Node& bv = at(b);
  ECO_CHECK(av.v.same_shape(bv.v), "add: shape mismatch");
  Node n;
  n.op = Op::kAdd;
  n.x = a;
  n.y = b;
  n.rg = av.rg || bv.rg;
  n.v = av.v;
  for (size_t i = 0; i < n.v.size(); ++i) n.v.a[i] += bv.v.a[i];
  return push(std::move(n));
}

NodeId Tape::sub(NodeId a, NodeId b) {
  const Node& av = at(a);
  const Node& bv = at(b);
  ECO_CHECK(av.v.same_shape(bv.v), "sub: shape mismatch");
  Node n;
  n.op = Op::kSub;
  n.x = a;
  n.y = b;
  n.rg = av.rg || bv.rg;
  n.v = av.v;
  for (size_t i = 0; i < n.v.size(); ++i) n.v.a[i] -= bv.v.a[i];
  return push(std::move(n));
}

NodeId Tape::mul(NodeId a, NodeId b) {
  const Node& av = at(a);
  const Node& bv = at(b);
  ECO_CHECK(av.v.same_shape(bv.v), "mul: shape mismatch");
  Node n;
  n.op = Op::kMul;
  n.x = a;
  n.y = b;
  n.rg = av.rg || bv.rg;
  n.v = av.v;
  for (size_t i = 0; i < n.v.size(); ++i) n.v.a[i] *= bv.v.a[i];
  return push(std::move(n));
}

NodeId Tape::concat(NodeId a, NodeId b) {
  const Node& av = at(a);
  const Node& bv = at(b);
  ECO_CHECK(av.v.is_vector() && bv.v.is_vector(), "concat: expects column vectors");
  Node n;
  n.op = Op::kConcat;
  n.x = a;
  n.y = b;
  n.rg = av.rg || bv.rg;
  n.v = Mat(av.v.rows + bv.v.rows, 1);
  std::copy(av.v.a.begin(), av.v.a.end(), n.v.a.begin());
  std::copy(bv.v.a.begin(), bv.v.a.end(), n.v.a.begin() + av.v.rows);
  return push(std::move(n));
}

NodeId Tape::scale(NodeId a, double c) {
  const Node& av = at(a);
  Node n;
  n.op = Op::kScale;
  n.x = a;
  n.aux_d = c;
  n.rg = av.rg;
  n.v = av.v;
  for (double& x : n.v.a) x *= c;
  return push(std::move(n));
}

NodeId Tape::sum(NodeId a) {
  const Node& av = at(a);
  Node n;
  n.op = Op::kSum;
  n.x = a;
  n.rg = av.rg;
  n.v = Mat(1, 1);
  double acc = 0.0;
  for (double x : av.v.a) acc += x;
  n.v.a[0] = acc;
  return push(std::move(n));
}

NodeId Tape::sigmoid(NodeId a) {
  const Node& av = at(a);
  Node n;
  n.op = Op::kSigmoid;
  n.x = a;
  n.rg = av.rg;
  n.v = av.v;
  for (double& x : n.v.a) x = 1.0 / (1.0 + std::exp(-x));
  return push(std::move(n));
}

NodeId Tape::tanh(NodeId a) {
  const Node& av = at(a);
  Node n;
  n.op = Op::kTanh;
  n.x = a;
  n.rg = av.rg;
  n.v = av.v;
  for (double& x : n.v.a) x = std::tanh(x);
  return push(std::move(n));
}

NodeId Tape::softmax(NodeId a) {
  const Node& av = at(a);
  ECO_CHECK(av.v.is_vector() && av.v.rows > 0, "softmax: expects a non-empty vector");
  Node n;
  n.op = Op::kSoftmax;
  n.x = a;
  n.rg = av.rg;
  n.v = av.v;
  double mx = n.v.a[0];
  for (double x : n.v.a) mx = std::max(mx, x);
  double z = 0.0;
  for (double& x : n.v.a) {
    x = std::exp(x - mx);
    z += x;
  }
  for (double& x : n.v.a) x /= z;
  return push(std::move(n));
}

NodeId Tape::renorm_masked(NodeId dist, const std::vector<int>& allowed) {
  const Node& dv = at(dist);
  ECO_CHECK(dv.v.is_vector(), "renorm_masked: expects a column vector");
  ECO_CHECK(!allowed.empty(), "renorm_masked: empty allowed set");
  double z = 0.0;
  int prev = -1;
  for (int k : allowed) {
    ECO_CHECK(k > prev, "renorm_masked: allowed set must be strictly increasing");
    ECO_CHECK(k >= 0 && k < dv.v.rows, "renorm_masked: index " << k << " out of range");
    z += dv.v.a[k];
    prev = k;
  }
  ECO_CHECK(z >= kDegenerateZ,
            "renorm_masked: degenerate distribution, allowed mass " << z);
  Node n;
  n.op = Op::kRenormMasked;
  n.x = dist;
  n.rg = dv.rg;
  n.aux_d = z;
  n.aux_ids = allowed;
  n.v = Mat(dv.v.rows, 1);
  for (int k : allowed) n.v.a[k] = dv.v.a[k] / z;
  return push(std::move(n));
}

NodeId Tape::neg_log_pick(NodeId dist, int index) {
  const Node& dv = at(dist);
  ECO_CHECK(dv.v.is_vector() && index >= 0 && index < dv.v.rows,
            "neg_log_pick: index " << index << " out of range");
  const double p = dv.v.a[index];
  ECO_CHECK(p > 0.0, "neg_log_pick: probability of index " << index << " is " << p);
  Node n;
  n.op = Op::kNegLogPick;
  n.x = dist;
  n.aux = index;
  n.rg = dv.rg;
  n.v = Mat(1, 1);
  n.v.a[0] = -std::log(p);
  return push(std::move(n));
}

NodeId Tape::stop_grad(NodeId a) {
  Node n;
  n.op = Op::kStopGrad;
  n.x = a;
  n.rg = false;  // blocks gradient flow by construction
  n.v = at(a).v;
  return push(std::move(n));
}

void Tape::backward(NodeId root) {
  const Node& r = at(root);
  ECO_CHECK(r.v.is_scalar(), "backward: root must be scalar");
  ECO_CHECK(r.rg, "backward: root does not depend on any differentiable leaf");
  for (NodeId i = 0; i <= root; ++i) {
    if (nodes_[i].rg) {
      nodes_[i].g = Mat(nodes_[i].v.rows, nodes_[i].v.cols);
    }
  }
  nodes_[root].g.a[0] = 1.0;
  for (NodeId i = root; i >= 0; --i) {
    if (nodes_[i].rg) backprop_node(i);
  }
}

void Tape::backprop_node(NodeId id) {
  Node& n = nodes_[id];
  const Mat& g = n.g;
  switch (n.op) {
    case Op::kLeaf:
    case Op::kStopGrad:
      break;
    case Op::kTakeRow: {
      Node& w = nodes_[n.x];
      if (!w.rg) break;
      for (int j = 0; j < w.v.cols; ++j) w.g(n.aux, j) += g.a[j];
      break;
    }
    case Op::kMatVec: {
      Node& w = nodes_[n.x];
      Node& x = nodes_[n.y];
      const int m = w.v.rows, k = w.v.cols;
      if (w.rg) {
        for (int i = 0; i < m; ++i) {
          const double gi = g.a[i];
          if (gi == 0.0) continue;
          double* grow = &w.g.a[static_cast<size_t>(i) * k];
          for (int j = 0; j < k; ++j) grow[j] += gi * x.v.a[j];
        }
      }
      if (x.rg) {
        for (int i = 0; i < m; ++i) {
          const double gi = g.a[i];
          if (gi == 0.0) continue;
          const double* row = &w.v.a[static_cast<size_t>(i) * k];
          for (int j = 0; j < k; ++j) x.g.a[j] += gi * row[j];
        }
      }
      break;
    }
    case Op::kMatTVec: {
      Node& w = nodes_[n.x];
      Node& p = nodes_[n.y];
      const int m = w.v.rows, k = w.v.cols;
      if (w.rg) {
        for (int i = 0; i < m; ++i) {
          const double pi = p.v.a[i];
          if (pi == 0.0) continue;
          double* grow = &w.g.a[static_cast<size_t>(i) * k];
          for (int j = 0; j < k; ++j) grow[j] += pi * g.a[j];
        }
      }
      if (p.rg) {
        for (int i = 0; i < m; ++i) {
          const double* row = &w.v.a[static_cast<size_t>(i) * k];
          double acc = 0.0;
          for (int j = 0; j < k; ++j) acc += row[j] * g.a[j];
          p.g.a[i] += acc;
        }
      }
      break;
    }
    case Op::kAdd: {
      Node& a = nodes_[n.x];
      Node& b = nodes_[n.y];
      if (a.rg) for (size_t i = 0; i < g.size(); ++i) a.g.a[i] += g.a[i];
      if (b.rg) for (size_t i = 0; i < g.size(); ++i) b.g.a[i] += g.a[i];
      break;
    }
    case Op::kSub: {
      Node& a = nodes_[n.x];
      Node& b = nodes_[n.y];
      if (a.rg) for (size_t i = 0; i < g.size(); ++i) a.g.a[i] += g.a[i];
      if (b.rg) for (size_t i = 0; i < g.size(); ++i) b.g.a[i] -= g.a[i];
      break;
    }
    case Op::kMul: {
      Node& a = nodes_[n.x];
      Node& b = nodes_[n.y];
      if (a.rg) for (size_t i = 0; i < g.size(); ++i) a.g.a[i] += g.a[i] * b.v.a[i];
      if (b.rg) for (size_t i = 0; i < g.size(); ++i) b.g.a[i] += g.a[i] * a.v.a[i];
      break;
    }
    case Op::kConcat: {
      Node& a = nodes_[n.x];
      Node& b = nodes_[n.y];
      if (a.rg) for (int i = 0; i < a.v.rows; ++i) a.g.a[i] += g.a[i];
      if (b.rg) for (int i = 0; i < b.v.rows; ++i) b.g.a[i] += g.a[a.v.rows + i];
      break;
    }
    case Op::kScale: {
      Node& a = nodes_[n.x];
      if (a.rg) for (size_t i = 0; i < g.size(); ++i) a.g.a[i] += n.aux_d * g.a[i];
      break;
    }
    case Op::kSum: {
      Node& a = nodes_[n.x];
      if (a.rg) for (size_t i = 0; i < a.g.size(); ++i) a.g.a[i] += g.a[0];
      break;
    }
    case Op::kSigmoid: {
      Node& a = nodes_[n.x];
      if (a.rg) {
        for (size_t i = 0; i < g.size(); ++i) {
          const double y = n.v.a[i];
          a.g.a[i] += g.a[i] * y * (1.0 - y);
        }
      }
      break;
    }
    case Op::kTanh: {
      Node& a = nodes_[n.x];
      if (a.rg) {
        for (size_t i = 0; i < g.size(); ++i) {
          const double y = n.v.a[i];
          a.g.a[i] += g.a[i] * (1.0 - y * y);
        }
      }
      break;
    }
    case Op::kSoftmax: {
      Node& a = nodes_[n.x];
      if (a.rg) {
        double dot = 0.0;
        for (size_t i = 0; i < g.size(); ++i) dot += g.a[i] * n.v.a[i];
        for (size_t i = 0; i < g.size(); ++i) a.g.a[i] += (g.a[i] - dot) * n.v.a[i];
      }
      break;
    }
    case Op::kRenormMasked: {
      Node& a = nodes_[n.x];
      if (a.rg) {
        double dot = 0.0;  // sum over the allowed set of g_k * out_k
        for (int k : n.aux_ids) dot += g.a[k] * n.v.a[k];
        for (int k : n.aux_ids) a.g.a[k] += (g.a[k] - dot) / n.aux_d;
      }
      break;
    }
    case Op::kNegLogPick: {
      Node& a = nodes_[n.x];
      if (a.rg) a.g.a[n.aux] += -g.a[0] / a.v.a[n.aux];
      break;
    }
  }
}

}  // namespace eco::ad
