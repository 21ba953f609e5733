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

#ifndef ECO_TAPE_H_
#define ECO_TAPE_H_

#include <vector>

#include "eco/matrix.hpp"

namespace eco::ad {

using NodeId = int;

// Reverse-mode automatic differentiation over matrix-valued nodes.
//
// Nodes are appended in evaluation order, so the node list is already a
// topological order of the graph; backward() is a single reverse sweep.
// Values are computed eagerly at node creation. Gradients are allocated
// lazily when backward() runs and only for nodes that transitively depend
// on a differentiable leaf.
class Tape {
 public:
  // Inserts a constant or parameter. requires_grad marks parameter leaves.
  NodeId leaf(Mat value, bool requires_grad);

  // Row r of W as a column vector (embedding lookup).
  NodeId take_row(NodeId W, int r);
  // W (m x n) times x (n x 1).
  NodeId matvec(NodeId W, NodeId x);
  // W^T (n x m) times p (m x 1); the projection used to mix embedding rows.
  NodeId matvec_t(NodeId W, NodeId p);

  NodeId add(NodeId a, NodeId b);
  NodeId sub(NodeId a, NodeId b);
  NodeId mul(NodeId a, NodeId b);  // elementwise
  NodeId concat(NodeId a, NodeId b);  // stacks column vectors
  NodeId scale(NodeId a, double c);
  NodeId sum(NodeId a);  // 1x1

  NodeId sigmoid(NodeId a);
  NodeId tanh(NodeId a);
  NodeId softmax(NodeId a);  // column vector, max-shifted for stability

  // Restricts a probability vector to `allowed` indices and renormalizes:
  // out_k = dist_k / Z inside the set, 0 outside, Z = sum over the set.
  // `allowed` must be strictly increasing. Throws if Z < 1e-30.
  NodeId renorm_masked(NodeId dist, const std::vector<int>& allowed);

  // -log(dist[index]); the per-token loss primitive.
  NodeId neg_log_pick(NodeId dist, int index);

  // Identity value whose gradient is not propagated to the input.
  NodeId stop_grad(NodeId a);

  const Mat& val(NodeId id) const;
  // Valid after backward() for nodes that require grad.
  const Mat& grad(NodeId id) const;
  double scalar(NodeId id) const;
  bool requires_grad(NodeId id) const;

  // Seeds d(root)/d(root) = 1 and sweeps the tape in reverse creation
  // order. root must be 1x1 and must depend on a differentiable leaf.
  void backward(NodeId root);

  size_t size() const { return nodes_.size(); }
  void clear() { nodes_.clear(); }

 private:
  enum class Op {
    kLeaf, kTakeRow, kMatVec, kMatTVec, kAdd, kSub, kMul, kConcat, kScale,
    kSum, kSigmoid, kTanh, kSoftmax, kRenormMasked, kNegLogPick, kStopGrad,
  };

  struct Node {
    Op op;
    NodeId x = -1;
    NodeId y = -1;
    int aux = 0;           // row index / picked index
    double aux_d = 0.0;    // scale factor / renorm Z
    std::vector<int> aux_ids;  // allowed set for kRenormMasked
    Mat v;
    Mat g;
    bool rg = false;
  };

  NodeId push(Node n);
  const Node& at(NodeId id) const;
  void backprop_node(NodeId id);

  std::vector<Node> nodes_;
};

}  // namespace eco::ad

#endif  // ECO_TAPE_H_
