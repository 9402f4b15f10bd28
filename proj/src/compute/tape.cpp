#include "defsurv/compute/tape.hpp"

#include <boost/math/special_functions/digamma.hpp>
#include <cmath>

namespace defsurv::compute {

double softplus(double x) {
  // max(x,0) + log1p(exp(-|x|)): exact for large |x|, no overflow.
  return std::max(x, 0.0) + std::log1p(std::exp(-std::abs(x)));
}

double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

double relu(double x) { return x > 0.0 ? x : 0.0; }
double square(double x) { return x * x; }
double reciprocal(double x) { return 1.0 / x; }
double digamma(double x) { return boost::math::digamma(x); }

int Tape::check_id(int id) const {
  if (id < 0 || static_cast<std::size_t>(id) >= nodes_.size())
    throw ShapeError("tape: node id out of range");
  return id;
}

int Tape::push(Op op, int a, int b, Mat v) {
  nodes_.push_back(Node{op, a, b});
  vals_.push_back(std::move(v));
  return static_cast<int>(nodes_.size()) - 1;
}

int Tape::constant(Mat v) { return push(Op::kConst, -1, -1, std::move(v)); }
int Tape::variable(Mat v) { return push(Op::kVar, -1, -1, std::move(v)); }

double Tape::scalar(int id) const {
  const Mat& v = value(id);
  if (v.rows() != 1 || v.cols() != 1) throw ShapeError("tape: node is not 1x1");
  return v(0, 0);
}

namespace {

bool is_scalar(const Mat& m) { return m.rows() == 1 && m.cols() == 1; }

void check_elementwise(const char* op, const Mat& a, const Mat& b) {
  if (is_scalar(a) || is_scalar(b)) return;
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw ShapeError(std::string(op) + ": shape mismatch " +
                     std::to_string(a.rows()) + "x" + std::to_string(a.cols()) + " vs " +
                     std::to_string(b.rows()) + "x" + std::to_string(b.cols()));
}

}  // namespace

Mat Tape::eval(const Node& n) const {
  switch (n.op) {
    case Op::kConst:
    case Op::kVar:
      throw ShapeError("tape: leaf nodes are not re-evaluated");
    case Op::kAdd: {
      const Mat& a = vals_[n.a];
      const Mat& b = vals_[n.b];
      if (is_scalar(a) && !is_scalar(b)) return (b.array() + a(0, 0)).matrix();
      if (is_scalar(b) && !is_scalar(a)) return (a.array() + b(0, 0)).matrix();
      return a + b;
    }
    case Op::kMul: {
      const Mat& a = vals_[n.a];
      const Mat& b = vals_[n.b];
      if (is_scalar(a) && !is_scalar(b)) return b * a(0, 0);
      if (is_scalar(b) && !is_scalar(a)) return a * b(0, 0);
      return a.cwiseProduct(b);
    }
    case Op::kMatMul:
      return vals_[n.a] * vals_[n.b];
    case Op::kLog: {
      const Mat& a = vals_[n.a];
      if ((a.array() <= 0.0).any()) throw NumericDomainError("log", "non-positive argument");
      return a.array().log().matrix();
    }
    case Op::kExp:
      return vals_[n.a].array().exp().matrix();
    case Op::kSoftplus:
      return vals_[n.a].unaryExpr([](double x) { return softplus(x); });
    case Op::kRelu:
      return vals_[n.a].unaryExpr([](double x) { return relu(x); });
    case Op::kSquare:
      return vals_[n.a].array().square().matrix();
    case Op::kReciprocal: {
      const Mat& a = vals_[n.a];
      if ((a.array() == 0.0).any()) throw NumericDomainError("reciprocal", "zero argument");
      return a.cwiseInverse();
    }
    case Op::kLgamma: {
      const Mat& a = vals_[n.a];
      if ((a.array() <= 0.0).any()) throw NumericDomainError("lgamma", "non-positive argument");
      return a.unaryExpr([](double x) { return std::lgamma(x); });
    }
  }
  throw ShapeError("tape: unknown op");
}

int Tape::add(int a, int b) {
  check_elementwise("add", vals_[check_id(a)], vals_[check_id(b)]);
  Node n{Op::kAdd, a, b};
  return push(n.op, a, b, eval(n));
}

int Tape::mul(int a, int b) {
  check_elementwise("mul", vals_[check_id(a)], vals_[check_id(b)]);
  Node n{Op::kMul, a, b};
  return push(n.op, a, b, eval(n));
}

int Tape::matmul(int a, int b) {
  const Mat& va = vals_[check_id(a)];
  const Mat& vb = vals_[check_id(b)];
  if (va.cols() != vb.rows()) throw ShapeError("matmul: inner dimension mismatch");
  Node n{Op::kMatMul, a, b};
  return push(n.op, a, b, eval(n));
}

#define DEFSURV_UNARY(NAME, OPK)                      \
  int Tape::NAME(int a) {                             \
    check_id(a);                                      \
    Node n{OPK, a, -1};                               \
    return push(n.op, a, -1, eval(n));                \
  }

DEFSURV_UNARY(log, Op::kLog)
DEFSURV_UNARY(exp, Op::kExp)
DEFSURV_UNARY(softplus, Op::kSoftplus)
DEFSURV_UNARY(relu, Op::kRelu)
DEFSURV_UNARY(square, Op::kSquare)
DEFSURV_UNARY(reciprocal, Op::kReciprocal)
DEFSURV_UNARY(lgamma, Op::kLgamma)
#undef DEFSURV_UNARY

void Tape::replay() {
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    const Node& n = nodes_[i];
    if (n.op == Op::kConst || n.op == Op::kVar) continue;
    vals_[i] = eval(n);
  }
}

std::vector<Mat> Tape::backward(int root) const {
  const Mat& rv = value(root);
  if (rv.rows() != 1 || rv.cols() != 1)
    throw ShapeError("backward: root must be a 1x1 node");

  std::vector<Mat> adj(nodes_.size());
  std::vector<char> reached(nodes_.size(), 0);
  for (std::size_t i = 0; i < nodes_.size(); ++i) adj[i] = Mat::Zero(vals_[i].rows(), vals_[i].cols());
  adj[root](0, 0) = 1.0;
  reached[root] = 1;

  // Accumulate `contrib` into adj[target], reducing over broadcast if the
  // target is 1x1 and the contribution is not.
  auto accumulate = [&](int target, const Mat& contrib) {
    if (nodes_[target].op == Op::kConst) return;  // constants carry no gradient
    reached[target] = 1;
    Mat& slot = adj[target];
    if (is_scalar(slot) && !is_scalar(contrib))
      slot(0, 0) += contrib.sum();
    else
      slot += contrib;
  };

  for (int i = root; i >= 0; --i) {
    if (!reached[i]) continue;
    const Node& n = nodes_[i];
    const Mat& g = adj[i];
    switch (n.op) {
      case Op::kConst:
      case Op::kVar:
        break;
      case Op::kAdd: {
        // Broadcast add: each side receives g (summed if that side is 1x1).
        accumulate(n.a, g);
        accumulate(n.b, g);
        break;
      }
      case Op::kMul: {
        const Mat& va = vals_[n.a];
        const Mat& vb = vals_[n.b];
        if (is_scalar(va) && !is_scalar(vb)) {
          accumulate(n.a, g.cwiseProduct(vb));
          accumulate(n.b, g * va(0, 0));
        } else if (is_scalar(vb) && !is_scalar(va)) {
          accumulate(n.a, g * vb(0, 0));
          accumulate(n.b, g.cwiseProduct(va));
        } else {
          accumulate(n.a, g.cwiseProduct(vb));
          accumulate(n.b, g.cwiseProduct(va));
        }
        break;
      }
      case Op::kMatMul:
        accumulate(n.a, g * vals_[n.b].transpose());
        accumulate(n.b, vals_[n.a].transpose() * g);
        break;
      case Op::kLog:
        accumulate(n.a, g.cwiseQuotient(vals_[n.a]));
        break;
      case Op::kExp:
        accumulate(n.a, g.cwiseProduct(vals_[i]));
        break;
      case Op::kSoftplus:
        accumulate(n.a, g.cwiseProduct(vals_[n.a].unaryExpr([](double x) { return sigmoid(x); })));
        break;
      case Op::kRelu:
        accumulate(n.a, g.cwiseProduct(vals_[n.a].unaryExpr([](double x) { return x > 0.0 ? 1.0 : 0.0; })));
        break;
      case Op::kSquare:
        accumulate(n.a, g.cwiseProduct(2.0 * vals_[n.a]));
        break;
      case Op::kReciprocal:
        accumulate(n.a, -g.cwiseProduct(vals_[i].array().square().matrix()));
        break;
      case Op::kLgamma:
        accumulate(n.a, g.cwiseProduct(vals_[n.a].unaryExpr([](double x) { return digamma(x); })));
        break;
    }
  }
  return adj;
}

int sum_vec(Tape& t, int a) {
  const Mat& v = t.value(a);
  if (v.cols() != 1) throw ShapeError("sum_vec: expected a column vector");
  if (v.rows() == 1) return a;
  return t.matmul(t.constant(Mat::Ones(1, v.rows())), a);
}

int dot(Tape& t, int a, int b) { return sum_vec(t, t.mul(a, b)); }

}  // namespace defsurv::compute
