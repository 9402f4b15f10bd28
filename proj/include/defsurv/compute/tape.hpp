#pragma once
#include <Eigen/Core>
#include <cstdint>
#include <vector>

#include "defsurv/errors.hpp"

namespace defsurv::compute {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;

// Primitive op set. Everything else (neg, sub, div, dot, sums, powers)
// composes from these plus constant leaves.
enum class Op : std::uint8_t {
  kConst,
  kVar,
  kAdd,
  kMul,      // elementwise; one operand may be 1x1 (broadcast)
  kMatMul,
  kLog,
  kExp,
  kSoftplus,
  kRelu,
  kSquare,
  kReciprocal,
  kLgamma,
};

// Reverse-mode tape over dense real matrices. Values are computed eagerly as
// nodes are recorded; backward() runs one adjoint sweep from a scalar root.
// Single-writer: a tape is built and differentiated by one thread; distinct
// tapes are independent.
class Tape {
 public:
  int constant(Mat v);
  int constant(double v) { return constant(scalar_mat(v)); }
  int variable(Mat v);
  int variable(double v) { return variable(scalar_mat(v)); }

  int add(int a, int b);
  int mul(int a, int b);
  int matmul(int a, int b);
  int log(int a);
  int exp(int a);
  int softplus(int a);
  int relu(int a);
  int square(int a);
  int reciprocal(int a);
  int lgamma(int a);

  const Mat& value(int id) const { return vals_[check_id(id)]; }
  // Value of a 1x1 node.
  double scalar(int id) const;
  std::size_t size() const { return nodes_.size(); }
  bool is_variable(int id) const { return nodes_[check_id(id)].op == Op::kVar; }
  Op op(int id) const { return nodes_[check_id(id)].op; }

  // Adjoint of every node w.r.t. a 1x1 root. Nodes not reachable from the
  // root get a zero adjoint of their value's shape. Rejects non-scalar roots.
  std::vector<Mat> backward(int root) const;

  // Recomputes all non-leaf values in recording order; reproduces the
  // original values bit-for-bit since the same evaluation path is used.
  void replay();

 private:
  struct Node {
    Op op;
    int a = -1;
    int b = -1;
  };

  static Mat scalar_mat(double v) {
    Mat m(1, 1);
    m(0, 0) = v;
    return m;
  }
  int check_id(int id) const;
  int push(Op op, int a, int b, Mat v);
  Mat eval(const Node& n) const;

  std::vector<Node> nodes_;
  std::vector<Mat> vals_;
};

double softplus(double x);
double sigmoid(double x);
double relu(double x);
double square(double x);
double reciprocal(double x);
double digamma(double x);

// Scalar handle on a tape node, so densities can be written once and
// instantiated for both double and tape-backed evaluation.
struct Expr {
  Tape* tape = nullptr;
  int id = -1;

  double val() const { return tape->scalar(id); }
};

inline Expr wrap(Tape& t, int id) { return Expr{&t, id}; }
inline Expr make_const(Tape& t, double v) { return Expr{&t, t.constant(v)}; }
inline Expr make_var(Tape& t, double v) { return Expr{&t, t.variable(v)}; }

inline Expr operator+(Expr a, Expr b) { return {a.tape, a.tape->add(a.id, b.id)}; }
inline Expr operator*(Expr a, Expr b) { return {a.tape, a.tape->mul(a.id, b.id)}; }
inline Expr operator+(Expr a, double b) { return a + make_const(*a.tape, b); }
inline Expr operator+(double a, Expr b) { return b + a; }
inline Expr operator*(Expr a, double b) { return a * make_const(*a.tape, b); }
inline Expr operator*(double a, Expr b) { return b * a; }
inline Expr operator-(Expr a) { return a * -1.0; }
inline Expr operator-(Expr a, Expr b) { return a + (-b); }
inline Expr operator-(Expr a, double b) { return a + (-b); }
inline Expr operator-(double a, Expr b) { return (-b) + a; }

inline Expr log(Expr a) { return {a.tape, a.tape->log(a.id)}; }
inline Expr exp(Expr a) { return {a.tape, a.tape->exp(a.id)}; }
inline Expr softplus(Expr a) { return {a.tape, a.tape->softplus(a.id)}; }
inline Expr relu(Expr a) { return {a.tape, a.tape->relu(a.id)}; }
inline Expr square(Expr a) { return {a.tape, a.tape->square(a.id)}; }
inline Expr reciprocal(Expr a) { return {a.tape, a.tape->reciprocal(a.id)}; }
inline Expr lgamma(Expr a) { return {a.tape, a.tape->lgamma(a.id)}; }

inline Expr operator/(Expr a, Expr b) { return a * reciprocal(b); }
inline Expr operator/(Expr a, double b) { return a * (1.0 / b); }
inline Expr operator/(double a, Expr b) { return reciprocal(b) * a; }

// Sum of a column vector (or 1x1) node via ones-row matmul.
int sum_vec(Tape& t, int a);
// Dot product of two equally sized column-vector nodes.
int dot(Tape& t, int a, int b);

}  // namespace defsurv::compute
