// Copyright 2026 The scalerecon Authors.
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

#include "scalerecon/autodiff/ops.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numeric>
#include <utility>

namespace scalerecon::ad {

namespace {

using detail::Node;
using BackwardFn = std::function<void(Node&)>;

[[noreturn]] void shape_fail(std::string_view op, const Shape& a, const Shape& b, std::string_view why = {}) {
  std::string msg = std::string(op) + ": shape mismatch " + shape_str(a) + " vs " + shape_str(b);
  if (!why.empty()) msg += " (" + std::string(why) + ")";
  throw ShapeError(msg);
}

[[noreturn]] void arg_fail(std::string_view op, const Shape& a, std::string_view why) {
  throw ShapeError(std::string(op) + ": invalid argument for shape " + shape_str(a) + " (" + std::string(why) + ")");
}

// Wraps freshly computed values into a Tensor and, when recording, attaches
// the parents and backward closure.
Tensor make_result(const char* kind, Shape shape, std::vector<double> values, std::vector<Tensor> parents,
                   BackwardFn backward) {
  auto node = std::make_shared<Node>();
  node->shape = std::move(shape);
  node->data = std::move(values);
  node->kind = kind;
  bool record = grad_enabled() &&
                std::any_of(parents.begin(), parents.end(), [](const Tensor& p) { return p.requires_grad(); });
  if (record) {
    node->requires_grad = true;
    for (auto& p : parents) node->parents.push_back(p.node());
    node->backward_fn = std::move(backward);
  }
  return Tensor(std::move(node));
}

std::size_t resolve_axis(std::string_view op, const Shape& shape, int axis) {
  int r = static_cast<int>(shape.size());
  int a = axis < 0 ? axis + r : axis;
  if (a < 0 || a >= r) arg_fail(op, shape, "axis " + std::to_string(axis) + " out of range");
  return static_cast<std::size_t>(a);
}

// outer x len x inner decomposition around `axis`.
struct AxisSplit {
  std::size_t outer = 1, len = 1, inner = 1;
};

AxisSplit split_at(const Shape& shape, std::size_t axis) {
  AxisSplit s;
  for (std::size_t i = 0; i < axis; ++i) s.outer *= shape[i];
  s.len = shape[axis];
  for (std::size_t i = axis + 1; i < shape.size(); ++i) s.inner *= shape[i];
  return s;
}

bool is_suffix(const Shape& small, const Shape& big) {
  if (small.size() > big.size()) return false;
  return std::equal(small.rbegin(), small.rend(), big.rbegin());
}

enum class BinKind { kAdd, kSub, kMul };

Tensor binary(const char* kind, BinKind op, const Tensor& a, const Tensor& b) {
  const Shape& sa = a.shape();
  const Shape& sb = b.shape();
  // `big` carries the output shape; `small` is expanded over leading axes.
  bool a_big;
  if (sa == sb || b.numel() == 1 || is_suffix(sb, sa)) {
    a_big = true;
  } else if (a.numel() == 1 || is_suffix(sa, sb)) {
    a_big = false;
  } else {
    shape_fail(kind, sa, sb, "right operand must equal, be a trailing suffix of, or be a single element");
  }
  const Shape& out_shape = a_big ? sa : sb;
  const std::size_t n = numel_of(out_shape);
  const std::size_t an = a.numel();
  const std::size_t bn = b.numel();
  const double* ad = a.data().data();
  const double* bd = b.data().data();
  std::vector<double> out(n);
  // Index of element i in an operand of size m is i % m (suffix expansion).
  switch (op) {
    case BinKind::kAdd:
      for (std::size_t i = 0; i < n; ++i) out[i] = ad[an == n ? i : i % an] + bd[bn == n ? i : i % bn];
      break;
    case BinKind::kSub:
      for (std::size_t i = 0; i < n; ++i) out[i] = ad[an == n ? i : i % an] - bd[bn == n ? i : i % bn];
      break;
    case BinKind::kMul:
      for (std::size_t i = 0; i < n; ++i) out[i] = ad[an == n ? i : i % an] * bd[bn == n ? i : i % bn];
      break;
  }
  Node* na = a.node().get();
  Node* nb = b.node().get();
  return make_result(kind, out_shape, std::move(out), {a, b}, [na, nb, op, n, an, bn](Node& self) {
    const double* g = self.grad.data();
    if (na->requires_grad) {
      na->ensure_grad();
      double* ga = na->grad.data();
      if (op == BinKind::kMul) {
        const double* bd = nb->data.data();
        for (std::size_t i = 0; i < n; ++i) ga[an == n ? i : i % an] += g[i] * bd[bn == n ? i : i % bn];
      } else {
        for (std::size_t i = 0; i < n; ++i) ga[an == n ? i : i % an] += g[i];
      }
    }
    if (nb->requires_grad) {
      nb->ensure_grad();
      double* gb = nb->grad.data();
      if (op == BinKind::kMul) {
        const double* ad = na->data.data();
        for (std::size_t i = 0; i < n; ++i) gb[bn == n ? i : i % bn] += g[i] * ad[an == n ? i : i % an];
      } else if (op == BinKind::kSub) {
        for (std::size_t i = 0; i < n; ++i) gb[bn == n ? i : i % bn] -= g[i];
      } else {
        for (std::size_t i = 0; i < n; ++i) gb[bn == n ? i : i % bn] += g[i];
      }
    }
  });
}

template <class F, class DF>
Tensor unary(const char* kind, const Tensor& x, F f, DF df) {
  const auto xs = x.data();
  std::vector<double> out(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) out[i] = f(xs[i]);
  Node* nx = x.node().get();
  return make_result(kind, x.shape(), std::move(out), {x}, [nx, df](Node& self) {
    nx->ensure_grad();
    const double* g = self.grad.data();
    const double* xv = nx->data.data();
    const double* yv = self.data.data();
    double* gx = nx->grad.data();
    for (std::size_t i = 0; i < self.data.size(); ++i) gx[i] += g[i] * df(xv[i], yv[i]);
  });
}

// C[m,n] (+)= A[m,k] * B[k,n]
void gemm_nn(const double* A, const double* B, double* C, std::size_t m, std::size_t k, std::size_t n) {
  for (std::size_t i = 0; i < m; ++i) {
    double* crow = C + i * n;
    const double* arow = A + i * k;
    for (std::size_t p = 0; p < k; ++p) {
      const double av = arow[p];
      const double* brow = B + p * n;
      for (std::size_t j = 0; j < n; ++j) crow[j] += av * brow[j];
    }
  }
}

// dA[m,k] += dC[m,n] * B[k,n]^T
void gemm_nt(const double* dC, const double* B, double* dA, std::size_t m, std::size_t k, std::size_t n) {
  for (std::size_t i = 0; i < m; ++i) {
    const double* grow = dC + i * n;
    double* darow = dA + i * k;
    for (std::size_t p = 0; p < k; ++p) {
      const double* brow = B + p * n;
      double acc = 0.0;
      for (std::size_t j = 0; j < n; ++j) acc += grow[j] * brow[j];
      darow[p] += acc;
    }
  }
}

// dB[k,n] += A[m,k]^T * dC[m,n]
void gemm_tn(const double* A, const double* dC, double* dB, std::size_t m, std::size_t k, std::size_t n) {
  for (std::size_t i = 0; i < m; ++i) {
    const double* arow = A + i * k;
    const double* grow = dC + i * n;
    for (std::size_t p = 0; p < k; ++p) {
      const double av = arow[p];
      double* dbrow = dB + p * n;
      for (std::size_t j = 0; j < n; ++j) dbrow[j] += av * grow[j];
    }
  }
}

}  // namespace

Tensor matmul(const Tensor& a, const Tensor& b) {
  const Shape& sa = a.shape();
  const Shape& sb = b.shape();
  if (sa.size() < 2 || sb.size() < 2) shape_fail("matmul", sa, sb, "operands need rank >= 2");
  const std::size_t m = sa[sa.size() - 2];
  const std::size_t k = sa.back();
  if (sb[sb.size() - 2] != k) shape_fail("matmul", sa, sb, "inner extents differ");
  const std::size_t n = sb.back();
  const bool shared_b = sb.size() == 2;
  if (!shared_b && (sb.size() != sa.size() || !std::equal(sa.begin(), sa.end() - 2, sb.begin()))) {
    shape_fail("matmul", sa, sb, "leading extents differ");
  }
  std::size_t batch = 1;
  for (std::size_t i = 0; i + 2 < sa.size(); ++i) batch *= sa[i];
  Shape out_shape(sa.begin(), sa.end() - 1);
  out_shape.push_back(n);
  std::vector<double> out(batch * m * n, 0.0);
  const double* ad = a.data().data();
  const double* bd = b.data().data();
  if (shared_b) {
    gemm_nn(ad, bd, out.data(), batch * m, k, n);
  } else {
    for (std::size_t s = 0; s < batch; ++s) gemm_nn(ad + s * m * k, bd + s * k * n, out.data() + s * m * n, m, k, n);
  }
  Node* na = a.node().get();
  Node* nb = b.node().get();
  return make_result("matmul", std::move(out_shape), std::move(out), {a, b},
                     [na, nb, batch, m, k, n, shared_b](Node& self) {
                       const double* g = self.grad.data();
                       if (na->requires_grad) {
                         na->ensure_grad();
                         if (shared_b) {
                           gemm_nt(g, nb->data.data(), na->grad.data(), batch * m, k, n);
                         } else {
                           for (std::size_t s = 0; s < batch; ++s)
                             gemm_nt(g + s * m * n, nb->data.data() + s * k * n, na->grad.data() + s * m * k, m, k, n);
                         }
                       }
                       if (nb->requires_grad) {
                         nb->ensure_grad();
                         if (shared_b) {
                           gemm_tn(na->data.data(), g, nb->grad.data(), batch * m, k, n);
                         } else {
                           for (std::size_t s = 0; s < batch; ++s)
                             gemm_tn(na->data.data() + s * m * k, g + s * m * n, nb->grad.data() + s * k * n, m, k, n);
                         }
                       }
                     });
}

Tensor add(const Tensor& a, const Tensor& b) { return binary("add", BinKind::kAdd, a, b); }
Tensor sub(const Tensor& a, const Tensor& b) { return binary("sub", BinKind::kSub, a, b); }
Tensor mul(const Tensor& a, const Tensor& b) { return binary("mul", BinKind::kMul, a, b); }

Tensor scale(const Tensor& x, double factor) {
  return unary("scale", x, [factor](double v) { return v * factor; }, [factor](double, double) { return factor; });
}

Tensor add_scalar(const Tensor& x, double offset) {
  return unary("add_scalar", x, [offset](double v) { return v + offset; }, [](double, double) { return 1.0; });
}

Tensor concat_last(std::initializer_list<Tensor> parts) {
  return concat(std::span<const Tensor>(parts.begin(), parts.size()), -1);
}

Tensor concat_last(std::span<const Tensor> parts) { return concat(parts, -1); }

Tensor concat(std::initializer_list<Tensor> parts, int axis) {
  return concat(std::span<const Tensor>(parts.begin(), parts.size()), axis);
}

Tensor concat(std::span<const Tensor> parts, int axis) {
  if (parts.empty()) throw ShapeError("concat: no inputs");
  const Shape& s0 = parts[0].shape();
  const std::size_t ax = resolve_axis("concat", s0, axis);
  std::size_t total = 0;
  std::vector<std::size_t> widths;  // len * inner per part
  for (const auto& p : parts) {
    const Shape& s = p.shape();
    bool ok = s.size() == s0.size();
    for (std::size_t i = 0; ok && i < s.size(); ++i) ok = i == ax || s[i] == s0[i];
    if (!ok) shape_fail("concat", s0, s, "extents differ off the concatenation axis");
    total += s[ax];
  }
  const AxisSplit split = split_at(s0, ax);
  for (const auto& p : parts) widths.push_back(p.shape()[ax] * split.inner);
  const std::size_t rows = split.outer;
  const std::size_t row_width = total * split.inner;
  std::vector<double> out(rows * row_width);
  std::size_t offset = 0;
  for (std::size_t pi = 0; pi < parts.size(); ++pi) {
    const double* src = parts[pi].data().data();
    const std::size_t w = widths[pi];
    for (std::size_t r = 0; r < rows; ++r) std::copy_n(src + r * w, w, out.data() + r * row_width + offset);
    offset += w;
  }
  Shape out_shape = s0;
  out_shape[ax] = total;
  std::vector<Tensor> parents(parts.begin(), parts.end());
  std::vector<Node*> nodes;
  for (const auto& p : parts) nodes.push_back(p.node().get());
  return make_result("concat", std::move(out_shape), std::move(out), std::move(parents),
                     [nodes, widths, rows, row_width](Node& self) {
                       std::size_t off = 0;
                       for (std::size_t pi = 0; pi < nodes.size(); ++pi) {
                         const std::size_t w = widths[pi];
                         if (nodes[pi]->requires_grad) {
                           nodes[pi]->ensure_grad();
                           double* gp = nodes[pi]->grad.data();
                           for (std::size_t r = 0; r < rows; ++r) {
                             const double* g = self.grad.data() + r * row_width + off;
                             for (std::size_t j = 0; j < w; ++j) gp[r * w + j] += g[j];
                           }
                         }
                         off += w;
                       }
                     });
}

Tensor softmax(const Tensor& x, int axis) {
  const std::size_t ax = resolve_axis("softmax", x.shape(), axis);
  const AxisSplit s = split_at(x.shape(), ax);
  const double* xd = x.data().data();
  std::vector<double> out(x.numel());
  for (std::size_t o = 0; o < s.outer; ++o) {
    for (std::size_t in = 0; in < s.inner; ++in) {
      const std::size_t base = o * s.len * s.inner + in;
      double mx = -std::numeric_limits<double>::infinity();
      for (std::size_t l = 0; l < s.len; ++l) mx = std::max(mx, xd[base + l * s.inner]);
      double z = 0.0;
      for (std::size_t l = 0; l < s.len; ++l) {
        const double e = std::exp(xd[base + l * s.inner] - mx);
        out[base + l * s.inner] = e;
        z += e;
      }
      for (std::size_t l = 0; l < s.len; ++l) out[base + l * s.inner] /= z;
    }
  }
  Node* nx = x.node().get();
  return make_result("softmax", x.shape(), std::move(out), {x}, [nx, s](Node& self) {
    nx->ensure_grad();
    const double* g = self.grad.data();
    const double* y = self.data.data();
    double* gx = nx->grad.data();
    for (std::size_t o = 0; o < s.outer; ++o) {
      for (std::size_t in = 0; in < s.inner; ++in) {
        const std::size_t base = o * s.len * s.inner + in;
        double dot = 0.0;
        for (std::size_t l = 0; l < s.len; ++l) dot += g[base + l * s.inner] * y[base + l * s.inner];
        for (std::size_t l = 0; l < s.len; ++l) {
          const std::size_t i = base + l * s.inner;
          gx[i] += y[i] * (g[i] - dot);
        }
      }
    }
  });
}

Tensor exp(const Tensor& x) {
  return unary("exp", x, [](double v) { return std::exp(v); }, [](double, double y) { return y; });
}

Tensor log(const Tensor& x) {
  return unary("log", x, [](double v) { return std::log(v); }, [](double v, double) { return 1.0 / v; });
}

Tensor abs(const Tensor& x) {
  return unary(
      "abs", x, [](double v) { return std::abs(v); },
      [](double v, double) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); });
}

Tensor huber(const Tensor& x, double delta) {
  if (!(delta > 0.0)) arg_fail("huber", x.shape(), "delta must be positive");
  return unary(
      "huber", x,
      [delta](double v) {
        const double a = std::abs(v);
        return a <= delta ? 0.5 * v * v : delta * (a - 0.5 * delta);
      },
      [delta](double v, double) {
        if (std::abs(v) <= delta) return v;
        return v > 0.0 ? delta : -delta;
      });
}

Tensor relu(const Tensor& x) {
  return unary(
      "relu", x, [](double v) { return v > 0.0 ? v : 0.0; }, [](double v, double) { return v > 0.0 ? 1.0 : 0.0; });
}

Tensor sigmoid(const Tensor& x) {
  return unary(
      "sigmoid", x,
      [](double v) {
        if (v >= 0.0) return 1.0 / (1.0 + std::exp(-v));
        const double e = std::exp(v);
        return e / (1.0 + e);
      },
      [](double, double y) { return y * (1.0 - y); });
}

Tensor layer_norm(const Tensor& x, double eps) {
  if (x.rank() < 1) arg_fail("layer_norm", x.shape(), "rank 0");
  const std::size_t c = x.shape().back();
  const std::size_t rows = x.numel() / c;
  const double* xd = x.data().data();
  std::vector<double> out(x.numel());
  std::vector<double> inv_std(rows);
  for (std::size_t r = 0; r < rows; ++r) {
    const double* row = xd + r * c;
    double mu = 0.0;
    for (std::size_t j = 0; j < c; ++j) mu += row[j];
    mu /= static_cast<double>(c);
    double var = 0.0;
    for (std::size_t j = 0; j < c; ++j) var += (row[j] - mu) * (row[j] - mu);
    var /= static_cast<double>(c);
    const double is = 1.0 / std::sqrt(var + eps);
    inv_std[r] = is;
    for (std::size_t j = 0; j < c; ++j) out[r * c + j] = (row[j] - mu) * is;
  }
  Node* nx = x.node().get();
  return make_result("layer_norm", x.shape(), std::move(out), {x}, [nx, c, rows, inv_std](Node& self) {
    nx->ensure_grad();
    const double inv_c = 1.0 / static_cast<double>(c);
    for (std::size_t r = 0; r < rows; ++r) {
      const double* g = self.grad.data() + r * c;
      const double* y = self.data.data() + r * c;
      double* gx = nx->grad.data() + r * c;
      double gm = 0.0, gy = 0.0;
      for (std::size_t j = 0; j < c; ++j) {
        gm += g[j];
        gy += g[j] * y[j];
      }
      gm *= inv_c;
      gy *= inv_c;
      for (std::size_t j = 0; j < c; ++j) gx[j] += inv_std[r] * (g[j] - gm - y[j] * gy);
    }
  });
}

Tensor l2_normalize(const Tensor& x, double eps) {
  const std::size_t c = x.shape().back();
  const std::size_t rows = x.numel() / c;
  const double* xd = x.data().data();
  std::vector<double> out(x.numel());
  std::vector<double> norms(rows);
  for (std::size_t r = 0; r < rows; ++r) {
    double ss = 0.0;
    for (std::size_t j = 0; j < c; ++j) ss += xd[r * c + j] * xd[r * c + j];
    const double nrm = std::sqrt(ss);
    norms[r] = nrm;
    const double d = std::max(nrm, eps);
    for (std::size_t j = 0; j < c; ++j) out[r * c + j] = xd[r * c + j] / d;
  }
  Node* nx = x.node().get();
  return make_result("l2_normalize", x.shape(), std::move(out), {x}, [nx, c, rows, norms, eps](Node& self) {
    nx->ensure_grad();
    for (std::size_t r = 0; r < rows; ++r) {
      const double* g = self.grad.data() + r * c;
      const double* y = self.data.data() + r * c;
      double* gx = nx->grad.data() + r * c;
      if (norms[r] > eps) {
        double gy = 0.0;
        for (std::size_t j = 0; j < c; ++j) gy += g[j] * y[j];
        for (std::size_t j = 0; j < c; ++j) gx[j] += (g[j] - y[j] * gy) / norms[r];
      } else {
        for (std::size_t j = 0; j < c; ++j) gx[j] += g[j] / eps;
      }
    }
  });
}

namespace {

Tensor reduce_axis(const char* kind, const Tensor& x, int axis, bool keepdim, bool average) {
  const std::size_t ax = resolve_axis(kind, x.shape(), axis);
  const AxisSplit s = split_at(x.shape(), ax);
  const double* xd = x.data().data();
  std::vector<double> out(s.outer * s.inner, 0.0);
  for (std::size_t o = 0; o < s.outer; ++o) {
    for (std::size_t l = 0; l < s.len; ++l) {
      const double* src = xd + (o * s.len + l) * s.inner;
      double* dst = out.data() + o * s.inner;
      for (std::size_t in = 0; in < s.inner; ++in) dst[in] += src[in];
    }
  }
  const double factor = average ? 1.0 / static_cast<double>(s.len) : 1.0;
  if (average) {
    for (auto& v : out) v *= factor;
  }
  Shape out_shape;
  for (std::size_t i = 0; i < x.rank(); ++i) {
    if (i != ax) {
      out_shape.push_back(x.shape()[i]);
    } else if (keepdim) {
      out_shape.push_back(1);
    }
  }
  if (out_shape.empty()) out_shape.push_back(1);
  Node* nx = x.node().get();
  return make_result(kind, std::move(out_shape), std::move(out), {x}, [nx, s, factor](Node& self) {
    nx->ensure_grad();
    for (std::size_t o = 0; o < s.outer; ++o) {
      const double* g = self.grad.data() + o * s.inner;
      for (std::size_t l = 0; l < s.len; ++l) {
        double* gx = nx->grad.data() + (o * s.len + l) * s.inner;
        for (std::size_t in = 0; in < s.inner; ++in) gx[in] += g[in] * factor;
      }
    }
  });
}

}  // namespace

Tensor sum(const Tensor& x, int axis, bool keepdim) { return reduce_axis("sum", x, axis, keepdim, false); }
Tensor mean(const Tensor& x, int axis, bool keepdim) { return reduce_axis("mean", x, axis, keepdim, true); }
Tensor sum_all(const Tensor& x) { return sum(reshape(x, {x.numel()}), 0); }
Tensor mean_all(const Tensor& x) { return mean(reshape(x, {x.numel()}), 0); }

Tensor slice(const Tensor& x, int axis, std::size_t start, std::size_t length) {
  const std::size_t ax = resolve_axis("slice", x.shape(), axis);
  if (length == 0 || start + length > x.shape()[ax]) {
    arg_fail("slice", x.shape(),
             "range [" + std::to_string(start) + ", " + std::to_string(start + length) + ") on axis " +
                 std::to_string(ax));
  }
  const AxisSplit s = split_at(x.shape(), ax);
  const double* xd = x.data().data();
  std::vector<double> out(s.outer * length * s.inner);
  for (std::size_t o = 0; o < s.outer; ++o) {
    std::copy_n(xd + (o * s.len + start) * s.inner, length * s.inner, out.data() + o * length * s.inner);
  }
  Shape out_shape = x.shape();
  out_shape[ax] = length;
  Node* nx = x.node().get();
  return make_result("slice", std::move(out_shape), std::move(out), {x}, [nx, s, start, length](Node& self) {
    nx->ensure_grad();
    for (std::size_t o = 0; o < s.outer; ++o) {
      const double* g = self.grad.data() + o * length * s.inner;
      double* gx = nx->grad.data() + (o * s.len + start) * s.inner;
      for (std::size_t i = 0; i < length * s.inner; ++i) gx[i] += g[i];
    }
  });
}

Tensor reshape(const Tensor& x, Shape shape) {
  if (numel_of(shape) != x.numel()) shape_fail("reshape", x.shape(), shape, "element counts differ");
  for (auto e : shape) {
    if (e == 0) shape_fail("reshape", x.shape(), shape, "zero extent");
  }
  std::vector<double> out(x.data().begin(), x.data().end());
  Node* nx = x.node().get();
  return make_result("reshape", std::move(shape), std::move(out), {x}, [nx](Node& self) {
    nx->ensure_grad();
    for (std::size_t i = 0; i < self.grad.size(); ++i) nx->grad[i] += self.grad[i];
  });
}

Tensor transpose_last_two(const Tensor& x) {
  if (x.rank() < 2) arg_fail("transpose_last_two", x.shape(), "rank < 2");
  const std::size_t m = x.shape()[x.rank() - 2];
  const std::size_t n = x.shape().back();
  const std::size_t batch = x.numel() / (m * n);
  const double* xd = x.data().data();
  std::vector<double> out(x.numel());
  for (std::size_t b = 0; b < batch; ++b) {
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t j = 0; j < n; ++j) out[b * m * n + j * m + i] = xd[b * m * n + i * n + j];
    }
  }
  Shape out_shape = x.shape();
  std::swap(out_shape[out_shape.size() - 1], out_shape[out_shape.size() - 2]);
  Node* nx = x.node().get();
  return make_result("transpose_last_two", std::move(out_shape), std::move(out), {x},
                     [nx, batch, m, n](Node& self) {
                       nx->ensure_grad();
                       for (std::size_t b = 0; b < batch; ++b) {
                         for (std::size_t i = 0; i < m; ++i) {
                           for (std::size_t j = 0; j < n; ++j)
                             nx->grad[b * m * n + i * n + j] += self.grad[b * m * n + j * m + i];
                         }
                       }
                     });
}

Tensor permute(const Tensor& x, std::initializer_list<std::size_t> axes) {
  return permute(x, std::span<const std::size_t>(axes.begin(), axes.size()));
}

Tensor permute(const Tensor& x, std::span<const std::size_t> axes) {
  const std::size_t r = x.rank();
  if (axes.size() != r) arg_fail("permute", x.shape(), "permutation length differs from rank");
  std::vector<bool> seen(r, false);
  for (auto a : axes) {
    if (a >= r || seen[a]) arg_fail("permute", x.shape(), "not a permutation");
    seen[a] = true;
  }
  Shape out_shape(r);
  for (std::size_t i = 0; i < r; ++i) out_shape[i] = x.shape()[axes[i]];
  std::vector<std::size_t> in_strides(r, 1);
  for (std::size_t i = r - 1; i-- > 0;) in_strides[i] = in_strides[i + 1] * x.shape()[i + 1];
  // For each output element (row-major), its flat source index.
  const std::size_t n = x.numel();
  std::vector<std::size_t> src_index(n);
  std::vector<std::size_t> counter(r, 0);
  std::size_t src = 0;
  for (std::size_t flat = 0; flat < n; ++flat) {
    src_index[flat] = src;
    for (std::size_t d = r; d-- > 0;) {
      src += in_strides[axes[d]];
      if (++counter[d] < out_shape[d]) break;
      src -= in_strides[axes[d]] * out_shape[d];
      counter[d] = 0;
    }
  }
  const double* xd = x.data().data();
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = xd[src_index[i]];
  Node* nx = x.node().get();
  return make_result("permute", std::move(out_shape), std::move(out), {x},
                     [nx, src_index = std::move(src_index)](Node& self) {
                       nx->ensure_grad();
                       for (std::size_t i = 0; i < src_index.size(); ++i) nx->grad[src_index[i]] += self.grad[i];
                     });
}

namespace {

constexpr std::array kAllKinds = {
    OpKind::kMatmul,  OpKind::kAdd,       OpKind::kSub,         OpKind::kMul,  OpKind::kScale,
    OpKind::kConcat, OpKind::kSoftmax, OpKind::kExp,        OpKind::kLog,  OpKind::kAbs,
    OpKind::kHuber,   OpKind::kRelu,      OpKind::kSigmoid,     OpKind::kLayerNorm, OpKind::kL2Normalize,
    OpKind::kMean,    OpKind::kSum,       OpKind::kSlice,       OpKind::kReshape,   OpKind::kTransposeLastTwo,
    OpKind::kPermute,
};

void require_arity(OpKind kind, std::span<const Tensor> inputs, std::size_t n) {
  if (inputs.size() != n) {
    throw ShapeError(std::string(op_name(kind)) + ": expected " + std::to_string(n) + " inputs, got " +
                     std::to_string(inputs.size()));
  }
}

}  // namespace

std::span<const OpKind> all_op_kinds() { return kAllKinds; }

std::string_view op_name(OpKind kind) {
  switch (kind) {
    case OpKind::kMatmul: return "matmul";
    case OpKind::kAdd: return "add";
    case OpKind::kSub: return "sub";
    case OpKind::kMul: return "mul";
    case OpKind::kScale: return "scale";
    case OpKind::kConcat: return "concat";
    case OpKind::kSoftmax: return "softmax";
    case OpKind::kExp: return "exp";
    case OpKind::kLog: return "log";
    case OpKind::kAbs: return "abs";
    case OpKind::kHuber: return "huber";
    case OpKind::kRelu: return "relu";
    case OpKind::kSigmoid: return "sigmoid";
    case OpKind::kLayerNorm: return "layer_norm";
    case OpKind::kL2Normalize: return "l2_normalize";
    case OpKind::kMean: return "mean";
    case OpKind::kSum: return "sum";
    case OpKind::kSlice: return "slice";
    case OpKind::kReshape: return "reshape";
    case OpKind::kTransposeLastTwo: return "transpose_last_two";
    case OpKind::kPermute: return "permute";
  }
  return "unknown";
}

Tensor forward_op(OpKind kind, std::span<const Tensor> in, const OpAttrs& at) {
  switch (kind) {
    case OpKind::kMatmul: require_arity(kind, in, 2); return matmul(in[0], in[1]);
    case OpKind::kAdd: require_arity(kind, in, 2); return add(in[0], in[1]);
    case OpKind::kSub: require_arity(kind, in, 2); return sub(in[0], in[1]);
    case OpKind::kMul: require_arity(kind, in, 2); return mul(in[0], in[1]);
    case OpKind::kScale: require_arity(kind, in, 1); return scale(in[0], at.scalar);
    case OpKind::kConcat: return concat(in, at.axis);
    case OpKind::kSoftmax: require_arity(kind, in, 1); return softmax(in[0], at.axis);
    case OpKind::kExp: require_arity(kind, in, 1); return exp(in[0]);
    case OpKind::kLog: require_arity(kind, in, 1); return log(in[0]);
    case OpKind::kAbs: require_arity(kind, in, 1); return abs(in[0]);
    case OpKind::kHuber: require_arity(kind, in, 1); return huber(in[0], at.scalar);
    case OpKind::kRelu: require_arity(kind, in, 1); return relu(in[0]);
    case OpKind::kSigmoid: require_arity(kind, in, 1); return sigmoid(in[0]);
    case OpKind::kLayerNorm: require_arity(kind, in, 1); return layer_norm(in[0], at.scalar > 0 ? at.scalar : 1e-6);
    case OpKind::kL2Normalize:
      require_arity(kind, in, 1);
      return l2_normalize(in[0], at.scalar > 0 ? at.scalar : 1e-12);
    case OpKind::kMean: require_arity(kind, in, 1); return mean(in[0], at.axis, at.keepdim);
    case OpKind::kSum: require_arity(kind, in, 1); return sum(in[0], at.axis, at.keepdim);
    case OpKind::kSlice: require_arity(kind, in, 1); return slice(in[0], at.axis, at.start, at.length);
    case OpKind::kReshape: require_arity(kind, in, 1); return reshape(in[0], at.shape);
    case OpKind::kTransposeLastTwo: require_arity(kind, in, 1); return transpose_last_two(in[0]);
    case OpKind::kPermute: require_arity(kind, in, 1); return permute(in[0], at.axes);
  }
  throw ShapeError("forward_op: unknown op kind");
}

}  // namespace scalerecon::ad
