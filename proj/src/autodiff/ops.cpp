/* Copyright 2026 The dagoffload Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "dagoffload/autodiff/ops.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Core>

#include "dagoffload/error.hpp"
#include "dagoffload/rng.hpp"

namespace dagoffload::ad {

namespace {

using RowMajor = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using MapC = Eigen::Map<const RowMajor>;
using Map = Eigen::Map<RowMajor>;

MapC as_matrix(const Tensor& t) { return MapC(t.data().data(), t.rows(), t.cols()); }
Map as_matrix(Tensor& t) { return Map(t.data().data(), t.rows(), t.cols()); }

[[noreturn]] void shape_error(const char* op, const Shape& a, const Shape& b) {
    fail(ErrorCode::ShapeMismatch, std::string(op) + ": incompatible shapes " + to_string(a) + " and " + to_string(b));
}

void require_2d(const char* op, const Tensor& t) {
    if (t.rank() != 2) fail(ErrorCode::ShapeMismatch, std::string(op) + " needs a 2-D tensor, got " + to_string(t.shape()));
}

Tape& tape_of(Var a, Var b) {
    if (a.tape() != b.tape() || a.tape() == nullptr) fail(ErrorCode::InvalidArgument, "operands live on different tapes");
    return *a.tape();
}

// b broadcasts into a when it has one element or equals a's trailing dims.
void check_broadcast(const char* op, const Shape& a, const Shape& b) {
    if (a == b) return;
    if (numel(b) == 1) return;
    if (b.size() <= a.size() && std::equal(b.rbegin(), b.rend(), a.rbegin())) return;
    shape_error(op, a, b);
}

template <typename Fwd, typename GradA, typename GradB>
Var binary(const char* name, Var a, Var b, Fwd fwd, GradA grad_a, GradB grad_b) {
    Tape& tape = tape_of(a, b);
    const Tensor& av = a.value();
    const Tensor& bv = b.value();
    check_broadcast(name, av.shape(), bv.shape());
    const std::size_t nb = bv.size();
    Tensor out(av.shape());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = fwd(av[i], bv[i % nb]);
    return tape.record(std::move(out), {a, b}, [grad_a, grad_b](const BackwardContext& ctx) {
        const Tensor& x = *ctx.inputs[0];
        const Tensor& y = *ctx.inputs[1];
        const std::size_t m = y.size();
        for (std::size_t i = 0; i < ctx.out.size(); ++i) {
            const double g = ctx.grad_out[i];
            if (ctx.input_grads[0]) (*ctx.input_grads[0])[i] += g * grad_a(x[i], y[i % m]);
            if (ctx.input_grads[1]) (*ctx.input_grads[1])[i % m] += g * grad_b(x[i], y[i % m]);
        }
    });
}

template <typename Fwd, typename Grad>
Var unary(Var a, Fwd fwd, Grad grad) {
    const Tensor& av = a.value();
    Tensor out(av.shape());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = fwd(av[i]);
    return a.tape()->record(std::move(out), {a}, [grad](const BackwardContext& ctx) {
        if (!ctx.input_grads[0]) return;
        const Tensor& x = *ctx.inputs[0];
        Tensor& gx = *ctx.input_grads[0];
        for (std::size_t i = 0; i < x.size(); ++i) gx[i] += ctx.grad_out[i] * grad(x[i], ctx.out[i]);
    });
}

} // namespace

Var add(Var a, Var b) {
    return binary(
        "add", a, b, [](double x, double y) { return x + y; }, [](double, double) { return 1.0; },
        [](double, double) { return 1.0; });
}

Var sub(Var a, Var b) {
    return binary(
        "sub", a, b, [](double x, double y) { return x - y; }, [](double, double) { return 1.0; },
        [](double, double) { return -1.0; });
}

Var mul(Var a, Var b) {
    return binary(
        "mul", a, b, [](double x, double y) { return x * y; }, [](double, double y) { return y; },
        [](double x, double) { return x; });
}

Var div(Var a, Var b) {
    return binary(
        "div", a, b, [](double x, double y) { return x / y; }, [](double, double y) { return 1.0 / y; },
        [](double x, double y) { return -x / (y * y); });
}

Var neg(Var a) {
    return unary(a, [](double x) { return -x; }, [](double, double) { return -1.0; });
}

Var scale(Var a, double s) {
    return unary(a, [s](double x) { return s * x; }, [s](double, double) { return s; });
}

Var add_scalar(Var a, double s) {
    return unary(a, [s](double x) { return x + s; }, [](double, double) { return 1.0; });
}

Var matmul(Var a, Var b) {
    Tape& tape = tape_of(a, b);
    const Tensor& av = a.value();
    const Tensor& bv = b.value();
    require_2d("matmul", av);
    require_2d("matmul", bv);
    if (av.cols() != bv.rows()) shape_error("matmul", av.shape(), bv.shape());
    Tensor out(Shape{av.rows(), bv.cols()});
    as_matrix(out).noalias() = as_matrix(av) * as_matrix(bv);
    return tape.record(std::move(out), {a, b}, [](const BackwardContext& ctx) {
        const MapC g = as_matrix(ctx.grad_out);
        if (ctx.input_grads[0]) as_matrix(*ctx.input_grads[0]).noalias() += g * as_matrix(*ctx.inputs[1]).transpose();
        if (ctx.input_grads[1]) as_matrix(*ctx.input_grads[1]).noalias() += as_matrix(*ctx.inputs[0]).transpose() * g;
    });
}

Var transpose(Var a) {
    const Tensor& av = a.value();
    require_2d("transpose", av);
    Tensor out(Shape{av.cols(), av.rows()});
    as_matrix(out) = as_matrix(av).transpose();
    return a.tape()->record(std::move(out), {a}, [](const BackwardContext& ctx) {
        if (ctx.input_grads[0]) as_matrix(*ctx.input_grads[0]) += as_matrix(ctx.grad_out).transpose();
    });
}

Var concat(std::span<const Var> parts, std::size_t axis) {
    if (parts.empty()) fail(ErrorCode::ShapeMismatch, "concat of nothing");
    if (axis > 1) fail(ErrorCode::ShapeMismatch, "concat axis must be 0 or 1");
    Tape* tape = parts[0].tape();
    std::size_t rows = 0;
    std::size_t cols = 0;
    for (const Var& p : parts) {
        if (p.tape() != tape) fail(ErrorCode::InvalidArgument, "operands live on different tapes");
        const Tensor& v = p.value();
        require_2d("concat", v);
        const Shape& first = parts[0].value().shape();
        if (axis == 0) {
            if (v.cols() != first[1]) shape_error("concat", first, v.shape());
            rows += v.rows();
            cols = v.cols();
        } else {
            if (v.rows() != first[0]) shape_error("concat", first, v.shape());
            cols += v.cols();
            rows = v.rows();
        }
    }
    Tensor out(Shape{rows, cols});
    std::vector<std::size_t> offsets;
    std::size_t offset = 0;
    for (const Var& p : parts) {
        const Tensor& v = p.value();
        offsets.push_back(offset);
        if (axis == 0) {
            as_matrix(out).middleRows(offset, v.rows()) = as_matrix(v);
            offset += v.rows();
        } else {
            as_matrix(out).middleCols(offset, v.cols()) = as_matrix(v);
            offset += v.cols();
        }
    }
    return tape->record(std::move(out), parts, [axis, offsets](const BackwardContext& ctx) {
        const MapC g = as_matrix(ctx.grad_out);
        for (std::size_t k = 0; k < ctx.inputs.size(); ++k) {
            if (!ctx.input_grads[k]) continue;
            Tensor& gk = *ctx.input_grads[k];
            if (axis == 0) {
                as_matrix(gk) += g.middleRows(offsets[k], gk.rows());
            } else {
                as_matrix(gk) += g.middleCols(offsets[k], gk.cols());
            }
        }
    });
}

Var slice(Var a, std::size_t axis, std::size_t begin, std::size_t length) {
    const Tensor& av = a.value();
    require_2d("slice", av);
    if (axis > 1 || begin + length > av.shape()[axis] || length == 0) {
        fail(ErrorCode::ShapeMismatch, "slice [" + std::to_string(begin) + ", +" + std::to_string(length) +
                                           ") out of range for " + to_string(av.shape()));
    }
    Tensor out = axis == 0 ? Tensor(Shape{length, av.cols()}) : Tensor(Shape{av.rows(), length});
    if (axis == 0) {
        as_matrix(out) = as_matrix(av).middleRows(begin, length);
    } else {
        as_matrix(out) = as_matrix(av).middleCols(begin, length);
    }
    return a.tape()->record(std::move(out), {a}, [axis, begin, length](const BackwardContext& ctx) {
        if (!ctx.input_grads[0]) return;
        Map g = as_matrix(*ctx.input_grads[0]);
        if (axis == 0) {
            g.middleRows(begin, length) += as_matrix(ctx.grad_out);
        } else {
            g.middleCols(begin, length) += as_matrix(ctx.grad_out);
        }
    });
}

Var sum(Var a) {
    const Tensor& av = a.value();
    double s = 0.0;
    for (double v : av.data()) s += v;
    return a.tape()->record(Tensor::scalar(s), {a}, [](const BackwardContext& ctx) {
        if (!ctx.input_grads[0]) return;
        const double g = ctx.grad_out[0];
        for (double& v : ctx.input_grads[0]->data()) v += g;
    });
}

Var mean(Var a) {
    const double inv = 1.0 / static_cast<double>(a.value().size());
    return scale(sum(a), inv);
}

Var max(Var a) {
    const Tensor& av = a.value();
    std::size_t arg = 0;
    for (std::size_t i = 1; i < av.size(); ++i)
        if (av[i] > av[arg]) arg = i;
    return a.tape()->record(Tensor::scalar(av[arg]), {a}, [arg](const BackwardContext& ctx) {
        if (ctx.input_grads[0]) (*ctx.input_grads[0])[arg] += ctx.grad_out[0];
    });
}

Var sum(Var a, std::size_t axis) {
    const Tensor& av = a.value();
    require_2d("sum", av);
    if (axis > 1) fail(ErrorCode::ShapeMismatch, "sum axis must be 0 or 1");
    Tensor out = axis == 1 ? Tensor(Shape{av.rows(), 1}) : Tensor(Shape{1, av.cols()});
    if (axis == 1) {
        as_matrix(out) = as_matrix(av).rowwise().sum();
    } else {
        as_matrix(out) = as_matrix(av).colwise().sum();
    }
    return a.tape()->record(std::move(out), {a}, [axis](const BackwardContext& ctx) {
        if (!ctx.input_grads[0]) return;
        Tensor& g = *ctx.input_grads[0];
        for (std::size_t r = 0; r < g.rows(); ++r)
            for (std::size_t c = 0; c < g.cols(); ++c) g.at(r, c) += ctx.grad_out[axis == 1 ? r : c];
    });
}

Var exp(Var a) {
    return unary(a, [](double x) { return std::exp(x); }, [](double, double y) { return y; });
}

Var log(Var a) {
    return unary(a, [](double x) { return std::log(x); }, [](double x, double) { return 1.0 / x; });
}

Var relu(Var a) {
    return unary(a, [](double x) { return x > 0.0 ? x : 0.0; }, [](double x, double) { return x > 0.0 ? 1.0 : 0.0; });
}

Var softmax(Var a, std::size_t axis) {
    if (axis == 0) return transpose(softmax(transpose(a), 1));
    const Tensor& av = a.value();
    require_2d("softmax", av);
    if (axis != 1) fail(ErrorCode::ShapeMismatch, "softmax axis must be 0 or 1");
    Tensor out(av.shape());
    const std::size_t cols = av.cols();
    for (std::size_t r = 0; r < av.rows(); ++r) {
        double m = av.at(r, 0);
        for (std::size_t c = 1; c < cols; ++c) m = std::max(m, av.at(r, c));
        double z = 0.0;
        for (std::size_t c = 0; c < cols; ++c) z += (out.at(r, c) = std::exp(av.at(r, c) - m));
        for (std::size_t c = 0; c < cols; ++c) out.at(r, c) /= z;
    }
    return a.tape()->record(std::move(out), {a}, [](const BackwardContext& ctx) {
        if (!ctx.input_grads[0]) return;
        Tensor& gx = *ctx.input_grads[0];
        const Tensor& y = ctx.out;
        const Tensor& gy = ctx.grad_out;
        for (std::size_t r = 0; r < y.rows(); ++r) {
            double dot = 0.0;
            for (std::size_t c = 0; c < y.cols(); ++c) dot += gy.at(r, c) * y.at(r, c);
            for (std::size_t c = 0; c < y.cols(); ++c) gx.at(r, c) += y.at(r, c) * (gy.at(r, c) - dot);
        }
    });
}

Var log_softmax(Var a) {
    const Tensor& av = a.value();
    require_2d("log_softmax", av);
    Tensor out(av.shape());
    const std::size_t cols = av.cols();
    for (std::size_t r = 0; r < av.rows(); ++r) {
        double m = av.at(r, 0);
        for (std::size_t c = 1; c < cols; ++c) m = std::max(m, av.at(r, c));
        double z = 0.0;
        for (std::size_t c = 0; c < cols; ++c) z += std::exp(av.at(r, c) - m);
        const double lse = m + std::log(z);
        for (std::size_t c = 0; c < cols; ++c) out.at(r, c) = av.at(r, c) - lse;
    }
    return a.tape()->record(std::move(out), {a}, [](const BackwardContext& ctx) {
        if (!ctx.input_grads[0]) return;
        Tensor& gx = *ctx.input_grads[0];
        const Tensor& y = ctx.out;
        const Tensor& gy = ctx.grad_out;
        for (std::size_t r = 0; r < y.rows(); ++r) {
            double total = 0.0;
            for (std::size_t c = 0; c < y.cols(); ++c) total += gy.at(r, c);
            for (std::size_t c = 0; c < y.cols(); ++c) gx.at(r, c) += gy.at(r, c) - std::exp(y.at(r, c)) * total;
        }
    });
}

Var layer_norm(Var a, double eps) {
    if (!(eps > 0.0)) fail(ErrorCode::InvalidArgument, "layer_norm needs eps > 0");
    const Tensor& av = a.value();
    require_2d("layer_norm", av);
    const std::size_t rows = av.rows();
    const std::size_t cols = av.cols();
    Tensor out(av.shape());
    std::vector<double> inv_std(rows);
    for (std::size_t r = 0; r < rows; ++r) {
        double mu = 0.0;
        for (std::size_t c = 0; c < cols; ++c) mu += av.at(r, c);
        mu /= static_cast<double>(cols);
        double var = 0.0;
        for (std::size_t c = 0; c < cols; ++c) var += (av.at(r, c) - mu) * (av.at(r, c) - mu);
        var /= static_cast<double>(cols);
        inv_std[r] = 1.0 / std::sqrt(var + eps);
        for (std::size_t c = 0; c < cols; ++c) out.at(r, c) = (av.at(r, c) - mu) * inv_std[r];
    }
    return a.tape()->record(std::move(out), {a}, [inv_std](const BackwardContext& ctx) {
        if (!ctx.input_grads[0]) return;
        Tensor& gx = *ctx.input_grads[0];
        const Tensor& y = ctx.out;
        const Tensor& gy = ctx.grad_out;
        const auto cols = static_cast<double>(y.cols());
        for (std::size_t r = 0; r < y.rows(); ++r) {
            double mean_g = 0.0;
            double mean_gy = 0.0;
            for (std::size_t c = 0; c < y.cols(); ++c) {
                mean_g += gy.at(r, c);
                mean_gy += gy.at(r, c) * y.at(r, c);
            }
            mean_g /= cols;
            mean_gy /= cols;
            for (std::size_t c = 0; c < y.cols(); ++c) {
                gx.at(r, c) += inv_std[r] * (gy.at(r, c) - mean_g - y.at(r, c) * mean_gy);
            }
        }
    });
}

Var dropout(Var a, double rate, bool train, std::uint64_t seed) {
    if (!(rate >= 0.0 && rate < 1.0)) fail(ErrorCode::InvalidArgument, "dropout rate must lie in [0,1)");
    if (!train || rate == 0.0) return a;
    Rng rng(seed);
    const Tensor& av = a.value();
    Tensor mask(av.shape());
    const double keep = 1.0 / (1.0 - rate);
    for (std::size_t i = 0; i < mask.size(); ++i) mask[i] = rng.uniform() < rate ? 0.0 : keep;
    Tensor out(av.shape());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = av[i] * mask[i];
    return a.tape()->record(std::move(out), {a}, [mask = std::move(mask)](const BackwardContext& ctx) {
        if (!ctx.input_grads[0]) return;
        Tensor& gx = *ctx.input_grads[0];
        for (std::size_t i = 0; i < gx.size(); ++i) gx[i] += ctx.grad_out[i] * mask[i];
    });
}

Var embedding_lookup(Var table, std::span<const std::size_t> indices) {
    const Tensor& tv = table.value();
    require_2d("embedding_lookup", tv);
    if (indices.empty()) fail(ErrorCode::ShapeMismatch, "embedding_lookup with no indices");
    const std::size_t d = tv.cols();
    Tensor out(Shape{indices.size(), d});
    for (std::size_t r = 0; r < indices.size(); ++r) {
        if (indices[r] >= tv.rows()) {
            fail(ErrorCode::ShapeMismatch, "embedding index " + std::to_string(indices[r]) + " out of range");
        }
        for (std::size_t c = 0; c < d; ++c) out.at(r, c) = tv.at(indices[r], c);
    }
    std::vector<std::size_t> idx(indices.begin(), indices.end());
    return table.tape()->record(std::move(out), {table}, [idx = std::move(idx)](const BackwardContext& ctx) {
        if (!ctx.input_grads[0]) return;
        Tensor& g = *ctx.input_grads[0];
        const std::size_t d = g.cols();
        for (std::size_t r = 0; r < idx.size(); ++r)
            for (std::size_t c = 0; c < d; ++c) g.at(idx[r], c) += ctx.grad_out.at(r, c);
    });
}

Var clip(Var a, double lo, double hi) {
    if (lo > hi) fail(ErrorCode::InvalidArgument, "clip needs lo <= hi");
    return unary(
        a, [lo, hi](double x) { return std::clamp(x, lo, hi); },
        [lo, hi](double x, double) { return (x >= lo && x <= hi) ? 1.0 : 0.0; });
}

Var minimum(Var a, Var b) {
    if (a.value().shape() != b.value().shape()) shape_error("minimum", a.value().shape(), b.value().shape());
    return binary(
        "minimum", a, b, [](double x, double y) { return x <= y ? x : y; },
        [](double x, double y) { return x <= y ? 1.0 : 0.0; }, [](double x, double y) { return x <= y ? 0.0 : 1.0; });
}

Var where(const Tensor& mask, Var a, Var b) {
    Tape& tape = tape_of(a, b);
    const Tensor& av = a.value();
    const Tensor& bv = b.value();
    if (av.shape() != bv.shape()) shape_error("where", av.shape(), bv.shape());
    if (mask.shape() != av.shape()) shape_error("where", mask.shape(), av.shape());
    Tensor out(av.shape());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = mask[i] != 0.0 ? av[i] : bv[i];
    return tape.record(std::move(out), {a, b}, [mask](const BackwardContext& ctx) {
        for (std::size_t i = 0; i < mask.size(); ++i) {
            const bool pick_a = mask[i] != 0.0;
            if (pick_a && ctx.input_grads[0]) (*ctx.input_grads[0])[i] += ctx.grad_out[i];
            if (!pick_a && ctx.input_grads[1]) (*ctx.input_grads[1])[i] += ctx.grad_out[i];
        }
    });
}

} // namespace dagoffload::ad
