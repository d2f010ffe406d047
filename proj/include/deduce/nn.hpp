#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "deduce/matrix.hpp"
#include "deduce/param_store.hpp"
#include "deduce/rng.hpp"

namespace deduce::nn {

// y = x * W + 1 * bias  (bias optional, shape 1 x out)
Matrix linear(const Matrix& x, const Matrix& weight, const Matrix* bias);

// Accumulates dL/dW and dL/dbias, returns dL/dx.
Matrix linear_backward(const Matrix& dy, const Matrix& x, const Matrix& weight, Matrix& dweight,
                       Matrix* dbias);

// Row-wise softmax with per-row max subtraction.
Matrix softmax_rows(const Matrix& x);
// Jacobian-vector product given the forward output y.
Matrix softmax_rows_backward(const Matrix& dy, const Matrix& y);

Matrix relu(const Matrix& x);
Matrix relu_backward(const Matrix& dy, const Matrix& x);

struct DropoutResult {
    Matrix value;
    std::vector<std::uint8_t> kept;  // empty in eval mode or when rate == 0
};

// Inverted dropout: survivors scaled by 1/(1-rate); eval mode is the identity.
DropoutResult dropout(const Matrix& x, double rate, bool training, Rng& rng);
Matrix dropout_backward(const Matrix& dy, const DropoutResult& fwd, double rate);

// Seeded convenience form of the dropout op.
Matrix dropout_seeded(const Matrix& x, double rate, bool training, std::uint64_t seed);

struct GradCheckResult {
    double max_rel_err = 0.0;
    std::string worst_param;
    std::size_t worst_coord = 0;
};

// Central finite differences against the analytic gradients that `loss_fn`
// accumulates into `params`. `loss_fn` must be deterministic. Coordinates are
// subsampled per parameter to keep the check fast on larger stores.
GradCheckResult grad_check(ParamStore& params, const std::function<double()>& loss_fn,
                           double h = 1e-5, std::size_t max_coords_per_param = 24,
                           std::uint64_t seed = 0);

}  // namespace deduce::nn
