#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include "deduce/matrix.hpp"

namespace deduce {

struct Param {
    std::string name;
    Matrix value;
    Matrix grad;
};

// Named parameter matrices with matching gradient buffers. Insertion order is
// preserved so checkpoints and optimizer state line up deterministically.
class ParamStore {
public:
    std::size_t add(const std::string& name, Matrix init);

    Param& at(const std::string& name);
    const Param& at(const std::string& name) const;
    bool contains(const std::string& name) const { return index_.count(name) > 0; }

    std::size_t size() const { return params_.size(); }
    Param& operator[](std::size_t i) { return params_[i]; }
    const Param& operator[](std::size_t i) const { return params_[i]; }

    void zero_grads();
    bool all_finite() const;
    std::size_t coord_count() const;

private:
    std::vector<Param> params_;
    std::map<std::string, std::size_t> index_;
};

struct AdamConfig {
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
};

// Adam with bias correction and decoupled weight decay. The decay shrink is
// applied to the value before the moment update; grads are zeroed afterwards.
class AdamState {
public:
    explicit AdamState(const ParamStore& params, AdamConfig cfg = {});

    void step(ParamStore& params, double lr, double weight_decay);

    std::int64_t step_count() const { return t_; }
    const AdamConfig& config() const { return cfg_; }

private:
    std::vector<Matrix> m_;
    std::vector<Matrix> v_;
    std::int64_t t_ = 0;
    AdamConfig cfg_;
};

}  // namespace deduce
