// Dense row-major float64 tensor plus the order-invariant summation used by
// attention reductions.  Summing a sorted copy of the addends makes the result
// a function of the multiset of terms only, so permuting set elements upstream
// cannot change a single bit of the output.

#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace nces {

class NumericError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct Tensor {
    std::vector<int> shape;
    std::vector<double> data;

    Tensor() = default;
    explicit Tensor(std::vector<int> s) : shape(std::move(s)) {
        data.assign(static_cast<std::size_t>(numel(shape)), 0.0);
    }
    Tensor(std::vector<int> s, std::vector<double> d) : shape(std::move(s)), data(std::move(d)) {
        if (numel(shape) != static_cast<std::int64_t>(data.size()))
            throw NumericError("tensor shape/buffer size mismatch");
    }

    static std::int64_t numel(const std::vector<int>& s) {
        std::int64_t n = 1;
        for (int d : s) n *= d;
        return n;
    }
    std::int64_t size() const { return static_cast<std::int64_t>(data.size()); }

    int rows() const { return shape.at(0); }
    int cols() const { return shape.at(1); }
    double& at(int i, int j) { return data[static_cast<std::size_t>(i) * cols() + j]; }
    double at(int i, int j) const { return data[static_cast<std::size_t>(i) * cols() + j]; }

    bool same_shape(const Tensor& o) const { return shape == o.shape; }
    std::string shape_str() const;
};

std::string shape_str(const std::vector<int>& s);

/// Permutation-invariant sum: sorts `terms` (modified in place) and reduces
/// left to right.
double invariant_sum(std::span<double> terms);

}  // namespace nces
