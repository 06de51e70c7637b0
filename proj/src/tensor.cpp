#include "nces/tensor.hpp"

#include <algorithm>

namespace nces {

std::string shape_str(const std::vector<int>& s) {
    std::string out = "[";
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (i) out += "x";
        out += std::to_string(s[i]);
    }
    return out + "]";
}

std::string Tensor::shape_str() const { return nces::shape_str(shape); }

double invariant_sum(std::span<double> terms) {
    std::sort(terms.begin(), terms.end());
    double acc = 0.0;
    for (double t : terms) acc += t;
    return acc;
}

}  // namespace nces
