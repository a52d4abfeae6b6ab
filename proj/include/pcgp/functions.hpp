#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "pcgp/error.hpp"

namespace pcgp {

/// A node primitive. `a` and `b` are the values behind the node's first and
/// second connections, `c` is its parameter gene.
using PrimitiveFn = double (*)(double a, double b, double c);

struct Function {
    std::string name;
    int arity = 2; // connections the function reads: 0, 1 or 2
    PrimitiveFn fn = nullptr;
};

namespace primitives {

inline double add(double a, double b, double) { return a + b; }
inline double sub(double a, double b, double) { return a - b; }
inline double mult(double a, double b, double) { return a * b; }
inline double pdiv(double a, double b, double) { return std::abs(b) < 1e-6 ? a : a / b; }
inline double sin(double a, double, double) { return std::sin(a); }
inline double cos(double a, double, double) { return std::cos(a); }
inline double abs(double a, double, double) { return std::abs(a); }
inline double constant(double, double, double c) { return 2.0 * c - 1.0; }
inline double neg(double a, double, double) { return -a; }
inline double sqrt(double a, double, double) { return std::sqrt(std::abs(a)); }
inline double max(double a, double b, double) { return std::max(a, b); }
inline double min(double a, double b, double) { return std::min(a, b); }
inline double tanh(double a, double, double) { return std::tanh(a); }
inline double id(double a, double, double) { return a; }

} // namespace primitives

/// Every primitive that a config may name.
inline const std::vector<Function>& function_library() {
    static const std::vector<Function> lib = {
        {"add", 2, primitives::add},   {"sub", 2, primitives::sub},   {"mult", 2, primitives::mult},
        {"pdiv", 2, primitives::pdiv}, {"sin", 1, primitives::sin},   {"cos", 1, primitives::cos},
        {"abs", 1, primitives::abs},   {"const", 0, primitives::constant},
        {"neg", 1, primitives::neg},   {"sqrt", 1, primitives::sqrt}, {"max", 2, primitives::max},
        {"min", 2, primitives::min},   {"tanh", 1, primitives::tanh}, {"id", 1, primitives::id},
    };
    return lib;
}

/// Ordered, non-empty list of uniquely named primitives.
class FunctionSet {
  public:
    explicit FunctionSet(std::vector<Function> fns) : fns_(std::move(fns)) {
        if (fns_.empty()) throw ConfigError("function set is empty");
        for (std::size_t i = 0; i < fns_.size(); ++i) {
            if (fns_[i].fn == nullptr) throw ConfigError("function '" + fns_[i].name + "' has no implementation");
            if (fns_[i].arity < 0 || fns_[i].arity > 2)
                throw ConfigError("function '" + fns_[i].name + "' has arity outside 0..2");
            for (std::size_t j = 0; j < i; ++j)
                if (fns_[j].name == fns_[i].name) throw ConfigError("duplicate function name '" + fns_[i].name + "'");
        }
    }

    /// add, sub, mult, pdiv, sin, cos, abs, const.
    static FunctionSet standard() { return from_names({"add", "sub", "mult", "pdiv", "sin", "cos", "abs", "const"}); }

    static FunctionSet from_names(std::span<const std::string_view> names) {
        std::vector<Function> fns;
        for (auto name : names) {
            const auto& lib = function_library();
            auto it = std::find_if(lib.begin(), lib.end(), [&](const Function& f) { return f.name == name; });
            if (it == lib.end()) throw ConfigError("unknown function '" + std::string(name) + "'");
            fns.push_back(*it);
        }
        return FunctionSet(std::move(fns));
    }

    static FunctionSet from_names(std::initializer_list<std::string_view> names) {
        return from_names(std::span<const std::string_view>(names.begin(), names.size()));
    }

    static FunctionSet from_names(const std::vector<std::string>& names) {
        std::vector<std::string_view> views(names.begin(), names.end());
        return from_names(std::span<const std::string_view>(views));
    }

    std::size_t size() const { return fns_.size(); }
    const Function& operator[](std::size_t i) const { return fns_[i]; }
    const std::vector<Function>& functions() const { return fns_; }

    /// floor(f * |F|), clamped so f = 1.0 maps to the last function.
    std::size_t index_of(double f_gene) const {
        const auto i = static_cast<std::size_t>(std::floor(f_gene * static_cast<double>(fns_.size())));
        return std::min(i, fns_.size() - 1);
    }

    std::vector<std::string> names() const {
        std::vector<std::string> out;
        for (const auto& f : fns_) out.push_back(f.name);
        return out;
    }

  private:
    std::vector<Function> fns_;
};

} // namespace pcgp
