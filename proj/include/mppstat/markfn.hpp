#pragma once

// Mark functions f(y1, y2) evaluated on ordered point pairs, plus the
// threshold-excess family used by the CLT module.

#include <functional>
#include <map>
#include <string>
#include <vector>

namespace mppstat {

enum class Arity { first_only, both };

/// Declared sign behaviour. Signed functions are split into positive and
/// negative parts by the estimators.
enum class Sign { nonnegative, may_be_negative };

class MarkFunction {
public:
    using Eval = std::function<double(double, double)>;

    /// Probes `eval` on a small grid of marks: a first-only function must not
    /// react to y2, and a nonnegative one must not go below zero there.
    MarkFunction(std::string name, Eval eval, Arity arity, Sign sign = Sign::nonnegative);

    double operator()(double y1, double y2) const { return eval_(y1, y2); }

    const std::string& name() const noexcept { return name_; }
    Arity arity() const noexcept { return arity_; }
    Sign sign() const noexcept { return sign_; }
    bool first_only() const noexcept { return arity_ == Arity::first_only; }
    bool nonnegative() const noexcept { return sign_ == Sign::nonnegative; }

private:
    std::string name_;
    Eval eval_;
    Arity arity_;
    Sign sign_;
};

/// product, first, first_squared, const_one. Throws InputError otherwise.
MarkFunction builtin(const std::string& name);

/// Pointwise product f * g, used for conditional mean marks.
MarkFunction multiply(const MarkFunction& f, const MarkFunction& g);

/// Threshold excess family of a first-only base function:
/// excess(y) = (f(y) - u)_+ and indicator(y) = 1{f(y) > u}.
class ThresholdFamily {
public:
    ThresholdFamily(MarkFunction base, double u);

    double excess(double y) const;
    double indicator(double y) const;

    const MarkFunction& base() const noexcept { return base_; }
    double u() const noexcept { return u_; }

    MarkFunction excess_function() const;
    MarkFunction indicator_function() const;

private:
    MarkFunction base_;
    double u_;
};

ThresholdFamily threshold(const MarkFunction& base, double u);

/// f(y1, y2) = 1{y1 in [a_lo, a_hi]} * 1{y2 in [b_lo, b_hi]}; infinite bounds allowed.
MarkFunction indicator_pair(double a_lo, double a_hi, double b_lo, double b_hi);

/// Name plus numeric parameters, as written in experiment configs.
struct MarkFunctionDescriptor {
    std::string name;
    std::map<std::string, double> params;
    std::string base; // base function for threshold_* entries
};

/// Name-keyed factory table for mark functions referenced from configs.
class MarkFunctionRegistry {
public:
    using Factory = std::function<MarkFunction(const MarkFunctionDescriptor&)>;

    /// Registry preloaded with the builtins, threshold_excess,
    /// threshold_indicator and indicator_pair.
    static MarkFunctionRegistry with_builtins();

    void add(const std::string& name, Factory factory);
    bool contains(const std::string& name) const;
    MarkFunction make(const MarkFunctionDescriptor& desc) const;
    std::vector<std::string> names() const;

private:
    std::map<std::string, Factory> factories_;
};

} // namespace mppstat
