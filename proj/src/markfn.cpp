#include "mppstat/markfn.hpp"

#include "mppstat/error.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <utility>

namespace mppstat {

namespace {

constexpr std::array<double, 7> kProbe{-7.5, -1.0, -0.25, 0.0, 0.5, 2.0, 11.0};

double param(const MarkFunctionDescriptor& desc, const std::string& key) {
    auto it = desc.params.find(key);
    if (it == desc.params.end()) {
        throw InputError("mark function '" + desc.name + "' requires parameter '" + key + "'");
    }
    return it->second;
}

double param_or(const MarkFunctionDescriptor& desc, const std::string& key, double fallback) {
    auto it = desc.params.find(key);
    return it == desc.params.end() ? fallback : it->second;
}

} // namespace

MarkFunction::MarkFunction(std::string name, Eval eval, Arity arity, Sign sign)
    : name_(std::move(name)), eval_(std::move(eval)), arity_(arity), sign_(sign) {
    if (!eval_) {
        throw InputError("mark function '" + name_ + "' has no evaluator");
    }
    for (double y1 : kProbe) {
        const double ref = eval_(y1, kProbe.front());
        for (double y2 : kProbe) {
            const double v = eval_(y1, y2);
            if (sign_ == Sign::nonnegative && v < 0.0) {
                throw InputError("mark function '" + name_ + "' declared nonnegative but f(" +
                                 std::to_string(y1) + ", " + std::to_string(y2) + ") < 0");
            }
            if (arity_ == Arity::first_only && !(v == ref || (std::isnan(v) && std::isnan(ref)))) {
                throw InputError("mark function '" + name_ + "' declared first-only but depends on y2");
            }
        }
    }
}

MarkFunction builtin(const std::string& name) {
    if (name == "product") {
        return {name, [](double a, double b) { return a * b; }, Arity::both, Sign::may_be_negative};
    }
    if (name == "first") {
        return {name, [](double a, double) { return a; }, Arity::first_only, Sign::may_be_negative};
    }
    if (name == "first_squared") {
        return {name, [](double a, double) { return a * a; }, Arity::first_only};
    }
    if (name == "const_one") {
        return {name, [](double, double) { return 1.0; }, Arity::first_only};
    }
    throw InputError("unknown mark function '" + name + "'");
}

MarkFunction multiply(const MarkFunction& f, const MarkFunction& g) {
    const Arity arity = (f.first_only() && g.first_only()) ? Arity::first_only : Arity::both;
    const Sign sign = (f.nonnegative() && g.nonnegative()) ? Sign::nonnegative : Sign::may_be_negative;
    return {f.name() + "*" + g.name(), [f, g](double a, double b) { return f(a, b) * g(a, b); }, arity,
            sign};
}

ThresholdFamily::ThresholdFamily(MarkFunction base, double u) : base_(std::move(base)), u_(u) {
    if (!base_.first_only()) {
        throw InputError("threshold family requires a first-only base function, got '" +
                         base_.name() + "'");
    }
    if (!(u_ >= 0.0) || !std::isfinite(u_)) {
        throw InputError("threshold u must be finite and >= 0");
    }
}

double ThresholdFamily::excess(double y) const {
    const double v = base_(y, 0.0);
    return v > u_ ? v - u_ : 0.0;
}

double ThresholdFamily::indicator(double y) const { return base_(y, 0.0) > u_ ? 1.0 : 0.0; }

MarkFunction ThresholdFamily::excess_function() const {
    ThresholdFamily self = *this;
    return {"excess(" + base_.name() + ")", [self](double a, double) { return self.excess(a); },
            Arity::first_only};
}

MarkFunction ThresholdFamily::indicator_function() const {
    ThresholdFamily self = *this;
    return {"indicator(" + base_.name() + ")", [self](double a, double) { return self.indicator(a); },
            Arity::first_only};
}

ThresholdFamily threshold(const MarkFunction& base, double u) { return ThresholdFamily(base, u); }

MarkFunction indicator_pair(double a_lo, double a_hi, double b_lo, double b_hi) {
    if (std::isnan(a_lo) || std::isnan(a_hi) || std::isnan(b_lo) || std::isnan(b_hi)) {
        throw InputError("indicator_pair bounds must not be NaN");
    }
    if (a_lo > a_hi || b_lo > b_hi) {
        throw InputError("indicator_pair interval is inverted");
    }
    const bool ignores_second = b_lo == -std::numeric_limits<double>::infinity() &&
                                b_hi == std::numeric_limits<double>::infinity();
    return {"indicator_pair",
            [=](double y1, double y2) {
                return (y1 >= a_lo && y1 <= a_hi && y2 >= b_lo && y2 <= b_hi) ? 1.0 : 0.0;
            },
            ignores_second ? Arity::first_only : Arity::both};
}

MarkFunctionRegistry MarkFunctionRegistry::with_builtins() {
    MarkFunctionRegistry reg;
    for (const char* name : {"product", "first", "first_squared", "const_one"}) {
        reg.add(name, [](const MarkFunctionDescriptor& d) { return builtin(d.name); });
    }
    reg.add("threshold_excess", [](const MarkFunctionDescriptor& d) {
        return threshold(builtin(d.base.empty() ? "first" : d.base), param(d, "u")).excess_function();
    });
    reg.add("threshold_indicator", [](const MarkFunctionDescriptor& d) {
        return threshold(builtin(d.base.empty() ? "first" : d.base), param(d, "u")).indicator_function();
    });
    reg.add("indicator_pair", [](const MarkFunctionDescriptor& d) {
        constexpr double inf = std::numeric_limits<double>::infinity();
        return indicator_pair(param_or(d, "a_lo", -inf), param_or(d, "a_hi", inf),
                              param_or(d, "b_lo", -inf), param_or(d, "b_hi", inf));
    });
    return reg;
}

void MarkFunctionRegistry::add(const std::string& name, Factory factory) {
    factories_[name] = std::move(factory);
}

bool MarkFunctionRegistry::contains(const std::string& name) const {
    return factories_.count(name) != 0;
}

MarkFunction MarkFunctionRegistry::make(const MarkFunctionDescriptor& desc) const {
    auto it = factories_.find(desc.name);
    if (it == factories_.end()) {
        throw InputError("unknown mark function '" + desc.name + "'");
    }
    return it->second(desc);
}

std::vector<std::string> MarkFunctionRegistry::names() const {
    std::vector<std::string> out;
    for (const auto& [name, _] : factories_) out.push_back(name);
    return out;
}

} // namespace mppstat
