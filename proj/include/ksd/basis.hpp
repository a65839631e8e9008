#pragma once

#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "ksd/core.hpp"

namespace ksd {

enum class BasisKind { Poly, Sin, Cos, ExpSin, ExpCos, InvSin2, InvCos2, Tabulated };

// One scalar basis function on a delay interval. `param` is the polynomial
// degree for Poly and the angular frequency (rad/s) for the trigonometric
// and rational kinds.
struct BasisFunction {
    BasisKind kind = BasisKind::Poly;
    double param = 0.0;
    std::vector<std::pair<double, double>> samples;  // Tabulated only, sorted by tau

    double operator()(double tau) const {
        switch (kind) {
            case BasisKind::Poly: {
                const int k = static_cast<int>(param);
                return k == 0 ? 1.0 : std::pow(tau, k);
            }
            case BasisKind::Sin: return std::sin(param * tau);
            case BasisKind::Cos: return std::cos(param * tau);
            case BasisKind::ExpSin: return std::exp(std::sin(param * tau));
            case BasisKind::ExpCos: return std::exp(std::cos(param * tau));
            case BasisKind::InvSin2: {
                const double s = std::sin(param * tau);
                return 1.0 / (s * s + 1.0);
            }
            case BasisKind::InvCos2: {
                const double c = std::cos(param * tau);
                return 1.0 / (c * c + 1.0);
            }
            case BasisKind::Tabulated: {
                if (samples.size() < 2)
                    throw DomainError("tabulated basis function needs at least 2 samples");
                if (tau <= samples.front().first) return samples.front().second;
                if (tau >= samples.back().first) return samples.back().second;
                auto it = std::upper_bound(samples.begin(), samples.end(),
                                           std::make_pair(tau, 0.0));
                const auto& [t1, v1] = *it;
                const auto& [t0, v0] = *(it - 1);
                const double w = (tau - t0) / (t1 - t0);
                return (1.0 - w) * v0 + w * v1;
            }
        }
        return 0.0;
    }

    std::string describe() const {
        switch (kind) {
            case BasisKind::Poly: return "poly(" + std::to_string(static_cast<int>(param)) + ")";
            case BasisKind::Sin: return "sin(" + std::to_string(param) + ")";
            case BasisKind::Cos: return "cos(" + std::to_string(param) + ")";
            case BasisKind::ExpSin: return "exp_sin(" + std::to_string(param) + ")";
            case BasisKind::ExpCos: return "exp_cos(" + std::to_string(param) + ")";
            case BasisKind::InvSin2: return "inv_sin2(" + std::to_string(param) + ")";
            case BasisKind::InvCos2: return "inv_cos2(" + std::to_string(param) + ")";
            case BasisKind::Tabulated: return "tabulated(" + std::to_string(samples.size()) + ")";
        }
        return "?";
    }

    bool same_as(const BasisFunction& o) const {
        return kind == o.kind && param == o.param && samples == o.samples;
    }

    static BasisFunction poly(int k) { return {BasisKind::Poly, static_cast<double>(k), {}}; }
    static BasisFunction sine(double w) { return {BasisKind::Sin, w, {}}; }
    static BasisFunction cosine(double w) { return {BasisKind::Cos, w, {}}; }
    static BasisFunction exp_sin(double w) { return {BasisKind::ExpSin, w, {}}; }
    static BasisFunction exp_cos(double w) { return {BasisKind::ExpCos, w, {}}; }
    static BasisFunction inv_sin2(double a) { return {BasisKind::InvSin2, a, {}}; }
    static BasisFunction inv_cos2(double a) { return {BasisKind::InvCos2, a, {}}; }
};

// Closure matrix M with f'(tau) = M [varphi(tau); f(tau)] built from the
// registered derivative rules: poly(k)' = k poly(k-1), sin(w)' = w cos(w),
// cos(w)' = -w sin(w). Throws ClosureError when a derivative leaves the span
// of varphi and f, naming the missing partner function.
inline Mat build_closure_matrix(const std::vector<BasisFunction>& f,
                                const std::vector<BasisFunction>& varphi) {
    const int d = static_cast<int>(f.size());
    const int delta = static_cast<int>(varphi.size());
    const int vk = delta + d;
    auto column_of = [&](const BasisFunction& target) -> int {
        for (int j = 0; j < delta; ++j)
            if (varphi[j].same_as(target)) return j;
        for (int j = 0; j < d; ++j)
            if (f[j].same_as(target)) return delta + j;
        return -1;
    };
    Mat m = Mat::Zero(d, vk);
    for (int i = 0; i < d; ++i) {
        const BasisFunction& fi = f[i];
        double coeff = 0.0;
        BasisFunction target;
        switch (fi.kind) {
            case BasisKind::Poly: {
                const int k = static_cast<int>(fi.param);
                if (k == 0) continue;  // constant, zero row
                coeff = static_cast<double>(k);
                target = BasisFunction::poly(k - 1);
                break;
            }
            case BasisKind::Sin:
                coeff = fi.param;
                target = BasisFunction::cosine(fi.param);
                break;
            case BasisKind::Cos:
                coeff = -fi.param;
                target = BasisFunction::sine(fi.param);
                break;
            default:
                throw ClosureError("only W^{1,2} families with registered closure allowed in f; "
                                   "offending function: " + fi.describe());
        }
        const int col = column_of(target);
        if (col < 0)
            throw ClosureError("derivative of " + fi.describe() +
                               " needs " + target.describe() + " in the family");
        m(i, col) += coeff;
    }
    return m;
}

// Per-interval basis family. Ordering is fixed project-wide:
//   g = [phi; varphi; f],  h = [varphi; f].
struct IntervalBasis {
    double lo = 0.0, hi = 0.0;  // interval [-r_i, -r_{i-1}]
    std::vector<BasisFunction> phi;     // approximated L2 components
    std::vector<BasisFunction> varphi;  // exactly kept L2 components
    std::vector<BasisFunction> f;       // W^{1,2} components
    Mat M;                              // d x (delta + d) closure matrix

    int mu() const { return static_cast<int>(phi.size()); }
    int delta() const { return static_cast<int>(varphi.size()); }
    int d() const { return static_cast<int>(f.size()); }
    int varkappa() const { return delta() + d(); }
    int kappa() const { return mu() + varkappa(); }
    double length() const { return hi - lo; }

    void check_tau(double tau) const {
        const double slack = 1e-12 * (1.0 + length());
        if (tau < lo - slack || tau > hi + slack)
            throw DomainError("tau outside basis interval [" + std::to_string(lo) + ", " +
                              std::to_string(hi) + "]");
    }

    Vec eval_f(double tau) const {
        Vec out(d());
        for (int j = 0; j < d(); ++j) out(j) = f[j](tau);
        return out;
    }

    Vec eval_h(double tau) const {
        check_tau(tau);
        Vec out(varkappa());
        for (int j = 0; j < delta(); ++j) out(j) = varphi[j](tau);
        out.tail(d()) = eval_f(tau);
        return out;
    }

    Vec eval_g(double tau) const {
        check_tau(tau);
        Vec out(kappa());
        for (int j = 0; j < mu(); ++j) out(j) = phi[j](tau);
        out.tail(varkappa()) = eval_h(tau);
        return out;
    }

    // (f(-r_{i-1}), f(-r_i)) — the upper and lower endpoint values.
    std::pair<Vec, Vec> eval_boundary() const { return {eval_f(hi), eval_f(lo)}; }

    // Largest angular frequency present, used to pre-split quadrature panels.
    double max_frequency() const {
        double w = 0.0;
        auto scan = [&w](const std::vector<BasisFunction>& fns) {
            for (const auto& fn : fns) {
                switch (fn.kind) {
                    case BasisKind::Sin:
                    case BasisKind::Cos:
                    case BasisKind::ExpSin:
                    case BasisKind::ExpCos:
                        w = std::max(w, std::abs(fn.param));
                        break;
                    case BasisKind::InvSin2:
                    case BasisKind::InvCos2:
                        w = std::max(w, 2.0 * std::abs(fn.param));
                        break;
                    default: break;
                }
            }
        };
        scan(phi);
        scan(varphi);
        scan(f);
        return w;
    }
};

inline IntervalBasis make_interval_basis(double lo, double hi, std::vector<BasisFunction> phi,
                                         std::vector<BasisFunction> varphi,
                                         std::vector<BasisFunction> f) {
    if (!(hi > lo)) throw DomainError("basis interval must have positive length");
    if (f.empty()) throw DomainError("f must contain at least one function");
    for (const auto& fn : f)
        if (fn.kind == BasisKind::Tabulated)
            throw ClosureError("tabulated functions are admitted only in phi");
    for (const auto& fn : varphi)
        if (fn.kind == BasisKind::Tabulated)
            throw ClosureError("tabulated functions are admitted only in phi");
    IntervalBasis b;
    b.lo = lo;
    b.hi = hi;
    b.phi = std::move(phi);
    b.varphi = std::move(varphi);
    b.f = std::move(f);
    b.M = build_closure_matrix(b.f, b.varphi);
    return b;
}

// Escape hatch: caller supplies the closure table directly.
inline IntervalBasis make_interval_basis_explicit(double lo, double hi,
                                                  std::vector<BasisFunction> phi,
                                                  std::vector<BasisFunction> varphi,
                                                  std::vector<BasisFunction> f, Mat closure) {
    if (!(hi > lo)) throw DomainError("basis interval must have positive length");
    if (f.empty()) throw DomainError("f must contain at least one function");
    IntervalBasis b;
    b.lo = lo;
    b.hi = hi;
    b.phi = std::move(phi);
    b.varphi = std::move(varphi);
    b.f = std::move(f);
    if (closure.rows() != b.d() || closure.cols() != b.varkappa())
        throw DomainError("explicit closure table must be d x (delta + d)");
    b.M = std::move(closure);
    return b;
}

// The standard f-family [tau^0..tau^sigma; sin(w..lambda w); cos(w..lambda w)],
// closed under differentiation by construction.
inline std::vector<BasisFunction> poly_trig_family(int sigma, double omega, int lambda) {
    if (sigma < 0 || lambda < 0) throw DomainError("poly/trig enrichment orders must be >= 0");
    std::vector<BasisFunction> f;
    for (int k = 0; k <= sigma; ++k) f.push_back(BasisFunction::poly(k));
    for (int k = 1; k <= lambda; ++k) f.push_back(BasisFunction::sine(omega * k));
    for (int k = 1; k <= lambda; ++k) f.push_back(BasisFunction::cosine(omega * k));
    return f;
}

}  // namespace ksd
