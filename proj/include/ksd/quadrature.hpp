#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include "ksd/core.hpp"

namespace ksd {

struct QuadTol {
    double rel = 1e-12;
    double abs = 1e-14;
};

namespace detail {

// 15-point Kronrod extension of the 7-point Gauss rule on [-1, 1].
// Abscissae/weights from QUADPACK dqk15.
inline constexpr double kGk15X[8] = {
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144838258730,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000};
inline constexpr double kGk15W[8] = {
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714};
inline constexpr double kG7W[4] = {
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327};

struct Panel {
    double a, b;
    Mat value;
    double err;
};

template <class F>
Panel gk15(F&& f, double a, double b) {
    const double c = 0.5 * (a + b);
    const double hl = 0.5 * (b - a);
    Mat fc = f(c);
    Mat resk = kGk15W[7] * fc;
    Mat resg = kG7W[3] * fc;
    for (int i = 0; i < 7; ++i) {
        const Mat lo = f(c - hl * kGk15X[i]);
        const Mat hi = f(c + hl * kGk15X[i]);
        resk += kGk15W[i] * (lo + hi);
        if (i % 2 == 1) resg += kG7W[i / 2] * (lo + hi);
    }
    Panel p;
    p.a = a;
    p.b = b;
    p.value = hl * resk;
    p.err = hl * (resk - resg).cwiseAbs().maxCoeff();
    return p;
}

}  // namespace detail

// Adaptive Gauss-Kronrod 15(7) for matrix-valued integrands, with
// deterministic pre-splitting into `pre_split` uniform panels (used to seed
// oscillatory integrands with at least one panel per half-period).
template <class F>
Mat integrate(F&& f, double a, double b, QuadTol tol = {}, int pre_split = 1,
              int max_panels = 4000) {
    if (!(b > a)) throw DomainError("integrate: empty or reversed interval");
    pre_split = std::max(pre_split, 1);

    std::vector<detail::Panel> panels;
    panels.reserve(static_cast<size_t>(pre_split) + 64);
    for (int k = 0; k < pre_split; ++k) {
        const double pa = a + (b - a) * k / pre_split;
        const double pb = a + (b - a) * (k + 1) / pre_split;
        panels.push_back(detail::gk15(f, pa, pb));
    }

    auto total_norm = [&panels]() {
        Mat s = panels.front().value;
        for (size_t i = 1; i < panels.size(); ++i) s += panels[i].value;
        return s.size() ? s.cwiseAbs().maxCoeff() : 0.0;
    };

    while (true) {
        double err = 0.0;
        size_t worst = 0;
        for (size_t i = 0; i < panels.size(); ++i) {
            err += panels[i].err;
            if (panels[i].err > panels[worst].err) worst = i;
        }
        if (err <= std::max(tol.abs, tol.rel * (1.0 + total_norm()))) break;
        if (static_cast<int>(panels.size()) >= max_panels)
            throw NumericalError("integrate: panel budget exhausted (integrand too rough)");
        const detail::Panel p = panels[worst];
        const double mid = 0.5 * (p.a + p.b);
        panels[worst] = detail::gk15(f, p.a, mid);
        panels.push_back(detail::gk15(f, mid, p.b));
    }

    Mat s = panels.front().value;
    for (size_t i = 1; i < panels.size(); ++i) s += panels[i].value;
    return s;
}

inline double integrate_scalar(const std::function<double(double)>& f, double a, double b,
                               QuadTol tol = {}, int pre_split = 1) {
    auto wrap = [&f](double t) { return Mat::Constant(1, 1, f(t)); };
    return integrate(wrap, a, b, tol, pre_split)(0, 0);
}

}  // namespace ksd
