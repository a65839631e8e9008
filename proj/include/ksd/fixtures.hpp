#pragma once

#include "ksd/model.hpp"

namespace ksd::fixtures {

// The built-in two-delay benchmark plant "paper-s4": nu = 2 with r = (1, 1.7),
// n = m = 2, p = q = 1, oscillatory distributed-delay kernels mixing
// polynomial, harmonic, exp-of-harmonic and rational components, and an
// l2-gain supply rate. sigma/lambda select the polynomial and harmonic
// enrichment order of the W^{1,2} families.
inline DelaySystem paper_s4(int sigma1 = 1, int sigma2 = 1, int lambda1 = 1, int lambda2 = 1) {
    DelaySystem sys;
    sys.dims = {2, 2, 1, 1, 2};
    sys.delays.r = {1.0, 1.7};

    sys.A = {(Mat(2, 2) << -2, 0, 2, 0.01).finished(),
             (Mat(2, 2) << -1, 0.1, 0.2, 0).finished(),
             (Mat(2, 2) << -0.1, 0, 0, -0.2).finished()};
    sys.B = {(Mat(2, 1) << 0, 1).finished(),
             (Mat(2, 1) << 0.01, 0.1).finished(),
             (Mat(2, 1) << -0.1, -0.1).finished()};
    sys.C = {(Mat(2, 2) << -0.1, 0.2, 0, 0.1).finished(),
             (Mat(2, 2) << -0.1, 0, 0, 0.2).finished(),
             (Mat(2, 2) << 0, 0.1, -0.1, 0).finished()};
    sys.Bfrak = {(Mat(2, 1) << 0, 1).finished(),
                 (Mat(2, 1) << 0.01, 0.01).finished(),
                 (Mat(2, 1) << -0.01, -0.1).finished()};
    sys.D1 = (Mat(2, 1) << 0.2, 0.3).finished();
    sys.D2 = (Mat(2, 1) << 0.12, 0.1).finished();

    sys.basis.push_back(make_interval_basis(
        -1.0, 0.0, {BasisFunction::exp_sin(20.0), BasisFunction::exp_cos(20.0)},
        {BasisFunction::inv_sin2(1.2)}, poly_trig_family(sigma1, 20.0, lambda1)));
    sys.basis.push_back(make_interval_basis(
        -1.7, -1.0, {BasisFunction::exp_sin(18.0), BasisFunction::exp_cos(18.0)},
        {BasisFunction::inv_cos2(0.7)}, poly_trig_family(sigma2, 18.0, lambda2)));

    // g ordering per interval: [exp_sin, exp_cos, inv_*, 1, tau, ..., sin w.., cos w..]
    const int i1_poly0 = 3, i1_poly1 = 4;
    const int i1_sin = 3 + sigma1 + 1, i1_cos = 3 + sigma1 + 1 + lambda1;
    const int i2_poly0 = 3, i2_sin = 3 + sigma2 + 1, i2_cos = 3 + sigma2 + 1 + lambda2;

    auto c22 = [](double a, double b, double c, double d) {
        return (Mat(2, 2) << a, b, c, d).finished();
    };
    auto c21 = [](double a, double b) { return (Mat(2, 1) << a, b).finished(); };

    DdKernels k1;
    k1.A = {{i1_poly0, c22(0.1, 0, 0.3, 0)},
            {i1_sin, c22(3, 0, 0, 3)},
            {0, c22(0, 0.8, 0, 0)},
            {1, c22(0, -0.3, 0, 0)},
            {2, c22(0, 0, 1, 0)}};
    k1.B = {{i1_poly0, c21(0.1, 0)}, {i1_poly1, c21(0.01, 0.1)}, {2, c21(-0.01, 0.02)}};
    k1.C = {{i1_poly0, c22(0.7, -0.2, 0.4, 0.8)},
            {i1_cos, c22(1, 0, 0, 0)},
            {2, c22(0, 1, 0, 0)},
            {0, c22(0, 0, -0.5, 0)},
            {i1_sin, c22(0, 0, 0, -1)}};
    k1.Bfrak = {{i1_poly1, c21(0.01, 0)}, {0, c21(0.1, 0.2)}, {2, c21(-0.1, 0)}};
    sys.dd_kernels.push_back(std::move(k1));

    DdKernels k2;
    k2.A = {{i2_cos, c22(-10, 0, 0, -10)},
            {1, c22(0, 0.3, 0, 0)},
            {2, c22(0, -1, 0, 0)},
            {0, c22(0, 0, 0.1, 0)},
            {i2_poly0, c22(0, 0, 0, 0.2)}};
    k2.B = {{1, c21(0.2, 0.1)}, {0, c21(0.01, 0.02)}, {2, c21(0.01, 0)}};
    k2.C = {{i2_poly0, c22(0.2, 0.3, 0, 0.1)},
            {i2_sin, c22(1, 0, 0, 0)},
            {1, c22(0, 1, 0, 0)},
            {2, c22(0, 0, 0, -1)}};
    k2.Bfrak = {{1, c21(0.2, 0)}, {0, c21(0.01, 0.02)}, {2, c21(0.1, 0.2)}};
    sys.dd_kernels.push_back(std::move(k2));

    sys.supply.mode = SupplyMode::L2GainMin;
    return sys;
}

// Resolves "builtin:<name>" or plain builtin names used by the CLI.
inline std::optional<DelaySystem> builtin(const std::string& name) {
    std::string key = name;
    if (key.rfind("builtin:", 0) == 0) key = key.substr(8);
    if (key == "paper-s4") return paper_s4();
    return std::nullopt;
}

}  // namespace ksd::fixtures
