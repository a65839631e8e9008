#pragma once

#include <fstream>
#include <string>

#include <json.hpp>

#include "ksd/model.hpp"

namespace ksd {

namespace io_detail {

using nlohmann::json;

inline Mat mat_from_json(const json& j, const std::string& field) {
    if (!j.is_array()) throw ParseError(field + ": expected a nested array (matrix)");
    const auto rows = j.size();
    if (rows == 0) return Mat(0, 0);
    if (!j[0].is_array()) throw ParseError(field + ": expected rows to be arrays");
    const auto cols = j[0].size();
    Mat m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
    for (size_t i = 0; i < rows; ++i) {
        if (!j[i].is_array() || j[i].size() != cols)
            throw ParseError(field + ": ragged matrix rows");
        for (size_t c = 0; c < cols; ++c) {
            if (!j[i][c].is_number()) throw ParseError(field + ": non-numeric entry");
            m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)) = j[i][c].get<double>();
        }
    }
    return m;
}

inline json mat_to_json(const Mat& m) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
        rows.push_back(row);
    }
    return rows;
}

inline BasisFunction basis_fn_from_json(const json& j, const std::string& field) {
    if (!j.is_object() || !j.contains("kind"))
        throw ParseError(field + ": basis function needs a \"kind\"");
    const std::string kind = j["kind"].get<std::string>();
    auto param = [&]() { return j.value("param", 0.0); };
    if (kind == "poly") return BasisFunction::poly(static_cast<int>(param()));
    if (kind == "sin") return BasisFunction::sine(param());
    if (kind == "cos") return BasisFunction::cosine(param());
    if (kind == "exp_sin") return BasisFunction::exp_sin(param());
    if (kind == "exp_cos") return BasisFunction::exp_cos(param());
    if (kind == "inv_sin2") return BasisFunction::inv_sin2(param());
    if (kind == "inv_cos2") return BasisFunction::inv_cos2(param());
    if (kind == "tabulated") {
        BasisFunction f;
        f.kind = BasisKind::Tabulated;
        if (!j.contains("samples") || !j["samples"].is_array() || j["samples"].size() < 2)
            throw ParseError(field + ": tabulated basis function needs >= 2 samples");
        for (const auto& s : j["samples"])
            f.samples.emplace_back(s.at(0).get<double>(), s.at(1).get<double>());
        return f;
    }
    throw ParseError(field + ": unknown basis kind \"" + kind + "\"");
}

inline json basis_fn_to_json(const BasisFunction& f) {
    json j;
    switch (f.kind) {
        case BasisKind::Poly: j["kind"] = "poly"; break;
        case BasisKind::Sin: j["kind"] = "sin"; break;
        case BasisKind::Cos: j["kind"] = "cos"; break;
        case BasisKind::ExpSin: j["kind"] = "exp_sin"; break;
        case BasisKind::ExpCos: j["kind"] = "exp_cos"; break;
        case BasisKind::InvSin2: j["kind"] = "inv_sin2"; break;
        case BasisKind::InvCos2: j["kind"] = "inv_cos2"; break;
        case BasisKind::Tabulated: {
            j["kind"] = "tabulated";
            json samples = json::array();
            for (const auto& [t, v] : f.samples) samples.push_back(json::array({t, v}));
            j["samples"] = samples;
            return j;
        }
    }
    j["param"] = f.param;
    return j;
}

inline std::vector<BasisFunction> basis_fn_list(const json& j, const std::string& field) {
    std::vector<BasisFunction> out;
    if (j.is_null()) return out;
    if (!j.is_array()) throw ParseError(field + ": expected an array of basis functions");
    for (size_t i = 0; i < j.size(); ++i)
        out.push_back(basis_fn_from_json(j[i], field + "[" + std::to_string(i) + "]"));
    return out;
}

inline IntervalBasis interval_basis_from_json(const json& j, double lo, double hi,
                                              const std::string& field) {
    auto phi = basis_fn_list(j.value("phi", json()), field + ".phi");
    auto varphi = basis_fn_list(j.value("varphi", json()), field + ".varphi");
    if (j.contains("f_explicit")) {
        const auto& fx = j["f_explicit"];
        auto f = basis_fn_list(fx.value("functions", json()), field + ".f_explicit.functions");
        if (!fx.contains("closure"))
            throw ParseError(field + ".f_explicit: needs a \"closure\" table");
        Mat m = mat_from_json(fx["closure"], field + ".f_explicit.closure");
        return make_interval_basis_explicit(lo, hi, std::move(phi), std::move(varphi),
                                            std::move(f), std::move(m));
    }
    if (!j.contains("f")) throw ParseError(field + ": needs \"f\" or \"f_explicit\"");
    const auto& fj = j["f"];
    std::vector<BasisFunction> f;
    if (fj.is_object() && (fj.contains("poly_order") || fj.contains("trig"))) {
        const int sigma = fj.value("poly_order", 0);
        double omega = 0.0;
        int harmonics = 0;
        if (fj.contains("trig")) {
            omega = fj["trig"].value("omega", 0.0);
            harmonics = fj["trig"].value("harmonics", 0);
        }
        f = poly_trig_family(sigma, omega, harmonics);
    } else {
        f = basis_fn_list(fj, field + ".f");
    }
    return make_interval_basis(lo, hi, std::move(phi), std::move(varphi), std::move(f));
}

inline json interval_basis_to_json(const IntervalBasis& b) {
    json j;
    json phi = json::array(), varphi = json::array(), f = json::array();
    for (const auto& fn : b.phi) phi.push_back(basis_fn_to_json(fn));
    for (const auto& fn : b.varphi) varphi.push_back(basis_fn_to_json(fn));
    for (const auto& fn : b.f) f.push_back(basis_fn_to_json(fn));
    j["phi"] = phi;
    j["varphi"] = varphi;
    // Round-trips through the explicit form so user-supplied closure tables
    // survive save/load unchanged.
    j["f_explicit"] = {{"functions", f}, {"closure", mat_to_json(b.M)}};
    return j;
}

inline std::vector<KernelTerm> kernel_terms_from_json(const json& j, const std::string& field) {
    std::vector<KernelTerm> out;
    if (j.is_null()) return out;
    if (!j.is_array()) throw ParseError(field + ": expected an array of kernel terms");
    for (size_t i = 0; i < j.size(); ++i) {
        const auto& t = j[i];
        if (!t.contains("basis_index") || !t.contains("coefficient"))
            throw ParseError(field + "[" + std::to_string(i) +
                             "]: needs basis_index and coefficient");
        KernelTerm kt;
        kt.basis_index = t["basis_index"].get<int>();
        kt.coefficient = mat_from_json(t["coefficient"],
                                       field + "[" + std::to_string(i) + "].coefficient");
        out.push_back(std::move(kt));
    }
    return out;
}

inline json kernel_terms_to_json(const std::vector<KernelTerm>& terms) {
    json out = json::array();
    for (const auto& t : terms)
        out.push_back({{"basis_index", t.basis_index}, {"coefficient", mat_to_json(t.coefficient)}});
    return out;
}

}  // namespace io_detail

inline nlohmann::json system_to_json(const DelaySystem& sys) {
    using nlohmann::json;
    using namespace io_detail;
    json j;
    j["dimensions"] = {{"n", sys.dims.n}, {"m", sys.dims.m}, {"p", sys.dims.p}, {"q", sys.dims.q}};
    j["delays"] = sys.delays.r;
    auto dump_list = [](const std::vector<Mat>& ms) {
        json out = json::array();
        for (const auto& m : ms) out.push_back(mat_to_json(m));
        return out;
    };
    j["A"] = dump_list(sys.A);
    j["B"] = dump_list(sys.B);
    j["C"] = dump_list(sys.C);
    j["Bfrak"] = dump_list(sys.Bfrak);
    j["D1"] = mat_to_json(sys.D1);
    j["D2"] = mat_to_json(sys.D2);
    json basis = json::array();
    for (const auto& b : sys.basis) basis.push_back(interval_basis_to_json(b));
    j["basis"] = basis;
    json kernels = json::array();
    for (const auto& k : sys.dd_kernels)
        kernels.push_back({{"Atilde", kernel_terms_to_json(k.A)},
                           {"Btilde", kernel_terms_to_json(k.B)},
                           {"Ctilde", kernel_terms_to_json(k.C)},
                           {"Bfraktilde", kernel_terms_to_json(k.Bfrak)}});
    j["dd_kernels"] = kernels;
    if (sys.supply.mode == SupplyMode::L2GainMin) {
        j["supply_rate"] = {{"mode", "l2gain"}};
    } else {
        j["supply_rate"] = {{"J1", mat_to_json(sys.supply.J1)},
                            {"Jtilde", mat_to_json(sys.supply.Jtilde)},
                            {"J2", mat_to_json(sys.supply.J2)},
                            {"J3", mat_to_json(sys.supply.J3)}};
    }
    return j;
}

inline DelaySystem system_from_json(const nlohmann::json& j) {
    using namespace io_detail;
    DelaySystem sys;
    if (!j.contains("dimensions")) throw ParseError("dimensions: missing");
    const auto& dj = j["dimensions"];
    sys.dims.n = dj.value("n", 0);
    sys.dims.m = dj.value("m", 0);
    sys.dims.p = dj.value("p", 0);
    sys.dims.q = dj.value("q", 0);
    if (!j.contains("delays") || !j["delays"].is_array())
        throw ParseError("delays: missing or not an array");
    sys.delays.r = j["delays"].get<std::vector<double>>();
    sys.dims.nu = static_cast<int>(sys.delays.r.size());
    double prev = 0.0;
    for (double r : sys.delays.r) {
        if (!(r > prev)) throw ParseError("delays: must be strictly increasing and positive");
        prev = r;
    }

    auto load_list = [&j](const char* name) {
        if (!j.contains(name)) throw ParseError(std::string(name) + ": missing");
        std::vector<Mat> out;
        for (size_t i = 0; i < j[name].size(); ++i)
            out.push_back(mat_from_json(j[name][i], std::string(name) + "[" + std::to_string(i) + "]"));
        return out;
    };
    sys.A = load_list("A");
    sys.B = load_list("B");
    sys.C = load_list("C");
    sys.Bfrak = load_list("Bfrak");
    sys.D1 = mat_from_json(j.at("D1"), "D1");
    sys.D2 = mat_from_json(j.at("D2"), "D2");

    if (!j.contains("basis") || !j["basis"].is_array() ||
        static_cast<int>(j["basis"].size()) != sys.dims.nu)
        throw ParseError("basis: need one entry per delay interval");
    for (int i = 1; i <= sys.dims.nu; ++i) {
        const auto [lo, hi] = sys.delays.interval(i);
        sys.basis.push_back(interval_basis_from_json(j["basis"][static_cast<size_t>(i - 1)], lo,
                                                     hi, "basis[" + std::to_string(i - 1) + "]"));
    }

    if (!j.contains("dd_kernels") || !j["dd_kernels"].is_array() ||
        static_cast<int>(j["dd_kernels"].size()) != sys.dims.nu)
        throw ParseError("dd_kernels: need one entry per delay interval");
    for (int i = 0; i < sys.dims.nu; ++i) {
        const auto& kj = j["dd_kernels"][static_cast<size_t>(i)];
        const std::string tag = "dd_kernels[" + std::to_string(i) + "]";
        DdKernels k;
        k.A = kernel_terms_from_json(kj.value("Atilde", nlohmann::json()), tag + ".Atilde");
        k.B = kernel_terms_from_json(kj.value("Btilde", nlohmann::json()), tag + ".Btilde");
        k.C = kernel_terms_from_json(kj.value("Ctilde", nlohmann::json()), tag + ".Ctilde");
        k.Bfrak =
            kernel_terms_from_json(kj.value("Bfraktilde", nlohmann::json()), tag + ".Bfraktilde");
        sys.dd_kernels.push_back(std::move(k));
    }

    if (j.contains("supply_rate")) {
        const auto& sj = j["supply_rate"];
        if (sj.contains("mode")) {
            const std::string mode = sj["mode"].get<std::string>();
            if (mode != "l2gain") throw ParseError("supply_rate.mode: unknown mode \"" + mode + "\"");
            sys.supply.mode = SupplyMode::L2GainMin;
        } else {
            sys.supply.mode = SupplyMode::Explicit;
            sys.supply.J1 = mat_from_json(sj.at("J1"), "supply_rate.J1");
            sys.supply.Jtilde = mat_from_json(sj.at("Jtilde"), "supply_rate.Jtilde");
            sys.supply.J2 = mat_from_json(sj.at("J2"), "supply_rate.J2");
            sys.supply.J3 = mat_from_json(sj.at("J3"), "supply_rate.J3");
        }
    } else {
        sys.supply.mode = SupplyMode::L2GainMin;
    }

    auto violations = validate_system(sys);
    if (!violations.empty())
        throw ParseError("system file invalid: " + violations.front().code + " (" +
                         violations.front().detail + ")");
    return sys;
}

inline void save_system(const DelaySystem& sys, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ParseError("cannot open " + path + " for writing");
    out << system_to_json(sys).dump(2) << "\n";
}

inline DelaySystem load_system(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("JSON syntax error: ") + e.what());
    }
    return system_from_json(j);
}

}  // namespace ksd
