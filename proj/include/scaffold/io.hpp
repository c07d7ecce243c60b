#ifndef SCAFFOLD_IO_HPP
#define SCAFFOLD_IO_HPP

#include <fstream>
#include <string>

#include <json.hpp>

#include "scaffold/hopf.hpp"
#include "scaffold/ramification.hpp"
#include "scaffold/scaffold.hpp"
#include "scaffold/tower.hpp"

namespace scaffold {

using json = nlohmann::json;

inline json extint_to_json(const ExtInt& v) {
    if (v.is_infinite()) return json("inf");
    return json(v.value());
}

inline ExtInt extint_from_json(const json& j) {
    if (j.is_string()) {
        if (j.get<std::string>() == "inf") return ExtInt::infinity();
        throw Error("expected integer or \"inf\"");
    }
    return ExtInt(j.get<long long>());
}

/// Series literal: {"terms": [[exponent, [c_0..c_{d-1}]], ...], "prec": P}.
/// prec null or absent means the element is exactly the finite sum given.
inline json series_to_json(const Series& s) {
    json terms = json::array();
    for (const auto& [e, c] : s.terms()) {
        json coeff = json::array();
        for (auto x : c) coeff.push_back(x);
        terms.push_back(json::array({e, coeff}));
    }
    json out;
    out["terms"] = terms;
    out["prec"] = s.is_exact() ? json(nullptr) : json(s.prec_raw());
    return out;
}

inline Series series_from_json(const Fq& f, const json& j) {
    if (!j.is_object() || !j.contains("terms"))
        throw Error("series literal must be an object with a terms array");
    long long prec = kPrecInf;
    if (j.contains("prec") && !j["prec"].is_null()) prec = j["prec"].get<long long>();
    std::vector<std::pair<long long, FqElem>> terms;
    for (const auto& t : j["terms"]) {
        long long e = t.at(0).get<long long>();
        std::vector<long long> c = t.at(1).get<std::vector<long long>>();
        terms.emplace_back(e, f.from_coeffs(c));
    }
    return Series::from_terms(f, terms, prec);
}

/// Tower spec file: {"p":, "d":, "n":, "prec":, "beta":, "omegas": [...],
/// "epsilons": [...]}.
inline json towerspec_to_json(const TowerSpec& sp) {
    json out;
    out["p"] = sp.p;
    out["d"] = sp.d;
    out["n"] = sp.n;
    out["prec"] = sp.rel_prec;
    out["beta"] = series_to_json(sp.beta);
    out["omegas"] = json::array();
    for (const auto& w : sp.omegas) out["omegas"].push_back(series_to_json(w));
    out["epsilons"] = json::array();
    for (const auto& e : sp.epsilons) out["epsilons"].push_back(series_to_json(e));
    return out;
}

inline TowerSpec towerspec_from_json(const json& j) {
    TowerSpec sp;
    sp.p = j.at("p").get<long long>();
    sp.d = j.at("d").get<int>();
    sp.n = j.at("n").get<int>();
    if (j.contains("prec") && !j["prec"].is_null())
        sp.rel_prec = j["prec"].get<long long>();
    const Fq& f = Fq::make(sp.p, sp.d);
    sp.beta = series_from_json(f, j.at("beta"));
    for (const auto& w : j.at("omegas")) sp.omegas.push_back(series_from_json(f, w));
    for (const auto& e : j.at("epsilons")) sp.epsilons.push_back(series_from_json(f, e));
    return sp;
}

inline json tower_report_json(const Tower& tw) {
    json out;
    out["breaks_lower"] = tw.lower_breaks();
    out["breaks_upper"] = tw.upper_breaks();
    out["m"] = tw.m();
    json wv = json::array();
    for (const auto& w : tw.spec().omegas) wv.push_back(extint_to_json(w.valuation()));
    out["omega_valuations"] = wv;
    json mv = json::array();
    for (int i = 1; i <= tw.n(); ++i)
        for (int j = i + 1; j <= tw.n(); ++j)
            mv.push_back(json::array(
                {i, j, extint_to_json(tw.mu(i, j).valuation())}));
    out["mu_valuations"] = mv;
    out["bruteforce_breaks"] = tw.ramification_bruteforce();
    out["checks"] = {{"a1", tw.checks().a1},
                     {"a2", tw.checks().a2},
                     {"a4", tw.checks().a4},
                     {"a5", tw.checks().a5}};
    return out;
}

inline json verify_report_json(const VerifyReport& rep) {
    json out;
    out["mode"] = rep.mode;
    out["criterion"] = rep.criterion;
    out["tolerance"] = extint_to_json(rep.tolerance);
    out["cases_total"] = rep.cases_total;
    out["cases_failed"] = rep.cases_failed;
    out["zero_margin"] = extint_to_json(rep.margin);
    json fails = json::array();
    for (const auto& f : rep.failures)
        fails.push_back({{"i", f.i},
                         {"j", f.j},
                         {"a", f.a},
                         {"expected_valuation", extint_to_json(f.expected_valuation)},
                         {"observed_valuation", extint_to_json(f.observed_valuation)}});
    out["failures"] = fails;
    return out;
}

inline json perturb_report_json(const PerturbReport& rep) {
    json out;
    out["gap"] = rep.gap;
    json etas = json::array();
    for (const auto& [i, j, e] : rep.eta_valuations)
        etas.push_back(json::array({i, j, e}));
    out["eta_valuations"] = etas;
    out["at_gap"] = verify_report_json(rep.at_gap);
    out["at_next_gap"] = verify_report_json(rep.at_next);
    out["passed"] = rep.passed();
    return out;
}

/// Numeric profile: {"p":, "n":, "char": "p"|"0", "v0p": int|"inf",
/// "lower": [...] | "upper": [...] | "jumps": {"b1":, "m": [...]}}.
inline RamProfile profile_from_json(const json& j) {
    long long p = j.at("p").get<long long>();
    int n = j.at("n").get<int>();
    CharMode mode = CharMode::char_0;
    if (j.contains("char") && j["char"].get<std::string>() == "p")
        mode = CharMode::char_p;
    ExtInt v0p = ExtInt::infinity();
    if (j.contains("v0p")) v0p = extint_from_json(j["v0p"]);
    else if (mode == CharMode::char_0)
        throw Error("characteristic-0 profile needs v0p");
    if (mode == CharMode::char_0 && v0p.is_finite() && v0p.value() < 1)
        throw Error("v0p must be >= 1 in characteristic 0");
    if (j.contains("lower"))
        return profile_from_lower(p, n, mode, v0p, j["lower"].get<std::vector<long long>>());
    if (j.contains("upper"))
        return profile_from_upper(p, n, mode, v0p, j["upper"].get<std::vector<long long>>());
    if (j.contains("jumps"))
        return profile_from_jumps(p, n, mode, v0p, j["jumps"].at("b1").get<long long>(),
                                  j["jumps"].at("m").get<std::vector<long long>>());
    throw Error("profile needs one of: lower, upper, jumps");
}

inline json rational_to_json(const Rational& r) {
    if (r.denominator() == 1) return json(r.numerator());
    return json(std::to_string(r.numerator()) + "/" + std::to_string(r.denominator()));
}

inline json profile_report_json(const RamProfile& r, const AssumptionsReport& rep) {
    json out;
    out["p"] = r.p;
    out["n"] = r.n;
    out["char"] = r.char_mode == CharMode::char_p ? "p" : "0";
    out["v0p"] = extint_to_json(r.v0p);
    out["breaks"] = {{"lower", r.lower}, {"upper", r.upper}};
    if (r.jumps) out["breaks"]["m"] = *r.jumps;
    json cs = json::array();
    for (const auto& c : r.C) cs.push_back(rational_to_json(c));
    out["C"] = cs;
    json a;
    a["a1"] = rep.a1;
    a["a2"] = rep.a2;
    a["a4"] = rep.a4;
    if (rep.a5) a["a5"] = *rep.a5;
    a["a6"] = rep.a6;
    a["tolerance_used"] = rep.tolerance_used;
    json gaps = json::array();
    for (const auto& [i, j, g] : rep.a3_gap) gaps.push_back(json::array({i, j, g}));
    a["a3_required_gap"] = gaps;
    out["assumptions"] = a;
    return out;
}

inline json tolerance_to_json(const ToleranceResult& t) {
    json out;
    out["criterion"] = t.criterion;
    out["available"] = t.available;
    if (t.available)
        out["value"] = extint_to_json(t.value);
    else
        out["reason"] = t.reason;
    return out;
}

inline json verdict_to_json(const Verdict& v) {
    return {{"status", to_string(v.status)},
            {"criterion", v.criterion},
            {"detail", v.detail}};
}

inline json hopf_desc_json(const HopfOrderDescription& d) {
    json out;
    out["p"] = d.p;
    out["n"] = d.n;
    out["M"] = d.M;
    out["derived_b"] = d.validation.derived_b;
    json dm = json::array();
    for (const auto& m : d.validation.derived_m) dm.push_back(rational_to_json(m));
    json cons;
    cons["m_inequality"] = d.validation.m_inequality;
    cons["m_congruence"] = d.validation.m_congruence;
    cons["m_nonnegative"] = d.validation.m_nonnegative;
    cons["derived_m"] = dm;
    if (d.validation.char0_bound_M) {
        cons["char0_bound_M_form"] = *d.validation.char0_bound_M;
        cons["char0_bound_m_form"] = *d.validation.char0_bound_m;
    }
    cons["strict_ok"] = d.validation.strict_ok;
    out["constraints"] = cons;
    json gens = json::array();
    for (const auto& g : d.generators) gens.push_back(g.symbolic);
    out["generators"] = gens;
    json mus = json::array();
    for (const auto& [i, j, v] : d.mu_valuations) mus.push_back(json::array({i, j, v}));
    out["mu_valuations"] = mus;
    if (d.intertwining_ok) out["intertwining_ok"] = *d.intertwining_ok;
    return out;
}

inline json hopf_verify_json(const HopfVerifyReport& rep) {
    json out;
    out["stabilization"] = rep.stabilization;
    out["freeness"] = rep.freeness;
    json sw = json::array();
    for (const auto& w : rep.stabilization_witnesses)
        sw.push_back({{"generator", w.gen_i},
                      {"t", w.t},
                      {"basis_index", w.basis_index},
                      {"coeff_valuation", w.coeff_valuation}});
    out["stabilization_witnesses"] = sw;
    json fw = json::array();
    for (const auto& w : rep.freeness_witnesses)
        fw.push_back({{"exponents", w.exponents},
                      {"expected", w.expected},
                      {"observed", extint_to_json(w.observed)}});
    out["freeness_witnesses"] = fw;
    return out;
}

inline json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open " + path);
    json j;
    in >> j;
    return j;
}

inline void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write " + path);
    out << text;
}

} // namespace scaffold

#endif
