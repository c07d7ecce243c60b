// Command-line front end: parse spec files, dispatch to the library, emit
// JSON reports and CSV sweep tables. Exit codes: 0 = success and all checks
// pass, 1 = checks failed (report still written), 2 = input/usage errors.

#include <atomic>
#include <iostream>
#include <mutex>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "scaffold/io.hpp"
#include "scaffold/random_towers.hpp"

using namespace scaffold;

namespace {

void emit(const json& report, const std::string& out_path) {
    std::string text = report.dump(2) + "\n";
    if (out_path.empty())
        std::cout << text;
    else
        write_text_file(out_path, text);
}

void emit_text(const std::string& text, const std::string& out_path) {
    if (out_path.empty())
        std::cout << text;
    else
        write_text_file(out_path, text);
}

/// One-line human summary: stdout when the report went to a file, stderr
/// when the report occupies stdout.
void summarize(const std::string& out_path, const std::string& line) {
    (out_path.empty() ? std::cerr : std::cout) << line << "\n";
}

ExtInt parse_extint(const std::string& s) {
    if (s == "inf") return ExtInt::infinity();
    return ExtInt(std::stoll(s));
}

/// Deterministic parallel map: results are collected by index regardless of
/// the number of workers.
template <typename Fn>
std::vector<std::string> parallel_rows(long long count, int jobs, Fn&& fn) {
    std::vector<std::string> rows(static_cast<size_t>(count));
    if (jobs <= 1) {
        for (long long i = 0; i < count; ++i) rows[static_cast<size_t>(i)] = fn(i);
        return rows;
    }
    std::atomic<long long> next{0};
    std::vector<std::thread> pool;
    for (int w = 0; w < jobs; ++w)
        pool.emplace_back([&] {
            for (;;) {
                long long i = next.fetch_add(1);
                if (i >= count) return;
                rows[static_cast<size_t>(i)] = fn(i);
            }
        });
    for (auto& th : pool) th.join();
    return rows;
}

int run_analyze(const std::string& input, long long T, long long h,
                const std::string& out) {
    RamProfile prof = profile_from_json(load_json_file(input));
    auto rep = check_assumptions(prof, nullptr, T);
    json doc = profile_report_json(prof, rep);
    doc["tolerance"] = tolerance_to_json(tolerance_elem_ab(prof));
    json fam = json::object();
    if (prof.n == 1)
        fam["degree_p"] = tolerance_to_json(
            tolerance_degree_p(prof.p, prof.v0p, prof.upper[0]));
    if (prof.p == 2 && prof.n == 2 && prof.v0p.is_finite())
        fam["biquadratic"] = tolerance_to_json(
            tolerance_biquadratic(prof.lower[0], prof.lower[1], prof.v0p));
    bool weakly = true;
    for (long long b : prof.lower) weakly = weakly && b == 1;
    if (weakly)
        fam["weakly_ramified"] =
            tolerance_to_json(tolerance_weakly_ramified(prof.p, prof.n, prof.v0p));
    bool single = true;
    for (long long b : prof.lower) single = single && b == prof.lower[0];
    if (single && prof.lower[0] % prof.p != 0) {
        try {
            fam["abrashkin"] = tolerance_to_json(
                tolerance_abrashkin(prof.p, prof.n, prof.v0p, prof.lower[0]));
        } catch (const FamilyPreconditionViolation&) {
        }
    }
    doc["family_tolerances"] = fam;
    json verdicts = json::array();
    auto push_verdict = [&verdicts](const std::string& criterion, auto&& fn) {
        try {
            verdicts.push_back(verdict_to_json(fn()));
        } catch (const FamilyPreconditionViolation& e) {
            Verdict v;
            v.status = FreeStatus::OutOfScope;
            v.criterion = criterion;
            v.detail = e.what();
            verdicts.push_back(verdict_to_json(v));
        }
    };
    if (prof.p == 2 && prof.n == 2 && prof.v0p.is_finite()) {
        push_verdict("martel", [&] {
            return freeness_martel(prof.lower[0], prof.lower[1], prof.v0p.value());
        });
        push_verdict("biquadratic_ideal", [&] {
            return freeness_biquadratic_ideal(prof.lower[0], prof.lower[1], h,
                                              prof.v0p.value());
        });
    }
    if (weakly)
        push_verdict("weak_ideal",
                     [&] { return freeness_weak_ideal(prof.p, prof.n, prof.v0p, h); });
    if (single)
        push_verdict("abrashkin", [&] {
            return freeness_abrashkin(prof.p, prof.n, prof.v0p, prof.lower[0]);
        });
    doc["verdicts"] = verdicts;
    emit(doc, out);
    std::ostringstream line;
    line << "analyze: assumptions a1=" << rep.a1 << " a2=" << rep.a2
         << " a4=" << rep.a4 << " a6=" << rep.a6;
    summarize(out, line.str());
    return 0;
}

int run_build(const std::string& input, const std::string& out) {
    TowerSpec sp = towerspec_from_json(load_json_file(input));
    Tower tw(sp);
    json doc = tower_report_json(tw);
    bool breaks_ok = doc["bruteforce_breaks"] == doc["breaks_lower"];
    doc["bruteforce_matches"] = breaks_ok;
    emit(doc, out);
    summarize(out, "build: b = " + json(tw.lower_breaks()).dump() + " bruteforce " +
                       (breaks_ok ? "matches" : "MISMATCH"));
    return breaks_ok ? 0 : 1;
}

int run_scaffold(const std::string& input, const std::string& mode, long long T,
                 long long gap, const std::string& out) {
    TowerSpec sp = towerspec_from_json(load_json_file(input));
    Tower tw(sp);
    Scaffold sc = theta_psi_build(tw);
    json doc;
    bool ok = true;
    if (gap > 0) {
        auto rep = perturb_and_verify(tw, gap);
        doc = perturb_report_json(rep);
        ok = rep.passed();
    } else if (mode == "exact") {
        auto rep = verify_scaffold_exact(sc);
        doc = verify_report_json(rep);
        ok = rep.passed();
    } else if (mode == "tolerance") {
        auto rep = verify_scaffold_tolerance(sc, T);
        doc = verify_report_json(rep);
        ok = rep.passed();
    } else {
        std::cerr << "unknown mode: " << mode << "\n";
        return 2;
    }
    emit(doc, out);
    summarize(out, std::string("scaffold: ") + (ok ? "all cases pass" : "FAILURES"));
    return ok ? 0 : 1;
}

int run_freeness(const std::string& family, long long p, int n, const std::string& v0p,
                 long long b1, long long b2, long long h, long long u,
                 const std::string& out) {
    ExtInt v = parse_extint(v0p);
    Verdict verdict;
    if (family == "martel") {
        if (!v.is_finite()) throw FamilyPreconditionViolation("martel needs finite v0p");
        verdict = freeness_martel(b1, b2, v.value());
    } else if (family == "biquadratic_ideal") {
        if (!v.is_finite())
            throw FamilyPreconditionViolation("biquadratic needs finite v0p");
        verdict = freeness_biquadratic_ideal(b1, b2, h, v.value());
    } else if (family == "weak_ideal") {
        verdict = freeness_weak_ideal(p, n, v, h);
    } else if (family == "abrashkin") {
        verdict = freeness_abrashkin(p, n, v, u);
    } else {
        std::cerr << "unknown family: " << family << "\n";
        return 2;
    }
    emit(verdict_to_json(verdict), out);
    summarize(out, std::string("freeness: ") + to_string(verdict.status));
    return 0;
}

int run_hopf(const std::string& input, const std::vector<long long>& M, long long p,
             int n, const std::string& vKp, const std::string& char_mode, bool strict,
             const std::string& out) {
    json doc;
    bool ok = true;
    if (!input.empty()) {
        TowerSpec sp = towerspec_from_json(load_json_file(input));
        Tower tw(sp);
        Scaffold sc = theta_psi_build(tw);
        auto desc = hopf_generators(sc);
        auto rep = verify_hopf(tw, desc);
        doc = hopf_desc_json(desc);
        doc["verification"] = hopf_verify_json(rep);
        ok = rep.passed();
    } else {
        HopfParams hp;
        hp.p = p;
        hp.n = n;
        hp.M = M;
        hp.strict = strict;
        hp.char_mode = char_mode == "0" ? CharMode::char_0 : CharMode::char_p;
        hp.vKp = parse_extint(vKp);
        auto validation = validate_M(hp);
        if (validation.valid(hp.strict)) {
            auto desc = hopf_generators(hp);
            doc = hopf_desc_json(desc);
        } else {
            HopfOrderDescription d;
            d.p = p;
            d.n = n;
            d.M = M;
            d.validation = validation;
            doc = hopf_desc_json(d);
            ok = false;
        }
        doc["valid"] = validation.valid(hp.strict);
    }
    emit(doc, out);
    summarize(out, std::string("hopf: ") + (ok ? "ok" : "CHECKS FAILED"));
    return ok ? 0 : 1;
}

int run_sweep(const std::string& family, long long v0p, long long bmax, long long count,
              long long seed, long long p, int n, int jobs, const std::string& out) {
    std::ostringstream csv;
    bool ok = true;
    if (family == "biquadratic") {
        csv << "b,h,L1,L2\n";
        for (const auto& g : biquadratic_gate_table())
            csv << g.b << "," << g.h << "," << g.L1 << "," << g.L2 << "\n";
    } else if (family == "biquadratic_grid") {
        csv << "b1,b2,h,v02,verdict,martel,agree\n";
        struct Cell {
            long long b1, b2, h;
        };
        std::vector<Cell> cells;
        for (long long b1 = 1; b1 <= bmax; b1 += 2)
            for (long long b2 = b1; b2 <= bmax; b2 += 4)
                for (long long h = 0; h < 4; ++h) cells.push_back({b1, b2, h});
        auto rows = parallel_rows(
            static_cast<long long>(cells.size()), jobs, [&](long long idx) {
                const Cell& c = cells[static_cast<size_t>(idx)];
                auto v = freeness_biquadratic_ideal(c.b1, c.b2, c.h, v0p);
                std::string martel = "-", agree = "-";
                if (c.h == 0 && 2 * c.b1 + c.b2 <= 6 * v0p - 3) {
                    auto mv = freeness_martel(c.b1, c.b2, v0p);
                    martel = to_string(mv.status);
                    if (v.status == FreeStatus::Undetermined)
                        agree = "undetermined";
                    else
                        agree = v.status == mv.status ? "yes" : "NO";
                }
                std::ostringstream row;
                row << c.b1 << "," << c.b2 << "," << c.h << "," << v0p << ","
                    << to_string(v.status) << "," << martel << "," << agree << "\n";
                return row.str();
            });
        for (auto& r : rows) csv << r;
    } else if (family == "weakly_ramified") {
        csv << "p,n,v0p,tolerance\n";
        for (long long pp : {2LL, 3LL, 5LL})
            for (int nn = 1; nn <= 3; ++nn)
                for (long long v = 1; v <= v0p; ++v) {
                    auto t = tolerance_weakly_ramified(pp, nn, v);
                    csv << pp << "," << nn << "," << v << ","
                        << (t.available ? t.value.str() : "none") << "\n";
                }
    } else if (family == "scaffold_random") {
        csv << "index,p,n,d,breaks,cases,failed,bruteforce_ok\n";
        std::atomic<bool> all_ok{true};
        auto rows = parallel_rows(count, jobs, [&](long long idx) {
            std::mt19937_64 rng(static_cast<unsigned long long>(seed) + idx);
            RandomTowerOptions opt;
            opt.p = p;
            opt.n = n;
            TowerSpec sp = random_admissible_spec(opt, rng);
            Tower tw(sp);
            Scaffold sc = theta_psi_build(tw);
            auto rep = verify_scaffold_exact(sc);
            bool bf = tw.ramification_bruteforce() == tw.lower_breaks();
            if (!rep.passed() || !bf) all_ok = false;
            std::ostringstream row;
            row << idx << "," << p << "," << n << "," << sp.d << ",\"";
            for (size_t i = 0; i < tw.lower_breaks().size(); ++i)
                row << (i ? " " : "") << tw.lower_breaks()[i];
            row << "\"," << rep.cases_total << "," << rep.cases_failed << ","
                << (bf ? "yes" : "NO") << "\n";
            return row.str();
        });
        for (auto& r : rows) csv << r;
        ok = all_ok;
    } else {
        std::cerr << "unknown sweep family: " << family << "\n";
        return 2;
    }
    emit_text(csv.str(), out);
    summarize(out, "sweep: " + family + (ok ? " done" : " FAILURES"));
    return ok ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Exact-arithmetic verification of Galois scaffolds on "
                 "Artin-Schreier towers and the associated numeric criteria"};
    app.require_subcommand(1);

    std::string input, out, mode = "exact", family, v0p = "inf", vKp = "inf";
    std::string char_mode = "p";
    long long T = 1, h = 0, gap = 0, b1 = 1, b2 = 1, u = 1, p = 2;
    long long v0p_int = 3, bmax = 9, count = 10, seed = 1;
    int n = 2, jobs = 1;
    bool strict = true;
    std::vector<long long> M;

    auto* analyze = app.add_subcommand("analyze", "numeric profile report");
    analyze->add_option("input", input, "profile JSON file")->required();
    analyze->add_option("--tolerance", T, "tolerance for the assumption table");
    analyze->add_option("--ideal", h, "ideal index h for verdicts");
    analyze->add_option("--out", out, "output path (default stdout)");

    auto* build = app.add_subcommand("build", "build a tower and report its data");
    build->add_option("input", input, "tower spec JSON file")->required();
    build->add_option("--out", out, "output path");

    auto* scaf = app.add_subcommand("scaffold", "verify scaffold identities");
    scaf->add_option("input", input, "tower spec JSON file")->required();
    scaf->add_option("--mode", mode, "exact | tolerance");
    scaf->add_option("--tolerance", T, "tolerance for tolerance mode");
    scaf->add_option("--perturb-gap", gap, "run the perturbation harness at this gap");
    scaf->add_option("--out", out, "output path");

    auto* frees = app.add_subcommand("freeness", "freeness verdict for a family");
    frees->add_option("--family", family, "martel | biquadratic_ideal | weak_ideal | abrashkin")
        ->required();
    frees->add_option("--p", p, "prime");
    frees->add_option("--n", n, "tower height");
    frees->add_option("--v0p", v0p, "v_0(p), integer or inf");
    frees->add_option("--b1", b1, "first lower break");
    frees->add_option("--b2", b2, "second lower break");
    frees->add_option("--ideal", h, "ideal index h");
    frees->add_option("--u", u, "single break (abrashkin)");
    frees->add_option("--out", out, "output path");

    auto* hopf = app.add_subcommand("hopf", "Hopf order construction/verification");
    hopf->add_option("input", input, "tower spec JSON (concrete mode)");
    hopf->add_option("--M", M, "parameter list M_1..M_n (symbolic mode)");
    hopf->add_option("--p", p, "prime");
    hopf->add_option("--n", n, "rank");
    hopf->add_option("--vKp", vKp, "v_K(p), integer or inf");
    hopf->add_option("--char", char_mode, "p | 0");
    hopf->add_flag("--strict,!--no-strict", strict, "example-specific conditions");
    hopf->add_option("--out", out, "output path");

    auto* sweep = app.add_subcommand("sweep", "grid sweeps as CSV");
    sweep->add_option("--family", family,
                      "biquadratic | biquadratic_grid | weakly_ramified | scaffold_random")
        ->required();
    sweep->add_option("--v0p", v0p_int, "v_0(p) for grids");
    sweep->add_option("--bmax", bmax, "break bound for grids");
    sweep->add_option("--count", count, "instances for scaffold_random");
    sweep->add_option("--seed", seed, "random seed");
    sweep->add_option("--p", p, "prime for scaffold_random");
    sweep->add_option("--n", n, "height for scaffold_random");
    sweep->add_option("--jobs", jobs, "parallel workers over independent cases");
    sweep->add_option("--out", out, "output path");

    CLI11_PARSE(app, argc, argv);

    try {
        if (app.got_subcommand(analyze)) return run_analyze(input, T, h, out);
        if (app.got_subcommand(build)) return run_build(input, out);
        if (app.got_subcommand(scaf)) return run_scaffold(input, mode, T, gap, out);
        if (app.got_subcommand(frees))
            return run_freeness(family, p, n, v0p, b1, b2, h, u, out);
        if (app.got_subcommand(hopf))
            return run_hopf(input, M, p, n, vKp, char_mode, strict, out);
        if (app.got_subcommand(sweep))
            return run_sweep(family, v0p_int, bmax, count, seed, p, n, jobs, out);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
