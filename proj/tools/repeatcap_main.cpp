#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "repeatcap/bounds.hpp"
#include "repeatcap/kktcheck.hpp"
#include "repeatcap/simchannel.hpp"
#include "repeatcap/tables.hpp"

namespace {

using namespace repeatcap;
using bounds::Method;
using dists::DistKind;

double env_or(const char* name, double fallback) {
    const char* v = std::getenv(name);
    return v ? std::atof(v) : fallback;
}

// Precedence: flags > REPEATCAP_TOL_* environment > built-in defaults.
Tolerances base_tolerances() {
    Tolerances t;
    t.tail_rel = env_or("REPEATCAP_TOL_TAIL_REL", t.tail_rel);
    t.quad_abs = env_or("REPEATCAP_TOL_QUAD_ABS", t.quad_abs);
    t.q_tol = env_or("REPEATCAP_TOL_Q", t.q_tol);
    t.kkt_tol = env_or("REPEATCAP_TOL_KKT", t.kkt_tol);
    return t;
}

void add_tol_flags(CLI::App* cmd, Tolerances& tol) {
    cmd->add_option("--tol-tail-rel", tol.tail_rel, "series tail tolerance");
    cmd->add_option("--tol-quad-abs", tol.quad_abs, "quadrature tolerance");
    cmd->add_option("--tol-q", tol.q_tol, "maximizer tolerance in q");
    cmd->add_option("--tol-kkt", tol.kkt_tol, "dual-feasibility slack");
}

DistKind parse_dist(const std::string& s) {
    if (s == "poi-log" || s == "poilog") return DistKind::PoiLog;
    if (s == "poi-digamma" || s == "digamma") return DistKind::PoiDigamma;
    if (s == "inv-bin" || s == "invbin") return DistKind::InvBin;
    if (s == "bin-trunc" || s == "bintrunc" || s == "trunc") return DistKind::BinTrunc;
    if (s == "neg-bin" || s == "negbin") return DistKind::NegBin;
    if (s == "geometric") return DistKind::Geometric;
    throw CLI::ValidationError("--dist", "unknown distribution '" + s + "'");
}

void write_output(const std::string& path, const std::string& content) {
    if (path == "-") {
        std::cout << content;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open output file: " + path);
    out << content;
}

int run_bound(const std::string& channel, double d, const std::string& method,
              const std::string& dist_override, const std::string& units,
              const Tolerances& tol) {
    const bool deletion = channel == "deletion";
    const bool bits = units == "bits";
    auto print = [&](const bounds::BoundResult& r) {
        const double v = bits ? r.value_bits : r.value_nats;
        std::printf("%.6f %s  q*=%.6f  method=%s dist=%s d=%.6g%s\n", v,
                    bits ? "bits" : "nats", r.q_star, bounds::to_string(r.method).c_str(),
                    dists::to_string(r.dist).c_str(), r.d,
                    r.conditional ? " (conditional)" : "");
    };
    if (method == "explicit") {
        if (!deletion) throw CLI::ValidationError("--method", "explicit requires --channel deletion");
        const auto [vbits, conditional] = bounds::explicit_bound(d);
        std::printf("%.6f %s (%s)\n", bits ? vbits : vbits * 0.69314718055994530942,
                    bits ? "bits" : "nats", conditional ? "conditional" : "unconditional");
        return 0;
    }
    if (method == "lerch" || method == "elementary") {
        const Method m = method == "lerch" ? Method::Lerch : Method::Elementary;
        print(deletion ? bounds::deletion_bound_estimate(d, m, tol)
                       : bounds::poisson_repeat_bound_estimate(d, m, tol));
        return 0;
    }
    DistKind kind;
    if (!dist_override.empty()) {
        kind = parse_dist(dist_override);
    } else if (method == "trunc") {
        kind = deletion ? DistKind::BinTrunc : DistKind::PoiDigamma;
    } else {  // exact-dist default
        kind = deletion ? DistKind::BinTrunc : DistKind::PoiDigamma;
    }
    print(deletion ? bounds::deletion_bound(d, kind, tol)
                   : bounds::poisson_repeat_bound(d, kind, tol));
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Capacity upper bounds for binary repeat channels"};
    app.require_subcommand(1);
    Tolerances tol = base_tolerances();

    // ---- bound ----
    auto* bound = app.add_subcommand("bound", "single capacity upper bound");
    std::string channel = "deletion", method = "exact-dist", dist_override, units = "bits";
    double d = 0.5;
    bound->add_option("--channel", channel, "deletion|poisson")
        ->check(CLI::IsMember({"deletion", "poisson"}));
    bound->add_option("--d", d, "deletion probability in (0,1)")->required();
    bound->add_option("--method", method, "trunc|exact-dist|lerch|elementary|explicit")
        ->check(CLI::IsMember({"trunc", "exact-dist", "lerch", "elementary", "explicit"}));
    bound->add_option("--dist", dist_override, "exact distribution override");
    bound->add_option("--units", units, "bits|nats")->check(CLI::IsMember({"bits", "nats"}));
    add_tol_flags(bound, tol);

    // ---- table ----
    auto* table = app.add_subcommand("table", "reproduce a reference data table as CSV");
    std::string which = "poi-mean", grid_spec = "0.1:0.9:0.1", out_path = "-";
    table->add_option("--which", which, "poi-mean|poi-cap|del-cap")
        ->check(CLI::IsMember({"poi-mean", "poi-cap", "del-cap"}));
    table->add_option("--grid", grid_spec, "start:stop:step");
    table->add_option("--out", out_path, "output file or - for stdout");
    add_tol_flags(table, tol);

    // ---- curve ----
    auto* curve = app.add_subcommand("curve", "emit plot data as CSV");
    std::string what = "slope", cdist, cgrid = "0.01:0.99:0.01";
    double cd = 0.5, cp = -1.0, cq = 0.5;
    int xmax = 50, ymax = 80;
    std::string cmethod = "exact-dist";
    curve->add_option("--what", what, "slope|gap|pmf|estimates")
        ->check(CLI::IsMember({"slope", "gap", "pmf", "estimates"}));
    curve->add_option("--channel", channel, "deletion|poisson")
        ->check(CLI::IsMember({"deletion", "poisson"}));
    curve->add_option("--d", cd, "deletion probability");
    curve->add_option("--p", cp, "retention probability (deletion channel; overrides --d)");
    curve->add_option("--q", cq, "decay parameter for gap/pmf curves");
    curve->add_option("--dist", cdist, "distribution family");
    curve->add_option("--method", cmethod, "exact-dist|lerch|elementary");
    curve->add_option("--grid", cgrid, "q grid start:stop:step");
    curve->add_option("--xmax", xmax, "largest channel input for gap curves");
    curve->add_option("--ymax", ymax, "largest y for pmf curves");
    curve->add_option("--out", out_path, "output file or - for stdout");
    add_tol_flags(curve, tol);

    // ---- audit ----
    auto* audit = app.add_subcommand("audit", "dual-feasibility audit of a distribution");
    double aq = 0.5, corrupt_q = 0.0;
    int audit_xmax = 300;
    audit->add_option("--channel", channel, "deletion|poisson")
        ->check(CLI::IsMember({"deletion", "poisson"}));
    audit->add_option("--d", d, "deletion probability")->required();
    audit->add_option("--dist", cdist, "distribution family (default per channel)");
    audit->add_option("--q", aq, "decay parameter");
    audit->add_option("--xmax", audit_xmax, "largest input checked");
    audit->add_option("--corrupt-q", corrupt_q,
                      "negative control: perturb q after normalization by this amount");
    add_tol_flags(audit, tol);

    // ---- sim ----
    auto* simc = app.add_subcommand("sim", "pre/run-processor equivalence simulation");
    std::string rule_name = "bernoulli", input_bits = "0001100001";
    double sp = 0.7, slambda = 1.0;
    int trials = 100000;
    std::uint64_t seed = 20240101;
    bool negative_control = false;
    simc->add_option("--rule", rule_name, "bernoulli|poisson")
        ->check(CLI::IsMember({"bernoulli", "poisson"}));
    simc->add_option("--p", sp, "retention probability (bernoulli rule)");
    simc->add_option("--lambda", slambda, "mean (poisson rule)");
    simc->add_option("--input", input_bits, "bit string starting with 0");
    simc->add_option("--trials", trials, "number of Monte-Carlo trials");
    simc->add_option("--seed", seed, "64-bit RNG seed");
    simc->add_flag("--negative-control", negative_control,
                   "feed the run-processor a mis-specified pre-processor (G with mean 1)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;  // exit 2 on invalid parameters, 0 for --help
    }

    try {
        if (*bound) return run_bound(channel, d, method, dist_override, units, tol);

        if (*table) {
            const auto grid = tables::Grid::parse(grid_spec);
            std::string csv;
            if (which == "poi-mean")
                csv = tables::poi_mean_csv(grid, tol);
            else if (which == "poi-cap")
                csv = tables::poi_cap_csv(grid, tol);
            else
                csv = tables::del_cap_csv(grid, tol);
            write_output(out_path, csv);
            return 0;
        }

        if (*curve) {
            const bool deletion = channel == "deletion";
            if (cp >= 0.0) cd = 1.0 - cp;
            std::string csv;
            if (what == "slope") {
                DistKind kind = deletion ? DistKind::InvBin : DistKind::PoiDigamma;
                Method m = Method::ExactDist;
                if (cmethod == "lerch") m = Method::Lerch;
                else if (cmethod == "elementary") m = Method::Elementary;
                if (!cdist.empty()) kind = parse_dist(cdist);
                csv = tables::slope_curve_csv(deletion, cd, kind, m, tables::Grid::parse(cgrid),
                                              tol);
            } else if (what == "gap") {
                DistKind kind = deletion ? DistKind::BinTrunc : DistKind::PoiDigamma;
                if (!cdist.empty()) kind = parse_dist(cdist);
                csv = tables::gap_curve_csv(deletion, cd, kind, cq, xmax, tol);
            } else if (what == "pmf") {
                if (cdist.empty()) throw CLI::ValidationError("--dist", "pmf curve needs --dist");
                const DistKind kind = parse_dist(cdist);
                const double p = cp >= 0.0 ? cp : 1.0 - cd;
                csv = tables::pmf_curve_csv(kind, p, cq, ymax, tol);
            } else {
                if (cdist.empty())
                    throw CLI::ValidationError("--dist", "estimates curve needs --dist");
                const DistKind kind = parse_dist(cdist);
                const double p = cp >= 0.0 ? cp : 1.0 - cd;
                csv = tables::estimates_curve_csv(kind, p, tables::Grid::parse(cgrid), tol);
            }
            write_output(out_path, csv);
            return 0;
        }

        if (*audit) {
            const bool deletion = channel == "deletion";
            const DistKind kind =
                cdist.empty() ? (deletion ? DistKind::InvBin : DistKind::PoiDigamma)
                              : parse_dist(cdist);
            const auto ch = deletion ? kkt::ConvolutionChannel::binomial(1.0 - d)
                                     : kkt::ConvolutionChannel::poisson_from_d(d);
            auto dist = dists::normalize(kind, deletion ? 1.0 - d : 0.0, aq, tol);
            if (corrupt_q != 0.0) dist.q += corrupt_q;  // negative control
            const auto rep = kkt::verify_dual_feasible(ch, dist, audit_xmax, tol.kkt_tol);
            std::printf("%s  dist=%s d=%.6g q=%.6g xmax=%d worst_gap=%.3e at x=%d\n",
                        rep.pass ? "PASS" : "FAIL", dists::to_string(kind).c_str(), d, aq,
                        rep.x_max, rep.worst_gap, rep.worst_x);
            return rep.pass ? 0 : 1;
        }

        if (*simc) {
            const auto rule = rule_name == "bernoulli" ? sim::RepetitionRule::bernoulli(sp)
                                                       : sim::RepetitionRule::poisson(slambda);
            sim::EquivalenceOptions opts;
            opts.misspecified_preprocessor = negative_control;
            const auto rep =
                sim::equivalence_test(rule, sim::parse_bits(input_bits), trials, seed, opts);
            std::printf("%s  trials=%d joint_tv=%.5f joint_support=%d%s\n",
                        rep.pass ? "PASS" : "FAIL", rep.trials, rep.joint_tv, rep.joint_support,
                        rep.insufficient_samples ? " (insufficient samples)" : "");
            for (std::size_t j = 0; j < rep.positions.size(); ++j) {
                const auto& st = rep.positions[j];
                std::printf("  run %zu: tv=%.5f threshold=%.5f support=%d chi2=%.2f dof=%d "
                            "p=%.4f %s\n",
                            j + 1, st.tv, st.threshold, st.support, st.chi2, st.dof, st.p_value,
                            st.pass ? "ok" : "FAIL");
            }
            return rep.pass ? 0 : 1;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
