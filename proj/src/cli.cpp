#include "mlab/cli.hpp"

#include "mlab/contour.hpp"
#include "mlab/el_invariant.hpp"
#include "mlab/errors.hpp"
#include "mlab/pde_oracle.hpp"
#include "mlab/quadrature.hpp"
#include "mlab/report.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <cstdlib>
#include <fstream>
#include <future>
#include <iostream>

namespace mlab {

using nlohmann::json;

namespace {

struct Options {
    double rk_tol = 1e-11;
    double class_tol = 1e-7;
    int grid_nx = 1024;
    double grid_l = 16;
    double dtheta = kTwoPi / 4096;
    bool echo_spec = false;
    std::string out_path;
    std::string param = "alpha";
    std::string range; // a:b:steps
    int threads = 0;

    ClassifyOptions classify() const { return {class_tol, 1e-6, rk_tol}; }
    Grid grid() const { return {grid_l, grid_nx, dtheta}; }
};

TrigPoly parse_poly(const json& j) {
    if (!j.is_object()) throw MalformedSpec("potential entries must be objects");
    double mean = j.value("mean", 0.0);
    std::vector<double> cosc, sinc;
    if (j.contains("cos")) cosc = j.at("cos").get<std::vector<double>>();
    if (j.contains("sin")) sinc = j.at("sin").get<std::vector<double>>();
    for (double v : cosc)
        if (!std::isfinite(v)) throw MalformedSpec("non-finite coefficient");
    for (double v : sinc)
        if (!std::isfinite(v)) throw MalformedSpec("non-finite coefficient");
    return TrigPoly::real_series(mean, cosc, sinc);
}

json poly_to_json(const TrigPoly& p) {
    json out;
    out["mean"] = p.mean().real();
    std::vector<double> cosc, sinc;
    for (int m = 1; m <= p.degree(); ++m) {
        cosc.push_back(2 * p.coeff(m).real());
        sinc.push_back(-2 * p.coeff(m).imag());
    }
    while (!cosc.empty() && cosc.back() == 0 && sinc.back() == 0) {
        cosc.pop_back();
        sinc.pop_back();
    }
    out["cos"] = cosc;
    out["sin"] = sinc;
    return out;
}

json samples_to_json(const std::function<Complex(double)>& f, int K = 64) {
    std::vector<double> th(K), re(K), im(K);
    for (int j = 0; j < K; ++j) {
        th[j] = kTwoPi * j / K;
        Complex v = f(th[j]);
        re[j] = v.real();
        im[j] = v.imag();
    }
    json out;
    out["theta"] = th;
    out["re"] = re;
    out["im"] = im;
    return out;
}

ParsedSpec parse_spec_impl(const json& doc) {
    if (!doc.is_object()) throw MalformedSpec("spec must be a JSON object");
    const bool has_family = doc.contains("family");
    const bool has_fourier = doc.contains("fourier");
    if (has_family == has_fourier)
        throw MalformedSpec("exactly one of 'family' or 'fourier' must be present");

    ParsedSpec ps;
    if (has_family) {
        if (doc.at("family").get<std::string>() != "kirillov")
            throw MalformedSpec("only the 'kirillov' family is defined");
        std::string c = doc.value("case", "I");
        KirillovFamily f;
        f.c = (c == "I")    ? KirillovFamily::Case::I
              : (c == "II") ? KirillovFamily::Case::II
              : (c == "III")
                  ? KirillovFamily::Case::III
                  : throw MalformedSpec("case must be one of I, II, III");
        f.n = doc.value("n", 1);
        f.alpha = doc.value("alpha", 0.0);
        f.a = doc.value("a", 1.0);
        f.sign = doc.value("sign", 1);
        double gamma = doc.value("gamma", 0.0);
        KirillovPair pair = kirillov_family(f);
        ps.is_kirillov = true;
        ps.family = f;
        ps.family_xi = pair.xi;
        ps.D = SchrodingerOp{pair.u, PeriodicFn(TrigPoly::constant(0.0)),
                             PeriodicFn(TrigPoly::constant(gamma))};
        if (doc.contains("V1")) ps.D.V1 = PeriodicFn(parse_poly(doc.at("V1")));
    } else {
        const json& fj = doc.at("fourier");
        ps.D = SchrodingerOp{PeriodicFn(parse_poly(fj.value("V2", json::object()))),
                             PeriodicFn(parse_poly(fj.value("V1", json::object()))),
                             PeriodicFn(parse_poly(fj.value("V0", json::object())))};
    }

    if (doc.contains("group_element")) {
        const json& gj = doc.at("group_element");
        GroupElement g;
        if (gj.contains("phi_p")) g.p = parse_poly(gj.at("phi_p"));
        if (gj.contains("a")) g.a = parse_poly(gj.at("a"));
        if (gj.contains("b")) g.b = parse_poly(gj.at("b"));
        double slope = 0;
        if (!g.valid(&slope))
            throw MalformedSpec("group element has phi' reaching " +
                                std::to_string(slope));
        ps.D = act(g, ps.D);
        ps.is_kirillov = false; // family closed forms no longer literal
        ps.family_xi.reset();
    }
    return ps;
}

json provenance(const Options& opt) {
    json p;
    p["class_tol"] = opt.class_tol;
    p["dtheta"] = opt.dtheta;
    p["grid_l"] = opt.grid_l;
    p["grid_nx"] = opt.grid_nx;
    p["rk_tol"] = opt.rk_tol;
    p["version"] = "1.0.0";
    return p;
}

json orbit_class_json(const OrbitClass& oc) {
    json c;
    c["tag"] = orbit_tag_name(oc.tag);
    c["generic"] = oc.generic;
    c["gamma"] = oc.gamma;
    if (oc.tag != OrbitClass::Tag::Ci) c["n"] = oc.n;
    if (std::isfinite(oc.alpha)) c["alpha"] = oc.alpha;
    if (oc.tag == OrbitClass::Tag::CiBis || oc.tag == OrbitClass::Tag::CiiiBis)
        c["C"] = oc.C;
    if (oc.tag == OrbitClass::Tag::CiBis) c["sigma"] = oc.sigma;
    return c;
}

// the regularized period integral of the literal family field
Complex family_integral(const ParsedSpec& ps) {
    const TrigPoly& xi = *ps.family_xi;
    switch (ps.family.c) {
    case KirillovFamily::Case::I: return xi_integral(xi, XiMode::Direct);
    case KirillovFamily::Case::II:
        if (ps.family.alpha == 0) {
            // simple zeros of a sin(n theta): p.v. integral vanishes
            return xi_integral(xi, XiMode::PrincipalValue);
        }
        return xi_integral(xi, XiMode::PrincipalValue);
    case KirillovFamily::Case::III: return xi_integral(xi, XiMode::ContourUnipotent);
    }
    throw ParameterOutOfRange("unknown family");
}

json invariants_json(const ParsedSpec& ps, const OrbitClass& oc, const Options& opt) {
    json iv;
    iv["gamma"] = oc.gamma;
    HillOperator hop = ps.D.hill();
    if (ps.family_xi) {
        double drift = 0;
        iv["I"] = invariant_I(hop, *ps.family_xi, &drift);
        Complex T = family_integral(ps);
        iv["T_real"] = T.real();
        iv["T_imag"] = T.imag();
    } else {
        Stabilizer st = periodic_stabilizer(hop, {opt.rk_tol});
        iv["I"] = st.I;
        iv["I_scale_convention"] = "stabilizer profile normalized to unit sup-norm";
    }
    LiftedMonodromy lm = lifted_monodromy(hop, {opt.rk_tol});
    iv["winding"] = double(lm.winding);
    iv["delta_omega"] = lm.delta_omega;
    return iv;
}

json monodromy_json(const MonodromySpec& spec) {
    json m;
    m["kind"] = monodromy_kind_name(spec.kind);
    m["gamma_tilde"] = spec.gamma_tilde;
    m["T_real"] = spec.T.real();
    m["T_imag"] = spec.T.imag();
    if (spec.kind == MonodromySpec::Kind::DiscreteElliptic) {
        m["a"] = spec.a;
        std::vector<double> lam, re, im;
        for (int n = 0; n < 8; ++n) {
            double l = spec.lambda_n(n);
            lam.push_back(l);
            re.push_back(std::cos(l));
            im.push_back(std::sin(l));
        }
        m["lambda_n"] = lam;
        m["phase_re"] = re;
        m["phase_im"] = im;
    }
    if (spec.kind == MonodromySpec::Kind::ResonantIBis) m["kshift"] = spec.kshift;
    if (spec.kind == MonodromySpec::Kind::ResonantIIIBis) {
        m["C_alpha"] = spec.C_alpha;
        m["identity_residual"] = spec.identity_residual;
    }
    return m;
}

json verification_json(const ParsedSpec& ps, const OrbitClass& oc, const Options& opt) {
    json v;
    HillOperator hop = ps.D.hill();
    FloquetData fd = floquet(hop, {opt.rk_tol, 256});
    v["det_m_minus_1"] = std::abs(fd.M.determinant() - 1);
    v["wronskian_drift"] = fd.wronskian_drift;

    Stabilizer st = periodic_stabilizer(hop, {opt.rk_tol});
    v["stabilizer_ode_residual"] = stabilizer_ode_residual(hop, st.xi_poly());
    v["I_drift"] = st.I_drift;

    VectorInvariant inv = invariant_for(ps.D, oc, opt.classify());
    if (std::abs(inv.xi.I) > 1e-9) {
        Stabilizer nl = inv.xi;
        v["pinney_residual"] = pinney_check(ps.D.V2, nl);
    }
    ELCoefficients el = el_coefficients(ps.D, inv);
    v["el_constraint_residual"] = el.constraint_residual;

    // Lemma 4.3 identities
    double i1 = 0, i2 = 0;
    bool xi_positive = inv.xi.zeros.empty();
    const int K = 1024;
    for (int j = 0; j < K; ++j) {
        double th = 2 * kTwoPi * j / K;
        double d1 = inv.delta1(th).real();
        if (xi_positive) i1 += std::pow(inv.xi.profile(th).real(), -1.5) * d1;
        i2 += ps.D.V1(th) * d1;
    }
    if (xi_positive) v["int_xi_m32_delta1"] = std::abs(i1) * 2 * kTwoPi / K;
    v["int_v1_delta1"] = std::abs(i2) * 2 * kTwoPi / K;

    // quantitative PDE check for oscillators; conservation drift otherwise
    Grid g = opt.grid();
    if (oc.tag == OrbitClass::Tag::Ci && oc.alpha > 1e-9) {
        MonodromySpec spec = monodromy_spec(oc, inv);
        std::vector<double> errs;
        for (int n = 0; n <= 2; ++n) {
            ModelEigenfunction hn = eigenfunction(oc, inv, {n, 0, +1});
            Complex measured = measure_monodromy_phase(ps.D, g, hn);
            Complex predicted = std::exp(Complex(0, spec.lambda_n(n)));
            errs.push_back(std::abs(std::arg(measured * std::conj(predicted))));
        }
        v["phase_errors"] = errs;
    } else {
        Grid wide{std::max(24.0, opt.grid_l), std::max(2048, opt.grid_nx), opt.dtheta};
        WaveState s0 = sample_state(
            [](double, double x) {
                return Complex(std::pow(M_PI * 0.25, -0.25) * std::exp(-2 * x * x), 0);
            },
            wide);
        v["el_drift"] = expectation_drift(ps.D, el, wide, s0, 16);
    }
    return v;
}

int run_report(const std::string& cmd, const json& spec_doc, const Options& opt,
               std::string& out) {
    ParsedSpec ps = parse_operator_spec(spec_doc);
    json report;
    if (opt.echo_spec) {
        json echo;
        echo["fourier"]["V2"] = poly_to_json(ps.D.V2.projection());
        echo["fourier"]["V1"] = poly_to_json(ps.D.V1.projection());
        echo["fourier"]["V0"] = poly_to_json(ps.D.V0.projection());
        report["spec"] = echo;
    }
    report["provenance"] = provenance(opt);

    OrbitClass oc = classify_orbit(ps.D, opt.classify());
    report["orbit_class"] = orbit_class_json(oc);
    report["invariants"] = invariants_json(ps, oc, opt);

    if (cmd == "monodromy" || cmd == "verify") {
        VectorInvariant inv = invariant_for(ps.D, oc, opt.classify());
        report["monodromy"] = monodromy_json(monodromy_spec(oc, inv));
    }
    if (cmd == "stabilizer") {
        HillOperator hop = ps.D.hill();
        Stabilizer st = periodic_stabilizer(hop, {opt.rk_tol});
        json x;
        x["imaginary"] = st.imaginary;
        x["I"] = st.I;
        x["kind"] = st.kind == Stabilizer::Kind::CaseI    ? "I"
                    : st.kind == Stabilizer::Kind::CaseII ? "II"
                                                          : "III";
        x["degenerate"] = st.degenerate;
        x["samples"] = samples_to_json([&](double th) { return st.xi(th); });
        if (ps.family_xi) {
            Complex T = family_integral(ps);
            x["T_real"] = T.real();
            x["T_imag"] = T.imag();
        }
        report["stabilizer"] = x;
    }
    if (cmd == "invariant") {
        VectorInvariant inv = invariant_for(ps.D, oc, opt.classify());
        json x;
        x["unit"] = inv.xi.imaginary ? "imaginary" : "real";
        x["xi"] = samples_to_json([&](double th) { return inv.xi.profile(th); });
        x["delta1"] = samples_to_json([&](double th) { return inv.delta1(th); });
        x["delta2"] = samples_to_json([&](double th) { return inv.delta2(th); });
        x["delta2_offset"] = inv.delta2_offset;
        ELCoefficients el = el_coefficients(ps.D, inv);
        json elj;
        elj["constraint_residual"] = el.constraint_residual;
        elj["a"] = samples_to_json([&](double th) { return el.a(th); });
        elj["b"] = samples_to_json([&](double th) { return el.b(th); });
        elj["c"] = samples_to_json([&](double th) { return el.c(th); });
        elj["d"] = samples_to_json([&](double th) { return el.d(th); });
        elj["e"] = samples_to_json([&](double th) { return el.e(th); });
        elj["f"] = samples_to_json([&](double th) { return el.f(th); });
        x["el"] = elj;
        report["invariant"] = x;
    }
    if (cmd == "verify") report["verification"] = verification_json(ps, oc, opt);

    out += emit_json(report);
    return 0;
}

int run_sweep(const json& spec_doc, const Options& opt, std::string& out) {
    if (opt.param != "alpha")
        throw MalformedSpec("sweep supports --param alpha");
    double lo = 0, hi = 0;
    int steps = 0;
    if (std::sscanf(opt.range.c_str(), "%lf:%lf:%d", &lo, &hi, &steps) != 3 ||
        steps < 1)
        throw MalformedSpec("--range must be lo:hi:steps");

    int hw = int(std::thread::hardware_concurrency());
    int max_threads = hw > 0 ? hw : 2;
    if (const char* env = std::getenv("MONODROMY_LAB_THREADS"))
        max_threads = std::max(1, std::atoi(env));
    if (opt.threads > 0) max_threads = opt.threads;

    std::vector<std::vector<double>> rows(steps);
    std::atomic<int> next{0};
    auto work = [&]() {
        for (;;) {
            int i = next.fetch_add(1);
            if (i >= steps) return;
            double alpha = (steps == 1) ? lo : lo + (hi - lo) * i / (steps - 1);
            json spec = spec_doc;
            spec["alpha"] = alpha;
            ParsedSpec ps = parse_operator_spec(spec);
            HillOperator hop = ps.D.hill();
            double I = invariant_I(hop, *ps.family_xi);
            Complex T = family_integral(ps);
            FloquetData fd = floquet(hop, {opt.rk_tol, 16});
            rows[i] = {alpha, I, T.real(), T.imag(), fd.M.trace()};
        }
    };
    std::vector<std::future<void>> pool;
    for (int t = 0; t < std::min(max_threads, steps); ++t)
        pool.push_back(std::async(std::launch::async, work));
    for (auto& f : pool) f.get();

    out += emit_csv({"alpha", "I", "integral_real", "integral_imag", "trace"}, rows);
    return 0;
}

json load_spec(const std::string& path) {
    try {
        if (path == "-") return json::parse(std::cin);
        std::ifstream in(path);
        if (!in) throw MalformedSpec("cannot open spec file " + path);
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw MalformedSpec(e.what());
    }
}

} // namespace

ParsedSpec parse_operator_spec(const json& doc) { return parse_spec_impl(doc); }

int cli_main(const std::vector<std::string>& args, std::string& out) {
    CLI::App app{"periodic generalized-oscillator classification and monodromy"};
    app.require_subcommand(1);

    Options opt;
    std::string spec_path;
    auto add_common = [&](CLI::App* sub) {
        sub->add_option("spec", spec_path, "operator spec (JSON file or '-')")
            ->required();
        sub->add_option("--out", opt.out_path, "write the report to a file");
        sub->add_flag("--echo-spec", opt.echo_spec, "echo the parsed operator");
        sub->add_option("--rk-tol", opt.rk_tol);
        sub->add_option("--class-tol", opt.class_tol);
        sub->add_option("--grid-nx", opt.grid_nx);
        sub->add_option("--grid-l", opt.grid_l);
        sub->add_option("--dtheta", opt.dtheta);
    };
    for (const char* name : {"classify", "monodromy", "stabilizer", "invariant", "verify"})
        add_common(app.add_subcommand(name));
    CLI::App* sweep = app.add_subcommand("sweep");
    add_common(sweep);
    sweep->add_option("--param", opt.param, "swept parameter (alpha)");
    sweep->add_option("--range", opt.range, "lo:hi:steps")->required();
    sweep->add_option("--threads", opt.threads, "worker cap (default: env/hardware)");

    std::vector<std::string> rev(args.rbegin(), args.rend());
    try {
        app.parse(rev);
    } catch (const CLI::ParseError& e) {
        out += std::string("argument error: ") + e.what() + "\n";
        return 1;
    }

    std::string result;
    int code = 0;
    try {
        json spec = load_spec(spec_path);
        std::string cmd = app.get_subcommands().front()->get_name();
        if (cmd == "sweep")
            code = run_sweep(spec, opt, result);
        else
            code = run_report(cmd, spec, opt, result);
    } catch (const MalformedSpec& e) {
        json err;
        err["error"] = e.name();
        err["message"] = e.what();
        out += emit_json(err);
        return 1;
    } catch (const Error& e) {
        json err;
        err["error"] = e.name();
        err["message"] = e.what();
        out += emit_json(err);
        return 2;
    }

    if (!opt.out_path.empty()) {
        std::ofstream f(opt.out_path);
        f << result;
    } else {
        out += result;
    }
    return code;
}

int cli_run(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    std::string out;
    int code = cli_main(args, out);
    std::cout << out;
    return code;
}

} // namespace mlab
