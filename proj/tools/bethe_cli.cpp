// Command-line front end: thermodynamic solves, correlation asymptotics,
// generating-function sweeps, sine-kernel checks and the verification battery.

#include <CLI11.hpp>

#include <bethe/bethe.hpp>

#include <json.hpp>

#include <atomic>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

namespace {

using bethe::cx;

struct Table {
    std::vector<std::pair<std::string, double>> scalars;
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
};

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_table(const Table& t, const std::string& path, const std::string& format) {
    std::ostringstream out;
    if (format == "json") {
        nlohmann::ordered_json j;
        for (const auto& [k, v] : t.scalars) j["scalars"][k] = v;
        j["rows"] = nlohmann::ordered_json::array();
        for (const auto& r : t.rows) {
            nlohmann::ordered_json row;
            for (size_t i = 0; i < t.columns.size(); ++i) row[t.columns[i]] = r[i];
            j["rows"].push_back(row);
        }
        out << j.dump(2) << "\n";
    } else {
        for (const auto& [k, v] : t.scalars) out << "# " << k << "=" << fmt17(v) << "\n";
        for (size_t i = 0; i < t.columns.size(); ++i)
            out << t.columns[i] << (i + 1 < t.columns.size() ? "," : "\n");
        for (const auto& r : t.rows) {
            for (size_t i = 0; i < r.size(); ++i) out << fmt17(r[i]) << (i + 1 < r.size() ? "," : "\n");
        }
    }
    if (path.empty()) {
        std::cout << out.str();
    } else {
        std::ofstream f(path, std::ios::binary);
        if (!f) throw std::runtime_error("cannot open output file: " + path);
        f << out.str();
    }
}

// flat key=value config: inject "--key value" for keys not already on the
// command line, so flags win over the file and the file over defaults
std::vector<std::string> expand_config(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    std::string cfg;
    for (size_t i = 0; i < args.size(); ++i) {
        if (args[i] == "--config" && i + 1 < args.size()) cfg = args[i + 1];
        else if (args[i].rfind("--config=", 0) == 0) cfg = args[i].substr(9);
    }
    if (cfg.empty()) return args;
    std::ifstream f(cfg);
    if (!f) throw CLI::ValidationError("--config", "cannot open config file " + cfg);
    std::string line;
    while (std::getline(f, line)) {
        auto first = line.find_first_not_of(" \t");
        if (first == std::string::npos) continue;
        auto last = line.find_last_not_of(" \t\r");
        line = line.substr(first, last - first + 1);
        if (line.empty() || line[0] == '#') continue;
        auto eq = line.find('=');
        if (eq == std::string::npos) throw CLI::ValidationError("--config", "expected key=value: " + line);
        std::string key = line.substr(0, eq), value = line.substr(eq + 1);
        while (!key.empty() && (key.back() == ' ' || key.back() == '\t')) key.pop_back();
        while (!value.empty() && (value.front() == ' ' || value.front() == '\t')) value.erase(0, 1);
        std::string flag = "--" + key;
        bool given = false;
        for (const auto& a : args)
            if (a == flag || a.rfind(flag + "=", 0) == 0) given = true;
        if (!given) {
            args.push_back(flag);
            args.push_back(value);
        }
    }
    return args;
}

// comma list or a:b:step (inclusive)
std::vector<double> parse_sweep(const std::string& s) {
    std::vector<double> out;
    if (s.find(':') != std::string::npos) {
        double a, b, step;
        char c1, c2;
        std::istringstream in(s);
        if (!(in >> a >> c1 >> b >> c2 >> step) || c1 != ':' || c2 != ':' || step <= 0.0)
            throw CLI::ValidationError("--m", "expected a:b:step with step > 0");
        for (double v = a; v <= b + 1e-9 * step; v += step) out.push_back(v);
    } else {
        std::istringstream in(s);
        std::string tok;
        while (std::getline(in, tok, ',')) {
            if (tok.empty()) continue;
            out.push_back(std::stod(tok));
        }
    }
    if (out.empty()) throw CLI::ValidationError("--m", "empty sweep list");
    return out;
}

// tiny worker pool: applies fn(i) for i in [0,n), results ordered by index
template <class F>
void parallel_for(int n, F&& fn, int max_threads = 4) {
    int workers = std::min<int>({max_threads, n, static_cast<int>(std::thread::hardware_concurrency())});
    if (workers <= 1) {
        for (int i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w)
        pool.emplace_back([&] {
            for (int i = next.fetch_add(1); i < n; i = next.fetch_add(1)) fn(i);
        });
    for (auto& t : pool) t.join();
}

struct ModelOptions {
    std::string model = "xxz";
    double zeta = bethe::pi / 2;
    double delta = 2.0; // sentinel: unset
    double field = 0.0;
    double coupling = 4.0;
    int nodes = 128;
    double contour_height = 0.0; // 0 = auto
    int contour_nodes = 256;

    bethe::ModelSpec spec() const {
        if (model == "ll") return bethe::ModelSpec::lieb_liniger(coupling, field);
        double z = zeta;
        if (delta < 1.5) z = std::acos(delta);
        return bethe::ModelSpec::xxz(z, field);
    }
};

void add_model_options(CLI::App* cmd, ModelOptions& mo, bool need_field = true) {
    cmd->add_option("--model", mo.model, "model: xxz or ll")
        ->check(CLI::IsMember({"xxz", "ll"}))
        ->capture_default_str();
    auto* zeta = cmd->add_option("--zeta", mo.zeta, "XXZ anisotropy angle in (0,pi)");
    cmd->add_option("--delta", mo.delta, "XXZ anisotropy Delta = cos(zeta), in (-1,1)")->excludes(zeta);
    auto* field = cmd->add_option("--field", mo.field, "magnetic field / chemical potential");
    if (need_field) field->required();
    cmd->add_option("--c", mo.coupling, "Lieb-Liniger coupling c > 0");
    cmd->add_option("--nodes", mo.nodes, "quadrature nodes for the dressing equations")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    cmd->add_option("--contour-height", mo.contour_height, "vertical half-height of the contour (0 = auto)");
    cmd->add_option("--contour-nodes", mo.contour_nodes, "trapezoid nodes on the contour")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
}

bethe::Contour make_contour(const bethe::ThermoSolution& th, const ModelOptions& mo) {
    double d = mo.contour_height > 0.0 ? mo.contour_height
                                       : std::min(th.model.strip() * 0.25, th.q);
    return bethe::Contour::ellipse(th.q, d, mo.contour_nodes);
}

struct OutputOptions {
    std::string path;
    std::string format = "csv";
};

void add_output_options(CLI::App* cmd, OutputOptions& oo) {
    cmd->add_option("--output", oo.path, "output file (default: stdout)");
    cmd->add_option("--format", oo.format, "csv or json")
        ->check(CLI::IsMember({"csv", "json"}))
        ->capture_default_str();
}

int run_thermo(const ModelOptions& mo, const OutputOptions& oo) {
    bethe::ThermoSolution th = bethe::dressed_quantities(mo.spec(), mo.nodes);
    Table t;
    t.scalars = {{"q", th.q},
                 {"p_F", th.p_F},
                 {"D", th.D},
                 {"Z", th.Z_q},
                 {"rho_q", th.rho_q},
                 {"D_minus_pF_over_pi", th.D - th.p_F / bethe::pi}};
    t.columns = {"lambda", "rho", "Z", "eps"};
    for (int i = 0; i < th.grid.size(); ++i)
        t.rows.push_back({th.grid.nodes[i], th.rho[i], th.Z[i], th.eps[i]});
    write_table(t, oo.path, oo.format);
    return 0;
}

int run_expansion(const ModelOptions& mo, const OutputOptions& oo, const std::string& msweep,
                  bool lieb) {
    bethe::ThermoSolution th = bethe::dressed_quantities(mo.spec(), mo.nodes);
    bethe::Contour c = make_contour(th, mo);
    bethe::AsymptoticExpansion e = lieb ? bethe::ll_jj_leading(th, c) : bethe::szsz_leading(th, c);
    Table t;
    t.scalars = {{"Z", th.Z_q},
                 {"p_F", th.p_F},
                 {"D", th.D},
                 {"C0", bethe::const_C0(th)},
                 {"C1", bethe::const_C1(th)},
                 {"A_tilde", bethe::amplitude_Atilde(th, c)},
                 {"F_sigma_sq", e.form_factor_sq},
                 {"const_term", e.const_term},
                 {"osc_exponent", e.osc_exp}};
    t.columns = {"m", "const_term", "power_term", "osc_term", "total"};
    for (double m : parse_sweep(msweep))
        t.rows.push_back({m, e.const_term, e.power_term(m), e.osc_term(m), e.eval(m)});
    write_table(t, oo.path, oo.format);
    return 0;
}

int run_generating(const ModelOptions& mo, const OutputOptions& oo, double beta_re, double beta_im,
                   const std::string& msweep) {
    bethe::ThermoSolution th = bethe::dressed_quantities(mo.spec(), mo.nodes);
    bethe::Contour c = make_contour(th, mo);
    const cx beta(beta_re, beta_im);
    std::vector<double> ms = parse_sweep(msweep);
    Table t;
    t.scalars = {{"beta_re", beta_re}, {"beta_im", beta_im}, {"q", th.q}, {"Z", th.Z_q}};
    t.columns = {"m", "G0_re", "G0_im", "Gfull_re", "Gfull_im"};
    std::vector<std::vector<double>> rows(ms.size());
    const bool zero = std::abs(beta) < 1e-13;
    parallel_for(static_cast<int>(ms.size()), [&](int i) {
        cx g0 = bethe::generating_fn_G0(th, c, beta, ms[i], zero);
        cx gf = bethe::generating_fn_full(th, c, beta, ms[i]);
        rows[i] = {ms[i], g0.real(), g0.imag(), gf.real(), gf.imag()};
    });
    t.rows = std::move(rows);
    write_table(t, oo.path, oo.format);
    return 0;
}

int run_gsk_check(const OutputOptions& oo, double gamma, double q, const std::string& msweep,
                  int nodes) {
    std::vector<double> ms = parse_sweep(msweep);
    Table t;
    t.scalars = {{"gamma", gamma}, {"q", q}};
    t.columns = {"m", "exact_logdet", "w0", "w0_wosc", "resid_w0", "resid_w0_wosc"};
    std::vector<std::vector<double>> rows(ms.size());
    parallel_for(static_cast<int>(ms.size()), [&](int i) {
        bethe::GskProblem p;
        p.q = q;
        p.m = static_cast<int>(ms[i]);
        p.gamma = cx(gamma, 0.0);
        p.p0 = [](double x) { return x; };
        p.p0d = [](cx) { return cx(1.0, 0.0); };
        p.F = [](double) { return cx(1.0, 0.0); };
        p.Fd = [](double) { return cx(0.0, 0.0); };
        int n = nodes > 0 ? nodes
                          : std::max(220, static_cast<int>(0.55 * p.m * (p.p0(q) - p.p0(-q))) + 120);
        cx exact = bethe::exact_gsk_logdet(p, n);
        cx lead = bethe::w0(p);
        cx both = lead + bethe::w_osc(p, +1) + bethe::w_osc(p, -1);
        rows[i] = {ms[i],       exact.real(),           lead.real(),
                   both.real(), std::abs(exact - lead), std::abs(exact - both)};
    });
    t.rows = std::move(rows);
    write_table(t, oo.path, oo.format);
    return 0;
}

int run_verify(const std::string& only, std::uint64_t seed, const OutputOptions& oo) {
    bethe::CheckReport rep = bethe::run_verify_suite(seed, only);
    std::ostringstream out;
    if (oo.format == "json") {
        nlohmann::ordered_json j = nlohmann::ordered_json::array();
        for (const auto& i : rep.items)
            j.push_back({{"name", i.name}, {"residual", i.residual}, {"tol", i.tol}, {"pass", i.pass}});
        out << j.dump(2) << "\n";
    } else {
        for (const auto& i : rep.items)
            out << (i.pass ? "PASS " : "FAIL ") << i.name << "  residual=" << fmt17(i.residual)
                << " tol=" << fmt17(i.tol) << "\n";
        out << (rep.all_pass() ? "all checks passed\n" : "some checks FAILED\n");
    }
    if (oo.path.empty())
        std::cout << out.str();
    else
        std::ofstream(oo.path, std::ios::binary) << out.str();
    return rep.all_pass() ? 0 : 3;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"thermodynamic-limit quantities and correlation asymptotics for the XXZ chain "
                 "and the 1D Bose gas"};
    app.require_subcommand(1);

    ModelOptions mo_thermo, mo_szsz, mo_jj, mo_gen;
    OutputOptions oo_thermo, oo_szsz, oo_jj, oo_gen, oo_gsk, oo_verify;
    std::string m_szsz = "10,20,40,80", m_jj = "10,20,40,80", m_gen = "20,40,80,160";
    double beta_re = 0.2, beta_im = 0.0;
    double gsk_gamma = 0.1, gsk_q = 1.0;
    std::string gsk_m = "100,200,400";
    int gsk_nodes = 0;
    std::string verify_only;
    std::uint64_t seed = 42;

    auto* c_thermo = app.add_subcommand("thermo", "solve the dressing equations");
    add_model_options(c_thermo, mo_thermo);
    add_output_options(c_thermo, oo_thermo);
    std::string cfg_sink0;
    c_thermo->add_option("--config", cfg_sink0, "flat key=value config file");

    auto* c_szsz = app.add_subcommand("szsz", "leading <sigma^z sigma^z> expansion (XXZ)");
    add_model_options(c_szsz, mo_szsz);
    add_output_options(c_szsz, oo_szsz);
    c_szsz->add_option("--m", m_szsz, "distance sweep: comma list or a:b:step")->capture_default_str();
    std::string cfg_sink1;
    c_szsz->add_option("--config", cfg_sink1, "flat key=value config file");

    auto* c_jj = app.add_subcommand("jj", "leading <j j> expansion (Lieb-Liniger)");
    mo_jj.model = "ll";
    add_model_options(c_jj, mo_jj);
    add_output_options(c_jj, oo_jj);
    c_jj->add_option("--m", m_jj, "distance sweep: comma list or a:b:step")->capture_default_str();
    std::string cfg_sink2;
    c_jj->add_option("--config", cfg_sink2, "flat key=value config file");

    auto* c_gen = app.add_subcommand("generating", "generating function G0 and its sigma-sum (XXZ)");
    add_model_options(c_gen, mo_gen);
    add_output_options(c_gen, oo_gen);
    c_gen->add_option("--beta-re", beta_re, "Re beta")->capture_default_str();
    c_gen->add_option("--beta-im", beta_im, "Im beta")->capture_default_str();
    c_gen->add_option("--m", m_gen, "distance sweep")->capture_default_str();
    std::string cfg_sink3;
    c_gen->add_option("--config", cfg_sink3, "flat key=value config file");

    auto* c_gsk = app.add_subcommand("gsk-check", "exact sine-kernel determinant vs asymptotics");
    add_output_options(c_gsk, oo_gsk);
    c_gsk->add_option("--gamma", gsk_gamma, "coupling gamma")->capture_default_str();
    c_gsk->add_option("--q", gsk_q, "half-width of the interval")->capture_default_str();
    c_gsk->add_option("--m", gsk_m, "distance sweep")->capture_default_str();
    c_gsk->add_option("--nodes", gsk_nodes, "determinant nodes (0 = auto)");
    std::string cfg_sink4;
    c_gsk->add_option("--config", cfg_sink4, "flat key=value config file");

    auto* c_verify = app.add_subcommand("verify", "identity verification battery");
    add_output_options(c_verify, oo_verify);
    c_verify->add_option("--only", verify_only, "run only one group: cycle|lagrange|fredholm|freefermion");
    c_verify->add_option("--seed", seed, "seed for randomized checks")->capture_default_str();
    c_verify->add_flag("--all", "run every group (the default)");
    std::string cfg_sink5;
    c_verify->add_option("--config", cfg_sink5, "flat key=value config file");

    try {
        std::vector<std::string> args = expand_config(argc, argv);
        std::vector<const char*> ptrs;
        ptrs.push_back(argv[0]);
        for (const auto& a : args) ptrs.push_back(a.c_str());
        app.parse(static_cast<int>(ptrs.size()), ptrs.data());
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 1;
    } catch (const std::exception& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 1;
    }

    try {
        if (c_thermo->parsed()) return run_thermo(mo_thermo, oo_thermo);
        if (c_szsz->parsed()) return run_expansion(mo_szsz, oo_szsz, m_szsz, false);
        if (c_jj->parsed()) return run_expansion(mo_jj, oo_jj, m_jj, true);
        if (c_gen->parsed()) return run_generating(mo_gen, oo_gen, beta_re, beta_im, m_gen);
        if (c_gsk->parsed()) return run_gsk_check(oo_gsk, gsk_gamma, gsk_q, gsk_m, gsk_nodes);
        if (c_verify->parsed()) return run_verify(verify_only, seed, oo_verify);
    } catch (const CLI::ValidationError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "numeric failure: " << e.what() << "\n";
        return 2;
    }
    return 1;
}
