#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "sgi/config.hpp"
#include "sgi/constants.hpp"
#include "sgi/fringe_analysis.hpp"
#include "sgi/hd_theory.hpp"
#include "sgi/noise_stats.hpp"
#include "sgi/phase_space.hpp"
#include "sgi/sequencer.hpp"
#include "sgi/wigner.hpp"

namespace fs = std::filesystem;
using namespace sgi;

namespace {

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

struct Output {
    fs::path dir;
    json config;
    std::uint64_t seed;
    std::vector<std::string> files;

    std::ofstream open_csv(const std::string& name) {
        fs::create_directories(dir);
        std::ofstream out(dir / name, std::ios::binary);
        out << "# config_hash=" << config_hash(config) << " seed=" << seed << "\n";
        files.push_back(name);
        return out;
    }

    void write_manifest(const std::string& command, double duration_s) {
        json m;
        m["command"] = command;
        m["config_hash"] = config_hash(config);
        m["seed"] = seed;
        m["outputs"] = files;
        m["duration_s"] = duration_s;
        std::ofstream out(dir / "manifest.json", std::ios::binary);
        out << m.dump(2) << "\n";
    }
};

json default_half_config() {
    json j;
    j["randomvector"] = {{"enabled", true}, {"shots", 50}, {"eps", 0.018},
                         {"t1_us", 4.0}, {"dt_ns", 20.0}};
    j["mc_shots"] = 400;
    json arr = json::array();
    for (const auto& row : half_loop_table()) {
        json e;
        e["label"] = "T1_" + std::to_string(static_cast<int>(row.t1_us)) + "us";
        e["type"] = "half";
        e["times_us"] = {{"T1", row.t1_us}, {"Td", row.td_us}, {"T2", row.t2_us},
                         {"TOF", row.tof_us}};
        e["current_mA"] = 860.0;
        e["z_trap_um"] = 95.0;
        e["noise"] = {{"eta", 0.018}};
        arr.push_back(e);
    }
    j["scenarios"] = arr;
    return j;
}

json default_full_config() {
    json j;
    j["times_us"] = {{"T1", 6.0}, {"Td1", 300.0}, {"T2", 6.0}, {"T3", 6.0}, {"Td2", 300.0},
                     {"T4", 6.0}};
    j["scheme"] = "spin";
    j["current_mA"] = 860.0;
    j["z_trap_um"] = 95.0;
    j["sigma_um"] = 1.2;
    j["scan"] = {{"t23_min_us", 8.0}, {"t23_max_us", 16.0}, {"points", 161}};
    j["mismatch"] = {{"dz_max_sigma", 4.0}, {"dp_max_sigma", 4.0}, {"points", 81}};
    return j;
}

json default_wigner_config() {
    json j;
    j["sigma_um"] = 0.12;
    j["separation_um"] = 0.55;
    j["momentum_sep_hbar_per_um"] = 0.0;
    j["grid"] = {{"nz", 256}, {"np", 256}, {"z_span_sigma", 10.0}, {"p_span_hbar_sigma", 10.0}};
    return j;
}

int cmd_half_loop(const json& cfg, Output& out, int threads) {
    const auto t_start = std::chrono::steady_clock::now();
    const auto scenarios = load_scenarios(cfg);
    const int mc_shots = cfg.value("mc_shots", 400);

    // quantum random-vector ensemble at a fixed short splitting time
    double v_rv_zero = 0.0, v_rv_inf = 0.0;
    const auto rv = cfg.value("randomvector", json::object());
    if (rv.value("enabled", false)) {
        SplitInterfereParams p;
        p.grid = Grid1D{95 * units::um - 7.5 * units::um, 5 * units::nm, 3000};
        p.t_split = rv.value("t1_us", 4.0) * units::us;
        p.dt = rv.value("dt_ns", 20.0) * 1e-9;
        p.eps = rv.value("eps", 0.018);
        p.seed = out.seed;
        const int shots = rv.value("shots", 50);
        p.corr = NoiseCorrelation::Zero;
        v_rv_zero = run_random_vector_ensemble(p, shots, threads).v_ensemble.value;
        p.corr = NoiseCorrelation::Infinite;
        v_rv_inf = run_random_vector_ensemble(p, shots, threads).v_ensemble.value;
    }

    auto csv = out.open_csv("visibility_vs_T1.csv");
    csv << "T1_us,V_analytic,V_mc,V_mc_stderr,V_randomvector_zero_corr,V_randomvector_inf_corr\n";
    for (const auto& sc : scenarios) {
        if (sc.is_full_loop) continue;
        HalfLoopScenario h = sc.half;
        const auto r = run_half_loop(h, sc.noise, mc_shots, out.seed, threads);
        csv << fmt(h.t1 / units::us) << ',' << fmt(r.v_analytic) << ','
            << fmt(r.v_multishot.value) << ',' << fmt(r.v_multishot.err) << ','
            << fmt(v_rv_zero) << ',' << fmt(v_rv_inf) << "\n";
    }
    csv.close();
    const double dur = std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start)
                           .count();
    out.write_manifest("half-loop", dur);
    return 0;
}

int cmd_full_loop(const json& cfg, Output& out, int /*threads*/) {
    const auto t_start = std::chrono::steady_clock::now();

    ChipGeometry geom;
    geom.current = cfg.value("current_mA", 860.0) * units::mA;
    const double z_trap = cfg.value("z_trap_um", 95.0) * units::um;
    const double sigma = cfg.value("sigma_um", 1.2) * units::um;

    FullLoopSequence seq;
    const auto& t = cfg.at("times_us");
    seq.t1 = t.value("T1", 6.0) * units::us;
    seq.td1 = t.value("Td1", 300.0) * units::us;
    seq.t2 = t.value("T2", 6.0) * units::us;
    seq.t3 = t.value("T3", 6.0) * units::us;
    seq.td2 = t.value("Td2", 300.0) * units::us;
    seq.t4 = t.value("T4", 6.0) * units::us;
    seq.scheme = cfg.value("scheme", std::string("spin")) == "current"
                     ? LoopScheme::CurrentInversion
                     : LoopScheme::SpinInversion;

    WavepacketState init;
    init.r = {0.0, 0.0, z_trap};
    init.sigma0 = {sigma, sigma, sigma};

    // mismatch sweeps on top of an exactly reversible uniform-gradient loop
    const double f1 = kConst.hbar * differential_kick_rate(geom, z_trap, FieldModel::ThinWire);
    FullLoopSequence ideal = seq;
    ideal.t2 = ideal.t3 = 0.5 * (seq.t1 + seq.t4);
    ideal.td2 = ideal.td1;
    auto ideal_env = [&](bool high) {
        return make_uniform_gradient_environment(f1, full_loop_windows(ideal, high));
    };
    const auto base = run_full_loop(ideal, ideal_env, init);

    const auto mism = cfg.value("mismatch", json::object());
    const int mpoints = mism.value("points", 81);
    const double sigma_v = kConst.hbar / (2.0 * kConst.mass_rb87 * sigma);

    {
        auto csv = out.open_csv("visibility_vs_dz.csv");
        csv << "dz_um,dz_over_sigma,V\n";
        const double dzmax = mism.value("dz_max_sigma", 4.0) * sigma;
        for (int i = 0; i < mpoints; ++i) {
            const double dz = -dzmax + 2.0 * dzmax * i / (mpoints - 1);
            const auto& hi = base.branch_hi;
            const auto& lo = base.branch_lo;
            const double v =
                std::abs(overlap_general(hi.lambda[2], hi.lambda_dot[2], lo.lambda[2],
                                         lo.lambda_dot[2], sigma,
                                         (lo.r[2] - hi.r[2]) + dz,
                                         kConst.mass_rb87 * (lo.v[2] - hi.v[2]))) /
                std::abs(overlap_general(hi.lambda[2], hi.lambda_dot[2], lo.lambda[2],
                                         lo.lambda_dot[2], sigma, lo.r[2] - hi.r[2],
                                         kConst.mass_rb87 * (lo.v[2] - hi.v[2])));
            csv << fmt(dz / units::um) << ',' << fmt(dz / sigma) << ',' << fmt(v) << "\n";
        }
    }
    {
        auto csv = out.open_csv("visibility_vs_dp.csv");
        csv << "dv_mm_s,dv_over_sigma_v,V\n";
        const double dvmax = mism.value("dp_max_sigma", 4.0) * sigma_v;
        for (int i = 0; i < mpoints; ++i) {
            const double dv = -dvmax + 2.0 * dvmax * i / (mpoints - 1);
            const auto& hi = base.branch_hi;
            const auto& lo = base.branch_lo;
            const double dp = kConst.mass_rb87 * ((lo.v[2] - hi.v[2]) + dv);
            const double v =
                std::abs(overlap_general(hi.lambda[2], hi.lambda_dot[2], lo.lambda[2],
                                         lo.lambda_dot[2], sigma, lo.r[2] - hi.r[2], dp)) /
                std::abs(overlap_general(hi.lambda[2], hi.lambda_dot[2], lo.lambda[2],
                                         lo.lambda_dot[2], sigma, lo.r[2] - hi.r[2],
                                         kConst.mass_rb87 * (lo.v[2] - hi.v[2])));
            csv << fmt(dv / 1e-3) << ',' << fmt(dv / sigma_v) << ',' << fmt(v) << "\n";
        }
    }
    {
        auto csv = out.open_csv("scan_population.csv");
        csv << "T23_us,V,phase_rad,population\n";
        const auto scan_cfg = cfg.value("scan", json::object());
        auto chip_env = [&](const FullLoopSequence& s, bool high) {
            return make_chip_environment(geom, FieldModel::ThinWire, full_loop_windows(s, high));
        };
        const auto scan = run_full_loop_scan(
            seq, chip_env, init, scan_cfg.value("t23_min_us", 8.0) * units::us,
            scan_cfg.value("t23_max_us", 16.0) * units::us, scan_cfg.value("points", 161), 0.0);
        for (const auto& p : scan)
            csv << fmt(p.t23 / units::us) << ',' << fmt(p.visibility) << ',' << fmt(p.phase)
                << ',' << fmt(p.population) << "\n";
    }
    const double dur = std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start)
                           .count();
    out.write_manifest("full-loop", dur);
    return 0;
}

int cmd_hd_curves(const json& cfg, Output& out) {
    const auto t_start = std::chrono::steady_clock::now();
    const double sigma = cfg.value("sigma_um", 1.2) * units::um;
    const double zmax = cfg.value("tf_radius_um", 2.88) * units::um;
    const int points = cfg.value("points", 201);

    {
        auto csv = out.open_csv("hd_gaussian.csv");
        csv << "dz_over_sigma,dp_hbar_over_sigma,V_dz,V_dp\n";
        const double sp = kConst.hbar / (2.0 * sigma);
        for (int i = 0; i < points; ++i) {
            const double x = 4.0 * i / (points - 1);
            csv << fmt(x) << ',' << fmt(x) << ','
                << fmt(hd::visibility_gaussian(sigma, sp, x * sigma, 0.0)) << ','
                << fmt(hd::visibility_gaussian(sigma, sp, 0.0, x * kConst.hbar / sigma)) << "\n";
        }
    }
    {
        auto csv = out.open_csv("hd_thomas_fermi.csv");
        csv << "xi,V_tf_momentum,V_gaussian_surrogate,dz_over_zmax,V_tf_position\n";
        for (int i = 0; i < points; ++i) {
            const double xi = 12.0 * i / (points - 1);
            const double dzr = 3.0 * i / (points - 1);
            csv << fmt(xi) << ',' << fmt(hd::visibility_tf_momentum_xi(xi)) << ','
                << fmt(hd::visibility_tf_momentum_gaussian(xi * kConst.hbar / zmax, zmax)) << ','
                << fmt(dzr) << ',' << fmt(hd::visibility_tf_position(dzr * zmax, zmax)) << "\n";
        }
    }
    {
        auto csv = out.open_csv("bec_expansion.csv");
        csv << "t_ms,w_um\n";
        const double fz = cfg.value("f_z_hz", 127.0);
        const double fx = cfg.value("f_x_hz", 38.0);
        const auto b = hd::bec_size(cfg.value("n_atoms", 1e4), 2.0 * M_PI * fx, 2.0 * M_PI * fz,
                                    2.0 * M_PI * fz, 2.0 * M_PI * fz);
        for (int i = 0; i < points; ++i) {
            const double t = 6.0 * units::ms * i / (points - 1);
            csv << fmt(t / units::ms) << ','
                << fmt(hd::tf_expansion(b.w0, 2.0 * M_PI * fz, t) / units::um) << "\n";
        }
    }
    const double dur = std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start)
                           .count();
    out.write_manifest("hd-curves", dur);
    return 0;
}

int cmd_wigner_export(const json& cfg, Output& out) {
    const auto t_start = std::chrono::steady_clock::now();
    const double sigma = cfg.value("sigma_um", 0.12) * units::um;
    const double d = cfg.value("separation_um", 0.55) * units::um;
    const double psep = cfg.value("momentum_sep_hbar_per_um", 0.0) * kConst.hbar / units::um;
    const auto grid = cfg.value("grid", json::object());
    const int nz = grid.value("nz", 256), np = grid.value("np", 256);
    const double zspan = grid.value("z_span_sigma", 10.0);
    const double pspan = grid.value("p_span_hbar_sigma", 10.0);

    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    std::vector<GaussianComponent> comps{
        {-0.5 * d, -0.5 * psep, sigma, {inv_sqrt2, 0.0}},
        {+0.5 * d, +0.5 * psep, sigma, {inv_sqrt2, 0.0}},
    };
    const double zmax = 0.5 * d + zspan * sigma;
    const double pmax = 0.5 * std::abs(psep) + pspan * kConst.hbar / (2.0 * sigma);
    const auto m = wigner_map(comps, -zmax, zmax, nz, -pmax, pmax, np);

    auto csv = out.open_csv("wigner.csv");
    csv << "z_um,p_si,W\n";
    for (int iz = 0; iz < m.nz; ++iz)
        for (int ip = 0; ip < m.np; ++ip)
            csv << fmt((m.z_min + iz * m.dz) / units::um) << ','
                << fmt(m.p_min + ip * m.dp) << ',' << fmt(m.at(iz, ip)) << "\n";
    const double dur = std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start)
                           .count();
    out.write_manifest("wigner-export", dur);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Atom-chip interferometer sequence simulator"};
    app.require_subcommand(1);

    std::string config_path, out_dir = "out", scenario_label;
    std::uint64_t seed = 1;
    int threads = 0;
    app.add_option("--config", config_path, "JSON configuration file");
    app.add_option("--out", out_dir, "output directory");
    app.add_option("--seed", seed, "master RNG seed");
    app.add_option("--threads", threads, "worker threads (default: SGISIM_THREADS or 1)");
    app.add_option("--scenario", scenario_label, "run only the scenario with this label");

    auto* half = app.add_subcommand("half-loop", "splitting + stopping visibility table");
    auto* full = app.add_subcommand("full-loop", "four-pulse closed-loop scans");
    auto* hd = app.add_subcommand("hd-curves", "closed-form recombination visibility curves");
    auto* wig = app.add_subcommand("wigner-export", "analytic Wigner map of a split packet");
    for (auto* sub : {half, full, hd, wig}) sub->fallthrough();

    CLI11_PARSE(app, argc, argv);

    if (threads <= 0) {
        const char* env = std::getenv("SGISIM_THREADS");
        threads = env ? std::max(1, std::atoi(env)) : 1;
    }

    try {
        json cfg = json::object();
        if (!config_path.empty())
            cfg = load_json_file(config_path);
        else if (half->parsed())
            cfg = default_half_config();
        else if (full->parsed())
            cfg = default_full_config();
        else if (wig->parsed())
            cfg = default_wigner_config();
        if (!scenario_label.empty() && cfg.contains("scenarios")) {
            json filtered = json::array();
            for (const auto& e : cfg["scenarios"])
                if (e.value("label", "") == scenario_label) filtered.push_back(e);
            if (filtered.empty()) {
                std::fprintf(stderr, "no scenario labelled '%s'\n", scenario_label.c_str());
                return 2;
            }
            cfg["scenarios"] = filtered;
        }

        Output out{fs::path(out_dir), cfg, seed, {}};
        if (half->parsed()) return cmd_half_loop(cfg, out, threads);
        if (full->parsed()) return cmd_full_loop(cfg, out, threads);
        if (hd->parsed()) return cmd_hd_curves(cfg, out);
        if (wig->parsed()) return cmd_wigner_export(cfg, out);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
