/*
   Copyright 2026 The dwq Authors

   Licensed under the Apache License, Version 2.0 (the "License");
   you may not use this file except in compliance with the License.
   You may obtain a copy of the License at

       http://www.apache.org/licenses/LICENSE-2.0

   Unless required by applicable law or agreed to in writing, software
   distributed under the License is distributed on an "AS IS" BASIS,
   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
   See the License for the specific language governing permissions and
   limitations under the License.
*/

// dwq: command-line runner for the double-well simulator.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include <dwq/dwq.hpp>

#ifndef DWQ_VERSION
#define DWQ_VERSION "0.0.0"
#endif

namespace fs = std::filesystem;
using dwq::io::json;

namespace {

enum Exit { ok = 0, failure = 1, schema = 2, tolerance = 3, resource = 4 };

struct Common {
    std::vector<std::string> configs;
    std::vector<std::string> presets;
    std::uint64_t seed = 1;
    std::size_t traj = 16;
    std::optional<double> gamma;
    std::string out_dir = ".";
    unsigned workers = dwq::default_workers();
    double dt = 1e-3;
};

struct Loaded {
    dwq::io::ExperimentDocument doc;
    json source; // the document as given, so the manifest can replay it
};

Loaded load(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw dwq::SchemaError("cannot open config file " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw dwq::SchemaError("config is not valid JSON: " + std::string(e.what()));
    }
    return {dwq::io::parse_experiment(j), j};
}

std::vector<Loaded> inputs(const Common& c)
{
    std::vector<Loaded> out;
    for (const auto& p : c.configs) out.push_back(load(p));
    for (const auto& p : c.presets) {
        json j = {{"preset", p}};
        out.push_back({dwq::io::parse_experiment(j), j});
    }
    if (out.empty()) throw dwq::SchemaError("give --config or --preset");
    return out;
}

const Loaded& single_input(const std::vector<Loaded>& in)
{
    if (in.size() != 1) throw dwq::SchemaError("this command takes exactly one --config or --preset");
    return in.front();
}

/// Collects outputs and writes manifest.json when the command finishes.
class Run {
public:
    Run(std::string command, const Common& common, int argc, char** argv)
        : command_(std::move(command)), dir_(common.out_dir), start_(std::chrono::steady_clock::now())
    {
        fs::create_directories(dir_);
        for (int i = 0; i < argc; ++i) argv_.emplace_back(argv[i]);
        manifest_["seeds"] = {{"base_seed", common.seed}, {"n_traj", common.traj}};
        manifest_["workers"] = common.workers;
        manifest_["dt"] = common.dt;
    }

    fs::path path(const std::string& name)
    {
        outputs_.push_back(name);
        return dir_ / name;
    }

    void config(const Loaded& in)
    {
        json e;
        e["document"] = in.source;
        e["resolved"] = dwq::io::to_json(in.doc.config);
        e["hash"] = dwq::io::config_hash(in.doc.config);
        manifest_["configs"].push_back(e);
    }

    void grid(const dwq::solver::GridSpec& g, const std::string& label = "")
    {
        json j = {{"n", g.n}, {"dx", g.dx}, {"absorb_fraction", g.absorb_fraction}};
        if (!label.empty()) j["label"] = label;
        manifest_["grids"].push_back(j);
    }

    json& extra() { return manifest_; }

    void finish()
    {
        manifest_["tool"] = "dwq";
        manifest_["version"] = DWQ_VERSION;
        manifest_["command"] = command_;
        manifest_["argv"] = argv_;
        if (manifest_.contains("configs")) {
            std::string joined;
            for (const auto& c : manifest_["configs"]) joined += c["hash"].get<std::string>();
            manifest_["config_hash"] = manifest_["configs"].size() == 1 ? manifest_["configs"][0]["hash"].get<std::string>()
                                                                         : dwq::io::fnv1a_hex(joined);
        }
        manifest_["wall_time_s"] =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
        json inv = json::array();
        for (const auto& o : outputs_) {
            std::error_code ec;
            const auto bytes = fs::file_size(dir_ / o, ec);
            inv.push_back({{"file", o}, {"bytes", ec ? 0 : bytes}});
        }
        manifest_["outputs"] = inv;
        dwq::io::write_json(dir_ / "manifest.json", manifest_);
    }

private:
    std::string command_;
    fs::path dir_;
    std::chrono::steady_clock::time_point start_;
    std::vector<std::string> argv_;
    std::vector<std::string> outputs_;
    json manifest_ = json::object();
};

json report_json(const dwq::analysis::FringeReport& r)
{
    auto ext = [](const dwq::analysis::Extremum& e) { return json{{"x", e.x}, {"value", e.value}}; };
    return {{"fringes", r.fringes},   {"visibility", r.visibility}, {"separation", r.separation},
            {"direction", r.direction}, {"smoothing", r.smoothing}, {"max1", ext(r.max1)},
            {"min1", ext(r.min1)},     {"max2", ext(r.max2)}};
}

void write_profile(const fs::path& p, const dwq::analysis::DistributionProfile& prof, const char* axis = "x")
{
    if (prof.std_error.empty()) {
        dwq::io::CsvWriter csv(p, {axis, "density"});
        for (std::size_t j = 0; j < prof.x.size(); ++j) csv.row({prof.x[j], prof.density[j]});
    } else {
        dwq::io::CsvWriter csv(p, {axis, "density", "std_error"});
        for (std::size_t j = 0; j < prof.x.size(); ++j) csv.row({prof.x[j], prof.density[j], prof.std_error[j]});
    }
}

std::vector<double> parse_list(const std::string& s)
{
    std::vector<double> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t pos = 0;
            out.push_back(std::stod(item, &pos));
            if (pos != item.size()) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw dwq::SchemaError("bad number '" + item + "' in list");
        }
    }
    if (out.empty()) throw dwq::SchemaError("empty value list");
    return out;
}

dwq::analysis::RunSettings settings(const Common& c)
{
    dwq::analysis::RunSettings rs;
    rs.dt = c.dt;
    rs.workers = c.workers;
    rs.plan.workers = c.workers;
    return rs;
}

// --------------------------------------------------------------- commands

int cmd_scales(const Common& common, int argc, char** argv)
{
    const auto in = inputs(common);
    Run run("scales", common, argc, argv);
    json all = json::array();
    for (const auto& i : in) {
        run.config(i);
        const auto& c = i.doc.config;
        const auto s = dwq::derive_scales(c, i.doc.spectra);
        json j;
        j["label"] = c.label;
        j["eta"] = s.eta;
        j["squeezing_s0_db"] = s.squeezing_s0;
        j["frequency_ratio"] = c.frequency_ratio();
        j["t_max"] = s.t_max;
        j["t_max_formula"] = s.t_max_formula;
        j["t_d"] = s.t_d;
        j["t_max_seconds"] = *s.t_max_seconds;
        j["outer_turning_point_x_zpf"] = s.outer_turning_point;
        j["fringe_estimate_x_zpf"] = s.fringe_estimate;
        if (s.x_zpf) j["x_zpf_m"] = *s.x_zpf;
        if (s.p_zpf) j["p_zpf_kg_m_s"] = *s.p_zpf;
        for (const auto& w : c.regime_warnings()) j["warnings"].push_back(w);
        if (s.gas) {
            j["gas"] = {{"t_gas_s", s.gas->t_gas}};
            if (s.gas->feasible) j["gas"]["feasible"] = *s.gas->feasible;
        }
        if (s.budget) {
            auto& b = j["budget_omega_t"];
            if (s.budget->thermal) {
                b["thermal"] = *s.budget->thermal;
                b["thermal_quoted_case"] = *s.budget->thermal_quoted_case;
            }
            b["potential_bound"] = s.budget->potential_bound;
            if (s.budget->force) b["force"] = *s.budget->force;
            b["total"] = s.budget->total;
        }
        all.push_back(j);
    }
    dwq::io::write_json(run.path("scales.json"), all);
    std::cout << all.dump(2) << '\n';
    run.finish();
    return ok;
}

int cmd_classical(const Common& common, int periods, int argc, char** argv)
{
    const auto all = inputs(common);
    const auto& in = single_input(all);
    const auto& c = in.doc.config;
    Run run("classical", common, argc, argv);
    run.config(in);
    dwq::classical::OrbitOptions opt;
    opt.periods = periods;
    const auto tr = dwq::classical::integrate_orbit(c, common.dt, opt);
    {
        dwq::io::CsvWriter csv(run.path("classical.csv"), {"t", "x_c", "p_c"});
        for (std::size_t i = 0; i < tr.times.size(); ++i) csv.row({tr.times[i], tr.positions[i], tr.momenta[i]});
    }
    json ev;
    ev["units"] = {{"t", "1/omega_dw"}, {"x", "d"}, {"p", "m omega_dw d"}, {"E", "m omega_dw^2 d^2"}};
    if (tr.t_max) ev["t_max"] = *tr.t_max;
    if (tr.t_d) ev["t_d"] = *tr.t_d;
    ev["x_out"] = dwq::classical::outer_turning_point(c.start_ratio);
    ev["E"] = tr.energy0;
    ev["energy_drift_per_period"] = tr.energy_drift;
    dwq::io::write_json(run.path("events.json"), ev);
    run.finish();
    return ok;
}

int cmd_gaussian(const Common& common, int periods, int argc, char** argv)
{
    const auto all = inputs(common);
    const auto& in = single_input(all);
    const auto& c = in.doc.config;
    Run run("gaussian", common, argc, argv);
    run.config(in);
    dwq::classical::OrbitOptions opt;
    opt.periods = periods;
    const auto tr = dwq::classical::integrate_orbit(c, common.dt, opt);
    auto emit = [&](const std::string& name, double gamma) {
        const auto tl = dwq::gaussian::propagate_moments(tr, c, gamma, {1e-9, 10});
        dwq::io::CsvWriter csv(run.path(name),
                               {"t", "sigma_xx", "sigma_xp", "sigma_pp", "dx_over_xzpf", "squeezing_db"});
        for (const auto& s : tl)
            csv.row({s.t, s.sxx, s.sxp, s.spp, dwq::gaussian::delta_x(s), dwq::gaussian::squeezing_db(s)});
    };
    // The squeezing curve is produced both without and with decoherence.
    emit("gaussian.csv", 0.0);
    const double g = common.gamma.value_or(c.decoherence_rate);
    if (g > 0.0) emit("gaussian_gamma.csv", g);
    run.extra()["gamma"] = g;
    run.finish();
    return ok;
}

int cmd_evolve(const Common& common, double t_end_over_tmax, std::size_t snapshots, bool wigner, double edge,
               int argc, char** argv)
{
    using namespace dwq;
    const auto all = inputs(common);
    const auto& in = single_input(all);
    const auto& c = in.doc.config;
    Run run("evolve", common, argc, argv);
    run.config(in);
    const double gamma = common.gamma.value_or(c.decoherence_rate);
    const double g_int = gamma * c.frequency_ratio();
    const double t_max = analysis::orbit_t_max(c);
    const double t_end = t_end_over_tmax * t_max;
    detail::require(t_end > 0.0, "--t-end must be > 0");
    detail::require(snapshots >= 1, "--snapshots must be >= 1");

    auto po = t_end <= t_max * (1.0 + 1e-9) ? analysis::RunSettings::fringe_plan() : solver::PlanOptions{};
    po.dt = common.dt;
    po.workers = common.workers;
    po.snapshots = snapshots + 1;
    const auto plan = solver::choose_grid(c, t_end, gamma, po);
    run.grid(plan.grid);
    run.extra()["gamma"] = gamma;
    run.extra()["t_end"] = t_end;
    run.extra()["edge_threshold"] = edge;

    const auto model = solver::CoMovingModel::double_well(c, t_end + 0.1);
    solver::RunOptions ro;
    ro.dt = common.dt;
    ro.t_end = t_end;
    for (std::size_t k = 0; k <= snapshots; ++k)
        ro.snapshot_times.push_back(t_end * static_cast<double>(k) / static_cast<double>(snapshots));
    ro.noise = {g_int, common.seed, 0, 0, 1.0};
    ro.edge_threshold = edge;
    const auto rec = solver::run_trajectory(model, plan.grid, ro);

    {
        io::CsvWriter csv(run.path("timeline.csv"), {"t", "x_c", "p_c", "mean_x", "mean_p", "delta_x", "delta_p",
                                                     "norm", "excess_kurtosis", "energy"});
        for (const auto& s : rec.samples)
            csv.row({s.t, s.x_c, s.p_c, s.mean_x, s.mean_p, s.delta_x, s.delta_p, s.norm, s.excess_kurtosis, s.energy});
    }

    const std::size_t n_traj = g_int > 0.0 ? common.traj : 1;
    std::vector<std::vector<double>> dens, errs;
    if (n_traj > 1) {
        auto base = ro;
        base.sample_every = 0;
        base.edge_threshold = edge;
        auto ens = solver::run_ensemble(model, plan.grid, base, g_int, n_traj, common.seed, common.workers);
        dens = std::move(ens.density);
        errs = std::move(ens.std_error);
    } else {
        for (const auto& s : rec.snapshots) dens.push_back(s.density());
    }

    json reports = json::array();
    for (std::size_t k = 0; k < dens.size(); ++k) {
        analysis::ProfileMeta meta;
        meta.label = c.label;
        meta.time = ro.snapshot_times[k];
        meta.gamma = gamma;
        meta.n_traj = n_traj;
        const auto prof = analysis::make_profile(plan.grid, dens[k], meta, errs.empty() ? std::vector<double>{} : errs[k]);
        const std::string tag = std::to_string(k);
        write_profile(run.path("distribution_" + tag + ".csv"), prof);
        json r = report_json(analysis::fringe_report(prof, analysis::fringe_options(c)));
        r["t"] = meta.time;
        r["lost_mass"] = prof.lost_mass;
        reports.push_back(r);
        io::write_snapshot(run.path("snapshot_" + tag + ".bin"), rec.snapshots[k],
                           {{"trajectory", 0}, {"seed", common.seed}});
        if (wigner) {
            // window: where the density exceeds 1e-4 of its peak, at most 400 columns
            const auto& d = dens[k];
            const double top = *std::max_element(d.begin(), d.end());
            std::size_t lo = 0, hi = d.size() - 1;
            while (lo < hi && d[lo] < 1e-4 * top) ++lo;
            while (hi > lo && d[hi] < 1e-4 * top) --hi;
            solver::WignerWindow w;
            w.x_min = plan.grid.x(lo);
            w.x_max = plan.grid.x(hi);
            w.x_stride = std::max<std::size_t>(1, (hi - lo) / 400);
            const FftPlan fft(plan.grid.n);
            ComplexVector scratch(plan.grid.n);
            const auto mom = solver::measure(rec.snapshots[k], fft, {}, scratch);
            const double p_half =
                std::min(std::abs(mom.mean_p) + 6.0 * std::sqrt(mom.var_p) + 1.0, 0.9 * plan.grid.k_nyquist());
            w.p_min = -p_half;
            w.p_max = p_half;
            w.max_dp = p_half / 200.0;
            const auto map = solver::wigner(rec.snapshots[k], w);
            io::write_wigner_csv(run.path("wigner_" + tag + ".csv"), map);
            io::write_wigner_raster(run.path("wigner_" + tag + ".bin"), map, {{"t", meta.time}});
        }
    }
    io::write_json(run.path("fringes.json"), reports);
    run.extra()["max_edge_mass"] = rec.max_edge_mass;
    run.extra()["steps"] = rec.steps;
    run.finish();
    return ok;
}

int cmd_sweep(const Common& common, const std::string& axis, const std::string& values_arg, std::size_t nodes,
              int argc, char** argv)
{
    using namespace dwq;
    const auto in = inputs(common);
    const auto values = parse_list(values_arg);
    Run run("sweep", common, argc, argv);
    run.extra()["axis"] = axis;
    run.extra()["values"] = values;
    json reports = json::array();

    if (axis == "gamma" || axis == "collapsed") {
        std::vector<analysis::VisibilityCurve> curves;
        for (const auto& i : in) {
            const auto& c = i.doc.config;
            run.config(i);
            std::vector<double> gammas = values;
            if (axis == "collapsed") {
                const double eta = delocalization(c);
                for (auto& g : gammas) g /= c.frequency_ratio() * eta * eta;
            }
            analysis::SweepOptions so;
            so.n_traj = common.traj;
            so.seed = common.seed;
            so.run = settings(common);
            auto curve = analysis::visibility_sweep(c, gammas, so);
            run.grid(curve.grid, c.label);
            {
                io::CsvWriter csv(run.path("curve_" + c.label + ".csv"), {"gamma", "visibility"});
                for (const auto& p : curve.points) csv.row({p.gamma, p.visibility});
            }
            {
                io::CsvWriter csv(run.path("collapsed_" + c.label + ".csv"), {"gamma_eta2_over_omega_dw", "visibility"});
                for (const auto& p : curve.points) csv.row({p.collapsed, p.visibility});
            }
            for (const auto& p : curve.points) {
                json r = report_json(p.report);
                r["label"] = c.label;
                r["gamma"] = p.gamma;
                r["collapsed"] = p.collapsed;
                reports.push_back(r);
            }
            curves.push_back(std::move(curve));
        }
        if (curves.size() >= 2) {
            const auto cr = analysis::scaling_collapse(curves);
            io::write_json(run.path("collapse.json"),
                           {{"levels", cr.levels}, {"spreads", cr.spreads}, {"max_spread", cr.max_spread}});
        }
    } else if (axis == "sigma_s" || axis == "nbar" || axis == "sigma_t") {
        const auto& i = single_input(in);
        const auto& c = i.doc.config;
        run.config(i);
        const double gamma = common.gamma.value_or(c.decoherence_rate);
        analysis::ImperfectionOptions io_opt;
        io_opt.position_nodes = io_opt.momentum_nodes = io_opt.time_nodes = nodes;
        io_opt.noise_traj = common.traj;
        io_opt.seed = common.seed;
        io_opt.run = settings(common);
        io::CsvWriter csv(run.path("imperfection_" + axis + ".csv"), {axis, "visibility"});
        for (double v : values) {
            const double ss = axis == "sigma_s" ? v : c.position_imprecision;
            const double nb = axis == "nbar" ? v : c.mean_phonons;
            const double st = axis == "sigma_t" ? v : c.timing_imprecision;
            const auto res = analysis::imperfection_average(c, gamma, ss, nb, st, io_opt);
            const auto rep = analysis::fringe_report(res.profile, analysis::fringe_options(c));
            csv.row({v, rep.visibility});
            json r = report_json(rep);
            r[axis] = v;
            r["nodes"] = res.nodes.size();
            r["pruned_weight"] = res.pruned_weight;
            reports.push_back(r);
            run.grid(res.grid, axis + "=" + std::to_string(v));
        }
    } else {
        throw SchemaError("unknown sweep axis '" + axis + "' (gamma, collapsed, sigma_s, nbar, sigma_t)");
    }
    io::write_json(run.path("fringes.json"), reports);
    run.finish();
    return ok;
}

int cmd_pair(const Common& common, const std::string& mode_name, int argc, char** argv)
{
    using namespace dwq;
    const auto all = inputs(common);
    const auto& in = single_input(all);
    const auto& c = in.doc.config;
    analysis::NoiseMode mode;
    if (mode_name == "collective") mode = analysis::NoiseMode::collective;
    else if (mode_name == "independent") mode = analysis::NoiseMode::independent;
    else throw SchemaError("--mode must be collective or independent");
    Run run("pair", common, argc, argv);
    run.config(in);
    const double gamma = common.gamma.value_or(c.decoherence_rate);
    analysis::PairOptions po;
    po.n_real = common.traj;
    po.seed = common.seed;
    po.run = settings(common);
    const auto res = analysis::run_pair(c, mode, gamma, po);
    run.grid(res.grid);
    run.extra()["gamma"] = gamma;
    run.extra()["mode"] = mode_name;
    write_profile(run.path("relative.csv"), res.relative, "r");
    write_profile(run.path("single.csv"), res.single);
    io::write_json(run.path("fringes.json"),
                   {{"relative", report_json(res.relative_report)}, {"single", report_json(res.single_report)}});
    run.finish();
    return ok;
}

void diagnostic(const std::string& out_dir, const char* kind, const std::exception& e)
{
    const json d = {{"error", kind}, {"message", e.what()}};
    std::cerr << d.dump() << '\n';
    try {
        fs::create_directories(out_dir);
        dwq::io::write_json(fs::path(out_dir) / "diagnostic.json", d);
    } catch (...) {
    }
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Double-well levitated-particle simulator"};
    app.set_version_flag("--version", DWQ_VERSION);
    app.require_subcommand(1);
    Common common;
    int periods = 1;
    double t_end = 1.0;
    std::size_t snapshots = 1;
    bool no_wigner = false;
    double edge = 1e-6;
    std::string axis = "gamma", values, mode = "collective";
    std::size_t nodes = 15;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", common.configs, "experiment JSON (repeatable)");
        sub->add_option("--preset", common.presets, "named parameter set (repeatable)");
        sub->add_option("--seed", common.seed, "base seed");
        sub->add_option("--traj", common.traj, "noise realisations");
        sub->add_option("--gamma", common.gamma, "decoherence rate, units of omega_t");
        sub->add_option("--out-dir", common.out_dir, "output directory");
        sub->add_option("--workers", common.workers, "worker threads (default: DWQ_WORKERS or 1)");
        sub->add_option("--dt", common.dt, "time step, 1/omega_dw");
    };
    auto* scales = app.add_subcommand("scales", "derived scales and noise budget");
    add_common(scales);
    auto* classical = app.add_subcommand("classical", "classical orbit and events");
    add_common(classical);
    classical->add_option("--periods", periods, "full periods to integrate");
    auto* gaussian = app.add_subcommand("gaussian", "second-moment timeline");
    add_common(gaussian);
    gaussian->add_option("--periods", periods, "full periods to integrate");
    auto* evolve = app.add_subcommand("evolve", "grid evolution, distributions and Wigner maps");
    add_common(evolve);
    evolve->add_option("--t-end", t_end, "end time in units of t_max");
    evolve->add_option("--snapshots", snapshots, "snapshot intervals between 0 and t_end");
    evolve->add_flag("--no-wigner", no_wigner, "skip Wigner maps");
    evolve->add_option("--edge-threshold", edge, "largest tolerated probability in the momentum-grid edge bins");
    auto* sweep = app.add_subcommand("sweep", "visibility curves and imperfection scans");
    add_common(sweep);
    sweep->add_option("--axis", axis, "gamma | collapsed | sigma_s | nbar | sigma_t");
    sweep->add_option("--values", values, "comma-separated axis values")->required();
    sweep->add_option("--nodes", nodes, "quadrature nodes per imperfection dimension");
    auto* pair = app.add_subcommand("pair", "two-particle relative distribution");
    add_common(pair);
    pair->add_option("--mode", mode, "collective | independent");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return schema;
    }

    try {
        if (common.workers == 0) throw dwq::SchemaError("--workers must be >= 1");
        if (*scales) return cmd_scales(common, argc, argv);
        if (*classical) return cmd_classical(common, periods, argc, argv);
        if (*gaussian) return cmd_gaussian(common, periods, argc, argv);
        if (*evolve) return cmd_evolve(common, t_end, snapshots, !no_wigner, edge, argc, argv);
        if (*sweep) return cmd_sweep(common, axis, values, nodes, argc, argv);
        if (*pair) return cmd_pair(common, mode, argc, argv);
    } catch (const dwq::SchemaError& e) {
        diagnostic(common.out_dir, "schema", e);
        return schema;
    } catch (const dwq::DomainError& e) {
        diagnostic(common.out_dir, "schema", e);
        return schema;
    } catch (const dwq::ToleranceError& e) {
        diagnostic(common.out_dir, "tolerance", e);
        return tolerance;
    } catch (const dwq::NoFringeError& e) {
        diagnostic(common.out_dir, "tolerance", e);
        return tolerance;
    } catch (const dwq::GridError& e) {
        diagnostic(common.out_dir, "tolerance", e);
        return tolerance;
    } catch (const dwq::ResourceError& e) {
        diagnostic(common.out_dir, "resource", e);
        return resource;
    } catch (const std::exception& e) {
        diagnostic(common.out_dir, "error", e);
        return failure;
    }
    return failure;
}
