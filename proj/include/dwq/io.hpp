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

#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "config.hpp"
#include "errors.hpp"
#include "wave.hpp"
#include "wigner.hpp"

namespace dwq::io {

using nlohmann::json;

// ------------------------------------------------------------------ config

namespace detail {

struct Quantity {
    double value;
    std::string unit;
};

inline Quantity quantity(const json& doc, const char* key)
{
    const auto& q = doc.at(key);
    if (!q.is_object() || !q.contains("value") || !q.contains("unit"))
        throw SchemaError(std::string("field '") + key + "' must be an object {\"value\", \"unit\"}");
    if (!q.at("value").is_number()) throw SchemaError(std::string("field '") + key + "': value must be a number");
    if (!q.at("unit").is_string()) throw SchemaError(std::string("field '") + key + "': unit must be a string");
    for (const auto& [k, v] : q.items())
        if (k != "value" && k != "unit") throw SchemaError(std::string("field '") + key + "': unknown key '" + k + "'");
    return {q.at("value").get<double>(), q.at("unit").get<std::string>()};
}

[[noreturn]] inline void bad_unit(const char* key, const std::string& unit)
{
    throw SchemaError(std::string("field '") + key + "': unsupported unit '" + unit + "'");
}

inline void known_keys(const json& doc, std::initializer_list<const char*> keys, const char* where)
{
    std::set<std::string> allowed(keys.begin(), keys.end());
    for (const auto& [k, v] : doc.items())
        if (!allowed.count(k)) throw SchemaError(std::string(where) + ": unknown field '" + k + "'");
}

} // namespace detail

/// Experiment document plus optional noise description.
struct ExperimentDocument {
    ExperimentConfig config;
    std::optional<NoiseSpectra> spectra;
};

/// Parses an experiment document. Every physical field carries its unit:
///
///   trap_frequency    rad/s | Hz
///   well_frequency    rad/s | Hz | omega_t (ratio omega_dw/omega_t)
///   well_length       x_zpf | m (needs mass)
///   start_position    d | x_zpf
///   mean_phonons      1
///   decoherence_rate  omega_t | 1/s
///   position_imprecision  x_zpf | m (needs mass)
///   timing_imprecision    1/omega_dw | s
///   mass              kg
///
/// "preset" seeds every field from a named parameter set; explicit fields
/// override it. The optional "noise" block holds s1, s2 (s), sf (N^2 s),
/// particle_radius (m), internal_temperature (K) and gas {molecule_mass kg,
/// temperature K, pressure Pa | mbar}.
inline ExperimentDocument parse_experiment(const json& doc)
{
    using detail::quantity;
    if (!doc.is_object()) throw SchemaError("experiment document must be a JSON object");
    detail::known_keys(doc,
                       {"label", "preset", "mass", "trap_frequency", "well_frequency", "well_length", "start_position",
                        "mean_phonons", "decoherence_rate", "position_imprecision", "timing_imprecision", "noise"},
                       "experiment");
    ExperimentDocument out;
    auto& c = out.config;
    try {
        if (doc.contains("preset")) c = preset(doc.at("preset").get<std::string>());
        else {
            for (const char* k : {"well_frequency", "well_length", "start_position"})
                if (!doc.contains(k)) throw SchemaError(std::string("missing required field '") + k + "'");
        }
        if (doc.contains("label")) c.label = doc.at("label").get<std::string>();
        if (doc.contains("mass")) {
            const auto q = quantity(doc, "mass");
            if (q.unit != "kg") detail::bad_unit("mass", q.unit);
            c.mass = q.value;
        }
        if (doc.contains("trap_frequency")) {
            const auto q = quantity(doc, "trap_frequency");
            if (q.unit == "rad/s") c.trap_frequency = q.value;
            else if (q.unit == "Hz") c.trap_frequency = constants::two_pi * q.value;
            else detail::bad_unit("trap_frequency", q.unit);
        }
        if (doc.contains("well_frequency")) {
            const auto q = quantity(doc, "well_frequency");
            if (q.unit == "rad/s") c.well_frequency = q.value;
            else if (q.unit == "Hz") c.well_frequency = constants::two_pi * q.value;
            else if (q.unit == "omega_t") c.well_frequency = q.value * c.trap_frequency;
            else detail::bad_unit("well_frequency", q.unit);
        }
        auto x_zpf_si = [&]() {
            if (!c.mass) throw SchemaError("lengths in metres need the mass field");
            return std::sqrt(constants::hbar / (2.0 * *c.mass * c.trap_frequency));
        };
        if (doc.contains("well_length")) {
            const auto q = quantity(doc, "well_length");
            if (q.unit == "x_zpf") c.well_length = q.value;
            else if (q.unit == "m") c.well_length = q.value / x_zpf_si();
            else detail::bad_unit("well_length", q.unit);
        }
        if (doc.contains("start_position")) {
            const auto q = quantity(doc, "start_position");
            if (q.unit == "d") c.start_ratio = q.value;
            else if (q.unit == "x_zpf") c.start_ratio = q.value / c.well_length;
            else detail::bad_unit("start_position", q.unit);
        }
        if (doc.contains("mean_phonons")) {
            const auto q = quantity(doc, "mean_phonons");
            if (q.unit != "1") detail::bad_unit("mean_phonons", q.unit);
            c.mean_phonons = q.value;
        }
        if (doc.contains("decoherence_rate")) {
            const auto q = quantity(doc, "decoherence_rate");
            if (q.unit == "omega_t") c.decoherence_rate = q.value;
            else if (q.unit == "1/s") c.decoherence_rate = q.value / c.trap_frequency;
            else detail::bad_unit("decoherence_rate", q.unit);
        }
        if (doc.contains("position_imprecision")) {
            const auto q = quantity(doc, "position_imprecision");
            if (q.unit == "x_zpf") c.position_imprecision = q.value;
            else if (q.unit == "m") c.position_imprecision = q.value / x_zpf_si();
            else detail::bad_unit("position_imprecision", q.unit);
        }
        if (doc.contains("timing_imprecision")) {
            const auto q = quantity(doc, "timing_imprecision");
            if (q.unit == "1/omega_dw") c.timing_imprecision = q.value;
            else if (q.unit == "s") c.timing_imprecision = q.value * c.well_frequency;
            else detail::bad_unit("timing_imprecision", q.unit);
        }
        if (doc.contains("noise")) {
            const auto& nd = doc.at("noise");
            if (!nd.is_object()) throw SchemaError("noise must be an object");
            detail::known_keys(nd, {"s1", "s2", "sf", "gas", "particle_radius", "internal_temperature"}, "noise");
            NoiseSpectra sp;
            auto take = [&](const json& d, const char* key, const char* unit, double& dst) {
                if (!d.contains(key)) return;
                const auto q = quantity(d, key);
                if (q.unit != unit) detail::bad_unit(key, q.unit);
                dst = q.value;
            };
            take(nd, "s1", "s", sp.s1);
            take(nd, "s2", "s", sp.s2);
            take(nd, "sf", "N^2 s", sp.sf);
            if (nd.contains("particle_radius")) {
                double r = 0.0;
                take(nd, "particle_radius", "m", r);
                sp.particle_radius = r;
            }
            if (nd.contains("internal_temperature")) {
                double t = 0.0;
                take(nd, "internal_temperature", "K", t);
                sp.internal_temperature = t;
            }
            if (nd.contains("gas")) {
                const auto& g = nd.at("gas");
                if (!g.is_object()) throw SchemaError("noise.gas must be an object");
                detail::known_keys(g, {"molecule_mass", "temperature", "pressure"}, "noise.gas");
                GasSpec gas;
                take(g, "molecule_mass", "kg", gas.molecule_mass);
                take(g, "temperature", "K", gas.temperature);
                if (g.contains("pressure")) {
                    const auto q = quantity(g, "pressure");
                    if (q.unit == "Pa") gas.pressure = q.value;
                    else if (q.unit == "mbar") gas.pressure = 100.0 * q.value;
                    else detail::bad_unit("pressure", q.unit);
                }
                sp.gas = gas;
            }
            sp.validate();
            out.spectra = sp;
        }
    } catch (const json::exception& e) {
        throw SchemaError(std::string("malformed experiment document: ") + e.what());
    } catch (const DomainError& e) {
        throw SchemaError(e.what());
    }
    try {
        c.validate();
    } catch (const DomainError& e) {
        throw SchemaError(e.what());
    }
    return out;
}

inline ExperimentDocument load_experiment(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) throw SchemaError("cannot open config file " + path.string());
    json doc;
    try {
        in >> doc;
    } catch (const json::exception& e) {
        throw SchemaError("config is not valid JSON: " + std::string(e.what()));
    }
    return parse_experiment(doc);
}

/// Canonical description in internal units; hashing this identifies a run.
inline json to_json(const ExperimentConfig& c)
{
    json j;
    j["label"] = c.label;
    if (c.mass) j["mass_kg"] = *c.mass;
    j["trap_frequency_rad_s"] = c.trap_frequency;
    j["well_frequency_rad_s"] = c.well_frequency;
    j["well_length_x_zpf"] = c.well_length;
    j["start_position_d"] = c.start_ratio;
    j["mean_phonons"] = c.mean_phonons;
    j["decoherence_rate_omega_t"] = c.decoherence_rate;
    j["position_imprecision_x_zpf"] = c.position_imprecision;
    j["timing_imprecision_inv_omega_dw"] = c.timing_imprecision;
    return j;
}

/// 64-bit FNV-1a, printed as 16 hex digits.
inline std::string fnv1a_hex(const std::string& s)
{
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char ch : s) {
        h ^= ch;
        h *= 0x100000001b3ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

inline std::string config_hash(const ExperimentConfig& c) { return fnv1a_hex(to_json(c).dump()); }

// --------------------------------------------------------------------- CSV

/// Column-major CSV with a header row; numbers as %.12g so reruns are
/// byte-identical.
class CsvWriter {
public:
    CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header) : out_(path)
    {
        if (!out_) throw Error("cannot write " + path.string());
        for (std::size_t i = 0; i < header.size(); ++i) out_ << (i ? "," : "") << header[i];
        out_ << '\n';
        width_ = header.size();
    }

    void row(std::initializer_list<double> values) { row(std::vector<double>(values)); }
    void row(const std::vector<double>& values)
    {
        if (values.size() != width_) throw Error("CSV row width does not match header");
        char buf[32];
        for (std::size_t i = 0; i < values.size(); ++i) {
            std::snprintf(buf, sizeof buf, "%.12g", values[i] == 0.0 ? 0.0 : values[i]); // no "-0"
            out_ << (i ? "," : "") << buf;
        }
        out_ << '\n';
    }

private:
    std::ofstream out_;
    std::size_t width_ = 0;
};

// ---------------------------------------------------------------- binaries

inline constexpr char snapshot_magic[9] = "DWQSNAP1";
inline constexpr char raster_magic[9] = "DWQWIGN1";

namespace detail {

inline void write_blob(const std::filesystem::path& path, const char* magic, const json& header, const void* data,
                       std::size_t bytes)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path.string());
    const std::string h = header.dump();
    const std::uint64_t len = h.size();
    out.write(magic, 8);
    out.write(reinterpret_cast<const char*>(&len), sizeof len); // little-endian hosts only
    out.write(h.data(), static_cast<std::streamsize>(h.size()));
    out.write(static_cast<const char*>(data), static_cast<std::streamsize>(bytes));
}

inline json read_blob(const std::filesystem::path& path, const char* magic, std::vector<char>& payload)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot read " + path.string());
    char m[8];
    in.read(m, 8);
    if (!in || std::memcmp(m, magic, 8) != 0) throw SchemaError(path.string() + ": bad magic");
    std::uint64_t len = 0;
    in.read(reinterpret_cast<char*>(&len), sizeof len);
    if (!in || len > (1ull << 30)) throw SchemaError(path.string() + ": bad header length");
    std::string h(len, '\0');
    in.read(h.data(), static_cast<std::streamsize>(len));
    payload.assign(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
    try {
        return json::parse(h);
    } catch (const json::exception& e) {
        throw SchemaError(path.string() + ": bad header: " + e.what());
    }
}

} // namespace detail

/// "DWQSNAP1", u64 header length, JSON header, then n complex<double>.
inline void write_snapshot(const std::filesystem::path& path, const solver::WaveState& s, json extra = json::object())
{
    json h = std::move(extra);
    h["grid"] = {{"n", s.grid.n}, {"dx", s.grid.dx}, {"absorb_fraction", s.grid.absorb_fraction}};
    h["t"] = s.t;
    h["steps"] = s.steps;
    h["frame"] = {{"x_c", s.frame.x_c}, {"p_c", s.frame.p_c}, {"v_c", s.frame.v_c}, {"dv_c", s.frame.dv_c},
                  {"phase", s.frame_phase}};
    h["dtype"] = "complex128";
    h["units"] = {{"x", "x_zpf"}, {"t", "1/omega_dw"}};
    detail::write_blob(path, snapshot_magic, h, s.psi.data(), s.psi.size() * sizeof(Complex));
}

inline solver::WaveState read_snapshot(const std::filesystem::path& path)
{
    std::vector<char> payload;
    const auto h = detail::read_blob(path, snapshot_magic, payload);
    solver::WaveState s;
    try {
        s.grid = {h.at("grid").at("n").get<std::size_t>(), h.at("grid").at("dx").get<double>(),
                  h.at("grid").at("absorb_fraction").get<double>()};
        s.t = h.at("t").get<double>();
        s.steps = h.at("steps").get<std::uint64_t>();
        const auto& f = h.at("frame");
        s.frame = {f.at("x_c").get<double>(), f.at("p_c").get<double>(), f.at("v_c").get<double>(),
                   f.at("dv_c").get<double>()};
        s.frame_phase = f.at("phase").get<double>();
    } catch (const json::exception& e) {
        throw SchemaError(path.string() + ": incomplete snapshot header: " + e.what());
    }
    if (payload.size() != s.grid.n * sizeof(Complex)) throw SchemaError(path.string() + ": payload size mismatch");
    s.psi.resize(s.grid.n);
    std::memcpy(s.psi.data(), payload.data(), payload.size());
    return s;
}

/// Wigner raster: header carries the x and p axes, payload is row-major
/// float64 W[x][p].
inline void write_wigner_raster(const std::filesystem::path& path, const solver::WignerMap& w,
                                json extra = json::object())
{
    json h = std::move(extra);
    h["x"] = w.x;
    h["p"] = w.p;
    h["dtype"] = "float64";
    h["layout"] = "row-major [x][p]";
    detail::write_blob(path, raster_magic, h, w.values.data(), w.values.size() * sizeof(double));
}

inline void write_wigner_csv(const std::filesystem::path& path, const solver::WignerMap& w)
{
    CsvWriter csv(path, {"x", "p", "w"});
    for (std::size_t i = 0; i < w.x.size(); ++i)
        for (std::size_t m = 0; m < w.p.size(); ++m) csv.row({w.x[i], w.p[m], w.at(i, m)});
}

inline void write_json(const std::filesystem::path& path, const json& j)
{
    std::ofstream out(path);
    if (!out) throw Error("cannot write " + path.string());
    out << j.dump(2) << '\n';
}

} // namespace dwq::io
