#include "entkit/state_io.hpp"

#include <cmath>
#include <fstream>

#include "entkit/bridge.hpp"

namespace entkit::io {

void require_keys(const json& obj, const std::vector<std::string>& allowed, const std::string& context) {
    if (!obj.is_object()) throw config_error(context + ": expected an object");
    for (const auto& [key, value] : obj.items()) {
        (void)value;
        bool ok = false;
        for (const auto& a : allowed)
            if (key == a) {
                ok = true;
                break;
            }
        if (!ok) throw config_error(context + ": unknown key '" + key + "'");
    }
}

json fock_to_json(const fock::FockDensityMatrix& state) {
    json entries = json::array();
    const int d = state.dim_per_mode();
    if (state.n_modes == 2) {
        for (int a = 0; a < d; ++a)
            for (int b = 0; b < d; ++b)
                for (int c = 0; c < d; ++c)
                    for (int e = 0; e < d; ++e) {
                        const auto v = state.element(a, b, c, e);
                        if (std::abs(v) > 1e-14) entries.push_back({a, b, c, e, v.real(), v.imag()});
                    }
    } else {
        for (int a = 0; a < d; ++a)
            for (int c = 0; c < d; ++c) {
                const auto v = state.element1(a, c);
                if (std::abs(v) > 1e-14) entries.push_back({a, c, v.real(), v.imag()});
            }
    }
    return json{{"n_modes", state.n_modes}, {"cutoff", state.cutoff}, {"entries", entries}};
}

fock::FockDensityMatrix fock_from_json(const json& j) {
    require_keys(j, {"n_modes", "cutoff", "entries"}, "state file");
    if (!j.contains("n_modes") || !j.contains("cutoff") || !j.contains("entries"))
        throw config_error("state file: required keys n_modes, cutoff, entries");
    const int n_modes = j.at("n_modes").get<int>();
    const int cutoff = j.at("cutoff").get<int>();
    if (n_modes != 1 && n_modes != 2) throw config_error("state file: n_modes must be 1 or 2");
    if (cutoff < 0 || cutoff > 64) throw config_error("state file: cutoff out of range");
    fock::FockDensityMatrix state(n_modes, cutoff);
    const size_t width = (n_modes == 2) ? 6 : 4;
    for (const auto& row : j.at("entries")) {
        if (!row.is_array() || row.size() != width)
            throw config_error("state file: malformed key 'entries'");
        if (n_modes == 2) {
            const int a = row[0].get<int>(), b = row[1].get<int>();
            const int c = row[2].get<int>(), d = row[3].get<int>();
            if (a < 0 || b < 0 || c < 0 || d < 0 || a > cutoff || b > cutoff || c > cutoff || d > cutoff)
                throw config_error("state file: index out of range in 'entries'");
            state.at(a, b, c, d) = fock::Cplx(row[4].get<double>(), row[5].get<double>());
        } else {
            const int a = row[0].get<int>(), c = row[1].get<int>();
            if (a < 0 || c < 0 || a > cutoff || c > cutoff)
                throw config_error("state file: index out of range in 'entries'");
            state.rho(a, c) = fock::Cplx(row[2].get<double>(), row[3].get<double>());
        }
    }
    return state;
}

json gaussian_to_json(const gauss::GaussianState& state) {
    json gamma = json::array();
    for (int i = 0; i < state.covariance.rows(); ++i)
        for (int j2 = 0; j2 < state.covariance.cols(); ++j2) gamma.push_back(state.covariance(i, j2));
    json d = json::array();
    for (int i = 0; i < state.displacement.size(); ++i) d.push_back(state.displacement(i));
    return json{{"n_modes", state.n_modes}, {"gamma", gamma}, {"d", d}};
}

gauss::GaussianState gaussian_from_json(const json& j) {
    require_keys(j, {"n_modes", "gamma", "d"}, "gaussian state");
    const int n = j.at("n_modes").get<int>();
    const int dim = 2 * n;
    const auto& g = j.at("gamma");
    if (static_cast<int>(g.size()) != dim * dim) throw config_error("gaussian state: gamma needs (2n)^2 numbers");
    gauss::Mat gamma(dim, dim);
    for (int i = 0; i < dim; ++i)
        for (int k = 0; k < dim; ++k) gamma(i, k) = g[static_cast<size_t>(i * dim + k)].get<double>();
    gauss::Vec d = gauss::Vec::Zero(dim);
    if (j.contains("d")) {
        const auto& dv = j.at("d");
        if (static_cast<int>(dv.size()) != dim) throw config_error("gaussian state: d needs 2n numbers");
        for (int i = 0; i < dim; ++i) d(i) = dv[static_cast<size_t>(i)].get<double>();
    }
    return gauss::GaussianState(gamma, d);
}

namespace {

fock::Cplx parse_amplitude(const json& v, const std::string& context) {
    if (v.is_number()) return fock::Cplx(v.get<double>(), 0.0);
    if (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number())
        return fock::Cplx(v[0].get<double>(), v[1].get<double>());
    throw config_error(context + ": amplitudes must be numbers or [re, im] pairs");
}

}  // namespace

fock::FockDensityMatrix state_from_spec(const json& spec, int cutoff) {
    if (!spec.is_object() || !spec.contains("kind")) throw config_error("state spec: missing key 'kind'");
    const std::string kind = spec.at("kind").get<std::string>();
    if (kind == "schmidt") {
        require_keys(spec, {"kind", "alphas"}, "state spec");
        const auto& al = spec.at("alphas");
        if (!al.is_array() || al.empty()) throw config_error("state spec: 'alphas' must be a non-empty array");
        const int n = static_cast<int>(al.size()) - 1;
        const int nc = std::max(cutoff, n);
        fock::FockPureVector psi(2, nc);
        for (int i = 0; i <= n; ++i) psi.amp(psi.index(i, i)) = parse_amplitude(al[static_cast<size_t>(i)], "state spec");
        fock::FockDensityMatrix rho = psi.to_density();
        rho.normalize();
        return rho;
    }
    if (kind == "elements") {
        require_keys(spec, {"kind", "n_modes", "cutoff", "entries"}, "state spec");
        json j = spec;
        j.erase("kind");
        if (!j.contains("n_modes")) j["n_modes"] = 2;
        fock::FockDensityMatrix rho = fock_from_json(j);
        rho.normalize();
        return rho.with_cutoff(std::max(cutoff, rho.cutoff));
    }
    if (kind == "procrustean") {
        require_keys(spec, {"kind", "r", "T", "tau"}, "state spec");
        const double r = spec.at("r").get<double>();
        const double T = spec.at("T").get<double>();
        const double tau = spec.at("tau").get<double>();
        fock::FockDensityMatrix rho = distill::procrustean_mixed_elements(r, tau, T);
        rho.normalize();
        return rho.with_cutoff(std::max(cutoff, rho.cutoff));
    }
    if (kind == "gaussian") {
        require_keys(spec, {"kind", "gamma", "d"}, "state spec");
        json j = spec;
        j.erase("kind");
        j["n_modes"] = 2;
        const gauss::GaussianState gs = gaussian_from_json(j);
        if (gs.displacement.cwiseAbs().maxCoeff() > 1e-12)
            throw config_error("state spec: gaussian inputs must be centered (d = 0)");
        const int conv_cutoff = std::min(cutoff, 3);
        fock::FockDensityMatrix rho = bridge::gaussian_to_fock(gs.covariance, conv_cutoff);
        rho.normalize();
        return rho.with_cutoff(std::max(cutoff, rho.cutoff));
    }
    throw config_error("state spec: unknown kind '" + kind + "'");
}

distill::ChannelSpec channel_from_json(const json& j, bool* on_both) {
    require_keys(j, {"kind", "parameter", "both"}, "channel");
    distill::ChannelSpec spec;
    const std::string kind = j.contains("kind") ? j.at("kind").get<std::string>() : "none";
    if (kind == "none")
        spec.kind = distill::ChannelSpec::Kind::none;
    else if (kind == "absorb")
        spec.kind = distill::ChannelSpec::Kind::absorb;
    else if (kind == "dephase")
        spec.kind = distill::ChannelSpec::Kind::dephase;
    else if (kind == "phase_diffuse")
        spec.kind = distill::ChannelSpec::Kind::phase_diffuse;
    else
        throw config_error("channel: unknown kind '" + kind + "'");
    if (j.contains("parameter")) spec.parameter = j.at("parameter").get<double>();
    if (on_both) *on_both = j.contains("both") && j.at("both").get<bool>();
    return spec;
}

json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw config_error("cannot open file: " + path);
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& e) {
        throw config_error("JSON parse error in " + path + ": " + e.what());
    }
    return j;
}

void save_json_file(const std::string& path, const json& j) {
    std::ofstream out(path);
    if (!out) throw config_error("cannot write file: " + path);
    out << j.dump(2) << "\n";
}

}  // namespace entkit::io
